//! Name resolution: decides for every identifier whether it is a global
//! constant, a schematic variable of a rule, or a fixed variable of a proof.

use std::collections::{HashMap, HashSet};

use crate::diagnostics::{Diagnostic, Result};
use crate::syntax::*;

#[derive(Default)]
struct Globals {
    ctors: HashSet<Name>,
    functions: HashSet<Name>,
}

/// Lexical scope inside a rule or proof.
#[derive(Clone, Default)]
struct Scope {
    fixed: Vec<Name>,
    schematic: Vec<Name>,
}

impl Scope {
    fn with_fixed(&self, names: impl IntoIterator<Item = Name>) -> Scope {
        let mut s = self.clone();
        s.fixed.extend(names);
        s
    }

    fn without_fixed(&self, names: &[&Name]) -> Scope {
        let mut s = self.clone();
        s.fixed.retain(|n| !names.contains(&n));
        s
    }
}

pub fn resolve_names(raw: RawModule) -> Result<Module> {
    let globals = collect_globals(&raw)?;
    let r = Resolver { globals };
    let mut decls = Vec::with_capacity(raw.decls.len());
    for d in raw.decls {
        let kind = match d.kind {
            DeclKind::Equation(eq) => DeclKind::Equation(r.equation(eq)?),
            DeclKind::Axiom(ax) => DeclKind::Axiom(Axiom {
                prop: r.prop(&ax.prop, &Scope::default())?,
                name: ax.name,
            }),
            DeclKind::Lemma(l) => {
                let prop = r.prop(&l.prop, &Scope::default())?;
                let scope =
                    Scope::default().with_fixed(l.prop.binders.iter().map(|b| b.name.clone()));
                let proof = r.proof(&l.proof, &scope)?;
                DeclKind::Lemma(Lemma {
                    name: l.name,
                    prop,
                    proof,
                })
            }
            other => other,
        };
        decls.push(Decl { kind, span: d.span });
    }
    Ok(Module {
        file: raw.file,
        decls,
    })
}

fn collect_globals(raw: &RawModule) -> Result<Globals> {
    let mut g = Globals::default();
    let mut datatypes: HashMap<&Name, Option<Span>> = HashMap::new();
    let mut sigs: HashMap<&Name, Option<Span>> = HashMap::new();
    let mut rules: HashMap<&Name, Option<Span>> = HashMap::new();
    let dup = |what: &str, name: &Name, first: Option<Span>, again: Option<Span>| {
        Diagnostic::resolve(format!("duplicate {what} `{name}`"))
            .with_span(again)
            .with_span(first)
    };
    for d in &raw.decls {
        match &d.kind {
            DeclKind::Data(data) => {
                if let Some(first) = datatypes.insert(&data.name, d.span) {
                    return Err(dup("data type", &data.name, first, d.span));
                }
                for c in &data.ctors {
                    if !g.ctors.insert(c.name.clone()) {
                        return Err(dup("constructor", &c.name, None, c.span));
                    }
                }
            }
            DeclKind::Sig(sig) => {
                if let Some(first) = sigs.insert(&sig.name, d.span) {
                    return Err(dup("signature for", &sig.name, first, d.span));
                }
                g.functions.insert(sig.name.clone());
            }
            DeclKind::Equation(eq) => {
                g.functions.insert(eq.name.clone());
            }
            DeclKind::Axiom(Axiom { name, .. })
            | DeclKind::Lemma(Lemma {
                name: Some(name), ..
            }) => {
                if let Some(first) = rules.insert(name, d.span) {
                    return Err(dup("lemma or axiom name", name, first, d.span));
                }
            }
            _ => {}
        }
    }
    Ok(g)
}

struct Resolver {
    globals: Globals,
}

impl Resolver {
    fn term(&self, t: &Term, scope: &Scope) -> Result<Term> {
        let kind = match &t.kind {
            TermKind::Ident(n) => {
                if scope.schematic.contains(n) {
                    TermKind::Schematic(n.clone())
                } else if scope.fixed.contains(n) {
                    TermKind::Fixed(n.clone())
                } else if self.globals.functions.contains(n) {
                    TermKind::Const(n.clone())
                } else {
                    return Err(
                        Diagnostic::resolve(format!("undefined name `{n}`")).with_span(t.span)
                    );
                }
            }
            TermKind::Const(n) => {
                if !self.globals.ctors.contains(n) {
                    return Err(Diagnostic::resolve(format!("undefined constructor `{n}`"))
                        .with_span(t.span));
                }
                TermKind::Const(n.clone())
            }
            TermKind::App(f, a) => TermKind::App(
                Box::new(self.term(f, scope)?),
                Box::new(self.term(a, scope)?),
            ),
            k => k.clone(),
        };
        Ok(Term { kind, span: t.span })
    }

    fn binders_distinct(&self, binders: &[Binder]) -> Result<()> {
        for (i, b) in binders.iter().enumerate() {
            if let Some(prev) = binders[..i].iter().find(|p| p.name == b.name) {
                return Err(
                    Diagnostic::resolve(format!("variable `{}` is bound twice", b.name))
                        .with_span(b.span)
                        .with_span(prev.span),
                );
            }
        }
        Ok(())
    }

    fn prop(&self, p: &Prop, outer: &Scope) -> Result<Prop> {
        self.binders_distinct(&p.binders)?;
        let mut scope = outer.clone();
        scope
            .schematic
            .extend(p.binders.iter().map(|b| b.name.clone()));
        Ok(Prop {
            binders: p.binders.clone(),
            lhs: self.term(&p.lhs, &scope)?,
            rhs: self.term(&p.rhs, &scope)?,
            span: p.span,
        })
    }

    /// Lowercase names in a pattern are variables of kind `var`.
    fn pattern(&self, t: &Term, var: fn(Name) -> TermKind) -> Result<(Term, Vec<Name>)> {
        let mut names = Vec::new();
        let resolved = self.pattern_go(t, var, &mut names)?;
        Ok((resolved, names))
    }

    fn pattern_go(
        &self,
        t: &Term,
        var: fn(Name) -> TermKind,
        names: &mut Vec<Name>,
    ) -> Result<Term> {
        let kind = match &t.kind {
            TermKind::Ident(n) => {
                if !names.contains(n) {
                    names.push(n.clone());
                }
                var(n.clone())
            }
            TermKind::Hole => {
                return Err(
                    Diagnostic::resolve("a hole cannot be used as a pattern").with_span(t.span)
                );
            }
            TermKind::App(f, a) => TermKind::App(
                Box::new(self.pattern_go(f, var, names)?),
                Box::new(self.pattern_go(a, var, names)?),
            ),
            _ => return self.term(t, &Scope::default()),
        };
        Ok(Term { kind, span: t.span })
    }

    fn equation(&self, eq: FunEquation) -> Result<FunEquation> {
        let (head, args) = eq.lhs.spine();
        let mut lhs = head.clone();
        let mut vars = Vec::new();
        for arg in args {
            let (p, names) = self.pattern(arg, TermKind::Schematic)?;
            vars.extend(names);
            let span = join_opt(lhs.span, arg.span);
            lhs = Term::app(lhs, p).with_span(span);
        }
        let scope = Scope {
            fixed: Vec::new(),
            schematic: vars,
        };
        Ok(FunEquation {
            rhs: self.term(&eq.rhs, &scope)?,
            lhs,
            name: eq.name,
        })
    }

    fn chain(&self, c: &Chain, scope: &Scope) -> Result<Chain> {
        let mut steps = Vec::with_capacity(c.steps.len());
        for s in &c.steps {
            steps.push(Step {
                link: s.link.clone(),
                link_span: s.link_span,
                term: self.term(&s.term, scope)?,
            });
        }
        Ok(Chain {
            first: self.term(&c.first, scope)?,
            steps,
        })
    }

    fn assumption(&self, a: &Assumption, scope: &Scope) -> Result<Assumption> {
        Ok(Assumption {
            name: a.name.clone(),
            prop: self.prop(&a.prop, scope)?,
            span: a.span,
        })
    }

    fn proof(&self, p: &Proof, scope: &Scope) -> Result<Proof> {
        let kind = match &p.kind {
            ProofKind::Hole => ProofKind::Hole,
            ProofKind::Rewriting(chain) => ProofKind::Rewriting(self.chain(chain, scope)?),
            ProofKind::Extensionality { var, shown, proof } => {
                let inner = scope.with_fixed([var.name.clone()]);
                ProofKind::Extensionality {
                    var: var.clone(),
                    shown: self.prop(shown, &inner)?,
                    proof: Box::new(self.proof(proof, &inner)?),
                }
            }
            ProofKind::CaseAnalysis {
                scrutinee,
                ty,
                cases,
            } => {
                let mut out = Vec::with_capacity(cases.len());
                for entry in cases {
                    out.push(match entry {
                        Entry::Hole(span) => Entry::Hole(*span),
                        Entry::Item(case) => {
                            let (pattern, vars) = self.pattern(&case.pattern, TermKind::Fixed)?;
                            let inner = scope.with_fixed(vars);
                            Entry::Item(Case {
                                pattern,
                                fixes: case.fixes.clone(),
                                assumption: self.assumption(&case.assumption, &inner)?,
                                proof: self.proof(&case.proof, &inner)?,
                                span: case.span,
                            })
                        }
                    });
                }
                ProofKind::CaseAnalysis {
                    scrutinee: self.term(scrutinee, scope)?,
                    ty: ty.clone(),
                    cases: out,
                }
            }
            ProofKind::Induction {
                var,
                generalizing,
                cases,
            } => {
                let mut removed = vec![&var.name];
                removed.extend(generalizing.iter().map(|b| &b.name));
                let base = scope.without_fixed(&removed);
                let mut out = Vec::with_capacity(cases.len());
                for entry in cases {
                    out.push(match entry {
                        Entry::Hole(span) => Entry::Hole(*span),
                        Entry::Item(case) => {
                            let (pattern, vars) = self.pattern(&case.pattern, TermKind::Fixed)?;
                            let inner = base.with_fixed(vars);
                            let hypotheses = case
                                .hypotheses
                                .iter()
                                .map(|h| self.assumption(h, &inner))
                                .collect::<Result<Vec<_>>>()?;
                            let refixed_names = match &case.refixed {
                                Some(bs) => bs.iter().map(|b| b.name.clone()).collect::<Vec<_>>(),
                                None => generalizing.iter().map(|b| b.name.clone()).collect(),
                            };
                            let show_scope = inner.with_fixed(refixed_names);
                            Entry::Item(IndCase {
                                pattern,
                                fixes: case.fixes.clone(),
                                hypotheses,
                                refixed: case.refixed.clone(),
                                shown: self.prop(&case.shown, &show_scope)?,
                                proof: self.proof(&case.proof, &show_scope)?,
                                span: case.span,
                            })
                        }
                    });
                }
                ProofKind::Induction {
                    var: var.clone(),
                    generalizing: generalizing.clone(),
                    cases: out,
                }
            }
        };
        Ok(Proof { kind, span: p.span })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_module;

    fn resolve(src: &str) -> Result<Module> {
        resolve_names(parse_module(src).unwrap())
    }

    #[test]
    fn unbound_lowercase_in_axiom_is_global() {
        let m = resolve(
            "data T = T\ne :: T\ntimes :: T -> T -> T\naxiom neutral_right: forall x :: T : times x e .=. x",
        )
        .unwrap();
        let DeclKind::Axiom(ax) = &m.decls[3].kind else {
            panic!()
        };
        let (_, args) = ax.prop.lhs.spine();
        assert_eq!(args[0], &Term::schematic("x"));
        assert_eq!(args[1], &Term::constant("e"));
        assert_eq!(ax.prop.rhs, Term::schematic("x"));
    }

    #[test]
    fn binders_become_schematic() {
        let m = resolve("data N = Z\nplus :: N -> N -> N\naxiom p: forall x :: N: plus x Z .=. x")
            .unwrap();
        let DeclKind::Axiom(ax) = &m.decls[2].kind else {
            panic!()
        };
        assert_eq!(ax.prop.lhs.schematic_vars(), vec![Name::from("x")]);
        assert_eq!(ax.prop.rhs, Term::schematic("x"));
    }

    #[test]
    fn unknown_name_is_rejected() {
        let err =
            resolve("data N = Z\nLemma l: forall x :: N: x .=. q\nProof ... QED").unwrap_err();
        assert!(err.message.contains("undefined name `q`"));
        assert_eq!(err.labels[0].span.start.line, 2);
    }

    #[test]
    fn duplicate_binder_and_signature() {
        let err = resolve("data N = Z\naxiom a: forall x :: N, x :: N: x .=. x").unwrap_err();
        assert!(err.message.contains("bound twice"));
        let err = resolve("data N = Z\nf :: N\nf :: N").unwrap_err();
        assert!(err.message.contains("duplicate signature"));
    }

    #[test]
    fn proof_variables_are_fixed() {
        let m = resolve(
            "data N = Z | S N
plus :: N -> N -> N
plus Z y = y
Lemma l: forall a :: N: S a .=. plus (S Z) a
Proof by rewriting
  S a
  (by def plus) .=. S (plus Z a)
QED",
        )
        .unwrap();
        let DeclKind::Equation(eq) = &m.decls[2].kind else {
            panic!()
        };
        assert_eq!(eq.rhs, Term::schematic("y"));
        let (lemma, _) = m.lemmas().next().unwrap();
        let ProofKind::Rewriting(chain) = &lemma.proof.kind else {
            panic!()
        };
        assert_eq!(
            chain.first,
            Term::app(Term::constant("S"), Term::fixed("a"))
        );
    }

    #[test]
    fn induction_scopes() {
        let m = resolve(
            "data N = Z | S N
symdiff :: N -> N -> N
Lemma s: forall x :: N, y :: N: symdiff x y .=. symdiff y x
Proof by induction on x :: N generalizing y :: N
 Case S x
    Fix x :: N
    Assume IH: forall y :: N: symdiff x y .=. symdiff y x
    Then for fixed y :: N
    Show: symdiff (S x) y .=. symdiff y (S x)
    Proof ... QED
QED",
        )
        .unwrap();
        let (lemma, _) = m.lemmas().next().unwrap();
        let ProofKind::Induction { cases, .. } = &lemma.proof.kind else {
            panic!()
        };
        let case = cases[0].item().unwrap();
        let ih = &case.hypotheses[0].prop;
        assert_eq!(ih.lhs.fixed_vars(), vec![Name::from("x")]);
        assert_eq!(ih.lhs.schematic_vars(), vec![Name::from("y")]);
        assert_eq!(
            case.shown.lhs.fixed_vars(),
            vec![Name::from("x"), Name::from("y")]
        );
    }

    #[test]
    fn pattern_variables_shadow_globals() {
        let m = resolve("data N = Z | S N\ne :: N\nf :: N -> N\nf e = e").unwrap();
        let DeclKind::Equation(eq) = &m.decls[3].kind else {
            panic!()
        };
        assert_eq!(eq.rhs, Term::schematic("e"));
    }

    #[test]
    fn undefined_constructor() {
        let err = resolve("data N = Z\nf :: N -> N\nf x = Q").unwrap_err();
        assert!(err.message.contains("undefined constructor `Q`"));
    }
}
