//! Checks every lemma's proof against its statement and collects holes.

use std::fmt;

use crate::diagnostics::{Diagnostic, Result};
use crate::rewrite::{check_step, GlobalRules, Incomplete, Rule, RuleEnv, RuleOrigin, StepVerdict};
use crate::syntax::*;
use crate::typecheck::{check_chain_types, equation_binders, Assumptions, Infer, Type, TypeEnv};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HoleKind {
    /// `_` in a term.
    Expression,
    /// `(by _)`.
    RuleName,
    /// `...` between two terms of a chain.
    Ellipsis,
    /// `Proof ... QED` or a bare `...` subproof.
    Proof,
    /// `...` in a list of cases.
    Cases,
    /// `...` at declaration level.
    Declaration,
    /// A step that is only justified by a rule whose statement has a hole.
    IncompleteRule,
}

impl fmt::Display for HoleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HoleKind::Expression => "expression hole",
            HoleKind::RuleName => "rule name hole",
            HoleKind::Ellipsis => "omitted rewrite steps",
            HoleKind::Proof => "proof hole",
            HoleKind::Cases => "missing cases",
            HoleKind::Declaration => "declaration hole",
            HoleKind::IncompleteRule => "step uses a rule with a hole",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HoleInfo {
    pub span: Option<Span>,
    pub kind: HoleKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProofStatus {
    Complete,
    Incomplete(Vec<HoleInfo>),
    Failed(Diagnostic),
}

impl ProofStatus {
    pub fn is_failed(&self) -> bool {
        matches!(self, ProofStatus::Failed(_))
    }

    pub fn is_complete(&self) -> bool {
        matches!(self, ProofStatus::Complete)
    }
}

#[derive(Clone, Debug)]
pub struct LemmaReport {
    pub name: String,
    pub span: Option<Span>,
    pub status: ProofStatus,
}

#[derive(Clone, Debug, Default)]
pub struct ModuleReport {
    /// Verdicts in order, up to and including the first failure.
    pub lemmas: Vec<LemmaReport>,
    /// Holes in declarations outside of lemmas.
    pub program_holes: Vec<HoleInfo>,
}

impl ModuleReport {
    pub fn failure(&self) -> Option<&Diagnostic> {
        self.lemmas.iter().find_map(|l| match &l.status {
            ProofStatus::Failed(d) => Some(d),
            _ => None,
        })
    }

    /// Every hole, program holes first.
    pub fn holes(&self) -> Vec<&HoleInfo> {
        let mut out: Vec<&HoleInfo> = self.program_holes.iter().collect();
        for l in &self.lemmas {
            if let ProofStatus::Incomplete(hs) = &l.status {
                out.extend(hs);
            }
        }
        out
    }

    pub fn is_complete(&self) -> bool {
        self.failure().is_none() && self.holes().is_empty()
    }
}

/// Fixed variables and local rules of one point in a proof.
#[derive(Clone, Debug, Default)]
pub struct LocalContext {
    pub fixed: Assumptions,
    pub rules: Vec<Rule>,
}

impl LocalContext {
    fn has_rule(&self, name: &Name) -> bool {
        self.rules.iter().any(|r| &r.name == name)
    }

    fn mentions(&self, v: &Name) -> bool {
        self.rules
            .iter()
            .any(|r| r.prop.lhs.fixed_vars().contains(v) || r.prop.rhs.fixed_vars().contains(v))
    }
}

/// Check all lemmas of a resolved and type-checked module.
///
/// Function equations and axioms are rules everywhere; a lemma is a rule
/// for every later lemma unless its proof failed. Checking stops at the
/// first failed lemma.
pub fn check_module(m: &Module, env: &TypeEnv) -> Result<ModuleReport> {
    let mut report = ModuleReport::default();
    let mut global = GlobalRules::new();
    for d in &m.decls {
        match &d.kind {
            DeclKind::Equation(eq) => {
                let binders = equation_binders(env, eq, d.span)?;
                let prop = Prop {
                    binders,
                    lhs: eq.lhs.clone(),
                    rhs: eq.rhs.clone(),
                    span: d.span,
                };
                global.add(Rule::new(eq.name.clone(), RuleOrigin::Def, prop));
                term_holes(&eq.rhs, &mut report.program_holes);
            }
            DeclKind::Axiom(ax) => {
                global.add(Rule::new(
                    ax.name.clone(),
                    RuleOrigin::Axiom,
                    ax.prop.clone(),
                ));
                prop_holes(&ax.prop, &mut report.program_holes);
            }
            DeclKind::Hole => report.program_holes.push(HoleInfo {
                span: d.span,
                kind: HoleKind::Declaration,
            }),
            _ => {}
        }
    }

    for (index, (lemma, span)) in m.lemmas().enumerate() {
        let name = lemma_display_name(lemma, index + 1);
        let status = check_lemma(lemma, env, &global);
        let failed = status.is_failed();
        if !failed {
            global.add(Rule::new(
                name.as_str(),
                RuleOrigin::Lemma,
                lemma.prop.clone(),
            ));
        }
        report.lemmas.push(LemmaReport { name, span, status });
        if failed {
            break;
        }
    }
    Ok(report)
}

pub fn check_lemma(lemma: &Lemma, env: &TypeEnv, global: &GlobalRules) -> ProofStatus {
    let ctx = LocalContext {
        fixed: lemma
            .prop
            .binders
            .iter()
            .map(|b| (b.name.clone(), b.ty.clone()))
            .collect(),
        rules: Vec::new(),
    };
    let goal = fix_binders(&lemma.prop);
    let mut checker = Checker {
        env,
        global,
        holes: Vec::new(),
    };
    prop_holes(&lemma.prop, &mut checker.holes);
    match checker.proof(&goal, &lemma.proof, &ctx) {
        Err(d) => ProofStatus::Failed(d),
        Ok(()) if checker.holes.is_empty() => ProofStatus::Complete,
        Ok(()) => {
            let mut holes = checker.holes;
            holes.sort_by_key(|h| h.span.map(|s| s.start));
            holes.dedup();
            ProofStatus::Incomplete(holes)
        }
    }
}

/// The statement with its quantified variables turned into fixed ones.
fn fix_binders(p: &Prop) -> Prop {
    let fix = |t: &Term| {
        t.map_leaves(&mut |leaf| match &leaf.kind {
            TermKind::Schematic(n) if p.binder(n).is_some() => {
                Term::fixed(n.clone()).with_span(leaf.span)
            }
            _ => leaf.clone(),
        })
    };
    Prop {
        binders: Vec::new(),
        lhs: fix(&p.lhs),
        rhs: fix(&p.rhs),
        span: p.span,
    }
}

fn rename_fixed(t: &Term, f: &mut impl FnMut(&Name) -> Option<Term>) -> Term {
    t.map_leaves(&mut |leaf| match &leaf.kind {
        TermKind::Fixed(n) => f(n).unwrap_or_else(|| leaf.clone()),
        _ => leaf.clone(),
    })
}

fn term_holes(t: &Term, out: &mut Vec<HoleInfo>) {
    out.extend(t.hole_spans().into_iter().map(|span| HoleInfo {
        span,
        kind: HoleKind::Expression,
    }));
}

fn prop_holes(p: &Prop, out: &mut Vec<HoleInfo>) {
    term_holes(&p.lhs, out);
    term_holes(&p.rhs, out);
}

/// Both propositions are binder-free and agree outside holes.
fn same_equation(stated: &Prop, expected: &Prop) -> bool {
    stated.binders.is_empty()
        && hole_match(&stated.lhs, &expected.lhs)
        && hole_match(&stated.rhs, &expected.rhs)
}

/// Induction hypotheses for one constructor case: one per argument whose
/// type is the induction type itself.
pub fn expected_ihs(
    ty: &Type,
    args: &[(Name, Type)],
    goal: &Prop,
    var: &Name,
    generalizing: &[Binder],
) -> Vec<Prop> {
    args.iter()
        .filter(|(_, t)| t == ty)
        .map(|(arg, _)| {
            let mut f = |n: &Name| {
                if n == var {
                    Some(Term::fixed(arg.clone()))
                } else if generalizing.iter().any(|g| &g.name == n) {
                    Some(Term::schematic(n.clone()))
                } else {
                    None
                }
            };
            let lhs = rename_fixed(&goal.lhs, &mut f);
            let rhs = rename_fixed(&goal.rhs, &mut f);
            Prop {
                binders: generalizing
                    .iter()
                    .map(|g| Binder {
                        span: None,
                        ..g.clone()
                    })
                    .collect(),
                lhs: lhs.strip_spans(),
                rhs: rhs.strip_spans(),
                span: None,
            }
        })
        .collect()
}

struct Checker<'a> {
    env: &'a TypeEnv,
    global: &'a GlobalRules,
    holes: Vec<HoleInfo>,
}

fn fail(message: impl Into<String>) -> Diagnostic {
    Diagnostic::proof(message)
}

/// A constructor pattern `C x1 .. xn` with its constructor and variables.
struct CasePattern {
    ctor: Name,
    vars: Vec<(Name, Type)>,
}

impl<'a> Checker<'a> {
    fn hole(&mut self, span: Option<Span>, kind: HoleKind) {
        self.holes.push(HoleInfo { span, kind });
    }

    fn proof(&mut self, goal: &Prop, proof: &Proof, ctx: &LocalContext) -> Result<()> {
        match &proof.kind {
            ProofKind::Hole => {
                self.hole(proof.span, HoleKind::Proof);
                Ok(())
            }
            ProofKind::Rewriting(chain) => self.rewriting(goal, chain, ctx),
            ProofKind::Extensionality {
                var,
                shown,
                proof: sub,
            } => self.extensionality(goal, var, shown, sub, ctx),
            ProofKind::CaseAnalysis {
                scrutinee,
                ty,
                cases,
            } => self.case_analysis(goal, scrutinee, ty, cases, ctx),
            ProofKind::Induction {
                var,
                generalizing,
                cases,
            } => self.induction(goal, var, generalizing, cases, ctx),
        }
    }

    fn rewriting(&mut self, goal: &Prop, chain: &Chain, ctx: &LocalContext) -> Result<()> {
        for t in chain.terms() {
            term_holes(t, &mut self.holes);
        }
        for s in &chain.steps {
            match s.link {
                Link::ByHole => self.hole(s.link_span, HoleKind::RuleName),
                Link::Ellipsis => self.hole(s.link_span, HoleKind::Ellipsis),
                _ => {}
            }
        }
        check_chain_types(self.env, &ctx.fixed, goal, chain)?;

        let (first, last) = (&chain.first, chain.last());
        let forward = hole_match(first, &goal.lhs) && hole_match(last, &goal.rhs);
        let backward = hole_match(first, &goal.rhs) && hole_match(last, &goal.lhs);
        if !forward && !backward {
            return Err(fail(
                "the equational proof must start at one side of the goal and end at the other",
            )
            .with_span(first.span)
            .with_span(last.span)
            .with_span(goal.span));
        }

        let renv = RuleEnv {
            types: self.env,
            global: self.global,
            local: &ctx.rules,
            fixed: &ctx.fixed,
        };
        let mut prev = first;
        for s in &chain.steps {
            match check_step(&renv, prev, s) {
                StepVerdict::Invalid(d) => return Err(d),
                StepVerdict::ValidIncomplete(Incomplete::HoleInRule) => {
                    self.hole(s.link_span, HoleKind::IncompleteRule)
                }
                _ => {}
            }
            prev = &s.term;
        }
        Ok(())
    }

    fn extensionality(
        &mut self,
        goal: &Prop,
        var: &Binder,
        shown: &Prop,
        sub: &Proof,
        ctx: &LocalContext,
    ) -> Result<()> {
        self.env.check_well_formed(&var.ty, var.span)?;
        if ctx.fixed.contains_key(&var.name) {
            return Err(fail(format!(
                "variable `{}` is already in use; choose a fresh name",
                var.name
            ))
            .with_span(var.span));
        }
        let mut inf = Infer::new(self.env);
        let l = inf.infer(&ctx.fixed, &goal.lhs)?;
        let r = inf.infer(&ctx.fixed, &goal.rhs)?;
        let res = inf.fresh();
        let expected = Type::fun(var.ty.clone(), res);
        for (side, ty) in [(&goal.lhs, &l), (&goal.rhs, &r)] {
            if let Err(e) = inf.unify(ty, &expected) {
                return Err(Diagnostic::typing(format!(
                    "extensionality with `{} :: {}` needs a function taking `{}`, but this side has type `{}` ({e})",
                    var.name,
                    var.ty,
                    var.ty,
                    inf.resolve(ty)
                ))
                .with_span(side.span)
                .with_span(var.span));
            }
        }
        prop_holes(shown, &mut self.holes);
        let x = Term::fixed(var.name.clone());
        let expected = Prop::equation(
            Term::app(goal.lhs.clone(), x.clone()),
            Term::app(goal.rhs.clone(), x),
        );
        if !same_equation(shown, &expected) {
            return Err(fail(format!(
                "after extensionality the goal is `{expected}`, which is not what `Show` states"
            ))
            .with_span(shown.span)
            .with_span(goal.span));
        }
        let mut inner = ctx.clone();
        inner.fixed.insert(var.name.clone(), var.ty.clone());
        self.proof(shown, sub, &inner)
    }

    /// Validate `C x1 .. xn` against data type `ty`; variables must not
    /// be in `taken`.
    fn case_pattern(
        &self,
        pattern: &Term,
        ty: &Type,
        taken: &Assumptions,
        fixes: &[Binder],
    ) -> Result<CasePattern> {
        let (head, args) = pattern.spine();
        let TermKind::Const(ctor) = &head.kind else {
            return Err(fail("a case must start with a constructor").with_span(pattern.span));
        };
        let Some(arg_types) = self.env.ctor_args_at(ctor, ty) else {
            return Err(
                fail(format!("`{ctor}` is not a constructor of `{ty}`")).with_span(head.span)
            );
        };
        if arg_types.len() != args.len() {
            return Err(fail(format!(
                "constructor `{ctor}` takes {} argument(s), but the case gives {}",
                arg_types.len(),
                args.len()
            ))
            .with_span(pattern.span));
        }
        let mut vars: Vec<(Name, Type)> = Vec::new();
        for (a, t) in args.iter().zip(arg_types) {
            let TermKind::Fixed(x) = &a.kind else {
                return Err(
                    fail("constructor arguments in a case must be variables").with_span(a.span)
                );
            };
            if vars.iter().any(|(y, _)| y == x) {
                return Err(
                    fail(format!("variable `{x}` occurs twice in the case")).with_span(a.span)
                );
            }
            if taken.contains_key(x) {
                return Err(fail(format!(
                    "variable `{x}` is already in use; choose a fresh name"
                ))
                .with_span(a.span));
            }
            vars.push((x.clone(), t));
        }
        if !fixes.is_empty() {
            let stated: Vec<(&Name, &Type)> = fixes.iter().map(|b| (&b.name, &b.ty)).collect();
            let expected: Vec<(&Name, &Type)> = vars.iter().map(|(n, t)| (n, t)).collect();
            if stated != expected {
                let want: Vec<String> = vars.iter().map(|(n, t)| format!("{n} :: {t}")).collect();
                let span = fixes.iter().filter_map(|b| b.span).reduce(Span::join);
                return Err(fail(format!(
                    "`Fix` must list the case variables: {}",
                    want.join(", ")
                ))
                .with_span(span)
                .with_span(pattern.span));
            }
        }
        Ok(CasePattern {
            ctor: ctor.clone(),
            vars,
        })
    }

    fn data_type(&self, ty: &Type, span: Option<Span>) -> Result<Vec<Name>> {
        self.env.check_well_formed(ty, span)?;
        match ty {
            Type::Con(d, _) => Ok(self.env.datatypes[d]
                .ctors
                .iter()
                .map(|(c, _)| c.clone())
                .collect()),
            _ => Err(fail(format!("`{ty}` is not a data type")).with_span(span)),
        }
    }

    fn check_coverage(
        &self,
        ctors: &[Name],
        seen: &[Name],
        case_hole: bool,
        span: Option<Span>,
    ) -> Result<()> {
        let missing: Vec<String> = ctors
            .iter()
            .filter(|c| !seen.contains(c))
            .map(|c| format!("`{c}`"))
            .collect();
        if !missing.is_empty() && !case_hole {
            return Err(fail(format!("missing case(s) for {}", missing.join(", "))).with_span(span));
        }
        Ok(())
    }

    fn fresh_rule_name(&self, name: &Name, ctx: &LocalContext, span: Option<Span>) -> Result<()> {
        if ctx.has_rule(name) {
            return Err(
                fail(format!("an assumption named `{name}` is already in scope")).with_span(span),
            );
        }
        Ok(())
    }

    fn case_analysis(
        &mut self,
        goal: &Prop,
        scrutinee: &Term,
        ty: &Type,
        cases: &[Entry<Case>],
        ctx: &LocalContext,
    ) -> Result<()> {
        term_holes(scrutinee, &mut self.holes);
        let ctors = self.data_type(ty, scrutinee.span)?;
        let mut inf = Infer::new(self.env);
        let actual = inf.infer(&ctx.fixed, scrutinee)?;
        if let Err(e) = inf.unify(&actual, ty) {
            return Err(Diagnostic::typing(format!(
                "case analysis on a term of type `{}` as if it had type `{ty}` ({e})",
                inf.resolve(&actual)
            ))
            .with_span(scrutinee.span));
        }

        let mut seen: Vec<Name> = Vec::new();
        for entry in cases {
            let case = match entry {
                Entry::Hole(span) => {
                    self.hole(*span, HoleKind::Cases);
                    continue;
                }
                Entry::Item(case) => case,
            };
            let pat = self.case_pattern(&case.pattern, ty, &ctx.fixed, &case.fixes)?;
            if seen.contains(&pat.ctor) {
                return Err(
                    fail(format!("duplicate case for `{}`", pat.ctor)).with_span(case.pattern.span)
                );
            }
            seen.push(pat.ctor.clone());

            let assumption = &case.assumption;
            self.fresh_rule_name(&assumption.name, ctx, assumption.span)?;
            prop_holes(&assumption.prop, &mut self.holes);
            let expected = Prop::equation(scrutinee.clone(), case.pattern.clone());
            if !same_equation(&assumption.prop, &expected) {
                return Err(fail(format!(
                    "the assumption of this case must state that the analysed term equals `{}`",
                    case.pattern
                ))
                .with_span(assumption.prop.span.or(assumption.span))
                .with_span(case.pattern.span));
            }
            let mut inner = ctx.clone();
            inner.fixed.extend(pat.vars);
            inner.rules.push(Rule::new(
                assumption.name.clone(),
                RuleOrigin::Assumption,
                assumption.prop.clone(),
            ));
            self.proof(goal, &case.proof, &inner)?;
        }
        let case_hole = cases.iter().any(Entry::is_hole);
        self.check_coverage(&ctors, &seen, case_hole, scrutinee.span)
    }

    fn induction_variable(&self, b: &Binder, ctx: &LocalContext) -> Result<()> {
        match ctx.fixed.get(&b.name) {
            None => {
                Err(fail(format!("`{}` is not a variable of the goal", b.name)).with_span(b.span))
            }
            Some(t) if t != &b.ty => Err(Diagnostic::typing(format!(
                "`{}` has type `{t}`, not `{}`",
                b.name, b.ty
            ))
            .with_span(b.span)),
            Some(_) if ctx.mentions(&b.name) => Err(fail(format!(
                "`{}` occurs in an assumption and cannot be used for induction here",
                b.name
            ))
            .with_span(b.span)),
            Some(_) => Ok(()),
        }
    }

    fn induction(
        &mut self,
        goal: &Prop,
        var: &Binder,
        generalizing: &[Binder],
        cases: &[Entry<IndCase>],
        ctx: &LocalContext,
    ) -> Result<()> {
        self.induction_variable(var, ctx)?;
        for (i, g) in generalizing.iter().enumerate() {
            if g.name == var.name || generalizing[..i].iter().any(|h| h.name == g.name) {
                return Err(fail(format!("`{}` is listed twice", g.name)).with_span(g.span));
            }
            self.induction_variable(g, ctx)?;
        }
        let ty = &var.ty;
        let ctors = self.data_type(ty, var.span)?;

        let mut base = ctx.clone();
        base.fixed.remove(&var.name);
        for g in generalizing {
            base.fixed.remove(&g.name);
        }

        let mut seen: Vec<Name> = Vec::new();
        for entry in cases {
            let case = match entry {
                Entry::Hole(span) => {
                    self.hole(*span, HoleKind::Cases);
                    continue;
                }
                Entry::Item(case) => case,
            };
            let mut taken = base.fixed.clone();
            for g in generalizing {
                taken.insert(g.name.clone(), g.ty.clone());
            }
            let pat = self.case_pattern(&case.pattern, ty, &taken, &case.fixes)?;
            if seen.contains(&pat.ctor) {
                return Err(
                    fail(format!("duplicate case for `{}`", pat.ctor)).with_span(case.pattern.span)
                );
            }
            seen.push(pat.ctor.clone());

            let mut expected = expected_ihs(ty, &pat.vars, goal, &var.name, generalizing);
            let mut inner = base.clone();
            inner.fixed.extend(pat.vars.iter().cloned());
            for h in &case.hypotheses {
                self.fresh_rule_name(&h.name, &inner, h.span)?;
                let holes = h.prop.contains_hole();
                if holes {
                    prop_holes(&h.prop, &mut self.holes);
                }
                let found = expected.iter().position(|e| {
                    if holes {
                        h.prop.binders == e.binders
                            && hole_match(&h.prop.lhs, &e.lhs)
                            && hole_match(&h.prop.rhs, &e.rhs)
                    } else {
                        alpha_equal(&h.prop, e)
                    }
                });
                let Some(k) = found else {
                    let shapes: Vec<String> = expected.iter().map(|e| format!("`{e}`")).collect();
                    let hint = if shapes.is_empty() {
                        "this case has no induction hypotheses".to_string()
                    } else {
                        format!("expected {}", shapes.join(" or "))
                    };
                    return Err(fail(format!(
                        "`{}` is not an induction hypothesis of this case; {hint}",
                        h.name
                    ))
                    .with_span(h.prop.span.or(h.span))
                    .with_span(case.pattern.span));
                };
                expected.remove(k);
                inner.rules.push(Rule::new(
                    h.name.clone(),
                    RuleOrigin::InductionHypothesis,
                    h.prop.clone(),
                ));
            }

            if let Some(refixed) = &case.refixed {
                let same = refixed.len() == generalizing.len()
                    && generalizing.iter().all(|g| refixed.iter().any(|r| r == g));
                if !same {
                    let span = refixed
                        .iter()
                        .filter_map(|b| b.span)
                        .reduce(Span::join)
                        .or(case.span);
                    let want: Vec<String> = generalizing.iter().map(|g| g.to_string()).collect();
                    return Err(fail(format!(
                        "`for fixed` must list exactly the generalized variables ({})",
                        if want.is_empty() {
                            "none".to_string()
                        } else {
                            want.join(", ")
                        }
                    ))
                    .with_span(span));
                }
            }
            for g in generalizing {
                inner.fixed.insert(g.name.clone(), g.ty.clone());
            }

            prop_holes(&case.shown, &mut self.holes);
            let lhs = rename_fixed(&goal.lhs, &mut |n| {
                (n == &var.name).then(|| case.pattern.clone())
            });
            let rhs = rename_fixed(&goal.rhs, &mut |n| {
                (n == &var.name).then(|| case.pattern.clone())
            });
            let want = Prop::equation(lhs, rhs);
            if !same_equation(&case.shown, &want) {
                return Err(fail(format!(
                    "in this case the goal is `{want}`, which is not what `Show` states"
                ))
                .with_span(case.shown.span)
                .with_span(case.pattern.span));
            }
            self.proof(&case.shown, &case.proof, &inner)?;
        }
        let case_hole = cases.iter().any(Entry::is_hole);
        self.check_coverage(&ctors, &seen, case_hole, var.span)
    }
}
