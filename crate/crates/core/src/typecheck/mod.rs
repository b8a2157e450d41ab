//! Hindley-Milner style type checking for programs, lemma statements,
//! equation chains and rule applications.
//!
//! Type variables written by the user are rigid: unification never binds
//! them. Schemes are instantiated with fresh flexible variables (named
//! `?0`, `?1`, ...) at every use of a global constant, and when a global
//! lemma, axiom or definition is applied as a rewrite rule.

mod types;

use std::collections::{BTreeMap, BTreeSet};

use crate::diagnostics::{Diagnostic, Result};
use crate::syntax::*;

pub(crate) use types::unify_into;
pub use types::{unify, Scheme, TySubst, Type, UnifyError};

/// Types of the variables in scope: fixed variables of a proof, or the
/// schematic variables of a rule.
pub type Assumptions = BTreeMap<Name, Type>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DataInfo {
    pub params: Vec<Name>,
    /// Constructors in declaration order with their argument types.
    pub ctors: Vec<(Name, Vec<Type>)>,
}

#[derive(Clone, Debug, Default)]
pub struct TypeEnv {
    pub constructors: BTreeMap<Name, Scheme>,
    pub functions: BTreeMap<Name, Scheme>,
    pub datatypes: BTreeMap<Name, DataInfo>,
    ctor_owner: BTreeMap<Name, Name>,
}

impl TypeEnv {
    pub fn new() -> Self {
        Self::default()
    }

    /// Register a data type. Constructor schemes are derived from it.
    pub fn add_datatype(&mut self, name: Name, info: DataInfo) {
        let result = Type::Con(
            name.clone(),
            info.params.iter().cloned().map(Type::Var).collect(),
        );
        for (c, args) in &info.ctors {
            let body = Type::arrows(args.iter().cloned(), result.clone());
            self.constructors.insert(
                c.clone(),
                Scheme {
                    quantified: info.params.clone(),
                    body,
                },
            );
            self.ctor_owner.insert(c.clone(), name.clone());
        }
        self.datatypes.insert(name, info);
    }

    pub fn add_function(&mut self, name: Name, ty: Type) {
        self.functions.insert(name, Scheme::generalize(ty));
    }

    pub fn lookup(&self, name: &Name) -> Option<&Scheme> {
        self.constructors
            .get(name)
            .or_else(|| self.functions.get(name))
    }

    /// Data type a constructor belongs to.
    pub fn owner(&self, ctor: &Name) -> Option<&Name> {
        self.ctor_owner.get(ctor)
    }

    pub fn ctor_arity(&self, ctor: &Name) -> Option<usize> {
        let owner = self.owner(ctor)?;
        let info = &self.datatypes[owner];
        info.ctors
            .iter()
            .find(|(c, _)| c == ctor)
            .map(|(_, args)| args.len())
    }

    /// Argument types of `ctor` when its data type is instantiated at `ty`.
    pub fn ctor_args_at(&self, ctor: &Name, ty: &Type) -> Option<Vec<Type>> {
        let owner = self.owner(ctor)?;
        let info = &self.datatypes[owner];
        let Type::Con(tname, targs) = ty else {
            return None;
        };
        if tname != owner || targs.len() != info.params.len() {
            return None;
        }
        let inst: TySubst = info
            .params
            .iter()
            .cloned()
            .zip(targs.iter().cloned())
            .collect();
        let (_, args) = info.ctors.iter().find(|(c, _)| c == ctor)?;
        Some(args.iter().map(|a| inst.apply(a)).collect())
    }

    /// Check that `ty` only mentions declared type constructors at their
    /// declared arity.
    pub fn check_well_formed(&self, ty: &Type, span: Option<Span>) -> Result<()> {
        match ty {
            Type::Var(_) => Ok(()),
            Type::Fun(a, r) => {
                self.check_well_formed(a, span)?;
                self.check_well_formed(r, span)
            }
            Type::Con(c, args) => {
                let Some(info) = self.datatypes.get(c) else {
                    return Err(Diagnostic::typing(format!("unknown type `{c}`")).with_span(span));
                };
                if info.params.len() != args.len() {
                    return Err(Diagnostic::typing(format!(
                        "type `{c}` expects {} argument(s), but is given {}",
                        info.params.len(),
                        args.len()
                    ))
                    .with_span(span));
                }
                args.iter()
                    .try_for_each(|a| self.check_well_formed(a, span))
            }
        }
    }
}

fn is_flexible(v: &Name) -> bool {
    v.as_str().starts_with('?')
}

/// Unification state for one checking task.
pub struct Infer<'e> {
    env: &'e TypeEnv,
    subst: TySubst,
    counter: u32,
}

impl<'e> Infer<'e> {
    pub fn new(env: &'e TypeEnv) -> Self {
        Infer {
            env,
            subst: TySubst::new(),
            counter: 0,
        }
    }

    pub fn fresh(&mut self) -> Type {
        let v = Type::var(format!("?{}", self.counter).as_str());
        self.counter += 1;
        v
    }

    pub fn instantiate(&mut self, scheme: &Scheme) -> Type {
        let inst: TySubst = scheme
            .quantified
            .iter()
            .map(|q| (q.clone(), self.fresh()))
            .collect();
        inst.apply(&scheme.body)
    }

    /// Replace every rigid (user-written) type variable by a fresh one,
    /// consistently across calls sharing `renaming`.
    pub fn freshen(&mut self, ty: &Type, renaming: &mut TySubst) -> Type {
        for v in ty.free_vars() {
            if !is_flexible(&v) && renaming.get(&v).is_none() {
                let f = self.fresh();
                renaming.bind(v, f);
            }
        }
        renaming.apply(ty)
    }

    pub fn resolve(&self, ty: &Type) -> Type {
        self.subst.apply(ty)
    }

    pub fn unify(&mut self, a: &Type, b: &Type) -> Result<(), UnifyError> {
        unify_into(a, b, &mut self.subst, &is_flexible)
    }

    pub fn infer(&mut self, assumptions: &Assumptions, t: &Term) -> Result<Type> {
        match &t.kind {
            TermKind::Hole => Ok(self.fresh()),
            TermKind::Const(n) => {
                match self.env.lookup(n) {
                    Some(s) => {
                        let s = s.clone();
                        Ok(self.instantiate(&s))
                    }
                    None => Err(Diagnostic::typing(format!("`{n}` has no type signature"))
                        .with_span(t.span)),
                }
            }
            TermKind::Fixed(n) | TermKind::Schematic(n) => {
                assumptions.get(n).cloned().ok_or_else(|| {
                    Diagnostic::typing(format!("no type known for variable `{n}`"))
                        .with_span(t.span)
                })
            }
            TermKind::Ident(n) => {
                Err(Diagnostic::resolve(format!("unresolved name `{n}`")).with_span(t.span))
            }
            TermKind::App(f, a) => {
                let fun_ty = self.infer(assumptions, f)?;
                let arg_ty = self.infer(assumptions, a)?;
                let res = self.fresh();
                let expected = Type::fun(arg_ty.clone(), res.clone());
                if let Err(e) = self.unify(&fun_ty, &expected) {
                    let fun_ty = self.resolve(&fun_ty);
                    let arg_ty = self.resolve(&arg_ty);
                    let msg = match &fun_ty {
                        Type::Fun(param, _) => format!(
                            "ill-typed application: the function expects an argument of type `{param}`, \
                             but the argument has type `{arg_ty}` ({e})"
                        ),
                        _ => format!(
                            "ill-typed application: a term of type `{fun_ty}` is applied to an argument \
                             of type `{arg_ty}`, but it is not a function"
                        ),
                    };
                    return Err(Diagnostic::typing(msg).with_span(t.span).with_span(a.span));
                }
                Ok(self.resolve(&res))
            }
        }
    }
}

/// Principal type of `t` under `assumptions`.
pub fn infer_type(env: &TypeEnv, assumptions: &Assumptions, t: &Term) -> Result<Type> {
    let mut inf = Infer::new(env);
    let ty = inf.infer(assumptions, t)?;
    Ok(inf.resolve(&ty))
}

pub fn assumptions_of(binders: &[Binder]) -> Assumptions {
    binders
        .iter()
        .map(|b| (b.name.clone(), b.ty.clone()))
        .collect()
}

/// Build the type environment of a resolved module and check every
/// declaration against it.
pub fn check_module_types(m: &Module) -> Result<TypeEnv> {
    let mut env = TypeEnv::new();

    // Arity of every data type first, so constructor fields may refer to
    // types declared later.
    let mut arity: BTreeMap<Name, usize> = BTreeMap::new();
    for d in &m.decls {
        if let DeclKind::Data(data) = &d.kind {
            arity.insert(data.name.clone(), data.params.len());
            env.datatypes.insert(
                data.name.clone(),
                DataInfo {
                    params: data.params.clone(),
                    ctors: Vec::new(),
                },
            );
        }
    }
    for d in &m.decls {
        if let DeclKind::Data(data) = &d.kind {
            let params: BTreeSet<&Name> = data.params.iter().collect();
            if params.len() != data.params.len() {
                return Err(Diagnostic::typing(format!(
                    "repeated type parameter in `{}`",
                    data.name
                ))
                .with_span(d.span));
            }
            for c in &data.ctors {
                for arg in &c.args {
                    env.check_well_formed(arg, c.span)?;
                    if let Some(v) = arg.free_vars().into_iter().find(|v| !params.contains(v)) {
                        return Err(Diagnostic::typing(format!(
                            "type variable `{v}` is not a parameter of `{}`",
                            data.name
                        ))
                        .with_span(c.span));
                    }
                }
            }
            let info = DataInfo {
                params: data.params.clone(),
                ctors: data
                    .ctors
                    .iter()
                    .map(|c| (c.name.clone(), c.args.clone()))
                    .collect(),
            };
            env.add_datatype(data.name.clone(), info);
        }
    }

    for d in &m.decls {
        if let DeclKind::Sig(sig) = &d.kind {
            env.check_well_formed(&sig.ty, d.span)?;
            env.add_function(sig.name.clone(), sig.ty.clone());
        }
    }

    for d in &m.decls {
        match &d.kind {
            DeclKind::Equation(eq) => {
                equation_binders(&env, eq, d.span)?;
            }
            DeclKind::Axiom(ax) => check_prop(&env, &ax.prop)?,
            DeclKind::Lemma(l) => check_prop(&env, &l.prop)?,
            _ => {}
        }
    }
    Ok(env)
}

/// Check a rule statement: binder types are well formed and both sides
/// have one common type.
pub fn check_prop(env: &TypeEnv, prop: &Prop) -> Result<()> {
    for b in &prop.binders {
        env.check_well_formed(&b.ty, b.span.or(prop.span))?;
    }
    let assumptions = assumptions_of(&prop.binders);
    let mut inf = Infer::new(env);
    let l = inf.infer(&assumptions, &prop.lhs)?;
    let r = inf.infer(&assumptions, &prop.rhs)?;
    inf.unify(&l, &r).map_err(|e| {
        Diagnostic::typing(format!(
            "the two sides of the equation have different types: `{}` and `{}` ({e})",
            inf.resolve(&l),
            inf.resolve(&r)
        ))
        .with_span(prop.lhs.span)
        .with_span(prop.rhs.span)
    })
}

/// Type-check one function equation against its signature and return the
/// types of its pattern variables.
pub fn equation_binders(
    env: &TypeEnv,
    eq: &FunEquation,
    span: Option<Span>,
) -> Result<Vec<Binder>> {
    let Some(scheme) = env.functions.get(&eq.name) else {
        return Err(
            Diagnostic::typing(format!("missing type signature for `{}`", eq.name)).with_span(span),
        );
    };
    let sig = &scheme.body;
    let (_, patterns) = eq.lhs.spine();
    let (params, _) = sig.uncurry();
    if patterns.len() > params.len() {
        return Err(Diagnostic::typing(format!(
            "`{}` is applied to {} patterns, but its type `{sig}` has only {} argument(s)",
            eq.name,
            patterns.len(),
            params.len()
        ))
        .with_span(eq.lhs.span));
    }

    let mut inf = Infer::new(env);
    let mut vars: Vec<Name> = Vec::new();
    for p in &patterns {
        check_pattern(env, p, &mut vars)?;
    }
    let mut assumptions = Assumptions::new();
    for v in &vars {
        let f = inf.fresh();
        assumptions.insert(v.clone(), f);
    }
    let mut remaining = sig.clone();
    for p in &patterns {
        let Type::Fun(param, rest) = remaining else {
            unreachable!("arity checked above")
        };
        let pty = inf.infer(&assumptions, p)?;
        inf.unify(&pty, &param).map_err(|e| {
            Diagnostic::typing(format!(
                "pattern has type `{}`, but the signature of `{}` expects `{param}` ({e})",
                inf.resolve(&pty),
                eq.name
            ))
            .with_span(p.span)
        })?;
        remaining = *rest;
    }
    let rhs_ty = inf.infer(&assumptions, &eq.rhs)?;
    inf.unify(&rhs_ty, &remaining).map_err(|e| {
        Diagnostic::typing(format!(
            "right-hand side has type `{}`, but `{}` must return `{remaining}` here ({e})",
            inf.resolve(&rhs_ty),
            eq.name
        ))
        .with_span(eq.rhs.span)
    })?;
    Ok(vars
        .into_iter()
        .map(|v| {
            let ty = inf.resolve(&assumptions[&v]);
            Binder {
                name: v,
                ty,
                span: None,
            }
        })
        .collect())
}

/// Patterns are linear and built from fully applied constructors and
/// variables.
fn check_pattern(env: &TypeEnv, p: &Term, vars: &mut Vec<Name>) -> Result<()> {
    let (head, args) = p.spine();
    match &head.kind {
        TermKind::Schematic(v) if args.is_empty() => {
            if vars.contains(v) {
                return Err(Diagnostic::typing(format!(
                    "variable `{v}` occurs more than once in the patterns (patterns must be linear)"
                ))
                .with_span(p.span));
            }
            vars.push(v.clone());
            Ok(())
        }
        TermKind::Const(c) if env.constructors.contains_key(c) => {
            let arity = env.ctor_arity(c).unwrap_or(0);
            if args.len() != arity {
                return Err(Diagnostic::typing(format!(
                    "constructor `{c}` takes {arity} argument(s) but the pattern gives it {}",
                    args.len()
                ))
                .with_span(p.span));
            }
            args.into_iter()
                .try_for_each(|a| check_pattern(env, a, vars))
        }
        _ => Err(Diagnostic::typing(
            "a pattern must be a variable or a constructor applied to patterns",
        )
        .with_span(p.span)),
    }
}

/// All chain terms share one type, which is also the goal's type.
pub fn check_chain_types(
    env: &TypeEnv,
    assumptions: &Assumptions,
    goal: &Prop,
    chain: &Chain,
) -> Result<()> {
    let mut inf = Infer::new(env);
    let lhs = inf.infer(assumptions, &goal.lhs)?;
    let rhs = inf.infer(assumptions, &goal.rhs)?;
    inf.unify(&lhs, &rhs).map_err(|e| {
        Diagnostic::typing(format!(
            "the two sides of the goal have different types ({e})"
        ))
        .with_span(goal.lhs.span)
        .with_span(goal.rhs.span)
    })?;
    for t in chain.terms() {
        let ty = inf.infer(assumptions, t)?;
        inf.unify(&ty, &lhs).map_err(|e| {
            Diagnostic::typing(format!(
                "all terms of an equational proof must have the same type, but this term has type `{}` \
                 where `{}` is expected ({e})",
                inf.resolve(&ty),
                inf.resolve(&lhs)
            ))
            .with_span(t.span)
            .with_span(chain.first.span)
        })?;
    }
    Ok(())
}

/// Check that instantiating `rule` with `sigma` is type correct: every
/// substituted term's type unifies with its binder's type, all at once.
///
/// With `instantiate`, the rule's type variables are renamed apart first
/// (global rules); otherwise they are the rigid variables of the current
/// proof (local assumptions and induction hypotheses).
pub fn check_rule_application_types(
    rule: &Prop,
    sigma: &Substitution,
    env: &TypeEnv,
    assumptions: &Assumptions,
    instantiate: bool,
) -> Result<()> {
    let mut inf = Infer::new(env);
    let mut renaming = TySubst::new();
    for (v, t) in sigma.iter() {
        let Some(binder) = rule.binder(v) else {
            continue;
        };
        let declared = if instantiate {
            inf.freshen(&binder.ty, &mut renaming)
        } else {
            binder.ty.clone()
        };
        let actual = inf.infer(assumptions, t)?;
        if let Err(e) = inf.unify(&declared, &actual) {
            return Err(Diagnostic::typing(format!(
                "variable `{v} :: {}` cannot be instantiated with `{t}` of type `{}` ({e})",
                binder.ty,
                inf.resolve(&actual)
            ))
            .with_span(t.span));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_module, parse_term, resolve_names};

    const INTRO: &str = "data N = Z | S N
doubleN :: N -> N
doubleN Z = Z
doubleN (S x) = S (S (doubleN x))
data B = Zero | Even B | Odd B
value :: B -> N
value Zero = Z
value (Even x) = doubleN (value x)
value (Odd x) = S (doubleN (value x))
succB :: B -> B
succB Zero = _
succB (Even x) = _
succB (Odd x) = _
";

    fn module(src: &str) -> Result<Module> {
        resolve_names(parse_module(src)?)
    }

    fn env_of(src: &str) -> TypeEnv {
        check_module_types(&module(src).unwrap()).unwrap()
    }

    /// Resolve a standalone term: lowercase globals become constants,
    /// everything else is a fixed variable.
    fn term(env: &TypeEnv, src: &str) -> Term {
        parse_term(src)
            .unwrap()
            .map_leaves(&mut |leaf| match &leaf.kind {
                TermKind::Ident(n) if env.lookup(n).is_some() => Term::constant(n.clone()),
                TermKind::Ident(n) => Term::fixed(n.clone()),
                _ => leaf.clone(),
            })
    }

    fn n() -> Type {
        Type::con("N", vec![])
    }

    #[test]
    fn infer_examples() {
        let env = env_of(INTRO);
        assert_eq!(
            infer_type(&env, &Assumptions::new(), &term(&env, "value Zero")).unwrap(),
            n()
        );
        assert!(matches!(
            infer_type(&env, &Assumptions::new(), &Term::hole()).unwrap(),
            Type::Var(_)
        ));
        let a: Assumptions = [(Name::from("x"), Type::con("B", vec![]))]
            .into_iter()
            .collect();
        assert_eq!(
            infer_type(&env, &a, &term(&env, "S (doubleN (value x))")).unwrap(),
            n()
        );
    }

    #[test]
    fn ill_typed_application_mentions_both_types() {
        let env = env_of(INTRO);
        let err = infer_type(&env, &Assumptions::new(), &term(&env, "S Zero")).unwrap_err();
        assert!(
            err.message.contains("`N`") && err.message.contains("`B`"),
            "{}",
            err.message
        );
    }

    #[test]
    fn module_with_holes_is_accepted() {
        let env = env_of(INTRO);
        assert_eq!(env.datatypes.len(), 2);
        assert_eq!(env.functions.len(), 3);
    }

    #[test]
    fn datatype_only_module() {
        let env = env_of("data Bool = False | True");
        assert_eq!(env.constructors.len(), 2);
        assert!(env.functions.is_empty());
    }

    #[test]
    fn equation_result_clash() {
        let err = check_module_types(
            &module(
                "data N = Z | S N\ndata Bool = False | True\nplus :: N -> N -> N\nplus Z y = True",
            )
            .unwrap(),
        )
        .unwrap_err();
        assert!(
            err.message.contains("Bool") && err.message.contains('N'),
            "{}",
            err.message
        );
        assert_eq!(err.labels[0].span.start.column, 12);
    }

    #[test]
    fn pattern_errors() {
        let src = "data N = Z | S N\nf :: N -> N -> N\n";
        let err = check_module_types(&module(&format!("{src}f x x = x")).unwrap()).unwrap_err();
        assert!(err.message.contains("linear"));
        let err = check_module_types(&module(&format!("{src}f S y = y")).unwrap()).unwrap_err();
        assert!(err.message.contains("takes 1 argument"));
        let err = check_module_types(&module("data N = Z\ng Z = Z").unwrap()).unwrap_err();
        assert!(err.message.contains("missing type signature"));
    }

    #[test]
    fn polymorphic_equations() {
        let env = env_of(
            "data List a = Nil | Cons a (List a)
append :: List a -> List a -> List a
append Nil ys = ys
append (Cons x xs) ys = Cons x (append xs ys)
comp :: (b -> c) -> (a -> b) -> a -> c
comp f g x = f (g x)",
        );
        assert!(env.functions.contains_key(&Name::from("comp")));
        // A signature's type variables are rigid inside its equations.
        let err = check_module_types(&module("data N = Z\nidN :: a -> a\nidN x = Z").unwrap())
            .unwrap_err();
        assert!(err.message.contains("rigid"), "{}", err.message);
    }

    #[test]
    fn chain_types() {
        let env = env_of("data N = Z | S N\ndata Bool = False | True\nplus :: N -> N -> N");
        let a: Assumptions = [(Name::from("a"), n())].into_iter().collect();
        let goal = Prop::equation(term(&env, "S a"), term(&env, "plus (S Z) a"));
        let chain = Chain {
            first: term(&env, "S a"),
            steps: ["S (plus Z a)", "plus (S Z) a"]
                .iter()
                .map(|s| Step {
                    link: Link::ByHole,
                    link_span: None,
                    term: term(&env, s),
                })
                .collect(),
        };
        check_chain_types(&env, &a, &goal, &chain).unwrap();

        let single = Chain {
            first: term(&env, "S a"),
            steps: vec![],
        };
        check_chain_types(&env, &a, &goal, &single).unwrap();

        let bad = Chain {
            first: term(&env, "S a"),
            steps: vec![Step {
                link: Link::ByHole,
                link_span: None,
                term: term(&env, "True"),
            }],
        };
        assert!(check_chain_types(&env, &a, &goal, &bad).is_err());
    }

    #[test]
    fn rule_application_types() {
        let env = env_of("data U = U\ndata Bool = False | True\ndata N = Z | S N");
        let u = Type::con("U", vec![]);
        let eek = Prop::new(
            vec![Binder::new("x", u.clone()), Binder::new("y", u)],
            Term::schematic("x"),
            Term::schematic("y"),
        );
        let sigma: Substitution = [
            (Name::from("x"), Term::constant("False")),
            (Name::from("y"), Term::constant("True")),
        ]
        .into_iter()
        .collect();
        let err = check_rule_application_types(&eek, &sigma, &env, &Assumptions::new(), true)
            .unwrap_err();
        assert!(
            err.message.contains("x :: U") && err.message.contains("Bool"),
            "{}",
            err.message
        );

        check_rule_application_types(&eek, &Substitution::new(), &env, &Assumptions::new(), true)
            .unwrap();

        let poly = Prop::new(
            vec![Binder::new("x", Type::var("a"))],
            Term::schematic("x"),
            Term::schematic("x"),
        );
        let sigma: Substitution = [(
            Name::from("x"),
            Term::app(Term::constant("S"), Term::constant("Z")),
        )]
        .into_iter()
        .collect();
        check_rule_application_types(&poly, &sigma, &env, &Assumptions::new(), true).unwrap();
        // Not instantiated: `a` stays rigid.
        assert!(
            check_rule_application_types(&poly, &sigma, &env, &Assumptions::new(), false).is_err()
        );
    }

    #[test]
    fn shared_type_variables_across_binders() {
        let env = env_of("data Bool = False | True\ndata N = Z | S N");
        let a = Type::var("a");
        let rule = Prop::new(
            vec![Binder::new("x", a.clone()), Binder::new("y", a)],
            Term::schematic("x"),
            Term::schematic("y"),
        );
        let sigma: Substitution = [
            (Name::from("x"), Term::constant("Z")),
            (Name::from("y"), Term::constant("True")),
        ]
        .into_iter()
        .collect();
        assert!(
            check_rule_application_types(&rule, &sigma, &env, &Assumptions::new(), true).is_err()
        );
    }

    // ---------------------------------------------------------------------
    // Enumerative oracle: ground typing by trying every monotype for holes.

    fn ground_types(depth: usize) -> Vec<Type> {
        let base = vec![Type::con("Bool", vec![]), n()];
        if depth <= 1 {
            return base;
        }
        let smaller = ground_types(depth - 1);
        let mut out = base;
        for a in &smaller {
            for r in &smaller {
                let t = Type::fun(a.clone(), r.clone());
                if !out.contains(&t) {
                    out.push(t);
                }
            }
        }
        out
    }

    /// Type of a term given a type for each hole (preorder), or None.
    fn ground_type_of(
        env: &TypeEnv,
        t: &Term,
        holes: &mut std::slice::Iter<'_, Type>,
    ) -> Option<Type> {
        match &t.kind {
            TermKind::Hole => holes.next().cloned(),
            TermKind::Const(c) => Some(env.lookup(c)?.body.clone()),
            TermKind::App(f, a) => {
                let ft = ground_type_of(env, f, holes)?;
                let at = ground_type_of(env, a, holes)?;
                match ft {
                    Type::Fun(p, r) if *p == at => Some(*r),
                    _ => None,
                }
            }
            _ => None,
        }
    }

    fn hole_in_function_position(t: &Term) -> bool {
        match &t.kind {
            TermKind::App(f, a) => {
                f.is_hole() || hole_in_function_position(f) || hole_in_function_position(a)
            }
            _ => false,
        }
    }

    fn oracle_types(env: &TypeEnv, t: &Term, universe: &[Type]) -> BTreeSet<String> {
        let holes = t.hole_spans().len();
        let mut out = BTreeSet::new();
        let mut idx = vec![0usize; holes];
        loop {
            let choice: Vec<Type> = idx.iter().map(|&i| universe[i].clone()).collect();
            if let Some(ty) = ground_type_of(env, t, &mut choice.iter()) {
                out.insert(ty.to_string());
            }
            let mut k = 0;
            loop {
                if k == holes {
                    return out;
                }
                idx[k] += 1;
                if idx[k] < universe.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    fn all_terms(leaves: &[Term], size: usize) -> Vec<Term> {
        if size == 1 {
            return leaves.to_vec();
        }
        let mut out = Vec::new();
        for left in 1..size - 1 {
            let right = size - 1 - left;
            for f in all_terms(leaves, left) {
                for a in all_terms(leaves, right) {
                    out.push(Term::app(f.clone(), a));
                }
            }
        }
        out
    }

    fn is_instance(general: &Type, ground: &Type, s: &mut BTreeMap<Name, Type>) -> bool {
        match (general, ground) {
            (Type::Var(v), _) => match s.get(v) {
                Some(t) => t == ground,
                None => {
                    s.insert(v.clone(), ground.clone());
                    true
                }
            },
            (Type::Con(c, xs), Type::Con(d, ys)) => {
                c == d
                    && xs.len() == ys.len()
                    && xs.iter().zip(ys).all(|(x, y)| is_instance(x, y, s))
            }
            (Type::Fun(a, r), Type::Fun(b, q)) => is_instance(a, b, s) && is_instance(r, q, s),
            _ => false,
        }
    }

    #[test]
    fn inference_agrees_with_enumeration() {
        let env =
            env_of("data Bool = F | T\ndata N = Z | S N\nnot :: Bool -> Bool\nisZ :: N -> Bool");
        let leaves = vec![
            Term::constant("F"),
            Term::constant("Z"),
            Term::constant("S"),
            Term::constant("not"),
            Term::constant("isZ"),
            Term::hole(),
        ];
        let universe = ground_types(3);
        let mut checked = 0;
        for size in [1, 3, 5] {
            for t in all_terms(&leaves, size) {
                let oracle = oracle_types(&env, &t, &universe);
                match infer_type(&env, &Assumptions::new(), &t) {
                    Err(_) => assert!(
                        oracle.is_empty(),
                        "{t}: inference failed, oracle found {oracle:?}"
                    ),
                    Ok(ty) => {
                        // A hole in function position may need a type outside
                        // the enumerated universe.
                        if !hole_in_function_position(&t) {
                            assert!(
                                !oracle.is_empty(),
                                "{t}: inferred {ty}, oracle found nothing"
                            );
                        }
                        for g in &oracle {
                            let ground = universe.iter().find(|u| &u.to_string() == g).unwrap();
                            assert!(
                                is_instance(&ty, ground, &mut BTreeMap::new()),
                                "{t}: {g} not an instance of {ty}"
                            );
                        }
                        if ty.free_vars().is_empty() {
                            assert_eq!(oracle.len(), 1, "{t}");
                        }
                    }
                }
                checked += 1;
            }
        }
        assert!(checked > 200);
    }
}
