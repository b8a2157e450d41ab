//! First-order matching and the validity check for a single rewrite step.

use std::collections::BTreeMap;
use std::fmt;

use crate::diagnostics::Diagnostic;
use crate::syntax::*;
use crate::typecheck::{check_rule_application_types, Assumptions, TypeEnv};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleOrigin {
    Def,
    Axiom,
    Lemma,
    Assumption,
    InductionHypothesis,
}

impl RuleOrigin {
    /// Global rules are polymorphic in their type variables; local ones
    /// share the rigid type variables of the enclosing lemma.
    pub fn is_global(self) -> bool {
        matches!(
            self,
            RuleOrigin::Def | RuleOrigin::Axiom | RuleOrigin::Lemma
        )
    }
}

impl fmt::Display for RuleOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleOrigin::Def => "definition",
            RuleOrigin::Axiom => "axiom",
            RuleOrigin::Lemma => "lemma",
            RuleOrigin::Assumption => "assumption",
            RuleOrigin::InductionHypothesis => "induction hypothesis",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    pub name: Name,
    pub origin: RuleOrigin,
    pub prop: Prop,
}

impl Rule {
    pub fn new(name: impl Into<Name>, origin: RuleOrigin, prop: Prop) -> Self {
        Rule {
            name: name.into(),
            origin,
            prop,
        }
    }
}

/// Rules available everywhere in a module: one `def` rule per function
/// equation, plus axioms and lemmas by name.
#[derive(Clone, Debug, Default)]
pub struct GlobalRules {
    defs: BTreeMap<Name, Vec<Rule>>,
    named: BTreeMap<Name, Rule>,
}

impl GlobalRules {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add a rule. `Def` rules are grouped under their name, the function
    /// they define.
    pub fn add(&mut self, rule: Rule) {
        if rule.origin == RuleOrigin::Def {
            self.defs.entry(rule.name.clone()).or_default().push(rule);
        } else {
            self.named.insert(rule.name.clone(), rule);
        }
    }

    pub fn defs(&self, f: &Name) -> &[Rule] {
        self.defs.get(f).map_or(&[], Vec::as_slice)
    }

    pub fn named(&self, n: &Name) -> Option<&Rule> {
        self.named.get(n)
    }
}

/// Everything a step check needs to know.
#[derive(Clone, Copy)]
pub struct RuleEnv<'a> {
    pub types: &'a TypeEnv,
    pub global: &'a GlobalRules,
    /// Assumptions and induction hypotheses in scope, innermost last.
    pub local: &'a [Rule],
    /// Types of the fixed variables in scope.
    pub fixed: &'a Assumptions,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Incomplete {
    HoleInTerm,
    HoleLink,
    Ellipsis,
    /// The step is justified only by a rule whose statement has a hole.
    HoleInRule,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StepVerdict {
    Valid,
    ValidIncomplete(Incomplete),
    Invalid(Diagnostic),
}

impl StepVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, StepVerdict::Valid)
    }
}

/// Find `σ` with `substitute(pattern, σ) == t`.
pub fn match_pattern(pattern: &Term, t: &Term) -> Option<Substitution> {
    let mut sigma = Substitution::new();
    match_into(pattern, t, &mut sigma).then_some(sigma)
}

fn match_into(p: &Term, t: &Term, sigma: &mut Substitution) -> bool {
    match (&p.kind, &t.kind) {
        (_, TermKind::Hole) => false,
        (TermKind::Hole, _) => true,
        (TermKind::Schematic(v), _) => match sigma.get(v) {
            Some(bound) => bound == t,
            None => {
                sigma.insert(v.clone(), t.clone());
                true
            }
        },
        (TermKind::App(f, a), TermKind::App(g, b)) => {
            match_into(f, g, sigma) && match_into(a, b, sigma)
        }
        _ => p == t,
    }
}

/// Like `match_into`, but a hole in `t` matches anything without binding.
fn match_lenient(p: &Term, t: &Term, sigma: &mut Substitution) -> bool {
    match (&p.kind, &t.kind) {
        (_, TermKind::Hole) | (TermKind::Hole, _) => true,
        (TermKind::Schematic(v), _) => match sigma.get(v) {
            Some(bound) => hole_match(bound, t),
            None => {
                sigma.insert(v.clone(), t.clone());
                true
            }
        },
        (TermKind::App(f, a), TermKind::App(g, b)) => {
            match_lenient(f, g, sigma) && match_lenient(a, b, sigma)
        }
        _ => p == t,
    }
}

enum Search {
    Found,
    /// Only instances that fail the type check rewrite `from` into `to`.
    IllTyped(Diagnostic),
    NotFound,
}

fn search(rule: &Rule, from: &Term, to: &Term, types: &TypeEnv, fixed: &Assumptions) -> Search {
    let mut type_error = None;
    let prop = &rule.prop;
    for (source, target) in [(&prop.lhs, &prop.rhs), (&prop.rhs, &prop.lhs)] {
        for (p, sub) in subterm_positions(from) {
            if sub.contains_hole() {
                continue;
            }
            let Some(mut sigma) = match_pattern(source, sub) else {
                continue;
            };
            let candidate = replace_at(from, &p, substitute(target, &sigma));
            let ok = if candidate.schematic_vars().is_empty() {
                hole_match(&candidate, to)
            } else {
                // Variables that occur only in the target are read off `to`.
                let mut extra = Substitution::new();
                match_lenient(&candidate, to, &mut extra) && {
                    for (v, t) in extra.iter() {
                        sigma.insert(v.clone(), t.clone());
                    }
                    true
                }
            };
            if !ok {
                continue;
            }
            match check_rule_application_types(prop, &sigma, types, fixed, rule.origin.is_global())
            {
                Ok(()) => return Search::Found,
                Err(e) => {
                    type_error.get_or_insert(e);
                }
            }
        }
    }
    type_error.map_or(Search::NotFound, Search::IllTyped)
}

/// Whether one application of `rule`, at some position and in some
/// direction, rewrites `from` into `to` (up to holes in `to`).
pub fn rule_rewrites(
    rule: &Rule,
    from: &Term,
    to: &Term,
    types: &TypeEnv,
    fixed: &Assumptions,
) -> bool {
    matches!(search(rule, from, to, types, fixed), Search::Found)
}

/// Check the step `t1 link t2`, where `step` carries the link and `t2`.
pub fn check_step(env: &RuleEnv<'_>, t1: &Term, step: &Step) -> StepVerdict {
    let t2 = &step.term;
    let candidates: Vec<&Rule> = match &step.link {
        Link::Ellipsis => return StepVerdict::ValidIncomplete(Incomplete::Ellipsis),
        Link::ByHole => return StepVerdict::ValidIncomplete(Incomplete::HoleLink),
        Link::ByDef(f) => env.global.defs(f).iter().collect(),
        Link::ByRule(n) => env
            .local
            .iter()
            .rev()
            .find(|r| &r.name == n)
            .or_else(|| env.global.named(n))
            .into_iter()
            .collect(),
    };
    if candidates.is_empty() {
        let what = match &step.link {
            Link::ByDef(f) => format!("def {f}"),
            Link::ByRule(n) => n.to_string(),
            _ => unreachable!(),
        };
        return StepVerdict::Invalid(
            Diagnostic::proof(format!("unknown rule `{what}`")).with_span(step.link_span),
        );
    }
    if t1.contains_hole() || t2.contains_hole() {
        return StepVerdict::ValidIncomplete(Incomplete::HoleInTerm);
    }

    let mut type_error = None;
    let mut verdict = None;
    for rule in candidates {
        match search(rule, t1, t2, env.types, env.fixed) {
            Search::Found if !rule.prop.contains_hole() => return StepVerdict::Valid,
            Search::Found => verdict = Some(StepVerdict::ValidIncomplete(Incomplete::HoleInRule)),
            Search::IllTyped(e) => {
                type_error.get_or_insert((rule.name.clone(), e));
            }
            Search::NotFound => {}
        }
    }
    if let Some(v) = verdict {
        return v;
    }
    let d = match type_error {
        Some((name, e)) => Diagnostic {
            message: format!("rule `{name}` cannot be applied here: {}", e.message),
            ..e
        },
        None => Diagnostic::proof(format!(
            "rewrite step does not follow: no single application of `{}` turns the previous term into this one",
            match &step.link {
                Link::ByDef(f) => format!("def {f}"),
                Link::ByRule(n) => n.to_string(),
                _ => unreachable!(),
            }
        )),
    };
    StepVerdict::Invalid(
        d.with_span(t1.span)
            .with_span(step.link_span)
            .with_span(t2.span),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::typecheck::Type;
    use proptest::prelude::*;

    fn c(n: &str) -> Term {
        Term::constant(n)
    }
    fn v(n: &str) -> Term {
        Term::fixed(n)
    }
    fn s(n: &str) -> Term {
        Term::schematic(n)
    }
    fn ap(h: Term, args: Vec<Term>) -> Term {
        Term::apply(h, args)
    }

    fn nat_env() -> TypeEnv {
        let mut env = TypeEnv::new();
        let n = Type::con("N", vec![]);
        env.add_datatype(
            "N".into(),
            crate::typecheck::DataInfo {
                params: vec![],
                ctors: vec![("Z".into(), vec![]), ("S".into(), vec![n.clone()])],
            },
        );
        env.add_function(
            "plus".into(),
            Type::arrows([n.clone(), n.clone()], n.clone()),
        );
        env.add_function(
            "times".into(),
            Type::arrows([n.clone(), n.clone()], n.clone()),
        );
        env.add_function("e".into(), n);
        env
    }

    fn n() -> Type {
        Type::con("N", vec![])
    }

    fn fixed_n(names: &[&str]) -> Assumptions {
        names.iter().map(|x| (Name::from(*x), n())).collect()
    }

    fn def_plus_z() -> Rule {
        Rule::new(
            "plus",
            RuleOrigin::Def,
            Prop::new(
                vec![Binder::new("y", n())],
                ap(c("plus"), vec![c("Z"), s("y")]),
                s("y"),
            ),
        )
    }

    #[test]
    fn match_examples() {
        let pat = ap(c("times"), vec![s("x"), c("e")]);
        let t = ap(
            c("times"),
            vec![ap(c("times"), vec![v("x0"), v("y0")]), c("e")],
        );
        let sigma = match_pattern(&pat, &t).unwrap();
        assert_eq!(
            sigma.get(&"x".into()),
            Some(&ap(c("times"), vec![v("x0"), v("y0")]))
        );
        assert_eq!(sigma.len(), 1);

        assert!(match_pattern(&s("x"), &t).is_some());
        assert!(match_pattern(
            &ap(c("times"), vec![s("x"), s("x")]),
            &ap(c("times"), vec![v("a"), v("b")])
        )
        .is_none());
        assert!(match_pattern(
            &ap(c("times"), vec![s("x"), s("x")]),
            &ap(c("times"), vec![v("a"), v("a")])
        )
        .is_some());
    }

    #[test]
    fn rewrite_examples() {
        let env = nat_env();
        let fixed = fixed_n(&["a"]);
        let from = ap(c("S"), vec![v("a")]);
        let to = ap(c("S"), vec![ap(c("plus"), vec![c("Z"), v("a")])]);
        assert!(rule_rewrites(&def_plus_z(), &from, &to, &env, &fixed));
        assert!(rule_rewrites(&def_plus_z(), &to, &from, &env, &fixed));
        assert!(!rule_rewrites(
            &def_plus_z(),
            &c("Z"),
            &c("Z"),
            &env,
            &fixed
        ));
    }

    #[test]
    fn target_only_variables_are_read_off_the_result() {
        let env = nat_env();
        let fixed = fixed_n(&["x", "y"]);
        let square = Rule::new(
            "square",
            RuleOrigin::Axiom,
            Prop::new(
                vec![Binder::new("x", n())],
                ap(c("times"), vec![s("x"), s("x")]),
                c("e"),
            ),
        );
        let from = ap(
            c("times"),
            vec![ap(c("times"), vec![v("x"), v("y")]), c("e")],
        );
        let yx = ap(c("times"), vec![v("y"), v("x")]);
        let to = ap(
            c("times"),
            vec![
                ap(c("times"), vec![v("x"), v("y")]),
                ap(c("times"), vec![yx.clone(), yx.clone()]),
            ],
        );
        assert!(rule_rewrites(&square, &from, &to, &env, &fixed));
        assert!(rule_rewrites(&square, &from, &Term::hole(), &env, &fixed));
        let bad = ap(
            c("times"),
            vec![
                ap(c("times"), vec![v("x"), v("y")]),
                ap(c("times"), vec![yx, v("x")]),
            ],
        );
        assert!(!rule_rewrites(&square, &from, &bad, &env, &fixed));
    }

    fn step(link: Link, t: Term) -> Step {
        Step {
            link,
            link_span: None,
            term: t,
        }
    }

    #[test]
    fn check_step_examples() {
        let env = nat_env();
        let mut global = GlobalRules::new();
        global.add(def_plus_z());
        global.add(Rule::new(
            "plus",
            RuleOrigin::Def,
            Prop::new(
                vec![Binder::new("x", n()), Binder::new("y", n())],
                ap(c("plus"), vec![ap(c("S"), vec![s("x")]), s("y")]),
                ap(c("S"), vec![ap(c("plus"), vec![s("x"), s("y")])]),
            ),
        ));
        let fixed = fixed_n(&["a"]);
        let renv = RuleEnv {
            types: &env,
            global: &global,
            local: &[],
            fixed: &fixed,
        };
        let sa = ap(c("S"), vec![v("a")]);
        let spza = ap(c("S"), vec![ap(c("plus"), vec![c("Z"), v("a")])]);
        let pssza = ap(c("plus"), vec![ap(c("S"), vec![c("Z")]), v("a")]);

        assert_eq!(
            check_step(&renv, &sa, &step(Link::ByDef("plus".into()), spza.clone())),
            StepVerdict::Valid
        );
        assert_eq!(
            check_step(
                &renv,
                &spza,
                &step(Link::ByDef("plus".into()), pssza.clone())
            ),
            StepVerdict::Valid
        );
        assert_eq!(
            check_step(&renv, &sa, &step(Link::ByHole, pssza.clone())),
            StepVerdict::ValidIncomplete(Incomplete::HoleLink)
        );
        assert_eq!(
            check_step(&renv, &sa, &step(Link::Ellipsis, pssza.clone())),
            StepVerdict::ValidIncomplete(Incomplete::Ellipsis)
        );
        assert_eq!(
            check_step(&renv, &sa, &step(Link::ByDef("plus".into()), Term::hole())),
            StepVerdict::ValidIncomplete(Incomplete::HoleInTerm)
        );
        assert!(matches!(
            check_step(&renv, &sa, &step(Link::ByDef("plus".into()), pssza)),
            StepVerdict::Invalid(_)
        ));
        let StepVerdict::Invalid(d) = check_step(
            &renv,
            &c("False"),
            &step(Link::ByDef("f".into()), c("True")),
        ) else {
            panic!()
        };
        assert!(d.message.contains("unknown rule"));
    }

    #[test]
    fn local_rules_shadow_global_ones() {
        let env = nat_env();
        let mut global = GlobalRules::new();
        global.add(Rule::new(
            "IH",
            RuleOrigin::Lemma,
            Prop::equation(v("a"), c("Z")),
        ));
        let local = [Rule::new(
            "IH",
            RuleOrigin::InductionHypothesis,
            Prop::equation(v("a"), ap(c("S"), vec![c("Z")])),
        )];
        let fixed = fixed_n(&["a"]);
        let renv = RuleEnv {
            types: &env,
            global: &global,
            local: &local,
            fixed: &fixed,
        };
        assert!(check_step(
            &renv,
            &v("a"),
            &step(Link::ByRule("IH".into()), ap(c("S"), vec![c("Z")]))
        )
        .is_valid());
        assert!(!check_step(&renv, &v("a"), &step(Link::ByRule("IH".into()), c("Z"))).is_valid());
    }

    #[test]
    fn rule_with_hole_gives_incomplete_step() {
        let env = nat_env();
        let mut global = GlobalRules::new();
        global.add(Rule::new(
            "f",
            RuleOrigin::Def,
            Prop::equation(ap(c("plus"), vec![c("Z"), c("Z")]), Term::hole()),
        ));
        let fixed = Assumptions::new();
        let renv = RuleEnv {
            types: &env,
            global: &global,
            local: &[],
            fixed: &fixed,
        };
        assert_eq!(
            check_step(
                &renv,
                &ap(c("plus"), vec![c("Z"), c("Z")]),
                &step(Link::ByDef("f".into()), c("Z"))
            ),
            StepVerdict::ValidIncomplete(Incomplete::HoleInRule)
        );
    }

    // ---------------------------------------------------------------------
    // Oracle: `a` rewrites to `b` iff they differ only inside one position
    // whose two subterms form an instance of (source, target).

    fn joint_instance(src: &Term, tgt: &Term, a: &Term, b: &Term) -> bool {
        let pair_pat = Term::app(Term::app(c("⟨pair⟩"), src.clone()), tgt.clone());
        let pair = Term::app(Term::app(c("⟨pair⟩"), a.clone()), b.clone());
        match_pattern(&pair_pat, &pair).is_some()
    }

    fn oracle(rule: &Prop, a: &Term, b: &Term) -> bool {
        fn go(rule: &Prop, a: &Term, b: &Term) -> bool {
            if joint_instance(&rule.lhs, &rule.rhs, a, b)
                || joint_instance(&rule.rhs, &rule.lhs, a, b)
            {
                return true;
            }
            match (&a.kind, &b.kind) {
                (TermKind::App(f, x), TermKind::App(g, y)) => {
                    (x == y && go(rule, f, g)) || (f == g && go(rule, x, y))
                }
                _ => false,
            }
        }
        go(rule, a, b)
    }

    fn leaf() -> impl Strategy<Value = Term> {
        prop_oneof![Just(c("A")), Just(v("u")), Just(v("w"))]
    }

    fn term() -> impl Strategy<Value = Term> {
        leaf().prop_recursive(3, 12, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|x| ap(c("F"), vec![x])),
                (inner.clone(), inner).prop_map(|(x, y)| ap(c("G"), vec![x, y])),
            ]
        })
    }

    fn pattern() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![Just(c("A")), Just(s("x")), Just(s("y"))];
        leaf.prop_recursive(2, 6, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|x| ap(c("F"), vec![x])),
                (inner.clone(), inner).prop_map(|(x, y)| ap(c("G"), vec![x, y])),
            ]
        })
    }

    fn one_sorted() -> TypeEnv {
        let mut env = TypeEnv::new();
        let t = Type::con("T", vec![]);
        env.add_datatype(
            "T".into(),
            crate::typecheck::DataInfo {
                params: vec![],
                ctors: vec![
                    ("A".into(), vec![]),
                    ("F".into(), vec![t.clone()]),
                    ("G".into(), vec![t.clone(), t]),
                ],
            },
        );
        env
    }

    fn binders_for(lhs: &Term, rhs: &Term) -> Vec<Binder> {
        let mut names = lhs.schematic_vars();
        for x in rhs.schematic_vars() {
            if !names.contains(&x) {
                names.push(x);
            }
        }
        names
            .into_iter()
            .map(|x| Binder {
                name: x,
                ty: Type::con("T", vec![]),
                span: None,
            })
            .collect()
    }

    proptest! {
        #[test]
        fn agrees_with_oracle(lhs in pattern(), rhs in pattern(), a in term(), b in term()) {
            let env = one_sorted();
            let fixed: Assumptions = ["u", "w"].iter().map(|x| (Name::from(*x), Type::con("T", vec![]))).collect();
            let prop = Prop::new(binders_for(&lhs, &rhs), lhs, rhs);
            let rule = Rule::new("r", RuleOrigin::Axiom, prop.clone());
            prop_assert_eq!(rule_rewrites(&rule, &a, &b, &env, &fixed), oracle(&prop, &a, &b));
        }

        #[test]
        fn steps_are_symmetric(lhs in pattern(), rhs in pattern(), a in term(), b in term()) {
            let env = one_sorted();
            let fixed: Assumptions = ["u", "w"].iter().map(|x| (Name::from(*x), Type::con("T", vec![]))).collect();
            let mut global = GlobalRules::new();
            global.add(Rule::new("r", RuleOrigin::Axiom, Prop::new(binders_for(&lhs, &rhs), lhs, rhs)));
            let renv = RuleEnv { types: &env, global: &global, local: &[], fixed: &fixed };
            let ab = check_step(&renv, &a, &step(Link::ByRule("r".into()), b.clone())).is_valid();
            let ba = check_step(&renv, &b, &step(Link::ByRule("r".into()), a.clone())).is_valid();
            prop_assert_eq!(ab, ba);
        }

        #[test]
        fn rewriting_to_the_redex_instance_is_found(lhs in pattern(), rhs in pattern(), a in term()) {
            // Build `b` by actually rewriting at the root when possible.
            let env = one_sorted();
            let fixed: Assumptions = ["u", "w"].iter().map(|x| (Name::from(*x), Type::con("T", vec![]))).collect();
            if let Some(sigma) = match_pattern(&lhs, &a) {
                if rhs.schematic_vars().iter().all(|x| sigma.get(x).is_some()) {
                    let b = substitute(&rhs, &sigma);
                    let rule = Rule::new("r", RuleOrigin::Axiom, Prop::new(binders_for(&lhs, &rhs), lhs, rhs));
                    prop_assert!(rule_rewrites(&rule, &a, &b, &env, &fixed));
                }
            }
        }
    }
}
