//! Matching a solution against a blueprint with holes.
//!
//! Both modules are converted into one uniform tree shape first: every
//! node has a category, a root label and children, where a child is a
//! single node or a list. Matching then never needs to know which syntax
//! it is looking at. Holes come in two shapes: single holes (`_`,
//! `(by _)`, a `...` proof) replace exactly one node, multi-holes (`...`
//! in a list) replace a run of list elements.

use std::sync::Arc;

use crate::diagnostics::{Diagnostic, Phase};
use crate::syntax::*;
use crate::typecheck::Type;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    Plain,
    Hole,
    /// A list element standing for any number of elements. In a rewrite
    /// chain it keeps the term that follows it as an anchor child.
    MultiHole,
}

/// A node of the uniform syntax tree.
#[derive(Clone, Debug)]
pub struct Tree {
    pub category: &'static str,
    pub label: String,
    pub span: Option<Span>,
    pub shape: Shape,
    pub children: Vec<Child>,
}

#[derive(Clone, Debug)]
pub enum Child {
    One(Tree),
    Many(Vec<Tree>),
}

/// Last source locations seen on the way down, one per file.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SpanPair {
    pub blueprint: Option<Span>,
    pub solution: Option<Span>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum MatchOutcome {
    Succeed,
    /// Not applicable; try the next alternative.
    Decline,
    /// Final.
    Fail(Diagnostic),
}

impl MatchOutcome {
    fn or_else(self, next: impl FnOnce() -> MatchOutcome) -> MatchOutcome {
        match self {
            MatchOutcome::Decline => next(),
            other => other,
        }
    }

    fn and_then(self, next: impl FnOnce() -> MatchOutcome) -> MatchOutcome {
        match self {
            MatchOutcome::Succeed => next(),
            other => other,
        }
    }
}

struct Files {
    blueprint: Option<Arc<str>>,
    solution: Option<Arc<str>>,
}

impl Files {
    fn fail(&self, message: String, at: SpanPair) -> MatchOutcome {
        MatchOutcome::Fail(
            Diagnostic::new(Phase::Match, message)
                .with_file_span(self.blueprint.clone(), at.blueprint)
                .with_file_span(self.solution.clone(), at.solution),
        )
    }
}

/// Check that `solution` is `blueprint` with holes filled in, and return
/// the solution for further checking.
pub fn match_module(blueprint: &RawModule, solution: RawModule) -> Result<RawModule, Diagnostic> {
    let files = Files {
        blueprint: blueprint.file.clone(),
        solution: solution.file.clone(),
    };
    let b = Tree::module(blueprint);
    let s = Tree::module(&solution);
    if let Some(span) = second_multi_hole(&b) {
        return Err(Diagnostic::new(
            Phase::Match,
            "ambiguous blueprint: `...` may occur at most once in each list",
        )
        .with_file_span(files.blueprint.clone(), span));
    }
    match matcher(&files, &b, &s, SpanPair::default()) {
        MatchOutcome::Fail(d) => Err(d),
        _ => Ok(solution),
    }
}

/// Match two trees; file names in diagnostics are left empty.
pub fn match_node(b: &Tree, s: &Tree, state: SpanPair) -> MatchOutcome {
    matcher(
        &Files {
            blueprint: None,
            solution: None,
        },
        b,
        s,
        state,
    )
}

/// Match two lists; `b` may contain one multi-hole.
pub fn match_list(bs: &[Tree], ss: &[Tree], state: SpanPair) -> MatchOutcome {
    list_matcher(
        &Files {
            blueprint: None,
            solution: None,
        },
        bs,
        ss,
        None,
        state,
    )
}

fn second_multi_hole(t: &Tree) -> Option<Option<Span>> {
    for c in &t.children {
        match c {
            Child::One(n) => {
                if let Some(s) = second_multi_hole(n) {
                    return Some(s);
                }
            }
            Child::Many(ns) => {
                if let Some(second) = ns.iter().filter(|n| n.shape == Shape::MultiHole).nth(1) {
                    return Some(second.span);
                }
                if let Some(s) = ns.iter().find_map(second_multi_hole) {
                    return Some(s);
                }
            }
        }
    }
    None
}

fn matcher(files: &Files, b: &Tree, s: &Tree, state: SpanPair) -> MatchOutcome {
    let state = SpanPair {
        blueprint: b.span.or(state.blueprint),
        solution: s.span.or(state.solution),
    };
    match_hole(b)
        .or_else(|| {
            if b.label == s.label && b.shape == s.shape && b.children.len() == s.children.len() {
                children(files, b, s, state)
            } else {
                MatchOutcome::Decline
            }
        })
        .or_else(|| {
            files.fail(
                format!(
                    "abstract syntax sub-trees of type {} have different roots: {}, {}",
                    b.category, b.label, s.label
                ),
                state,
            )
        })
}

fn match_hole(b: &Tree) -> MatchOutcome {
    if b.shape == Shape::Hole {
        MatchOutcome::Succeed
    } else {
        MatchOutcome::Decline
    }
}

fn children(files: &Files, b: &Tree, s: &Tree, state: SpanPair) -> MatchOutcome {
    let mut before: Option<&Tree> = None;
    for (bc, sc) in b.children.iter().zip(&s.children) {
        let out = match (bc, sc) {
            (Child::One(x), Child::One(y)) => {
                let out = matcher(files, x, y, state);
                before = Some(y);
                out
            }
            (Child::Many(xs), Child::Many(ys)) => list_matcher(files, xs, ys, before, state),
            _ => files.fail(
                format!(
                    "abstract syntax sub-trees of type {} differ in shape",
                    b.category
                ),
                state,
            ),
        };
        if out != MatchOutcome::Succeed {
            return out;
        }
    }
    MatchOutcome::Succeed
}

/// The term a chain step ends in.
fn step_term(t: &Tree) -> Option<&Tree> {
    t.children.iter().rev().find_map(|c| match c {
        Child::One(n) => Some(n),
        Child::Many(_) => None,
    })
}

fn list_matcher(
    files: &Files,
    bs: &[Tree],
    ss: &[Tree],
    before: Option<&Tree>,
    state: SpanPair,
) -> MatchOutcome {
    let category = bs.first().or(ss.first()).map_or("list", |t| t.category);
    let Some(k) = bs.iter().position(|t| t.shape == Shape::MultiHole) else {
        if bs.len() != ss.len() {
            return files.fail(
                format!(
                    "the blueprint has {} element(s) of type {category} here, but the solution has {}",
                    bs.len(),
                    ss.len()
                ),
                state,
            );
        }
        return pairwise(files, bs, ss, state);
    };
    let suffix = bs.len() - k - 1;
    if ss.len() < k + suffix {
        return files.fail(
            format!(
                "the blueprint needs at least {} element(s) of type {category} here, but the solution has {}",
                k + suffix,
                ss.len()
            ),
            SpanPair { blueprint: bs[k].span.or(state.blueprint), ..state },
        );
    }
    let middle = &ss[k..ss.len() - suffix];
    pairwise(files, &bs[..k], &ss[..k], state)
        .and_then(|| {
            // A `...` step is anchored at the term that follows it.
            let Some(anchor) = step_term(&bs[k]) else {
                return MatchOutcome::Succeed;
            };
            let reached = match middle.last() {
                Some(last) => step_term(last),
                None if k > 0 => step_term(&ss[k - 1]),
                None => before,
            };
            match reached {
                Some(r) => matcher(
                    files,
                    anchor,
                    r,
                    SpanPair {
                        blueprint: bs[k].span.or(state.blueprint),
                        ..state
                    },
                ),
                None => MatchOutcome::Succeed,
            }
        })
        .and_then(|| pairwise(files, &bs[k + 1..], &ss[ss.len() - suffix..], state))
}

fn pairwise(files: &Files, bs: &[Tree], ss: &[Tree], state: SpanPair) -> MatchOutcome {
    for (b, s) in bs.iter().zip(ss) {
        let out = matcher(files, b, s, state);
        if out != MatchOutcome::Succeed {
            return out;
        }
    }
    MatchOutcome::Succeed
}

// ---------------------------------------------------------------------------
// Conversion to trees

fn quoted(n: &Name) -> String {
    format!("`{n}`")
}

impl Tree {
    fn node(
        category: &'static str,
        label: impl Into<String>,
        span: Option<Span>,
        children: Vec<Child>,
    ) -> Tree {
        Tree {
            category,
            label: label.into(),
            span,
            shape: Shape::Plain,
            children,
        }
    }

    fn hole(category: &'static str, span: Option<Span>) -> Tree {
        Tree {
            category,
            label: "hole".into(),
            span,
            shape: Shape::Hole,
            children: Vec::new(),
        }
    }

    fn multi(category: &'static str, span: Option<Span>, children: Vec<Child>) -> Tree {
        Tree {
            category,
            label: "`...`".into(),
            span,
            shape: Shape::MultiHole,
            children,
        }
    }

    fn name(n: &Name, span: Option<Span>) -> Tree {
        Tree::node("name", quoted(n), span, Vec::new())
    }

    pub fn module(m: &RawModule) -> Tree {
        Tree::node(
            "module",
            "module",
            None,
            vec![Child::Many(m.decls.iter().map(Tree::decl).collect())],
        )
    }

    fn decl(d: &Decl) -> Tree {
        let span = d.span;
        match &d.kind {
            DeclKind::Hole => Tree::multi("declaration", span, Vec::new()),
            DeclKind::Data(data) => Tree::node(
                "declaration",
                "data declaration",
                span,
                vec![
                    Child::One(Tree::name(&data.name, span)),
                    Child::Many(data.params.iter().map(|p| Tree::name(p, span)).collect()),
                    Child::Many(
                        data.ctors
                            .iter()
                            .map(|c| {
                                Tree::node(
                                    "constructor",
                                    "constructor",
                                    c.span,
                                    vec![
                                        Child::One(Tree::name(&c.name, c.span)),
                                        Child::Many(
                                            c.args.iter().map(|t| Tree::ty(t, c.span)).collect(),
                                        ),
                                    ],
                                )
                            })
                            .collect(),
                    ),
                ],
            ),
            DeclKind::Sig(sig) => Tree::node(
                "declaration",
                "type signature",
                span,
                vec![
                    Child::One(Tree::name(&sig.name, span)),
                    Child::One(Tree::ty(&sig.ty, span)),
                ],
            ),
            DeclKind::Equation(eq) => Tree::node(
                "declaration",
                "function equation",
                span,
                vec![
                    Child::One(Tree::term(&eq.lhs)),
                    Child::One(Tree::term(&eq.rhs)),
                ],
            ),
            DeclKind::Axiom(ax) => Tree::node(
                "declaration",
                "axiom",
                span,
                vec![
                    Child::One(Tree::name(&ax.name, span)),
                    Child::One(Tree::prop(&ax.prop)),
                ],
            ),
            DeclKind::Lemma(l) => {
                let name = match &l.name {
                    Some(n) => Tree::name(n, span),
                    None => Tree::node("name", "unnamed", span, Vec::new()),
                };
                Tree::node(
                    "declaration",
                    "lemma",
                    span,
                    vec![
                        Child::One(name),
                        Child::One(Tree::prop(&l.prop)),
                        Child::One(Tree::proof(&l.proof)),
                    ],
                )
            }
        }
    }

    fn ty(t: &Type, span: Option<Span>) -> Tree {
        match t {
            Type::Var(v) => Tree::node("type", quoted(v), span, Vec::new()),
            Type::Con(c, args) => Tree::node(
                "type",
                quoted(c),
                span,
                vec![Child::Many(
                    args.iter().map(|a| Tree::ty(a, span)).collect(),
                )],
            ),
            Type::Fun(a, r) => Tree::node(
                "type",
                "function type",
                span,
                vec![Child::One(Tree::ty(a, span)), Child::One(Tree::ty(r, span))],
            ),
        }
    }

    fn term(t: &Term) -> Tree {
        match &t.kind {
            TermKind::Hole => Tree::hole("term", t.span),
            TermKind::Ident(n)
            | TermKind::Const(n)
            | TermKind::Fixed(n)
            | TermKind::Schematic(n) => Tree::node("term", quoted(n), t.span, Vec::new()),
            TermKind::App(f, a) => Tree::node(
                "term",
                "application",
                t.span,
                vec![Child::One(Tree::term(f)), Child::One(Tree::term(a))],
            ),
        }
    }

    fn binder(b: &Binder) -> Tree {
        Tree::node(
            "binder",
            "binder",
            b.span,
            vec![
                Child::One(Tree::name(&b.name, b.span)),
                Child::One(Tree::ty(&b.ty, b.span)),
            ],
        )
    }

    fn binders(bs: &[Binder]) -> Child {
        Child::Many(bs.iter().map(Tree::binder).collect())
    }

    fn prop(p: &Prop) -> Tree {
        Tree::node(
            "proposition",
            "proposition",
            p.span,
            vec![
                Tree::binders(&p.binders),
                Child::One(Tree::term(&p.lhs)),
                Child::One(Tree::term(&p.rhs)),
            ],
        )
    }

    fn assumption(a: &Assumption) -> Tree {
        Tree::node(
            "assumption",
            "assumption",
            a.span,
            vec![
                Child::One(Tree::name(&a.name, a.span)),
                Child::One(Tree::prop(&a.prop)),
            ],
        )
    }

    fn step(s: &Step) -> Tree {
        let span = s.link_span.or(s.term.span);
        let link = match &s.link {
            Link::Ellipsis => {
                return Tree::multi("rewrite step", span, vec![Child::One(Tree::term(&s.term))])
            }
            Link::ByHole => Tree::hole("rule reference", s.link_span),
            Link::ByDef(f) => Tree::node(
                "rule reference",
                format!("`def {f}`"),
                s.link_span,
                Vec::new(),
            ),
            Link::ByRule(n) => Tree::node("rule reference", quoted(n), s.link_span, Vec::new()),
        };
        Tree::node(
            "rewrite step",
            "rewrite step",
            span,
            vec![Child::One(link), Child::One(Tree::term(&s.term))],
        )
    }

    fn proof(p: &Proof) -> Tree {
        let span = p.span;
        match &p.kind {
            ProofKind::Hole => Tree::hole("proof", span),
            ProofKind::Rewriting(chain) => Tree::node(
                "proof",
                "proof by rewriting",
                span,
                vec![
                    Child::One(Tree::term(&chain.first)),
                    Child::Many(chain.steps.iter().map(Tree::step).collect()),
                ],
            ),
            ProofKind::Extensionality { var, shown, proof } => Tree::node(
                "proof",
                "proof by extensionality",
                span,
                vec![
                    Child::One(Tree::binder(var)),
                    Child::One(Tree::prop(shown)),
                    Child::One(Tree::proof(proof)),
                ],
            ),
            ProofKind::CaseAnalysis {
                scrutinee,
                ty,
                cases,
            } => Tree::node(
                "proof",
                "proof by case analysis",
                span,
                vec![
                    Child::One(Tree::term(scrutinee)),
                    Child::One(Tree::ty(ty, scrutinee.span)),
                    Child::Many(
                        cases
                            .iter()
                            .map(|e| match e {
                                Entry::Hole(s) => Tree::multi("case", *s, Vec::new()),
                                Entry::Item(c) => Tree::node(
                                    "case",
                                    "case",
                                    c.span,
                                    vec![
                                        Child::One(Tree::term(&c.pattern)),
                                        Tree::binders(&c.fixes),
                                        Child::One(Tree::assumption(&c.assumption)),
                                        Child::One(Tree::proof(&c.proof)),
                                    ],
                                ),
                            })
                            .collect(),
                    ),
                ],
            ),
            ProofKind::Induction {
                var,
                generalizing,
                cases,
            } => Tree::node(
                "proof",
                "proof by induction",
                span,
                vec![
                    Child::One(Tree::binder(var)),
                    Tree::binders(generalizing),
                    Child::Many(
                        cases
                            .iter()
                            .map(|e| match e {
                                Entry::Hole(s) => Tree::multi("case", *s, Vec::new()),
                                Entry::Item(c) => {
                                    let refixed = match &c.refixed {
                                        Some(bs) => Tree::node(
                                            "for fixed",
                                            "`for fixed`",
                                            c.span,
                                            vec![Tree::binders(bs)],
                                        ),
                                        None => Tree::node(
                                            "for fixed",
                                            "no `for fixed`",
                                            c.span,
                                            Vec::new(),
                                        ),
                                    };
                                    Tree::node(
                                        "case",
                                        "case",
                                        c.span,
                                        vec![
                                            Child::One(Tree::term(&c.pattern)),
                                            Tree::binders(&c.fixes),
                                            Child::Many(
                                                c.hypotheses.iter().map(Tree::assumption).collect(),
                                            ),
                                            Child::One(refixed),
                                            Child::One(Tree::prop(&c.shown)),
                                            Child::One(Tree::proof(&c.proof)),
                                        ],
                                    )
                                }
                            })
                            .collect(),
                    ),
                ],
            ),
        }
    }
}
