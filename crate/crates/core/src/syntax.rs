//! Span-annotated abstract syntax shared by every phase of the checker.
//!
//! The same declaration and proof types are used before and after name
//! resolution. Before resolution, lowercase identifiers appear as
//! [`TermKind::Ident`]; afterwards every leaf is a hole, a constant, a fixed
//! variable or a schematic variable.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::typecheck::Type;

/// A line/column location. Lines and columns are 1-based, columns count
/// characters; `offset` is the byte offset into the source text.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Pos {
    pub line: u32,
    pub column: u32,
    pub offset: usize,
}

/// A half-open source range `[start, end)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Span {
    pub start: Pos,
    pub end: Pos,
}

impl Span {
    pub fn new(start: Pos, end: Pos) -> Self {
        debug_assert!(start.offset <= end.offset);
        Span { start, end }
    }

    /// Smallest span covering both.
    pub fn join(self, other: Span) -> Span {
        Span {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }

    /// The verbatim source slice, or `None` if the span does not fit `source`.
    pub fn slice(self, source: &str) -> Option<&str> {
        source.get(self.start.offset..self.end.offset)
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}-{}:{}",
            self.start.line, self.start.column, self.end.line, self.end.column
        )
    }
}

pub(crate) fn join_opt(a: Option<Span>, b: Option<Span>) -> Option<Span> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.join(b)),
        (a, b) => a.or(b),
    }
}

/// An identifier.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(text: &str) -> Self {
        debug_assert!(!text.is_empty());
        Name(Arc::from(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Constructor and type-constructor names start with an uppercase letter.
    pub fn is_upper(&self) -> bool {
        self.0.starts_with(|c: char| c.is_ascii_uppercase())
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name::new(s)
    }
}

impl std::borrow::Borrow<str> for Name {
    fn borrow(&self) -> &str {
        &self.0
    }
}

// ---------------------------------------------------------------------------
// Terms

#[derive(Clone, Debug)]
pub enum TermKind {
    Hole,
    /// Unresolved lowercase identifier; only present before name resolution.
    Ident(Name),
    Const(Name),
    Fixed(Name),
    Schematic(Name),
    App(Box<Term>, Box<Term>),
}

/// Curried first-order term. Equality ignores spans.
#[derive(Clone, Debug)]
pub struct Term {
    pub kind: TermKind,
    pub span: Option<Span>,
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        use TermKind::*;
        match (&self.kind, &other.kind) {
            (Hole, Hole) => true,
            (Ident(a), Ident(b)) | (Const(a), Const(b)) => a == b,
            (Fixed(a), Fixed(b)) | (Schematic(a), Schematic(b)) => a == b,
            (App(f, a), App(g, b)) => f == g && a == b,
            _ => false,
        }
    }
}

impl Eq for Term {}

impl Term {
    pub fn new(kind: TermKind) -> Self {
        Term { kind, span: None }
    }

    pub fn hole() -> Self {
        Term::new(TermKind::Hole)
    }

    pub fn constant(name: impl Into<Name>) -> Self {
        Term::new(TermKind::Const(name.into()))
    }

    pub fn fixed(name: impl Into<Name>) -> Self {
        Term::new(TermKind::Fixed(name.into()))
    }

    pub fn schematic(name: impl Into<Name>) -> Self {
        Term::new(TermKind::Schematic(name.into()))
    }

    pub fn ident(name: impl Into<Name>) -> Self {
        Term::new(TermKind::Ident(name.into()))
    }

    pub fn app(fun: Term, arg: Term) -> Self {
        Term::new(TermKind::App(Box::new(fun), Box::new(arg)))
    }

    /// `head a1 .. an` as a left-nested application spine.
    pub fn apply(head: Term, args: impl IntoIterator<Item = Term>) -> Self {
        args.into_iter().fold(head, Term::app)
    }

    pub fn with_span(mut self, span: Option<Span>) -> Self {
        self.span = span;
        self
    }

    pub fn is_hole(&self) -> bool {
        matches!(self.kind, TermKind::Hole)
    }

    pub fn contains_hole(&self) -> bool {
        match &self.kind {
            TermKind::Hole => true,
            TermKind::App(f, a) => f.contains_hole() || a.contains_hole(),
            _ => false,
        }
    }

    /// Head symbol and arguments of an application spine.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut head = self;
        while let TermKind::App(f, a) = &head.kind {
            args.push(a.as_ref());
            head = f;
        }
        args.reverse();
        (head, args)
    }

    pub fn children(&self) -> Vec<&Term> {
        match &self.kind {
            TermKind::App(f, a) => vec![f, a],
            _ => vec![],
        }
    }

    pub fn size(&self) -> usize {
        match &self.kind {
            TermKind::App(f, a) => 1 + f.size() + a.size(),
            _ => 1,
        }
    }

    /// Visit every node in preorder.
    pub fn for_each(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        if let TermKind::App(g, a) = &self.kind {
            g.for_each(f);
            a.for_each(f);
        }
    }

    pub fn schematic_vars(&self) -> Vec<Name> {
        let mut out = Vec::new();
        self.for_each(&mut |t| {
            if let TermKind::Schematic(n) = &t.kind {
                if !out.contains(n) {
                    out.push(n.clone());
                }
            }
        });
        out
    }

    pub fn fixed_vars(&self) -> Vec<Name> {
        let mut out = Vec::new();
        self.for_each(&mut |t| {
            if let TermKind::Fixed(n) = &t.kind {
                if !out.contains(n) {
                    out.push(n.clone());
                }
            }
        });
        out
    }

    /// Spans of every hole in the term.
    pub fn hole_spans(&self) -> Vec<Option<Span>> {
        let mut out = Vec::new();
        self.for_each(&mut |t| {
            if t.is_hole() {
                out.push(t.span);
            }
        });
        out
    }

    /// A copy with every span removed.
    pub fn strip_spans(&self) -> Term {
        let kind = match &self.kind {
            TermKind::App(f, a) => {
                TermKind::App(Box::new(f.strip_spans()), Box::new(a.strip_spans()))
            }
            k => k.clone(),
        };
        Term::new(kind)
    }

    /// Map every leaf, keeping the application structure and spans.
    pub fn map_leaves(&self, f: &mut impl FnMut(&Term) -> Term) -> Term {
        match &self.kind {
            TermKind::App(g, a) => Term {
                kind: TermKind::App(Box::new(g.map_leaves(f)), Box::new(a.map_leaves(f))),
                span: self.span,
            },
            _ => f(self),
        }
    }
}

fn fmt_term(t: &Term, f: &mut fmt::Formatter<'_>, arg_position: bool) -> fmt::Result {
    match &t.kind {
        TermKind::Hole => f.write_str("_"),
        TermKind::Ident(n) | TermKind::Const(n) | TermKind::Fixed(n) | TermKind::Schematic(n) => {
            write!(f, "{n}")
        }
        TermKind::App(g, a) => {
            if arg_position {
                f.write_str("(")?;
            }
            fmt_term(g, f, false)?;
            f.write_str(" ")?;
            fmt_term(a, f, true)?;
            if arg_position {
                f.write_str(")")?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_term(self, f, false)
    }
}

/// Path from the root of a term: 0 steps into the function side of an
/// application, 1 into the argument side.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Position(pub Vec<usize>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn child(&self, index: usize) -> Position {
        let mut path = self.0.clone();
        path.push(index);
        Position(path)
    }

    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Preorder enumeration of every position of `t`, root first.
pub fn subterm_positions(t: &Term) -> Vec<(Position, &Term)> {
    fn go<'a>(t: &'a Term, here: Position, out: &mut Vec<(Position, &'a Term)>) {
        out.push((here.clone(), t));
        if let TermKind::App(f, a) = &t.kind {
            go(f, here.child(0), out);
            go(a, here.child(1), out);
        }
    }
    let mut out = Vec::with_capacity(t.size());
    go(t, Position::root(), &mut out);
    out
}

pub fn subterm_at<'a>(t: &'a Term, p: &Position) -> Option<&'a Term> {
    let mut cur = t;
    for &i in &p.0 {
        cur = match (&cur.kind, i) {
            (TermKind::App(f, _), 0) => f,
            (TermKind::App(_, a), 1) => a,
            _ => return None,
        };
    }
    Some(cur)
}

/// Replace the subterm at `p` by `s`.
///
/// Panics if `p` is not a valid position of `t`.
pub fn replace_at(t: &Term, p: &Position, s: Term) -> Term {
    fn go(t: &Term, path: &[usize], s: Term) -> Term {
        let Some((&i, rest)) = path.split_first() else {
            return s;
        };
        match (&t.kind, i) {
            (TermKind::App(f, a), 0) => Term {
                kind: TermKind::App(Box::new(go(f, rest, s)), a.clone()),
                span: t.span,
            },
            (TermKind::App(f, a), 1) => Term {
                kind: TermKind::App(f.clone(), Box::new(go(a, rest, s))),
                span: t.span,
            },
            _ => panic!("replace_at: position does not exist in term {t}"),
        }
    }
    go(t, &p.0, s)
}

/// Simultaneous substitution for schematic variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution(BTreeMap<Name, Term>);

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &Name) -> Option<&Term> {
        self.0.get(name)
    }

    pub fn insert(&mut self, name: Name, term: Term) -> Option<Term> {
        self.0.insert(name, term)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Term)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(Name, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Name, Term)>>(iter: I) -> Self {
        Substitution(iter.into_iter().collect())
    }
}

pub fn substitute(t: &Term, sigma: &Substitution) -> Term {
    t.map_leaves(&mut |leaf| match &leaf.kind {
        TermKind::Schematic(n) => sigma.get(n).cloned().unwrap_or_else(|| leaf.clone()),
        _ => leaf.clone(),
    })
}

/// Two terms agree everywhere except below a hole in either one.
pub fn hole_match(a: &Term, b: &Term) -> bool {
    match (&a.kind, &b.kind) {
        (TermKind::Hole, _) | (_, TermKind::Hole) => true,
        (TermKind::App(f, x), TermKind::App(g, y)) => hole_match(f, g) && hole_match(x, y),
        (TermKind::App(..), _) | (_, TermKind::App(..)) => false,
        _ => a == b,
    }
}

// ---------------------------------------------------------------------------
// Propositions

/// `name :: type` in a quantifier prefix or a `Fix` line.
#[derive(Clone, Debug)]
pub struct Binder {
    pub name: Name,
    pub ty: Type,
    pub span: Option<Span>,
}

impl Binder {
    pub fn new(name: impl Into<Name>, ty: Type) -> Self {
        Binder {
            name: name.into(),
            ty,
            span: None,
        }
    }
}

impl PartialEq for Binder {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.ty == other.ty
    }
}

impl fmt::Display for Binder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} :: {}", self.name, self.ty)
    }
}

/// `forall binders: lhs .=. rhs`.
#[derive(Clone, Debug)]
pub struct Prop {
    pub binders: Vec<Binder>,
    pub lhs: Term,
    pub rhs: Term,
    pub span: Option<Span>,
}

impl Prop {
    pub fn new(binders: Vec<Binder>, lhs: Term, rhs: Term) -> Self {
        Prop {
            binders,
            lhs,
            rhs,
            span: None,
        }
    }

    pub fn equation(lhs: Term, rhs: Term) -> Self {
        Prop::new(Vec::new(), lhs, rhs)
    }

    pub fn contains_hole(&self) -> bool {
        self.lhs.contains_hole() || self.rhs.contains_hole()
    }

    pub fn binder(&self, name: &Name) -> Option<&Binder> {
        self.binders.iter().find(|b| &b.name == name)
    }
}

impl PartialEq for Prop {
    fn eq(&self, other: &Self) -> bool {
        self.binders == other.binders && self.lhs == other.lhs && self.rhs == other.rhs
    }
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.binders.is_empty() {
            f.write_str("forall ")?;
            for (i, b) in self.binders.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{b}")?;
            }
            f.write_str(": ")?;
        }
        write!(f, "{} .=. {}", self.lhs, self.rhs)
    }
}

/// True iff some renaming of binders makes the two propositions identical.
///
/// Binder types must agree up to one consistent renaming of type variables.
pub fn alpha_equal(a: &Prop, b: &Prop) -> bool {
    if a.binders.len() != b.binders.len() {
        return false;
    }
    let mut renaming = Bijection::default();
    if !(alpha_terms(&a.lhs, &b.lhs, &mut renaming) && alpha_terms(&a.rhs, &b.rhs, &mut renaming)) {
        return false;
    }
    let is_binder = |p: &Prop, n: &Name| p.binder(n).is_some();
    // Variables that occur must be bound on both sides or free on both sides.
    for (x, y) in &renaming.pairs {
        if is_binder(a, x) != is_binder(b, y) || (!is_binder(a, x) && x != y) {
            return false;
        }
    }
    // Binders that never occur in the terms are paired up in order.
    let unused_b: Vec<&Binder> = b
        .binders
        .iter()
        .filter(|bb| !renaming.pairs.iter().any(|(_, y)| y == &bb.name))
        .collect();
    let mut unused_b = unused_b.into_iter();
    let mut type_renaming = Bijection::default();
    for ab in &a.binders {
        let bb = match renaming.pairs.iter().find(|(x, _)| x == &ab.name) {
            Some((_, y)) => b.binder(y).expect("paired binder"),
            None => match unused_b.next() {
                Some(bb) => bb,
                None => return false,
            },
        };
        if !ab.ty.alpha_eq_with(&bb.ty, &mut type_renaming) {
            return false;
        }
    }
    true
}

/// A partial bijection between names, grown on demand.
#[derive(Default)]
pub(crate) struct Bijection {
    pub(crate) pairs: Vec<(Name, Name)>,
}

impl Bijection {
    pub(crate) fn relate(&mut self, x: &Name, y: &Name) -> bool {
        for (a, b) in &self.pairs {
            if a == x || b == y {
                return a == x && b == y;
            }
        }
        self.pairs.push((x.clone(), y.clone()));
        true
    }
}

fn alpha_terms(a: &Term, b: &Term, renaming: &mut Bijection) -> bool {
    use TermKind::*;
    match (&a.kind, &b.kind) {
        (Schematic(x), Schematic(y)) => renaming.relate(x, y),
        (App(f, x), App(g, y)) => alpha_terms(f, g, renaming) && alpha_terms(x, y, renaming),
        (Schematic(_), _) | (_, Schematic(_)) => false,
        _ => a == b,
    }
}

// ---------------------------------------------------------------------------
// Proofs

/// Justification of one rewrite step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Link {
    /// `(by def f)`
    ByDef(Name),
    /// `(by name)`
    ByRule(Name),
    /// `(by _)`
    ByHole,
    /// `...`
    Ellipsis,
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Link::ByDef(n) => write!(f, "(by def {n})"),
            Link::ByRule(n) => write!(f, "(by {n})"),
            Link::ByHole => f.write_str("(by _)"),
            Link::Ellipsis => f.write_str("..."),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Step {
    pub link: Link,
    pub link_span: Option<Span>,
    pub term: Term,
}

#[derive(Clone, Debug)]
pub struct Chain {
    pub first: Term,
    pub steps: Vec<Step>,
}

impl Chain {
    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        std::iter::once(&self.first).chain(self.steps.iter().map(|s| &s.term))
    }

    pub fn last(&self) -> &Term {
        self.steps.last().map_or(&self.first, |s| &s.term)
    }
}

/// An item of a list that may also hold the multi-hole `...`.
#[derive(Clone, Debug)]
pub enum Entry<T> {
    Item(T),
    Hole(Option<Span>),
}

impl<T> Entry<T> {
    pub fn item(&self) -> Option<&T> {
        match self {
            Entry::Item(t) => Some(t),
            Entry::Hole(_) => None,
        }
    }

    pub fn is_hole(&self) -> bool {
        matches!(self, Entry::Hole(_))
    }
}

/// A named local assumption, `Assume name: prop`.
#[derive(Clone, Debug)]
pub struct Assumption {
    pub name: Name,
    pub prop: Prop,
    pub span: Option<Span>,
}

/// One case of a proof by case analysis.
#[derive(Clone, Debug)]
pub struct Case {
    pub pattern: Term,
    pub fixes: Vec<Binder>,
    pub assumption: Assumption,
    pub proof: Proof,
    pub span: Option<Span>,
}

/// One case of a proof by induction.
#[derive(Clone, Debug)]
pub struct IndCase {
    pub pattern: Term,
    pub fixes: Vec<Binder>,
    pub hypotheses: Vec<Assumption>,
    /// `For fixed ...`; `None` when the line is omitted.
    pub refixed: Option<Vec<Binder>>,
    pub shown: Prop,
    pub proof: Proof,
    pub span: Option<Span>,
}

#[derive(Clone, Debug)]
pub enum ProofKind {
    Rewriting(Chain),
    Extensionality {
        var: Binder,
        shown: Prop,
        proof: Box<Proof>,
    },
    CaseAnalysis {
        scrutinee: Term,
        ty: Type,
        cases: Vec<Entry<Case>>,
    },
    Induction {
        var: Binder,
        generalizing: Vec<Binder>,
        cases: Vec<Entry<IndCase>>,
    },
    /// `Proof ... QED`, or a bare `...` in subproof position.
    Hole,
}

#[derive(Clone, Debug)]
pub struct Proof {
    pub kind: ProofKind,
    pub span: Option<Span>,
}

impl Proof {
    pub fn has_case_hole(&self) -> bool {
        match &self.kind {
            ProofKind::CaseAnalysis { cases, .. } => cases.iter().any(Entry::is_hole),
            ProofKind::Induction { cases, .. } => cases.iter().any(Entry::is_hole),
            _ => false,
        }
    }
}

// ---------------------------------------------------------------------------
// Declarations

#[derive(Clone, Debug)]
pub struct CtorDecl {
    pub name: Name,
    pub args: Vec<Type>,
    pub span: Option<Span>,
}

#[derive(Clone, Debug)]
pub struct DataDecl {
    pub name: Name,
    pub params: Vec<Name>,
    pub ctors: Vec<CtorDecl>,
}

#[derive(Clone, Debug)]
pub struct SigDecl {
    pub name: Name,
    pub ty: Type,
}

/// `f p1 .. pn = rhs`; `lhs` is the whole left-hand side application.
#[derive(Clone, Debug)]
pub struct FunEquation {
    pub name: Name,
    pub lhs: Term,
    pub rhs: Term,
}

#[derive(Clone, Debug)]
pub struct Axiom {
    pub name: Name,
    pub prop: Prop,
}

#[derive(Clone, Debug)]
pub struct Lemma {
    pub name: Option<Name>,
    pub prop: Prop,
    pub proof: Proof,
}

#[derive(Clone, Debug)]
pub enum DeclKind {
    Data(DataDecl),
    Sig(SigDecl),
    Equation(FunEquation),
    Axiom(Axiom),
    Lemma(Lemma),
    /// `...` at declaration level.
    Hole,
}

#[derive(Clone, Debug)]
pub struct Decl {
    pub kind: DeclKind,
    pub span: Option<Span>,
}

/// Parsed module before name resolution.
#[derive(Clone, Debug, Default)]
pub struct RawModule {
    /// Name of the file the module was read from, if any.
    pub file: Option<Arc<str>>,
    pub decls: Vec<Decl>,
}

/// Name-resolved module.
#[derive(Clone, Debug, Default)]
pub struct Module {
    pub file: Option<Arc<str>>,
    pub decls: Vec<Decl>,
}

impl Module {
    pub fn lemmas(&self) -> impl Iterator<Item = (&Lemma, Option<Span>)> {
        self.decls.iter().filter_map(|d| match &d.kind {
            DeclKind::Lemma(l) => Some((l, d.span)),
            _ => None,
        })
    }
}

/// Display name of the `index`-th lemma (1-based), auto-named when anonymous.
pub fn lemma_display_name(lemma: &Lemma, index: usize) -> String {
    match &lemma.name {
        Some(n) => n.to_string(),
        None => format!("lemma_{index}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

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

    #[test]
    fn positions_of_leaf_and_applications() {
        let z = c("Z");
        let ps = subterm_positions(&z);
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0].0, Position::root());

        let sa = ap(c("S"), vec![v("a")]);
        let ps: Vec<_> = subterm_positions(&sa)
            .into_iter()
            .map(|(p, t)| (p.0, t.clone()))
            .collect();
        assert_eq!(
            ps,
            vec![(vec![], sa.clone()), (vec![0], c("S")), (vec![1], v("a"))]
        );

        let pzy = ap(c("plus"), vec![c("Z"), v("y")]);
        let ps = subterm_positions(&pzy);
        assert_eq!(ps.len(), 5);
        let shown: Vec<String> = ps.iter().map(|(_, t)| t.to_string()).collect();
        assert_eq!(shown, ["plus Z y", "plus Z", "plus", "Z", "y"]);
    }

    #[test]
    fn replace_examples() {
        let sa = ap(c("S"), vec![v("a")]);
        let pza = ap(c("plus"), vec![c("Z"), v("a")]);
        let out = replace_at(&sa, &Position(vec![1]), pza.clone());
        assert_eq!(out, ap(c("S"), vec![pza]));
        assert_eq!(replace_at(&sa, &Position::root(), c("Z")), c("Z"));

        let pzy = ap(c("plus"), vec![c("Z"), v("y")]);
        let out = replace_at(&pzy, &Position(vec![0, 1]), v("x"));
        assert_eq!(out, ap(c("plus"), vec![v("x"), v("y")]));
    }

    #[test]
    #[should_panic]
    fn replace_at_invalid_position_panics() {
        replace_at(&c("Z"), &Position(vec![0]), c("S"));
    }

    #[test]
    fn replace_keeps_untouched_spans() {
        let sp = Span::new(
            Pos {
                line: 1,
                column: 1,
                offset: 0,
            },
            Pos {
                line: 1,
                column: 2,
                offset: 1,
            },
        );
        let t = Term::app(c("S").with_span(Some(sp)), v("a"));
        let out = replace_at(&t, &Position(vec![1]), c("Z"));
        match out.kind {
            TermKind::App(f, _) => assert_eq!(f.span, Some(sp)),
            _ => unreachable!(),
        }
    }

    #[test]
    fn substitution_examples() {
        let txx = ap(c("times"), vec![s("x"), s("x")]);
        let sigma: Substitution = [(Name::from("x"), c("e"))].into_iter().collect();
        assert_eq!(
            substitute(&txx, &sigma),
            ap(c("times"), vec![c("e"), c("e")])
        );
        assert_eq!(substitute(&txx, &Substitution::new()), txx);

        // Simultaneous: the image of y is not substituted again.
        let t = ap(c("plus"), vec![s("x"), ap(c("S"), vec![s("y")])]);
        let sigma: Substitution = [(Name::from("x"), c("Z")), (Name::from("y"), s("x"))]
            .into_iter()
            .collect();
        assert_eq!(
            substitute(&t, &sigma),
            ap(c("plus"), vec![c("Z"), ap(c("S"), vec![s("x")])])
        );
    }

    #[test]
    fn fixed_vars_are_never_substituted() {
        let sigma: Substitution = [(Name::from("x"), c("Z"))].into_iter().collect();
        assert_eq!(substitute(&v("x"), &sigma), v("x"));
    }

    #[test]
    fn hole_match_examples() {
        let t = ap(
            c("times"),
            vec![
                ap(c("times"), vec![v("y"), v("x")]),
                ap(c("times"), vec![v("y"), v("x")]),
            ],
        );
        assert!(hole_match(&Term::hole(), &t));
        assert!(hole_match(&t, &t));
        assert!(!hole_match(&ap(c("S"), vec![Term::hole()]), &c("Z")));
    }

    fn prop(binders: &[(&str, Type)], lhs: Term, rhs: Term) -> Prop {
        Prop::new(
            binders
                .iter()
                .map(|(n, t)| Binder::new(*n, t.clone()))
                .collect(),
            lhs,
            rhs,
        )
    }

    #[test]
    fn alpha_equal_examples() {
        let n = Type::con("N", vec![]);
        let a = prop(
            &[("y", n.clone())],
            ap(c("symdiff"), vec![v("x"), s("y")]),
            ap(c("symdiff"), vec![s("y"), v("x")]),
        );
        let b = prop(
            &[("z", n.clone())],
            ap(c("symdiff"), vec![v("x"), s("z")]),
            ap(c("symdiff"), vec![s("z"), v("x")]),
        );
        assert!(alpha_equal(&a, &b));
        assert!(alpha_equal(&a, &a));

        let u = Type::con("U", vec![]);
        let tv = Type::var("a");
        let mono = prop(&[("x", u.clone()), ("y", u)], s("x"), s("y"));
        let poly = prop(&[("x", tv.clone()), ("y", tv)], s("x"), s("y"));
        assert!(!alpha_equal(&mono, &poly));
    }

    #[test]
    fn alpha_equal_rejects_swapped_variables_and_free_mismatch() {
        let n = Type::con("N", vec![]);
        let a = prop(
            &[("x", n.clone()), ("y", n.clone())],
            ap(c("f"), vec![s("x"), s("y")]),
            s("x"),
        );
        let b = prop(
            &[("x", n.clone()), ("y", n.clone())],
            ap(c("f"), vec![s("y"), s("x")]),
            s("x"),
        );
        assert!(!alpha_equal(&a, &b));
        // Binder order may differ.
        let c2 = prop(
            &[("q", n.clone()), ("p", n.clone())],
            ap(c("f"), vec![s("p"), s("q")]),
            s("p"),
        );
        assert!(alpha_equal(&a, &c2));
        // A fixed variable is not a binder.
        let d = prop(
            &[("y", n.clone())],
            ap(c("f"), vec![v("x"), s("y")]),
            v("x"),
        );
        let e = prop(&[("y", n)], ap(c("f"), vec![v("w"), s("y")]), v("w"));
        assert!(!alpha_equal(&d, &e));
    }

    #[test]
    fn display_of_nested_application() {
        let t = ap(c("S"), vec![ap(c("plus"), vec![c("Z"), v("a")])]);
        assert_eq!(t.to_string(), "S (plus Z a)");
    }
}
