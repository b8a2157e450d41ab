use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::syntax::{Bijection, Name};

/// Monotype.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Type {
    Var(Name),
    Con(Name, Vec<Type>),
    Fun(Box<Type>, Box<Type>),
}

impl Type {
    pub fn var(name: impl Into<Name>) -> Self {
        Type::Var(name.into())
    }

    pub fn con(name: impl Into<Name>, args: Vec<Type>) -> Self {
        Type::Con(name.into(), args)
    }

    pub fn fun(arg: Type, res: Type) -> Self {
        Type::Fun(Box::new(arg), Box::new(res))
    }

    /// `a1 -> .. -> an -> res`
    pub fn arrows(args: impl IntoIterator<Item = Type>, res: Type) -> Self {
        let args: Vec<Type> = args.into_iter().collect();
        args.into_iter().rev().fold(res, |acc, a| Type::fun(a, acc))
    }

    /// Split `a1 -> .. -> an -> r` into its argument types and result.
    pub fn uncurry(&self) -> (Vec<&Type>, &Type) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Type::Fun(a, r) = cur {
            args.push(a.as_ref());
            cur = r;
        }
        (args, cur)
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn collect_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            Type::Var(v) => {
                out.insert(v.clone());
            }
            Type::Con(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            Type::Fun(a, r) => {
                a.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    pub fn occurs(&self, var: &Name) -> bool {
        match self {
            Type::Var(v) => v == var,
            Type::Con(_, args) => args.iter().any(|a| a.occurs(var)),
            Type::Fun(a, r) => a.occurs(var) || r.occurs(var),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Type::Var(_) => 1,
            Type::Con(_, args) => 1 + args.iter().map(Type::depth).max().unwrap_or(0),
            Type::Fun(a, r) => 1 + a.depth().max(r.depth()),
        }
    }

    /// Structural equality up to a consistent renaming of type variables,
    /// accumulated in `renaming`.
    pub(crate) fn alpha_eq_with(&self, other: &Type, renaming: &mut Bijection) -> bool {
        match (self, other) {
            (Type::Var(a), Type::Var(b)) => renaming.relate(a, b),
            (Type::Con(c, xs), Type::Con(d, ys)) => {
                c == d
                    && xs.len() == ys.len()
                    && xs.iter().zip(ys).all(|(x, y)| x.alpha_eq_with(y, renaming))
            }
            (Type::Fun(a, r), Type::Fun(b, s)) => {
                a.alpha_eq_with(b, renaming) && r.alpha_eq_with(s, renaming)
            }
            _ => false,
        }
    }

    pub fn alpha_eq(&self, other: &Type) -> bool {
        self.alpha_eq_with(other, &mut Bijection::default())
    }
}

fn fmt_type(t: &Type, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
    // prec 0: top, 1: left of arrow, 2: constructor argument
    match t {
        Type::Var(v) => write!(f, "{v}"),
        Type::Con(c, args) if args.is_empty() => write!(f, "{c}"),
        Type::Con(c, args) => {
            if prec >= 2 {
                f.write_str("(")?;
            }
            write!(f, "{c}")?;
            for a in args {
                f.write_str(" ")?;
                fmt_type(a, f, 2)?;
            }
            if prec >= 2 {
                f.write_str(")")?;
            }
            Ok(())
        }
        Type::Fun(a, r) => {
            if prec >= 1 {
                f.write_str("(")?;
            }
            fmt_type(a, f, 1)?;
            f.write_str(" -> ")?;
            fmt_type(r, f, 0)?;
            if prec >= 1 {
                f.write_str(")")?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_type(self, f, 0)
    }
}

/// Type with a universal quantifier prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scheme {
    pub quantified: Vec<Name>,
    pub body: Type,
}

impl Scheme {
    pub fn mono(body: Type) -> Self {
        Scheme {
            quantified: Vec::new(),
            body,
        }
    }

    /// Quantify over every free variable of `body`.
    pub fn generalize(body: Type) -> Self {
        Scheme {
            quantified: body.free_vars().into_iter().collect(),
            body,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.quantified.is_empty() {
            f.write_str("forall")?;
            for q in &self.quantified {
                write!(f, " {q}")?;
            }
            f.write_str(". ")?;
        }
        write!(f, "{}", self.body)
    }
}

/// Idempotent substitution on type variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TySubst(BTreeMap<Name, Type>);

impl TySubst {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, v: &Name) -> Option<&Type> {
        self.0.get(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Type)> {
        self.0.iter()
    }

    pub fn apply(&self, t: &Type) -> Type {
        match t {
            Type::Var(v) => match self.0.get(v) {
                Some(image) => image.clone(),
                None => t.clone(),
            },
            Type::Con(c, args) => {
                Type::Con(c.clone(), args.iter().map(|a| self.apply(a)).collect())
            }
            Type::Fun(a, r) => Type::fun(self.apply(a), self.apply(r)),
        }
    }

    /// Bind `v` to `t` (already normalized w.r.t. `self`), keeping the map
    /// idempotent.
    pub(crate) fn bind(&mut self, v: Name, t: Type) {
        let single = TySubst([(v.clone(), t.clone())].into_iter().collect());
        for image in self.0.values_mut() {
            *image = single.apply(image);
        }
        self.0.insert(v, t);
    }
}

impl FromIterator<(Name, Type)> for TySubst {
    fn from_iter<I: IntoIterator<Item = (Name, Type)>>(iter: I) -> Self {
        TySubst(iter.into_iter().collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum UnifyError {
    #[error("types `{0}` and `{1}` do not unify")]
    Clash(Type, Type),
    #[error("occurs check: `{0}` occurs in `{1}`")]
    Occurs(Name, Type),
    #[error("type variable `{0}` is rigid and cannot be instantiated to `{1}`")]
    Rigid(Name, Type),
}

/// Most general unifier of `a` and `b`; every type variable is flexible.
pub fn unify(a: &Type, b: &Type) -> Result<TySubst, UnifyError> {
    let mut subst = TySubst::new();
    unify_into(a, b, &mut subst, &|_| true)?;
    Ok(subst)
}

/// Extend `subst` to a unifier of `a` and `b`. Only variables accepted by
/// `flexible` may be bound.
pub(crate) fn unify_into(
    a: &Type,
    b: &Type,
    subst: &mut TySubst,
    flexible: &dyn Fn(&Name) -> bool,
) -> Result<(), UnifyError> {
    let a = subst.apply(a);
    let b = subst.apply(b);
    match (&a, &b) {
        (Type::Var(x), Type::Var(y)) if x == y => Ok(()),
        (Type::Var(x), _) if flexible(x) => bind_var(x, &b, subst),
        (_, Type::Var(y)) if flexible(y) => bind_var(y, &a, subst),
        (Type::Var(x), _) => Err(UnifyError::Rigid(x.clone(), b.clone())),
        (_, Type::Var(y)) => Err(UnifyError::Rigid(y.clone(), a.clone())),
        (Type::Con(c, xs), Type::Con(d, ys)) if c == d && xs.len() == ys.len() => {
            for (x, y) in xs.iter().zip(ys) {
                unify_into(x, y, subst, flexible)?;
            }
            Ok(())
        }
        (Type::Fun(x, r), Type::Fun(y, s)) => {
            unify_into(x, y, subst, flexible)?;
            unify_into(r, s, subst, flexible)
        }
        _ => Err(UnifyError::Clash(a.clone(), b.clone())),
    }
}

fn bind_var(v: &Name, t: &Type, subst: &mut TySubst) -> Result<(), UnifyError> {
    if t.occurs(v) {
        return Err(UnifyError::Occurs(v.clone(), t.clone()));
    }
    subst.bind(v.clone(), t.clone());
    Ok(())
}
