use crate::error::{Error, Result};
use crate::index::{concat, prefix_leq, Index};
use crate::term::Name;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// Type syntax before quotienting.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum TypeRaw {
    Atom(Name),
    Omega(Index),
    Arrow(Box<TypeRaw>, Box<TypeRaw>),
    Inter(Box<TypeRaw>, Box<TypeRaw>),
    Exp(u32, Box<TypeRaw>),
}

impl TypeRaw {
    pub fn atom(a: &str) -> TypeRaw {
        TypeRaw::Atom(Arc::from(a))
    }

    pub fn arrow(u: TypeRaw, t: TypeRaw) -> TypeRaw {
        TypeRaw::Arrow(Box::new(u), Box::new(t))
    }

    pub fn inter(a: TypeRaw, b: TypeRaw) -> TypeRaw {
        TypeRaw::Inter(Box::new(a), Box::new(b))
    }

    pub fn exp(i: u32, u: TypeRaw) -> TypeRaw {
        TypeRaw::Exp(i, Box::new(u))
    }
}

/// Canonical representative: an expansion prefix over a set of atoms and arrows.
/// An empty component set stands for omega at the prefix.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonType {
    pub prefix: Index,
    pub comps: BTreeSet<CanonT>,
}

/// Elements of the degree-bottom fragment: atoms and arrows.
/// The derived order puts atoms before arrows.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CanonT {
    Atom(Name),
    Arrow(Arc<CanonType>, Arc<CanonT>),
}

impl CanonT {
    pub fn atom(a: &str) -> CanonT {
        CanonT::Atom(Arc::from(a))
    }

    pub fn arrow(u: CanonType, t: CanonT) -> CanonT {
        CanonT::Arrow(Arc::new(u), Arc::new(t))
    }

    pub fn as_arrow(&self) -> Option<(&CanonType, &CanonT)> {
        match self {
            CanonT::Arrow(u, t) => Some((u, t)),
            CanonT::Atom(_) => None,
        }
    }

    pub fn to_type(&self) -> CanonType {
        CanonType::single(self.clone())
    }

    /// Nesting depth: atoms are 1, an arrow adds one to its deepest side.
    pub fn depth(&self) -> usize {
        match self {
            CanonT::Atom(_) => 1,
            CanonT::Arrow(u, t) => 1 + u.depth().max(t.depth()),
        }
    }
}

impl CanonType {
    pub fn omega(l: Index) -> CanonType {
        CanonType { prefix: l, comps: BTreeSet::new() }
    }

    pub fn single(t: CanonT) -> CanonType {
        CanonType { prefix: Index::empty(), comps: std::iter::once(t).collect() }
    }

    pub fn from_comps(prefix: Index, comps: impl IntoIterator<Item = CanonT>) -> CanonType {
        CanonType { prefix, comps: comps.into_iter().collect() }
    }

    pub fn is_omega(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn degree(&self) -> &Index {
        &self.prefix
    }

    /// The sole component when this is an element of the degree-bottom fragment.
    pub fn as_t(&self) -> Option<&CanonT> {
        if self.prefix.is_empty() && self.comps.len() == 1 {
            self.comps.iter().next()
        } else {
            None
        }
    }

    pub fn depth(&self) -> usize {
        self.comps.iter().map(CanonT::depth).max().unwrap_or(1)
    }

    /// Components viewed at the bottom degree, i.e. with the prefix removed.
    pub fn body(&self) -> CanonType {
        CanonType { prefix: Index::empty(), comps: self.comps.clone() }
    }
}

pub fn degree_type(u: &CanonType) -> Index {
    u.prefix.clone()
}

/// Quotients by associativity, commutativity and idempotence of intersection,
/// distribution of expansions over intersection, neutrality of omega, and
/// expansion of omega.
pub fn canonicalize(u: &TypeRaw) -> Result<CanonType> {
    match u {
        TypeRaw::Atom(a) => Ok(CanonType::single(CanonT::Atom(a.clone()))),
        TypeRaw::Omega(l) => Ok(CanonType::omega(l.clone())),
        TypeRaw::Arrow(a, b) => {
            let ca = canonicalize(a)?;
            let cb = canonicalize(b)?;
            match cb.as_t() {
                Some(t) => Ok(CanonType::single(CanonT::arrow(ca, t.clone()))),
                None => Err(Error::Shape(format!(
                    "right side of an arrow must be an atom or an arrow, got {cb}"
                ))),
            }
        }
        TypeRaw::Inter(a, b) => {
            let ca = canonicalize(a)?;
            let cb = canonicalize(b)?;
            inter(&ca, &cb)
        }
        TypeRaw::Exp(i, a) => Ok(expand_type(*i, &canonicalize(a)?)),
    }
}

/// Intersection of canonical types of equal degree.
pub fn inter(a: &CanonType, b: &CanonType) -> Result<CanonType> {
    if a.prefix != b.prefix {
        return Err(Error::Degree(format!(
            "intersection of types with degrees {} and {}",
            a.prefix, b.prefix
        )));
    }
    let mut comps = a.comps.clone();
    comps.extend(b.comps.iter().cloned());
    Ok(CanonType { prefix: a.prefix.clone(), comps })
}

/// Inverse of [`canonicalize`] up to the quotient.
pub fn embed(u: &CanonType) -> TypeRaw {
    if u.comps.is_empty() {
        return TypeRaw::Omega(u.prefix.clone());
    }
    let mut it = u.comps.iter().rev().map(embed_t);
    let last = it.next().unwrap();
    let mut body = it.fold(last, |acc, t| TypeRaw::inter(t, acc));
    for &i in u.prefix.as_slice().iter().rev() {
        body = TypeRaw::exp(i, body);
    }
    body
}

pub fn embed_t(t: &CanonT) -> TypeRaw {
    match t {
        CanonT::Atom(a) => TypeRaw::Atom(a.clone()),
        CanonT::Arrow(u, t) => TypeRaw::arrow(embed(u), embed_t(t)),
    }
}

pub fn expand_type(i: u32, u: &CanonType) -> CanonType {
    CanonType { prefix: u.prefix.cons(i), comps: u.comps.clone() }
}

pub fn expand_type_seq(k: &Index, u: &CanonType) -> CanonType {
    CanonType { prefix: concat(k, &u.prefix), comps: u.comps.clone() }
}

pub fn lower_type(u: &CanonType, k: &Index) -> Result<CanonType> {
    match u.prefix.strip_prefix(k) {
        Some(p) => Ok(CanonType { prefix: p, comps: u.comps.clone() }),
        None => Err(Error::Degree(format!("cannot lower a type of degree {} by {k}", u.prefix))),
    }
}

/// Decides `u ⊑ v`.
pub fn subtype(u: &CanonType, v: &CanonType) -> bool {
    if u.prefix != v.prefix {
        return false;
    }
    if v.comps.is_empty() {
        return true;
    }
    if u.comps.is_empty() {
        return false;
    }
    v.comps.iter().all(|tv| u.comps.iter().any(|tu| subtype_t(tu, tv)))
}

/// Componentwise order on atoms and arrows.
pub fn subtype_t(a: &CanonT, b: &CanonT) -> bool {
    match (a, b) {
        (CanonT::Atom(x), CanonT::Atom(y)) => x == y,
        (CanonT::Arrow(u, t), CanonT::Arrow(u2, t2)) => subtype(u2, u) && subtype_t(t, t2),
        _ => false,
    }
}

/// True when `k` is a prefix of the degree of `u`.
pub fn has_prefix(u: &CanonType, k: &Index) -> bool {
    prefix_leq(k, &u.prefix)
}

impl fmt::Display for CanonType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.comps.is_empty() {
            return write!(f, "(w {})", self.prefix);
        }
        for i in self.prefix.as_slice() {
            write!(f, "(e {i} ")?;
        }
        let comps: Vec<&CanonT> = self.comps.iter().collect();
        for c in &comps[..comps.len() - 1] {
            write!(f, "(^ {c} ")?;
        }
        write!(f, "{}", comps[comps.len() - 1])?;
        for _ in 0..comps.len() - 1 + self.prefix.len() {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for CanonT {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CanonT::Atom(a) => f.write_str(a),
            CanonT::Arrow(u, t) => write!(f, "(-> {u} {t})"),
        }
    }
}

impl fmt::Debug for CanonType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Debug for CanonT {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_type;

    fn ty(s: &str) -> CanonType {
        parse_type(s).unwrap()
    }

    fn ix(v: &[u32]) -> Index {
        Index::from_slice(v)
    }

    #[test]
    fn canonicalize_examples() {
        let u = ty("(^ (e 1 a) (e 1 b))");
        assert_eq!(u.prefix, ix(&[1]));
        assert_eq!(u.comps.len(), 2);
        let u = ty("(^ (w [2]) (e 2 a))");
        assert_eq!(u, CanonType::from_comps(ix(&[2]), [CanonT::atom("a")]));
        assert_eq!(ty("(e 3 (w [4]))"), CanonType::omega(ix(&[3, 4])));
    }

    #[test]
    fn canonicalize_errors() {
        let bad = TypeRaw::inter(TypeRaw::atom("a"), TypeRaw::exp(1, TypeRaw::atom("b")));
        assert_eq!(canonicalize(&bad).unwrap_err().kind(), "DegreeError");
        let bad = TypeRaw::arrow(TypeRaw::atom("a"), TypeRaw::exp(1, TypeRaw::atom("b")));
        assert_eq!(canonicalize(&bad).unwrap_err().kind(), "ShapeError");
    }

    #[test]
    fn degree_examples() {
        assert_eq!(ty("(w [5])").prefix, ix(&[5]));
        assert_eq!(ty("(-> a b)").prefix, ix(&[]));
        assert_eq!(ty("(e 1 (e 2 a))").prefix, ix(&[1, 2]));
    }

    #[test]
    fn expand_lower_examples() {
        assert_eq!(expand_type(1, &ty("a")), ty("(e 1 a)"));
        assert_eq!(expand_type(0, &ty("(w [])")), ty("(w [0])"));
        assert_eq!(lower_type(&ty("(e 1 (e 2 a))"), &ix(&[1])).unwrap(), ty("(e 2 a)"));
        assert_eq!(lower_type(&ty("a"), &ix(&[])).unwrap(), ty("a"));
        assert_eq!(lower_type(&ty("(w [])"), &ix(&[1])).unwrap_err().kind(), "DegreeError");
    }

    #[test]
    fn subtype_examples() {
        assert!(subtype(&ty("(^ a b)"), &ty("a")));
        assert!(subtype(&ty("(-> a c)"), &ty("(-> (^ a b) c)")));
        assert!(!subtype(&ty("(-> (^ a b) c)"), &ty("(-> a c)")));
        assert!(subtype(&ty("(e 1 (^ a b))"), &ty("(w [1])")));
        assert!(!subtype(&ty("(w [])"), &ty("a")));
        assert!(!subtype(&ty("a"), &ty("(e 1 a)")));
    }

    #[test]
    fn printing_round_trips() {
        for s in ["a", "(w [1 2])", "(e 1 (^ a (-> b a)))", "(-> (^ a b) (-> (e 0 b) c))"] {
            let u = ty(s);
            assert_eq!(ty(&u.to_string()), u);
            assert_eq!(canonicalize(&embed(&u)).unwrap(), u);
        }
    }
}
