use crate::error::{Error, Result};
use crate::index::Index;
use crate::term::{alpha_eq, Term, VarKey, VarSet};
use crate::types::{expand_type, inter, lower_type, subtype, CanonType};
use std::collections::BTreeMap;
use std::fmt;

/// Finite map from variables to canonical types, ordered for printing.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Env(pub BTreeMap<VarKey, CanonType>);

impl Env {
    pub fn new() -> Self {
        Env(BTreeMap::new())
    }

    pub fn singleton(k: VarKey, u: CanonType) -> Self {
        let mut m = BTreeMap::new();
        m.insert(k, u);
        Env(m)
    }

    pub fn get(&self, k: &VarKey) -> Option<&CanonType> {
        self.0.get(k)
    }

    pub fn contains(&self, k: &VarKey) -> bool {
        self.0.contains_key(k)
    }

    pub fn insert(&mut self, k: VarKey, u: CanonType) {
        self.0.insert(k, u);
    }

    pub fn remove(&mut self, k: &VarKey) -> Option<CanonType> {
        self.0.remove(k)
    }

    pub fn without(&self, k: &VarKey) -> Env {
        let mut e = self.clone();
        e.0.remove(k);
        e
    }

    pub fn with(&self, k: VarKey, u: CanonType) -> Env {
        let mut e = self.clone();
        e.0.insert(k, u);
        e
    }

    pub fn domain(&self) -> VarSet {
        self.0.keys().cloned().collect()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VarKey, &CanonType)> {
        self.0.iter()
    }
}

pub fn env_ok(g: &Env) -> bool {
    g.0.iter().all(|(k, u)| u.prefix == k.idx)
}

pub fn env_inter(g1: &Env, g2: &Env) -> Result<Env> {
    let mut out = g1.clone();
    for (k, u) in &g2.0 {
        let merged = match out.0.get(k) {
            Some(v) => inter(v, u)?,
            None => u.clone(),
        };
        out.0.insert(k.clone(), merged);
    }
    Ok(out)
}

pub fn env_expand(j: u32, g: &Env) -> Env {
    Env(g
        .0
        .iter()
        .map(|(k, u)| (VarKey::with_name(k.name.clone(), k.idx.cons(j)), expand_type(j, u)))
        .collect())
}

pub fn env_lower(g: &Env, k: &Index) -> Result<Env> {
    let mut out = BTreeMap::new();
    for (v, u) in &g.0 {
        let idx = v.idx.strip_prefix(k).ok_or_else(|| {
            Error::Degree(format!("cannot lower binding {v} by {k}"))
        })?;
        out.insert(VarKey::with_name(v.name.clone(), idx), lower_type(u, k)?);
    }
    Ok(Env(out))
}

pub fn env_restrict(g: &Env, keep: &VarSet) -> Result<Env> {
    for k in keep {
        if !g.contains(k) {
            return Err(Error::Domain(format!("restriction keeps {k} which is not bound")));
        }
    }
    Ok(Env(g.0.iter().filter(|(k, _)| keep.contains(*k)).map(|(k, u)| (k.clone(), u.clone())).collect()))
}

pub fn env_enlarge(g: &Env, target: &VarSet) -> Result<Env> {
    for k in g.0.keys() {
        if !target.contains(k) {
            return Err(Error::Domain(format!("enlargement target misses bound {k}")));
        }
    }
    let mut out = g.clone();
    for k in target {
        if !out.contains(k) {
            out.insert(k.clone(), CanonType::omega(k.idx.clone()));
        }
    }
    Ok(out)
}

/// Same domain and pointwise subtyping.
pub fn env_sub(g1: &Env, g2: &Env) -> bool {
    g1.0.len() == g2.0.len()
        && g1.0.iter().zip(g2.0.iter()).all(|((k1, u1), (k2, u2))| k1 == k2 && subtype(u1, u2))
}

/// `⟨g1 ⊢ u1⟩ ⊑ ⟨g2 ⊢ u2⟩`, contravariant in the environment.
pub fn typing_sub(g1: &Env, u1: &CanonType, g2: &Env, u2: &CanonType) -> bool {
    env_sub(g2, g1) && subtype(u1, u2)
}

pub fn env_omega(m: &Term) -> Env {
    Env(m.free_vars().into_iter().map(|k| {
        let u = CanonType::omega(k.idx.clone());
        (k, u)
    }).collect())
}

pub fn env_joinable(g1: &Env, g2: &Env) -> bool {
    g1.0.keys().all(|a| g2.0.keys().all(|b| a.name != b.name || a.idx == b.idx))
}

/// Typing judgment `M : ⟨Γ ⊢ U⟩`.
#[derive(Clone)]
pub struct Judgment {
    pub subject: Term,
    pub env: Env,
    pub typ: CanonType,
}

impl Judgment {
    pub fn new(subject: Term, env: Env, typ: CanonType) -> Self {
        Judgment { subject, env, typ }
    }

    /// Equality with subjects compared up to alpha.
    pub fn same_as(&self, other: &Judgment) -> bool {
        self.env == other.env && self.typ == other.typ && alpha_eq(&self.subject, &other.subject)
    }
}

impl PartialEq for Judgment {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl fmt::Display for Env {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (n, (k, u)) in self.0.iter().enumerate() {
            if n > 0 {
                f.write_str(" ")?;
            }
            write!(f, "({} {} {})", k.name, k.idx, u)?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Env {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(judg {} {} {})", self.subject, self.env, self.typ)
    }
}

impl fmt::Debug for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
