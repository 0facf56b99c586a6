use crate::error::{Error, Result};
use crate::index::{prefix_leq, Index};
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

pub type Name = Arc<str>;

/// Variable identity: a name together with its index.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarKey {
    pub name: Name,
    pub idx: Index,
}

impl VarKey {
    pub fn new(name: &str, idx: Index) -> Self {
        VarKey { name: Arc::from(name), idx }
    }

    pub fn with_name(name: Name, idx: Index) -> Self {
        VarKey { name, idx }
    }
}

impl fmt::Display for VarKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.name, self.idx)
    }
}

impl fmt::Debug for VarKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Degree-annotated lambda term. Values built through [`Term::abs`] and
/// [`Term::app`] (or the parser) are well formed.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(VarKey),
    Abs(VarKey, Arc<Term>),
    App(Arc<Term>, Arc<Term>),
}

/// One step into a term: function or argument of an application, body of an abstraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    Fun,
    Arg,
    Body,
}

pub type Path = Vec<Dir>;

pub type VarSet = BTreeSet<VarKey>;

impl Term {
    pub fn var(name: &str, idx: Index) -> Term {
        Term::Var(VarKey::new(name, idx))
    }

    pub fn var_key(k: VarKey) -> Term {
        Term::Var(k)
    }

    /// Checked abstraction: the binder index must extend the body's degree.
    pub fn abs(x: VarKey, body: Term) -> Result<Term> {
        let d = body.degree();
        if !prefix_leq(&d, &x.idx) {
            return Err(Error::Degree(format!(
                "abstraction binder {x} must extend body degree {d}"
            )));
        }
        Ok(Term::Abs(x, Arc::new(body)))
    }

    /// Checked application: degree order and joinability.
    pub fn app(m: Term, n: Term) -> Result<Term> {
        let (dm, dn) = (m.degree(), n.degree());
        if !prefix_leq(&dm, &dn) {
            return Err(Error::Degree(format!(
                "application needs d(fun) {dm} to be a prefix of d(arg) {dn}"
            )));
        }
        if let Some((a, b)) = join_clash(&m.free_vars(), &n.free_vars()) {
            return Err(Error::Joinability(format!(
                "{a} and {b} occur free on both sides of an application"
            )));
        }
        Ok(Term::App(Arc::new(m), Arc::new(n)))
    }

    pub(crate) fn abs_unchecked(x: VarKey, body: Term) -> Term {
        Term::Abs(x, Arc::new(body))
    }

    pub(crate) fn app_unchecked(m: Term, n: Term) -> Term {
        Term::App(Arc::new(m), Arc::new(n))
    }

    pub fn degree(&self) -> Index {
        let mut t = self;
        loop {
            match t {
                Term::Var(k) => return k.idx.clone(),
                Term::Abs(_, b) => t = b,
                Term::App(f, _) => t = f,
            }
        }
    }

    pub fn free_vars(&self) -> VarSet {
        let mut out = VarSet::new();
        let mut bound = Vec::new();
        collect_fv(self, &mut bound, &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn occurs_free(&self, k: &VarKey) -> bool {
        match self {
            Term::Var(v) => v == k,
            Term::Abs(b, body) => b != k && body.occurs_free(k),
            Term::App(f, a) => f.occurs_free(k) || a.occurs_free(k),
        }
    }

    /// Number of constructors.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Abs(_, b) => 1 + b.size(),
            Term::App(f, a) => 1 + f.size() + a.size(),
        }
    }

    /// Every name occurring in the term, bound or free.
    pub fn collect_names(&self, out: &mut HashSet<Name>) {
        match self {
            Term::Var(k) => {
                out.insert(k.name.clone());
            }
            Term::Abs(k, b) => {
                out.insert(k.name.clone());
                b.collect_names(out);
            }
            Term::App(f, a) => {
                f.collect_names(out);
                a.collect_names(out);
            }
        }
    }

    /// Re-verifies every well-formedness condition, returning degree and free variables.
    pub fn check_well_formed(&self) -> Result<(Index, VarSet)> {
        match self {
            Term::Var(k) => Ok((k.idx.clone(), std::iter::once(k.clone()).collect())),
            Term::Abs(k, b) => {
                let (d, mut fv) = b.check_well_formed()?;
                if !prefix_leq(&d, &k.idx) {
                    return Err(Error::Degree(format!(
                        "abstraction binder {k} must extend body degree {d}"
                    )));
                }
                fv.remove(k);
                Ok((d, fv))
            }
            Term::App(f, a) => {
                let (df, mut ff) = f.check_well_formed()?;
                let (da, fa) = a.check_well_formed()?;
                if !prefix_leq(&df, &da) {
                    return Err(Error::Degree(format!(
                        "application needs d(fun) {df} to be a prefix of d(arg) {da}"
                    )));
                }
                if let Some((x, y)) = join_clash(&ff, &fa) {
                    return Err(Error::Joinability(format!(
                        "{x} and {y} occur free on both sides of an application"
                    )));
                }
                ff.extend(fa);
                Ok((df, ff))
            }
        }
    }

    pub fn subterm(&self, path: &[Dir]) -> Option<&Term> {
        let mut t = self;
        for d in path {
            t = match (t, d) {
                (Term::App(f, _), Dir::Fun) => f,
                (Term::App(_, a), Dir::Arg) => a,
                (Term::Abs(_, b), Dir::Body) => b,
                _ => return None,
            };
        }
        Some(t)
    }

    /// Replaces the subterm at `path`. The caller guarantees the result is well formed.
    pub(crate) fn replace_at(&self, path: &[Dir], new: Term) -> Option<Term> {
        match path.split_first() {
            None => Some(new),
            Some((d, rest)) => match (self, d) {
                (Term::App(f, a), Dir::Fun) => {
                    Some(Term::App(Arc::new(f.replace_at(rest, new)?), a.clone()))
                }
                (Term::App(f, a), Dir::Arg) => {
                    Some(Term::App(f.clone(), Arc::new(a.replace_at(rest, new)?)))
                }
                (Term::Abs(k, b), Dir::Body) => {
                    Some(Term::Abs(k.clone(), Arc::new(b.replace_at(rest, new)?)))
                }
                _ => None,
            },
        }
    }
}

fn collect_fv<'a>(t: &'a Term, bound: &mut Vec<&'a VarKey>, out: &mut VarSet) {
    match t {
        Term::Var(k) => {
            if !bound.contains(&k) {
                out.insert(k.clone());
            }
        }
        Term::Abs(k, b) => {
            bound.push(k);
            collect_fv(b, bound, out);
            bound.pop();
        }
        Term::App(f, a) => {
            collect_fv(f, bound, out);
            collect_fv(a, bound, out);
        }
    }
}

/// First pair of variables sharing a name with different indexes, if any.
pub fn join_clash(a: &VarSet, b: &VarSet) -> Option<(VarKey, VarKey)> {
    for x in a {
        for y in b {
            if x.name == y.name && x.idx != y.idx {
                return Some((x.clone(), y.clone()));
            }
        }
    }
    None
}

pub fn joinable(m: &Term, n: &Term) -> bool {
    join_clash(&m.free_vars(), &n.free_vars()).is_none()
}

/// Prepends `i` to every index, bound and free.
pub fn lift(m: &Term, i: u32) -> Term {
    match m {
        Term::Var(k) => Term::Var(VarKey::with_name(k.name.clone(), k.idx.cons(i))),
        Term::Abs(k, b) => Term::Abs(
            VarKey::with_name(k.name.clone(), k.idx.cons(i)),
            Arc::new(lift(b, i)),
        ),
        Term::App(f, a) => Term::App(Arc::new(lift(f, i)), Arc::new(lift(a, i))),
    }
}

/// Prepends all of `l`, so the result has degree `l` followed by the old degree.
pub fn lift_seq(m: &Term, l: &Index) -> Term {
    l.as_slice().iter().rev().fold(m.clone(), |t, &i| lift(&t, i))
}

/// Strips a leading `i` from every index.
pub fn lower(m: &Term, i: u32) -> Result<Term> {
    if m.degree().first() != Some(i) {
        return Err(Error::Degree(format!(
            "cannot lower a term of degree {} by {i}",
            m.degree()
        )));
    }
    lower_rec(m, i)
}

fn lower_key(k: &VarKey, i: u32) -> Result<VarKey> {
    match k.idx.first() {
        Some(j) if j == i => Ok(VarKey::with_name(k.name.clone(), k.idx.tail().unwrap())),
        _ => Err(Error::Degree(format!("variable {k} does not start with {i}"))),
    }
}

fn lower_rec(m: &Term, i: u32) -> Result<Term> {
    Ok(match m {
        Term::Var(k) => Term::Var(lower_key(k, i)?),
        Term::Abs(k, b) => Term::Abs(lower_key(k, i)?, Arc::new(lower_rec(b, i)?)),
        Term::App(f, a) => Term::App(Arc::new(lower_rec(f, i)?), Arc::new(lower_rec(a, i)?)),
    })
}

/// Lowers by every entry of `k`, front first.
pub fn lower_seq(m: &Term, k: &Index) -> Result<Term> {
    let mut t = m.clone();
    for &i in k.as_slice() {
        t = lower(&t, i)?;
    }
    Ok(t)
}

/// Supply of fresh binder names `_0`, `_1`, ... skipping names already in use.
pub struct Fresh {
    used: HashSet<Name>,
    next: u64,
}

impl Fresh {
    pub fn new(used: HashSet<Name>) -> Self {
        Fresh { used, next: 0 }
    }

    pub fn avoid(&mut self, n: &Name) {
        self.used.insert(n.clone());
    }

    pub fn avoid_term(&mut self, t: &Term) {
        t.collect_names(&mut self.used);
    }

    pub fn fresh(&mut self) -> Name {
        loop {
            let cand: Name = Arc::from(format!("_{}", self.next));
            self.next += 1;
            if !self.used.contains(&cand) {
                self.used.insert(cand.clone());
                return cand;
            }
        }
    }
}

/// Simultaneous capture-avoiding substitution.
pub fn substitute(m: &Term, bindings: &[(VarKey, Term)]) -> Result<Term> {
    let mut fresh = Fresh::new(HashSet::new());
    fresh.avoid_term(m);
    for (_, n) in bindings {
        fresh.avoid_term(n);
    }
    substitute_with(m, bindings, &mut fresh)
}

/// As [`substitute`], drawing renamed binders from a caller-owned supply.
pub fn substitute_with(m: &Term, bindings: &[(VarKey, Term)], fresh: &mut Fresh) -> Result<Term> {
    let mut rest = m.free_vars();
    for (k, n) in bindings {
        let d = n.degree();
        if d != k.idx {
            return Err(Error::Degree(format!(
                "substituting for {k} needs a term of degree {}, got {d}",
                k.idx
            )));
        }
        rest.remove(k);
    }
    let fvs: Vec<VarSet> = bindings.iter().map(|(_, n)| n.free_vars()).collect();
    for (i, fa) in fvs.iter().enumerate() {
        if let Some((a, b)) = join_clash(&rest, fa) {
            return Err(Error::Joinability(format!("substitution family clash on {a} / {b}")));
        }
        for fb in &fvs[i + 1..] {
            if let Some((a, b)) = join_clash(fa, fb) {
                return Err(Error::Joinability(format!("substitution family clash on {a} / {b}")));
            }
        }
    }
    let mut map = HashMap::new();
    let mut avoid = HashSet::new();
    for ((k, n), fv) in bindings.iter().zip(&fvs) {
        map.insert(k.clone(), n.clone());
        avoid.extend(fv.iter().map(|v| v.name.clone()));
    }
    let out = subst_rec(m, &map, &avoid, fresh);
    let (dm, dout) = (m.degree(), out.degree());
    if dm != dout {
        return Err(Error::Degree(format!("substitution changed degree {dm} to {dout}")));
    }
    Ok(out)
}

fn subst_rec(
    m: &Term,
    map: &HashMap<VarKey, Term>,
    avoid: &HashSet<Name>,
    fresh: &mut Fresh,
) -> Term {
    match m {
        Term::Var(k) => map.get(k).cloned().unwrap_or_else(|| m.clone()),
        Term::App(f, a) => Term::App(
            Arc::new(subst_rec(f, map, avoid, fresh)),
            Arc::new(subst_rec(a, map, avoid, fresh)),
        ),
        Term::Abs(k, b) => {
            let live = map.keys().any(|v| v != k && b.occurs_free(v));
            if !live {
                return m.clone();
            }
            let mut inner = map.clone();
            inner.remove(k);
            let mut binder = k.clone();
            if avoid.contains(&k.name) {
                binder = VarKey::with_name(fresh.fresh(), k.idx.clone());
                inner.insert(k.clone(), Term::Var(binder.clone()));
            }
            Term::Abs(binder, Arc::new(subst_rec(b, &inner, avoid, fresh)))
        }
    }
}

/// Renames binders to positional names `#0`, `#1`, ... in left-to-right order.
/// The `#` prefix is outside the identifier grammar, so no free name can be captured.
pub fn alpha_canonical(m: &Term) -> Term {
    let mut stack = Vec::new();
    let mut counter = 0u32;
    canon_rec(m, &mut stack, &mut counter)
}

fn canon_rec(m: &Term, stack: &mut Vec<(VarKey, Name)>, counter: &mut u32) -> Term {
    match m {
        Term::Var(k) => match stack.iter().rev().find(|(b, _)| b == k) {
            Some((_, n)) => Term::Var(VarKey::with_name(n.clone(), k.idx.clone())),
            None => m.clone(),
        },
        Term::Abs(k, b) => {
            let n: Name = Arc::from(format!("#{counter}"));
            *counter += 1;
            stack.push((k.clone(), n.clone()));
            let body = canon_rec(b, stack, counter);
            stack.pop();
            Term::Abs(VarKey::with_name(n, k.idx.clone()), Arc::new(body))
        }
        Term::App(f, a) => {
            let f2 = canon_rec(f, stack, counter);
            let a2 = canon_rec(a, stack, counter);
            Term::App(Arc::new(f2), Arc::new(a2))
        }
    }
}

pub fn alpha_eq(m: &Term, n: &Term) -> bool {
    m == n || alpha_canonical(m) == alpha_canonical(n)
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(k) => write!(f, "{}{}", k.name, k.idx),
            Term::Abs(k, b) => write!(f, "(lam {} {} {})", k.name, k.idx, b),
            Term::App(m, n) => write!(f, "(app {m} {n})"),
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
