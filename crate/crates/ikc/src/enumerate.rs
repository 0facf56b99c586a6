//! Finite universes of terms and types for exhaustive and sampled checks.

use crate::index::{prefix_leq, Index};
use crate::term::{Name, Term, VarKey};
use crate::types::{canonicalize, CanonType, TypeRaw};
use rand::Rng;
use std::collections::BTreeSet;
use std::sync::Arc;

#[derive(Clone)]
struct Entry {
    term: Term,
    deg: Index,
    /// Free variables as a bit set over the variable universe.
    fv: u64,
}

/// All well-formed terms of size at most `max_size` whose variables are drawn
/// from `names` x `idxs`, ordered by size.
pub fn terms_up_to(names: &[&str], idxs: &[Index], max_size: usize) -> Vec<Term> {
    let vars: Vec<VarKey> = names
        .iter()
        .flat_map(|n| idxs.iter().map(move |i| VarKey::new(n, i.clone())))
        .collect();
    assert!(vars.len() <= 64, "variable universe too large");
    let name_masks: Vec<u64> = names
        .iter()
        .map(|n| {
            vars.iter()
                .enumerate()
                .filter(|(_, v)| &*v.name == *n)
                .fold(0u64, |m, (i, _)| m | 1 << i)
        })
        .collect();
    let clash = |a: u64, b: u64| name_masks.iter().any(|nm| ((a | b) & nm).count_ones() > 1);

    let mut by_size: Vec<Vec<Entry>> = vec![Vec::new(); max_size + 1];
    if max_size >= 1 {
        by_size[1] = vars
            .iter()
            .enumerate()
            .map(|(i, v)| Entry { term: Term::Var(v.clone()), deg: v.idx.clone(), fv: 1 << i })
            .collect();
    }
    for n in 2..=max_size {
        let mut out = Vec::new();
        for body in &by_size[n - 1] {
            for (i, x) in vars.iter().enumerate() {
                if !prefix_leq(&body.deg, &x.idx) {
                    continue;
                }
                out.push(Entry {
                    term: Term::Abs(x.clone(), Arc::new(body.term.clone())),
                    deg: body.deg.clone(),
                    fv: body.fv & !(1 << i),
                });
            }
        }
        for k in 1..n - 1 {
            for f in &by_size[k] {
                for a in &by_size[n - 1 - k] {
                    if !prefix_leq(&f.deg, &a.deg) || clash(f.fv, a.fv) {
                        continue;
                    }
                    out.push(Entry {
                        term: Term::App(Arc::new(f.term.clone()), Arc::new(a.term.clone())),
                        deg: f.deg.clone(),
                        fv: f.fv | a.fv,
                    });
                }
            }
        }
        by_size[n] = out;
    }
    by_size.into_iter().flatten().map(|e| e.term).collect()
}

const BINDER_NAMES: [&str; 12] = ["x", "y", "z", "u", "v", "w", "p", "q", "r", "s", "t", "k"];

/// Closed well-formed terms up to size `max_size`, one per alpha class.
/// The binder at nesting depth `n` is named after the `n`-th entry of a fixed list.
pub fn closed_terms_up_to(idxs: &[Index], max_size: usize) -> Vec<Term> {
    let mut out = Vec::new();
    for n in 1..=max_size {
        let mut ctx = Vec::new();
        for e in open_in(idxs, n, &mut ctx) {
            if e.fv == 0 {
                out.push(e.term);
            }
        }
    }
    out
}

/// Terms of size exactly `n` whose free variables lie among the binders in `ctx`.
/// `fv` is a bit set over positions of `ctx`.
fn open_in(idxs: &[Index], n: usize, ctx: &mut Vec<VarKey>) -> Vec<Entry> {
    let mut out = Vec::new();
    if n == 1 {
        for (i, x) in ctx.iter().enumerate() {
            out.push(Entry { term: Term::Var(x.clone()), deg: x.idx.clone(), fv: 1 << i });
        }
        return out;
    }
    let depth = ctx.len();
    assert!(depth < BINDER_NAMES.len(), "term too deep for the binder name list");
    for l in idxs {
        ctx.push(VarKey::new(BINDER_NAMES[depth], l.clone()));
        for body in open_in(idxs, n - 1, ctx) {
            if prefix_leq(&body.deg, l) {
                let x = ctx[depth].clone();
                out.push(Entry {
                    term: Term::Abs(x, Arc::new(body.term)),
                    deg: body.deg,
                    fv: body.fv & !(1 << depth),
                });
            }
        }
        ctx.pop();
    }
    for k in 1..n - 1 {
        let fs = open_in(idxs, k, ctx);
        if fs.is_empty() {
            continue;
        }
        let as_ = open_in(idxs, n - 1 - k, ctx);
        for f in &fs {
            for a in &as_ {
                if prefix_leq(&f.deg, &a.deg) {
                    out.push(Entry {
                        term: Term::App(Arc::new(f.term.clone()), Arc::new(a.term.clone())),
                        deg: f.deg.clone(),
                        fv: f.fv | a.fv,
                    });
                }
            }
        }
    }
    out
}

/// A random well-formed term with size in `sizes`, retrying until the draw is well formed.
pub fn random_term<R: Rng>(rng: &mut R, names: &[&str], idxs: &[Index], sizes: std::ops::RangeInclusive<usize>) -> Term {
    let names: Vec<Name> = names.iter().map(|n| Arc::from(*n)).collect();
    loop {
        let size = rng.gen_range(sizes.clone());
        let t = random_shape(rng, &names, idxs, size);
        if t.check_well_formed().is_ok() {
            return t;
        }
    }
}

fn random_shape<R: Rng>(rng: &mut R, names: &[Name], idxs: &[Index], size: usize) -> Term {
    let pick = |rng: &mut R| {
        let n = names[rng.gen_range(0..names.len())].clone();
        let i = idxs[rng.gen_range(0..idxs.len())].clone();
        VarKey::with_name(n, i)
    };
    if size <= 1 {
        return Term::Var(pick(rng));
    }
    if size == 2 || rng.gen_bool(0.4) {
        let x = pick(rng);
        return Term::Abs(x, Arc::new(random_shape(rng, names, idxs, size - 1)));
    }
    let k = rng.gen_range(1..size - 1);
    let f = random_shape(rng, names, idxs, k);
    let a = random_shape(rng, names, idxs, size - 1 - k);
    Term::App(Arc::new(f), Arc::new(a))
}

/// Canonical forms of all raw types of nesting depth at most `depth` built from
/// `atoms`, `ω^[]`, arrows, binary intersections of equal degree and expansions by `exps`.
pub fn types_up_to(atoms: &[&str], exps: &[u32], depth: usize) -> Vec<CanonType> {
    let mut seen: BTreeSet<CanonType> = BTreeSet::new();
    let mut levels: Vec<Vec<CanonType>> = Vec::new();
    let mut level: Vec<CanonType> = atoms
        .iter()
        .map(|a| canonicalize(&TypeRaw::atom(a)).expect("atom"))
        .chain(std::iter::once(CanonType::omega(Index::empty())))
        .collect();
    seen.extend(level.iter().cloned());
    levels.push(level.clone());
    for _ in 1..depth {
        let all: Vec<CanonType> = seen.iter().cloned().collect();
        let mut next = Vec::new();
        for u in &all {
            for v in &all {
                if let Some(t) = v.as_t() {
                    next.push(CanonType::single(crate::types::CanonT::arrow(u.clone(), t.clone())));
                }
                if u.prefix == v.prefix && u < v {
                    next.push(crate::types::inter(u, v).expect("equal degrees"));
                }
            }
            for &i in exps {
                next.push(crate::types::expand_type(i, u));
            }
        }
        level = next.into_iter().filter(|u| seen.insert(u.clone())).collect();
        levels.push(level.clone());
    }
    levels.into_iter().flatten().collect()
}

/// A random canonical type of degree `prefix` and arrow depth at most `depth`.
pub fn random_type<R: Rng>(rng: &mut R, atoms: &[&str], exps: &[u32], prefix: Index, depth: usize) -> CanonType {
    if rng.gen_bool(0.08) {
        return CanonType::omega(prefix);
    }
    let n = rng.gen_range(1..=3);
    let comps = (0..n).map(|_| random_t(rng, atoms, exps, depth));
    CanonType::from_comps(prefix, comps)
}

fn random_t<R: Rng>(rng: &mut R, atoms: &[&str], exps: &[u32], depth: usize) -> crate::types::CanonT {
    use crate::types::CanonT;
    if depth <= 1 || rng.gen_bool(0.35) {
        return CanonT::atom(atoms[rng.gen_range(0..atoms.len())]);
    }
    let plen = if exps.is_empty() { 0 } else { rng.gen_range(0..=2usize).saturating_sub(1) };
    let prefix: Index = (0..plen).map(|_| exps[rng.gen_range(0..exps.len())]).collect::<Vec<_>>().into();
    let dom = random_type(rng, atoms, exps, prefix, depth - 1);
    CanonT::arrow(dom, random_t(rng, atoms, exps, depth - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn small_counts() {
        let idx = [Index::empty()];
        let ts = terms_up_to(&["x"], &idx, 3);
        let shown: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
        assert!(shown.contains(&"(lam x [] (lam x [] x[]))".to_string()), "{shown:?}");
        assert_eq!(ts.len(), 1 + 1 + (1 + 1));
        for t in &ts {
            t.check_well_formed().unwrap();
        }
    }

    #[test]
    fn clashing_applications_are_skipped() {
        let idx = [Index::empty(), Index::single(1)];
        for t in terms_up_to(&["x", "y"], &idx, 5) {
            t.check_well_formed().unwrap();
        }
    }

    #[test]
    fn closed_terms_are_closed_and_distinct() {
        let idx = [Index::empty(), Index::single(1)];
        let ts = closed_terms_up_to(&idx, 6);
        let canon: BTreeSet<Term> = ts.iter().map(crate::term::alpha_canonical).collect();
        assert_eq!(canon.len(), ts.len());
        for t in &ts {
            assert!(t.is_closed());
            t.check_well_formed().unwrap();
        }
        assert_eq!(closed_terms_up_to(&[Index::empty()], 2).len(), 1);
    }

    #[test]
    fn random_terms_are_well_formed() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let t = random_term(&mut rng, &["x", "y"], &[Index::empty(), Index::single(1)], 8..=14);
            t.check_well_formed().unwrap();
            assert!((8..=14).contains(&t.size()));
        }
    }

    #[test]
    fn type_universe_is_canonical() {
        let us = types_up_to(&["a", "b"], &[0, 1], 2);
        let set: BTreeSet<_> = us.iter().cloned().collect();
        assert_eq!(set.len(), us.len());
        assert!(set.contains(&crate::parse::parse_type("(-> a b)").unwrap()));
        assert!(set.contains(&crate::parse::parse_type("(e 1 (w []))").unwrap()));
    }
}
