//! Property suites over enumerated and seeded random samples.

use crate::enumerate::{random_term, random_type, terms_up_to};
use crate::index::Index;
use crate::reduction::{all_steps, check_local_confluence, Relation};
use crate::term::{lift, lower, Term};
use crate::types::{canonicalize, embed, subtype, CanonType};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Clone, Debug)]
pub struct PropOutcome {
    pub name: &'static str,
    pub cases: usize,
    /// Descriptions of the first few failing cases.
    pub failures: Vec<String>,
    pub failed: usize,
}

impl PropOutcome {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }

    fn collect(name: &'static str, cases: usize, fails: Vec<String>) -> Self {
        let failed = fails.len();
        PropOutcome { name, cases, failures: fails.into_iter().take(5).collect(), failed }
    }
}

/// Enumerated terms over three names and indexes `[]`, `[1]`.
pub fn term_sample(max_size: usize) -> Vec<Term> {
    terms_up_to(&["x", "y", "z"], &[Index::empty(), Index::single(1)], max_size)
}

/// `n` seeded random well-formed terms of sizes 8 to 16.
pub fn random_terms(seed: u64, n: usize) -> Vec<Term> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| random_term(&mut rng, &["x", "y", "z"], &[Index::empty(), Index::single(1)], 8..=16))
        .collect()
}

/// Every single step of every relation keeps the degree and yields a well-formed term.
pub fn degree_preservation(terms: &[Term]) -> PropOutcome {
    let fails: Vec<String> = terms
        .par_iter()
        .flat_map_iter(|m| {
            let d = m.degree();
            Relation::ALL.into_iter().flat_map(move |r| {
                let d = d.clone();
                all_steps(m, r).into_iter().filter_map(move |(_, n)| match n.check_well_formed() {
                    Ok((dn, _)) if dn == d => None,
                    Ok((dn, _)) => Some(format!("{m} ->{r} {n}: degree {d} became {dn}")),
                    Err(e) => Some(format!("{m} ->{r} {n}: {e}")),
                })
            })
        })
        .collect();
    PropOutcome::collect("degree-preservation", terms.len(), fails)
}

/// Eta steps keep the free variables exactly; beta and head steps never add any.
pub fn free_variable_laws(terms: &[Term]) -> PropOutcome {
    let fails: Vec<String> = terms
        .par_iter()
        .flat_map_iter(|m| {
            let fv = m.free_vars();
            Relation::ALL.into_iter().flat_map(move |r| {
                let fv = fv.clone();
                all_steps(m, r).into_iter().filter_map(move |(rx, n)| {
                    let fn_ = n.free_vars();
                    let ok = match rx.kind {
                        crate::reduction::RedexKind::Eta => fn_ == fv,
                        crate::reduction::RedexKind::Beta => fn_.is_subset(&fv),
                    };
                    (!ok).then(|| format!("{m} ->{r} {n}: free variables {fv:?} became {fn_:?}"))
                })
            })
        })
        .collect();
    PropOutcome::collect("free-variables", terms.len(), fails)
}

pub fn local_confluence(terms: &[Term], r: Relation, depth: usize) -> PropOutcome {
    let fails: Vec<String> = terms
        .par_iter()
        .filter_map(|m| {
            let rep = check_local_confluence(m, r, depth);
            rep.unjoined.first().map(|(p, a, b)| format!("{m}: peak {p} -> {a} | {b} does not join"))
        })
        .collect();
    let name = match r {
        Relation::Beta => "confluence-beta",
        Relation::Eta => "confluence-eta",
        Relation::BetaEta => "confluence-betaeta",
        Relation::H => "confluence-h",
    };
    PropOutcome::collect(name, terms.len(), fails)
}

pub fn lift_lower(terms: &[Term]) -> PropOutcome {
    let fails: Vec<String> = terms
        .par_iter()
        .flat_map_iter(|m| {
            [0u32, 1, 2].into_iter().filter_map(move |i| {
                let l = lift(m, i);
                let ok = l.check_well_formed().is_ok()
                    && l.degree() == m.degree().cons(i)
                    && lower(&l, i).as_ref() == Ok(m);
                (!ok).then(|| format!("{m} lifted by {i} gives {l}"))
            })
        })
        .collect();
    PropOutcome::collect("lift-lower", terms.len(), fails)
}

/// `n` seeded random canonical types over atoms `a`, `b` and expansions 0, 1.
pub fn random_types(seed: u64, n: usize) -> Vec<CanonType> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let plen = rng.gen_range(0..=2usize).saturating_sub(1);
            let prefix: Index = (0..plen).map(|_| rng.gen_range(0..=1u32)).collect::<Vec<_>>().into();
            random_type(&mut rng, &["a", "b"], &[0, 1], prefix, 4)
        })
        .collect()
}

/// Reflexivity, the omega top element, canonicalization idempotence and
/// transitivity along chains built by weakening.
pub fn subtype_laws(types: &[CanonType]) -> PropOutcome {
    let fails: Vec<String> = types
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, u)| {
            let mut out = Vec::new();
            if !subtype(u, u) {
                out.push(format!("{u} is not below itself"));
            }
            if !subtype(u, &CanonType::omega(u.degree().clone())) {
                out.push(format!("{u} is not below omega"));
            }
            if canonicalize(&embed(u)).as_ref() != Ok(u) {
                out.push(format!("{u} is not stable under canonicalization"));
            }
            let v = drop_last(u);
            let w = drop_last(&v);
            if !(subtype(u, &v) && subtype(&v, &w) && subtype(u, &w)) {
                out.push(format!("chain {u} / {v} / {w} breaks transitivity"));
            }
            for (j, v) in types.iter().enumerate().skip(i + 1).take(8) {
                for w in types.iter().skip(j + 1).take(8) {
                    if subtype(u, v) && subtype(v, w) && !subtype(u, w) {
                        out.push(format!("{u} <= {v} <= {w} but not {u} <= {w}"));
                    }
                }
            }
            out.into_iter()
        })
        .collect();
    PropOutcome::collect("subtype-laws", types.len(), fails)
}

fn drop_last(u: &CanonType) -> CanonType {
    let mut v = u.clone();
    if let Some(last) = v.comps.iter().next_back().cloned() {
        v.comps.remove(&last);
    }
    v
}

/// Runs the default suite.
pub fn run_all(size: usize, seed: u64, depth: usize) -> Vec<PropOutcome> {
    let mut terms = term_sample(size);
    terms.extend(random_terms(seed, 1000));
    let types = random_types(seed, 10_000);
    let mut out = vec![degree_preservation(&terms), free_variable_laws(&terms), lift_lower(&terms)];
    for r in Relation::ALL {
        out.push(local_confluence(&terms, r, depth));
    }
    out.push(subtype_laws(&types));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        for p in run_all(4, 1, 2) {
            assert!(p.ok(), "{p:?}");
            assert!(p.cases > 0);
        }
    }

    #[test]
    fn random_samples_are_reproducible() {
        assert_eq!(random_terms(9, 20), random_terms(9, 20));
        assert_eq!(random_types(9, 20), random_types(9, 20));
    }
}
