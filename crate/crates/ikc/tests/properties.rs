mod common;

use common::{degree, free};
use ikc::deriv::{bounded_typecheck, check_derivation, subject_reduce, SearchResult};
use ikc::enumerate::{random_term, random_type};
use ikc::env::{env_enlarge, env_expand, env_inter, env_lower, env_ok, env_restrict};
use ikc::reduction::{step, Relation};
use ikc::semantics::{closed_sample, oracle_membership, saturation_check, stability_violations, ExampleType};
use ikc::term::{alpha_eq, lift, lower, substitute, Term, VarKey};
use ikc::types::{canonicalize, embed, expand_type, lower_type, subtype, CanonType, TypeRaw};
use ikc::{Env, Index};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn idxs() -> [Index; 2] {
    [Index::empty(), Index::single(1)]
}

fn term_from(seed: u64) -> Term {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_term(&mut rng, &["x", "y", "z"], &idxs(), 1..=12)
}

fn type_from(seed: u64, prefix: Index) -> CanonType {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_type(&mut rng, &["a", "b", "c"], &[0, 1], prefix, 3)
}

fn env_from(seed: u64, keys: &[VarKey]) -> Env {
    let mut g = Env::new();
    for (i, k) in keys.iter().enumerate() {
        g.insert(k.clone(), type_from(seed.wrapping_add(i as u64), k.idx.clone()));
    }
    g
}

/// Random raw types, including omega, so that canonicalization has work to do.
fn raw_type() -> impl Strategy<Value = TypeRaw> {
    let leaf = prop_oneof![
        Just(TypeRaw::atom("a")),
        Just(TypeRaw::atom("b")),
        Just(TypeRaw::Omega(Index::empty())),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), prop_oneof![Just(TypeRaw::atom("a")), Just(TypeRaw::atom("b"))])
                .prop_map(|(u, t)| TypeRaw::arrow(u, t)),
            (inner.clone(), inner.clone()).prop_map(|(u, v)| TypeRaw::inter(u, v)),
            (0u32..2, inner).prop_map(|(i, u)| TypeRaw::exp(i, u)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn lift_then_lower_is_identity(seed in any::<u64>(), i in 0u32..3) {
        let m = term_from(seed);
        let l = lift(&m, i);
        prop_assert!(l.check_well_formed().is_ok());
        prop_assert_eq!(degree(&l), degree(&m).cons(i));
        prop_assert_eq!(lower(&l, i).unwrap(), m);
    }

    #[test]
    fn substitution_commutes_with_lift(seed in any::<u64>(), seed2 in any::<u64>(), i in 0u32..2) {
        let m = term_from(seed);
        let Some(x) = free(&m).into_iter().next() else { return Ok(()) };
        let n = term_from(seed2);
        prop_assume!(degree(&n) == x.idx);
        let Ok(s) = substitute(&m, &[(x.clone(), n.clone())]) else { return Ok(()) };
        let lx = VarKey::with_name(x.name.clone(), x.idx.cons(i));
        let ls = substitute(&lift(&m, i), &[(lx, lift(&n, i))]).unwrap();
        prop_assert!(alpha_eq(&lift(&s, i), &ls));
    }

    #[test]
    fn substitution_degree_and_free_variables(seed in any::<u64>(), seed2 in any::<u64>()) {
        let m = term_from(seed);
        let Some(x) = free(&m).into_iter().next() else { return Ok(()) };
        let n = term_from(seed2);
        prop_assume!(degree(&n) == x.idx);
        if let Ok(s) = substitute(&m, &[(x.clone(), n.clone())]) {
            prop_assert!(s.check_well_formed().is_ok());
            prop_assert_eq!(degree(&s), degree(&m));
            let mut want = free(&m);
            want.remove(&x);
            want.extend(free(&n));
            prop_assert_eq!(free(&s), want);
        }
    }

    #[test]
    fn canonicalize_is_idempotent(u in raw_type()) {
        if let Ok(c) = canonicalize(&u) {
            prop_assert_eq!(canonicalize(&embed(&c)).unwrap(), c.clone());
            // quotient laws: idempotence, commutativity and neutrality of omega
            let twice = canonicalize(&TypeRaw::inter(u.clone(), u.clone())).unwrap();
            prop_assert_eq!(&twice, &c);
            let w = canonicalize(&TypeRaw::inter(u.clone(), TypeRaw::Omega(c.degree().clone()))).unwrap();
            prop_assert_eq!(&w, &c);
        }
    }

    #[test]
    fn intersection_commutes(u in raw_type(), v in raw_type()) {
        let a = canonicalize(&TypeRaw::inter(u.clone(), v.clone())).ok();
        let b = canonicalize(&TypeRaw::inter(v, u)).ok();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn subtype_congruences(seed in any::<u64>(), seed2 in any::<u64>(), i in 0u32..2) {
        let u = type_from(seed, Index::empty());
        let v = type_from(seed2, Index::empty());
        prop_assert!(subtype(&u, &u));
        prop_assert!(subtype(&u, &CanonType::omega(u.degree().clone())));
        if subtype(&u, &v) {
            prop_assert_eq!(u.degree(), v.degree());
            prop_assert!(subtype(&expand_type(i, &u), &expand_type(i, &v)));
        }
        let (eu, ev) = (expand_type(i, &u), expand_type(i, &v));
        let k = Index::single(i);
        prop_assert_eq!(subtype(&eu, &ev), subtype(&lower_type(&eu, &k).unwrap(), &lower_type(&ev, &k).unwrap()));
        if subtype(&CanonType::omega(Index::empty()), &v) {
            prop_assert!(v.is_omega());
        }
    }

    #[test]
    fn environment_laws(seed in any::<u64>(), seed2 in any::<u64>(), j in 0u32..2) {
        let m = term_from(seed);
        let keys: Vec<VarKey> = free(&m).into_iter().collect();
        let g = env_from(seed2, &keys);
        let h = env_from(seed2.wrapping_mul(31), &keys);
        prop_assert!(env_ok(&g));
        prop_assert_eq!(env_inter(&g, &h).unwrap(), env_inter(&h, &g).unwrap());
        prop_assert_eq!(env_inter(&g, &g).unwrap(), g.clone());
        prop_assert_eq!(env_lower(&env_expand(j, &g), &Index::single(j)).unwrap(), g.clone());
        let some: ikc::term::VarSet = keys.iter().take(1).cloned().collect();
        let small = env_restrict(&g, &some).unwrap();
        let back = env_enlarge(&small, &free(&m)).unwrap();
        prop_assert_eq!(env_restrict(&back, &some).unwrap(), small);
        prop_assert_eq!(back.domain(), free(&m));
    }

    #[test]
    fn searched_derivations_satisfy_metadata_and_reduce(seed in any::<u64>(), k in 0usize..6) {
        let m = term_from(seed);
        let keys: Vec<VarKey> = free(&m).into_iter().collect();
        let g = env_from(seed, &keys);
        let tag = ExampleType::ALL[k];
        let u = if degree(&m) == tag.degree() { tag.typ() } else { type_from(seed, degree(&m)) };
        if let SearchResult::Found(d) = bounded_typecheck(&m, &g, &u, 2000) {
            let j = check_derivation(&d).unwrap();
            prop_assert!(env_ok(&j.env));
            prop_assert_eq!(j.env.domain(), free(&j.subject));
            prop_assert_eq!(j.typ.degree(), &degree(&j.subject));
            for n in step(&m, Relation::BetaEta) {
                let d2 = subject_reduce(&d, &n, Relation::BetaEta, 100).unwrap();
                let j2 = check_derivation(&d2).unwrap();
                prop_assert!(alpha_eq(&j2.subject, &n));
                prop_assert_eq!(j2.env, env_restrict(&g, &free(&n)).unwrap());
                prop_assert_eq!(j2.typ, u.clone());
            }
        }
    }
}

#[test]
fn identity_members_are_saturated() {
    // membership is taken over the whole universe: a smaller member set would
    // miss larger terms that reduce into it
    let universe = closed_sample(9);
    let members: Vec<Term> = universe
        .iter()
        .filter(|m| oracle_membership(ExampleType::Id0, m, 1000).member)
        .cloned()
        .collect();
    let rep = saturation_check(&members, &universe, Relation::Beta, 3);
    assert!(rep.ok(), "{:?}", rep.violations.first());
    assert!(saturation_check(&[], &universe, Relation::Beta, 3).ok());
    let truncated: Vec<Term> = members.iter().filter(|m| m.size() <= 7).cloned().collect();
    assert!(!saturation_check(&truncated, &universe, Relation::Beta, 3).violations.is_empty());
}

#[test]
fn members_are_stable_under_beta_eta() {
    let sample = closed_sample(8);
    for t in [ExampleType::Id0, ExampleType::D, ExampleType::Nat0] {
        let v = stability_violations(t, &sample, Relation::BetaEta, 3, 1000);
        assert!(v.is_empty(), "{t}: {:?}", v.first());
    }
}

#[test]
fn lift_distributes_over_intersection_on_small_sets() {
    let sample = closed_sample(5);
    let xs: Vec<Term> = sample.iter().take(5).cloned().collect();
    let ys: Vec<Term> = sample.iter().skip(2).take(5).cloned().collect();
    assert!(saturation_check(&xs, &ys, Relation::Beta, 0).lift_intersection_ok);
}
