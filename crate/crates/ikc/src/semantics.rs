//! Membership oracles for the example types and finite cross-checks of
//! soundness, completeness and saturation.

use crate::deriv::{bounded_typecheck, CheckedJudgment, SearchResult};
use crate::enumerate::closed_terms_up_to;
use crate::error::{Error, Result};
use crate::index::Index;
use crate::parse::parse_type;
use crate::reduction::{contract, first_redex, reducts_within, Relation};
use crate::term::{alpha_canonical, lift, Term, VarKey};
use crate::types::CanonType;
use rayon::prelude::*;
use std::collections::{HashSet, BTreeSet};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExampleType {
    Id0,
    Id1,
    D,
    Nat0,
    Nat1,
    NatP0,
}

impl ExampleType {
    pub const ALL: [ExampleType; 6] = [
        ExampleType::Id0,
        ExampleType::Id1,
        ExampleType::D,
        ExampleType::Nat0,
        ExampleType::Nat1,
        ExampleType::NatP0,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExampleType::Id0 => "Id0",
            ExampleType::Id1 => "Id1",
            ExampleType::D => "D",
            ExampleType::Nat0 => "Nat0",
            ExampleType::Nat1 => "Nat1",
            ExampleType::NatP0 => "NatP0",
        }
    }

    pub fn source(self) -> &'static str {
        match self {
            ExampleType::Id0 => "(-> a a)",
            ExampleType::Id1 => "(e 1 (-> a a))",
            ExampleType::D => "(-> (^ a (-> a b)) b)",
            ExampleType::Nat0 => "(-> (-> a a) (-> a a))",
            ExampleType::Nat1 => "(e 1 (-> (-> a a) (-> a a)))",
            ExampleType::NatP0 => "(-> (-> (e 1 a) a) (-> (e 1 a) a))",
        }
    }

    pub fn typ(self) -> CanonType {
        parse_type(self.source()).expect("example types parse")
    }

    /// Degree of every inhabitant.
    pub fn degree(self) -> Index {
        match self {
            ExampleType::Id1 | ExampleType::Nat1 => Index::single(1),
            _ => Index::empty(),
        }
    }

    /// All inhabitants are characterized up to beta.
    pub fn relation(self) -> Relation {
        Relation::Beta
    }
}

impl fmt::Display for ExampleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExampleType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExampleType::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Syntax { pos: 0, msg: format!("unknown example type {s:?}; expected one of Id0, Id1, D, Nat0, Nat1, NatP0") })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleVerdict {
    pub member: bool,
    /// Set when the fuel ran out before a normal form or a cycle was found.
    pub undecided: bool,
    /// The normal form on success, otherwise the reason for rejection.
    pub witness: String,
    /// For the numeral types, the number of applications of `f`.
    pub count: Option<usize>,
}

impl OracleVerdict {
    fn no(why: impl Into<String>) -> Self {
        OracleVerdict { member: false, undecided: false, witness: why.into(), count: None }
    }

    pub fn label(&self) -> &'static str {
        if self.member {
            "member"
        } else if self.undecided {
            "undecided"
        } else {
            "non-member"
        }
    }
}

enum Normal {
    Form(Term),
    Cycle(usize),
    OutOfFuel,
}

/// Leftmost-outermost beta normalization that gives up on a revisited term.
fn beta_normal(m: &Term, fuel: usize) -> Normal {
    let mut seen = HashSet::new();
    let mut t = m.clone();
    for step in 0..=fuel {
        let Some(rx) = first_redex(&t, Relation::Beta) else {
            return Normal::Form(t);
        };
        if !seen.insert(alpha_canonical(&t)) {
            return Normal::Cycle(step);
        }
        if step == fuel {
            break;
        }
        t = contract(&t, &rx).expect("first redex contracts");
    }
    Normal::OutOfFuel
}

pub fn oracle_membership(t: ExampleType, m: &Term, fuel: usize) -> OracleVerdict {
    if !m.is_closed() {
        return OracleVerdict::no("term is not closed");
    }
    if m.degree() != t.degree() {
        return OracleVerdict::no(format!("degree {} differs from {}", m.degree(), t.degree()));
    }
    let nf = match beta_normal(m, fuel) {
        Normal::Form(n) => n,
        Normal::Cycle(k) => {
            return OracleVerdict::no(format!("no normal form: leftmost-outermost reduction revisits a term after {k} steps"))
        }
        Normal::OutOfFuel => {
            return OracleVerdict {
                member: false,
                undecided: true,
                witness: "undecided within fuel".into(),
                count: None,
            }
        }
    };
    match pattern(t, &alpha_canonical(&nf)) {
        Some(count) => OracleVerdict { member: true, undecided: false, witness: nf.to_string(), count },
        None => OracleVerdict::no(format!("normal form {nf} does not match")),
    }
}

fn abs_parts(m: &Term) -> Option<(&VarKey, &Term)> {
    match m {
        Term::Abs(x, b) => Some((x, b)),
        _ => None,
    }
}

fn is_var(m: &Term, x: &VarKey) -> bool {
    matches!(m, Term::Var(y) if y == x)
}

/// Matches an alpha-canonical normal form against the characterization;
/// returns the numeral count where one applies.
fn pattern(t: ExampleType, nf: &Term) -> Option<Option<usize>> {
    let e = Index::empty();
    let one = Index::single(1);
    let (y, body) = abs_parts(nf)?;
    match t {
        ExampleType::Id0 | ExampleType::Id1 => {
            let l = if t == ExampleType::Id0 { &e } else { &one };
            (y.idx == *l && is_var(body, y)).then_some(None)
        }
        ExampleType::D => match body {
            Term::App(f, a) if y.idx == e && is_var(f, y) && is_var(a, y) => Some(None),
            _ => None,
        },
        ExampleType::Nat0 | ExampleType::Nat1 => {
            let l = if t == ExampleType::Nat0 { &e } else { &one };
            let f = y;
            if f.idx != *l {
                return None;
            }
            if is_var(body, f) {
                return Some(Some(1));
            }
            let (x, mut inner) = abs_parts(body)?;
            if x.idx != *l {
                return None;
            }
            let mut n = 0;
            while let Term::App(g, a) = inner {
                if !is_var(g, f) {
                    return None;
                }
                n += 1;
                inner = a;
            }
            // n = 0 is included: Church zero is typable at the numeral type
            is_var(inner, x).then_some(Some(n))
        }
        ExampleType::NatP0 => {
            if y.idx != e {
                return None;
            }
            if is_var(body, y) {
                return Some(Some(1));
            }
            let (x, inner) = abs_parts(body)?;
            match inner {
                Term::App(g, a) if x.idx == one && is_var(g, y) && is_var(a, x) => Some(Some(1)),
                _ => None,
            }
        }
    }
}

/// Checks a stored empty-environment derivation against the oracle of `t`.
pub fn soundness_check(cj: &CheckedJudgment, t: ExampleType, fuel: usize) -> Result<bool> {
    let j = &cj.judgment;
    if !j.env.is_empty() {
        return Err(Error::TypeMismatch(format!("environment {} is not empty", j.env)));
    }
    if j.typ != t.typ() {
        return Err(Error::TypeMismatch(format!("derivation concludes {} but {t} is {}", j.typ, t.typ())));
    }
    Ok(oracle_membership(t, &j.subject, fuel).member)
}

#[derive(Clone, Debug, Default)]
pub struct CompletenessReport {
    pub scanned: usize,
    pub members: usize,
    pub undecided: Vec<Term>,
    pub found: usize,
    pub unknown: Vec<Term>,
    /// Members for which the search refuted typability: completeness violations.
    pub refuted: Vec<(Term, String)>,
    /// Per-member lines `term \t verdict \t detail`.
    pub lines: Vec<String>,
}

impl CompletenessReport {
    pub fn ok(&self) -> bool {
        self.refuted.is_empty() && self.undecided.is_empty()
    }
}

/// Closed terms up to `size_bound` with indexes in `{[], [1]}`.
pub fn closed_sample(size_bound: usize) -> Vec<Term> {
    closed_terms_up_to(&[Index::empty(), Index::single(1)], size_bound)
}

pub fn completeness_sample(t: ExampleType, size_bound: usize, fuel: usize) -> CompletenessReport {
    completeness_on(t, &closed_sample(size_bound), fuel)
}

pub fn completeness_on(t: ExampleType, sample: &[Term], fuel: usize) -> CompletenessReport {
    let ty = t.typ();
    let rows: Vec<_> = sample
        .par_iter()
        .filter(|m| m.degree() == t.degree())
        .map(|m| {
            let v = oracle_membership(t, m, fuel);
            let r = v.member.then(|| bounded_typecheck(m, &crate::env::Env::new(), &ty, fuel));
            (m, v, r)
        })
        .collect();
    let mut rep = CompletenessReport { scanned: sample.len(), ..Default::default() };
    for (m, v, r) in rows {
        if v.undecided {
            rep.undecided.push(m.clone());
            rep.lines.push(format!("{m}\tundecided\t{}", v.witness));
        }
        let Some(r) = r else { continue };
        rep.members += 1;
        let detail = match &r {
            SearchResult::Found(d) => {
                rep.found += 1;
                format!("derivation of size {}", d.size())
            }
            SearchResult::Unknown => {
                rep.unknown.push(m.clone());
                "fuel exhausted".to_string()
            }
            SearchResult::Refuted(why) => {
                rep.refuted.push((m.clone(), why.clone()));
                format!("completeness violation: {why}")
            }
        };
        rep.lines.push(format!("{m}\t{}\t{detail}", r.label()));
    }
    rep
}

#[derive(Clone, Debug, Default)]
pub struct SaturationReport {
    /// `(m, n)` with `m` outside the set although it reduces to the member `n`.
    pub violations: Vec<(Term, Term)>,
    pub lift_intersection_ok: bool,
}

impl SaturationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty() && self.lift_intersection_ok
    }
}

fn canon_set(ts: &[Term]) -> HashSet<Term> {
    ts.iter().map(alpha_canonical).collect()
}

fn lift_set(s: &HashSet<Term>, i: u32) -> HashSet<Term> {
    s.iter().map(|m| alpha_canonical(&lift(m, i))).collect()
}

/// Whether `terms` is closed under `r`-expansion within `closed_under`, up to `depth` steps,
/// and whether lifting distributes over the intersection of the two sets.
pub fn saturation_check(terms: &[Term], closed_under: &[Term], r: Relation, depth: usize) -> SaturationReport {
    let set = canon_set(terms);
    let violations: Vec<(Term, Term)> = closed_under
        .par_iter()
        .filter(|m| !set.contains(&alpha_canonical(m)))
        .filter_map(|m| {
            let hit = reducts_within(m, r, depth).into_iter().find(|n| set.contains(n))?;
            Some((m.clone(), hit))
        })
        .collect();
    let other = canon_set(closed_under);
    let lift_intersection_ok = [0, 1].iter().all(|&i| {
        let both: HashSet<Term> = set.intersection(&other).cloned().collect();
        let lhs = lift_set(&both, i);
        let (lx, ly) = (lift_set(&set, i), lift_set(&other, i));
        let rhs: HashSet<Term> = lx.intersection(&ly).cloned().collect();
        lhs == rhs
    });
    SaturationReport { violations, lift_intersection_ok }
}

/// Pairs `(m, tag)` where membership of `lift(m, 1)` in the lifted type differs
/// from membership of `m` in the base type.
pub fn lift_correspondence(sample: &[Term], fuel: usize) -> Vec<(Term, ExampleType)> {
    let pairs = [(ExampleType::Id0, ExampleType::Id1), (ExampleType::Nat0, ExampleType::Nat1)];
    let mut out: Vec<(Term, ExampleType)> = sample
        .par_iter()
        .filter(|m| m.is_closed() && m.degree().is_empty())
        .flat_map_iter(|m| {
            let lifted = lift(m, 1);
            pairs
                .iter()
                .filter(|(base, up)| {
                    let a = oracle_membership(*base, m, fuel);
                    let b = oracle_membership(*up, &lifted, fuel);
                    a.member != b.member || a.undecided != b.undecided || a.count != b.count
                })
                .map(|(_, up)| (m.clone(), *up))
                .collect::<Vec<_>>()
        })
        .collect();
    out.sort();
    out
}

/// Members of `t` in the sample whose `r`-reducts within `depth` steps leave the set.
pub fn stability_violations(t: ExampleType, sample: &[Term], r: Relation, depth: usize, fuel: usize) -> Vec<(Term, Term)> {
    sample
        .par_iter()
        .filter(|m| oracle_membership(t, m, fuel).member)
        .flat_map_iter(|m| {
            reducts_within(m, r, depth)
                .into_iter()
                .filter(|n| !oracle_membership(t, n, fuel).member)
                .map(|n| (m.clone(), n))
                .collect::<BTreeSet<_>>()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_term;

    fn member(t: ExampleType, m: &str) -> OracleVerdict {
        oracle_membership(t, &parse_term(m).unwrap(), 1000)
    }

    #[test]
    fn identities() {
        assert!(member(ExampleType::Id0, "(lam y [] y[])").member);
        assert!(member(ExampleType::Id0, "(app (lam y [] y[]) (lam z [] z[]))").member);
        assert!(!member(ExampleType::Id0, "(lam y [1] y[1])").member);
        assert!(member(ExampleType::Id1, "(lam y [1] y[1])").member);
        assert!(!member(ExampleType::Id0, "(lam y [] (app y[] y[]))").member);
    }

    #[test]
    fn self_application() {
        assert!(member(ExampleType::D, "(lam y [] (app y[] y[]))").member);
        assert!(!member(ExampleType::D, "(lam y [] y[])").member);
    }

    #[test]
    fn numerals() {
        let two = member(ExampleType::Nat0, "(lam f [] (lam y [] (app f[] (app f[] y[]))))");
        assert!(two.member);
        assert_eq!(two.count, Some(2));
        assert!(member(ExampleType::Nat0, "(lam f [] f[])").member);
        let zero = member(ExampleType::Nat0, "(lam f [] (lam y [] y[]))");
        assert!(zero.member);
        assert!(member(ExampleType::Nat0, "(lam y [] (lam y [] y[]))").member);
        assert_eq!(zero.count, Some(0));
        assert!(!member(ExampleType::Nat0, "(lam f [] (lam y [] (app y[] f[])))").member);
        assert!(member(ExampleType::Nat1, "(lam f [1] (lam y [1] (app f[1] y[1])))").member);
        assert!(member(ExampleType::NatP0, "(lam f [] (lam y [1] (app f[] y[1])))").member);
        assert!(!member(ExampleType::NatP0, "(lam f [] (lam y [] (app f[] y[])))").member);
    }

    #[test]
    fn divergence_is_a_definite_no() {
        let omega = "(app (lam x [] (app x[] x[])) (lam x [] (app x[] x[])))";
        let v = member(ExampleType::Id0, omega);
        assert!(!v.member && !v.undecided, "{v:?}");
        let v = oracle_membership(ExampleType::Id0, &parse_term("(app (lam y [] y[]) (lam z [] z[]))").unwrap(), 0);
        assert!(v.undecided);
    }

    #[test]
    fn open_and_wrong_degree() {
        assert!(!member(ExampleType::Id0, "x[]").member);
        assert!(!member(ExampleType::Id1, "(lam y [] y[])").member);
    }

    #[test]
    fn small_completeness() {
        let rep = completeness_sample(ExampleType::Id0, 5, 2000);
        assert!(rep.ok());
        assert!(rep.members >= 2, "{rep:?}");
        assert_eq!(rep.found, rep.members);
    }

    #[test]
    fn saturation_small() {
        let sample = closed_sample(6);
        let ids: Vec<Term> = sample.iter().filter(|m| oracle_membership(ExampleType::Id0, m, 100).member).cloned().collect();
        assert!(saturation_check(&ids, &sample, Relation::Beta, 3).ok());
        assert!(saturation_check(&[], &sample, Relation::Beta, 3).ok());
    }
}
