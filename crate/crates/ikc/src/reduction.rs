use crate::error::{Error, Result};
use crate::term::{alpha_canonical, alpha_eq, substitute_with, Dir, Fresh, Path, Term};
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Beta,
    Eta,
    BetaEta,
    H,
}

impl Relation {
    pub const ALL: [Relation; 4] = [Relation::Beta, Relation::Eta, Relation::BetaEta, Relation::H];

    fn has_beta(self) -> bool {
        matches!(self, Relation::Beta | Relation::BetaEta)
    }

    fn has_eta(self) -> bool {
        matches!(self, Relation::Eta | Relation::BetaEta)
    }
}

impl FromStr for Relation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "beta" => Ok(Relation::Beta),
            "eta" => Ok(Relation::Eta),
            "betaeta" => Ok(Relation::BetaEta),
            "h" => Ok(Relation::H),
            _ => Err(Error::Syntax { pos: 0, msg: format!("unknown relation `{s}`") }),
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Beta => "beta",
            Relation::Eta => "eta",
            Relation::BetaEta => "betaeta",
            Relation::H => "h",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RedexKind {
    Beta,
    Eta,
}

/// A redex occurrence: its position and which rule contracts it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Redex {
    pub path: Path,
    pub kind: RedexKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReductionOutcome {
    NormalForm(Term),
    FuelExhausted { last: Term, steps: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Equivalence {
    Equivalent,
    Distinct,
    Unknown,
}

pub fn is_beta_redex(m: &Term) -> bool {
    match m {
        Term::App(f, a) => match &**f {
            Term::Abs(k, _) => a.degree() == k.idx,
            _ => false,
        },
        _ => false,
    }
}

pub fn is_eta_redex(m: &Term) -> bool {
    match m {
        Term::Abs(k, body) => match &**body {
            Term::App(p, x) => matches!(&**x, Term::Var(v) if v == k) && !p.occurs_free(k),
            _ => false,
        },
        _ => false,
    }
}

/// All redexes of `m` for `r`, in leftmost-outermost order.
pub fn redexes(m: &Term, r: Relation) -> Vec<Redex> {
    let mut out = Vec::new();
    if r == Relation::H {
        if let Some(p) = head_redex(m) {
            out.push(Redex { path: p, kind: RedexKind::Beta });
        }
        return out;
    }
    let mut path = Vec::new();
    collect_redexes(m, r, &mut path, &mut out, false);
    out
}

fn collect_redexes(m: &Term, r: Relation, path: &mut Path, out: &mut Vec<Redex>, first: bool) -> bool {
    match m {
        Term::App(f, a) => {
            if r.has_beta() && is_beta_redex(m) {
                out.push(Redex { path: path.clone(), kind: RedexKind::Beta });
                if first {
                    return true;
                }
            }
            path.push(Dir::Fun);
            let stop = collect_redexes(f, r, path, out, first);
            path.pop();
            if stop {
                return true;
            }
            path.push(Dir::Arg);
            let stop = collect_redexes(a, r, path, out, first);
            path.pop();
            stop
        }
        Term::Abs(_, b) => {
            if r.has_eta() && is_eta_redex(m) {
                out.push(Redex { path: path.clone(), kind: RedexKind::Eta });
                if first {
                    return true;
                }
            }
            path.push(Dir::Body);
            let stop = collect_redexes(b, r, path, out, first);
            path.pop();
            stop
        }
        Term::Var(_) => false,
    }
}

/// Position of the head redex `(λx.M) N N1 … Nn`, if it fires.
pub fn head_redex(m: &Term) -> Option<Path> {
    let mut t = m;
    let mut depth = 0usize;
    while let Term::App(f, _) = t {
        if let Term::Abs(..) = &**f {
            return if is_beta_redex(t) { Some(vec![Dir::Fun; depth]) } else { None };
        }
        t = f;
        depth += 1;
    }
    None
}

/// The leftmost-outermost redex.
pub fn first_redex(m: &Term, r: Relation) -> Option<Redex> {
    if r == Relation::H {
        return head_redex(m).map(|p| Redex { path: p, kind: RedexKind::Beta });
    }
    let mut out = Vec::new();
    let mut path = Vec::new();
    collect_redexes(m, r, &mut path, &mut out, true);
    out.pop()
}

/// Contracts the redex at `rx`.
pub fn contract(m: &Term, rx: &Redex) -> Result<Term> {
    let sub = m
        .subterm(&rx.path)
        .ok_or_else(|| Error::NotAReduct(format!("no subterm at {:?}", rx.path)))?;
    let new = match rx.kind {
        RedexKind::Beta => {
            if !is_beta_redex(sub) {
                return Err(Error::NotAReduct(format!("{sub} is not a beta redex")));
            }
            let (Term::App(f, a), true) = (sub, true) else { unreachable!() };
            let Term::Abs(k, body) = &**f else { unreachable!() };
            let mut fresh = Fresh::new(Default::default());
            fresh.avoid_term(m);
            substitute_with(body, &[(k.clone(), (**a).clone())], &mut fresh)?
        }
        RedexKind::Eta => {
            if !is_eta_redex(sub) {
                return Err(Error::NotAReduct(format!("{sub} is not an eta redex")));
            }
            let Term::Abs(_, body) = sub else { unreachable!() };
            let Term::App(p, _) = &**body else { unreachable!() };
            (**p).clone()
        }
    };
    Ok(m.replace_at(&rx.path, new).expect("path checked above"))
}

/// Every one-step reduct with the redex that produced it, deduplicated up to alpha.
pub fn step_with_redexes(m: &Term, r: Relation) -> Vec<(Redex, Term)> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for rx in redexes(m, r) {
        let n = contract(m, &rx).expect("enumerated redex contracts");
        if seen.insert(alpha_canonical(&n)) {
            out.push((rx, n));
        }
    }
    out
}

pub fn step(m: &Term, r: Relation) -> Vec<Term> {
    step_with_redexes(m, r).into_iter().map(|(_, n)| n).collect()
}

/// Every single step at every position, without deduplication.
pub fn all_steps(m: &Term, r: Relation) -> Vec<(Redex, Term)> {
    redexes(m, r)
        .into_iter()
        .map(|rx| {
            let n = contract(m, &rx).expect("enumerated redex contracts");
            (rx, n)
        })
        .collect()
}

/// Leftmost-outermost normalization; `fuel` bounds the number of steps.
pub fn normalize(m: &Term, r: Relation, fuel: usize) -> ReductionOutcome {
    let mut t = m.clone();
    let mut steps = 0;
    while let Some(rx) = first_redex(&t, r) {
        if steps == fuel {
            return ReductionOutcome::FuelExhausted { last: t, steps };
        }
        t = contract(&t, &rx).expect("first redex contracts");
        steps += 1;
    }
    ReductionOutcome::NormalForm(t)
}

/// Joint breadth-first search for a common reduct; `fuel` bounds expanded nodes.
pub fn equiv(m: &Term, n: &Term, r: Relation, fuel: usize) -> Equivalence {
    if alpha_eq(m, n) {
        return Equivalence::Equivalent;
    }
    let mut sides = [BfsSide::new(m), BfsSide::new(n)];
    let mut budget = fuel;
    loop {
        let mut progressed = false;
        for s in 0..2 {
            if budget == 0 {
                break;
            }
            if sides[s].expand_level(r, &mut budget) {
                progressed = true;
            }
            let (a, b) = if s == 0 { (&sides[0], &sides[1]) } else { (&sides[1], &sides[0]) };
            if a.seen.keys().any(|k| b.seen.contains_key(k)) {
                return Equivalence::Equivalent;
            }
        }
        if !progressed || budget == 0 {
            break;
        }
    }
    match (normalize(m, r, fuel), normalize(n, r, fuel)) {
        (ReductionOutcome::NormalForm(a), ReductionOutcome::NormalForm(b)) => {
            if alpha_eq(&a, &b) {
                Equivalence::Equivalent
            } else {
                Equivalence::Distinct
            }
        }
        _ => Equivalence::Unknown,
    }
}

struct BfsSide {
    seen: HashMap<Term, ()>,
    frontier: Vec<Term>,
}

impl BfsSide {
    fn new(m: &Term) -> Self {
        let mut seen = HashMap::new();
        seen.insert(alpha_canonical(m), ());
        BfsSide { seen, frontier: vec![m.clone()] }
    }

    fn expand_level(&mut self, r: Relation, budget: &mut usize) -> bool {
        let mut next = Vec::new();
        let frontier = std::mem::take(&mut self.frontier);
        let mut any = false;
        for (i, t) in frontier.iter().enumerate() {
            if *budget == 0 {
                next.extend(frontier[i..].iter().cloned());
                break;
            }
            *budget -= 1;
            for n in step(t, r) {
                let key = alpha_canonical(&n);
                if self.seen.insert(key, ()).is_none() {
                    next.push(n);
                    any = true;
                }
            }
        }
        self.frontier = next;
        any
    }
}

/// Shortest redex sequence from `m` to a term alpha-equal to `n`, exploring at most `fuel` terms.
pub fn find_reduction(m: &Term, n: &Term, r: Relation, fuel: usize) -> Option<Vec<Redex>> {
    let target = alpha_canonical(n);
    let start = alpha_canonical(m);
    if start == target {
        return Some(Vec::new());
    }
    let mut parent: HashMap<Term, (Term, Redex)> = HashMap::new();
    let mut seen = HashSet::new();
    seen.insert(start.clone());
    let mut queue = VecDeque::new();
    queue.push_back((m.clone(), start));
    let mut explored = 0;
    while let Some((t, key)) = queue.pop_front() {
        if explored >= fuel {
            return None;
        }
        explored += 1;
        for (rx, u) in all_steps(&t, r) {
            let uk = alpha_canonical(&u);
            if !seen.insert(uk.clone()) {
                continue;
            }
            parent.insert(uk.clone(), (key.clone(), rx));
            if uk == target {
                let mut path = Vec::new();
                let mut cur = uk;
                while let Some((p, rx)) = parent.get(&cur) {
                    path.push(rx.clone());
                    cur = p.clone();
                }
                path.reverse();
                return Some(path);
            }
            queue.push_back((u, uk));
        }
    }
    None
}

/// Outcome of a bounded local-confluence check.
#[derive(Clone, Debug, Default)]
pub struct ConfluenceReport {
    pub nodes: usize,
    pub peaks: usize,
    pub unjoined: Vec<(Term, Term, Term)>,
}

impl ConfluenceReport {
    pub fn ok(&self) -> bool {
        self.unjoined.is_empty()
    }
}

/// Extra steps allowed on each side of a peak beyond the exploration depth.
pub const JOIN_MARGIN: usize = 4;

/// Checks every peak reachable within `depth` steps of `m`.
pub fn check_local_confluence(m: &Term, r: Relation, depth: usize) -> ConfluenceReport {
    let mut report = ConfluenceReport::default();
    let mut seen = HashSet::new();
    seen.insert(alpha_canonical(m));
    let mut frontier = vec![m.clone()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for p in &frontier {
            report.nodes += 1;
            let succ = step(p, r);
            for i in 0..succ.len() {
                for j in i + 1..succ.len() {
                    report.peaks += 1;
                    if !joins(&succ[i], &succ[j], r, depth + JOIN_MARGIN) {
                        report.unjoined.push((p.clone(), succ[i].clone(), succ[j].clone()));
                    }
                }
            }
            for n in succ {
                if seen.insert(alpha_canonical(&n)) {
                    next.push(n);
                }
            }
        }
        frontier = next;
    }
    report
}

/// Whether `a` and `b` have a common reduct within `k` steps each.
pub fn joins(a: &Term, b: &Term, r: Relation, k: usize) -> bool {
    if let (ReductionOutcome::NormalForm(x), ReductionOutcome::NormalForm(y)) =
        (normalize(a, r, 64), normalize(b, r, 64))
    {
        if alpha_eq(&x, &y) {
            return true;
        }
    }
    let ra = reducts_within(a, r, k);
    let rb = reducts_within(b, r, k);
    ra.iter().any(|t| rb.contains(t))
}

/// Alpha-canonical forms of every term reachable in at most `k` steps.
pub fn reducts_within(m: &Term, r: Relation, k: usize) -> HashSet<Term> {
    let mut seen = HashSet::new();
    seen.insert(alpha_canonical(m));
    let mut frontier = vec![m.clone()];
    for _ in 0..k {
        let mut next = Vec::new();
        for t in &frontier {
            for n in step(t, r) {
                if seen.insert(alpha_canonical(&n)) {
                    next.push(n);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_term;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn step_examples() {
        let m = t("(app (lam y [] y[]) (lam z [] z[]))");
        let s = step(&m, Relation::Beta);
        assert_eq!(s.len(), 1);
        assert!(alpha_eq(&s[0], &t("(lam z [] z[])")));

        let m = t("(lam x [] (app (lam y [] y[]) x[]))");
        let s = step(&m, Relation::Eta);
        assert_eq!(s.len(), 1);
        assert!(alpha_eq(&s[0], &t("(lam y [] y[])")));
        assert_eq!(step(&m, Relation::BetaEta).len(), 1);
        assert_eq!(redexes(&m, Relation::BetaEta).len(), 2);
    }

    #[test]
    fn degree_mismatch_is_not_a_redex() {
        let m = t("(app (lam x [1] y[]) z[2])");
        assert!(step(&m, Relation::Beta).is_empty());
    }

    #[test]
    fn normalize_examples() {
        let two = t("(lam f [] (lam y [] (app f[] (app f[] y[]))))");
        assert_eq!(normalize(&two, Relation::Beta, 10), ReductionOutcome::NormalForm(two.clone()));
        let m = t("(app (lam y [] y[]) (lam z [] z[]))");
        assert_eq!(normalize(&m, Relation::Beta, 10), ReductionOutcome::NormalForm(t("(lam z [] z[])")));
        let w = t("(app (lam x [] (app x[] x[])) (lam x [] (app x[] x[])))");
        assert!(matches!(normalize(&w, Relation::Beta, 100), ReductionOutcome::FuelExhausted { steps: 100, .. }));
    }

    #[test]
    fn equiv_examples() {
        let a = t("(app (lam y [] y[]) (lam z [] z[]))");
        assert_eq!(equiv(&a, &t("(lam w [] w[])"), Relation::Beta, 10), Equivalence::Equivalent);
        let b = t("(lam y [] (lam x [] (app y[] x[])))");
        assert_eq!(equiv(&b, &t("(lam y [] y[])"), Relation::Eta, 10), Equivalence::Equivalent);
        let c = t("(lam y [] (app y[] y[]))");
        assert_eq!(equiv(&t("(lam y [] y[])"), &c, Relation::Beta, 10), Equivalence::Distinct);
    }

    #[test]
    fn head_reduction_is_head_only() {
        let m = t("(app (app (lam x [] x[]) (lam y [] y[])) (app (lam z [] z[]) w[]))");
        let rs = redexes(&m, Relation::H);
        assert_eq!(rs.len(), 1);
        assert_eq!(rs[0].path, vec![Dir::Fun]);
        assert!(redexes(&t("(lam x [] (app (lam y [] y[]) x[]))"), Relation::H).is_empty());
    }

    #[test]
    fn confluence_examples() {
        let m = t("(app (lam y [] (app y[] y[])) (app (lam z [] z[]) w[]))");
        let rep = check_local_confluence(&m, Relation::Beta, 3);
        assert!(rep.ok() && rep.peaks >= 1);
        let rep = check_local_confluence(&t("(lam y [] y[])"), Relation::Beta, 3);
        assert!(rep.ok() && rep.peaks == 0);
        let m = t("(lam x [] (app (lam y [] y[]) x[]))");
        let rep = check_local_confluence(&m, Relation::BetaEta, 3);
        assert!(rep.ok());
    }

    #[test]
    fn find_reduction_replays() {
        let m = t("(app (lam x [] (app x[] x[])) (app (lam y [] y[]) (lam z [] z[])))");
        let n = t("(lam z [] z[])");
        let path = find_reduction(&m, &n, Relation::Beta, 100).unwrap();
        let mut cur = m.clone();
        for rx in &path {
            cur = contract(&cur, rx).unwrap();
        }
        assert!(alpha_eq(&cur, &n));
    }
}
