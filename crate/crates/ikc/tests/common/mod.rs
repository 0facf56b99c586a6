#![allow(dead_code)]

use ikc::deriv::{check_derivation, parse_derivation, CheckedJudgment, Derivation};
use ikc::index::{prefix_leq, Index};
use ikc::reduction::{step, Relation};
use ikc::term::{alpha_eq, Dir, Term, VarKey, VarSet};
use ikc::types::{expand_type, inter, lower_type, CanonType};
use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::Arc;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// Every `.drv` file of the corpus with its checked conclusion, sorted by file name.
pub fn corpus() -> Vec<(String, Derivation, CheckedJudgment)> {
    let mut files: Vec<_> = std::fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "drv"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            let d = parse_derivation(&std::fs::read_to_string(&p).unwrap()).unwrap_or_else(|e| panic!("{name}: {e}"));
            let cj = CheckedJudgment::new(d.clone()).unwrap_or_else(|e| panic!("{name}: {e}"));
            (name, d, cj)
        })
        .collect()
}

// Degree and free variables recomputed from the definitions, without the library's helpers.

pub fn degree(m: &Term) -> Index {
    match m {
        Term::Var(k) => k.idx.clone(),
        Term::Abs(_, b) => degree(b),
        Term::App(f, _) => degree(f),
    }
}

pub fn free(m: &Term) -> VarSet {
    match m {
        Term::Var(k) => [k.clone()].into_iter().collect(),
        Term::Abs(k, b) => {
            let mut s = free(b);
            s.remove(k);
            s
        }
        Term::App(f, a) => {
            let mut s = free(f);
            s.extend(free(a));
            s
        }
    }
}

pub fn paths(m: &Term) -> Vec<Vec<Dir>> {
    let mut out = vec![vec![]];
    match m {
        Term::Var(_) => {}
        Term::Abs(_, b) => out.extend(paths(b).into_iter().map(|p| [vec![Dir::Body], p].concat())),
        Term::App(f, a) => {
            out.extend(paths(f).into_iter().map(|p| [vec![Dir::Fun], p].concat()));
            out.extend(paths(a).into_iter().map(|p| [vec![Dir::Arg], p].concat()));
        }
    }
    out
}

pub fn replace(m: &Term, path: &[Dir], new: &Term) -> Term {
    match (path.split_first(), m) {
        (None, _) => new.clone(),
        (Some((Dir::Body, rest)), Term::Abs(k, b)) => Term::Abs(k.clone(), Arc::new(replace(b, rest, new))),
        (Some((Dir::Fun, rest)), Term::App(f, a)) => Term::App(Arc::new(replace(f, rest, new)), a.clone()),
        (Some((Dir::Arg, rest)), Term::App(f, a)) => Term::App(f.clone(), Arc::new(replace(a, rest, new))),
        _ => panic!("bad path"),
    }
}

fn rename_var(m: &Term, from: &VarKey, to: &VarKey) -> Term {
    match m {
        Term::Var(k) if k == from => Term::Var(to.clone()),
        Term::Var(_) => m.clone(),
        Term::Abs(k, _) if k == from => m.clone(),
        Term::Abs(k, b) => Term::Abs(k.clone(), Arc::new(rename_var(b, from, to))),
        Term::App(f, a) => Term::App(Arc::new(rename_var(f, from, to)), Arc::new(rename_var(a, from, to))),
    }
}

fn key(n: &str, l: &Index) -> VarKey {
    VarKey::new(n, l.clone())
}

fn abs(k: VarKey, b: Term) -> Term {
    Term::Abs(k, Arc::new(b))
}

fn app(f: Term, a: Term) -> Term {
    Term::App(Arc::new(f), Arc::new(a))
}

/// Single beta-expansions of `n`: at every position, an identity redex, a vacuous
/// redex with a fresh free argument, a vacuous redex with a closed argument, and the
/// abstraction of each free variable of the subterm. Only candidates that are well
/// formed and reduce to `n` in one beta step are kept.
pub fn beta_expansions(n: &Term) -> Vec<Term> {
    let mut out = Vec::new();
    for p in paths(n) {
        let sub = n.subterm(&p).unwrap().clone();
        let l = degree(&sub);
        let mut cands = vec![
            app(abs(key("ez", &l), Term::Var(key("ez", &l))), sub.clone()),
            app(abs(key("ez", &l), sub.clone()), Term::Var(key("ew", &l))),
            app(abs(key("ez", &l), sub.clone()), abs(key("ev", &l), Term::Var(key("ev", &l)))),
        ];
        for x in free(&sub) {
            let z = key("ez", &x.idx);
            cands.push(app(abs(z.clone(), rename_var(&sub, &x, &z)), Term::Var(x.clone())));
        }
        for c in cands {
            let m = replace(n, &p, &c);
            if m.check_well_formed().is_ok() && step(&m, Relation::Beta).iter().any(|r| alpha_eq(r, n)) {
                out.push(m);
            }
        }
    }
    out
}

/// Brute-force subtyping: pairs derivable by the subtyping rules with derivation
/// height at most `height`, every intermediate type drawn from `universe`.
pub struct RuleOracle {
    pub universe: Vec<CanonType>,
    derivable: Vec<Vec<bool>>,
}

impl RuleOracle {
    pub fn new(universe: Vec<CanonType>, height: usize) -> Self {
        let n = universe.len();
        let pos: HashMap<CanonType, usize> = universe.iter().cloned().enumerate().map(|(i, u)| (u, i)).collect();
        let at = |u: &CanonType| pos.get(u).copied();
        // meet table, defined when both sides share a degree and the result is in the universe
        let meet: Vec<Vec<Option<usize>>> = universe
            .iter()
            .map(|u| universe.iter().map(|v| inter(u, v).ok().and_then(|w| at(&w))).collect())
            .collect();
        let arrow: Vec<Option<(usize, usize)>> = universe
            .iter()
            .map(|u| {
                let t = u.as_t()?;
                let (dom, cod) = t.as_arrow()?;
                Some((at(dom)?, at(&CanonType::single(cod.clone()))?))
            })
            .collect();
        // (i, inner) when the type is e_i applied to a universe member
        let exp_of: Vec<Vec<(u32, usize)>> = universe
            .iter()
            .map(|u| {
                let mut v = Vec::new();
                if let Some(i) = u.prefix.first() {
                    if let Some(j) = lower_type(u, &Index::single(i)).ok().and_then(|w| at(&w)) {
                        debug_assert_eq!(expand_type(i, &universe[j]), *u);
                        v.push((i, j));
                    }
                }
                v
            })
            .collect();

        let mut d = vec![vec![false; n]; n];
        for h in 1..=height {
            let prev = d.clone();
            for x in 0..n {
                // (ref)
                d[x][x] = true;
                // (⊓E): x = y ⊓ z
                for y in 0..n {
                    if (0..n).any(|z| meet[y][z] == Some(x)) {
                        d[x][y] = true;
                    }
                }
            }
            if h == 1 {
                continue;
            }
            // (→)
            for x in 0..n {
                let Some((u1, t1)) = arrow[x] else { continue };
                for y in 0..n {
                    let Some((u2, t2)) = arrow[y] else { continue };
                    if prev[u2][u1] && prev[t1][t2] {
                        d[x][y] = true;
                    }
                }
            }
            // (⊑e)
            for x in 0..n {
                for &(i, x1) in &exp_of[x] {
                    for y in 0..n {
                        for &(k, y1) in &exp_of[y] {
                            if i == k && prev[x1][y1] {
                                d[x][y] = true;
                            }
                        }
                    }
                }
            }
            // (⊓)
            let pairs: Vec<(usize, usize)> =
                (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|&(a, b)| prev[a][b]).collect();
            for &(x1, y1) in &pairs {
                for &(x2, y2) in &pairs {
                    if let (Some(x), Some(y)) = (meet[x1][x2], meet[y1][y2]) {
                        d[x][y] = true;
                    }
                }
            }
            // (tr)
            for x in 0..n {
                for z in 0..n {
                    if !prev[x][z] {
                        continue;
                    }
                    for y in 0..n {
                        if prev[z][y] {
                            d[x][y] = true;
                        }
                    }
                }
            }
        }
        RuleOracle { universe, derivable: d }
    }

    pub fn holds(&self, i: usize, j: usize) -> bool {
        self.derivable[i][j]
    }
}

pub fn prefix_ok(a: &Index, b: &Index) -> bool {
    prefix_leq(a, b)
}

pub fn conclusion(d: &Derivation) -> ikc::Judgment {
    check_derivation(d).expect("checks")
}
