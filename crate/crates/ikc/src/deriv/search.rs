use super::check::{ax_macro, check_derivation};
use super::expand::expand_step;
use super::Derivation;
use crate::env::{env_lower, env_ok, env_restrict, Env, Judgment};
use crate::reduction::head_redex;
use crate::reduction::{contract, Redex, RedexKind};
use crate::term::{lower_seq, Term};
use crate::types::{lower_type, subtype, subtype_t, CanonT, CanonType};

/// Outcome of a bounded derivation search.
#[derive(Clone, Debug)]
pub enum SearchResult {
    Found(Derivation),
    /// A generation argument shows the judgment underivable; the string says why.
    Refuted(String),
    Unknown,
}

impl SearchResult {
    pub fn label(&self) -> &'static str {
        match self {
            SearchResult::Found(_) => "Found",
            SearchResult::Refuted(_) => "RefutedByGeneration",
            SearchResult::Unknown => "Unknown",
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, SearchResult::Found(_))
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, SearchResult::Refuted(_))
    }
}

use SearchResult::{Found, Refuted, Unknown};

/// Searches for a derivation of `m : ⟨g ⊢ u⟩`, visiting at most `fuel` goals.
pub fn bounded_typecheck(m: &Term, g: &Env, u: &CanonType, fuel: usize) -> SearchResult {
    let mut fuel = fuel;
    let r = search(m, g, u, &mut fuel);
    if let Found(d) = &r {
        let got = check_derivation(d).expect("search builds checkable derivations");
        assert!(
            got.same_as(&Judgment::new(m.clone(), g.clone(), u.clone())),
            "search concluded {got} for goal {m} : {g} |- {u}"
        );
    }
    r
}

fn search(m: &Term, g: &Env, u: &CanonType, fuel: &mut usize) -> SearchResult {
    // head reduction can nest as deep as the fuel allows
    stacker::maybe_grow(128 * 1024, 4 * 1024 * 1024, || search_goal(m, g, u, fuel))
}

fn search_goal(m: &Term, g: &Env, u: &CanonType, fuel: &mut usize) -> SearchResult {
    if *fuel == 0 {
        return Unknown;
    }
    *fuel -= 1;
    if !env_ok(g) {
        return Refuted(format!("environment {g} binds a variable at a type of another degree"));
    }
    if g.domain() != m.free_vars() {
        return Refuted(format!("environment {g} does not bind exactly the free variables of {m}"));
    }
    if *u.degree() != m.degree() {
        return Refuted(format!("type {u} has degree {} but {m} has degree {}", u.degree(), m.degree()));
    }
    if u.is_omega() {
        return Found(omega_at(m, g, u));
    }
    if !u.prefix.is_empty() {
        let k = &u.prefix;
        let (mk, gk, uk) = match (lower_seq(m, k), env_lower(g, k), lower_type(u, k)) {
            (Ok(a), Ok(b), Ok(c)) => (a, b, c),
            _ => return Refuted(format!("{m} cannot be lowered by {k}")),
        };
        return match search(&mk, &gk, &uk, fuel) {
            Found(d) => Found(Derivation::exp_seq(k, d)),
            other => other,
        };
    }
    if u.comps.len() > 1 {
        let mut parts = Vec::new();
        for t in &u.comps {
            match search(m, g, &CanonType::single(t.clone()), fuel) {
                Found(d) => parts.push(d),
                other => return other,
            }
        }
        let mut it = parts.into_iter();
        let first = it.next().expect("several components");
        return Found(it.fold(first, Derivation::inter_i));
    }
    let t = u.as_t().expect("single component").clone();
    search_t(m, g, &t, fuel)
}

fn omega_at(m: &Term, g: &Env, u: &CanonType) -> Derivation {
    let d = Derivation::Omega(m.clone());
    if g.iter().all(|(_, v)| v.is_omega()) {
        d
    } else {
        Derivation::sub(d, g.clone(), u.clone())
    }
}

fn sub_if(d: Derivation, from: &Judgment, g: &Env, u: &CanonType) -> Derivation {
    if from.env == *g && from.typ == *u {
        d
    } else {
        Derivation::sub(d, g.clone(), u.clone())
    }
}

fn search_t(m: &Term, g: &Env, t: &CanonT, fuel: &mut usize) -> SearchResult {
    let goal = CanonType::single(t.clone());
    match m {
        Term::Var(x) => {
            let v = g.get(x).expect("domain checked");
            if subtype(v, &goal) {
                let d = ax_macro(&x.name, v);
                let j = Judgment::new(m.clone(), g.clone(), v.clone());
                Found(sub_if(d, &j, g, &goal))
            } else {
                Refuted(format!("{x} has type {v} which is not below {t}"))
            }
        }
        Term::Abs(x, body) => {
            let Some((w, t2)) = t.as_arrow() else {
                return Refuted(format!("an abstraction cannot have atomic type {t}"));
            };
            if *w.degree() != x.idx {
                return Refuted(format!("domain {w} does not have the binder's degree {}", x.idx));
            }
            let t2ty = CanonType::single(t2.clone());
            if body.occurs_free(x) {
                match search(body, &g.with(x.clone(), w.clone()), &t2ty, fuel) {
                    Found(p) => Found(Derivation::arr_i(x.name.clone(), x.idx.clone(), w.clone(), p)),
                    other => other,
                }
            } else {
                match search(body, g, &t2ty, fuel) {
                    Found(p) => {
                        let d = Derivation::arr_iw(x.name.clone(), x.idx.clone(), p);
                        if w.is_omega() {
                            Found(d)
                        } else {
                            Found(Derivation::sub(d, g.clone(), goal))
                        }
                    }
                    other => other,
                }
            }
        }
        Term::App(..) => search_app(m, g, t, fuel),
    }
}

fn spine(m: &Term) -> (&Term, Vec<&Term>) {
    let mut args = Vec::new();
    let mut h = m;
    while let Term::App(f, a) = h {
        args.push(&**a);
        h = f;
    }
    args.reverse();
    (h, args)
}

/// Splits `c` into `n` argument types and a result, if it has that many arrows.
fn arrow_chain(c: &CanonT, n: usize) -> Option<(Vec<CanonType>, CanonT)> {
    let mut args = Vec::with_capacity(n);
    let mut cur = c;
    for _ in 0..n {
        let (a, r) = cur.as_arrow()?;
        args.push(a.clone());
        cur = r;
    }
    Some((args, cur.clone()))
}

fn search_app(m: &Term, g: &Env, t: &CanonT, fuel: &mut usize) -> SearchResult {
    let goal = CanonType::single(t.clone());
    let (head, args) = spine(m);
    match head {
        Term::Var(x) => {
            let vx = g.get(x).expect("domain checked").clone();
            let mut unknown = false;
            'cand: for c in &vx.comps {
                let Some((ys, r)) = arrow_chain(c, args.len()) else { continue };
                if !subtype_t(&r, t) {
                    continue;
                }
                let mut ds = Vec::with_capacity(args.len());
                for (a, y) in args.iter().zip(&ys) {
                    let ga = env_restrict(g, &a.free_vars()).expect("argument variables are bound");
                    match search(a, &ga, y, fuel) {
                        Found(d) => ds.push(d),
                        Refuted(_) => continue 'cand,
                        Unknown => {
                            unknown = true;
                            continue 'cand;
                        }
                    }
                }
                let cty = CanonType::single(c.clone());
                let gx = Env::singleton(x.clone(), vx.clone());
                let mut acc = ax_macro(&x.name, &vx);
                if vx != cty {
                    acc = Derivation::sub(acc, gx, cty);
                }
                for d in ds {
                    acc = Derivation::arr_e(acc, d);
                }
                let r_ty = CanonType::single(r.clone());
                let j = Judgment::new(m.clone(), g.clone(), r_ty);
                return Found(sub_if(acc, &j, g, &goal));
            }
            if unknown {
                Unknown
            } else {
                Refuted(format!("no component of {x} : {vx} applies to {} arguments with result below {t}", args.len()))
            }
        }
        Term::Abs(x, _) => {
            if args[0].degree() != x.idx {
                return Refuted(format!("argument degree {} differs from binder {x}", args[0].degree()));
            }
            let path = head_redex(m).expect("head is a redex");
            let n = contract(m, &Redex { path: path.clone(), kind: RedexKind::Beta }).expect("head redex contracts");
            let gn = env_restrict(g, &n.free_vars()).expect("reduction does not add variables");
            match search(&n, &gn, &goal, fuel) {
                Found(dn) => match expand_step(&dn, m, &path) {
                    Ok(dm) => {
                        let j = check_derivation(&dm).expect("expansion checks");
                        Found(sub_if(dm, &j, g, &goal))
                    }
                    Err(_) => Unknown,
                },
                Refuted(why) => Refuted(format!("head reduct refuted: {why}")),
                Unknown => Unknown,
            }
        }
        Term::App(..) => unreachable!("spine head is not an application"),
    }
}
