use super::check::{ax_macro, check_derivation, elaborate, inter_macro, subject_of};
use super::transform::{lower_derivation, rename_free};
use super::Derivation;
use crate::env::{env_enlarge, env_lower, env_restrict, Judgment};
use crate::error::{Error, Result};
use crate::reduction::{contract, find_reduction, Relation};
use crate::term::{alpha_eq, lower, lower_seq, substitute, Dir, Fresh, Name, Term, VarKey};
use crate::types::{expand_type, inter, CanonType};
use std::collections::HashSet;

/// Transports a derivation of `N : ⟨Γ ⊢ U⟩` back along `m ▷*_β N` to `m : ⟨Γ↑^m ⊢ U⟩`.
pub fn subject_expand_beta(dn: &Derivation, m: &Term, fuel: usize) -> Result<Derivation> {
    let dn = elaborate(dn)?;
    let jn = check_derivation(&dn)?;
    if alpha_eq(&jn.subject, m) {
        return Ok(dn);
    }
    let steps = find_reduction(m, &jn.subject, Relation::Beta, fuel)
        .ok_or_else(|| Error::NotAnExpansion(format!("{m} does not beta-reduce to {} within fuel {fuel}", jn.subject)))?;
    let mut terms = vec![m.clone()];
    for rx in &steps {
        let next = contract(terms.last().expect("non-empty"), rx)?;
        terms.push(next);
    }
    let mut d = dn;
    for (rx, t) in steps.iter().zip(&terms).rev() {
        d = expand_step(&d, t, &rx.path)?;
        let expect = Judgment::new(t.clone(), env_enlarge(&jn.env, &t.free_vars())?, jn.typ.clone());
        let got = check_derivation(&d)?;
        if !got.same_as(&expect) {
            return Err(Error::rule("expansion", format!("produced {got}, expected {expect}")));
        }
    }
    Ok(d)
}

/// One backwards step: `d` derives the reduct of `m` at the beta redex under `path`.
pub(crate) fn expand_step(d: &Derivation, m: &Term, path: &[Dir]) -> Result<Derivation> {
    let mut fresh = Fresh::new(HashSet::new());
    fresh.avoid_term(m);
    fresh.avoid_term(&subject_of(d));
    betaexp(d, m, path, &mut fresh)
}

fn concl(d: &Derivation) -> Result<Judgment> {
    check_derivation(d)
}

fn rename_term_binder(m1: &Term, from: &VarKey, to: &Name) -> Result<Term> {
    substitute(m1, &[(from.clone(), Term::Var(VarKey::with_name(to.clone(), from.idx.clone())))])
}

/// Makes the derivation binder and the term binder the same fresh name when they differ.
fn align(
    y: &Name,
    p: &Derivation,
    zk: &VarKey,
    m1: &Term,
    fresh: &mut Fresh,
    force: bool,
) -> Result<(Name, Derivation, Term)> {
    if *y == zk.name && !force {
        return Ok((y.clone(), p.clone(), m1.clone()));
    }
    let w = fresh.fresh();
    let p2 = rename_free(p, &VarKey::with_name(y.clone(), zk.idx.clone()), &w)?;
    let m2 = rename_term_binder(m1, zk, &w)?;
    Ok((w, p2, m2))
}

fn betaexp(d: &Derivation, m: &Term, path: &[Dir], fresh: &mut Fresh) -> Result<Derivation> {
    let Some((dir, rest)) = path.split_first() else {
        return exp2(d, m, fresh);
    };
    match d {
        Derivation::Omega(_) => return Ok(Derivation::Omega(m.clone())),
        Derivation::InterI(a, b) => {
            return Ok(Derivation::inter_i(betaexp(a, m, path, fresh)?, betaexp(b, m, path, fresh)?))
        }
        Derivation::Exp(j, p) => return Ok(Derivation::exp(*j, betaexp(p, &lower(m, *j)?, path, fresh)?)),
        Derivation::Sub(p, gt, ut) => {
            let r = betaexp(p, m, path, fresh)?;
            return Ok(Derivation::sub(r, env_enlarge(gt, &m.free_vars())?, ut.clone()));
        }
        _ => {}
    }
    match (d, m, dir) {
        (Derivation::ArrI(y, l, u, p), Term::Abs(zk, m1), Dir::Body) => {
            let (y, p, m1) = align(y, p, zk, m1, fresh, false)?;
            Ok(Derivation::arr_i(y, l.clone(), u.clone(), betaexp(&p, &m1, rest, fresh)?))
        }
        (Derivation::ArrIW(y, l, p), Term::Abs(zk, m1), Dir::Body) => {
            let (y, p, m1) = align(y, p, zk, m1, fresh, false)?;
            let r = betaexp(&p, &m1, rest, fresh)?;
            let k = VarKey::with_name(y.clone(), l.clone());
            if concl(&r)?.env.contains(&k) {
                Ok(Derivation::arr_i(y, l.clone(), CanonType::omega(l.clone()), r))
            } else {
                Ok(Derivation::arr_iw(y, l.clone(), r))
            }
        }
        (Derivation::ArrE(a, b), Term::App(m1, _), Dir::Fun) => {
            Ok(Derivation::arr_e(betaexp(a, m1, rest, fresh)?, (**b).clone()))
        }
        (Derivation::ArrE(a, b), Term::App(_, m2), Dir::Arg) => {
            Ok(Derivation::arr_e((**a).clone(), betaexp(b, m2, rest, fresh)?))
        }
        _ => Err(Error::NotAnExpansion(format!(
            "{} does not match {m} along {dir:?}",
            d.rule_name()
        ))),
    }
}

/// Expansion at the redex itself.
fn exp2(d: &Derivation, m: &Term, fresh: &mut Fresh) -> Result<Derivation> {
    let Term::App(f, m2) = m else {
        return Err(Error::NotAnExpansion(format!("{m} is not a beta redex")));
    };
    let Term::Abs(xk, _) = &**f else {
        return Err(Error::NotAnExpansion(format!("{m} is not a beta redex")));
    };
    if m2.degree() != xk.idx {
        return Err(Error::NotAnExpansion(format!("{m} is not a beta redex")));
    }
    let jd = concl(d)?;
    if jd.typ.is_omega() {
        let g = env_enlarge(&jd.env, &m.free_vars())?;
        return Ok(Derivation::sub(Derivation::Omega(m.clone()), g, jd.typ));
    }
    let k = jd.typ.prefix.clone();
    let dk = lower_derivation(d, &k)?;
    let mk = lower_seq(m, &k)?;
    let Term::App(fk, m2k) = &mk else { unreachable!() };
    let Term::Abs(xk2, m1k) = &**fk else { unreachable!() };
    let comps: Vec<CanonType> = jd.typ.comps.iter().map(|t| CanonType::single(t.clone())).collect();
    let mut parts = Vec::new();
    if m1k.occurs_free(xk2) {
        let (v, dm1, dm2) = exp1(&dk, m1k, xk2, m2k, fresh)?;
        let j1 = concl(&dm1)?;
        for t in &comps {
            let s = if comps.len() == 1 { dm1.clone() } else { Derivation::sub(dm1.clone(), j1.env.clone(), t.clone()) };
            let arr = Derivation::arr_i(xk2.name.clone(), xk2.idx.clone(), v.clone(), s);
            parts.push(Derivation::arr_e(arr, dm2.clone()));
        }
    } else {
        let gk = env_lower(&jd.env, &k)?;
        for t in &comps {
            let s = if comps.len() == 1 { dk.clone() } else { Derivation::sub(dk.clone(), gk.clone(), t.clone()) };
            let arr = Derivation::arr_iw(xk2.name.clone(), xk2.idx.clone(), s);
            parts.push(Derivation::arr_e(arr, Derivation::Omega((**m2k).clone())));
        }
    }
    let mut it = parts.into_iter();
    let first = it.next().expect("non-omega type has a component");
    let folded = it.fold(first, Derivation::inter_i);
    Ok(Derivation::exp_seq(&k, folded))
}

/// Splits a derivation of `m[x:=n]` into derivations of `m : ⟨Γ1, x:V ⊢ U⟩`
/// and `n : ⟨Γ2 ⊢ V⟩` with `Γ1 ⊓ Γ2` the original environment.
fn exp1(
    d: &Derivation,
    m: &Term,
    x: &VarKey,
    n: &Term,
    fresh: &mut Fresh,
) -> Result<(CanonType, Derivation, Derivation)> {
    if let Term::Var(k) = m {
        if k == x {
            let v = concl(d)?.typ;
            return Ok((v.clone(), ax_macro(&x.name, &v), d.clone()));
        }
    }
    match d {
        Derivation::Omega(_) => Ok((
            CanonType::omega(x.idx.clone()),
            Derivation::Omega(m.clone()),
            Derivation::Omega(n.clone()),
        )),
        Derivation::InterI(a, b) => {
            let (v1, dm1, dn1) = exp1(a, m, x, n, fresh)?;
            let (v2, dm2, dn2) = exp1(b, m, x, n, fresh)?;
            Ok((inter(&v1, &v2)?, inter_macro(dm1, dm2)?, inter_macro(dn1, dn2)?))
        }
        Derivation::Exp(j, p) => {
            let x0 = VarKey::with_name(x.name.clone(), x.idx.tail().ok_or_else(|| Error::Degree(format!("{x} is empty")))?);
            let (v, dm, dn) = exp1(p, &lower(m, *j)?, &x0, &lower(n, *j)?, fresh)?;
            Ok((expand_type(*j, &v), Derivation::exp(*j, dm), Derivation::exp(*j, dn)))
        }
        Derivation::Sub(p, gt, ut) => {
            let (v, dm, dn) = exp1(p, m, x, n, fresh)?;
            let (jm, jn) = (concl(&dm)?, concl(&dn)?);
            let mut dom1 = jm.env.domain();
            dom1.remove(x);
            let g1 = env_restrict(gt, &dom1)?.with(x.clone(), v.clone());
            let g2 = env_restrict(gt, &jn.env.domain())?;
            Ok((v.clone(), Derivation::sub(dm, g1, ut.clone()), Derivation::sub(dn, g2, v)))
        }
        Derivation::ArrI(y, l, _, p) | Derivation::ArrIW(y, l, p) => {
            let Term::Abs(zk, m1) = m else {
                return Err(Error::NotAnExpansion(format!("{m} is not an abstraction")));
            };
            let clash = n.free_vars().iter().any(|k| k.name == zk.name);
            let (w, p, m1) = align(y, p, zk, m1, fresh, clash)?;
            let (v, dm1, dn) = exp1(&p, &m1, x, n, fresh)?;
            let dm = match d {
                Derivation::ArrI(_, _, u, _) => Derivation::arr_i(w, l.clone(), u.clone(), dm1),
                _ => Derivation::arr_iw(w, l.clone(), dm1),
            };
            Ok((v, dm, dn))
        }
        Derivation::ArrE(a, b) => {
            let Term::App(m1, m2) = m else {
                return Err(Error::NotAnExpansion(format!("{m} is not an application")));
            };
            match (m1.occurs_free(x), m2.occurs_free(x)) {
                (true, true) => {
                    let (v1, dm1, dn1) = exp1(a, m1, x, n, fresh)?;
                    let (v2, dm2, dn2) = exp1(b, m2, x, n, fresh)?;
                    let v = inter(&v1, &v2)?;
                    let (j1, j2) = (concl(&dm1)?, concl(&dm2)?);
                    let s1 = sub_binding(dm1, &j1, x, &v);
                    let s2 = sub_binding(dm2, &j2, x, &v);
                    Ok((v, Derivation::arr_e(s1, s2), inter_macro(dn1, dn2)?))
                }
                (true, false) => {
                    let (v, dm1, dn) = exp1(a, m1, x, n, fresh)?;
                    Ok((v, Derivation::arr_e(dm1, (**b).clone()), dn))
                }
                (false, true) => {
                    let (v, dm2, dn) = exp1(b, m2, x, n, fresh)?;
                    Ok((v, Derivation::arr_e((**a).clone(), dm2), dn))
                }
                (false, false) => Err(Error::Precondition(format!("{x} is not free in {m}"))),
            }
        }
        Derivation::Ax(..) => Err(Error::Precondition(format!("{x} is not free in {m}"))),
        Derivation::AxMacro(..) | Derivation::InterIMacro(..) => exp1(&elaborate(d)?, m, x, n, fresh),
    }
}

fn sub_binding(d: Derivation, j: &Judgment, x: &VarKey, v: &CanonType) -> Derivation {
    if j.env.get(x) == Some(v) {
        d
    } else {
        Derivation::sub(d, j.env.with(x.clone(), v.clone()), j.typ.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deriv::parse_derivation;
    use crate::parse::{parse_judgment, parse_term};

    fn expand(d: &str, m: &str) -> Judgment {
        let d = parse_derivation(d).unwrap();
        let r = subject_expand_beta(&d, &parse_term(m).unwrap(), 1000).unwrap();
        check_derivation(&r).unwrap()
    }

    #[test]
    fn identity_expansion() {
        let j = expand("(arrI z [] a (ax z a))", "(app (lam y [] y[]) (lam z [] z[]))");
        assert_eq!(j, parse_judgment("(judg (app (lam y [] y[]) (lam z [] z[])) () (-> a a))").unwrap());
    }

    #[test]
    fn lost_variable_returns_at_omega() {
        let j = expand("(ax y a)", "(app (lam x [] y[]) w[])");
        assert_eq!(j, parse_judgment("(judg (app (lam x [] y[]) w[]) ((w [] (w [])) (y [] a)) a)").unwrap());
    }

    #[test]
    fn unchanged_when_equal() {
        let d = parse_derivation("(ax y a)").unwrap();
        let r = subject_expand_beta(&d, &parse_term("y[]").unwrap(), 10).unwrap();
        assert_eq!(r, d);
    }

    #[test]
    fn duplicating_redex() {
        let j = expand(
            "(arrE (ax y (-> a b)) (ax y a))",
            "(app (lam x [] (app x[] x[])) y[])",
        );
        assert_eq!(
            j,
            parse_judgment("(judg (app (lam x [] (app x[] x[])) y[]) ((y [] (^ a (-> a b)))) b)").unwrap()
        );
    }

    #[test]
    fn expansion_under_binder_and_exp() {
        let j = expand("(exp 1 (arrI z [] a (ax z a)))", "(app (lam u [1] u[1]) (lam z [1] z[1]))");
        assert_eq!(
            j,
            parse_judgment("(judg (app (lam u [1] u[1]) (lam z [1] z[1])) () (e 1 (-> a a)))").unwrap()
        );
        let j = expand("(arrI z [] a (ax z a))", "(lam z [] (app (lam q [] q[]) z[]))");
        assert_eq!(j, parse_judgment("(judg (lam z [] (app (lam q [] q[]) z[])) () (-> a a))").unwrap());
    }

    #[test]
    fn not_an_expansion() {
        let d = parse_derivation("(ax y a)").unwrap();
        let e = subject_expand_beta(&d, &parse_term("(lam x [] x[])").unwrap(), 10).unwrap_err();
        assert_eq!(e.kind(), "NotAnExpansionError");
    }
}
