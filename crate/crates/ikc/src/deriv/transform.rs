use super::check::{check_derivation, elaborate, subject_of};
use super::invert::{eta_invert, invert_abs_derivation};
use super::Derivation;
use crate::env::{env_inter, env_lower, env_restrict, Env, Judgment};
use crate::error::{Error, Result};
use crate::index::Index;
use crate::reduction::{contract, find_reduction, Redex, RedexKind, Relation};
use crate::term::{alpha_eq, join_clash, lower, substitute, substitute_with, Dir, Fresh, Name, Term, VarKey};
use crate::types::{lower_type, CanonT, CanonType};
use std::collections::HashSet;

/// Renames free occurrences of `key` in the subject to `new`, which must not occur in it.
pub fn rename_free(d: &Derivation, key: &VarKey, new: &Name) -> Result<Derivation> {
    Ok(match d {
        Derivation::Ax(x, t) => {
            if *x == key.name && key.idx.is_empty() {
                Derivation::Ax(new.clone(), t.clone())
            } else {
                d.clone()
            }
        }
        Derivation::Omega(m) => {
            let to = Term::Var(VarKey::with_name(new.clone(), key.idx.clone()));
            Derivation::Omega(substitute(m, &[(key.clone(), to)])?)
        }
        Derivation::ArrI(x, l, u, p) => {
            if *x == key.name && *l == key.idx {
                d.clone()
            } else {
                Derivation::arr_i(x.clone(), l.clone(), u.clone(), rename_free(p, key, new)?)
            }
        }
        Derivation::ArrIW(x, l, p) => {
            if *x == key.name && *l == key.idx {
                d.clone()
            } else {
                Derivation::arr_iw(x.clone(), l.clone(), rename_free(p, key, new)?)
            }
        }
        Derivation::ArrE(a, b) => Derivation::arr_e(rename_free(a, key, new)?, rename_free(b, key, new)?),
        Derivation::InterI(a, b) => Derivation::inter_i(rename_free(a, key, new)?, rename_free(b, key, new)?),
        Derivation::Exp(j, p) => {
            if key.idx.first() != Some(*j) {
                return Ok(d.clone());
            }
            let inner = VarKey::with_name(key.name.clone(), key.idx.tail().expect("non-empty"));
            Derivation::exp(*j, rename_free(p, &inner, new)?)
        }
        Derivation::Sub(p, g, u) => {
            let mut g2 = g.clone();
            if let Some(v) = g2.remove(key) {
                g2.insert(VarKey::with_name(new.clone(), key.idx.clone()), v);
            }
            Derivation::sub(rename_free(p, key, new)?, g2, u.clone())
        }
        Derivation::AxMacro(..) | Derivation::InterIMacro(..) => rename_free(&elaborate(d)?, key, new)?,
    })
}

/// Derives `M^{-K} : ⟨Γ^{-K} ⊢ U^{-K}⟩` from a derivation of `M : ⟨Γ ⊢ U⟩`.
pub fn lower_derivation(d: &Derivation, k: &Index) -> Result<Derivation> {
    let mut d = elaborate(d)?;
    for &i in k.as_slice() {
        d = lower_one(&d, i)?;
    }
    Ok(d)
}

fn lower_one(d: &Derivation, i: u32) -> Result<Derivation> {
    let ix = Index::single(i);
    Ok(match d {
        Derivation::Omega(m) => Derivation::Omega(lower(m, i)?),
        Derivation::InterI(a, b) => Derivation::inter_i(lower_one(a, i)?, lower_one(b, i)?),
        Derivation::Exp(j, p) if *j == i => (**p).clone(),
        Derivation::Sub(p, g, u) => Derivation::sub(lower_one(p, i)?, env_lower(g, &ix)?, lower_type(u, &ix)?),
        _ => {
            return Err(Error::Degree(format!(
                "a derivation ending in {} cannot be lowered by {i}",
                d.rule_name()
            )))
        }
    })
}

fn concl(d: &Derivation) -> Result<Judgment> {
    check_derivation(d)
}

/// `dm : M : ⟨Γ, x:U ⊢ V⟩` and `dn : N : ⟨Δ ⊢ U⟩` give `M[x:=N] : ⟨Γ⊓Δ ⊢ V⟩`.
pub fn subst_derivation(dm: &Derivation, x: &VarKey, dn: &Derivation) -> Result<Derivation> {
    let dm = elaborate(dm)?;
    let dn = elaborate(dn)?;
    let jm = concl(&dm).map_err(|e| Error::Precondition(format!("first derivation does not check: {e}")))?;
    let jn = concl(&dn).map_err(|e| Error::Precondition(format!("second derivation does not check: {e}")))?;
    let u = jm
        .env
        .get(x)
        .ok_or_else(|| Error::Precondition(format!("{x} is not bound in {}", jm.env)))?;
    if *u != jn.typ {
        return Err(Error::Precondition(format!("{x} has type {u} but the argument derives {}", jn.typ)));
    }
    let mut rest = jm.subject.free_vars();
    rest.remove(x);
    if let Some((a, b)) = join_clash(&rest, &jn.subject.free_vars()) {
        return Err(Error::Precondition(format!("subjects are not joinable: {a} and {b}")));
    }
    let mut fresh = Fresh::new(HashSet::new());
    fresh.avoid_term(&jm.subject);
    fresh.avoid_term(&jn.subject);
    let n_names: HashSet<Name> = jn.subject.free_vars().into_iter().map(|k| k.name).collect();
    let out = subst_rec(&dm, x, &dn, &n_names, &mut fresh)?;
    let expect = Judgment::new(
        substitute(&jm.subject, &[(x.clone(), jn.subject.clone())])?,
        env_inter(&jm.env.without(x), &jn.env)?,
        jm.typ,
    );
    verify(&out, &expect)?;
    Ok(out)
}

fn verify(d: &Derivation, expect: &Judgment) -> Result<()> {
    let got = concl(d)?;
    if !got.same_as(expect) {
        return Err(Error::rule("transformer", format!("produced {got}, expected {expect}")));
    }
    Ok(())
}

fn sub_to_type(d: Derivation, j: &Judgment, u: &CanonType) -> Derivation {
    if j.typ == *u {
        d
    } else {
        Derivation::sub(d, j.env.clone(), u.clone())
    }
}

fn sub_to(d: Derivation, j: &Judgment, g: &Env, u: &CanonType) -> Derivation {
    if j.typ == *u && j.env == *g {
        d
    } else {
        Derivation::sub(d, g.clone(), u.clone())
    }
}

fn subst_rec(
    dm: &Derivation,
    x: &VarKey,
    dn: &Derivation,
    n_names: &HashSet<Name>,
    fresh: &mut Fresh,
) -> Result<Derivation> {
    match dm {
        Derivation::Ax(..) => Ok(dn.clone()),
        Derivation::Omega(m) => {
            let jn = concl(dn)?;
            let m2 = substitute_with(m, &[(x.clone(), jn.subject.clone())], fresh)?;
            let g = env_inter(&crate::env::env_omega(m).without(x), &jn.env)?;
            let w = CanonType::omega(m.degree());
            let d = Derivation::Omega(m2);
            let jd = concl(&d)?;
            Ok(sub_to(d, &jd, &g, &w))
        }
        Derivation::ArrI(y, l, u, p) => {
            let (y, p) = avoid_binder(y, l, p, n_names, fresh)?;
            Ok(Derivation::arr_i(y, l.clone(), u.clone(), subst_rec(&p, x, dn, n_names, fresh)?))
        }
        Derivation::ArrIW(y, l, p) => {
            let (y, p) = avoid_binder(y, l, p, n_names, fresh)?;
            Ok(Derivation::arr_iw(y, l.clone(), subst_rec(&p, x, dn, n_names, fresh)?))
        }
        Derivation::ArrE(a, b) => {
            let in_a = subject_of(a).occurs_free(x);
            let in_b = subject_of(b).occurs_free(x);
            match (in_a, in_b) {
                (true, true) => {
                    let (ja, jb, jn) = (concl(a)?, concl(b)?, concl(dn)?);
                    let dn1 = sub_to_type(dn.clone(), &jn, ja.env.get(x).expect("bound"));
                    let dn2 = sub_to_type(dn.clone(), &jn, jb.env.get(x).expect("bound"));
                    Ok(Derivation::arr_e(
                        subst_rec(a, x, &dn1, n_names, fresh)?,
                        subst_rec(b, x, &dn2, n_names, fresh)?,
                    ))
                }
                (true, false) => Ok(Derivation::arr_e(subst_rec(a, x, dn, n_names, fresh)?, (**b).clone())),
                (false, true) => Ok(Derivation::arr_e((**a).clone(), subst_rec(b, x, dn, n_names, fresh)?)),
                (false, false) => Err(Error::Precondition(format!("{x} is not free in the subject"))),
            }
        }
        Derivation::InterI(a, b) => Ok(Derivation::inter_i(
            subst_rec(a, x, dn, n_names, fresh)?,
            subst_rec(b, x, dn, n_names, fresh)?,
        )),
        Derivation::Exp(j, p) => {
            if x.idx.first() != Some(*j) {
                return Err(Error::Degree(format!("{x} does not start with {j}")));
            }
            let x0 = VarKey::with_name(x.name.clone(), x.idx.tail().expect("non-empty"));
            let dn0 = lower_derivation(dn, &Index::single(*j))?;
            Ok(Derivation::exp(*j, subst_rec(p, &x0, &dn0, n_names, fresh)?))
        }
        Derivation::Sub(p, gt, vt) => {
            let (jp, jn) = (concl(p)?, concl(dn)?);
            let up = jp.env.get(x).expect("bound");
            let dn2 = sub_to_type(dn.clone(), &jn, up);
            let r = subst_rec(p, x, &dn2, n_names, fresh)?;
            let g = env_inter(&gt.without(x), &jn.env)?;
            let jr = concl(&r)?;
            Ok(sub_to(r, &jr, &g, vt))
        }
        Derivation::AxMacro(..) | Derivation::InterIMacro(..) => subst_rec(&elaborate(dm)?, x, dn, n_names, fresh),
    }
}

fn avoid_binder(
    y: &Name,
    l: &Index,
    p: &Derivation,
    n_names: &HashSet<Name>,
    fresh: &mut Fresh,
) -> Result<(Name, Derivation)> {
    if !n_names.contains(y) {
        return Ok((y.clone(), p.clone()));
    }
    let z = fresh.fresh();
    let p2 = rename_free(p, &VarKey::with_name(y.clone(), l.clone()), &z)?;
    Ok((z, p2))
}

/// Transports a derivation of `M : ⟨Γ ⊢ U⟩` along `M ▷*_r n` to `n : ⟨Γ|_n ⊢ U⟩`.
pub fn subject_reduce(d: &Derivation, n: &Term, r: Relation, fuel: usize) -> Result<Derivation> {
    let d = elaborate(d)?;
    let jm = concl(&d)?;
    if alpha_eq(&jm.subject, n) {
        return Ok(d);
    }
    let steps = find_reduction(&jm.subject, n, r, fuel)
        .ok_or_else(|| Error::NotAReduct(format!("{} does not reduce to {n} within fuel {fuel}", jm.subject)))?;
    subject_reduce_steps(&d, &steps)
}

/// Replays the given redex sequence on the subject, checkpointing after every step.
pub fn subject_reduce_steps(d: &Derivation, steps: &[Redex]) -> Result<Derivation> {
    let mut d = elaborate(d)?;
    let j0 = concl(&d)?;
    let mut m = j0.subject.clone();
    for rx in steps {
        let next = contract(&m, rx)?;
        d = sr_step(&d, &rx.path, rx.kind)?;
        let expect = Judgment::new(next.clone(), env_restrict(&j0.env, &next.free_vars())?, j0.typ.clone());
        verify(&d, &expect)?;
        m = next;
    }
    Ok(d)
}

fn sr_step(d: &Derivation, path: &[Dir], kind: RedexKind) -> Result<Derivation> {
    let rx = || Redex { path: path.to_vec(), kind };
    match d {
        Derivation::Omega(m) => return Ok(Derivation::Omega(contract(m, &rx())?)),
        Derivation::InterI(a, b) => return Ok(Derivation::inter_i(sr_step(a, path, kind)?, sr_step(b, path, kind)?)),
        Derivation::Exp(j, p) => return Ok(Derivation::exp(*j, sr_step(p, path, kind)?)),
        Derivation::Sub(p, gt, ut) => {
            let r = sr_step(p, path, kind)?;
            let jr = concl(&r)?;
            let g = env_restrict(gt, &jr.subject.free_vars())?;
            return Ok(sub_to(r, &jr, &g, ut));
        }
        _ => {}
    }
    let Some((dir, rest)) = path.split_first() else {
        return match kind {
            RedexKind::Beta => sr_beta_root(d),
            RedexKind::Eta => sr_eta_root(d),
        };
    };
    match (d, dir) {
        (Derivation::ArrI(x, l, u, p), Dir::Body) => {
            let r = sr_step(p, rest, kind)?;
            let k = VarKey::with_name(x.clone(), l.clone());
            if subject_of(&r).occurs_free(&k) {
                Ok(Derivation::arr_i(x.clone(), l.clone(), u.clone(), r))
            } else {
                let jr = concl(&r)?;
                let t = jr.typ.as_t().cloned().expect("arrow premise is single");
                let ty = CanonType::single(CanonT::arrow(u.clone(), t));
                Ok(Derivation::sub(Derivation::arr_iw(x.clone(), l.clone(), r), jr.env, ty))
            }
        }
        (Derivation::ArrIW(x, l, p), Dir::Body) => Ok(Derivation::arr_iw(x.clone(), l.clone(), sr_step(p, rest, kind)?)),
        (Derivation::ArrE(a, b), Dir::Fun | Dir::Arg) => {
            let g = concl(d)?.env;
            let e = if *dir == Dir::Fun {
                Derivation::arr_e(sr_step(a, rest, kind)?, (**b).clone())
            } else {
                Derivation::arr_e((**a).clone(), sr_step(b, rest, kind)?)
            };
            let je = concl(&e)?;
            let target = env_restrict(&g, &je.subject.free_vars())?;
            Ok(sub_to(e, &je, &target, &je.typ))
        }
        _ => Err(Error::NotAReduct(format!("no redex under {} along {dir:?}", d.rule_name()))),
    }
}

fn sr_beta_root(d: &Derivation) -> Result<Derivation> {
    let Derivation::ArrE(a, b) = d else {
        return Err(Error::NotAReduct(format!("{} does not type a beta redex", d.rule_name())));
    };
    let ja = concl(a)?;
    let c = ja.typ.as_t().expect("function type is single").clone();
    let inv = invert_abs_derivation(a)?;
    let e = inv
        .get(&c)
        .ok_or_else(|| Error::rule("arrE", format!("no premise for component {c}")))?;
    if e.bound {
        subst_derivation(&e.deriv, &e.binder, b)
    } else {
        let g = concl(d)?.env;
        let je = concl(&e.deriv)?;
        let target = env_restrict(&g, &je.subject.free_vars())?;
        Ok(sub_to(e.deriv.clone(), &je, &target, &je.typ))
    }
}

fn sr_eta_root(d: &Derivation) -> Result<Derivation> {
    let Derivation::ArrI(x, l, _, p) = d else {
        return Err(Error::NotAReduct(format!("{} does not type an eta redex", d.rule_name())));
    };
    eta_invert(p, &VarKey::with_name(x.clone(), l.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deriv::parse_derivation;
    use crate::parse::{parse_judgment, parse_term};

    fn drv(s: &str) -> Derivation {
        parse_derivation(s).unwrap()
    }

    fn jdg(s: &str) -> Judgment {
        parse_judgment(s).unwrap()
    }

    #[test]
    fn subst_examples() {
        let dm = drv("(ax x (-> a a))");
        let dn = drv("(arrI z [] a (ax z a))");
        let x = VarKey::new("x", Index::empty());
        let r = subst_derivation(&dm, &x, &dn).unwrap();
        assert_eq!(check_derivation(&r).unwrap(), jdg("(judg (lam z [] z[]) () (-> a a))"));

        let dm = drv("(arrE (ax y (-> (-> a a) b)) (ax x (-> a a)))");
        let r = subst_derivation(&dm, &x, &dn).unwrap();
        assert_eq!(
            check_derivation(&r).unwrap(),
            jdg("(judg (app y[] (lam z [] z[])) ((y [] (-> (-> a a) b))) b)")
        );

        let dm = drv("(w (app x[] y[]))");
        let dn = drv("(w z[])");
        let r = subst_derivation(&dm, &x, &dn).unwrap();
        assert_eq!(check_derivation(&r).unwrap(), jdg("(judg (app z[] y[]) ((y [] (w [])) (z [] (w []))) (w []))"));
    }

    #[test]
    fn subst_avoids_capture() {
        let dm = drv("(arrI y [] a (arrE (ax x (-> a b)) (ax y a)))");
        let dn = drv("(ax y (-> a b))");
        let x = VarKey::new("x", Index::empty());
        let r = subst_derivation(&dm, &x, &dn).unwrap();
        let j = check_derivation(&r).unwrap();
        assert_eq!(j, jdg("(judg (lam q [] (app y[] q[])) ((y [] (-> a b))) (-> a b))"));
    }

    #[test]
    fn subst_precondition() {
        let x = VarKey::new("x", Index::empty());
        let e = subst_derivation(&drv("(ax x a)"), &x, &drv("(ax z b)")).unwrap_err();
        assert_eq!(e.kind(), "PreconditionError");
    }

    #[test]
    fn lower_examples() {
        let d = drv("(exp 1 (ax x a))");
        let r = lower_derivation(&d, &Index::single(1)).unwrap();
        assert_eq!(check_derivation(&r).unwrap(), jdg("(judg x[] ((x [] a)) a)"));
        assert_eq!(lower_derivation(&d, &Index::empty()).unwrap(), d);
        assert_eq!(lower_derivation(&drv("(ax x a)"), &Index::single(1)).unwrap_err().kind(), "DegreeError");
    }

    #[test]
    fn reduce_examples() {
        let d = drv("(arrE (arrI y [] (-> a a) (ax y (-> a a))) (arrI z [] a (ax z a)))");
        let n = parse_term("(lam z [] z[])").unwrap();
        let r = subject_reduce(&d, &n, Relation::Beta, 100).unwrap();
        assert_eq!(check_derivation(&r).unwrap(), jdg("(judg (lam z [] z[]) () (-> a a))"));

        let d = drv("(arrI x [] a (arrE (arrI y [] a (ax y a)) (ax x a)))");
        let n = parse_term("(lam y [] y[])").unwrap();
        let r = subject_reduce(&d, &n, Relation::BetaEta, 100).unwrap();
        assert_eq!(check_derivation(&r).unwrap(), jdg("(judg (lam y [] y[]) () (-> a a))"));

        let r = subject_reduce(&d, &parse_term("(lam x [] (app (lam y [] y[]) x[]))").unwrap(), Relation::Beta, 10).unwrap();
        assert_eq!(r, d);
        let e = subject_reduce(&d, &parse_term("(lam x [] x[])").unwrap(), Relation::Eta, 10);
        assert!(e.is_ok());
        let e = subject_reduce(&d, &parse_term("z[]").unwrap(), Relation::Beta, 10).unwrap_err();
        assert_eq!(e.kind(), "NotAReductError");
    }

    #[test]
    fn reduce_drops_variable() {
        let d = drv("(arrE (arrIW x [] (ax y a)) (w w[]))");
        let r = subject_reduce(&d, &parse_term("y[]").unwrap(), Relation::Beta, 10).unwrap();
        assert_eq!(check_derivation(&r).unwrap(), jdg("(judg y[] ((y [] a)) a)"));
    }
}
