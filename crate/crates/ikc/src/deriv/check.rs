use super::Derivation;
use crate::env::{env_expand, env_inter, env_joinable, env_omega, env_sub, Env, Judgment};
use crate::error::{Error, Result};
use crate::term::{alpha_eq, lift, Name, Term, VarKey};
use crate::types::{expand_type, inter, subtype, CanonT, CanonType};

/// `ax'`: `x^L : ⟨x^L:U ⊢ U⟩` built from primitive rules, `L` the degree of `u`.
pub fn ax_macro(x: &Name, u: &CanonType) -> Derivation {
    if u.is_omega() {
        return Derivation::Omega(Term::Var(VarKey::with_name(x.clone(), u.prefix.clone())));
    }
    let mut comps = u.comps.iter();
    let first = comps.next().expect("non-omega type has a component");
    let mut acc = Derivation::Ax(x.clone(), CanonType::single(first.clone()));
    let mut acc_ty = CanonType::single(first.clone());
    for t in comps {
        let ty = CanonType::single(t.clone());
        let both = inter(&acc_ty, &ty).expect("components share a degree");
        let g = Env::singleton(VarKey::with_name(x.clone(), Default::default()), both.clone());
        acc = Derivation::inter_i(
            Derivation::sub(acc, g.clone(), acc_ty),
            Derivation::sub(Derivation::Ax(x.clone(), ty.clone()), g, ty),
        );
        acc_ty = both;
    }
    Derivation::exp_seq(&u.prefix, acc)
}

/// `interI'`: intersects two derivations for one subject, meeting their environments.
pub fn inter_macro(a: Derivation, b: Derivation) -> Result<Derivation> {
    let ja = check_derivation(&a)?;
    let jb = check_derivation(&b)?;
    let g = env_inter(&ja.env, &jb.env)?;
    let a = if ja.env == g { a } else { Derivation::sub(a, g.clone(), ja.typ) };
    let b = if jb.env == g { b } else { Derivation::sub(b, g, jb.typ) };
    Ok(Derivation::inter_i(a, b))
}

/// Replaces macro nodes by primitive rules.
pub fn elaborate(d: &Derivation) -> Result<Derivation> {
    Ok(match d {
        Derivation::AxMacro(x, u) => ax_macro(x, u),
        Derivation::InterIMacro(a, b) => inter_macro(elaborate(a)?, elaborate(b)?)?,
        Derivation::Ax(..) | Derivation::Omega(_) => d.clone(),
        Derivation::ArrI(x, l, u, p) => Derivation::arr_i(x.clone(), l.clone(), u.clone(), elaborate(p)?),
        Derivation::ArrIW(x, l, p) => Derivation::arr_iw(x.clone(), l.clone(), elaborate(p)?),
        Derivation::ArrE(a, b) => Derivation::arr_e(elaborate(a)?, elaborate(b)?),
        Derivation::InterI(a, b) => Derivation::inter_i(elaborate(a)?, elaborate(b)?),
        Derivation::Exp(j, p) => Derivation::exp(*j, elaborate(p)?),
        Derivation::Sub(p, g, u) => Derivation::sub(elaborate(p)?, g.clone(), u.clone()),
    })
}

/// The subject of `d`'s conclusion, computed without checking side conditions.
pub(crate) fn subject_of(d: &Derivation) -> Term {
    match d {
        Derivation::Ax(x, _) => Term::Var(VarKey::with_name(x.clone(), Default::default())),
        Derivation::AxMacro(x, u) => Term::Var(VarKey::with_name(x.clone(), u.prefix.clone())),
        Derivation::Omega(m) => m.clone(),
        Derivation::ArrI(x, l, _, p) | Derivation::ArrIW(x, l, p) => {
            Term::abs_unchecked(VarKey::with_name(x.clone(), l.clone()), subject_of(p))
        }
        Derivation::ArrE(a, b) => Term::app_unchecked(subject_of(a), subject_of(b)),
        Derivation::InterI(a, _) | Derivation::InterIMacro(a, _) => subject_of(a),
        Derivation::Exp(j, p) => lift(&subject_of(p), *j),
        Derivation::Sub(p, ..) => subject_of(p),
    }
}

/// Recomputes the conclusion of `d`, verifying every side condition.
pub fn check_derivation(d: &Derivation) -> Result<Judgment> {
    check_at(d, &mut String::from("root"))
}

fn node(d: &Derivation, at: &str) -> String {
    format!("{} at {at}", d.rule_name())
}

fn child(at: &mut String, i: usize, d: &Derivation) -> Result<Judgment> {
    let len = at.len();
    at.push('.');
    at.push_str(&i.to_string());
    let r = check_at(d, at);
    at.truncate(len);
    r
}

fn single_t(u: &CanonType) -> Option<&CanonT> {
    if u.prefix.is_empty() {
        u.as_t()
    } else {
        None
    }
}

fn check_at(d: &Derivation, at: &mut String) -> Result<Judgment> {
    let here = node(d, at);
    let fail = |reason: String| Error::rule(here.clone(), reason);
    match d {
        Derivation::AxMacro(..) | Derivation::InterIMacro(..) => {
            let e = elaborate(d).map_err(|e| fail(format!("macro does not elaborate: {e}")))?;
            check_at(&e, at)
        }
        Derivation::Ax(x, t) => {
            if single_t(t).is_none() {
                return Err(fail(format!("axiom type {t} must be one component without expansion")));
            }
            let k = VarKey::with_name(x.clone(), Default::default());
            Ok(Judgment::new(Term::Var(k.clone()), Env::singleton(k, t.clone()), t.clone()))
        }
        Derivation::Omega(m) => {
            m.check_well_formed().map_err(|e| fail(e.to_string()))?;
            Ok(Judgment::new(m.clone(), env_omega(m), CanonType::omega(m.degree())))
        }
        Derivation::ArrI(x, l, u, p) => {
            let j = child(at, 0, p)?;
            let k = VarKey::with_name(x.clone(), l.clone());
            match j.env.get(&k) {
                None => return Err(fail(format!("binder {k} is not in the premise environment"))),
                Some(v) if v != u => {
                    return Err(fail(format!("premise binds {k} to {v} but the annotation is {u}")))
                }
                Some(_) => {}
            }
            let t = single_t(&j.typ)
                .ok_or_else(|| fail(format!("premise type {} is not a single arrow-or-atom", j.typ)))?;
            let m = Term::abs(k.clone(), j.subject.clone()).map_err(|e| fail(e.to_string()))?;
            let ty = CanonType::single(CanonT::arrow(u.clone(), t.clone()));
            Ok(Judgment::new(m, j.env.without(&k), ty))
        }
        Derivation::ArrIW(x, l, p) => {
            let j = child(at, 0, p)?;
            let k = VarKey::with_name(x.clone(), l.clone());
            if j.env.contains(&k) {
                return Err(fail(format!("binder {k} occurs in the premise environment")));
            }
            let t = single_t(&j.typ)
                .ok_or_else(|| fail(format!("premise type {} is not a single arrow-or-atom", j.typ)))?;
            let m = Term::abs(k, j.subject.clone()).map_err(|e| fail(e.to_string()))?;
            let ty = CanonType::single(CanonT::arrow(CanonType::omega(l.clone()), t.clone()));
            Ok(Judgment::new(m, j.env, ty))
        }
        Derivation::ArrE(a, b) => {
            let ja = child(at, 0, a)?;
            let jb = child(at, 1, b)?;
            let (u, t) = single_t(&ja.typ)
                .and_then(|t| t.as_arrow())
                .ok_or_else(|| fail(format!("function type {} is not a single arrow", ja.typ)))?;
            if *u != jb.typ {
                return Err(fail(format!("argument type {} does not match domain {u}", jb.typ)));
            }
            if !env_joinable(&ja.env, &jb.env) {
                return Err(fail("environments are not joinable".into()));
            }
            let m = Term::app(ja.subject.clone(), jb.subject.clone()).map_err(|e| fail(e.to_string()))?;
            let g = env_inter(&ja.env, &jb.env).map_err(|e| fail(e.to_string()))?;
            Ok(Judgment::new(m, g, CanonType::single(t.clone())))
        }
        Derivation::InterI(a, b) => {
            let ja = child(at, 0, a)?;
            let jb = child(at, 1, b)?;
            if !alpha_eq(&ja.subject, &jb.subject) {
                return Err(fail(format!("subjects differ: {} and {}", ja.subject, jb.subject)));
            }
            if ja.env != jb.env {
                return Err(fail(format!("environments differ: {} and {}", ja.env, jb.env)));
            }
            let u = inter(&ja.typ, &jb.typ).map_err(|e| fail(e.to_string()))?;
            Ok(Judgment::new(ja.subject, ja.env, u))
        }
        Derivation::Exp(j, p) => {
            let jp = child(at, 0, p)?;
            Ok(Judgment::new(lift(&jp.subject, *j), env_expand(*j, &jp.env), expand_type(*j, &jp.typ)))
        }
        Derivation::Sub(p, g, u) => {
            let jp = child(at, 0, p)?;
            if g.domain() != jp.env.domain() {
                return Err(fail(format!("target environment {g} has a different domain from {}", jp.env)));
            }
            if !env_sub(g, &jp.env) {
                let bad = g
                    .iter()
                    .find(|(k, v)| !subtype(v, jp.env.get(k).expect("same domain")))
                    .map(|(k, _)| k.to_string())
                    .unwrap_or_default();
                return Err(fail(format!("target binding for {bad} is not below the premise binding")));
            }
            if !subtype(&jp.typ, u) {
                return Err(fail(format!("premise type {} is not below target {u}", jp.typ)));
            }
            Ok(Judgment::new(jp.subject, g.clone(), u.clone()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deriv::parse_derivation;
    use crate::parse::parse_judgment;

    fn chk(s: &str) -> Result<Judgment> {
        check_derivation(&parse_derivation(s).unwrap())
    }

    fn jdg(s: &str) -> Judgment {
        parse_judgment(s).unwrap()
    }

    #[test]
    fn identity_and_omega() {
        assert_eq!(chk("(arrI y [] a (ax y a))").unwrap(), jdg("(judg (lam y [] y[]) () (-> a a))"));
        assert_eq!(
            chk("(w (lam y [] (app y[] y[])))").unwrap(),
            jdg("(judg (lam y [] (app y[] y[])) () (w []))")
        );
    }

    #[test]
    fn rule_errors() {
        assert_eq!(chk("(arrI y [] b (ax y a))").unwrap_err().kind(), "RuleError");
        assert_eq!(chk("(arrE (ax f (-> a b)) (ax x c))").unwrap_err().kind(), "RuleError");
        assert_eq!(chk("(arrIW y [] (ax y a))").unwrap_err().kind(), "RuleError");
        assert_eq!(chk("(ax x (e 1 a))").unwrap_err().kind(), "RuleError");
        assert_eq!(chk("(sub (ax x a) ((x [] b)) a)").unwrap_err().kind(), "RuleError");
        let e = chk("(interI (ax x a) (ax y a))").unwrap_err();
        assert!(matches!(e, Error::Rule { ref node, .. } if node == "interI at root"));
        let e = chk("(arrI y [] a (arrE (ax f (-> a b)) (ax x c)))").unwrap_err();
        assert!(matches!(e, Error::Rule { ref node, .. } if node == "arrE at root.0"));
    }

    #[test]
    fn weak_abstraction() {
        assert_eq!(
            chk("(arrIW x [1] (ax y a))").unwrap(),
            jdg("(judg (lam x [1] y[]) ((y [] a)) (-> (w [1]) a))")
        );
    }

    #[test]
    fn exp_and_sub() {
        assert_eq!(chk("(exp 1 (ax x a))").unwrap(), jdg("(judg x[1] ((x [1] (e 1 a))) (e 1 a))"));
        assert_eq!(
            chk("(sub (ax x a) ((x [] (^ a b))) a)").unwrap(),
            jdg("(judg x[] ((x [] (^ a b))) a)")
        );
    }

    #[test]
    fn macros_elaborate() {
        assert_eq!(
            chk("(ax' x (e 1 (^ a b)))").unwrap(),
            jdg("(judg x[1] ((x [1] (e 1 (^ a b)))) (e 1 (^ a b)))")
        );
        assert_eq!(chk("(ax' x (w [2]))").unwrap(), jdg("(judg x[2] ((x [2] (w [2]))) (w [2]))"));
        assert_eq!(
            chk("(interI' (ax x a) (ax x b))").unwrap(),
            jdg("(judg x[] ((x [] (^ a b))) (^ a b))")
        );
    }

    #[test]
    fn application() {
        assert_eq!(
            chk("(arrE (ax f (-> a b)) (ax x a))").unwrap(),
            jdg("(judg (app f[] x[]) ((f [] (-> a b)) (x [] a)) b)")
        );
    }
}
