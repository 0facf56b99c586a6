use super::check::check_derivation;
use super::Derivation;
use crate::env::{Env, Judgment};
use crate::error::{Error, Result};
use crate::index::{concat, Index};
use crate::term::{Term, VarKey};
use crate::types::{expand_type, expand_type_seq, subtype, subtype_t, CanonT, CanonType};

/// One arrow component `⃗e_K (V → T)` of an abstraction's type with its premise.
#[derive(Clone, Debug)]
pub struct AbsComponent {
    /// `⃗e_K V`.
    pub v: CanonType,
    /// `⃗e_K T`.
    pub t: CanonType,
    pub premise: Judgment,
}

#[derive(Clone, Debug)]
pub enum Inversion {
    OmegaShape(Index),
    Components(Vec<AbsComponent>),
}

/// Decomposes the type of an abstraction judgment into premise judgments.
pub fn invert_abs(j: &Judgment) -> Result<Inversion> {
    let Term::Abs(x, body) = &j.subject else {
        return Err(Error::Shape(format!("{} is not an abstraction", j.subject)));
    };
    if j.typ.is_omega() {
        return Ok(Inversion::OmegaShape(j.typ.prefix.clone()));
    }
    let k = &j.typ.prefix;
    let bound = body.occurs_free(x);
    let mut out = Vec::new();
    for c in &j.typ.comps {
        let Some((v, t)) = c.as_arrow() else {
            return Err(Error::ShapeRefutation(format!(
                "component {c} of {} is neither omega nor an arrow",
                j.typ
            )));
        };
        let v = expand_type_seq(k, v);
        if v.prefix != x.idx {
            return Err(Error::ShapeRefutation(format!(
                "domain {v} has degree {} but the binder is {x}",
                v.prefix
            )));
        }
        let t = expand_type_seq(k, &t.to_type());
        let env = if bound { j.env.with(x.clone(), v.clone()) } else { j.env.clone() };
        out.push(AbsComponent { v, t: t.clone(), premise: Judgment::new((**body).clone(), env, t) });
    }
    Ok(Inversion::Components(out))
}

/// A premise derivation for one arrow component of an abstraction.
#[derive(Clone, Debug)]
pub struct AbsEntry {
    /// Binder of the subject this premise belongs to.
    pub binder: VarKey,
    pub v: CanonType,
    pub t: CanonType,
    /// Derives the body at `⟨Γ, binder:v ⊢ t⟩`, without the binding when it is unused.
    pub deriv: Derivation,
    pub bound: bool,
}

#[derive(Clone, Debug)]
pub enum AbsInversion {
    OmegaShape,
    Components(Vec<(CanonT, AbsEntry)>),
}

impl AbsInversion {
    pub fn get(&self, c: &CanonT) -> Option<&AbsEntry> {
        match self {
            AbsInversion::OmegaShape => None,
            AbsInversion::Components(v) => v.iter().find(|(k, _)| k == c).map(|(_, e)| e),
        }
    }

    fn entries(self) -> Vec<(CanonT, AbsEntry)> {
        match self {
            AbsInversion::OmegaShape => Vec::new(),
            AbsInversion::Components(v) => v,
        }
    }
}

/// Extracts, for every component of the conclusion's type, a premise derivation
/// whose environment matches the conclusion's.
pub fn invert_abs_derivation(d: &Derivation) -> Result<AbsInversion> {
    match d {
        Derivation::Omega(m) => match m {
            Term::Abs(..) => Ok(AbsInversion::OmegaShape),
            _ => Err(Error::Shape(format!("{m} is not an abstraction"))),
        },
        Derivation::ArrI(x, l, u, p) => {
            let jp = check_derivation(p)?;
            let t = jp.typ.as_t().cloned().ok_or_else(|| Error::rule("arrI", "premise type is not single"))?;
            let entry = AbsEntry {
                binder: VarKey::with_name(x.clone(), l.clone()),
                v: u.clone(),
                t: jp.typ.clone(),
                deriv: (**p).clone(),
                bound: true,
            };
            Ok(AbsInversion::Components(vec![(CanonT::arrow(u.clone(), t), entry)]))
        }
        Derivation::ArrIW(x, l, p) => {
            let jp = check_derivation(p)?;
            let t = jp.typ.as_t().cloned().ok_or_else(|| Error::rule("arrIW", "premise type is not single"))?;
            let w = CanonType::omega(l.clone());
            let entry = AbsEntry {
                binder: VarKey::with_name(x.clone(), l.clone()),
                v: w.clone(),
                t: jp.typ.clone(),
                deriv: (**p).clone(),
                bound: false,
            };
            Ok(AbsInversion::Components(vec![(CanonT::arrow(w, t), entry)]))
        }
        Derivation::InterI(a, b) => {
            let mut out = invert_abs_derivation(a)?.entries();
            for (c, e) in invert_abs_derivation(b)?.entries() {
                if !out.iter().any(|(k, _)| *k == c) {
                    out.push((c, e));
                }
            }
            Ok(AbsInversion::Components(out))
        }
        Derivation::Exp(j, p) => match invert_abs_derivation(p)? {
            AbsInversion::OmegaShape => Ok(AbsInversion::OmegaShape),
            AbsInversion::Components(v) => Ok(AbsInversion::Components(
                v.into_iter()
                    .map(|(c, e)| {
                        let entry = AbsEntry {
                            binder: VarKey::with_name(e.binder.name.clone(), e.binder.idx.cons(*j)),
                            v: expand_type(*j, &e.v),
                            t: expand_type(*j, &e.t),
                            deriv: Derivation::exp(*j, e.deriv),
                            bound: e.bound,
                        };
                        (c, entry)
                    })
                    .collect(),
            )),
        },
        Derivation::Sub(p, gt, ut) => {
            let inner = invert_abs_derivation(p)?;
            let k = &ut.prefix;
            let mut out = Vec::new();
            for c in &ut.comps {
                let (vt, tt) = c
                    .as_arrow()
                    .ok_or_else(|| Error::ShapeRefutation(format!("component {c} is not an arrow")))?;
                let found = match &inner {
                    AbsInversion::OmegaShape => None,
                    AbsInversion::Components(v) => v.iter().find(|(cp, _)| subtype_t(cp, c)),
                };
                let (_, e) = found.ok_or_else(|| Error::rule("sub", format!("no premise component below {c}")))?;
                let v = CanonType { prefix: concat(k, &vt.prefix), comps: vt.comps.clone() };
                let t = expand_type_seq(k, &tt.to_type());
                let env = if e.bound { gt.with(e.binder.clone(), v.clone()) } else { gt.clone() };
                debug_assert!(subtype(&v, &e.v) || !e.bound);
                let entry = AbsEntry {
                    binder: e.binder.clone(),
                    v,
                    t: t.clone(),
                    deriv: Derivation::sub(e.deriv.clone(), env, t),
                    bound: e.bound,
                };
                out.push((c.clone(), entry));
            }
            Ok(AbsInversion::Components(out))
        }
        Derivation::Ax(..) | Derivation::ArrE(..) => {
            Err(Error::Shape(format!("{} does not conclude an abstraction", d.rule_name())))
        }
        Derivation::AxMacro(..) | Derivation::InterIMacro(..) => invert_abs_derivation(&super::elaborate(d)?),
    }
}

/// From a derivation of `P x : ⟨Γ, x:W ⊢ ⊓T_i⟩` with `x` not free in `P`,
/// builds `P : ⟨Γ ⊢ ⊓(W → T_i)⟩`.
pub fn eta_invert(d: &Derivation, x: &VarKey) -> Result<Derivation> {
    match d {
        Derivation::Omega(Term::App(p, _)) => Ok(Derivation::Omega((**p).clone())),
        Derivation::ArrE(a, _) => Ok((**a).clone()),
        Derivation::InterI(a, b) => Ok(Derivation::inter_i(eta_invert(a, x)?, eta_invert(b, x)?)),
        Derivation::Sub(p, gt, vt) => {
            let inner = eta_invert(p, x)?;
            if !vt.prefix.is_empty() {
                return Err(Error::Degree(format!("eta inversion at degree {}", vt.prefix)));
            }
            let w = gt.get(x).ok_or_else(|| Error::Domain(format!("{x} is not bound")))?;
            let ty = CanonType::from_comps(
                Index::empty(),
                vt.comps.iter().map(|t| CanonT::arrow(w.clone(), t.clone())),
            );
            let g: Env = gt.without(x);
            Ok(Derivation::sub(inner, g, ty))
        }
        Derivation::AxMacro(..) | Derivation::InterIMacro(..) => eta_invert(&super::elaborate(d)?, x),
        _ => Err(Error::Shape(format!("{} cannot conclude an eta body", d.rule_name()))),
    }
}
