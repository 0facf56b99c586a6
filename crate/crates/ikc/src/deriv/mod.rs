//! Typing derivations: trees, checking, inversion, transformers and search.

mod check;
mod expand;
mod invert;
mod search;
mod syntax;
mod transform;

pub use check::{ax_macro, check_derivation, elaborate, inter_macro};
pub use expand::subject_expand_beta;
pub use invert::{eta_invert, invert_abs, invert_abs_derivation, AbsComponent, AbsInversion, Inversion};
pub use search::{bounded_typecheck, SearchResult};
pub use syntax::parse_derivation;
pub use transform::{lower_derivation, rename_free, subject_reduce, subject_reduce_steps, subst_derivation};

use crate::env::{Env, Judgment};
use crate::error::Result;
use crate::index::Index;
use crate::term::{Name, Term};
use crate::types::CanonType;

/// A derivation tree. Conclusions are never stored; `check_derivation` recomputes them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Derivation {
    /// `x : ⟨x:T ⊢ T⟩` for `T` a single non-expanded component.
    Ax(Name, CanonType),
    /// `M : ⟨ω-env ⊢ ω^{d(M)}⟩`.
    Omega(Term),
    /// Abstraction over a bound variable whose type is recorded.
    ArrI(Name, Index, CanonType, Box<Derivation>),
    /// Abstraction over a variable absent from the premise.
    ArrIW(Name, Index, Box<Derivation>),
    ArrE(Box<Derivation>, Box<Derivation>),
    InterI(Box<Derivation>, Box<Derivation>),
    Exp(u32, Box<Derivation>),
    Sub(Box<Derivation>, Env, CanonType),
    /// Derived intersection rule with environments combined.
    InterIMacro(Box<Derivation>, Box<Derivation>),
    /// Derived axiom `x^L : ⟨x^L:U ⊢ U⟩` for any `U` of degree `L`.
    AxMacro(Name, CanonType),
}

impl Derivation {
    pub fn arr_i(x: Name, l: Index, u: CanonType, p: Derivation) -> Self {
        Derivation::ArrI(x, l, u, Box::new(p))
    }

    pub fn arr_iw(x: Name, l: Index, p: Derivation) -> Self {
        Derivation::ArrIW(x, l, Box::new(p))
    }

    pub fn arr_e(a: Derivation, b: Derivation) -> Self {
        Derivation::ArrE(Box::new(a), Box::new(b))
    }

    pub fn inter_i(a: Derivation, b: Derivation) -> Self {
        Derivation::InterI(Box::new(a), Box::new(b))
    }

    pub fn exp(j: u32, p: Derivation) -> Self {
        Derivation::Exp(j, Box::new(p))
    }

    /// Wraps `p` in expansions so the conclusion gains prefix `k`.
    pub fn exp_seq(k: &Index, p: Derivation) -> Self {
        k.as_slice().iter().rev().fold(p, |d, &j| Derivation::exp(j, d))
    }

    pub fn sub(p: Derivation, g: Env, u: CanonType) -> Self {
        Derivation::Sub(Box::new(p), g, u)
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Derivation::Ax(..) | Derivation::Omega(_) | Derivation::AxMacro(..) => 1,
            Derivation::ArrI(.., p) | Derivation::ArrIW(.., p) | Derivation::Exp(_, p) | Derivation::Sub(p, ..) => {
                1 + p.size()
            }
            Derivation::ArrE(a, b) | Derivation::InterI(a, b) | Derivation::InterIMacro(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Tag of the outermost rule as written in files.
    pub fn rule_name(&self) -> &'static str {
        match self {
            Derivation::Ax(..) => "ax",
            Derivation::Omega(_) => "w",
            Derivation::ArrI(..) => "arrI",
            Derivation::ArrIW(..) => "arrIW",
            Derivation::ArrE(..) => "arrE",
            Derivation::InterI(..) => "interI",
            Derivation::Exp(..) => "exp",
            Derivation::Sub(..) => "sub",
            Derivation::InterIMacro(..) => "interI'",
            Derivation::AxMacro(..) => "ax'",
        }
    }

    /// Collects the primitive rule tags used anywhere in the tree.
    pub fn rules_used(&self, out: &mut std::collections::BTreeSet<&'static str>) {
        out.insert(self.rule_name());
        match self {
            Derivation::ArrI(.., p) | Derivation::ArrIW(.., p) | Derivation::Exp(_, p) | Derivation::Sub(p, ..) => {
                p.rules_used(out)
            }
            Derivation::ArrE(a, b) | Derivation::InterI(a, b) | Derivation::InterIMacro(a, b) => {
                a.rules_used(out);
                b.rules_used(out);
            }
            _ => {}
        }
    }
}

/// A derivation paired with its recomputed conclusion.
#[derive(Clone, Debug)]
pub struct CheckedJudgment {
    pub judgment: Judgment,
    pub derivation: Derivation,
}

impl CheckedJudgment {
    pub fn new(d: Derivation) -> Result<Self> {
        let judgment = check_derivation(&d)?;
        Ok(CheckedJudgment { judgment, derivation: d })
    }
}
