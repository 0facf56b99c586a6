//! Kernel for a degree-indexed lambda calculus with intersection types,
//! expansion variables and a universal type.

pub mod cli;
pub mod deriv;
pub mod enumerate;
pub mod env;
pub mod error;
pub mod index;
pub mod parse;
pub mod props;
pub mod reduction;
pub mod semantics;
pub mod term;
pub mod types;

pub use env::{Env, Judgment};
pub use error::{Error, Result};
pub use index::Index;
pub use term::{Term, VarKey};
pub use types::{CanonType, CanonT, TypeRaw};
