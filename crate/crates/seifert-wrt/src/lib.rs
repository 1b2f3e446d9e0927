//! Exact SU(2) Reshetikhin–Turaev invariants of Seifert fibered 3-manifolds,
//! flat connection data, and the large-level asymptotic expansions built from
//! residues and stationary phase coefficients.

pub mod analysis;
pub mod asympt;
pub mod cli;
pub mod error;
pub mod exact;
pub mod hp;
pub mod lseries;
pub mod moduli;
pub mod numtheory;
pub mod par;
pub mod seifert;

pub use error::{Error, Result};
pub use seifert::SeifertData;
