//! Closed-form symbol, dispersion, amplification and reflection formulas
//! for the continuous layer models, with independent numerical evaluation.

mod dispersion;
mod reflection;
mod symbol;

pub use dispersion::{
    amplification_map, DirectionLabel, DirectionSample, DispersionModel, BETA_TOLERANCE,
};
pub use reflection::smart_reflection_coefficient;
pub use symbol::{
    berenger_symbol_identity, relative_residual, scalar_transport_roots, spml_factorization_residual,
    spml_roots, spml_symbol_det, HyperbolicSystem,
};
