//! Two-dimensional TE Maxwell FDTD laboratory for absorbing layers.
//!
//! The crate advances the Yee scheme with four layer strategies (Bérenger
//! split PML, smart layers, unsplit SPML, and the three harmoniously matched
//! layer extrapolations built on smart layers), measures layer reflection
//! against an enlarged-domain reference run, and evaluates the closed-form
//! symbol, amplification and reflection-coefficient formulas those layers are
//! analysed with.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod config;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod field;
pub mod grid;
pub mod hml;
pub mod init;
pub mod io;
pub mod jobs;
pub mod profile;
pub mod reference;
pub mod run;
pub mod solver;

pub use config::{EastBoundary, Method, Region, SimConfig};
pub use error::{Error, Result};
pub use exec::Exec;
pub use field::{Aux, Field2, FieldState};
pub use grid::{Node, YeeGrid};
pub use hml::HmlPair;
pub use init::{Envelope, InitialCondition};
pub use profile::{AbsorptionProfile, ProfileKind};
pub use reference::{linf_error, reference_run, ErrorReport, History, ReferenceWalls};
pub use solver::StepContext;
