//! su(1,1) algebraic solution of the generalized MICZ-Kepler problem.
//!
//! The crate is organised bottom-up: [`special`] and [`quadrature`] feed the
//! representation theory in [`su11`], which [`model`] and [`coherent`] turn
//! into configuration-space functions. [`oracle`] holds brute-force
//! references that do not depend on any closed form, and [`verify`] runs
//! the two against each other.

pub mod coherent;
pub mod errata;
pub mod error;
pub mod model;
pub mod oracle;
pub mod quadrature;
pub mod special;
pub mod su11;
pub mod verify;

pub use coherent::CoherentStateSpec;
pub use error::{Error, Result};
pub use model::{HalfInt, QuantumNumbers, RadialGrid, RadialState};
pub use quadrature::{QuadratureRule, RuleKind};
pub use su11::{BargmannIndex, CoherentParams, FockVector, Generator};

/// Library version, echoed in every CLI output header.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
