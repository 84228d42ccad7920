//! Quantum-number bookkeeping, spectrum, angular and radial functions.

pub mod angular;
pub mod quantum;
pub mod radial;

pub use angular::{angular_function, AngularFunction};
pub use quantum::{energy, enumerate_sectors, HalfInt, ParseHalfIntError, QuantumNumbers, RadialState};
pub use radial::{
    dilation_length, physical_prefactor, physical_radial, radial_residual, schrodinger_residual, sturmian_radial,
    sturmian_sequence, RadialGrid,
};
