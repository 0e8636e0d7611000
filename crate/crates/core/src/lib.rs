//! Pseudospectral laboratory for the one-dimensional Dirac–Klein–Gordon
//! system on a periodic interval.
//!
//! Every numerical type is generic over [`Real`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`.

pub mod dirac_algebra;
pub mod dkg_state;
pub mod error;
pub mod estimates;
pub mod integrator;
pub mod nonlinearity;
pub mod scalar;
pub mod spectral_grid;

pub use dirac_algebra::{DiracMatrices, Matrix2, Sign, SignPair};
pub use dkg_state::{to_diagonal, to_physical, DiagonalState, Params, PhysicalState};
pub use error::{Error, Result};
pub use scalar::Real;
pub use spectral_grid::{Field, Multiplier, SpectralGrid};

pub type Grid = SpectralGrid<f64>;
pub type Field64 = Field<f64>;
pub type Physical = PhysicalState<f64>;
pub type Diagonal = DiagonalState<f64>;
pub type Params64 = Params<f64>;

/// Crate version, echoed in experiment summaries.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
