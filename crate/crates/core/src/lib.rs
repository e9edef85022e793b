//! Numerical checks for unit-norm gradient fields on uniform grids: kinetic
//! residuals, averaging reconstruction, traces, umbilicity of level sets,
//! line-geometry classification and the line-energy functional.

pub mod calibration;
pub mod diff;
pub mod energy;
pub mod error;
pub mod generators;
pub mod geometry;
pub mod grid;
pub mod interp;
pub mod kinetic;
pub mod mollify;
pub mod par;
pub mod sphere;
pub mod testfn;
pub mod vector;
pub mod verdict;
pub mod vfld;

pub use error::{Error, Result};
pub use grid::{GridSpec, ScalarField, VectorField};
pub use sphere::{DirectionSet, Scheme};
pub use testfn::{Pairing, TestFunction};
pub use vector::VecN;
pub use verdict::Verdict;
pub use vfld::Vfld;
