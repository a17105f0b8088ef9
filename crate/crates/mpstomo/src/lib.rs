//! Quantum state tomography of matrix-product states and density operators
//! under local SIC-POVM measurement: target-state construction, exact
//! autoregressive sampling of measurement outcomes, Cramér-Rao lower bounds
//! Tr(K I⁻¹) on the reconstruction error, and maximum-likelihood
//! reconstruction that saturates that bound.

pub mod crb;
pub mod dense;
pub mod error;
pub mod io;
pub mod linalg;
pub mod mle;
pub mod sampler;
pub mod sicpovm;
pub mod states;
pub mod tensor;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
