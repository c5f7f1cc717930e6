//! Training and analysis laboratory for spatially embedded recurrent
//! networks.
//!
//! The crate couples task-trained recurrent networks (rate-based and
//! spiking) to a wiring-cost regularizer built from physical distance and
//! network communicability, then measures what that pressure does to the
//! trained weight matrices: modularity, weight/spectral entropy, spectral
//! radius, symmetry, and the spatial layout of surviving connections.
//!
//! The numeric core is generic over the scalar type; the concrete aliases
//! at the crate root fix `f64`, which is what the training and analysis
//! pipeline uses throughout. Checkpoints are stored as little-endian `f32`
//! arrays regardless.

pub mod constraints;
pub mod embedding;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod numerics;
pub mod oracles;
pub mod rate;
pub mod selftest;
pub mod spiking;
pub mod svg;
pub mod training;

pub use error::{Error, Result};

/// Dense row-major matrix over `f64`, the working scalar of the pipeline.
pub type Matrix = numerics::DenseMatrix<f64>;

/// Eigenvalue multiset of a real square matrix over `f64`.
pub type Spectrum = numerics::ComplexSpectrum<f64>;
