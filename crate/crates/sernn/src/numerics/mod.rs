//! Dense linear algebra, deterministic random streams, and the handful of
//! statistics the analysis pipeline depends on.
//!
//! Everything here is generic over [`Real`] so the kernels work in `f32`
//! as well as `f64`; the rest of the crate fixes `f64` through the aliases
//! at the crate root. No external linear-algebra backend is used: the
//! acceptance bar for these kernels is their own oracle suite, and keeping
//! them self-contained makes runs bit-reproducible across machines.

mod eigen;
mod expm;
mod matrix;
mod rng;
mod stats;

pub use eigen::{eigenvalues, symmetric_eigen, ComplexSpectrum};
pub use expm::matrix_exp;
pub use matrix::{lu_solve, qr_decompose, DenseMatrix};
pub use rng::RandomSource;
pub use stats::{
    mann_whitney, mean, median, normal_cdf, pearson, pearson_r, spearman_rho, standard_error,
};

/// Scalar type the numeric kernels are generic over.
///
/// `f32` and `f64` both implement it; the pipeline itself runs in `f64`.
pub trait Real:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::NumAssignOps
    + std::fmt::Debug
    + std::fmt::Display
    + Default
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Shorthand for embedding an `f64` literal into the generic scalar.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal must be representable in the scalar type")
}
