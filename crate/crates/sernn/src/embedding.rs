//! Neuron lattice geometry.
//!
//! Networks here live in a fixed 3D box of evenly spaced neurons. The only
//! thing downstream code consumes is the pairwise Euclidean distance matrix
//! `D`; coordinates are kept around for plotting and debugging. Index order
//! is x fastest, z slowest, and lattice spacing is 1 — any fixed bijection
//! and scale would do (scale just rescales the regularization strength), but
//! fixing them makes checkpoints portable across runs.

use crate::error::{Error, Result};
use crate::Matrix;

/// Cap on lattice size; distance matrices are dense `N x N`.
const MAX_NEURONS: usize = 10_000;

/// A 3D neuron lattice together with its Euclidean distance matrix.
#[derive(Debug, Clone)]
pub struct DistanceLattice {
    dims: (usize, usize, usize),
    coords: Vec<(usize, usize, usize)>,
    d: Matrix,
}

impl DistanceLattice {
    /// Box dimensions `(nx, ny, nz)`.
    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    /// Number of neurons (`nx * ny * nz`).
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Integer coordinates of neuron `n`.
    pub fn coord(&self, n: usize) -> (usize, usize, usize) {
        self.coords[n]
    }

    /// Pairwise Euclidean distances, in units of lattice spacing.
    pub fn distances(&self) -> &Matrix {
        &self.d
    }
}

/// Build the lattice for a box of the given dimensions.
///
/// Neuron `n` sits at `(n mod nx, (n / nx) mod ny, n / (nx * ny))`. The
/// default experiment geometry is `(5, 5, 4)`, i.e. 100 neurons with a
/// maximal separation of sqrt(41).
pub fn build_lattice(dims: (usize, usize, usize)) -> Result<DistanceLattice> {
    let (nx, ny, nz) = dims;
    if nx == 0 || ny == 0 || nz == 0 {
        return Err(Error::InvalidArg(format!(
            "lattice dimensions must be positive, got {nx}x{ny}x{nz}"
        )));
    }
    let n = nx
        .checked_mul(ny)
        .and_then(|p| p.checked_mul(nz))
        .filter(|&p| p <= MAX_NEURONS)
        .ok_or_else(|| {
            Error::InvalidArg(format!(
                "lattice {nx}x{ny}x{nz} exceeds the {MAX_NEURONS}-neuron cap"
            ))
        })?;

    let coords: Vec<(usize, usize, usize)> = (0..n)
        .map(|i| (i % nx, (i / nx) % ny, i / (nx * ny)))
        .collect();
    let d = Matrix::from_fn(n, n, |i, j| {
        let (xi, yi, zi) = coords[i];
        let (xj, yj, zj) = coords[j];
        let dx = xi as f64 - xj as f64;
        let dy = yi as f64 - yj as f64;
        let dz = zi as f64 - zj as f64;
        (dx * dx + dy * dy + dz * dz).sqrt()
    });
    Ok(DistanceLattice { dims, coords, d })
}
