//! Density matrices, partial traces and seeded random states.
//!
//! Random mixed states use a Wishart-style construction: draw a `dim x rank`
//! matrix G with i.i.d. standard complex Gaussian entries from a ChaCha8
//! stream seeded by the caller, then set `rho = G G^dagger / Tr[G G^dagger]`.
//! Random pure states normalize a single Gaussian column (Haar distributed).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, hermiticity_dev, max_abs_diff, outer, CMatrix};
use crate::state::StateVector;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;

/// Which particle of a bipartite `d x d` system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Particle {
    Mu,
    Nu,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        let rho = Self { matrix };
        rho.validate()?;
        Ok(rho)
    }

    /// Wraps a matrix without checks; used for raw reconstructions.
    pub fn from_raw(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn pure(psi: &StateVector) -> Self {
        Self { matrix: outer(psi.amps()) }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { matrix: CMatrix::identity(dim, dim) / Complex64::new(dim as f64, 0.0) }
    }

    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_dev();
        if herm > HERMITIAN_TOL {
            return Err(Error::NotDensityMatrix(format!("Hermiticity deviation {herm:e}")));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::NotDensityMatrix(format!("trace {tr}")));
        }
        let min = self.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::NotDensityMatrix(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Real part of the trace.
    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn hermiticity_dev(&self) -> f64 {
        hermiticity_dev(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.matrix).first().copied().unwrap_or(0.0)
    }

    /// Max-norm distance `max_ij |a_ij - b_ij|`.
    pub fn max_norm_diff(&self, other: &Self) -> f64 {
        max_abs_diff(&self.matrix, &other.matrix)
    }

    /// `<psi|rho|psi>`.
    pub fn expectation(&self, psi: &StateVector) -> f64 {
        let a = psi.amps();
        let n = self.dim();
        assert_eq!(a.len(), n, "dimension mismatch");
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            if a[i].norm() == 0.0 {
                continue;
            }
            let row: Complex64 = (0..n).map(|j| self.matrix[(i, j)] * a[j]).sum();
            acc += a[i].conj() * row;
        }
        acc.re
    }

    /// Trace over the other particle of a `d x d` system, keeping `keep`.
    pub fn partial_trace(&self, d: usize, keep: Particle) -> Result<Self> {
        if d * d != self.dim() {
            return Err(Error::DimensionMismatch { expected: d * d, found: self.dim() });
        }
        let m = &self.matrix;
        let reduced = match keep {
            Particle::Mu => CMatrix::from_fn(d, d, |i, j| (0..d).map(|k| m[(i * d + k, j * d + k)]).sum()),
            Particle::Nu => CMatrix::from_fn(d, d, |i, j| (0..d).map(|k| m[(k * d + i, k * d + j)]).sum()),
        };
        Ok(Self { matrix: reduced })
    }

    /// `alpha * self + (1 - alpha) * other`.
    pub fn mix(&self, other: &Self, alpha: f64) -> Self {
        Self { matrix: &self.matrix * Complex64::new(alpha, 0.0) + &other.matrix * Complex64::new(1.0 - alpha, 0.0) }
    }
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> StateVector {
    let v: Vec<Complex64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::new(v.into_iter().map(|a| a / norm).collect()).expect("normalized by construction")
}

/// `G G^dagger / Tr` with `G` a `dim x rank` complex Gaussian matrix.
pub fn random_density_matrix<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    let g = CMatrix::from_fn(dim, rank, |_, _| complex_gaussian(rng));
    let w = &g * g.adjoint();
    let tr = w.trace();
    let mut m = w / tr;
    // exact Hermitian symmetry
    for i in 0..dim {
        m[(i, i)].im = 0.0;
        for j in 0..i {
            m[(j, i)] = m[(i, j)].conj();
        }
    }
    DensityMatrix::from_raw(m)
}
