use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{inner, root_of_unity};

/// Norm tolerance for vectors built by this crate.
pub const NORM_TOL: f64 = 1e-12;

/// Integer phases of a flat state: amplitude `n` is `w^{exps[n]} / sqrt(dim)`
/// with `w = exp(2 pi i / order)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseExponents {
    pub order: u32,
    pub exps: Vec<u32>,
}

/// A pure state as a list of complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
    phases: Option<PhaseExponents>,
}

impl StateVector {
    /// Wraps amplitudes, rejecting vectors whose norm is off by more than `1e-10`.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotOrthonormal((norm - 1.0).abs()));
        }
        Ok(Self { amps, phases: None })
    }

    pub(crate) fn from_amps_unchecked(amps: Vec<Complex64>) -> Self {
        Self { amps, phases: None }
    }

    /// Flat state `sum_n w^{exps[n]} |n> / sqrt(len)`.
    pub fn from_phases(order: u32, exps: Vec<u32>) -> Self {
        let scale = 1.0 / (exps.len() as f64).sqrt();
        let amps = exps.iter().map(|&e| root_of_unity(order, e as i64) * scale).collect();
        Self { amps, phases: Some(PhaseExponents { order, exps }) }
    }

    /// The computational basis state `|k>`.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[k] = Complex64::new(1.0, 0.0);
        Self { amps, phases: None }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn phases(&self) -> Option<&PhaseExponents> {
        self.phases.as_ref()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        inner(&self.amps, &other.amps)
    }

    /// `|self> (x) |other>`, index `i * other.dim() + k`.
    pub fn tensor(&self, other: &Self) -> Self {
        let amps = self.amps.iter().flat_map(|a| other.amps.iter().map(move |b| a * b)).collect();
        Self { amps, phases: None }
    }

    /// Max elementwise distance after removing the global phase, fixed by the
    /// first nonzero amplitude of `reference`. `None` when `reference` is zero.
    pub fn distance_up_to_phase(&self, reference: &Self) -> Option<(f64, Complex64)> {
        assert_eq!(self.dim(), reference.dim(), "dimension mismatch");
        let (k, r) = reference.amps.iter().enumerate().find(|(_, a)| a.norm() > 1e-9)?;
        let ratio = self.amps[k] / r;
        let phase = if ratio.norm() > 0.0 { ratio / ratio.norm() } else { Complex64::new(1.0, 0.0) };
        let dev = self.amps.iter().zip(&reference.amps).map(|(a, b)| (a - phase * b).norm()).fold(0.0, f64::max);
        Some((dev, phase))
    }
}

/// Max deviation of the Gram matrix of `states` from the identity.
pub fn gram_deviation(states: &[StateVector]) -> f64 {
    let mut dev: f64 = 0.0;
    for (i, u) in states.iter().enumerate() {
        for (j, v) in states.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((u.inner(v) - Complex64::new(target, 0.0)).norm());
        }
    }
    dev
}

/// Max deviation of `sum_k |k><k|` from the identity.
pub fn identity_resolution_dev(states: &[StateVector]) -> f64 {
    let Some(first) = states.first() else { return 0.0 };
    let n = first.dim();
    let mut acc = vec![Complex64::new(0.0, 0.0); n * n];
    for s in states {
        let a = s.amps();
        for i in 0..n {
            if a[i].norm() == 0.0 {
                continue;
            }
            for j in 0..n {
                acc[i * n + j] += a[i] * a[j].conj();
            }
        }
    }
    acc.iter()
        .enumerate()
        .map(|(k, v)| {
            let target = if k / n == k % n { 1.0 } else { 0.0 };
            (v - Complex64::new(target, 0.0)).norm()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unnormalized() {
        assert!(StateVector::new(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]).is_err());
        assert!(StateVector::new(vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)]).is_ok());
    }

    #[test]
    fn flat_state_from_phases() {
        let s = StateVector::from_phases(3, vec![0, 2, 1]);
        assert!((s.norm() - 1.0).abs() < NORM_TOL);
        let w = root_of_unity(3, 1);
        assert!((s.amps()[1] - w.conj() / 3f64.sqrt()).norm() < 1e-15);
    }

    #[test]
    fn distance_up_to_phase_ignores_global_phase() {
        let s = StateVector::from_phases(5, vec![0, 1, 2, 3, 4]);
        let t = StateVector::from_phases(5, vec![2, 3, 4, 0, 1]);
        let (dev, phase) = t.distance_up_to_phase(&s).unwrap();
        assert!(dev < 1e-12);
        assert!((phase - root_of_unity(5, 2)).norm() < 1e-12);
    }

    #[test]
    fn computational_basis_is_orthonormal() {
        let states: Vec<_> = (0..4).map(|k| StateVector::basis_state(4, k)).collect();
        assert_eq!(gram_deviation(&states), 0.0);
        assert_eq!(identity_resolution_dev(&states), 0.0);
    }
}
