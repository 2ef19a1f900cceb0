//! Single-particle mutually unbiased bases.
//!
//! For an odd prime d the structured bases are
//! `|b;c> = d^{-1/2} sum_n w^{(b/2) n(n-1) - c n} |n>`, the eigenbases of `X Z^b`.
//! For d = p^n the states are labelled by field elements and
//! `|b;c> = d^{-1/2} sum_n w_p^{tr[(b/2) n^2 + c n]} |n>` with `w_p = exp(2 pi i / p)`.
//! Together with the computational basis either family gives d + 1 bases.
//!
//! Amplitudes are assembled from integer phase exponents; the coefficient of
//! `|0>` is always `+1/sqrt(d)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::finite_field::{is_prime, Field, FieldElement};
use crate::linalg::inner;
use crate::schwinger::{monomial, omega, MonomialLabel, UnitaryMatrix, WeylOperator};
use crate::state::{gram_deviation, StateVector};

/// Which basis of the MUB set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisLabel {
    Computational,
    /// The eigenbasis of `X Z^b`; for prime powers `b` is a field-element index.
    Structured(u32),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MubBasis {
    pub label: BasisLabel,
    pub states: Vec<StateVector>,
}

impl MubBasis {
    pub fn dim(&self) -> usize {
        self.states.len()
    }
}

pub(crate) fn require_odd_prime(d: u32) -> Result<()> {
    if d < 3 || !is_prime(d as u64) {
        return Err(Error::NotOddPrime(d as u64));
    }
    Ok(())
}

fn check_label(d: u32, name: &str, v: u32) -> Result<()> {
    if v >= d {
        return Err(Error::BadLabel(format!("{name} = {v} must be below {d}")));
    }
    Ok(())
}

/// Phase exponents `(b/2) n(n-1) - c n mod d`, with `b/2 = b * half`.
pub(crate) fn mub_exponents(d: u32, b: u32, c: u32) -> Vec<u32> {
    let d64 = d as u64;
    let half = d64.div_ceil(2);
    (0..d64)
        .map(|n| {
            let quad = half * b as u64 % d64 * (n * (n + d64 - 1) % d64) % d64;
            ((quad + d64 * d64 - c as u64 * n) % d64) as u32
        })
        .collect()
}

/// `|b;c>` for an odd prime d.
pub fn mub_state(d: u32, b: u32, c: u32) -> Result<StateVector> {
    require_odd_prime(d)?;
    check_label(d, "b", b)?;
    check_label(d, "c", c)?;
    Ok(StateVector::from_phases(d, mub_exponents(d, b, c)))
}

/// `|b;c>` over GF(p^n); amplitudes are p-th roots of unity.
pub fn mub_state_pp(field: &Field, b: &FieldElement, c: &FieldElement) -> Result<StateVector> {
    if b.field() != field || c.field() != field {
        return Err(Error::MixedFields);
    }
    let coef = field.half().checked_mul(b)?;
    let exps = field
        .elements()
        .map(|n| {
            let quad = &(&coef * &n) * &n;
            (&quad + &(c * &n)).trace()
        })
        .collect();
    Ok(StateVector::from_phases(field.characteristic(), exps))
}

pub fn computational_basis(d: u32) -> MubBasis {
    MubBasis {
        label: BasisLabel::Computational,
        states: (0..d as usize).map(|k| StateVector::basis_state(d as usize, k)).collect(),
    }
}

/// The structured basis `{|b;c>}_c` for an odd prime d.
pub fn mub_basis(d: u32, b: u32) -> Result<MubBasis> {
    let states = (0..d).map(|c| mub_state(d, b, c)).collect::<Result<_>>()?;
    Ok(MubBasis { label: BasisLabel::Structured(b), states })
}

/// The structured basis `{|b;c>}_c` over GF(p^n), ordered by the index of c.
pub fn mub_basis_pp(field: &Field, b: &FieldElement) -> Result<MubBasis> {
    let states = field.elements().map(|c| mub_state_pp(field, b, &c)).collect::<Result<_>>()?;
    Ok(MubBasis { label: BasisLabel::Structured(b.index()), states })
}

/// The d structured bases (b = 0..d-1) followed by the computational basis.
pub fn all_mubs(d: u32) -> Result<Vec<MubBasis>> {
    require_odd_prime(d)?;
    let mut bases = (0..d).map(|b| mub_basis(d, b)).collect::<Result<Vec<_>>>()?;
    bases.push(computational_basis(d));
    Ok(bases)
}

/// Prime-power analogue of [`all_mubs`]; structured bases ordered by field index.
pub fn all_mubs_pp(field: &Field) -> Result<Vec<MubBasis>> {
    let mut bases = field.elements().map(|b| mub_basis_pp(field, &b)).collect::<Result<Vec<_>>>()?;
    bases.push(computational_basis(field.order()));
    Ok(bases)
}

/// Largest deviation found by [`verify_unbiased`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnbiasedReport {
    pub max_dev: f64,
    /// True when the two bases had the same label and orthonormality was checked.
    pub same_basis: bool,
}

/// Max over state pairs of `| |<u|v>| - 1/sqrt(d) |`; for two copies of the
/// same basis, the Gram-matrix deviation from the identity.
pub fn verify_unbiased(b1: &MubBasis, b2: &MubBasis) -> Result<UnbiasedReport> {
    let d = b1.states.first().map_or(0, StateVector::dim);
    let d2 = b2.states.first().map_or(0, StateVector::dim);
    if d != d2 {
        return Err(Error::DimensionMismatch { expected: d, found: d2 });
    }
    if b1.label == b2.label {
        return Ok(UnbiasedReport { max_dev: gram_deviation(&b1.states), same_basis: true });
    }
    let target = 1.0 / (d as f64).sqrt();
    let max_dev = b1
        .states
        .iter()
        .flat_map(|u| b2.states.iter().map(move |v| (inner(u.amps(), v.amps()).norm() - target).abs()))
        .fold(0.0, f64::max);
    Ok(UnbiasedReport { max_dev, same_basis: false })
}

/// Max `|| X Z^b |b;c> - w^c |b;c> ||` over c.
pub fn eigen_relation_dev(d: u32, b: u32) -> Result<f64> {
    let op = WeylOperator::shift_clock(d, 1, b as i64).to_unitary();
    let basis = mub_basis(d, b)?;
    Ok(basis
        .states
        .iter()
        .enumerate()
        .map(|(c, s)| {
            let lambda = omega(d, c as i64);
            op.apply(s.amps()).iter().zip(s.amps()).map(|(x, y)| (x - lambda * y).norm_sqr()).sum::<f64>().sqrt()
        })
        .fold(0.0, f64::max))
}

/// For each state of `a`, the index of the state of `b` equal to it up to a
/// global phase. `None` if some state has no partner within `tol`.
pub fn match_up_to_phase(a: &MubBasis, b: &MubBasis, tol: f64) -> Option<Vec<usize>> {
    a.states
        .iter()
        .map(|u| b.states.iter().position(|v| u.distance_up_to_phase(v).is_some_and(|(dev, _)| dev < tol)))
        .collect()
}

/// Eigenphases `W[alpha][nu] = <nu|U_alpha|nu>` of d commuting unitaries
/// diagonal in `basis`, with `U_0 = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pub basis: MubBasis,
    pub eigenphases: Vec<Vec<Complex64>>,
    /// Largest off-diagonal `|<nu|U_alpha|nu'>|` seen while extracting.
    pub off_diagonal: f64,
}

impl SpectralData {
    /// Extracts eigenphases of `ops` in `basis`. `ops[0]` must be the identity and
    /// every extracted eigenphase must be unimodular.
    pub fn from_operators(basis: MubBasis, ops: &[UnitaryMatrix]) -> Result<Self> {
        let d = basis.states.len();
        if ops.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: ops.len() });
        }
        let mut off_diagonal: f64 = 0.0;
        let mut eigenphases = Vec::with_capacity(d);
        for op in ops {
            let images: Vec<Vec<Complex64>> = basis.states.iter().map(|s| op.apply(s.amps())).collect();
            let mut row = Vec::with_capacity(d);
            for (nu, s) in basis.states.iter().enumerate() {
                for (nu2, img) in images.iter().enumerate() {
                    let w = inner(s.amps(), img);
                    if nu == nu2 {
                        row.push(w);
                    } else {
                        off_diagonal = off_diagonal.max(w.norm());
                    }
                }
            }
            eigenphases.push(row);
        }
        let unimodular_dev = eigenphases.iter().flatten().map(|w| (w.norm() - 1.0).abs()).fold(0.0, f64::max);
        if unimodular_dev > 1e-10 {
            return Err(Error::NotUnitary(unimodular_dev));
        }
        let identity_dev = eigenphases[0].iter().map(|w| (w - 1.0).norm()).fold(0.0, f64::max);
        if identity_dev > 1e-10 {
            return Err(Error::BadLabel("U_0 must be the identity".into()));
        }
        Ok(Self { basis, eigenphases, off_diagonal })
    }
}

/// Spectral data of `U_alpha = (X Z^b)^alpha` in the structured basis b.
pub fn spectral_data(d: u32, b: u32) -> Result<SpectralData> {
    let basis = mub_basis(d, b)?;
    let xzb = monomial(d, MonomialLabel { m: 1, l: b });
    let ops: Vec<_> = (0..d).map(|a| xzb.pow(a)).collect();
    SpectralData::from_operators(basis, &ops)
}

/// Spectral data of `U_alpha = Z^alpha` in the computational basis.
pub fn clock_spectral_data(d: u32) -> Result<SpectralData> {
    require_odd_prime(d)?;
    let ops: Vec<_> = (0..d).map(|a| monomial(d, MonomialLabel { m: 0, l: a })).collect();
    SpectralData::from_operators(computational_basis(d), &ops)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompletenessReport {
    pub max_dev: f64,
}

/// Max over `(nu, nu')` of `| (1/d) sum_alpha W[alpha][nu] conj(W[alpha][nu']) - delta |`.
pub fn verify_completeness(sd: &SpectralData) -> CompletenessReport {
    let d = sd.eigenphases.len();
    let mut max_dev: f64 = 0.0;
    for nu in 0..d {
        for nu2 in 0..d {
            let s: Complex64 = sd.eigenphases.iter().map(|row| row[nu] * row[nu2].conj()).sum::<Complex64>() / d as f64;
            let target = if nu == nu2 { 1.0 } else { 0.0 };
            max_dev = max_dev.max((s - target).norm());
        }
    }
    CompletenessReport { max_dev }
}
