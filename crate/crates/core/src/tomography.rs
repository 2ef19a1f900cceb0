//! Measurement simulation and density-matrix reconstruction from probabilities.
//!
//! Single particle (d + 1 settings):
//! `rho = sum_{b,c} p(b,c) |b;c><b;c| + sum_n p(n) |n><n| - I`.
//!
//! Two particles (d^2 + d + 1 settings):
//! `rho = -I + sum_{b,s,c1,c2} p |b,s;c1,c2><..| - (d-1) sum_{n,n'} p(n,n') |n n'><n n'|
//!        + sum_{b,n,c} p |n><n| (x) |b;c><b;c| + sum_{b,c,n} p |b;c><b;c| (x) |n><n|`.
//! The `Z^s_mu Z^{-1}_nu` correlations are diagonal in the computational
//! product basis, so they come out of that one distribution (see
//! [`zz_correlation`]) rather than from separate settings.
//!
//! Outcome ordering per setting:
//! - `SingleBasis`: outcome `c` (or `n` for the computational basis)
//! - `EntangledSet`: `c1 * d + c2`
//! - `Computational`: `n * d + n'`
//! - `ProductLeft(b)`, basis `|n>_mu |b;c>_nu`: `n * d + c`
//! - `ProductRight(b)`, basis `|b;c>_mu |n>_nu`: `c * d + n`

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::entangled::{ent_state, product_basis, EntangledLabel};
use crate::error::{Error, Result};
use crate::linalg::{hermiticity_dev, CMatrix};
use crate::mub::{computational_basis, mub_basis, mub_state, require_odd_prime, BasisLabel};
use crate::schwinger::{monomial, omega, MonomialLabel};
use crate::state::StateVector;

/// Tolerance on the per-setting probability sum.
pub const SUM_TOL: f64 = 1e-10;
/// Negative probabilities smaller than this in magnitude are clipped to zero.
pub const CLIP_TOL: f64 = 1e-12;
/// Reconstructions whose anti-Hermitian part exceeds this are rejected.
pub const RECON_HERMITIAN_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    SingleMub,
    TwoPartite,
}

/// One jointly measurable basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasurementSetting {
    /// Single-particle basis.
    SingleBasis { basis: BasisLabel },
    /// Entangled basis `{|b,s;c1,c2>}`.
    EntangledSet { b: u32, s: u32 },
    /// `Z^s_mu Z^{-1}_nu` reading; derived from `Computational`, never a separate setting.
    ZzCorrelation { s: u32 },
    /// `{|n>_mu |b;c>_nu}`.
    ProductLeft { b: u32 },
    /// `{|b;c>_mu |n>_nu}`.
    ProductRight { b: u32 },
    /// `{|n>_mu |n'>_nu}`.
    Computational,
}

impl fmt::Display for MeasurementSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasurementSetting::SingleBasis { basis: BasisLabel::Computational } => write!(f, "single(computational)"),
            MeasurementSetting::SingleBasis { basis: BasisLabel::Structured(b) } => write!(f, "single(b={b})"),
            MeasurementSetting::EntangledSet { b, s } => write!(f, "entangled(b={b},s={s})"),
            MeasurementSetting::ZzCorrelation { s } => write!(f, "zz(s={s})"),
            MeasurementSetting::ProductLeft { b } => write!(f, "product_left(b={b})"),
            MeasurementSetting::ProductRight { b } => write!(f, "product_right(b={b})"),
            MeasurementSetting::Computational => write!(f, "computational"),
        }
    }
}

impl MeasurementSetting {
    /// Stable identifier, used to select an independent random stream.
    pub fn stream_id(&self) -> u64 {
        let (tag, x, y) = match *self {
            MeasurementSetting::SingleBasis { basis: BasisLabel::Computational } => (1, 0, 0),
            MeasurementSetting::SingleBasis { basis: BasisLabel::Structured(b) } => (2, b, 0),
            MeasurementSetting::EntangledSet { b, s } => (3, b, s),
            MeasurementSetting::ZzCorrelation { s } => (4, s, 0),
            MeasurementSetting::ProductLeft { b } => (5, b, 0),
            MeasurementSetting::ProductRight { b } => (6, b, 0),
            MeasurementSetting::Computational => (7, 0, 0),
        };
        (tag << 56) | ((x as u64) << 28) | y as u64
    }
}

/// The distinct settings a scheme measures, in canonical order.
pub fn settings_for(d: u32, scheme: Scheme) -> Vec<MeasurementSetting> {
    match scheme {
        Scheme::SingleMub => (0..d)
            .map(|b| MeasurementSetting::SingleBasis { basis: BasisLabel::Structured(b) })
            .chain(std::iter::once(MeasurementSetting::SingleBasis { basis: BasisLabel::Computational }))
            .collect(),
        Scheme::TwoPartite => {
            let mut v: Vec<_> =
                (1..d).flat_map(|s| (0..d).map(move |b| MeasurementSetting::EntangledSet { b, s })).collect();
            v.push(MeasurementSetting::Computational);
            v.extend((0..d).map(|b| MeasurementSetting::ProductLeft { b }));
            v.extend((0..d).map(|b| MeasurementSetting::ProductRight { b }));
            v
        }
    }
}

/// The measurement basis of a setting, in outcome order.
pub fn setting_basis(d: u32, setting: MeasurementSetting) -> Result<Vec<StateVector>> {
    require_odd_prime(d)?;
    let comp = computational_basis(d);
    Ok(match setting {
        MeasurementSetting::SingleBasis { basis: BasisLabel::Computational } => comp.states,
        MeasurementSetting::SingleBasis { basis: BasisLabel::Structured(b) } => mub_basis(d, b)?.states,
        MeasurementSetting::EntangledSet { b, s } => (0..d)
            .flat_map(|c1| (0..d).map(move |c2| (c1, c2)))
            .map(|(c1, c2)| ent_state(d, EntangledLabel::new(d, b, s, c1, c2)?))
            .collect::<Result<_>>()?,
        MeasurementSetting::Computational | MeasurementSetting::ZzCorrelation { .. } => product_basis(&comp, &comp),
        MeasurementSetting::ProductLeft { b } => product_basis(&comp, &mub_basis(d, b)?),
        MeasurementSetting::ProductRight { b } => product_basis(&mub_basis(d, b)?, &comp),
    })
}

/// `p_k = <k|rho|k>`; tiny negatives from rounding are clipped to zero.
pub fn born_probs(rho: &DensityMatrix, basis: &[StateVector]) -> Result<Vec<f64>> {
    let mut probs = Vec::with_capacity(basis.len());
    for v in basis {
        if v.dim() != rho.dim() {
            return Err(Error::DimensionMismatch { expected: rho.dim(), found: v.dim() });
        }
        let dev = (v.norm() - 1.0).abs();
        if dev > 1e-10 {
            return Err(Error::NotOrthonormal(dev));
        }
        let p = rho.expectation(v);
        probs.push(if p < 0.0 && p > -CLIP_TOL { 0.0 } else { p });
    }
    Ok(probs)
}

/// Outcome probabilities per measurement setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbTable {
    /// Single-particle dimension d.
    pub dim: u32,
    pub scheme: Scheme,
    pub entries: BTreeMap<MeasurementSetting, Vec<f64>>,
}

impl ProbTable {
    pub fn new(dim: u32, scheme: Scheme) -> Self {
        Self { dim, scheme, entries: BTreeMap::new() }
    }

    fn outcome_count(&self) -> usize {
        match self.scheme {
            Scheme::SingleMub => self.dim as usize,
            Scheme::TwoPartite => (self.dim * self.dim) as usize,
        }
    }

    /// Checks outcome counts, sums and ranges.
    pub fn validate(&self) -> Result<()> {
        let n = self.outcome_count();
        for (setting, probs) in &self.entries {
            if probs.len() != n {
                return Err(Error::BadProbabilities(format!("{setting} has {} outcomes, expected {n}", probs.len())));
            }
            if let Some(p) = probs.iter().find(|&&p| !(-CLIP_TOL..=1.0 + SUM_TOL).contains(&p)) {
                return Err(Error::BadProbabilities(format!("{setting} has probability {p}")));
            }
            let sum: f64 = probs.iter().sum();
            if (sum - 1.0).abs() > SUM_TOL {
                return Err(Error::BadProbabilities(format!("{setting} sums to {sum}")));
            }
        }
        Ok(())
    }

    pub fn settings_used(&self) -> usize {
        self.entries.len()
    }

    fn get(&self, setting: MeasurementSetting) -> &[f64] {
        &self.entries[&setting]
    }

    fn require(&self, scheme: Scheme) -> Result<()> {
        if self.scheme != scheme {
            return Err(Error::BadProbabilities(format!("table is for {:?}, expected {scheme:?}", self.scheme)));
        }
        self.validate()?;
        let missing: Vec<String> = settings_for(self.dim, scheme)
            .into_iter()
            .filter(|s| !self.entries.contains_key(s))
            .map(|s| s.to_string())
            .collect();
        if !missing.is_empty() {
            return Err(Error::MissingSettings(missing.join(", ")));
        }
        Ok(())
    }

    /// `alpha * self + (1 - alpha) * other`, setting by setting.
    pub fn mix(&self, other: &Self, alpha: f64) -> Result<Self> {
        if self.dim != other.dim || self.scheme != other.scheme || self.entries.len() != other.entries.len() {
            return Err(Error::BadProbabilities("tables do not share settings".into()));
        }
        let mut out = Self::new(self.dim, self.scheme);
        for (setting, p) in &self.entries {
            let q = other.entries.get(setting).ok_or_else(|| Error::MissingSettings(setting.to_string()))?;
            out.entries.insert(*setting, p.iter().zip(q).map(|(a, b)| alpha * a + (1.0 - alpha) * b).collect());
        }
        Ok(out)
    }
}

/// Exact Born probabilities for every setting of `scheme`.
pub fn exact_table(rho: &DensityMatrix, d: u32, scheme: Scheme) -> Result<ProbTable> {
    let mut table = ProbTable::new(d, scheme);
    for setting in settings_for(d, scheme) {
        table.entries.insert(setting, born_probs(rho, &setting_basis(d, setting)?)?);
    }
    Ok(table)
}

/// Adds `weight |v><v|` into `acc`, skipping zero amplitudes.
fn add_projector(acc: &mut CMatrix, v: &StateVector, weight: f64) {
    if weight == 0.0 {
        return;
    }
    let a = v.amps();
    let nz: Vec<usize> = (0..a.len()).filter(|&i| a[i].norm() != 0.0).collect();
    for &i in &nz {
        let wi = a[i] * weight;
        for &j in &nz {
            acc[(i, j)] += wi * a[j].conj();
        }
    }
}

fn accumulate(acc: &mut CMatrix, d: u32, table: &ProbTable, setting: MeasurementSetting, scale: f64) -> Result<()> {
    let basis = setting_basis(d, setting)?;
    for (v, &p) in basis.iter().zip(table.get(setting)) {
        add_projector(acc, v, scale * p.max(0.0));
    }
    Ok(())
}

fn finish(acc: CMatrix) -> Result<DensityMatrix> {
    let dev = hermiticity_dev(&acc);
    if dev > RECON_HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    Ok(DensityMatrix::from_raw(acc))
}

/// Single-particle reconstruction from the d + 1 MUB distributions.
pub fn reconstruct_single(d: u32, table: &ProbTable) -> Result<DensityMatrix> {
    require_odd_prime(d)?;
    if table.dim != d {
        return Err(Error::DimensionMismatch { expected: d as usize, found: table.dim as usize });
    }
    table.require(Scheme::SingleMub)?;
    let n = d as usize;
    let mut acc = -CMatrix::identity(n, n);
    for setting in settings_for(d, Scheme::SingleMub) {
        accumulate(&mut acc, d, table, setting, 1.0)?;
    }
    finish(acc)
}

/// Two-particle reconstruction from the d^2 + d + 1 distributions.
pub fn reconstruct_two(d: u32, table: &ProbTable) -> Result<DensityMatrix> {
    require_odd_prime(d)?;
    if table.dim != d {
        return Err(Error::DimensionMismatch { expected: d as usize, found: table.dim as usize });
    }
    table.require(Scheme::TwoPartite)?;
    let n = (d * d) as usize;
    let mut acc = -CMatrix::identity(n, n);
    for setting in settings_for(d, Scheme::TwoPartite) {
        let scale = match setting {
            MeasurementSetting::Computational => -(d as f64 - 1.0),
            _ => 1.0,
        };
        accumulate(&mut acc, d, table, setting, scale)?;
    }
    finish(acc)
}

/// `Tr[rho (Z^s_mu Z^{-1}_nu)^r]` from the computational product distribution.
pub fn zz_correlation(table: &ProbTable, s: u32, r: u32) -> Result<Complex64> {
    let d = table.dim;
    let probs = table
        .entries
        .get(&MeasurementSetting::Computational)
        .ok_or_else(|| Error::MissingSettings(MeasurementSetting::Computational.to_string()))?;
    let du = d as usize;
    Ok(probs
        .iter()
        .enumerate()
        .map(|(k, &p)| {
            let (n, n2) = ((k / du) as i64, (k % du) as i64);
            omega(d, r as i64 * (s as i64 * n - n2)) * p
        })
        .sum())
}

/// Measurement budgets of the tomography schemes being compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CountScheme {
    /// d + 1
    SingleMub,
    /// d^2 + d + 1: entangled, product and computational settings
    TwoPartiteEntangled,
    /// d^2 + 1: a full two-particle MUB set
    TwoPartiteFullMub,
    /// (d + 1)^2: products of single-particle MUBs
    ProductSingleMub,
}

/// Number of distinct measurement settings. The product scheme measures each
/// particle in its d + 1 bases, giving `(d+1)^2` (not `(d^2+1)^2`).
pub fn measurement_count(d: u32, scheme: CountScheme) -> u64 {
    let d = d as u64;
    match scheme {
        CountScheme::SingleMub => d + 1,
        CountScheme::TwoPartiteEntangled => d * d + d + 1,
        CountScheme::TwoPartiteFullMub => d * d + 1,
        CountScheme::ProductSingleMub => (d + 1) * (d + 1),
    }
}

/// `M1 = U + U^dagger`, `M2 = i (U - U^dagger)` with `U = X Z^b`.
pub fn hermitian_pair(d: u32, b: u32) -> Result<(CMatrix, CMatrix)> {
    require_odd_prime(d)?;
    if b >= d {
        return Err(Error::BadLabel(format!("b = {b} must be below {d}")));
    }
    let u = monomial(d, MonomialLabel { m: 1, l: b }).into_matrix();
    let ud = u.adjoint();
    let m1 = &u + &ud;
    let m2 = (&u - &ud) * Complex64::new(0.0, 1.0);
    Ok((m1, m2))
}

/// Eigenvalue pair of `(M1, M2)` on `|b;c>`: `(2 cos(2 pi c/d), -2 sin(2 pi c/d))`.
pub fn hermitian_pair_eigenvalues(d: u32, c: u32) -> (f64, f64) {
    let theta = 2.0 * std::f64::consts::PI * c as f64 / d as f64;
    (2.0 * theta.cos(), -2.0 * theta.sin())
}

/// Max residual `|| M |b;c> - lambda |b;c> ||` over c for both members of the pair.
pub fn hermitian_pair_residual(d: u32, b: u32) -> Result<f64> {
    let (m1, m2) = hermitian_pair(d, b)?;
    let mut worst: f64 = 0.0;
    for c in 0..d {
        let psi = mub_state(d, b, c)?;
        let v = nalgebra::DVector::from_column_slice(psi.amps());
        let (l1, l2) = hermitian_pair_eigenvalues(d, c);
        worst = worst.max((&m1 * &v - &v * Complex64::new(l1, 0.0)).norm());
        worst = worst.max((&m2 * &v - &v * Complex64::new(l2, 0.0)).norm());
    }
    Ok(worst)
}

/// Multinomial frequencies from `shots` draws of `probs`, via sequential binomials.
fn multinomial_frequencies(probs: &[f64], shots: u64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut remaining = shots;
    let mut mass = 1.0f64;
    let mut out = Vec::with_capacity(probs.len());
    for (k, &p) in probs.iter().enumerate() {
        let count = if k + 1 == probs.len() || remaining == 0 {
            remaining
        } else {
            let q = if mass > 0.0 { (p.max(0.0) / mass).clamp(0.0, 1.0) } else { 0.0 };
            Binomial::new(remaining, q).expect("q in [0,1]").sample(rng)
        };
        remaining -= count;
        mass -= p.max(0.0);
        out.push(count as f64 / shots as f64);
    }
    out
}

/// Sampled frequencies for one setting. The random stream is derived from
/// `(seed, setting)` so settings are independent and order-insensitive.
pub fn sample_probs(
    rho: &DensityMatrix,
    d: u32,
    setting: MeasurementSetting,
    shots: u64,
    seed: u64,
) -> Result<Vec<f64>> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let exact = born_probs(rho, &setting_basis(d, setting)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(setting.stream_id());
    Ok(multinomial_frequencies(&exact, shots, &mut rng))
}

/// Sampled frequencies for every setting of `scheme`.
pub fn sample_table(rho: &DensityMatrix, d: u32, scheme: Scheme, shots: u64, seed: u64) -> Result<ProbTable> {
    let mut table = ProbTable::new(d, scheme);
    for setting in settings_for(d, scheme) {
        table.entries.insert(setting, sample_probs(rho, d, setting, shots, seed)?);
    }
    Ok(table)
}
