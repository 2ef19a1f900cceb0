//! Shift and clock operators X, Z, their monomials `X^m Z^l`, Hilbert-Schmidt
//! geometry, and the rewriting `X^m Z^l = w^nu (X Z^b)^m`.
//!
//! Conventions: `Z|n> = w^n |n>`, `X|n> = |n+1 mod d>`, `w = exp(2 pi i / d)`.
//! With these, `Z X = w X Z`.
//!
//! Two representations are provided. [`UnitaryMatrix`] is a dense complex matrix.
//! [`WeylOperator`] stores a monomial unitary (one root-of-unity entry per
//! column) with its phases as integer exponents, so products and powers are
//! exact; it is what the exhaustive operator scans run on.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::finite_field::Field;
use crate::linalg::{max_abs_diff, root_of_unity, CMatrix};

/// Elementwise tolerance for `U U^dagger = I`.
pub const UNITARY_TOL: f64 = 1e-12;

/// `e^{2 pi i k / d}`.
pub fn omega(d: u32, k: i64) -> Complex64 {
    root_of_unity(d, k)
}

/// A dense unitary matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    matrix: CMatrix,
}

impl UnitaryMatrix {
    /// Wraps `matrix`, checking it is square and unitary to [`UNITARY_TOL`].
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        let u = Self { matrix };
        let dev = u.unitarity_dev();
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(u)
    }

    pub(crate) fn from_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: CMatrix::identity(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn unitarity_dev(&self) -> f64 {
        let n = self.dim();
        max_abs_diff(&(&self.matrix * self.matrix.adjoint()), &CMatrix::identity(n, n))
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint() }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self { matrix: &self.matrix * &rhs.matrix }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::identity(self.dim());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiplies by a unimodular scalar.
    pub fn scaled(&self, phase: Complex64) -> Self {
        Self { matrix: &self.matrix * phase }
    }

    /// `self (x) rhs`, with `self` acting on the first (outer) tensor factor.
    pub fn kron(&self, rhs: &Self) -> Self {
        Self { matrix: self.matrix.kronecker(&rhs.matrix) }
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim());
        (0..self.dim()).map(|i| (0..self.dim()).map(|j| self.matrix[(i, j)] * v[j]).sum()).collect()
    }

    /// Frobenius norm of `self rhs - rhs self`.
    pub fn commutator_norm(&self, rhs: &Self) -> f64 {
        (&self.matrix * &rhs.matrix - &rhs.matrix * &self.matrix).norm()
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        max_abs_diff(&self.matrix, &rhs.matrix)
    }
}

fn check_dim(d: u32) -> Result<()> {
    if d < 2 {
        return Err(Error::UnsupportedDimension(d as u64, "shift and clock need d >= 2"));
    }
    Ok(())
}

/// The cyclic shift `X|n> = |n+1 mod d>`.
pub fn build_x(d: u32) -> Result<UnitaryMatrix> {
    check_dim(d)?;
    Ok(WeylOperator::shift_clock(d, 1, 0).to_unitary())
}

/// The clock `Z = diag(1, w, ..., w^{d-1})`.
pub fn build_z(d: u32) -> Result<UnitaryMatrix> {
    check_dim(d)?;
    Ok(WeylOperator::shift_clock(d, 0, 1).to_unitary())
}

/// Exponent pair `(m, l)` of `X^m Z^l`, reduced mod d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonomialLabel {
    pub m: u32,
    pub l: u32,
}

impl MonomialLabel {
    pub fn new(d: u32, m: i64, l: i64) -> Self {
        let d = d as i64;
        Self { m: m.rem_euclid(d) as u32, l: l.rem_euclid(d) as u32 }
    }
}

/// `X^m Z^l` as a dense matrix (Z applied first).
pub fn monomial(d: u32, lab: MonomialLabel) -> UnitaryMatrix {
    WeylOperator::shift_clock(d, lab.m as i64, lab.l as i64).to_unitary()
}

/// Hilbert-Schmidt inner product `Tr[A B^dagger]`.
pub fn hs_inner(a: &UnitaryMatrix, b: &UnitaryMatrix) -> Result<Complex64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let n = a.dim();
    Ok((0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| a.matrix[(i, j)] * b.matrix[(i, j)].conj()).sum())
}

/// `X^m Z^l = w^nu (X Z^b)^m` for `m != 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CanonicalMonomial {
    pub b: u32,
    pub m: u32,
    pub nu: u32,
}

impl CanonicalMonomial {
    /// Rebuilds `w^nu (X Z^b)^m` densely.
    pub fn to_unitary(&self, d: u32) -> UnitaryMatrix {
        let xzb = monomial(d, MonomialLabel { m: 1, l: self.b });
        xzb.pow(self.m).scaled(omega(d, self.nu as i64))
    }
}

/// `b = l/m` and `nu = -(b/2) m (m-1)`, computed in the prime field.
///
/// Only prime fields are accepted: the operator product rule for extension
/// fields is not part of this construction.
pub fn canonical_form(field: &Field, lab: MonomialLabel) -> Result<CanonicalMonomial> {
    if !field.is_prime_field() {
        return Err(Error::UnsupportedDimension(field.order() as u64, "monomial rewriting is prime-d only"));
    }
    let d = field.order();
    if lab.m >= d || lab.l >= d {
        return Err(Error::BadLabel(format!("({}, {}) not reduced mod {d}", lab.m, lab.l)));
    }
    if lab.m == 0 {
        return Err(Error::BadLabel("m = 0 has no canonical (X Z^b)^m form".into()));
    }
    let m = field.element(lab.m);
    let b = field.element(lab.l).checked_div(&m)?;
    let m_minus_1 = &m - &field.one();
    let nu = -(&(&(&field.half() * &b) * &m) * &m_minus_1);
    Ok(CanonicalMonomial { b: b.index(), m: lab.m, nu: nu.index() })
}

/// A monomial unitary: column `j` holds `w^{exps[j]}` in row `targets[j]`,
/// where `w` is the primitive root of unity of order `order`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeylOperator {
    order: u32,
    targets: Vec<u32>,
    exps: Vec<u32>,
}

impl WeylOperator {
    pub fn identity(dim: usize, order: u32) -> Self {
        Self { order, targets: (0..dim as u32).collect(), exps: vec![0; dim] }
    }

    /// `X^m Z^l` on `C^d`: `|j> -> w^{l j} |j + m>`.
    pub fn shift_clock(d: u32, m: i64, l: i64) -> Self {
        let lab = MonomialLabel::new(d, m, l);
        let targets = (0..d).map(|j| (j + lab.m) % d).collect();
        let exps = (0..d).map(|j| ((lab.l as u64 * j as u64) % d as u64) as u32).collect();
        Self { order: d, targets, exps }
    }

    pub fn dim(&self) -> usize {
        self.targets.len()
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn targets(&self) -> &[u32] {
        &self.targets
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn is_identity(&self) -> bool {
        self.targets.iter().enumerate().all(|(j, &t)| t as usize == j) && self.exps.iter().all(|&e| e == 0)
    }

    /// The product `self * rhs`.
    pub fn compose(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        assert_eq!(self.order, rhs.order, "phase order mismatch");
        let (targets, exps) = rhs
            .targets
            .iter()
            .zip(&rhs.exps)
            .map(|(&t, &e)| (self.targets[t as usize], (e + self.exps[t as usize]) % self.order))
            .unzip();
        Self { order: self.order, targets, exps }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::identity(self.dim(), self.order), |acc, _| acc.compose(self))
    }

    pub fn adjoint(&self) -> Self {
        let mut targets = vec![0; self.dim()];
        let mut exps = vec![0; self.dim()];
        for (j, (&t, &e)) in self.targets.iter().zip(&self.exps).enumerate() {
            targets[t as usize] = j as u32;
            exps[t as usize] = (self.order - e) % self.order;
        }
        Self { order: self.order, targets, exps }
    }

    /// Multiplies by `w^k`.
    pub fn times_phase(&self, k: i64) -> Self {
        let shift = k.rem_euclid(self.order as i64) as u32;
        Self {
            order: self.order,
            targets: self.targets.clone(),
            exps: self.exps.iter().map(|&e| (e + shift) % self.order).collect(),
        }
    }

    /// `self (x) rhs`; index `(i * rhs.dim() + k)` is `|i>|k>`.
    pub fn kron(&self, rhs: &Self) -> Self {
        assert_eq!(self.order, rhs.order, "phase order mismatch");
        let db = rhs.dim() as u32;
        let mut targets = Vec::with_capacity(self.dim() * rhs.dim());
        let mut exps = Vec::with_capacity(self.dim() * rhs.dim());
        for (&ta, &ea) in self.targets.iter().zip(&self.exps) {
            for (&tb, &eb) in rhs.targets.iter().zip(&rhs.exps) {
                targets.push(ta * db + tb);
                exps.push((ea + eb) % self.order);
            }
        }
        Self { order: self.order, targets, exps }
    }

    pub fn to_dense(&self) -> CMatrix {
        let n = self.dim();
        let mut m = CMatrix::zeros(n, n);
        for (j, (&t, &e)) in self.targets.iter().zip(&self.exps).enumerate() {
            m[(t as usize, j)] = root_of_unity(self.order, e as i64);
        }
        m
    }

    pub fn to_unitary(&self) -> UnitaryMatrix {
        UnitaryMatrix::from_unchecked(self.to_dense())
    }

    /// `Tr[self rhs^dagger]`.
    pub fn hs_inner(&self, rhs: &Self) -> Complex64 {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        (0..self.dim())
            .filter(|&j| self.targets[j] == rhs.targets[j])
            .map(|j| root_of_unity(self.order, self.exps[j] as i64 - rhs.exps[j] as i64))
            .sum()
    }

    /// Frobenius norm of `self rhs - rhs self`, evaluated entrywise from the
    /// complex values of both products.
    pub fn commutator_norm(&self, rhs: &Self) -> f64 {
        let ab = self.compose(rhs);
        let ba = rhs.compose(self);
        let sq: f64 = (0..ab.dim())
            .map(|j| {
                let x = root_of_unity(self.order, ab.exps[j] as i64);
                let y = root_of_unity(self.order, ba.exps[j] as i64);
                if ab.targets[j] == ba.targets[j] {
                    (x - y).norm_sqr()
                } else {
                    x.norm_sqr() + y.norm_sqr()
                }
            })
            .sum();
        sq.sqrt()
    }

    /// `Some(k)` when `self = w^k rhs`.
    pub fn phase_relative_to(&self, rhs: &Self) -> Option<u32> {
        if self.targets != rhs.targets || self.order != rhs.order {
            return None;
        }
        let k = (self.exps[0] + self.order - rhs.exps[0]) % self.order;
        self.exps.iter().zip(&rhs.exps).all(|(&a, &b)| (a + self.order - b) % self.order == k).then_some(k)
    }
}
