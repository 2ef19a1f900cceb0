//! Two-particle operator classification and the partially unbiased entangled bases.
//!
//! Tensor convention: component `n * d + k` of a two-particle vector is
//! `|n>_mu |k>_nu` ("row-major mu x nu").
//!
//! The d(d-1) entangled bases are labelled by `b in 0..d`, `s in 1..d`:
//! `|b,s;c1,c2> = d^{-1/2} sum_n w^{(s^2 b/2) n(n-1) - c1 n} |n>|s n + c2>`.
//! Basis (b,s) is the joint eigenbasis of `A = X (x) X^s Z^{sb}` and
//! `B = Z^s (x) Z^{-1}`; the cluster of operators `(A B^m)^{m1}`, `B^r` and the
//! identity has d^2 commuting, Hilbert-Schmidt orthogonal members.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::density::{DensityMatrix, Particle};
use crate::error::{Error, Result};
use crate::finite_field::{Field, FieldElement};
use crate::linalg::root_of_unity;
use crate::mub::{mub_exponents, mub_state, mub_state_pp, require_odd_prime, MubBasis};
use crate::schwinger::{omega, UnitaryMatrix, WeylOperator};
use crate::state::{identity_resolution_dev, StateVector};

/// Deviation above which a projection is reported as a mismatch.
pub const PROJECTION_TOL: f64 = 1e-10;

fn inv_mod(a: u32, d: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(d));
    let (mut acc, mut base, mut e) = (1u64, a as u64 % d as u64, d as u64 - 2);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % d as u64;
        }
        base = base * base % d as u64;
        e >>= 1;
    }
    acc as u32
}

fn mul_mod(a: u32, b: u32, d: u32) -> u32 {
    (a as u64 * b as u64 % d as u64) as u32
}

fn neg_mod(a: u32, d: u32) -> u32 {
    (d - a % d) % d
}

/// Exponents of `(X^{m1} Z^{l1})_mu (X^{m2} Z^{l2})_nu`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TwoPartyLabel {
    pub m1: u32,
    pub l1: u32,
    pub m2: u32,
    pub l2: u32,
}

impl TwoPartyLabel {
    pub fn operator(&self, d: u32) -> WeylOperator {
        WeylOperator::shift_clock(d, self.m1 as i64, self.l1 as i64).kron(&WeylOperator::shift_clock(
            d,
            self.m2 as i64,
            self.l2 as i64,
        ))
    }

    /// All d^4 labels, `m1` slowest.
    pub fn all(d: u32) -> impl Iterator<Item = TwoPartyLabel> {
        (0..d).flat_map(move |m1| {
            (0..d).flat_map(move |l1| (0..d).flat_map(move |m2| (0..d).map(move |l2| TwoPartyLabel { m1, l1, m2, l2 })))
        })
    }
}

/// The four operator families. `m1, m2` range over `1..d`, the `b`s over `0..d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyTag {
    /// `(X Z^{b1})^{m1}_mu (X Z^{b2})^{m2}_nu`
    BothX { b1: u32, b2: u32, m1: u32, m2: u32 },
    /// `Z^{b1}_mu (X Z^{b2})^{m2}_nu`
    ZLeft { b1: u32, b2: u32, m2: u32 },
    /// `(X Z^{b1})^{m1}_mu Z^{b2}_nu`
    ZRight { b1: u32, m1: u32, b2: u32 },
    /// `Z^{b1}_mu Z^{b2}_nu`
    BothZ { b1: u32, b2: u32 },
}

impl FamilyTag {
    pub fn family_index(&self) -> usize {
        match self {
            FamilyTag::BothX { .. } => 0,
            FamilyTag::ZLeft { .. } => 1,
            FamilyTag::ZRight { .. } => 2,
            FamilyTag::BothZ { .. } => 3,
        }
    }

    pub fn operator(&self, d: u32) -> WeylOperator {
        let xzb = |b: u32, m: u32| WeylOperator::shift_clock(d, 1, b as i64).pow(m);
        let z = |b: u32| WeylOperator::shift_clock(d, 0, b as i64);
        match *self {
            FamilyTag::BothX { b1, b2, m1, m2 } => xzb(b1, m1).kron(&xzb(b2, m2)),
            FamilyTag::ZLeft { b1, b2, m2 } => z(b1).kron(&xzb(b2, m2)),
            FamilyTag::ZRight { b1, m1, b2 } => xzb(b1, m1).kron(&z(b2)),
            FamilyTag::BothZ { b1, b2 } => z(b1).kron(&z(b2)),
        }
    }
}

/// Expected family sizes `(d(d-1))^2, d^2(d-1), d^2(d-1), d^2`.
pub fn expected_family_sizes(d: u32) -> [usize; 4] {
    let d = d as usize;
    [(d * (d - 1)).pow(2), d * d * (d - 1), d * d * (d - 1), d * d]
}

/// Assigns a label to its family via `b = l/m`.
pub fn classify(d: u32, lab: TwoPartyLabel) -> FamilyTag {
    let ratio = |l: u32, m: u32| mul_mod(l, inv_mod(m, d), d);
    match (lab.m1 != 0, lab.m2 != 0) {
        (true, true) => {
            FamilyTag::BothX { b1: ratio(lab.l1, lab.m1), b2: ratio(lab.l2, lab.m2), m1: lab.m1, m2: lab.m2 }
        }
        (false, true) => FamilyTag::ZLeft { b1: lab.l1, b2: ratio(lab.l2, lab.m2), m2: lab.m2 },
        (true, false) => FamilyTag::ZRight { b1: ratio(lab.l1, lab.m1), m1: lab.m1, b2: lab.l2 },
        (false, false) => FamilyTag::BothZ { b1: lab.l1, b2: lab.l2 },
    }
}

/// Parameters of `(X_mu (X^s Z^{sb})_nu (Z^s_mu Z^{-1}_nu)^m)^{m1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClusterIndex {
    pub s: u32,
    pub b: u32,
    pub m: u32,
    pub m1: u32,
}

/// `A = X_mu (X^s Z^{sb})_nu`.
fn cluster_a(d: u32, s: u32, b: u32) -> WeylOperator {
    WeylOperator::shift_clock(d, 1, 0).kron(&WeylOperator::shift_clock(d, s as i64, mul_mod(s, b, d) as i64))
}

/// `B = Z^s_mu Z^{-1}_nu`.
fn cluster_b(d: u32, s: u32) -> WeylOperator {
    WeylOperator::shift_clock(d, 0, s as i64).kron(&WeylOperator::shift_clock(d, 0, -1))
}

pub fn cluster_operator(d: u32, idx: ClusterIndex) -> WeylOperator {
    cluster_a(d, idx.s, idx.b).compose(&cluster_b(d, idx.s).pow(idx.m)).pow(idx.m1)
}

/// Inverts the cluster parameterization for a label with `m1, m2 != 0`.
///
/// The cluster operator is proportional to `X^{m1} Z^{s m m1} (x) X^{s m1} Z^{(sb - m) m1}`,
/// so `s = m2/m1`, `m = l1/m2` and `b = (l2/m1 + m)/s`.
pub fn reparameterize(d: u32, lab: TwoPartyLabel) -> Option<ClusterIndex> {
    if lab.m1 == 0 || lab.m2 == 0 {
        return None;
    }
    let s = mul_mod(lab.m2, inv_mod(lab.m1, d), d);
    let m = mul_mod(lab.l1, inv_mod(lab.m2, d), d);
    let b = mul_mod((mul_mod(lab.l2, inv_mod(lab.m1, d), d) + m) % d, inv_mod(s, d), d);
    Some(ClusterIndex { s, b, m, m1: lab.m1 })
}

/// Parts of the `Z_mu^{l1} Z_nu^{l2}` family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ZPart {
    /// `Z^{sr}_mu Z^{-r}_nu`, `r, s in 1..d`
    Pair {
        s: u32,
        r: u32,
    },
    Mu {
        s: u32,
    },
    Nu {
        s: u32,
    },
    Identity,
}

pub fn z_partition(d: u32, l1: u32, l2: u32) -> ZPart {
    match (l1 != 0, l2 != 0) {
        (true, true) => {
            let r = neg_mod(l2, d);
            ZPart::Pair { s: mul_mod(l1, inv_mod(r, d), d), r }
        }
        (true, false) => ZPart::Mu { s: l1 },
        (false, true) => ZPart::Nu { s: l2 },
        (false, false) => ZPart::Identity,
    }
}

/// Result of [`classify_all`].
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionReport {
    pub d: u32,
    pub total_labels: usize,
    /// BothX, ZLeft, ZRight, BothZ.
    pub family_sizes: [usize; 4],
    pub expected_family_sizes: [usize; 4],
    /// Distinct cluster indices hit by the BothX family.
    pub reparameterized: usize,
    /// Pair, Mu, Nu, Identity.
    pub z_partition_sizes: [usize; 4],
    /// `d^2 (d-1)^2 + (d^2 - 1) + 2 d^2 (d-1) + 1`.
    pub grouped_total: usize,
    pub cluster_count: usize,
    pub cluster_size: usize,
    pub max_commutator_norm: f64,
    /// Max `|Tr[A B^dagger] - d^2 delta_AB|` within clusters.
    pub max_hs_dev: f64,
    /// Max `|| U psi - <psi|U|psi> psi ||` over cluster members and the matching entangled basis.
    pub max_eigenbasis_dev: f64,
}

/// The d^2 operators of cluster `(s, b)`: the d(d-1) operators `(A B^m)^{m1}`,
/// then `B^r` for `r in 1..d`, then the identity.
pub fn cluster(d: u32, s: u32, b: u32) -> Vec<WeylOperator> {
    let mut ops: Vec<_> = (0..d)
        .flat_map(|m| (1..d).map(move |m1| ClusterIndex { s, b, m, m1 }))
        .map(|idx| cluster_operator(d, idx))
        .collect();
    let zz = cluster_b(d, s);
    ops.extend((1..d).map(|r| zz.pow(r)));
    ops.push(WeylOperator::identity((d * d) as usize, d));
    ops
}

fn partition_error(msg: String) -> Error {
    Error::BadLabel(format!("operator partition: {msg}"))
}

/// Classifies all d^4 two-particle monomials and checks the grouping claims.
pub fn classify_all(d: u32) -> Result<PartitionReport> {
    require_odd_prime(d)?;
    let mut family_sizes = [0usize; 4];
    let mut z_partition_sizes = [0usize; 4];
    let mut seen_tags: HashMap<FamilyTag, TwoPartyLabel> = HashMap::new();
    let mut seen_clusters: HashMap<ClusterIndex, TwoPartyLabel> = HashMap::new();
    let mut seen_z: HashMap<ZPart, TwoPartyLabel> = HashMap::new();
    let mut total_labels = 0;

    for lab in TwoPartyLabel::all(d) {
        total_labels += 1;
        let tag = classify(d, lab);
        if let Some(prev) = seen_tags.insert(tag, lab) {
            return Err(partition_error(format!("{tag:?} assigned to both {prev:?} and {lab:?}")));
        }
        let op = lab.operator(d);
        if tag.operator(d).phase_relative_to(&op).is_none() {
            return Err(partition_error(format!("{lab:?} is not proportional to its family form {tag:?}")));
        }
        family_sizes[tag.family_index()] += 1;

        match tag {
            FamilyTag::BothX { .. } => {
                let idx = reparameterize(d, lab).expect("BothX has m1, m2 != 0");
                if cluster_operator(d, idx).phase_relative_to(&op).is_none() {
                    return Err(partition_error(format!("{lab:?} does not match cluster operator {idx:?}")));
                }
                if let Some(prev) = seen_clusters.insert(idx, lab) {
                    return Err(partition_error(format!("{idx:?} reached from both {prev:?} and {lab:?}")));
                }
            }
            FamilyTag::BothZ { b1, b2 } => {
                let part = z_partition(d, b1, b2);
                let expect = match part {
                    ZPart::Pair { s, r } => cluster_b(d, s).pow(r),
                    ZPart::Mu { s } => {
                        WeylOperator::shift_clock(d, 0, s as i64).kron(&WeylOperator::identity(d as usize, d))
                    }
                    ZPart::Nu { s } => {
                        WeylOperator::identity(d as usize, d).kron(&WeylOperator::shift_clock(d, 0, s as i64))
                    }
                    ZPart::Identity => WeylOperator::identity((d * d) as usize, d),
                };
                if expect != op {
                    return Err(partition_error(format!("{lab:?} does not equal its Z-partition form {part:?}")));
                }
                let slot = match part {
                    ZPart::Pair { .. } => 0,
                    ZPart::Mu { .. } => 1,
                    ZPart::Nu { .. } => 2,
                    ZPart::Identity => 3,
                };
                z_partition_sizes[slot] += 1;
                if let Some(prev) = seen_z.insert(part, lab) {
                    return Err(partition_error(format!("{part:?} reached from both {prev:?} and {lab:?}")));
                }
            }
            _ => {}
        }
    }

    let expected = expected_family_sizes(d);
    if family_sizes != expected {
        return Err(partition_error(format!("family sizes {family_sizes:?}, expected {expected:?}")));
    }
    let du = d as usize;
    let expected_z = [(du - 1).pow(2), du - 1, du - 1, 1];
    if z_partition_sizes != expected_z {
        return Err(partition_error(format!("Z-partition sizes {z_partition_sizes:?}, expected {expected_z:?}")));
    }
    let grouped_total = du * du * (du - 1).pow(2) + (du * du - 1) + 2 * du * du * (du - 1) + 1;

    let dim = (du * du) as f64;
    let mut max_commutator_norm: f64 = 0.0;
    let mut max_hs_dev: f64 = 0.0;
    let mut max_eigenbasis_dev: f64 = 0.0;
    let mut cluster_count = 0;
    let mut cluster_size = 0;
    for s in 1..d {
        for b in 0..d {
            let ops = cluster(d, s, b);
            cluster_count += 1;
            cluster_size = ops.len();
            if ops.len() != du * du {
                return Err(partition_error(format!("cluster (s={s}, b={b}) has {} members", ops.len())));
            }
            for (i, x) in ops.iter().enumerate() {
                for (j, y) in ops.iter().enumerate().skip(i) {
                    max_commutator_norm = max_commutator_norm.max(x.commutator_norm(y));
                    let target = if i == j { dim } else { 0.0 };
                    max_hs_dev = max_hs_dev.max((x.hs_inner(y) - target).norm());
                }
            }
            let basis = entangled_basis(d, b, s)?;
            for op in &ops {
                for psi in &basis.states {
                    max_eigenbasis_dev = max_eigenbasis_dev.max(eigen_residual(op, psi).1);
                }
            }
        }
    }

    Ok(PartitionReport {
        d,
        total_labels,
        family_sizes,
        expected_family_sizes: expected,
        reparameterized: seen_clusters.len(),
        z_partition_sizes,
        grouped_total,
        cluster_count,
        cluster_size,
        max_commutator_norm,
        max_hs_dev,
        max_eigenbasis_dev,
    })
}

/// Applies a monomial operator to a vector.
fn apply_weyl(op: &WeylOperator, v: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    for (j, (&t, &e)) in op.targets().iter().zip(op.exps()).enumerate() {
        out[t as usize] += root_of_unity(op.order(), e as i64) * v[j];
    }
    out
}

/// `(<psi|U|psi>, || U psi - <psi|U|psi> psi ||)`.
fn eigen_residual(op: &WeylOperator, psi: &StateVector) -> (Complex64, f64) {
    let image = apply_weyl(op, psi.amps());
    residual_of(&image, psi)
}

fn residual_of(image: &[Complex64], psi: &StateVector) -> (Complex64, f64) {
    let lambda: Complex64 = psi.amps().iter().zip(image).map(|(a, b)| a.conj() * b).sum();
    let res = image.iter().zip(psi.amps()).map(|(x, y)| (x - lambda * y).norm_sqr()).sum::<f64>().sqrt();
    (lambda, res)
}

/// `|b,s;c1,c2>` label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EntangledLabel {
    pub b: u32,
    pub s: u32,
    pub c1: u32,
    pub c2: u32,
}

impl EntangledLabel {
    pub fn new(d: u32, b: u32, s: u32, c1: u32, c2: u32) -> Result<Self> {
        if s == 0 {
            return Err(Error::BadLabel("s must be nonzero".into()));
        }
        if b >= d || s >= d || c1 >= d || c2 >= d {
            return Err(Error::BadLabel(format!("(b={b}, s={s}, c1={c1}, c2={c2}) not reduced mod {d}")));
        }
        Ok(Self { b, s, c1, c2 })
    }
}

/// The basis `{|b,s;c1,c2>}`, ordered by `c1 * d + c2`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntangledBasis {
    pub b: u32,
    pub s: u32,
    pub states: Vec<StateVector>,
}

/// `|b,s;c1,c2>` as a d^2-dimensional vector.
pub fn ent_state(d: u32, lab: EntangledLabel) -> Result<StateVector> {
    require_odd_prime(d)?;
    let lab = EntangledLabel::new(d, lab.b, lab.s, lab.c1, lab.c2)?;
    let quad = mul_mod(mul_mod(lab.s, lab.s, d), lab.b, d);
    let exps = mub_exponents(d, quad, lab.c1);
    let du = d as usize;
    let scale = 1.0 / (d as f64).sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); du * du];
    for (n, &e) in exps.iter().enumerate() {
        let k = (lab.s as usize * n + lab.c2 as usize) % du;
        amps[n * du + k] = omega(d, e as i64) * scale;
    }
    StateVector::new(amps)
}

pub fn entangled_basis(d: u32, b: u32, s: u32) -> Result<EntangledBasis> {
    let states = (0..d)
        .flat_map(|c1| (0..d).map(move |c2| (c1, c2)))
        .map(|(c1, c2)| ent_state(d, EntangledLabel::new(d, b, s, c1, c2)?))
        .collect::<Result<_>>()?;
    Ok(EntangledBasis { b, s, states })
}

/// All d(d-1) bases, `s` slowest.
pub fn all_entangled_bases(d: u32) -> Result<Vec<EntangledBasis>> {
    require_odd_prime(d)?;
    (1..d).flat_map(|s| (0..d).map(move |b| (b, s))).map(|(b, s)| entangled_basis(d, b, s)).collect()
}

/// `{|l>_mu |r>_nu}` ordered by `i * d + j` over the two bases' state indices.
pub fn product_basis(left: &MubBasis, right: &MubBasis) -> Vec<StateVector> {
    left.states.iter().flat_map(|u| right.states.iter().map(move |v| u.tensor(v))).collect()
}

/// Measured eigen-relations of `Z^s_mu Z^{-1}_nu` and `X_mu (X^s Z^{sb})_nu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenReport {
    pub eig1: Complex64,
    pub eig2: Complex64,
    pub residual1: f64,
    pub residual2: f64,
    /// `|eig1 - w^{-c2}|`.
    pub eig1_dev: f64,
    /// Exponent k with `eig2 = w^k`, if eig2 is a d-th root of unity to 1e-10.
    pub eig2_exponent: Option<u32>,
    /// `|eig2 - w^{s b c2}|`: distance to the `c = s b c2` form, which holds only for c1 = 0.
    pub sbc2_eig2_dev: f64,
}

impl EigenReport {
    pub fn matches_sbc2(&self) -> bool {
        self.sbc2_eig2_dev < 1e-10
    }
}

/// Applies both operators as dense d^2 x d^2 matrices to `|b,s;c1,c2>`.
pub fn eigen_check(d: u32, lab: EntangledLabel) -> Result<EigenReport> {
    let psi = ent_state(d, lab)?;
    let z = |k: i64| WeylOperator::shift_clock(d, 0, k).to_unitary();
    let x = |k: i64| WeylOperator::shift_clock(d, k, 0).to_unitary();
    let op1: UnitaryMatrix = z(lab.s as i64).kron(&z(-1));
    let xs_zsb = x(lab.s as i64).mul(&z(mul_mod(lab.s, lab.b, d) as i64));
    let op2 = x(1).kron(&xs_zsb);
    let (eig1, residual1) = residual_of(&op1.apply(psi.amps()), &psi);
    let (eig2, residual2) = residual_of(&op2.apply(psi.amps()), &psi);
    let eig2_exponent = (0..d).find(|&k| (eig2 - omega(d, k as i64)).norm() < 1e-10);
    let sbc2 = omega(d, mul_mod(mul_mod(lab.s, lab.b, d), lab.c2, d) as i64);
    Ok(EigenReport {
        eig1,
        eig2,
        residual1,
        residual2,
        eig1_dev: (eig1 - omega(d, -(lab.c2 as i64))).norm(),
        eig2_exponent,
        sbc2_eig2_dev: (eig2 - sbc2).norm(),
    })
}

/// Max deviation per overlap case over all pairs of entangled-basis states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapReport {
    /// Same (b, s): orthonormality, `delta_{c1 c1'} delta_{c2 c2'}`.
    pub case_same: f64,
    /// `s = s'`, `b != b'`: `delta_{c2 c2'} / sqrt(d)`.
    pub case_s_equal: f64,
    /// `s != s'`: `1/d`.
    pub case_full: f64,
    /// Same (b, s) against the alternative reading `delta_{c1 c2}`; large when
    /// that reading is wrong.
    pub c1c2_delta_dev: f64,
    pub pairs: [usize; 3],
}

/// Exhaustive overlap scan over all d(d-1) entangled bases.
pub fn overlap_structure(d: u32) -> Result<OverlapReport> {
    let bases = all_entangled_bases(d)?;
    let du = d as usize;
    let sqrt_d = (d as f64).sqrt();
    let mut rep =
        OverlapReport { case_same: 0.0, case_s_equal: 0.0, case_full: 0.0, c1c2_delta_dev: 0.0, pairs: [0; 3] };
    for x in &bases {
        for y in &bases {
            for (i, u) in x.states.iter().enumerate() {
                let (c1, c2) = (i / du, i % du);
                for (j, v) in y.states.iter().enumerate() {
                    let c2p = j % du;
                    let mag = u.inner(v).norm();
                    if x.b == y.b && x.s == y.s {
                        let target = if i == j { 1.0 } else { 0.0 };
                        rep.case_same = rep.case_same.max((mag - target).abs());
                        let alt = if c1 == c2 { 1.0 } else { 0.0 };
                        rep.c1c2_delta_dev = rep.c1c2_delta_dev.max((mag - alt).abs());
                        rep.pairs[0] += 1;
                    } else if x.s == y.s {
                        let target = if c2 == c2p { 1.0 / sqrt_d } else { 0.0 };
                        rep.case_s_equal = rep.case_s_equal.max((mag - target).abs());
                        rep.pairs[1] += 1;
                    } else {
                        rep.case_full = rep.case_full.max((mag - 1.0 / d as f64).abs());
                        rep.pairs[2] += 1;
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// A contraction `<b1;c|_mu |psi>` and the single-particle state it matches.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult {
    /// Unnormalized d-dimensional result.
    pub vector: Vec<Complex64>,
    pub target_b: u32,
    pub target_c: u32,
    /// Global phase relating `vector` to `target / sqrt(d)`.
    pub phase: Complex64,
    pub deviation: f64,
}

fn contract_mu(bra: &StateVector, psi: &StateVector, d: usize) -> Vec<Complex64> {
    let a = bra.amps();
    (0..d).map(|k| (0..d).map(|n| a[n].conj() * psi.amps()[n * d + k]).sum()).collect()
}

fn match_projection(
    vector: Vec<Complex64>,
    target: &StateVector,
    target_b: u32,
    target_c: u32,
) -> Result<ProjectionResult> {
    let d = target.dim();
    let scaled = StateVector::from_amps_unchecked(target.amps().iter().map(|a| a / (d as f64).sqrt()).collect());
    let (deviation, phase) = StateVector::from_amps_unchecked(vector.clone())
        .distance_up_to_phase(&scaled)
        .expect("MUB states have no zero amplitudes");
    if deviation > PROJECTION_TOL {
        return Err(Error::ProjectionMismatch(deviation));
    }
    Ok(ProjectionResult { vector, target_b, target_c, phase, deviation })
}

/// Contracts particle mu of `|b,1;c1,0>` with `<b1;c|` and matches the result
/// against `(1/sqrt d) |b - b1; c1 - c>`.
pub fn project_mub(d: u32, b1: u32, c: u32, lab: EntangledLabel) -> Result<ProjectionResult> {
    if lab.s != 1 || lab.c2 != 0 {
        return Err(Error::BadLabel("projection is defined for s = 1, c2 = 0".into()));
    }
    let psi = ent_state(d, lab)?;
    let bra = mub_state(d, b1, c)?;
    let vector = contract_mu(&bra, &psi, d as usize);
    let target_b = (lab.b + d - b1) % d;
    let target_c = (lab.c1 + d - c) % d;
    match_projection(vector, &mub_state(d, target_b, target_c)?, target_b, target_c)
}

/// Pairs `(b, b1)` for which the projected label `b - b1` equals `b1`.
pub fn projection_label_collisions(d: u32) -> Vec<(u32, u32)> {
    (0..d).flat_map(|b| (0..d).map(move |b1| (b, b1))).filter(|&(b, b1)| (b + d - b1) % d == b1).collect()
}

/// `d^{-1/2} sum_n w_p^{tr[(b/2) n^2 + c n]} |n>|n>` over GF(p^n).
pub fn ent_state_pp(field: &Field, b: &FieldElement, c: &FieldElement) -> Result<StateVector> {
    let single = mub_state_pp(field, b, c)?;
    let d = field.order() as usize;
    let mut amps = vec![Complex64::new(0.0, 0.0); d * d];
    for (n, a) in single.amps().iter().enumerate() {
        amps[n * d + n] = *a;
    }
    StateVector::new(amps)
}

/// Contracts particle mu of the prime-power entangled state `|b;c>` with
/// `<b1;c1|` and matches it against `(1/sqrt d) |b - b1; c - c1>`. Target labels
/// are field-element indices.
pub fn project_pp(
    field: &Field,
    b: &FieldElement,
    c: &FieldElement,
    b1: &FieldElement,
    c1: &FieldElement,
) -> Result<ProjectionResult> {
    let psi = ent_state_pp(field, b, c)?;
    let bra = mub_state_pp(field, b1, c1)?;
    let vector = contract_mu(&bra, &psi, field.order() as usize);
    let b2 = b.checked_sub(b1)?;
    let c2 = c.checked_sub(c1)?;
    let target = mub_state_pp(field, &b2, &c2)?;
    match_projection(vector, &target, b2.index(), c2.index())
}

/// Reduced state of one particle of a `d x d` pure state.
pub fn reduced_density(psi: &StateVector, d: u32, keep: Particle) -> Result<DensityMatrix> {
    DensityMatrix::pure(psi).partial_trace(d as usize, keep)
}

/// Max deviation of both reduced states from `I/d`.
pub fn entanglement_dev(psi: &StateVector, d: u32) -> Result<f64> {
    let mixed = DensityMatrix::maximally_mixed(d as usize);
    let mu = reduced_density(psi, d, Particle::Mu)?.max_norm_diff(&mixed);
    let nu = reduced_density(psi, d, Particle::Nu)?.max_norm_diff(&mixed);
    Ok(mu.max(nu))
}

/// Orthonormality and completeness deviation of an entangled basis.
pub fn basis_deviation(basis: &EntangledBasis) -> (f64, f64) {
    (crate::state::gram_deviation(&basis.states), identity_resolution_dev(&basis.states))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mub::{computational_basis, mub_basis};

    fn lab(d: u32, b: u32, s: u32, c1: u32, c2: u32) -> EntangledLabel {
        EntangledLabel::new(d, b, s, c1, c2).unwrap()
    }

    #[test]
    fn ghz_like_state() {
        let psi = ent_state(3, lab(3, 0, 1, 0, 0)).unwrap();
        let a = 1.0 / 3f64.sqrt();
        for (i, amp) in psi.amps().iter().enumerate() {
            let expect = if i % 4 == 0 { a } else { 0.0 };
            assert!((amp - Complex64::new(expect, 0.0)).norm() < 1e-15, "index {i}");
        }
    }

    #[test]
    fn c1_only_adds_linear_phase() {
        let psi = ent_state(3, lab(3, 0, 1, 1, 0)).unwrap();
        for n in 0..3 {
            let expect = omega(3, -(n as i64)) / 3f64.sqrt();
            assert!((psi.amps()[n * 3 + n] - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn support_and_phases_d3_b1_s2() {
        // k = 2n + 1 mod 3; (s^2 b / 2) = 4 * 2 = 8 = 2 mod 3, so phase w^{2 n (n-1)}
        let psi = ent_state(3, lab(3, 1, 2, 0, 1)).unwrap();
        for n in 0..3usize {
            for k in 0..3usize {
                let amp = psi.amps()[n * 3 + k];
                if k == (2 * n + 1) % 3 {
                    let expect = omega(3, (2 * n * (n + 2)) as i64) / 3f64.sqrt();
                    assert!((amp - expect).norm() < 1e-15);
                } else {
                    assert_eq!(amp.norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn s_zero_rejected() {
        assert!(EntangledLabel::new(3, 0, 0, 0, 0).is_err());
        assert!(ent_state(3, EntangledLabel { b: 0, s: 0, c1: 0, c2: 0 }).is_err());
        assert!(ent_state(9, EntangledLabel { b: 0, s: 1, c1: 0, c2: 0 }).is_err());
    }

    #[test]
    fn eigen_check_examples() {
        let r = eigen_check(3, lab(3, 0, 1, 0, 0)).unwrap();
        assert!((r.eig1 - 1.0).norm() < 1e-12 && (r.eig2 - 1.0).norm() < 1e-12);
        assert!(r.residual1 < 1e-12 && r.residual2 < 1e-12);

        let r = eigen_check(3, lab(3, 0, 1, 1, 0)).unwrap();
        assert!((r.eig1 - 1.0).norm() < 1e-12);
        assert!(r.residual2 < 1e-12);
        assert_eq!(r.eig2_exponent, Some(1));
        assert!(!r.matches_sbc2());

        let r = eigen_check(5, lab(5, 2, 3, 1, 4)).unwrap();
        assert!((r.eig1 - omega(5, -4)).norm() < 1e-12);
        assert!(r.residual1 < 1e-12 && r.residual2 < 1e-12);
    }

    #[test]
    fn second_eigenvalue_is_c1_plus_sbc2() {
        for d in [3u32, 5] {
            for b in 0..d {
                for s in 1..d {
                    for c1 in 0..d {
                        for c2 in 0..d {
                            let r = eigen_check(d, lab(d, b, s, c1, c2)).unwrap();
                            let k = (c1 + s * b * c2) % d;
                            assert_eq!(r.eig2_exponent, Some(k));
                            assert!(r.eig1_dev < 1e-12);
                            assert_eq!(r.matches_sbc2(), c1 == 0);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn overlap_cases_d3() {
        let rep = overlap_structure(3).unwrap();
        assert!(rep.case_same < 1e-10 && rep.case_s_equal < 1e-10 && rep.case_full < 1e-10);
        assert!(rep.c1c2_delta_dev > 0.5);
        assert_eq!(rep.pairs.iter().sum::<usize>(), 54 * 54);
        // spot values from the brute-force inner product
        let u = ent_state(3, lab(3, 0, 1, 0, 2)).unwrap();
        let v = ent_state(3, lab(3, 1, 1, 1, 2)).unwrap();
        assert!((u.inner(&v).norm() - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        let w = ent_state(3, lab(3, 1, 2, 2, 0)).unwrap();
        assert!((u.inner(&w).norm() - 1.0 / 3.0).abs() < 1e-12);
        let x = ent_state(3, lab(3, 0, 1, 1, 2)).unwrap();
        assert!(u.inner(&x).norm() < 1e-12);
    }

    #[test]
    fn bases_are_complete_and_maximally_entangled_d3() {
        let bases = all_entangled_bases(3).unwrap();
        assert_eq!(bases.len(), 6);
        for basis in &bases {
            let (gram, res) = basis_deviation(basis);
            assert!(gram < 1e-12 && res < 1e-12);
            for psi in &basis.states {
                assert!(entanglement_dev(psi, 3).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn product_state_reduces_to_projector() {
        let psi = StateVector::basis_state(9, 0);
        let r = reduced_density(&psi, 3, Particle::Mu).unwrap();
        assert!((r.matrix()[(0, 0)] - 1.0).norm() < 1e-15);
        assert!((r.matrix() * r.matrix() - r.matrix()).norm() < 1e-15);
        let ghz = ent_state(3, lab(3, 0, 1, 0, 0)).unwrap();
        assert!(entanglement_dev(&ghz, 3).unwrap() < 1e-15);
    }

    #[test]
    fn projection_examples_d3() {
        let r = project_mub(3, 0, 0, lab(3, 1, 1, 0, 0)).unwrap();
        assert_eq!((r.target_b, r.target_c), (1, 0));
        let r = project_mub(3, 1, 1, lab(3, 2, 1, 2, 0)).unwrap();
        assert_eq!((r.target_b, r.target_c), (1, 1));
        let r = project_mub(3, 2, 0, lab(3, 1, 1, 0, 0)).unwrap();
        assert_eq!(r.target_b, 2);
        assert!(project_mub(3, 0, 0, lab(3, 0, 2, 0, 0)).is_err());
        assert!(project_mub(3, 0, 0, lab(3, 0, 1, 0, 1)).is_err());
    }

    #[test]
    fn projection_brute_force_d3() {
        // independent oracle: contract full amplitude arrays by hand
        let d = 3u32;
        for b in 0..d {
            for b1 in 0..d {
                for c in 0..d {
                    for c1 in 0..d {
                        let r = project_mub(d, b1, c, lab(d, b, 1, c1, 0)).unwrap();
                        let psi = ent_state(d, lab(d, b, 1, c1, 0)).unwrap();
                        let bra = mub_state(d, b1, c).unwrap();
                        for k in 0..3usize {
                            let mut acc = Complex64::new(0.0, 0.0);
                            for n in 0..3usize {
                                acc += bra.amps()[n].conj() * psi.amps()[n * 3 + k];
                            }
                            assert!((acc - r.vector[k]).norm() < 1e-14);
                        }
                        assert!(r.deviation < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn label_collisions_are_b_equal_2b1() {
        let col = projection_label_collisions(3);
        assert_eq!(col, vec![(0, 0), (1, 2), (2, 1)]);
        assert_eq!(projection_label_collisions(5).len(), 5);
    }

    #[test]
    fn pp_projection_gf9() {
        let f = Field::new(3, 2).unwrap();
        let r = project_pp(&f, &f.one(), &f.zero(), &f.zero(), &f.zero()).unwrap();
        assert_eq!((r.target_b, r.target_c), (1, 0));
        let norm: f64 = r.vector.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        assert!((norm - 1.0 / 3.0).abs() < 1e-12);
        // all (b, b1) pairs in GF(3): labels are additive
        let g = Field::new(3, 1).unwrap();
        for b in g.elements() {
            for b1 in g.elements() {
                let r = project_pp(&g, &b, &g.zero(), &b1, &g.zero()).unwrap();
                assert_eq!(g.element(r.target_b), &b - &b1);
            }
        }
    }

    #[test]
    fn pp_state_gf3_diagonal_uniform() {
        let g = Field::new(3, 1).unwrap();
        let psi = ent_state_pp(&g, &g.zero(), &g.zero()).unwrap();
        for n in 0..3 {
            assert!((psi.amps()[n * 4] - 1.0 / 3f64.sqrt()).norm() < 1e-15);
        }
    }

    #[test]
    fn classification_d3() {
        let rep = classify_all(3).unwrap();
        assert_eq!(rep.family_sizes, [36, 18, 18, 9]);
        assert_eq!(rep.total_labels, 81);
        assert_eq!(rep.reparameterized, 36);
        assert_eq!(rep.z_partition_sizes, [4, 2, 2, 1]);
        assert_eq!(rep.grouped_total, 81);
        assert_eq!(rep.cluster_count, 6);
        assert_eq!(rep.cluster_size, 9);
        assert!(rep.max_commutator_norm < 1e-12);
        assert!(rep.max_hs_dev < 1e-10);
        assert!(rep.max_eigenbasis_dev < 1e-12);
    }

    #[test]
    fn cluster_s1_b0_dense_oracle() {
        // dense commutators and HS products of the (s,b) = (1,0) cluster
        let ops: Vec<_> = cluster(3, 1, 0).iter().map(WeylOperator::to_unitary).collect();
        assert_eq!(ops.len(), 9);
        assert!(ops.iter().any(|u| u.max_abs_diff(&UnitaryMatrix::identity(9)) == 0.0));
        for (i, a) in ops.iter().enumerate() {
            for (j, b) in ops.iter().enumerate() {
                assert!(a.commutator_norm(b) < 1e-12);
                let hs = crate::schwinger::hs_inner(a, b).unwrap();
                let target = if i == j { 9.0 } else { 0.0 };
                assert!((hs - target).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn family_sizes_d5() {
        let counts = TwoPartyLabel::all(5).fold([0usize; 4], |mut acc, l| {
            acc[classify(5, l).family_index()] += 1;
            acc
        });
        assert_eq!(counts, [400, 100, 100, 25]);
        assert_eq!(expected_family_sizes(5), [400, 100, 100, 25]);
    }

    #[test]
    fn product_basis_pairs_are_unbiased_d3() {
        let d = 3;
        let comp = computational_basis(d);
        for b1 in 0..d {
            let mb = mub_basis(d, b1).unwrap();
            let left = product_basis(&comp, &mb);
            let right = product_basis(&mb, &comp);
            for u in &left {
                for v in &right {
                    assert!((u.inner(v).norm() - 1.0 / 3.0).abs() < 1e-12);
                }
            }
            for b2 in 0..d {
                let both = product_basis(&mb, &mub_basis(d, b2).unwrap());
                let cc = product_basis(&comp, &comp);
                for u in &both {
                    for v in &cc {
                        assert!((u.inner(v).norm() - 1.0 / 3.0).abs() < 1e-12);
                    }
                }
            }
        }
    }
}
