//! Arithmetic in GF(p) and GF(p^n) for odd primes p.
//!
//! Elements are stored in the polynomial basis `c0 + c1 x + ... + c_{n-1} x^{n-1}`
//! modulo a fixed monic irreducible polynomial. The element with coefficients
//! `coeffs` has index `sum coeffs[i] * p^i`, so enumeration runs with the constant
//! term fastest. That index is the computational-basis label used by the
//! prime-power state constructions.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Built-in moduli, coefficients low to high (monic).
const BUILTIN_MODULI: &[(u32, u32, &[u32])] = &[
    // x^2 + 1: -1 is a non-residue mod 3
    (3, 2, &[1, 0, 1]),
    // x^3 + 2x + 1 = x^3 - x + 1
    (3, 3, &[1, 2, 0, 1]),
    // x^2 + 2: -2 = 3 is a non-residue mod 5
    (5, 2, &[2, 0, 1]),
    // x^2 + 1: 7 = 3 mod 4
    (7, 2, &[1, 0, 1]),
];

pub fn is_prime(k: u64) -> bool {
    if k < 2 {
        return false;
    }
    let mut q = 2;
    while q * q <= k {
        if k.is_multiple_of(q) {
            return false;
        }
        q += 1;
    }
    true
}

#[derive(Debug, PartialEq, Eq)]
struct FieldInner {
    p: u32,
    n: u32,
    order: u32,
    modulus: Vec<u32>,
}

/// A finite field GF(p^n) with odd characteristic.
///
/// Cloning is cheap; elements keep a handle to their field so that mixing
/// elements of different fields is detected.
#[derive(Clone, PartialEq, Eq)]
pub struct Field {
    inner: Arc<FieldInner>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inner.n == 1 {
            write!(f, "GF({})", self.inner.p)
        } else {
            write!(f, "GF({}^{}; {:?})", self.inner.p, self.inner.n, self.inner.modulus)
        }
    }
}

impl Field {
    /// Builds GF(p^n) using the built-in modulus for `(p, n)`.
    ///
    /// Prime fields need no modulus. Extension fields are available for
    /// (3,2), (3,3), (5,2) and (7,2); anything else goes through
    /// [`Field::with_modulus`].
    pub fn new(p: u32, n: u32) -> Result<Self> {
        check_char(p)?;
        match n {
            0 => Err(Error::ZeroDegree),
            1 => Ok(Self::from_parts(p, 1, vec![0, 1])),
            _ => {
                let modulus = BUILTIN_MODULI
                    .iter()
                    .find(|(q, m, _)| *q == p && *m == n)
                    .map(|(_, _, poly)| poly.to_vec())
                    .ok_or(Error::UnsupportedField { p, n })?;
                Ok(Self::from_parts(p, n, modulus))
            }
        }
    }

    /// Builds GF(p^n) from a user-supplied monic modulus (low to high coefficients).
    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<Self> {
        check_char(p)?;
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(Error::BadModulus(modulus));
        }
        let n = (modulus.len() - 1) as u32;
        if n > 1 && !is_irreducible(&modulus, p) {
            return Err(Error::ReducibleModulus(modulus));
        }
        Ok(Self::from_parts(p, n, modulus))
    }

    fn from_parts(p: u32, n: u32, modulus: Vec<u32>) -> Self {
        let order = p.pow(n);
        Self { inner: Arc::new(FieldInner { p, n, order, modulus }) }
    }

    pub fn characteristic(&self) -> u32 {
        self.inner.p
    }

    pub fn degree(&self) -> u32 {
        self.inner.n
    }

    /// Number of elements, d = p^n.
    pub fn order(&self) -> u32 {
        self.inner.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    pub fn is_prime_field(&self) -> bool {
        self.inner.n == 1
    }

    pub fn zero(&self) -> FieldElement {
        self.element(0)
    }

    pub fn one(&self) -> FieldElement {
        self.element(1)
    }

    /// The embedding of an integer into the prime subfield.
    pub fn from_int(&self, k: i64) -> FieldElement {
        let p = self.inner.p as i64;
        self.element(k.rem_euclid(p) as u32)
    }

    /// The element with enumeration index `index` (constant term fastest).
    ///
    /// # Panics
    ///
    /// Panics if `index >= order()`.
    pub fn element(&self, index: u32) -> FieldElement {
        assert!(index < self.inner.order, "element index {index} out of range for {self:?}");
        let p = self.inner.p;
        let mut rest = index;
        let coeffs = (0..self.inner.n)
            .map(|_| {
                let c = rest % p;
                rest /= p;
                c
            })
            .collect();
        FieldElement { field: self.clone(), coeffs }
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() != self.inner.n as usize {
            return Err(Error::DimensionMismatch { expected: self.inner.n as usize, found: coeffs.len() });
        }
        let p = self.inner.p;
        Ok(FieldElement { field: self.clone(), coeffs: coeffs.iter().map(|c| c % p).collect() })
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.inner.order).map(move |i| self.element(i))
    }

    /// The solution of 2x = 1.
    pub fn half(&self) -> FieldElement {
        self.from_int((self.inner.p as i64 + 1) / 2)
    }

    /// `tr[a]` for every element, indexed by element index.
    pub fn trace_table(&self) -> Vec<u32> {
        self.elements().map(|a| a.trace()).collect()
    }
}

fn check_char(p: u32) -> Result<()> {
    if p < 3 || !is_prime(p as u64) {
        return Err(Error::NotOddPrime(p as u64));
    }
    Ok(())
}

/// An element of a [`Field`].
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    field: Field,
    coeffs: Vec<u32>,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.len() == 1 {
            write!(f, "{}", self.coeffs[0])
        } else {
            write!(f, "{:?}", self.coeffs)
        }
    }
}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn index(&self) -> u32 {
        let p = self.field.inner.p;
        self.coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.field.inner, &other.field.inner) || self.field == other.field {
            Ok(())
        } else {
            Err(Error::MixedFields)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        let p = self.field.inner.p;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a + b) % p).collect();
        Ok(Self { field: self.field.clone(), coeffs })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg_ref())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        let p = self.field.inner.p as u64;
        let n = self.coeffs.len();
        let mut prod = vec![0u64; 2 * n - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + a as u64 * b as u64) % p;
            }
        }
        let coeffs = reduce(prod, &self.field.inner.modulus, p);
        Ok(Self { field: self.field.clone(), coeffs })
    }

    pub fn checked_inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(self.field.inner.order as u64 - 2))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.checked_mul(&other.checked_inv()?)
    }

    fn neg_ref(&self) -> Self {
        let p = self.field.inner.p;
        Self { field: self.field.clone(), coeffs: self.coeffs.iter().map(|&c| (p - c) % p).collect() }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Field trace a + a^p + ... + a^{p^{n-1}}, reported as an integer mod p.
    pub fn trace(&self) -> u32 {
        let p = self.field.inner.p;
        let mut term = self.clone();
        let mut sum = self.clone();
        for _ in 1..self.field.inner.n {
            term = term.pow(p as u64);
            sum = &sum + &term;
        }
        debug_assert!(sum.coeffs[1..].iter().all(|&c| c == 0), "trace left the prime subfield");
        sum.coeffs[0]
    }
}

/// Reduces a polynomial modulo a monic modulus.
fn reduce(mut poly: Vec<u64>, modulus: &[u32], p: u64) -> Vec<u32> {
    let n = modulus.len() - 1;
    for top in (n..poly.len()).rev() {
        let lead = poly[top] % p;
        if lead == 0 {
            continue;
        }
        for (k, &m) in modulus.iter().enumerate().take(n) {
            let idx = top - n + k;
            poly[idx] = (poly[idx] + (p - lead) * m as u64) % p;
        }
        poly[top] = 0;
    }
    poly.truncate(n);
    poly.resize(n, 0);
    poly.into_iter().map(|c| (c % p) as u32).collect()
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                self.$checked(rhs).expect("field operands must share a field")
            }
        }
        impl $trait for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.neg_ref()
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.neg_ref()
    }
}

// Dense polynomials over GF(p), coefficients low to high, used by the
// irreducibility test.

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
    a
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let mut acc = 1;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let b = trim(b.to_vec());
    let db = b.len() - 1;
    let mut r = a.to_vec();
    if r.len() <= db {
        return trim(r);
    }
    let lead_inv = inv_mod(b[db], p);
    for top in (db..r.len()).rev() {
        let q = r[top] * lead_inv % p;
        if q == 0 {
            continue;
        }
        for (k, &bk) in b.iter().enumerate() {
            let idx = top - db + k;
            r[idx] = (r[idx] + (p - q) * bk) % p;
        }
    }
    r.truncate(db.max(1));
    if db == 0 {
        r[0] = 0;
    }
    trim(r)
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    poly_rem(&prod, m, p)
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !(y.len() == 1 && y[0] == 0) {
        let r = poly_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

/// Ben-Or test: f of degree n is irreducible iff gcd(x^{p^i} - x, f) = 1
/// for every i <= n/2.
pub fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let p = p as u64;
    let f: Vec<u64> = trim(modulus.iter().map(|&c| c as u64 % p).collect());
    let n = f.len() - 1;
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    let mut xp = x.clone();
    for _ in 1..=n / 2 {
        // xp <- xp^p mod f
        let mut acc = vec![1u64];
        for _ in 0..p {
            acc = poly_mulmod(&acc, &xp, &f, p);
        }
        xp = acc;
        let mut diff = xp.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        let g = poly_gcd(&f, &diff, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn has_root(modulus: &[u32], p: u32) -> bool {
        (0..p as u64).any(|x| modulus.iter().rev().fold(0u64, |acc, &c| (acc * x + c as u64) % p as u64) == 0)
    }

    #[test]
    fn prime_field_gf3() {
        let f = Field::new(3, 1).unwrap();
        assert_eq!(f.order(), 3);
        assert_eq!(f.element(2).checked_inv().unwrap(), f.element(2));
        assert_eq!(f.half(), f.element(2));
    }

    #[test]
    fn gf5_inverse_and_half() {
        let f = Field::new(5, 1).unwrap();
        assert_eq!(f.element(3).checked_inv().unwrap(), f.element(2));
        assert_eq!(f.half(), f.element(3));
    }

    #[test]
    fn gf9_uses_x2_plus_1() {
        let f = Field::new(3, 2).unwrap();
        assert_eq!(f.order(), 9);
        assert_eq!(f.modulus(), &[1, 0, 1]);
        assert!(!has_root(f.modulus(), 3));
        let x = f.from_coeffs(&[0, 1]).unwrap();
        assert_eq!(&x * &x, f.from_int(2));
        assert_eq!(f.half(), f.from_coeffs(&[2, 0]).unwrap());
    }

    #[test]
    fn gf9_trace_values() {
        let f = Field::new(3, 2).unwrap();
        let x = f.from_coeffs(&[0, 1]).unwrap();
        assert_eq!(x.trace(), 0);
        assert_eq!(f.one().trace(), 2);
    }

    #[test]
    fn trace_is_identity_on_prime_fields() {
        for p in [3, 5, 7, 11] {
            let f = Field::new(p, 1).unwrap();
            for a in f.elements() {
                assert_eq!(a.trace(), a.index());
            }
        }
    }

    #[test]
    fn rejects_bad_characteristics() {
        assert_eq!(Field::new(2, 1), Err(Error::NotOddPrime(2)));
        assert_eq!(Field::new(9, 1), Err(Error::NotOddPrime(9)));
        assert_eq!(Field::new(1, 1), Err(Error::NotOddPrime(1)));
        assert_eq!(Field::new(3, 0), Err(Error::ZeroDegree));
        assert_eq!(Field::new(11, 2), Err(Error::UnsupportedField { p: 11, n: 2 }));
    }

    #[test]
    fn inverse_of_zero_rejected() {
        let f = Field::new(3, 2).unwrap();
        assert_eq!(f.zero().checked_inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn mixed_fields_rejected() {
        let a = Field::new(3, 1).unwrap().one();
        let b = Field::new(5, 1).unwrap().one();
        assert_eq!(a.checked_add(&b), Err(Error::MixedFields));
        assert_eq!(a.checked_mul(&b), Err(Error::MixedFields));
        // structurally identical fields interoperate
        let c = Field::new(3, 1).unwrap().one();
        assert_eq!(a.checked_add(&c).unwrap().index(), 2);
    }

    #[test]
    fn builtin_moduli_are_irreducible() {
        for &(p, n, poly) in BUILTIN_MODULI {
            assert!(is_irreducible(poly, p), "GF({p}^{n})");
            if n <= 3 {
                assert!(!has_root(poly, p), "GF({p}^{n}) modulus has a root");
            }
        }
    }

    #[test]
    fn irreducibility_agrees_with_root_search_for_low_degree() {
        // degree 2 and 3 polynomials are irreducible exactly when rootless
        for p in [3u32, 5] {
            for n in [2usize, 3] {
                let count = p.pow(n as u32);
                for idx in 0..count {
                    let mut poly: Vec<u32> = (0..n).map(|i| idx / p.pow(i as u32) % p).collect();
                    poly.push(1);
                    assert_eq!(is_irreducible(&poly, p), !has_root(&poly, p), "{poly:?} over GF({p})");
                }
            }
        }
    }

    #[test]
    fn quartic_product_of_quadratics_is_reducible() {
        // (x^2+1)^2 = x^4 + 2x^2 + 1 over GF(3) has no roots but factors
        assert!(!has_root(&[1, 0, 2, 0, 1], 3));
        assert!(!is_irreducible(&[1, 0, 2, 0, 1], 3));
        assert!(Field::with_modulus(3, vec![1, 0, 2, 0, 1]).is_err());
        // x^4 + x + 2 is irreducible over GF(3)
        let f = Field::with_modulus(3, vec![2, 1, 0, 0, 1]).unwrap();
        assert_eq!(f.order(), 81);
    }

    #[test]
    fn element_index_round_trip() {
        let f = Field::new(3, 3).unwrap();
        for i in 0..f.order() {
            assert_eq!(f.element(i).index(), i);
        }
        assert_eq!(f.element(1).coeffs(), &[1, 0, 0]);
        assert_eq!(f.element(3).coeffs(), &[0, 1, 0]);
    }

    #[test]
    fn trace_additive_on_gf9() {
        let f = Field::new(3, 2).unwrap();
        for a in f.elements() {
            for b in f.elements() {
                assert_eq!((&a + &b).trace(), (a.trace() + b.trace()) % 3);
            }
        }
    }

    #[test]
    fn trace_invariant_under_frobenius() {
        for (p, n) in [(3, 2), (3, 3), (5, 2), (7, 2)] {
            let f = Field::new(p, n).unwrap();
            for a in f.elements() {
                assert_eq!(a.pow(p as u64).trace(), a.trace());
            }
        }
    }

    #[test]
    fn inverse_is_multiplicative() {
        for (p, n) in [(3, 1), (5, 1), (3, 2)] {
            let f = Field::new(p, n).unwrap();
            let nonzero: Vec<_> = f.elements().filter(|a| !a.is_zero()).collect();
            for a in &nonzero {
                assert_eq!((a * &a.checked_inv().unwrap()), f.one());
                for b in &nonzero {
                    assert_eq!((a * b).checked_inv().unwrap(), &a.checked_inv().unwrap() * &b.checked_inv().unwrap());
                }
            }
        }
    }

    #[test]
    fn half_doubles_to_one() {
        for (p, n) in [(3, 1), (5, 1), (7, 1), (11, 1), (13, 1), (3, 2), (3, 3), (5, 2), (7, 2)] {
            let f = Field::new(p, n).unwrap();
            let h = f.half();
            assert_eq!(&h + &h, f.one());
        }
    }

    #[test]
    fn multiplicative_group_is_cyclic_of_full_order() {
        // the unit group has an element of order d - 1 exactly when the modulus is irreducible
        for (p, n) in [(3, 2), (3, 3), (5, 2), (7, 2)] {
            let f = Field::new(p, n).unwrap();
            let d = f.order() as u64;
            let has_generator = f.elements().filter(|a| !a.is_zero()).any(|g| (1..d - 1).all(|k| g.pow(k) != f.one()));
            assert!(has_generator, "GF({p}^{n})");
        }
    }
}
