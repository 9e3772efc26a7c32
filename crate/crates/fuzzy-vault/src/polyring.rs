//! Univariate polynomials over a [`FieldContext`]: evaluation, interpolation,
//! root products, secret generation and the canonical secret hash.

use sha2::{Digest, Sha256};

use crate::drbg::Drbg;
use crate::galois::{FieldContext, FieldElement};
use crate::{Error, Result};

/// A univariate polynomial with coefficients in ascending degree order and
/// no trailing zeros; the zero polynomial has an empty coefficient vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    coeffs: Vec<u16>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Polynomial { coeffs: vec![1] }
    }

    /// Builds a polynomial from raw coefficient values, trimming trailing
    /// zeros. Values must already be reduced for the intended field.
    pub fn from_raw(mut coeffs: Vec<u16>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_elements(ctx: &FieldContext, coeffs: &[FieldElement]) -> Result<Self> {
        let mut raw = Vec::with_capacity(coeffs.len());
        for &c in coeffs {
            // re-wrap to enforce the context check
            let e = ctx.element(c.value() as u64)?;
            if c != e {
                return Err(Error::ContextMismatch);
            }
            raw.push(c.value());
        }
        Ok(Polynomial::from_raw(raw))
    }

    pub fn coeffs(&self) -> &[u16] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of X^i (zero beyond the stored length).
    pub fn coeff(&self, i: usize) -> u16 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    /// Horner evaluation at a raw field value.
    pub fn eval_raw(&self, ctx: &FieldContext, x: u16) -> u16 {
        let mut acc = 0u16;
        for &c in self.coeffs.iter().rev() {
            acc = ctx.mul_raw(acc, x) ^ c;
        }
        acc
    }

    /// Horner evaluation at a field element.
    pub fn eval(&self, ctx: &FieldContext, x: FieldElement) -> Result<FieldElement> {
        let x = ctx.element(x.value() as u64).and_then(|e| {
            if e == x { Ok(e) } else { Err(Error::ContextMismatch) }
        })?;
        ctx.element(self.eval_raw(ctx, x.value()) as u64)
    }

    /// Sum (equals difference in characteristic 2).
    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) ^ other.coeff(i)).collect();
        Polynomial::from_raw(coeffs)
    }

    pub fn mul(&self, ctx: &FieldContext, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![0u16; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] ^= ctx.mul_raw(a, b);
            }
        }
        Polynomial::from_raw(coeffs)
    }

    /// Scales every coefficient by `s`.
    pub fn scale(&self, ctx: &FieldContext, s: u16) -> Polynomial {
        Polynomial::from_raw(self.coeffs.iter().map(|&c| ctx.mul_raw(c, s)).collect())
    }
}

/// Monic product of (X - r) over a set of distinct roots; the empty set
/// yields the constant 1.
pub fn monic_from_roots(ctx: &FieldContext, roots: &[u16]) -> Result<Polynomial> {
    let mut seen = std::collections::HashSet::with_capacity(roots.len());
    for &r in roots {
        if !seen.insert(r) {
            return Err(Error::DuplicateRoot);
        }
    }
    let mut coeffs = Vec::with_capacity(roots.len() + 1);
    coeffs.push(1u16);
    for &r in roots {
        // multiply by (X + r); characteristic 2 makes -r = r
        mul_linear_in_place(ctx, &mut coeffs, r);
    }
    Ok(Polynomial::from_raw(coeffs))
}

/// Unique polynomial of degree < points.len() through the given points.
pub fn lagrange_interpolate(ctx: &FieldContext, points: &[(u16, u16)]) -> Result<Polynomial> {
    if points.is_empty() {
        return Err(Error::EmptyInterpolation);
    }
    let mut seen = std::collections::HashSet::with_capacity(points.len());
    for &(x, _) in points {
        if !seen.insert(x) {
            return Err(Error::DuplicateAbscissa);
        }
    }
    let mut acc = Polynomial::zero();
    let mut basis_num = vec![0u16; points.len() + 1];
    for (i, &(xi, yi)) in points.iter().enumerate() {
        if yi == 0 {
            continue;
        }
        // numerator product over j != i of (X + x_j), built incrementally
        basis_num.clear();
        basis_num.push(1);
        let mut denom: u16 = 1;
        for (j, &(xj, _)) in points.iter().enumerate() {
            if j == i {
                continue;
            }
            mul_linear_in_place(ctx, &mut basis_num, xj);
            denom = ctx.mul_raw(denom, xi ^ xj);
        }
        let scale = ctx.div_raw(yi, denom);
        let term = Polynomial::from_raw(basis_num.clone()).scale(ctx, scale);
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// Multiplies the coefficient vector by (X + r) in place.
fn mul_linear_in_place(ctx: &FieldContext, coeffs: &mut Vec<u16>, r: u16) {
    coeffs.push(0);
    for i in (1..coeffs.len()).rev() {
        coeffs[i] = coeffs[i - 1] ^ ctx.mul_raw(coeffs[i], r);
    }
    coeffs[0] = ctx.mul_raw(coeffs[0], r);
}

/// Draws a secret polynomial with exactly `k` coefficients (degree <= k-1)
/// deterministically from the entropy bytes. Leading coefficients may be
/// zero; the stored secret is always the full k-coefficient vector.
pub fn random_secret(ctx: &FieldContext, k: usize, entropy: &[u8]) -> Result<SecretPolynomial> {
    if k < 1 {
        return Err(Error::SecretLengthZero);
    }
    if entropy.is_empty() {
        return Err(Error::EmptyEntropy);
    }
    let mask = (ctx.order() - 1) as u16;
    let mut stream = Drbg::new(entropy);
    let coeffs = (0..k).map(|_| stream.next_u16() & mask).collect();
    Ok(SecretPolynomial { coeffs, k })
}

/// A secret polynomial kept as its full k-coefficient vector so that zero
/// leading coefficients survive hashing and key derivation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecretPolynomial {
    coeffs: Vec<u16>,
    k: usize,
}

impl SecretPolynomial {
    pub fn from_poly(poly: &Polynomial, k: usize) -> Result<Self> {
        if poly.coeffs().len() > k {
            return Err(Error::SecretTooLong { coeffs: poly.coeffs().len(), k });
        }
        let mut coeffs = poly.coeffs().to_vec();
        coeffs.resize(k, 0);
        Ok(SecretPolynomial { coeffs, k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// The padded k-coefficient vector, ascending degree.
    pub fn coeffs(&self) -> &[u16] {
        &self.coeffs
    }

    pub fn to_poly(&self) -> Polynomial {
        Polynomial::from_raw(self.coeffs.clone())
    }

    /// SHA-256 over the canonical encoding: each of the k coefficients as a
    /// 2-byte big-endian value, ascending degree.
    pub fn hash(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        for &c in &self.coeffs {
            h.update(c.to_be_bytes());
        }
        h.finalize().into()
    }
}

/// Canonical hash of an arbitrary polynomial padded to k coefficients.
pub fn secret_hash(kappa: &Polynomial, k: usize) -> Result<[u8; 32]> {
    Ok(SecretPolynomial::from_poly(kappa, k)?.hash())
}
