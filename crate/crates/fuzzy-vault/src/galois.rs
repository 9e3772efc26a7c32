//! Arithmetic in binary extension fields GF(2^w), 2 <= w <= 16.
//!
//! Elements are bit-vectors of polynomial coefficients over GF(2) packed
//! into a `u16`. Addition is XOR; multiplication uses log/antilog tables
//! built at context construction, which keeps the list decoder fast.

use crate::{Error, Result};

/// Irreducible modulus x^16 + x^12 + x^3 + x + 1 for the default field.
pub const DEFAULT_MODULUS_W16: u32 = 0x1100B;

/// A conventional irreducible modulus for each supported width.
pub fn default_modulus(width: u32) -> Result<u32> {
    Ok(match width {
        2 => 0x7,
        3 => 0xB,
        4 => 0x13,
        5 => 0x25,
        6 => 0x43,
        7 => 0x83,
        8 => 0x11B,
        9 => 0x211,
        10 => 0x409,
        11 => 0x805,
        12 => 0x1053,
        13 => 0x201B,
        14 => 0x4443,
        15 => 0x8003,
        16 => DEFAULT_MODULUS_W16,
        _ => return Err(Error::UnsupportedWidth(width)),
    })
}

/// A binary extension field GF(2^w) together with its multiplication tables.
///
/// Immutable after construction; all operations are pure.
#[derive(Debug, Clone)]
pub struct FieldContext {
    width: u32,
    modulus: u32,
    order: u32,
    log: Vec<u16>,
    exp: Vec<u16>,
}

/// An element of a specific [`FieldContext`], tagged with the context's
/// modulus so that elements from different fields never mix silently.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u16,
    modulus: u32,
}

impl FieldElement {
    pub fn value(&self) -> u16 {
        self.value
    }
}

/// Carry-less multiplication of two GF(2) polynomials followed by reduction
/// modulo `modulus` (degree `width`). Used only to bootstrap the tables.
fn clmul_reduce(a: u32, b: u32, modulus: u32, width: u32) -> u16 {
    let mut acc: u32 = 0;
    let mut a = a;
    let mut b = b;
    while b != 0 {
        if b & 1 != 0 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & (1 << width) != 0 {
            a ^= modulus;
        }
    }
    acc as u16
}

/// Degree of a GF(2) polynomial encoded as bits; -1 for zero.
fn poly_degree(p: u32) -> i32 {
    31 - p.leading_zeros() as i32
}

/// Remainder of GF(2) polynomial division.
fn poly_mod(mut a: u32, b: u32) -> u32 {
    let db = poly_degree(b);
    loop {
        let da = poly_degree(a);
        if da < db {
            return a;
        }
        a ^= b << (da - db);
    }
}

fn is_irreducible(modulus: u32, width: u32) -> bool {
    // Trial division by every polynomial of degree 1..=w/2; a reducible
    // polynomial of degree w has a factor in that range.
    for d in 1..=(width / 2) {
        for low in 0..(1u32 << d) {
            let divisor = (1 << d) | low;
            if poly_mod(modulus, divisor) == 0 {
                return false;
            }
        }
    }
    true
}

impl FieldContext {
    /// Builds a field from an explicit width and irreducible modulus.
    ///
    /// The modulus encodes the irreducible polynomial with bit i holding the
    /// coefficient of X^i; bit `width` must be set.
    pub fn new(width: u32, modulus: u32) -> Result<Self> {
        if !(2..=16).contains(&width) {
            return Err(Error::UnsupportedWidth(width));
        }
        if poly_degree(modulus) != width as i32 {
            return Err(Error::BadModulusDegree { modulus, width });
        }
        if !is_irreducible(modulus, width) {
            return Err(Error::ReducibleModulus(modulus));
        }
        let order = 1u32 << width;
        let (log, exp) = build_tables(width, modulus, order);
        Ok(FieldContext { width, modulus, order, log, exp })
    }

    /// The default GF(2^16) field used by the vault pipeline.
    pub fn default_w16() -> Self {
        FieldContext::new(16, DEFAULT_MODULUS_W16).expect("default modulus is irreducible")
    }

    /// Builds the field of the given width using its default modulus.
    pub fn with_default_modulus(width: u32) -> Result<Self> {
        FieldContext::new(width, default_modulus(width)?)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Number of field elements, 2^w.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Wraps an integer as a field element, rejecting out-of-range values.
    pub fn element(&self, value: u64) -> Result<FieldElement> {
        if value >= self.order as u64 {
            return Err(Error::ValueOutOfRange { value, width: self.width });
        }
        Ok(FieldElement { value: value as u16, modulus: self.modulus })
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { value: 0, modulus: self.modulus }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement { value: 1, modulus: self.modulus }
    }

    fn check(&self, a: FieldElement) -> Result<u16> {
        if a.modulus != self.modulus {
            return Err(Error::ContextMismatch);
        }
        Ok(a.value)
    }

    /// Field addition (XOR); identical to subtraction in characteristic 2.
    pub fn add(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        let (a, b) = (self.check(a)?, self.check(b)?);
        Ok(FieldElement { value: a ^ b, modulus: self.modulus })
    }

    /// Field multiplication.
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        let (a, b) = (self.check(a)?, self.check(b)?);
        Ok(FieldElement { value: self.mul_raw(a, b), modulus: self.modulus })
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        let a = self.check(a)?;
        if a == 0 {
            return Err(Error::ZeroInversion);
        }
        Ok(FieldElement { value: self.inv_raw(a), modulus: self.modulus })
    }

    // Raw-value arithmetic for inner loops. Values must already be reduced.

    #[inline]
    pub fn mul_raw(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            return 0;
        }
        let group = self.order - 1;
        let mut idx = self.log[a as usize] as u32 + self.log[b as usize] as u32;
        if idx >= group {
            idx -= group;
        }
        self.exp[idx as usize]
    }

    #[inline]
    pub fn inv_raw(&self, a: u16) -> u16 {
        debug_assert!(a != 0);
        let group = self.order - 1;
        let idx = (group - self.log[a as usize] as u32) % group;
        self.exp[idx as usize]
    }

    #[inline]
    pub fn div_raw(&self, a: u16, b: u16) -> u16 {
        self.mul_raw(a, self.inv_raw(b))
    }

    /// a^e by square-and-multiply on raw values.
    pub fn pow_raw(&self, a: u16, mut e: u64) -> u16 {
        let mut base = a;
        let mut acc: u16 = 1;
        while e != 0 {
            if e & 1 != 0 {
                acc = self.mul_raw(acc, base);
            }
            base = self.mul_raw(base, base);
            e >>= 1;
        }
        acc
    }
}

/// Finds a generator of the multiplicative group and fills log/antilog tables.
fn build_tables(width: u32, modulus: u32, order: u32) -> (Vec<u16>, Vec<u16>) {
    let group = order - 1;
    'candidates: for g in 2..order {
        let mut exp = vec![0u16; group as usize];
        let mut log = vec![0u16; order as usize];
        let mut acc: u32 = 1;
        for i in 0..group {
            exp[i as usize] = acc as u16;
            if acc == 1 && i > 0 {
                continue 'candidates; // order of g divides i < group
            }
            log[acc as usize] = i as u16;
            acc = clmul_reduce(acc, g, modulus, width) as u32;
        }
        if acc == 1 {
            return (log, exp);
        }
    }
    unreachable!("multiplicative group of a finite field is cyclic")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf16() -> FieldContext {
        // x^4 + x + 1
        FieldContext::new(4, 0b10011).unwrap()
    }

    #[test]
    fn default_moduli_build_for_every_width() {
        for w in 2..=16 {
            let f = FieldContext::with_default_modulus(w).unwrap();
            assert_eq!(f.width(), w);
            // spot-check an inverse in each field
            let a = (f.order() - 1) as u16;
            assert_eq!(f.mul_raw(a, f.inv_raw(a)), 1);
        }
        assert!(FieldContext::with_default_modulus(17).is_err());
    }

    #[test]
    fn add_is_xor_and_self_inverse() {
        let f = gf16();
        let a = f.element(0b1010).unwrap();
        assert_eq!(f.add(a, a).unwrap().value(), 0);
        let five = f.element(5).unwrap();
        assert_eq!(f.add(five, f.zero()).unwrap().value(), 5);
        let x = f.element(0b0011).unwrap();
        let y = f.element(0b0101).unwrap();
        assert_eq!(f.add(x, y).unwrap().value(), 0b0110);
    }

    #[test]
    fn mul_examples() {
        let f = gf16();
        let seven = f.element(7).unwrap();
        assert_eq!(f.mul(seven, f.one()).unwrap().value(), 7);
        // (x+1)(x^2+1) = x^3+x^2+x+1, no reduction needed
        let a = f.element(0b0011).unwrap();
        let b = f.element(0b0101).unwrap();
        assert_eq!(f.mul(a, b).unwrap().value(), 0b1111);
        let two = f.element(2).unwrap();
        assert_eq!(f.mul(two, two).unwrap().value(), 4);
    }

    #[test]
    fn inverses_exhaustive_gf16() {
        let f = gf16();
        for v in 1..16u64 {
            let a = f.element(v).unwrap();
            let inv = f.inv(a).unwrap();
            assert_eq!(f.mul(a, inv).unwrap().value(), 1, "inverse of {v}");
        }
        assert!(matches!(f.inv(f.zero()), Err(Error::ZeroInversion)));
        assert_eq!(f.inv(f.one()).unwrap().value(), 1);
    }

    #[test]
    fn field_axioms_exhaustive_gf16() {
        let f = gf16();
        let elems: Vec<_> = (0..16u64).map(|v| f.element(v).unwrap()).collect();
        for &a in &elems {
            for &b in &elems {
                assert_eq!(f.mul(a, b).unwrap(), f.mul(b, a).unwrap());
                assert_eq!(f.add(a, b).unwrap(), f.add(b, a).unwrap());
                for &c in &elems {
                    let ab_c = f.mul(f.mul(a, b).unwrap(), c).unwrap();
                    let a_bc = f.mul(a, f.mul(b, c).unwrap()).unwrap();
                    assert_eq!(ab_c, a_bc);
                    let lhs = f.mul(a, f.add(b, c).unwrap()).unwrap();
                    let rhs = f.add(f.mul(a, b).unwrap(), f.mul(a, c).unwrap()).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn axioms_sampled_gf2_16() {
        let f = FieldContext::default_w16();
        // fixed stride sampling keeps this deterministic and fast
        let sample: Vec<u16> = (0..64u32).map(|i| (i * 1031 + 7) as u16).collect();
        for &a in &sample {
            for &b in &sample {
                assert_eq!(f.mul_raw(a, b), f.mul_raw(b, a));
                let c = 0x5a5a;
                let lhs = f.mul_raw(a, b ^ c);
                let rhs = f.mul_raw(a, b) ^ f.mul_raw(a, c);
                assert_eq!(lhs, rhs);
            }
            if a != 0 {
                assert_eq!(f.mul_raw(a, f.inv_raw(a)), 1);
                // Fermat: a^(2^16 - 1) = 1
                assert_eq!(f.pow_raw(a, 0xFFFF), 1);
            }
        }
    }

    #[test]
    fn context_mismatch_rejected() {
        let f4 = gf16();
        let f16 = FieldContext::default_w16();
        let a = f4.element(3).unwrap();
        let b = f16.element(3).unwrap();
        assert!(matches!(f4.add(a, b), Err(Error::ContextMismatch)));
        assert!(matches!(f16.mul(a, b), Err(Error::ContextMismatch)));
    }

    #[test]
    fn rejects_bad_moduli() {
        // x^4 + 1 = (x+1)^4 is reducible
        assert!(matches!(FieldContext::new(4, 0b10001), Err(Error::ReducibleModulus(_))));
        assert!(matches!(FieldContext::new(4, 0b1011), Err(Error::BadModulusDegree { .. })));
        assert!(matches!(FieldContext::new(1, 0b11), Err(Error::UnsupportedWidth(1))));
        assert!(matches!(FieldContext::new(17, 1 << 17 | 9), Err(Error::UnsupportedWidth(17))));
    }

    #[test]
    fn element_range_checked() {
        let f = gf16();
        assert!(matches!(f.element(16), Err(Error::ValueOutOfRange { .. })));
        assert!(f.element(15).is_ok());
    }
}
