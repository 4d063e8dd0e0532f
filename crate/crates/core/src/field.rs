//! Arithmetic in GF(2^r) in the polynomial basis.
//!
//! Elements are plain `u32` bit vectors (bit `i` is the coefficient of `x^i`);
//! every operation takes the [`FieldSpec`] as explicit context so that
//! elements stay word sized inside enumeration loops.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported extension degree.
pub const MAX_DEGREE: u32 = 20;

/// Default reduction polynomials, indexed by degree. Bit `i` is the coefficient of `x^i`.
const DEFAULT_POLYS: [u64; MAX_DEGREE as usize + 1] = [
    0,
    0b11,                                    // x + 1
    0b111,                                   // x^2 + x + 1
    0b1011,                                  // x^3 + x + 1
    0b1_0011,                                // x^4 + x + 1
    0b10_0101,                               // x^5 + x^2 + 1
    0b100_0011,                              // x^6 + x + 1
    0b1000_0011,                             // x^7 + x + 1
    0b1_0001_1101,                           // x^8 + x^4 + x^3 + x^2 + 1
    (1 << 9) | (1 << 4) | 1,                 // x^9 + x^4 + 1
    (1 << 10) | (1 << 3) | 1,                // x^10 + x^3 + 1
    (1 << 11) | (1 << 2) | 1,                // x^11 + x^2 + 1
    (1 << 12) | (1 << 6) | (1 << 4) | 0b11,  // x^12 + x^6 + x^4 + x + 1
    (1 << 13) | (1 << 4) | (1 << 3) | 0b11,  // x^13 + x^4 + x^3 + x + 1
    (1 << 14) | (1 << 10) | (1 << 6) | 0b11, // x^14 + x^10 + x^6 + x + 1
    (1 << 15) | 0b11,                        // x^15 + x + 1
    (1 << 16) | (1 << 12) | (1 << 3) | 0b11, // x^16 + x^12 + x^3 + x + 1
    (1 << 17) | (1 << 3) | 1,                // x^17 + x^3 + 1
    (1 << 18) | (1 << 7) | 1,                // x^18 + x^7 + 1
    (1 << 19) | (1 << 5) | (1 << 2) | 0b11,  // x^19 + x^5 + x^2 + x + 1
    (1 << 20) | (1 << 3) | 1,                // x^20 + x^3 + 1
];

/// An element of GF(2^r). Carries no reference to its field.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Wraps raw bits without checking them against any field.
    #[inline]
    pub const fn from_bits(bits: u32) -> Self {
        FieldElement(bits)
    }

    #[inline]
    pub const fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// GF(2^r) defined by an irreducible reduction polynomial of degree `r`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    r: u32,
    poly: u64,
    /// `tr(a) = parity(a & trace_mask)`; bit `i` holds `tr(x^i)`.
    trace_mask: u32,
}

impl FieldSpec {
    /// Builds GF(2^r) from `poly`, rejecting anything that is not an
    /// irreducible polynomial of degree exactly `r`.
    pub fn new(r: u32, poly: u64) -> Result<Self> {
        if r == 0 || r > MAX_DEGREE {
            return Err(Error::Usage(format!(
                "extension degree must be in 1..={MAX_DEGREE}, got {r}"
            )));
        }
        if poly_degree(poly) != Some(r) {
            return Err(Error::Usage(format!(
                "reduction polynomial {poly:#b} does not have degree {r}"
            )));
        }
        if !is_irreducible(poly) {
            return Err(Error::Usage(format!(
                "reduction polynomial {poly:#b} is reducible over GF(2)"
            )));
        }
        let mut spec = FieldSpec {
            r,
            poly,
            trace_mask: 0,
        };
        let mut mask = 0u32;
        for i in 0..r {
            let basis = FieldElement(1 << i);
            mask |= (spec.trace_frobenius(basis) as u32) << i;
        }
        spec.trace_mask = mask;
        Ok(spec)
    }

    /// GF(2^r) with the default reduction polynomial for degree `r`.
    pub fn with_default_poly(r: u32) -> Result<Self> {
        Self::new(r, default_poly(r)?)
    }

    /// GF(2^r) with `poly` if given, otherwise the default.
    pub fn from_optional(r: u32, poly: Option<u64>) -> Result<Self> {
        match poly {
            Some(p) => Self::new(r, p),
            None => Self::with_default_poly(r),
        }
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.r
    }

    #[inline]
    pub fn poly(&self) -> u64 {
        self.poly
    }

    /// Field order `q = 2^r`.
    #[inline]
    pub fn order(&self) -> u32 {
        1 << self.r
    }

    #[inline]
    pub fn contains(&self, a: FieldElement) -> bool {
        a.0 < self.order()
    }

    /// Validates raw bits as an element of this field.
    pub fn element(&self, bits: u32) -> Result<FieldElement> {
        let a = FieldElement(bits);
        if self.contains(a) {
            Ok(a)
        } else {
            Err(Error::Usage(format!(
                "{bits} is not an element of GF(2^{})",
                self.r
            )))
        }
    }

    /// All `q` elements in increasing bit order.
    pub fn elements(&self) -> impl DoubleEndedIterator<Item = FieldElement> + Clone {
        (0..self.order()).map(FieldElement)
    }

    /// The `q - 1` nonzero elements in increasing bit order.
    pub fn nonzero(&self) -> impl DoubleEndedIterator<Item = FieldElement> + Clone {
        (1..self.order()).map(FieldElement)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert!(self.contains(a) && self.contains(b));
        FieldElement(a.0 ^ b.0)
    }

    pub fn try_add(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        self.check_pair(a, b)?;
        Ok(self.add(a, b))
    }

    /// Carry-less product reduced modulo the reduction polynomial.
    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert!(self.contains(a) && self.contains(b));
        let mut acc = clmul(a.0 as u64, b.0 as u64);
        let r = self.r;
        // Top possible bit of the product is 2r - 2.
        let mut bit = 2 * r;
        while bit > r {
            bit -= 1;
            if acc >> bit & 1 == 1 {
                acc ^= self.poly << (bit - r);
            }
        }
        FieldElement(acc as u32)
    }

    pub fn try_mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        self.check_pair(a, b)?;
        Ok(self.mul(a, b))
    }

    #[inline]
    pub fn square(&self, a: FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    pub fn pow(&self, a: FieldElement, mut exp: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.square(base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse as `a^(q-2)`.
    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::Domain("zero has no multiplicative inverse".into()));
        }
        if !self.contains(a) {
            return Err(Error::Usage(format!(
                "{a} is not an element of GF(2^{})",
                self.r
            )));
        }
        Ok(self.pow(a, self.order() as u64 - 2))
    }

    /// Inverses of every element; slot 0 holds 0.
    pub fn inverse_table(&self) -> Vec<FieldElement> {
        let mut table = Vec::with_capacity(self.order() as usize);
        table.push(FieldElement::ZERO);
        table.extend(self.nonzero().map(|a| self.pow(a, self.order() as u64 - 2)));
        table
    }

    /// Absolute trace to GF(2).
    #[inline]
    pub fn trace(&self, a: FieldElement) -> u8 {
        debug_assert!(self.contains(a));
        ((a.0 & self.trace_mask).count_ones() & 1) as u8
    }

    /// Absolute trace evaluated literally as `a + a^2 + ... + a^(2^(r-1))`.
    pub fn trace_frobenius(&self, a: FieldElement) -> u8 {
        let mut acc = FieldElement::ZERO;
        let mut x = a;
        for _ in 0..self.r {
            acc = self.add(acc, x);
            x = self.square(x);
        }
        debug_assert!(acc.0 <= 1, "trace left GF(2)");
        acc.0 as u8
    }

    /// Canonical additive character `(-1)^tr(a)`.
    #[inline]
    pub fn lambda(&self, a: FieldElement) -> i64 {
        1 - 2 * self.trace(a) as i64
    }

    fn check_pair(&self, a: FieldElement, b: FieldElement) -> Result<()> {
        for x in [a, b] {
            if !self.contains(x) {
                return Err(Error::Usage(format!(
                    "{x} is not an element of GF(2^{})",
                    self.r
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{}) mod {:#b}", self.r, self.poly)
    }
}

/// Default reduction polynomial for degree `r`.
pub fn default_poly(r: u32) -> Result<u64> {
    if r == 0 || r > MAX_DEGREE {
        return Err(Error::Usage(format!(
            "extension degree must be in 1..={MAX_DEGREE}, got {r}"
        )));
    }
    Ok(DEFAULT_POLYS[r as usize])
}

/// Degree of a GF(2)[x] polynomial, `None` for the zero polynomial.
pub fn poly_degree(p: u64) -> Option<u32> {
    (p != 0).then(|| 63 - p.leading_zeros())
}

#[inline]
fn clmul(a: u64, mut b: u64) -> u64 {
    let mut acc = 0u64;
    let mut shifted = a;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= shifted;
        }
        shifted <<= 1;
        b >>= 1;
    }
    acc
}

fn poly_rem(mut a: u64, b: u64) -> u64 {
    let db = poly_degree(b).expect("division by zero polynomial");
    while let Some(da) = poly_degree(a) {
        if da < db {
            break;
        }
        a ^= b << (da - db);
    }
    a
}

/// Trial division by every polynomial of degree `1..=deg/2`.
pub fn is_irreducible(p: u64) -> bool {
    let Some(deg) = poly_degree(p) else {
        return false;
    };
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        for divisor in (1u64 << d)..(1u64 << (d + 1)) {
            if poly_rem(p, divisor) == 0 {
                return false;
            }
        }
    }
    true
}
