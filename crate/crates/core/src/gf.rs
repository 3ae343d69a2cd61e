//! Exact GF(2^q) arithmetic for q = 2..8 with precomputed exp/log tables.
//!
//! Symbols are stored in polynomial basis: the integer's bits are the
//! coefficients of the element's polynomial representation, so addition is a
//! plain XOR. Multiplication and inversion go through the exp/log tables,
//! which are built eagerly at field construction.

use thiserror::Error;

/// Smallest supported symbol width.
pub const MIN_Q: u32 = 2;
/// Largest supported symbol width.
pub const MAX_Q: u32 = 8;

/// Minimal-weight primitive polynomials for q = 2..8, as degree-q bitmasks.
const DEFAULT_POLYS: [u32; 7] = [
    0b111,       // x^2 + x + 1
    0b1011,      // x^3 + x + 1
    0b10011,     // x^4 + x + 1
    0b100101,    // x^5 + x^2 + 1
    0b1000011,   // x^6 + x + 1
    0b10000011,  // x^7 + x + 1
    0b100011101, // x^8 + x^4 + x^3 + x^2 + 1
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("q = {0} is outside the supported range [2, 8]")]
    UnsupportedQ(u32),
    #[error("polynomial {0:#b} does not have degree exactly {1}")]
    WrongDegree(u32, u32),
    #[error("polynomial {0:#b} is not primitive: powers of the generator repeat after {1} steps")]
    NonPrimitivePolynomial(u32, usize),
    #[error("division by zero in GF({0})")]
    DivisionByZero(usize),
}

/// A GF(2^q) element in polynomial-basis representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct GfSym(pub u8);

impl GfSym {
    pub const ZERO: GfSym = GfSym(0);
    pub const ONE: GfSym = GfSym(1);
    /// The primitive element alpha (the polynomial "x").
    pub const ALPHA: GfSym = GfSym(2);

    #[inline]
    pub fn value(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// A GF(2^q) field definition with its precomputed tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    q: u32,
    g: usize,
    poly: u32,
    /// exp[i] = alpha^i, length g - 1.
    exp: Vec<u8>,
    /// log[x] = i such that alpha^i = x, length g. Entry 0 is unused.
    log: Vec<u8>,
}

/// Builds a GF(2^q) field, checking primitivity of the polynomial.
///
/// With `poly == None` the conventional minimal-weight primitive polynomial
/// for the given q is used.
pub fn build_field(q: u32, poly: Option<u32>) -> Result<FieldSpec, GfError> {
    if !(MIN_Q..=MAX_Q).contains(&q) {
        return Err(GfError::UnsupportedQ(q));
    }
    let poly = poly.unwrap_or(DEFAULT_POLYS[(q - MIN_Q) as usize]);
    if poly >> q != 1 {
        return Err(GfError::WrongDegree(poly, q));
    }
    let g = 1usize << q;
    let mut exp = vec![0u8; g - 1];
    let mut log = vec![0u8; g];
    let mut seen = vec![false; g];
    let mut e: u32 = 1;
    for (i, slot) in exp.iter_mut().enumerate() {
        if seen[e as usize] {
            return Err(GfError::NonPrimitivePolynomial(poly, i));
        }
        seen[e as usize] = true;
        *slot = e as u8;
        log[e as usize] = i as u8;
        // multiply by alpha, reduce by the defining polynomial
        e <<= 1;
        if e >> q != 0 {
            e ^= poly;
        }
    }
    if e != 1 {
        return Err(GfError::NonPrimitivePolynomial(poly, g - 1));
    }
    Ok(FieldSpec { q, g, poly, exp, log })
}

impl FieldSpec {
    pub fn new(q: u32) -> Result<FieldSpec, GfError> {
        build_field(q, None)
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    /// Field order g = 2^q.
    #[inline]
    pub fn order(&self) -> usize {
        self.g
    }

    #[inline]
    pub fn poly(&self) -> u32 {
        self.poly
    }

    #[inline]
    pub fn contains(&self, a: GfSym) -> bool {
        (a.0 as usize) < self.g
    }

    /// Addition is XOR in polynomial basis.
    #[inline]
    pub fn add(&self, a: GfSym, b: GfSym) -> GfSym {
        debug_assert!(self.contains(a) && self.contains(b));
        GfSym(a.0 ^ b.0)
    }

    #[inline]
    pub fn mul(&self, a: GfSym, b: GfSym) -> GfSym {
        debug_assert!(self.contains(a) && self.contains(b));
        if a.is_zero() || b.is_zero() {
            return GfSym::ZERO;
        }
        let s = self.log[a.0 as usize] as usize + self.log[b.0 as usize] as usize;
        let n = self.g - 1;
        GfSym(self.exp[if s >= n { s - n } else { s }])
    }

    pub fn inv(&self, a: GfSym) -> Result<GfSym, GfError> {
        if a.is_zero() {
            return Err(GfError::DivisionByZero(self.g));
        }
        let n = self.g - 1;
        let l = self.log[a.0 as usize] as usize;
        Ok(GfSym(self.exp[(n - l) % n]))
    }

    /// alpha^i for any non-negative exponent.
    #[inline]
    pub fn exp(&self, i: usize) -> GfSym {
        GfSym(self.exp[i % (self.g - 1)])
    }

    /// Discrete log of a nonzero element.
    #[inline]
    pub fn log(&self, a: GfSym) -> Option<u32> {
        if a.is_zero() {
            None
        } else {
            Some(self.log[a.0 as usize] as u32)
        }
    }

    /// exp table view (length g - 1).
    pub fn exp_table(&self) -> &[u8] {
        &self.exp
    }

    /// log table view (length g, entry 0 unused).
    pub fn log_table(&self) -> &[u8] {
        &self.log
    }

    /// Index map for barrel shifts: the poly-basis value of `a * x` where `x`
    /// is itself given as a poly-basis index.
    #[inline]
    pub fn mul_index(&self, a: GfSym, x: usize) -> usize {
        self.mul(a, GfSym(x as u8)).0 as usize
    }

    /// Power notation used at I/O boundaries: "0", "1", "a", "a^2", ...
    pub fn power_notation(&self, a: GfSym) -> String {
        match a.0 {
            0 => "0".to_string(),
            1 => "1".to_string(),
            2 => "a".to_string(),
            _ => format!("a^{}", self.log[a.0 as usize]),
        }
    }
}
