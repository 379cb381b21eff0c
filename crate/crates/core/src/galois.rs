//! Finite-field and univariate polynomial arithmetic.
//!
//! Two families are supported:
//!
//! - prime fields GF(p), p ≤ 257, with plain modular arithmetic;
//! - binary extension fields GF(2^m), 2 ≤ m ≤ 12, backed by exp/log tables
//!   built from a fixed primitive modulus.
//!
//! Elements are bare [`Fe`] values; every operation goes through the owning
//! [`Field`]. For GF(2^m) an element's value is its bit-packed polynomial
//! representation (bit `i` is the coefficient of `x^i`).

use std::fmt;

use crate::{Error, Result};

/// Field element. The integer value doubles as the total order on the field
/// used for tie-breaking (α₀ < α₁ < ⋯).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fe(pub u16);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn value(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Primitive moduli for GF(2^m), bit-packed with the leading term included.
const BINARY_MODULI: [u32; 13] = [
    0, 0, 0x7, // x^2+x+1
    0xB,    // x^3+x+1
    0x13,   // x^4+x+1
    0x25,   // x^5+x^2+1
    0x43,   // x^6+x+1
    0x83,   // x^7+x+1
    0x11D,  // x^8+x^4+x^3+x^2+1
    0x211,  // x^9+x^4+1
    0x409,  // x^10+x^3+1
    0x805,  // x^11+x^2+1
    0x1053, // x^12+x^6+x^4+x+1
];

#[derive(Clone, Debug)]
enum Repr {
    Prime,
    Binary { modulus: u32, exp: Vec<u16>, log: Vec<u16> },
}

/// A finite field GF(p^m). Immutable once built.
#[derive(Clone, Debug)]
pub struct Field {
    p: u16,
    m: u32,
    q: usize,
    repr: Repr,
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl Field {
    /// Builds GF(p^m).
    pub fn new(p: u32, m: u32) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        match (p, m) {
            (p, 1) if p <= 257 => Ok(Field {
                p: p as u16,
                m: 1,
                q: p as usize,
                repr: Repr::Prime,
            }),
            (2, m @ 2..=12) => Self::binary(m),
            _ => Err(Error::UnsupportedField { p, m }),
        }
    }

    /// GF(p), shorthand for `Field::new(p, 1)`.
    pub fn prime(p: u32) -> Result<Field> {
        Self::new(p, 1)
    }

    fn binary(m: u32) -> Result<Field> {
        let modulus = BINARY_MODULI[m as usize];
        let q = 1usize << m;
        let mut exp = vec![0u16; 2 * (q - 1)];
        let mut log = vec![0u16; q];
        let mut x: u32 = 1;
        for i in 0..q - 1 {
            if i > 0 && x == 1 {
                return Err(Error::NotPrimitive { m, modulus });
            }
            exp[i] = x as u16;
            log[x as usize] = i as u16;
            x <<= 1;
            if x & (1 << m) != 0 {
                x ^= modulus;
            }
        }
        if x != 1 {
            return Err(Error::NotPrimitive { m, modulus });
        }
        for i in q - 1..2 * (q - 1) {
            exp[i] = exp[i - (q - 1)];
        }
        Ok(Field {
            p: 2,
            m,
            q,
            repr: Repr::Binary { modulus, exp, log },
        })
    }

    /// Field size q = p^m.
    #[inline]
    pub fn order(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn characteristic(&self) -> u32 {
        self.p as u32
    }

    /// Extension degree m; also the number of BPSK bits per symbol for
    /// binary fields.
    #[inline]
    pub fn degree(&self) -> u32 {
        self.m
    }

    /// Reduction polynomial, bit-packed (extension fields only).
    pub fn modulus(&self) -> Option<u32> {
        match &self.repr {
            Repr::Prime => None,
            Repr::Binary { modulus, .. } => Some(*modulus),
        }
    }

    /// Element with integer value `v`; panics if `v ≥ q`.
    #[inline]
    pub fn elem(&self, v: usize) -> Fe {
        assert!(v < self.q, "element {v} out of range for GF({})", self.q);
        Fe(v as u16)
    }

    /// All elements in value order.
    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.q).map(|v| Fe(v as u16))
    }

    /// α^i for the primitive element α of a binary field; for prime fields
    /// falls back to `i` itself so that default evaluation sets stay simple.
    pub fn alpha_pow(&self, i: usize) -> Fe {
        match &self.repr {
            Repr::Prime => self.elem(i % self.q),
            Repr::Binary { exp, .. } => Fe(exp[i % (self.q - 1)]),
        }
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        match self.repr {
            Repr::Prime => {
                let s = a.0 as u32 + b.0 as u32;
                let p = self.p as u32;
                Fe(if s >= p { s - p } else { s } as u16)
            }
            Repr::Binary { .. } => Fe(a.0 ^ b.0),
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        match self.repr {
            Repr::Prime if a.0 != 0 => Fe(self.p - a.0),
            _ => a,
        }
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        match &self.repr {
            Repr::Prime => Fe(((a.0 as u32 * b.0 as u32) % self.p as u32) as u16),
            Repr::Binary { exp, log, .. } => {
                if a.0 == 0 || b.0 == 0 {
                    Fe::ZERO
                } else {
                    Fe(exp[log[a.0 as usize] as usize + log[b.0 as usize] as usize])
                }
            }
        }
    }

    /// Multiplicative inverse.
    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.is_zero() {
            return Err(Error::ZeroInverse);
        }
        Ok(self.inv_nonzero(a))
    }

    #[inline]
    pub(crate) fn inv_nonzero(&self, a: Fe) -> Fe {
        debug_assert!(!a.is_zero());
        match &self.repr {
            Repr::Prime => self.pow(a, self.p as u64 - 2),
            Repr::Binary { exp, log, .. } => {
                let l = log[a.0 as usize] as usize;
                Fe(exp[(self.q - 1 - l) % (self.q - 1)])
            }
        }
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Fe, mut e: u64) -> Fe {
        let mut base = a;
        let mut acc = Fe::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

/// Univariate polynomial over a [`Field`], coefficients low-degree first.
/// Trailing zero coefficients are always trimmed, so the zero polynomial has
/// an empty coefficient vector.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<Fe>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Fe) -> Poly {
        Poly::new(vec![c])
    }

    /// The monomial x.
    pub fn x() -> Poly {
        Poly::new(vec![Fe::ZERO, Fe::ONE])
    }

    pub fn new(mut coeffs: Vec<Fe>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_values(values: &[u16]) -> Poly {
        Poly::new(values.iter().map(|&v| Fe(v)).collect())
    }

    #[inline]
    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    /// Coefficient of x^i (zero beyond the degree).
    #[inline]
    pub fn coeff(&self, i: usize) -> Fe {
        self.coeffs.get(i).copied().unwrap_or(Fe::ZERO)
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    #[inline]
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, gf: &Field, x: Fe) -> Fe {
        self.coeffs
            .iter()
            .rev()
            .fold(Fe::ZERO, |acc, &c| gf.add(gf.mul(acc, x), c))
    }

    pub fn add(&self, other: &Poly, gf: &Field) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        Poly::new(
            (0..len)
                .map(|i| gf.add(self.coeff(i), other.coeff(i)))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Poly, gf: &Field) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        Poly::new(
            (0..len)
                .map(|i| gf.sub(self.coeff(i), other.coeff(i)))
                .collect(),
        )
    }

    pub fn neg(&self, gf: &Field) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|&c| gf.neg(c)).collect(),
        }
    }

    pub fn scale(&self, s: Fe, gf: &Field) -> Poly {
        if s.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|&c| gf.mul(c, s)).collect(),
        }
    }

    /// `a·self − b·other`, the cross-combination used by interpolation updates.
    pub fn cross(&self, a: Fe, other: &Poly, b: Fe, gf: &Field) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        Poly::new(
            (0..len)
                .map(|i| gf.sub(gf.mul(a, self.coeff(i)), gf.mul(b, other.coeff(i))))
                .collect(),
        )
    }

    pub fn mul(&self, other: &Poly, gf: &Field) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Fe::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = gf.add(out[i + j], gf.mul(a, b));
            }
        }
        Poly::new(out)
    }

    /// Multiplies by (x − β).
    pub fn mul_linear(&self, beta: Fe, gf: &Field) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let nb = gf.neg(beta);
        let mut out = vec![Fe::ZERO; self.coeffs.len() + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[i + 1] = gf.add(out[i + 1], c);
            out[i] = gf.add(out[i], gf.mul(c, nb));
        }
        Poly::new(out)
    }

    /// Synthetic division by (x − β): returns the quotient and the remainder
    /// (which equals `self(β)`).
    pub fn div_linear(&self, beta: Fe, gf: &Field) -> (Poly, Fe) {
        if self.coeffs.is_empty() {
            return (Poly::zero(), Fe::ZERO);
        }
        let d = self.coeffs.len() - 1;
        let mut quot = vec![Fe::ZERO; d];
        let mut carry = Fe::ZERO;
        for i in (0..=d).rev() {
            let v = gf.add(self.coeffs[i], gf.mul(carry, beta));
            if i == 0 {
                return (Poly::new(quot), v);
            }
            quot[i - 1] = v;
            carry = v;
        }
        unreachable!()
    }

    /// Long division: `self = q·den + r`, `deg r < deg den`.
    pub fn divrem(&self, den: &Poly, gf: &Field) -> Result<(Poly, Poly)> {
        let dd = den.degree().ok_or(Error::PolyDivByZero)?;
        let lead_inv = gf.inv_nonzero(den.coeffs[dd]);
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![Fe::ZERO; rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = gf.mul(rem[i + dd], lead_inv);
            quot[i] = c;
            if c.is_zero() {
                continue;
            }
            for (j, &dc) in den.coeffs.iter().enumerate() {
                rem[i + j] = gf.sub(rem[i + j], gf.mul(c, dc));
            }
        }
        rem.truncate(dd);
        Ok((Poly::new(quot), Poly::new(rem)))
    }
}

impl fmt::Display for Poly {
    /// Renders as `1+3x+2x^2`; the zero polynomial prints as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str("+")?;
            }
            first = false;
            match (i, c.0) {
                (0, v) => write!(f, "{v}")?,
                (1, 1) => f.write_str("x")?,
                (1, v) => write!(f, "{v}x")?,
                (i, 1) => write!(f, "x^{i}")?,
                (i, v) => write!(f, "{v}x^{i}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}
