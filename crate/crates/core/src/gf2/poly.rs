use std::fmt;

use super::BitVec;
use crate::error::{Error, Result};

/// Polynomial over GF(2). Index `a` of `coeffs` holds the coefficient of `x^a`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Poly {
    coeffs: BitVec,
}

impl Gf2Poly {
    /// Builds a polynomial from coefficients in ascending degree order.
    /// Trailing zero coefficients are dropped.
    pub fn from_coeffs(coeffs: &BitVec) -> Result<Self> {
        let degree = coeffs
            .last_one()
            .ok_or_else(|| Error::InvalidPolynomial("zero polynomial".into()))?;
        Ok(Self {
            coeffs: coeffs.slice(0, degree + 1),
        })
    }

    /// Builds a polynomial from the exponents of its nonzero terms.
    pub fn from_exponents(exponents: &[usize]) -> Result<Self> {
        let max = *exponents
            .iter()
            .max()
            .ok_or_else(|| Error::InvalidPolynomial("zero polynomial".into()))?;
        let mut c = BitVec::zeros(max + 1);
        for &e in exponents {
            c.flip(e);
        }
        Self::from_coeffs(&c)
    }

    /// Parses a binary string written highest degree first, e.g. `"101001"` is
    /// `x^5 + x^3 + 1`.
    pub fn from_msb_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::InvalidPolynomial("empty polynomial string".into()));
        }
        let bits = BitVec::parse_bits(s)
            .map_err(|e| Error::InvalidPolynomial(format!("{s:?}: {e}")))?;
        let n = bits.len();
        let mut c = BitVec::zeros(n);
        for i in bits.support() {
            c.set(n - 1 - i, true);
        }
        Self::from_coeffs(&c)
    }

    /// Parses a hexadecimal value whose bit `a` is the coefficient of `x^a`
    /// (e.g. `0xE21` for `x^11 + x^10 + x^9 + x^5 + 1`).
    pub fn from_hex(s: &str) -> Result<Self> {
        let digits = s
            .trim()
            .trim_start_matches("0x")
            .trim_start_matches("0X");
        if digits.is_empty() {
            return Err(Error::InvalidPolynomial("empty hex string".into()));
        }
        let mut c = BitVec::zeros(digits.len() * 4);
        for (k, ch) in digits.chars().rev().enumerate() {
            let v = ch
                .to_digit(16)
                .ok_or_else(|| Error::InvalidPolynomial(format!("invalid hex digit {ch:?}")))?;
            for b in 0..4 {
                if (v >> b) & 1 == 1 {
                    c.set(4 * k + b, true);
                }
            }
        }
        Self::from_coeffs(&c)
    }

    /// Accepts either a `0x`-prefixed hex value or an MSB-first binary string.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with("0x") || s.starts_with("0X") {
            Self::from_hex(s)
        } else {
            Self::from_msb_str(s)
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, a: usize) -> bool {
        a < self.coeffs.len() && self.coeffs.get(a)
    }

    pub fn coeffs(&self) -> &BitVec {
        &self.coeffs
    }

    /// Binary string, highest degree first.
    pub fn to_msb_string(&self) -> String {
        (0..=self.degree())
            .rev()
            .map(|a| if self.coeff(a) { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Display for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = (0..=self.degree())
            .rev()
            .filter(|&a| self.coeff(a))
            .map(|a| match a {
                0 => "1".to_string(),
                1 => "x".to_string(),
                _ => format!("x^{a}"),
            })
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

impl fmt::Debug for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Poly({self})")
    }
}

/// Long division over GF(2).
///
/// `dividend` is read as a polynomial with index `a` holding the coefficient
/// of `x^a`. Returns `(quotient, remainder)`, the remainder padded to exactly
/// `divisor.degree()` coefficients.
pub fn poly_divmod(dividend: &BitVec, divisor: &Gf2Poly) -> Result<(BitVec, BitVec)> {
    let t = divisor.degree();
    if t == 0 {
        return Err(Error::InvalidPolynomial(
            "divisor must have degree at least 1".into(),
        ));
    }
    let mut rem = dividend.clone();
    let qlen = dividend.len().saturating_sub(t).max(1);
    let mut quot = BitVec::zeros(qlen);
    let divisor_support = divisor.coeffs().support();
    if dividend.len() > t {
        for top in (t..dividend.len()).rev() {
            if rem.get(top) {
                let shift = top - t;
                quot.set(shift, true);
                for &a in &divisor_support {
                    rem.flip(a + shift);
                }
            }
        }
    }
    let mut out = BitVec::zeros(t);
    for a in rem.support() {
        // only coefficients below t remain
        out.set(a, true);
    }
    Ok((quot, out))
}

/// Product of two GF(2) polynomials given as coefficient vectors.
pub fn poly_mul(a: &BitVec, b: &BitVec) -> BitVec {
    if a.is_empty() || b.is_empty() {
        return BitVec::zeros(0);
    }
    let mut out = BitVec::zeros(a.len() + b.len() - 1);
    for i in a.support() {
        for j in b.support() {
            out.flip(i + j);
        }
    }
    out
}
