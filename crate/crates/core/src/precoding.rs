//! Precoders and encoders for the five schemes.
//!
//! Every encoder maps a K-bit data word `d` through the stages
//! `d -> c -> v -> u -> x`: outer precoding (CRC), rate profiling onto the
//! information set, inner precoding (convolution or remainder masking), and
//! finally the polar transform.

use std::fmt;
use std::str::FromStr;

use crate::construction::{RateProfile, Scheme};
use crate::error::{Error, Result};
use crate::gf2::{poly_divmod, polar_transform, BitVec, Gf2Poly};

/// How the CRC parity is derived from the data polynomial
/// `d(x) = d_0 x^{K-1} + ... + d_{K-1}` (first data bit is the highest degree).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CrcConvention {
    /// Remainder of the zero-extended word `[d | 0^t]` shifted by `x^t`,
    /// i.e. `d(x) x^{2t} mod q(x)`.
    #[default]
    Padded,
    /// Textbook systematic CRC, `d(x) x^t mod q(x)`.
    Shifted,
    /// `d(x) mod q(x)` with no shift.
    Plain,
}

impl CrcConvention {
    fn shift(self, t: usize) -> usize {
        match self {
            CrcConvention::Padded => 2 * t,
            CrcConvention::Shifted => t,
            CrcConvention::Plain => 0,
        }
    }
}

impl fmt::Display for CrcConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CrcConvention::Padded => "padded",
            CrcConvention::Shifted => "shifted",
            CrcConvention::Plain => "plain",
        })
    }
}

impl FromStr for CrcConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "padded" => Ok(Self::Padded),
            "shifted" => Ok(Self::Shifted),
            "plain" => Ok(Self::Plain),
            other => Err(Error::Parse(format!("unknown CRC convention {other:?}"))),
        }
    }
}

/// CRC generator polynomial `q(x)` of degree `t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CrcSpec {
    poly: Gf2Poly,
    convention: CrcConvention,
}

impl CrcSpec {
    pub fn new(poly: Gf2Poly) -> Result<Self> {
        Self::with_convention(poly, CrcConvention::default())
    }

    pub fn with_convention(poly: Gf2Poly, convention: CrcConvention) -> Result<Self> {
        if poly.degree() == 0 {
            return Err(Error::InvalidPolynomial(
                "CRC polynomial must have degree >= 1".into(),
            ));
        }
        if !poly.coeff(0) {
            return Err(Error::InvalidPolynomial(format!(
                "CRC polynomial {poly} must have a constant term"
            )));
        }
        Ok(Self { poly, convention })
    }

    /// Parses an MSB-first binary string or `0x` hex value.
    pub fn parse(s: &str) -> Result<Self> {
        Self::new(Gf2Poly::parse(s)?)
    }

    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    pub fn poly(&self) -> &Gf2Poly {
        &self.poly
    }

    pub fn convention(&self) -> CrcConvention {
        self.convention
    }

    /// Parity bits of `data` in serial order: entry 0 is the coefficient of
    /// `x^{t-1}`, the last entry the constant coefficient.
    pub fn parity(&self, data: &BitVec) -> BitVec {
        let t = self.degree();
        let k = data.len();
        let shift = self.convention.shift(t);
        let mut dividend = BitVec::zeros(k + shift + 1);
        for j in data.support() {
            dividend.set(k - 1 - j + shift, true);
        }
        let (_, rem) = poly_divmod(&dividend, &self.poly).expect("degree checked at construction");
        let mut out = BitVec::zeros(t);
        for a in rem.support() {
            out.set(t - 1 - a, true);
        }
        out
    }

    /// True when the last `t` bits of `word` are the parity of the first `len - t`.
    pub fn check(&self, word: &BitVec) -> bool {
        let t = self.degree();
        if word.len() < t {
            return false;
        }
        let k = word.len() - t;
        self.parity(&word.slice(0, k)) == word.slice(k, word.len())
    }
}

/// Systematic CRC encoding `c = [d | parity(d)]`.
pub fn crc_encode(d: &BitVec, crc: &CrcSpec) -> BitVec {
    d.concat(&crc.parity(d))
}

/// Convolution polynomial `p = [p_0, ..., p_s]` with `p_0 = p_s = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConvSpec {
    coeffs: BitVec,
}

impl ConvSpec {
    /// From coefficients in ascending order `p_0, p_1, ..., p_s`.
    pub fn from_coeffs(coeffs: &[u8]) -> Result<Self> {
        let bits = BitVec::from_bits(coeffs);
        let poly = Gf2Poly::from_coeffs(&bits)?;
        Self::from_poly(&poly)
    }

    /// From a binary string written highest degree first: `"1011011011"`
    /// reads as `p_9 p_8 ... p_0`.
    pub fn from_msb_str(s: &str) -> Result<Self> {
        Self::from_poly(&Gf2Poly::from_msb_str(s)?)
    }

    fn from_poly(poly: &Gf2Poly) -> Result<Self> {
        if !poly.coeff(0) {
            return Err(Error::InvalidPolynomial(format!(
                "convolution polynomial {poly} needs p_0 = 1"
            )));
        }
        Ok(Self {
            coeffs: poly.coeffs().clone(),
        })
    }

    /// Degree `s`.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &BitVec {
        &self.coeffs
    }

    /// Taps `l >= 1` with `p_l = 1`.
    pub fn taps(&self) -> Vec<usize> {
        self.coeffs.support().into_iter().filter(|&l| l > 0).collect()
    }

    pub fn to_msb_string(&self) -> String {
        (0..self.coeffs.len())
            .rev()
            .map(|l| if self.coeffs.get(l) { '1' } else { '0' })
            .collect()
    }
}

/// `u_i = sum_l p_l v_{i-l}`.
pub fn conv_precode(v: &BitVec, conv: &ConvSpec) -> BitVec {
    let n = v.len();
    let mut u = BitVec::zeros(n);
    let taps = conv.coeffs.support();
    for i in v.support() {
        for &l in &taps {
            if i + l < n {
                u.flip(i + l);
            }
        }
    }
    u
}

/// Inverse of [`conv_precode`] by back-substitution.
pub fn conv_deprecode(u: &BitVec, conv: &ConvSpec) -> BitVec {
    let n = u.len();
    let taps = conv.taps();
    let mut v = BitVec::zeros(n);
    for i in 0..n {
        let mut b = u.get(i);
        for &l in &taps {
            if l <= i && v.get(i - l) {
                b = !b;
            }
        }
        if b {
            v.set(i, true);
        }
    }
    v
}

/// How the intermediate remainder after data bit `j` is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum RemainderRule {
    /// Fresh division of the `(t+1)`-bit window `[d_{j-t}, ..., d_j]`
    /// (zero-padded on the right while `j < t`).
    #[default]
    SlidingWindow,
    /// Remainder of the whole prefix `d_0 ... d_j` once `j >= t`; same
    /// zero-padded start as the window rule.
    Running,
}

impl fmt::Display for RemainderRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RemainderRule::SlidingWindow => "window",
            RemainderRule::Running => "running",
        })
    }
}

impl FromStr for RemainderRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "window" | "sliding_window" => Ok(Self::SlidingWindow),
            "running" => Ok(Self::Running),
            other => Err(Error::Parse(format!("unknown remainder rule {other:?}"))),
        }
    }
}

/// Intermediate remainder after consuming data bit `j` of `data`.
///
/// Returned with index `a` holding the coefficient of `x^a` (length `t`).
/// Only `data[0..=j]` is read.
pub fn intermediate_remainder(
    data: &BitVec,
    j: usize,
    crc: &CrcSpec,
    rule: RemainderRule,
) -> BitVec {
    let t = crc.degree();
    let mut dividend;
    if j < t {
        // [d_0 .. d_j, 0 .. 0], t+1 coefficients, d_0 at x^t
        dividend = BitVec::zeros(t + 1);
        for k in 0..=j {
            if data.get(k) {
                dividend.set(t - k, true);
            }
        }
    } else {
        match rule {
            RemainderRule::SlidingWindow => {
                dividend = BitVec::zeros(t + 1);
                for k in (j - t)..=j {
                    if data.get(k) {
                        dividend.set(j - k, true);
                    }
                }
            }
            RemainderRule::Running => {
                dividend = BitVec::zeros(j + 1);
                for k in 0..=j {
                    if data.get(k) {
                        dividend.set(j - k, true);
                    }
                }
            }
        }
    }
    poly_divmod(&dividend, crc.poly())
        .expect("degree checked at construction")
        .1
}

/// Bit written at offset `offset` of a masked run of length `run_len`.
///
/// Runs no longer than `t` take the first `run_len` remainder coefficients;
/// longer runs repeat the remainder cyclically.
#[inline]
pub fn mask_bit(remainder: &BitVec, offset: usize, run_len: usize) -> bool {
    let t = remainder.len();
    if run_len <= t {
        remainder.get(offset)
    } else {
        remainder.get(offset % t)
    }
}

/// One masked position of a CCRC-polar profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaskSlot {
    pub position: usize,
    /// Index into the data word of the last data bit before the run.
    pub data_index: usize,
    pub offset: usize,
    pub run_len: usize,
}

/// Precomputed layout of the masked positions for a profile.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MaskPlan {
    slots: Vec<MaskSlot>,
}

impl MaskPlan {
    pub fn new(profile: &RateProfile) -> Self {
        let masked = profile.masked_set();
        if masked.is_empty() {
            return Self::default();
        }
        let n = profile.n();
        let is_masked = profile.indicator(masked);
        let data_rank = profile.data_rank();
        let mut slots = Vec::with_capacity(masked.len());
        let mut last_data: Option<usize> = None;
        let mut i = 0;
        while i < n {
            if let Some(j) = data_rank[i] {
                last_data = Some(j);
                i += 1;
                continue;
            }
            if !is_masked[i] {
                i += 1;
                continue;
            }
            let start = i;
            while i < n && is_masked[i] {
                i += 1;
            }
            let run_len = i - start;
            let data_index = last_data.expect("masked positions follow the first data bit");
            for offset in 0..run_len {
                slots.push(MaskSlot {
                    position: start + offset,
                    data_index,
                    offset,
                    run_len,
                });
            }
        }
        Self { slots }
    }

    pub fn slots(&self) -> &[MaskSlot] {
        &self.slots
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Expected values of the masked positions for a full data word.
    pub fn expected(&self, data: &BitVec, crc: &CrcSpec, rule: RemainderRule) -> Vec<(usize, bool)> {
        let mut cache: Option<(usize, BitVec)> = None;
        self.slots
            .iter()
            .map(|s| {
                let rem = match &cache {
                    Some((j, r)) if *j == s.data_index => r.clone(),
                    _ => {
                        let r = intermediate_remainder(data, s.data_index, crc, rule);
                        cache = Some((s.data_index, r.clone()));
                        r
                    }
                };
                (s.position, mask_bit(&rem, s.offset, s.run_len))
            })
            .collect()
    }
}

/// Fills the masked positions of a profiled vector with intermediate
/// remainders of the data it carries. Positions outside the masked set are
/// returned unchanged.
pub fn mask_remainders(c_scattered: &BitVec, profile: &RateProfile) -> Result<BitVec> {
    if profile.scheme() != Scheme::CcrcPolar {
        return Err(Error::SchemeMismatch {
            expected: Scheme::CcrcPolar.to_string(),
            actual: profile.scheme(),
        });
    }
    if c_scattered.len() != profile.n() {
        return Err(Error::InvalidDimension(format!(
            "expected length {}, got {}",
            profile.n(),
            c_scattered.len()
        )));
    }
    let crc = profile.crc().expect("ccrc profile carries a CRC");
    let plan = MaskPlan::new(profile);
    let data = c_scattered.gather(profile.data_positions());
    let mut out = c_scattered.clone();
    for (pos, bit) in plan.expected(&data, crc, profile.remainder_rule()) {
        out.set(pos, bit);
    }
    Ok(out)
}

/// Intermediate vectors of one encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodeTrace {
    /// Data word, length K.
    pub d: BitVec,
    /// Outer-precoded word (K + t with CRC, else K).
    pub c: BitVec,
    /// Rate-profiled vector, length N.
    pub v: BitVec,
    /// Polar transform input, length N.
    pub u: BitVec,
    /// Codeword, length N.
    pub x: BitVec,
}

/// Encoder bound to a profile. Immutable and shareable across threads.
#[derive(Debug, Clone)]
pub struct Encoder {
    profile: RateProfile,
    plan: MaskPlan,
}

impl Encoder {
    pub fn new(profile: &RateProfile) -> Self {
        Self {
            plan: MaskPlan::new(profile),
            profile: profile.clone(),
        }
    }

    pub fn profile(&self) -> &RateProfile {
        &self.profile
    }

    pub fn mask_plan(&self) -> &MaskPlan {
        &self.plan
    }

    pub fn encode(&self, d: &BitVec) -> Result<EncodeTrace> {
        let p = &self.profile;
        if d.len() != p.k() {
            return Err(Error::InvalidDimension(format!(
                "data length {} does not match K = {}",
                d.len(),
                p.k()
            )));
        }
        let c = match p.crc() {
            Some(crc) if p.scheme().uses_crc() => crc_encode(d, crc),
            _ => d.clone(),
        };
        let mut v = BitVec::zeros(p.n());
        v.scatter(p.info_set(), &c);
        let u = match p.scheme() {
            Scheme::Polar | Scheme::CrcPolar => v.clone(),
            Scheme::Pac | Scheme::PsPac => {
                conv_precode(&v, p.conv().expect("pac profile carries a polynomial"))
            }
            Scheme::CcrcPolar => {
                let crc = p.crc().expect("ccrc profile carries a CRC");
                let mut u = v.clone();
                for (pos, bit) in self.plan.expected(d, crc, p.remainder_rule()) {
                    u.set(pos, bit);
                }
                u
            }
        };
        let x = polar_transform(&u)?;
        Ok(EncodeTrace {
            d: d.clone(),
            c,
            v,
            u,
            x,
        })
    }

    pub fn codeword(&self, d: &BitVec) -> Result<BitVec> {
        Ok(self.encode(d)?.x)
    }
}

/// One-shot encode; see [`Encoder`] for repeated use.
pub fn encode(d: &BitVec, profile: &RateProfile) -> Result<EncodeTrace> {
    Encoder::new(profile).encode(d)
}
