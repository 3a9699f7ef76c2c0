//! Reliability orderings and rate profiles.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gf2::check_length;
use crate::precoding::{ConvSpec, CrcConvention, CrcSpec, RemainderRule};

/// Default design SNR (dB) of the Gaussian-approximation construction.
pub const DEFAULT_DESIGN_SNR_DB: f64 = 2.0;

/// Design SNR at which the bundled reference orderings were generated.
pub const REFERENCE_DESIGN_SNR_DB: f64 = 3.5;

const DESIGN_RATE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Polar,
    CrcPolar,
    Pac,
    PsPac,
    CcrcPolar,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::Polar,
        Scheme::CrcPolar,
        Scheme::Pac,
        Scheme::PsPac,
        Scheme::CcrcPolar,
    ];

    pub fn uses_crc(self) -> bool {
        matches!(self, Scheme::CrcPolar | Scheme::CcrcPolar)
    }

    pub fn uses_conv(self) -> bool {
        matches!(self, Scheme::Pac | Scheme::PsPac)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Polar => "polar",
            Scheme::CrcPolar => "crc_polar",
            Scheme::Pac => "pac",
            Scheme::PsPac => "ps_pac",
            Scheme::CcrcPolar => "ccrc_polar",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        match norm.as_str() {
            "polar" => Ok(Scheme::Polar),
            "crc_polar" | "crc" => Ok(Scheme::CrcPolar),
            "pac" => Ok(Scheme::Pac),
            "ps_pac" | "pspac" => Ok(Scheme::PsPac),
            "ccrc_polar" | "ccrc" => Ok(Scheme::CcrcPolar),
            _ => Err(Error::Parse(format!("unknown scheme {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OrderSource {
    GaussianApproximation { design_snr_db: f64 },
    File(PathBuf),
    Reference,
    Explicit,
}

/// Bit-channel indices from least to most reliable.
#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityOrder {
    order: Vec<usize>,
    source: OrderSource,
}

impl ReliabilityOrder {
    pub fn new(order: Vec<usize>, source: OrderSource) -> Result<Self> {
        let n = order.len();
        check_length(n)?;
        let mut seen = vec![false; n];
        for &i in &order {
            if i >= n {
                return Err(Error::InvalidOrdering(format!(
                    "index {i} out of range for N = {n}"
                )));
            }
            if seen[i] {
                return Err(Error::InvalidOrdering(format!("duplicate index {i}")));
            }
            seen[i] = true;
        }
        Ok(Self { order, source })
    }

    /// Parses whitespace-separated indices; lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut order = Vec::new();
        for line in text.lines() {
            if line.trim_start().starts_with('#') {
                continue;
            }
            for tok in line.split_whitespace() {
                let v = tok
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidOrdering(format!("bad token {tok:?}")))?;
                order.push(v);
            }
        }
        if order.is_empty() {
            return Err(Error::InvalidOrdering("empty ordering".into()));
        }
        Self::new(order, OrderSource::Explicit)
    }

    /// Bundled ordering for `n` in 8..=1024.
    pub fn reference(n: usize) -> Result<Self> {
        let text = match n {
            8 => include_str!("../data/reliability_8.txt"),
            16 => include_str!("../data/reliability_16.txt"),
            32 => include_str!("../data/reliability_32.txt"),
            64 => include_str!("../data/reliability_64.txt"),
            128 => include_str!("../data/reliability_128.txt"),
            256 => include_str!("../data/reliability_256.txt"),
            512 => include_str!("../data/reliability_512.txt"),
            1024 => include_str!("../data/reliability_1024.txt"),
            _ => {
                return Err(Error::InvalidDimension(format!(
                    "no reference ordering for N = {n}"
                )))
            }
        };
        let mut o = Self::parse(text)?;
        o.source = OrderSource::Reference;
        Ok(o)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.order
    }

    pub fn source(&self) -> &OrderSource {
        &self.source
    }

    /// The `k` most reliable indices, sorted by index.
    pub fn most_reliable(&self, k: usize) -> Vec<usize> {
        let mut v = self.order[self.order.len() - k..].to_vec();
        v.sort_unstable();
        v
    }

    /// `rank[i]` is the position of index `i` in the ordering.
    pub fn ranks(&self) -> Vec<usize> {
        let mut r = vec![0; self.order.len()];
        for (pos, &i) in self.order.iter().enumerate() {
            r[i] = pos;
        }
        r
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for chunk in self.order.chunks(16) {
            let line: Vec<String> = chunk.iter().map(|i| i.to_string()).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }
}

pub fn load_reliabilities(path: &Path) -> Result<ReliabilityOrder> {
    let text = std::fs::read_to_string(path)?;
    let mut o = ReliabilityOrder::parse(&text)?;
    o.source = OrderSource::File(path.to_path_buf());
    Ok(o)
}

// ln phi(x) for the mean-to-error map of the Gaussian approximation
fn ln_phi(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x < 10.0 {
        -0.4527 * x.powf(0.86) + 0.0218
    } else {
        0.5 * (std::f64::consts::PI / x).ln() - x / 4.0 + (1.0 - 10.0 / (7.0 * x)).ln()
    }
}

fn ln_phi_inv(target: f64, upper: f64) -> f64 {
    let split = ln_phi(10.0 - 1e-12);
    if target >= split {
        let a = (0.0218 - target) / 0.4527;
        if a <= 0.0 {
            return 0.0;
        }
        return a.powf(1.0 / 0.86);
    }
    // large branch is decreasing on [10, inf)
    let mut lo = 10.0;
    let mut hi = upper.max(20.0);
    while ln_phi(hi) > target {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ln_phi(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn check_node_mean(m: f64) -> f64 {
    // phi^{-1}(1 - (1 - phi(m))^2) = phi^{-1}(phi(m) (2 - phi(m)))
    let lp = ln_phi(m);
    let p = lp.exp();
    ln_phi_inv(lp + (2.0 - p).ln(), m)
}

/// Mean LLR of every bit channel under the Gaussian approximation.
pub fn gaussian_means(n: usize, design_snr_db: f64) -> Result<Vec<f64>> {
    let levels = check_length(n)?;
    if !design_snr_db.is_finite() {
        return Err(Error::InvalidConfig("design SNR must be finite".into()));
    }
    let root = 4.0 * DESIGN_RATE * 10f64.powf(design_snr_db / 10.0);
    // z[j]: layer-by-layer, index bit (levels-1-lev) decided at level lev
    let mut z = vec![root];
    for _ in 0..levels {
        let mut next = Vec::with_capacity(z.len() * 2);
        for &m in &z {
            next.push(check_node_mean(m));
            next.push(2.0 * m);
        }
        z = next;
    }
    Ok(z)
}

pub fn gaussian_reliabilities(n: usize, design_snr_db: f64) -> Result<ReliabilityOrder> {
    let z = gaussian_means(n, design_snr_db)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| z[a].total_cmp(&z[b]).then(a.cmp(&b)));
    let mut o = ReliabilityOrder::new(order, OrderSource::Explicit)?;
    o.source = OrderSource::GaussianApproximation { design_snr_db };
    Ok(o)
}

/// Role of a transform-input position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Data,
    Crc,
    Frozen,
    /// Frozen position taken from the most reliable channels (PS-PAC).
    Reserved,
    /// Frozen position carrying an intermediate CRC remainder (CCRC-polar).
    Masked,
}

/// Assignment of the N transform-input positions to their roles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RateProfile {
    n: usize,
    k: usize,
    scheme: Scheme,
    info: Vec<usize>,
    frozen: Vec<usize>,
    crc_set: Vec<usize>,
    reserved: Vec<usize>,
    masked: Vec<usize>,
    conv: Option<ConvSpec>,
    crc: Option<CrcSpec>,
    alpha: usize,
    remainder_rule: RemainderRule,
    roles: Vec<Role>,
    data_positions: Vec<usize>,
}

pub fn build_profile(
    scheme: Scheme,
    n: usize,
    k: usize,
    order: &ReliabilityOrder,
    crc: Option<CrcSpec>,
    conv: Option<ConvSpec>,
    alpha: usize,
) -> Result<RateProfile> {
    check_length(n)?;
    if order.len() != n {
        return Err(Error::InvalidDimension(format!(
            "ordering has length {}, expected {n}",
            order.len()
        )));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidDimension(format!("K = {k} not in 1..={n}")));
    }
    let t = if scheme.uses_crc() {
        let c = crc.as_ref().ok_or_else(|| {
            Error::InvalidProfile(format!("{scheme} requires a CRC polynomial"))
        })?;
        c.degree()
    } else {
        0
    };
    if scheme.uses_conv() && conv.is_none() {
        return Err(Error::InvalidProfile(format!(
            "{scheme} requires a convolution polynomial"
        )));
    }
    if k + t > n {
        return Err(Error::InvalidDimension(format!(
            "K + t = {} exceeds N = {n}",
            k + t
        )));
    }
    let o = order.as_slice();
    let (info, reserved) = match scheme {
        Scheme::PsPac => {
            let s = conv.as_ref().map(|c| c.degree()).unwrap_or(0);
            if alpha >= s && alpha > 0 {
                return Err(Error::InvalidProfile(format!(
                    "alpha = {alpha} must be below the convolution degree {s}"
                )));
            }
            if k + alpha > n {
                return Err(Error::InvalidDimension(format!(
                    "K + alpha = {} exceeds N = {n}",
                    k + alpha
                )));
            }
            let mut info = o[n - k - alpha..n - alpha].to_vec();
            info.sort_unstable();
            let mut reserved = o[n - alpha..].to_vec();
            reserved.sort_unstable();
            (info, reserved)
        }
        _ => (order.most_reliable(k + t), Vec::new()),
    };
    let crc_set = info[info.len() - t..].to_vec();
    let masked = if scheme == Scheme::CcrcPolar {
        let i0 = info[0];
        (i0 + 1..n).filter(|j| info.binary_search(j).is_err()).collect()
    } else {
        Vec::new()
    };
    let frozen = (0..n).filter(|j| info.binary_search(j).is_err()).collect();
    RateProfile::from_parts(ProfileParts {
        scheme,
        n,
        k,
        info,
        frozen,
        crc_set,
        reserved,
        masked,
        conv: if scheme.uses_conv() { conv } else { None },
        crc: if scheme.uses_crc() { crc } else { None },
        alpha: if scheme == Scheme::PsPac { alpha } else { 0 },
        remainder_rule: RemainderRule::default(),
    })
}

/// Raw fields of a profile, validated by [`RateProfile::from_parts`].
#[derive(Debug, Clone)]
pub struct ProfileParts {
    pub scheme: Scheme,
    pub n: usize,
    pub k: usize,
    pub info: Vec<usize>,
    pub frozen: Vec<usize>,
    pub crc_set: Vec<usize>,
    pub reserved: Vec<usize>,
    pub masked: Vec<usize>,
    pub conv: Option<ConvSpec>,
    pub crc: Option<CrcSpec>,
    pub alpha: usize,
    pub remainder_rule: RemainderRule,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidProfile(msg.into())
}

fn sorted_unique(v: &[usize], n: usize, name: &str) -> Result<()> {
    for w in v.windows(2) {
        if w[0] >= w[1] {
            return Err(invalid(format!("{name} must be strictly increasing")));
        }
    }
    if let Some(&last) = v.last() {
        if last >= n {
            return Err(Error::IndexOutOfRange { index: last, len: n });
        }
    }
    Ok(())
}

impl RateProfile {
    pub fn from_parts(p: ProfileParts) -> Result<Self> {
        let n = p.n;
        check_length(n)?;
        for (v, name) in [
            (&p.info, "info set"),
            (&p.frozen, "frozen set"),
            (&p.crc_set, "CRC set"),
            (&p.reserved, "reserved set"),
            (&p.masked, "masked set"),
        ] {
            sorted_unique(v, n, name)?;
        }
        let mut is_info = vec![false; n];
        for &i in &p.info {
            is_info[i] = true;
        }
        if p.info.len() + p.frozen.len() != n || p.frozen.iter().any(|&j| is_info[j]) {
            return Err(invalid("info and frozen sets must partition 0..N"));
        }
        let t = p.crc.as_ref().map(|c| c.degree()).unwrap_or(0);
        if p.scheme.uses_crc() {
            if p.crc.is_none() {
                return Err(invalid(format!("{} requires a CRC polynomial", p.scheme)));
            }
            if p.info.len() != p.k + t {
                return Err(invalid(format!("|I| must be K + t = {}", p.k + t)));
            }
            if p.crc_set.as_slice() != &p.info[p.info.len() - t..] {
                return Err(invalid("CRC set must be the t largest information indices"));
            }
        } else {
            if p.info.len() != p.k {
                return Err(invalid(format!("|I| must be K = {}", p.k)));
            }
            if !p.crc_set.is_empty() {
                return Err(invalid(format!("{} has no CRC set", p.scheme)));
            }
        }
        if p.scheme.uses_conv() && p.conv.is_none() {
            return Err(invalid(format!(
                "{} requires a convolution polynomial",
                p.scheme
            )));
        }
        if p.scheme == Scheme::PsPac {
            if p.reserved.len() != p.alpha || p.reserved.iter().any(|&j| is_info[j]) {
                return Err(invalid("reserved set must be alpha frozen indices"));
            }
        } else if !p.reserved.is_empty() {
            return Err(invalid(format!("{} has no reserved set", p.scheme)));
        }
        if p.scheme == Scheme::CcrcPolar {
            let i0 = p.info.first().copied().unwrap_or(n);
            let expect: Vec<usize> = (i0 + 1..n).filter(|&j| !is_info[j]).collect();
            if p.masked != expect {
                return Err(invalid("masked set must be the frozen indices above min(I)"));
            }
        } else if !p.masked.is_empty() {
            return Err(invalid(format!("{} has no masked set", p.scheme)));
        }

        let mut roles = vec![Role::Frozen; n];
        for &i in &p.info {
            roles[i] = Role::Data;
        }
        for &i in &p.crc_set {
            roles[i] = Role::Crc;
        }
        for &i in &p.reserved {
            roles[i] = Role::Reserved;
        }
        for &i in &p.masked {
            roles[i] = Role::Masked;
        }
        let data_positions = p.info[..p.info.len() - p.crc_set.len()].to_vec();
        Ok(Self {
            n,
            k: p.k,
            scheme: p.scheme,
            info: p.info,
            frozen: p.frozen,
            crc_set: p.crc_set,
            reserved: p.reserved,
            masked: p.masked,
            conv: p.conv,
            crc: p.crc,
            alpha: p.alpha,
            remainder_rule: p.remainder_rule,
            roles,
            data_positions,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn info_set(&self) -> &[usize] {
        &self.info
    }

    pub fn frozen_set(&self) -> &[usize] {
        &self.frozen
    }

    pub fn crc_set(&self) -> &[usize] {
        &self.crc_set
    }

    pub fn reserved_set(&self) -> &[usize] {
        &self.reserved
    }

    pub fn masked_set(&self) -> &[usize] {
        &self.masked
    }

    pub fn conv(&self) -> Option<&ConvSpec> {
        self.conv.as_ref()
    }

    pub fn crc(&self) -> Option<&CrcSpec> {
        self.crc.as_ref()
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn remainder_rule(&self) -> RemainderRule {
        self.remainder_rule
    }

    pub fn with_remainder_rule(mut self, rule: RemainderRule) -> Self {
        self.remainder_rule = rule;
        self
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    /// Information positions that carry data bits (I minus R).
    pub fn data_positions(&self) -> &[usize] {
        &self.data_positions
    }

    /// `data_rank()[i] = Some(j)` when position `i` carries data bit `j`.
    pub fn data_rank(&self) -> Vec<Option<usize>> {
        let mut r = vec![None; self.n];
        for (j, &i) in self.data_positions.iter().enumerate() {
            r[i] = Some(j);
        }
        r
    }

    pub fn indicator(&self, set: &[usize]) -> Vec<bool> {
        let mut v = vec![false; self.n];
        for &i in set {
            v[i] = true;
        }
        v
    }

    /// Plain-text form, readable by [`RateProfile::from_text`].
    pub fn to_text(&self) -> String {
        let list = |v: &[usize]| {
            v.iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut s = String::new();
        s.push_str(&format!("scheme = {}\n", self.scheme));
        s.push_str(&format!("n = {}\n", self.n));
        s.push_str(&format!("k = {}\n", self.k));
        s.push_str(&format!("alpha = {}\n", self.alpha));
        if let Some(c) = &self.crc {
            s.push_str(&format!("crc_poly = {}\n", c.poly().to_msb_string()));
            s.push_str(&format!("crc_convention = {}\n", c.convention()));
        }
        if let Some(c) = &self.conv {
            s.push_str(&format!("conv_poly = {}\n", c.to_msb_string()));
        }
        if self.scheme == Scheme::CcrcPolar {
            s.push_str(&format!("remainder_rule = {}\n", self.remainder_rule));
        }
        s.push_str(&format!("info = {}\n", list(&self.info)));
        s.push_str(&format!("frozen = {}\n", list(&self.frozen)));
        s.push_str(&format!("crc = {}\n", list(&self.crc_set)));
        s.push_str(&format!("reserved = {}\n", list(&self.reserved)));
        s.push_str(&format!("masked = {}\n", list(&self.masked)));
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut scheme = None;
        let (mut n, mut k, mut alpha) = (None, None, 0usize);
        let mut crc_poly = None;
        let mut convention = CrcConvention::default();
        let mut conv = None;
        let mut rule = RemainderRule::default();
        let mut sets: [Vec<usize>; 5] = Default::default();
        let num = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| Error::Parse(format!("expected an integer, got {v:?}")))
        };
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, val) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key = value, got {line:?}")))?;
            let val = val.trim();
            match key.trim() {
                "scheme" => scheme = Some(val.parse::<Scheme>()?),
                "n" => n = Some(num(val)?),
                "k" => k = Some(num(val)?),
                "alpha" => alpha = num(val)?,
                "crc_poly" => crc_poly = Some(val.to_string()),
                "crc_convention" => convention = val.parse()?,
                "conv_poly" => conv = Some(ConvSpec::from_msb_str(val)?),
                "remainder_rule" => rule = val.parse()?,
                name @ ("info" | "frozen" | "crc" | "reserved" | "masked") => {
                    let idx = ["info", "frozen", "crc", "reserved", "masked"]
                        .iter()
                        .position(|x| *x == name)
                        .expect("listed above");
                    sets[idx] = val
                        .split_whitespace()
                        .map(num)
                        .collect::<Result<Vec<_>>>()?;
                }
                other => return Err(Error::Parse(format!("unknown profile key {other:?}"))),
            }
        }
        let crc = crc_poly
            .map(|s| {
                CrcSpec::with_convention(crate::gf2::Gf2Poly::parse(&s)?, convention)
            })
            .transpose()?;
        let [info, frozen, crc_set, reserved, masked] = sets;
        Self::from_parts(ProfileParts {
            scheme: scheme.ok_or_else(|| Error::Parse("profile lacks a scheme".into()))?,
            n: n.ok_or_else(|| Error::Parse("profile lacks n".into()))?,
            k: k.ok_or_else(|| Error::Parse("profile lacks k".into()))?,
            info,
            frozen,
            crc_set,
            reserved,
            masked,
            conv,
            crc,
            alpha,
            remainder_rule: rule,
        })
    }
}
