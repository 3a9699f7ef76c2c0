//! Minimum-weight codewords: closed-form counting for polar codes, the
//! incapable-coset test for convolutional precoding, per-codeword
//! cancellation checks, and an exhaustive search valid for every scheme.

mod combinations;
mod search;

use std::fmt;
use std::str::FromStr;

pub use combinations::{binomial, revolving_door, revolving_door_masks};
pub use search::{exhaustive_search, exhaustive_search_with, SearchOptions};

use crate::construction::{RateProfile, Scheme};
use crate::error::{Error, Result};
use crate::gf2::{polar_transform, row_weight, support_excess, BitVec};
use crate::precoding::{conv_deprecode, Encoder, MaskPlan};

/// Minimum-weight codewords whose transform input starts at `leader`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetReport {
    pub leader: usize,
    pub k_set: Vec<usize>,
    pub count: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ClosedForm,
    ExhaustiveSearch,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ClosedForm => "closed_form",
            Method::ExhaustiveSearch => "exhaustive_search",
        })
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "closed_form" | "closed" => Ok(Method::ClosedForm),
            "exhaustive_search" | "exhaustive" | "search" => Ok(Method::ExhaustiveSearch),
            other => Err(Error::Parse(format!("unknown wmin method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WminReport {
    pub scheme: Scheme,
    pub n: usize,
    pub k: usize,
    pub wmin: usize,
    pub a_wmin: u64,
    /// Sorted by leader; only nonzero counts.
    pub per_coset: Vec<CosetReport>,
    pub method: Method,
    /// Codewords found by the exhaustive search, sorted by their support mask.
    pub codewords: Vec<BitVec>,
}

impl WminReport {
    pub const CSV_HEADER: &'static str = "scheme,N,K,wmin,A_wmin,method,cosets";

    /// One CSV row; cosets are written as `leader:count` pairs separated by `;`.
    pub fn csv_row(&self) -> String {
        let cosets: Vec<String> = self
            .per_coset
            .iter()
            .map(|c| format!("{}:{}", c.leader, c.count))
            .collect();
        format!(
            "{},{},{},{},{},{},{}",
            self.scheme,
            self.n,
            self.k,
            self.wmin,
            self.a_wmin,
            self.method,
            cosets.join(";")
        )
    }

    pub fn to_table(&self) -> String {
        let mut s = format!(
            "scheme {}  N {}  K {}  wmin {}  A_wmin {}  ({})\n",
            self.scheme, self.n, self.k, self.wmin, self.a_wmin, self.method
        );
        s.push_str("  leader  |K_i|  count\n");
        for c in &self.per_coset {
            s.push_str(&format!(
                "  {:>6}  {:>5}  {:>5}\n",
                c.leader,
                c.k_set.len(),
                c.count
            ));
        }
        s
    }
}

/// `K_i`: information indices `j > i` whose binary expansion has exactly
/// one bit outside that of `i`.
pub fn k_set(i: usize, profile: &RateProfile) -> Result<Vec<usize>> {
    let info = profile.info_set();
    if info.binary_search(&i).is_err() {
        return Err(Error::InvalidProfile(format!(
            "{i} is not an information index"
        )));
    }
    Ok(info
        .iter()
        .copied()
        .filter(|&j| j > i && support_excess(j, i) == 1)
        .collect())
}

/// Smallest row weight over the information set.
pub fn min_row_weight(profile: &RateProfile) -> usize {
    profile
        .info_set()
        .iter()
        .map(|&i| row_weight(i))
        .min()
        .unwrap_or(0)
}

/// Information indices whose rows have the minimum weight.
pub fn min_weight_leaders(profile: &RateProfile) -> Vec<usize> {
    let w = min_row_weight(profile);
    profile
        .info_set()
        .iter()
        .copied()
        .filter(|&i| row_weight(i) == w)
        .collect()
}

pub fn polar_awmin_closed_form(profile: &RateProfile) -> Result<WminReport> {
    if profile.scheme() != Scheme::Polar {
        return Err(Error::SchemeMismatch {
            expected: Scheme::Polar.to_string(),
            actual: profile.scheme(),
        });
    }
    let mut per_coset = Vec::new();
    for i in min_weight_leaders(profile) {
        let ks = k_set(i, profile)?;
        if ks.len() >= 64 {
            return Err(Error::SearchInfeasible(format!(
                "|K_{i}| = {} overflows the counter",
                ks.len()
            )));
        }
        per_coset.push(CosetReport {
            leader: i,
            count: 1u64 << ks.len(),
            k_set: ks,
        });
    }
    Ok(WminReport {
        scheme: profile.scheme(),
        n: profile.n(),
        k: profile.k(),
        wmin: min_row_weight(profile),
        a_wmin: per_coset.iter().map(|c| c.count).sum(),
        per_coset,
        method: Method::ClosedForm,
        codewords: Vec::new(),
    })
}

/// Minimum-weight leaders for which no choice of convolution polynomial can
/// reduce the number of minimum-weight codewords in the coset: either no
/// frozen index lies above the leader, or every such index adds exactly one
/// bit to the leader's binary expansion.
pub fn incapable_cosets(profile: &RateProfile) -> Vec<usize> {
    let frozen = profile.frozen_set();
    min_weight_leaders(profile)
        .into_iter()
        .filter(|&i| {
            frozen
                .iter()
                .filter(|&&f| f > i)
                .all(|&f| support_excess(f, i) == 1)
        })
        .collect()
}

/// Linear map whose kernel is the code: `residual(u) = 0` exactly when `u`
/// is a valid transform input for the profile.
#[derive(Debug, Clone)]
pub struct Constraints {
    encoder: Encoder,
    plain_frozen: BitVec,
    plan: MaskPlan,
}

impl Constraints {
    pub fn new(profile: &RateProfile) -> Self {
        let n = profile.n();
        let mut plain_frozen = BitVec::zeros(n);
        for &j in profile.frozen_set() {
            plain_frozen.set(j, true);
        }
        for &j in profile.masked_set() {
            plain_frozen.set(j, false);
        }
        Self {
            encoder: Encoder::new(profile),
            plain_frozen,
            plan: MaskPlan::new(profile),
        }
    }

    pub fn profile(&self) -> &RateProfile {
        self.encoder.profile()
    }

    pub fn residual(&self, u: &BitVec) -> BitVec {
        let p = self.encoder.profile();
        match p.scheme() {
            Scheme::Polar => u.and(&self.plain_frozen),
            Scheme::Pac | Scheme::PsPac => {
                conv_deprecode(u, p.conv().expect("pac profile carries a polynomial"))
                    .and(&self.plain_frozen)
            }
            Scheme::CrcPolar | Scheme::CcrcPolar => {
                let crc = p.crc().expect("crc profile carries a polynomial");
                let mut r = u.and(&self.plain_frozen);
                let data = u.gather(p.data_positions());
                let parity = crc.parity(&data);
                for (k, &pos) in p.crc_set().iter().enumerate() {
                    r.set(pos, u.get(pos) ^ parity.get(k));
                }
                if !self.plan.is_empty() {
                    for (pos, bit) in self.plan.expected(&data, crc, p.remainder_rule()) {
                        r.set(pos, u.get(pos) ^ bit);
                    }
                }
                r
            }
        }
    }

    /// Data word carried by a transform input, ignoring constraint violations.
    pub fn extract_data(&self, u: &BitVec) -> BitVec {
        let p = self.encoder.profile();
        match p.scheme() {
            Scheme::Pac | Scheme::PsPac => {
                conv_deprecode(u, p.conv().expect("pac profile carries a polynomial"))
                    .gather(p.info_set())
            }
            _ => u.gather(p.data_positions()),
        }
    }

    pub fn is_member(&self, x: &BitVec) -> bool {
        if x.len() != self.profile().n() {
            return false;
        }
        match polar_transform(x) {
            Ok(u) => self.residual(&u).is_zero(),
            Err(_) => false,
        }
    }

    /// Membership re-checked by encoding the extracted data from scratch.
    pub fn verify_by_reencode(&self, x: &BitVec) -> bool {
        let Ok(u) = polar_transform(x) else {
            return false;
        };
        let d = self.extract_data(&u);
        matches!(self.encoder.codeword(&d), Ok(c) if &c == x)
    }
}

pub fn is_member(x: &BitVec, profile: &RateProfile) -> bool {
    Constraints::new(profile).is_member(x)
}

/// The polar minimum-weight codeword of coset `i` whose transform input meets
/// `K_i` exactly in `j_set`.
///
/// Built as the Boolean function `prod_{a not in i} (y_a + sum_j prod_{b in R_j} y_b)`
/// over the complemented coordinates `y = !z`, where each `j` in `j_set` adds
/// bit `a_j` to `i` and removes the bits `R_j`.
pub fn polar_mwc(i: usize, j_set: &[usize], n: usize) -> Result<BitVec> {
    let levels = crate::gf2::check_length(n)?;
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, len: n });
    }
    let full = n - 1;
    let mut subs: Vec<(usize, usize)> = Vec::with_capacity(j_set.len());
    for &j in j_set {
        if j >= n || j <= i || support_excess(j, i) != 1 {
            return Err(Error::InvalidProfile(format!("{j} is not in K_{i}")));
        }
        let a = (j & !i).trailing_zeros() as usize;
        subs.push((a, i & !j));
    }
    let outside: Vec<usize> = (0..levels as usize).filter(|a| i >> a & 1 == 0).collect();
    let mut x = BitVec::zeros(n);
    for z in 0..n {
        let y = !z & full;
        let one = outside.iter().all(|&a| {
            let mut v = (y >> a) & 1 == 1;
            for &(aj, r) in &subs {
                if aj == a && y & r == r {
                    v = !v;
                }
            }
            v
        });
        if one {
            x.set(z, true);
        }
    }
    Ok(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cancellation {
    Survives,
    Cancelled,
}

/// Whether the polar minimum-weight codeword generated by leader `i` and
/// `J ⊆ K_i` survives precoding.
///
/// The precoded codeword is the one whose free bits agree with the polar
/// codeword's transform input on the profile's free positions (data
/// positions, or the information set for convolutional schemes). It
/// survives when its weight is still the minimum row weight.
pub fn cancellation_check(i: usize, j_set: &[usize], profile: &RateProfile) -> Result<Cancellation> {
    Ok(precoded_image(i, j_set, profile)?.1)
}

/// Precoded codeword used by [`cancellation_check`], with its verdict.
pub fn precoded_image(
    i: usize,
    j_set: &[usize],
    profile: &RateProfile,
) -> Result<(BitVec, Cancellation)> {
    let leaders = min_weight_leaders(profile);
    if !leaders.contains(&i) {
        return Err(Error::NotMinimumWeightLeader(i));
    }
    let ks = k_set(i, profile)?;
    if let Some(j) = j_set.iter().find(|j| !ks.contains(j)) {
        return Err(Error::InvalidProfile(format!("{j} is not in K_{i}")));
    }
    let n = profile.n();
    let x_polar = polar_mwc(i, j_set, n)?;
    let u_polar = polar_transform(&x_polar)?;
    let free = match profile.scheme() {
        Scheme::Pac | Scheme::PsPac => profile.info_set(),
        _ => profile.data_positions(),
    };
    let d = u_polar.gather(free);
    let x = Encoder::new(profile).codeword(&d)?;
    let verdict = if x.weight() == min_row_weight(profile) {
        Cancellation::Survives
    } else {
        Cancellation::Cancelled
    };
    Ok((x, verdict))
}

/// Distinct surviving codewords over every minimum-weight leader and every
/// subset of its `K_i`. Errors when some `|K_i|` exceeds `max_k_bits`.
pub fn surviving_codewords(profile: &RateProfile, max_k_bits: usize) -> Result<Vec<BitVec>> {
    let mut out = Vec::new();
    for i in min_weight_leaders(profile) {
        let ks = k_set(i, profile)?;
        if ks.len() > max_k_bits {
            return Err(Error::SearchInfeasible(format!(
                "|K_{i}| = {} exceeds {max_k_bits}",
                ks.len()
            )));
        }
        for mask in 0u64..(1u64 << ks.len()) {
            let j: Vec<usize> = (0..ks.len())
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| ks[b])
                .collect();
            let (x, verdict) = precoded_image(i, &j, profile)?;
            if verdict == Cancellation::Survives {
                out.push(x);
            }
        }
    }
    out.sort_by_key(|x| x.support());
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{build_profile, ReliabilityOrder};
    use crate::precoding::{ConvSpec, CrcSpec};

    fn profile(scheme: Scheme, n: usize, k: usize) -> RateProfile {
        let o = ReliabilityOrder::reference(n).unwrap();
        let crc = scheme.uses_crc().then(|| CrcSpec::parse("101001").unwrap());
        let conv = scheme
            .uses_conv()
            .then(|| ConvSpec::from_msb_str("1011011011").unwrap());
        let alpha = if scheme == Scheme::PsPac { 2 } else { 0 };
        build_profile(scheme, n, k, &o, crc, conv, alpha).unwrap()
    }

    fn full_profile(n: usize) -> RateProfile {
        let o = ReliabilityOrder::reference(n).unwrap();
        build_profile(Scheme::Polar, n, n, &o, None, None, 0).unwrap()
    }

    #[test]
    fn k_set_of_last_index_is_empty() {
        let p = full_profile(16);
        assert!(k_set(15, &p).unwrap().is_empty());
    }

    #[test]
    fn k_set_by_direct_computation() {
        let p = full_profile(16);
        let brute: Vec<usize> = (4..16)
            .filter(|&j: &usize| (j & !3usize).count_ones() == 1)
            .collect();
        assert_eq!(k_set(3, &p).unwrap(), brute);
        assert_eq!(brute, vec![4, 5, 6, 7, 8, 9, 10, 11]);
    }

    #[test]
    fn k_set_example_leader() {
        let p = profile(Scheme::Polar, 32, 16);
        assert!(k_set(24, &p).unwrap().contains(&25));
        assert!(k_set(0, &p).is_err());
    }

    #[test]
    fn closed_form_example() {
        let r = polar_awmin_closed_form(&profile(Scheme::Polar, 32, 16)).unwrap();
        assert_eq!(r.wmin, 4);
        assert_eq!(r.a_wmin, r.per_coset.iter().map(|c| c.count).sum::<u64>());
        assert!(polar_awmin_closed_form(&profile(Scheme::Pac, 32, 16)).is_err());
    }

    #[test]
    fn last_leader_is_incapable() {
        let p = profile(Scheme::Pac, 32, 28);
        let leaders = min_weight_leaders(&p);
        let inc = incapable_cosets(&p);
        let top = *p.info_set().last().unwrap();
        if leaders.contains(&top) {
            assert!(inc.contains(&top));
        }
        for i in inc {
            assert!(leaders.contains(&i));
        }
    }

    #[test]
    fn membership_basics() {
        for scheme in Scheme::ALL {
            let p = profile(scheme, 32, 12);
            let c = Constraints::new(&p);
            assert!(c.is_member(&BitVec::zeros(32)));
            let enc = Encoder::new(&p);
            let mut s = 0x2545_F491_4F6C_DD1Du64;
            for _ in 0..50 {
                s ^= s << 13;
                s ^= s >> 7;
                s ^= s << 17;
                let d = BitVec::from_u64(s, 12);
                let x = enc.codeword(&d).unwrap();
                assert!(c.is_member(&x), "{scheme}");
                assert!(c.verify_by_reencode(&x), "{scheme}");
            }
        }
        let p = profile(Scheme::Polar, 32, 12);
        for &f in p.frozen_set() {
            let g = crate::gf2::row(f, 32).unwrap();
            assert!(!is_member(&g, &p));
        }
    }

    #[test]
    fn mwc_construction_matches_row_sums() {
        // single translation: g_24 + g_25
        let x = polar_mwc(24, &[25], 32).unwrap();
        assert_eq!(x, crate::gf2::combine_rows(&[24, 25], 32).unwrap());
        assert_eq!(polar_mwc(24, &[], 32).unwrap(), crate::gf2::row(24, 32).unwrap());
        assert!(polar_mwc(24, &[27], 32).is_err());
        assert!(polar_mwc(24, &[23], 32).is_err());
    }

    #[test]
    fn mwc_family_is_the_whole_coset() {
        let p = full_profile(16);
        for i in 0..16usize {
            let ks = k_set(i, &p).unwrap();
            let w = row_weight(i);
            let mut seen = std::collections::HashSet::new();
            for mask in 0u32..(1 << ks.len()) {
                let j: Vec<usize> = (0..ks.len()).filter(|b| mask >> b & 1 == 1).map(|b| ks[b]).collect();
                let x = polar_mwc(i, &j, 16).unwrap();
                assert_eq!(x.weight(), w);
                let u = polar_transform(&x).unwrap();
                assert_eq!(u.first_one(), Some(i));
                let meet: Vec<usize> = u.support().into_iter().filter(|v| ks.contains(v)).collect();
                assert_eq!(meet, j);
                seen.insert(x.support());
            }
            // brute force: all weight-w codewords of the coset
            let brute = (0u32..1 << 16)
                .filter(|m| m.count_ones() as usize == w)
                .filter(|&m| {
                    let u = polar_transform(&BitVec::from_u64(m as u64, 16)).unwrap();
                    u.first_one() == Some(i)
                })
                .count();
            assert_eq!(seen.len(), brute, "coset {i}");
        }
    }

    #[test]
    fn example_crc_cancellation() {
        let p = profile(Scheme::CrcPolar, 32, 16);
        let (x, v) = precoded_image(24, &[25], &p).unwrap();
        assert_eq!(v, Cancellation::Cancelled);
        assert_eq!(x.weight(), 20);
        assert_eq!(
            cancellation_check(24, &[], &p).unwrap(),
            Cancellation::Cancelled
        );
        assert!(matches!(
            cancellation_check(31, &[], &p),
            Err(Error::NotMinimumWeightLeader(31))
        ));
    }

    #[test]
    fn polar_mwcs_always_survive_in_polar() {
        let p = profile(Scheme::Polar, 32, 16);
        let all = surviving_codewords(&p, 20).unwrap();
        let r = polar_awmin_closed_form(&p).unwrap();
        assert_eq!(all.len() as u64, r.a_wmin);
    }

    #[test]
    fn report_formatting() {
        let r = polar_awmin_closed_form(&profile(Scheme::Polar, 32, 16)).unwrap();
        let row = r.csv_row();
        assert!(row.starts_with("polar,32,16,4,"));
        assert!(row.contains("closed_form"));
        assert!(r.to_table().contains("A_wmin"));
    }
}
