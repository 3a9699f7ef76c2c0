use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{k_set, min_row_weight, revolving_door, Constraints, CosetReport, Method, WminReport};
use crate::construction::RateProfile;
use crate::error::{Error, Result};
use crate::gf2::{polar_transform, row, BitVec};

#[derive(Debug, Clone, Default)]
pub struct SearchOptions {
    /// Largest weight to try; defaults to twice the minimum row weight.
    pub weight_cap: Option<usize>,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

/// Exhaustive minimum-weight search. Requires `N <= 64`.
pub fn exhaustive_search(profile: &RateProfile, weight_cap: Option<usize>) -> Result<WminReport> {
    exhaustive_search_with(
        profile,
        &SearchOptions {
            weight_cap,
            threads: None,
        },
    )
}

pub fn exhaustive_search_with(profile: &RateProfile, opts: &SearchOptions) -> Result<WminReport> {
    let n = profile.n();
    if n > 64 {
        return Err(Error::SearchInfeasible(format!(
            "exhaustive search supports N <= 64, got {n}"
        )));
    }
    match opts.threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| Error::InvalidConfig(e.to_string()))?;
            pool.install(|| run(profile, opts.weight_cap))
        }
        None => run(profile, opts.weight_cap),
    }
}

fn run(profile: &RateProfile, weight_cap: Option<usize>) -> Result<WminReport> {
    let n = profile.n();
    let start = min_row_weight(profile).max(1);
    let cap = weight_cap.unwrap_or(2 * start).min(n);
    if cap < start {
        return Err(Error::SearchInfeasible(format!(
            "weight cap {cap} is below the minimum row weight {start}"
        )));
    }
    let constraints = Constraints::new(profile);
    // residual of each single row; the residual of x is the XOR over supp(x)
    let sig: Vec<u64> = (0..n)
        .map(|j| {
            // x = e_j has transform input g_j
            let u = row(j, n).expect("valid length");
            constraints.residual(&u).as_u64()
        })
        .collect();
    // every row but g_0 has even weight, so without u_0 all weights are even
    let even_only = profile.info_set().first() != Some(&0);

    for w in start..=cap {
        if even_only && w % 2 == 1 {
            continue;
        }
        let mut hits: Vec<u64> = (0..n)
            .into_par_iter()
            .map(|a| scan_prefix(&sig, n, w, a))
            .flatten()
            .collect();
        if hits.is_empty() {
            continue;
        }
        hits.sort_unstable();
        return report(profile, &constraints, w, &hits);
    }
    Err(Error::SearchExhausted(cap))
}

/// Weight-`w` vectors with smallest support element `a` and zero residual.
fn scan_prefix(sig: &[u64], n: usize, w: usize, a: usize) -> Vec<u64> {
    let t = w - 1;
    let m = n - 1 - a;
    if t > m {
        return Vec::new();
    }
    let base = a + 1;
    let mut s = sig[a];
    let mut mask = 1u64 << a;
    for e in base..base + t {
        s ^= sig[e];
        mask |= 1u64 << e;
    }
    let mut hits = Vec::new();
    revolving_door(m, t, |step| {
        if let Some((o, i)) = step {
            let (o, i) = (base + o, base + i);
            s ^= sig[o] ^ sig[i];
            mask ^= (1u64 << o) | (1u64 << i);
        }
        if s == 0 {
            hits.push(mask);
        }
    });
    hits
}

fn report(
    profile: &RateProfile,
    constraints: &Constraints,
    w: usize,
    hits: &[u64],
) -> Result<WminReport> {
    let n = profile.n();
    let mut cosets: BTreeMap<usize, u64> = BTreeMap::new();
    let mut codewords = Vec::with_capacity(hits.len());
    for &h in hits {
        let x = BitVec::from_u64(h, n);
        if !constraints.verify_by_reencode(&x) {
            continue;
        }
        let u = polar_transform(&x)?;
        let leader = u.first_one().expect("nonzero codeword");
        *cosets.entry(leader).or_default() += 1;
        codewords.push(x);
    }
    let per_coset = cosets
        .into_iter()
        .map(|(leader, count)| CosetReport {
            leader,
            k_set: k_set(leader, profile).unwrap_or_default(),
            count,
        })
        .collect::<Vec<_>>();
    Ok(WminReport {
        scheme: profile.scheme(),
        n,
        k: profile.k(),
        wmin: w,
        a_wmin: per_coset.iter().map(|c| c.count).sum(),
        per_coset,
        method: Method::ExhaustiveSearch,
        codewords,
    })
}
