//! Monte-Carlo BLER/BER over the binary-input AWGN channel.
//!
//! Frame `f` at grid point `p` draws its message and noise from a ChaCha8
//! stream keyed by `(seed, p, f)`, so the tallies do not depend on how frames
//! are spread over workers.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::construction::RateProfile;
use crate::error::{Error, Result};
use crate::gf2::BitVec;
use crate::precoding::Encoder;
use crate::scl::{SclDecoder, SclOptions};

/// How `snr_db` is turned into a noise variance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SnrConvention {
    /// Eb/N0 with `R = K/N`.
    #[default]
    EbN0,
    EsN0,
}

impl FromStr for SnrConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ebn0" | "eb/n0" => Ok(Self::EbN0),
            "esn0" | "es/n0" => Ok(Self::EsN0),
            other => Err(Error::Parse(format!("unknown SNR convention {other:?}"))),
        }
    }
}

impl fmt::Display for SnrConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SnrConvention::EbN0 => "ebn0",
            SnrConvention::EsN0 => "esn0",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub profile: RateProfile,
    pub decoder: SclOptions,
    pub snr_grid: Vec<f64>,
    pub max_frames: u64,
    pub min_errors: u64,
    pub seed: u64,
    /// 0 means the global rayon pool.
    pub workers: usize,
    pub snr_convention: SnrConvention,
}

impl SimConfig {
    pub fn new(profile: RateProfile, list_size: usize, snr_grid: Vec<f64>) -> Self {
        Self {
            profile,
            decoder: SclOptions::new(list_size),
            snr_grid,
            max_frames: 1_000_000,
            min_errors: 100,
            seed: 0,
            workers: 0,
            snr_convention: SnrConvention::EbN0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_errors == 0 {
            return Err(Error::InvalidConfig("min_errors must be at least 1".into()));
        }
        if self.snr_grid.is_empty() {
            return Err(Error::InvalidConfig("SNR grid is empty".into()));
        }
        if let Some(s) = self.snr_grid.iter().find(|s| !s.is_finite()) {
            return Err(Error::InvalidConfig(format!("SNR value {s} is not finite")));
        }
        if self.max_frames < self.min_errors {
            return Err(Error::InvalidConfig(format!(
                "max_frames {} is below min_errors {}",
                self.max_frames, self.min_errors
            )));
        }
        if self.decoder.list_size == 0 {
            return Err(Error::InvalidConfig("list size must be at least 1".into()));
        }
        Ok(())
    }

    fn rate(&self) -> f64 {
        match self.snr_convention {
            SnrConvention::EbN0 => self.profile.k() as f64 / self.profile.n() as f64,
            SnrConvention::EsN0 => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimPoint {
    pub snr_db: f64,
    pub frames: u64,
    pub block_errors: u64,
    pub bler: f64,
    /// Half-width of the Wilson 95% interval on `bler`.
    pub ci95: f64,
    pub bit_errors: u64,
    pub ber: f64,
}

impl SimPoint {
    fn new(snr_db: f64, frames: u64, block_errors: u64, bit_errors: u64, k: usize) -> Self {
        let bler = if frames == 0 { 0.0 } else { block_errors as f64 / frames as f64 };
        let bits = frames * k as u64;
        Self {
            snr_db,
            frames,
            block_errors,
            bler,
            ci95: wilson(block_errors, frames).1,
            bit_errors,
            ber: if bits == 0 { 0.0 } else { bit_errors as f64 / bits as f64 },
        }
    }

    /// Wilson 95% interval `(low, high)` on the block error rate.
    pub fn interval(&self) -> (f64, f64) {
        let (centre, half) = wilson(self.block_errors, self.frames);
        ((centre - half).max(0.0), (centre + half).min(1.0))
    }
}

const Z95: f64 = 1.959_963_984_540_054;

// centre and half-width of the Wilson score interval
fn wilson(errors: u64, frames: u64) -> (f64, f64) {
    if frames == 0 {
        return (0.5, 0.5);
    }
    let n = frames as f64;
    let p = errors as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    (centre, half)
}

pub fn noise_sigma(snr_db: f64, rate: f64) -> f64 {
    (1.0 / (2.0 * rate * 10f64.powf(snr_db / 10.0))).sqrt()
}

/// BPSK over AWGN at Eb/N0 `snr_db` for code rate `rate`; returns channel LLRs.
pub fn awgn_llr<R: Rng + ?Sized>(x: &BitVec, snr_db: f64, rate: f64, rng: &mut R) -> Vec<f64> {
    let sigma = noise_sigma(snr_db, rate);
    let scale = 2.0 / (sigma * sigma);
    x.iter()
        .map(|b| {
            let s = if b { -1.0 } else { 1.0 };
            let n: f64 = rng.sample(StandardNormal);
            scale * (s + sigma * n)
        })
        .collect()
}

pub const CSV_HEADER: &str = "scheme,N,K,L,snr_db,frames,block_errors,bler,ci95,bit_errors,ber";

pub fn csv_row(profile: &RateProfile, list_size: usize, p: &SimPoint) -> String {
    format!(
        "{},{},{},{},{:.3},{},{},{:.6e},{:.6e},{},{:.6e}",
        profile.scheme(),
        profile.n(),
        profile.k(),
        list_size,
        p.snr_db,
        p.frames,
        p.block_errors,
        p.bler,
        p.ci95,
        p.bit_errors,
        p.ber
    )
}

pub fn to_csv(config: &SimConfig, points: &[SimPoint]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&csv_row(&config.profile, config.decoder.list_size, p));
        out.push('\n');
    }
    out
}

pub fn run_bler(config: &SimConfig) -> Result<Vec<SimPoint>> {
    run_bler_with(config, |_| {})
}

/// Like [`run_bler`], calling `progress` after each finished grid point.
pub fn run_bler_with<F: FnMut(&SimPoint)>(config: &SimConfig, mut progress: F) -> Result<Vec<SimPoint>> {
    config.validate()?;
    let pool = if config.workers > 0 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(config.workers)
                .build()
                .map_err(|e| Error::InvalidConfig(e.to_string()))?,
        )
    } else {
        None
    };
    let decoder = SclDecoder::with_options(&config.profile, config.decoder)?;
    let encoder = Encoder::new(&config.profile);
    let mut points = Vec::with_capacity(config.snr_grid.len());
    for (idx, &snr) in config.snr_grid.iter().enumerate() {
        let job = || run_point(config, &encoder, &decoder, idx as u64, snr);
        let point = match &pool {
            Some(p) => p.install(job)?,
            None => job()?,
        };
        progress(&point);
        points.push(point);
    }
    Ok(points)
}

#[derive(Debug, Clone, Copy, Default)]
struct Outcome {
    block_error: bool,
    bit_errors: u32,
}

fn frame_rng(seed: u64, point: u64, frame: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&point.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(frame);
    rng
}

fn simulate_frame(
    config: &SimConfig,
    encoder: &Encoder,
    decoder: &mut SclDecoder,
    point: u64,
    snr: f64,
    frame: u64,
) -> Result<Outcome> {
    let k = config.profile.k();
    let mut rng = frame_rng(config.seed, point, frame);
    let bits: Vec<bool> = (0..k).map(|_| rng.gen()).collect();
    let data = BitVec::from_bools(&bits);
    let x = encoder.codeword(&data)?;
    let llr = awgn_llr(&x, snr, config.rate(), &mut rng);
    let out = decoder.decode(&llr)?;
    let bit_errors = out.data.xor(&data).weight() as u32;
    Ok(Outcome {
        block_error: bit_errors > 0 || out.erased,
        bit_errors,
    })
}

fn run_point(
    config: &SimConfig,
    encoder: &Encoder,
    decoder: &SclDecoder,
    point: u64,
    snr: f64,
) -> Result<SimPoint> {
    let k = config.profile.k();
    let threads = rayon::current_num_threads() as u64;
    let mut frames = 0u64;
    let mut block_errors = 0u64;
    let mut bit_errors = 0u64;
    while frames < config.max_frames {
        let remaining = config.max_frames - frames;
        let need = config.min_errors - block_errors;
        // aim for roughly the frames still needed, assuming the current error rate
        let guess = (need * frames)
            .checked_div(block_errors)
            .map_or(1024, |f| f + 64);
        let batch = guess.clamp(64 * threads, 1 << 16).min(remaining);
        let outcomes: Vec<Outcome> = (frames..frames + batch)
            .into_par_iter()
            .map_init(
                || decoder.clone(),
                |dec, f| simulate_frame(config, encoder, dec, point, snr, f),
            )
            .collect::<Result<_>>()?;
        // scan in frame order so the stopping frame does not depend on scheduling
        for o in outcomes {
            frames += 1;
            if o.block_error {
                block_errors += 1;
            }
            bit_errors += o.bit_errors as u64;
            if block_errors >= config.min_errors {
                return Ok(SimPoint::new(snr, frames, block_errors, bit_errors, k));
            }
        }
    }
    Ok(SimPoint::new(snr, frames, block_errors, bit_errors, k))
}

/// SNR at which the BLER curve crosses `target`, by linear interpolation of
/// `log10(bler)` between the two grid points that bracket it.
pub fn snr_at_bler(points: &[SimPoint], target: f64) -> Option<f64> {
    for w in points.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.bler >= target && b.bler <= target && a.bler > 0.0 {
            if b.bler == 0.0 || a.bler == b.bler {
                return Some(b.snr_db);
            }
            let (la, lb, lt) = (a.bler.log10(), b.bler.log10(), target.log10());
            return Some(a.snr_db + (la - lt) / (la - lb) * (b.snr_db - a.snr_db));
        }
    }
    None
}

/// True when the 95% intervals of the two points overlap.
pub fn intervals_overlap(a: &SimPoint, b: &SimPoint) -> bool {
    let (al, ah) = a.interval();
    let (bl, bh) = b.interval();
    al <= bh && bl <= ah
}
