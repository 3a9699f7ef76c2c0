use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use polarlab::construction::RateProfile;
use polarlab::gf2::BitVec;
use polarlab::precoding::Encoder;
use polarlab::scl::SclDecoder;
use polarlab::sim::{csv_row, run_bler_with, CSV_HEADER};
use polarlab::wmin::{exhaustive_search_with, polar_awmin_closed_form, SearchOptions, WminReport};

use crate::config::{RunConfig, WminMethod};

fn write_output(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn stem(p: &RateProfile) -> String {
    format!("{}_{}_{}", p.scheme(), p.n(), p.k())
}

/// Writes the resolved profile and returns its path.
pub fn cmd_construct(cfg: &RunConfig) -> Result<PathBuf> {
    let p = cfg.profile()?;
    write_output(&cfg.output_dir(), &format!("profile_{}.txt", stem(&p)), &p.to_text())
}

/// Runs the weight analysis for every configured scheme.
pub fn wmin_reports(cfg: &RunConfig) -> Result<Vec<WminReport>> {
    let method = cfg.wmin_method()?;
    let opts = SearchOptions {
        weight_cap: cfg.wmin.weight_cap,
        threads: cfg.wmin.threads,
    };
    let mut out = Vec::new();
    for scheme in cfg.wmin_schemes()? {
        let p = cfg.profile_for(scheme)?;
        let closed = matches!(method, WminMethod::ClosedForm | WminMethod::Both);
        if closed {
            if scheme.uses_crc() || scheme.uses_conv() {
                if method == WminMethod::ClosedForm {
                    bail!("the closed form applies to polar codes only, not {scheme}");
                }
            } else {
                out.push(polar_awmin_closed_form(&p)?);
            }
        }
        if method != WminMethod::ClosedForm {
            out.push(exhaustive_search_with(&p, &opts)?);
        }
    }
    Ok(out)
}

pub fn wmin_csv(reports: &[WminReport]) -> String {
    let mut s = String::from(WminReport::CSV_HEADER);
    s.push('\n');
    for r in reports {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

/// Writes the weight reports as CSV and returns the path with the reports.
pub fn cmd_wmin(cfg: &RunConfig) -> Result<(PathBuf, Vec<WminReport>)> {
    let reports = wmin_reports(cfg)?;
    let first = reports.first().context("no schemes to analyse")?;
    let path = write_output(
        &cfg.output_dir(),
        &format!("wmin_{}_{}.csv", first.n, first.k),
        &wmin_csv(&reports),
    )?;
    Ok((path, reports))
}

/// Runs the BLER sweep and writes it as CSV. `progress` sees each finished row.
pub fn cmd_simulate(cfg: &RunConfig, mut progress: impl FnMut(&str)) -> Result<PathBuf> {
    let sim = cfg.sim_config()?;
    let l = sim.decoder.list_size;
    let points = run_bler_with(&sim, |pt| progress(&csv_row(&sim.profile, l, pt)))?;
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for pt in &points {
        csv.push_str(&csv_row(&sim.profile, l, pt));
        csv.push('\n');
    }
    write_output(
        &cfg.output_dir(),
        &format!("bler_{}_L{l}.csv", stem(&sim.profile)),
        &csv,
    )
}

/// Reads a `K`-bit data word from hex, most significant bit first.
///
/// The word is the low `K` bits of the number, so `K = 16` takes four digits
/// and any bits above `K` must be zero. A `0b` prefix selects binary instead.
pub fn parse_data(s: &str, k: usize) -> Result<BitVec> {
    let s = s.trim();
    let bits: Vec<bool> = if let Some(b) = s.strip_prefix("0b") {
        b.chars()
            .filter(|c| *c != '_')
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => bail!("malformed binary data {s:?}"),
            })
            .collect::<Result<_>>()?
    } else {
        let h = s.strip_prefix("0x").unwrap_or(s);
        if h.is_empty() {
            bail!("empty data word");
        }
        let mut v = Vec::with_capacity(4 * h.len());
        for c in h.chars().filter(|c| *c != '_') {
            let d = c
                .to_digit(16)
                .with_context(|| format!("malformed hex data {s:?}"))?;
            v.extend((0..4).rev().map(|b| d >> b & 1 == 1));
        }
        v
    };
    if bits.len() < k {
        bail!("data word has {} bits, need {k}", bits.len());
    }
    let (high, low) = bits.split_at(bits.len() - k);
    if high.iter().any(|&b| b) {
        bail!("data word does not fit in {k} bits");
    }
    Ok(BitVec::from_bools(low))
}

/// LLRs from text: numbers separated by whitespace or commas.
pub fn parse_llrs(text: &str) -> Result<Vec<f64>> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().with_context(|| format!("bad LLR {t:?}")))
        .collect()
}

pub enum CodecInput {
    EncodeOnly,
    /// Noiseless BPSK LLRs of this magnitude.
    Noiseless(f64),
    Llrs(Vec<f64>),
}

fn bits(v: &BitVec) -> String {
    v.to_string()
}

/// Encodes `data`, optionally decodes, and returns the printed trace.
pub fn codec_trace(cfg: &RunConfig, data: &str, input: CodecInput) -> Result<String> {
    let p = cfg.profile()?;
    let d = parse_data(data, p.k())?;
    let t = Encoder::new(&p).encode(&d)?;
    let mut s = String::new();
    writeln!(s, "scheme {}  N {}  K {}", p.scheme(), p.n(), p.k())?;
    writeln!(s, "d  {}", bits(&t.d))?;
    writeln!(s, "c  {}", bits(&t.c))?;
    writeln!(s, "v  {}", bits(&t.v))?;
    writeln!(s, "u  {}", bits(&t.u))?;
    writeln!(s, "x  {}", bits(&t.x))?;
    if !p.crc_set().is_empty() {
        let r: Vec<String> = p
            .crc_set()
            .iter()
            .map(|&i| format!("u{i}={}", t.u.bit(i)))
            .collect();
        writeln!(s, "crc positions  {}", r.join(" "))?;
    }
    if !p.masked_set().is_empty() {
        let m: Vec<String> = p
            .masked_set()
            .iter()
            .map(|&i| format!("u{i}={}", t.u.bit(i)))
            .collect();
        writeln!(s, "masked positions  {}", m.join(" "))?;
    }
    writeln!(s, "weight(x) = {}", t.x.weight())?;
    let llr = match input {
        CodecInput::EncodeOnly => return Ok(s),
        CodecInput::Noiseless(a) => t.x.iter().map(|b| if b { -a } else { a }).collect(),
        CodecInput::Llrs(v) => v,
    };
    let mut dec = SclDecoder::with_options(&p, cfg.decoder_options()?)?;
    let out = dec.decode(&llr)?;
    writeln!(s, "decoded d  {}", bits(&out.data))?;
    writeln!(s, "decoded x  {}", bits(&out.codeword))?;
    writeln!(
        s,
        "metric {:.4}  list rank {}  crc {}  erased {}",
        out.selected_metric,
        out.list_rank,
        match out.crc_pass {
            Some(true) => "pass",
            Some(false) => "fail",
            None => "none",
        },
        out.erased
    )?;
    writeln!(s, "match {}", out.data == d)?;
    Ok(s)
}

/// Prints the codec trace and also stores it under the output directory.
pub fn cmd_codec(cfg: &RunConfig, data: &str, input: CodecInput) -> Result<(PathBuf, String)> {
    let trace = codec_trace(cfg, data, input)?;
    let p = cfg.profile()?;
    let path = write_output(&cfg.output_dir(), &format!("codec_{}.txt", stem(&p)), &trace)?;
    Ok((path, trace))
}
