//! TOML run configuration.
//!
//! ```toml
//! [code]
//! scheme = "pac"            # polar | crc_polar | pac | ps_pac | ccrc_polar
//! n = 64
//! k = 32
//! crc_poly = "111000100001" # MSB first, or 0x-prefixed hex
//! conv_poly = "1011011011"  # MSB first
//! alpha = 8
//!
//! [construction]
//! source = "reference"      # reference | ga | file | profile
//! design_snr_db = 2.0
//! path = "order.txt"
//!
//! [sim]
//! list_size = 32
//! snr_db = [1.0, 2.0, 3.0]
//!
//! [output]
//! directory = "out"
//! ```
//!
//! Relative paths are resolved against the directory holding the config file.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use polarlab::construction::{
    build_profile, gaussian_reliabilities, load_reliabilities, RateProfile, ReliabilityOrder,
    Scheme, DEFAULT_DESIGN_SNR_DB,
};
use polarlab::gf2::Gf2Poly;
use polarlab::precoding::{ConvSpec, CrcConvention, CrcSpec, RemainderRule};
use polarlab::scl::{CheckNode, CrcFallback, SclOptions};
use polarlab::sim::{SimConfig, SnrConvention};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub code: CodeSection,
    #[serde(default)]
    pub construction: ConstructionSection,
    #[serde(default)]
    pub sim: SimSection,
    #[serde(default)]
    pub wmin: WminSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeSection {
    pub scheme: Option<String>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub crc_poly: Option<String>,
    pub crc_convention: Option<String>,
    pub conv_poly: Option<String>,
    #[serde(default)]
    pub alpha: usize,
    pub remainder_rule: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructionSection {
    pub source: Option<String>,
    pub design_snr_db: Option<f64>,
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub list_size: Option<usize>,
    pub snr_db: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub min_errors: Option<u64>,
    pub max_frames: Option<u64>,
    pub workers: Option<usize>,
    pub check_node: Option<String>,
    pub crc_fallback: Option<String>,
    pub snr_convention: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WminSection {
    /// Schemes to analyse; defaults to `code.scheme`.
    pub schemes: Option<Vec<String>>,
    /// `exhaustive`, `closed_form` or `both`.
    pub method: Option<String>,
    pub weight_cap: Option<usize>,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub directory: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WminMethod {
    Exhaustive,
    ClosedForm,
    Both,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg = Self::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
        cfg.base_dir = path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_default();
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.resolve(
            self.output
                .directory
                .as_deref()
                .unwrap_or_else(|| Path::new("out")),
        )
    }

    pub fn scheme(&self) -> Result<Scheme> {
        match &self.code.scheme {
            Some(s) => Ok(s.parse()?),
            None => bail!("[code] scheme is missing"),
        }
    }

    fn source(&self) -> &str {
        self.construction.source.as_deref().unwrap_or("reference")
    }

    fn construction_path(&self) -> Result<PathBuf> {
        match &self.construction.path {
            Some(p) => {
                let p = self.resolve(p);
                if !p.exists() {
                    bail!("{} does not exist", p.display());
                }
                Ok(p)
            }
            None => bail!("[construction] source = {:?} needs a path", self.source()),
        }
    }

    pub fn crc(&self) -> Result<Option<CrcSpec>> {
        let Some(s) = &self.code.crc_poly else {
            return Ok(None);
        };
        let convention: CrcConvention = match &self.code.crc_convention {
            Some(c) => c.parse()?,
            None => CrcConvention::default(),
        };
        let poly = Gf2Poly::parse(s).with_context(|| format!("crc_poly {s:?}"))?;
        Ok(Some(CrcSpec::with_convention(poly, convention)?))
    }

    pub fn conv(&self) -> Result<Option<ConvSpec>> {
        self.code
            .conv_poly
            .as_deref()
            .map(|s| ConvSpec::from_msb_str(s).with_context(|| format!("conv_poly {s:?}")))
            .transpose()
    }

    pub fn ordering(&self) -> Result<ReliabilityOrder> {
        let n = self.code.n.context("[code] n is missing")?;
        Ok(match self.source() {
            "reference" => ReliabilityOrder::reference(n)?,
            "ga" => gaussian_reliabilities(
                n,
                self.construction.design_snr_db.unwrap_or(DEFAULT_DESIGN_SNR_DB),
            )?,
            "file" => {
                let o = load_reliabilities(&self.construction_path()?)?;
                if o.len() != n {
                    bail!("ordering file has {} entries, expected {n}", o.len());
                }
                o
            }
            other => bail!("construction source {other:?} does not give an ordering"),
        })
    }

    /// The profile for `code.scheme`.
    pub fn profile(&self) -> Result<RateProfile> {
        if self.source() == "profile" {
            let path = self.construction_path()?;
            let text = fs::read_to_string(&path)
                .with_context(|| format!("reading {}", path.display()))?;
            return Ok(RateProfile::from_text(&text)?);
        }
        self.profile_for(self.scheme()?)
    }

    /// The profile for another scheme with the same code parameters.
    pub fn profile_for(&self, scheme: Scheme) -> Result<RateProfile> {
        if self.source() == "profile" {
            let p = self.profile()?;
            if p.scheme() != scheme {
                bail!("profile file holds {}, not {scheme}", p.scheme());
            }
            return Ok(p);
        }
        let k = self.code.k.context("[code] k is missing")?;
        let order = self.ordering()?;
        let p = build_profile(
            scheme,
            order.len(),
            k,
            &order,
            self.crc()?,
            self.conv()?,
            self.code.alpha,
        )?;
        Ok(match &self.code.remainder_rule {
            Some(r) => p.with_remainder_rule(r.parse::<RemainderRule>()?),
            None => p,
        })
    }

    pub fn wmin_schemes(&self) -> Result<Vec<Scheme>> {
        match &self.wmin.schemes {
            Some(list) if !list.is_empty() => list
                .iter()
                .map(|s| s.parse::<Scheme>().map_err(Into::into))
                .collect(),
            _ => Ok(vec![self.profile()?.scheme()]),
        }
    }

    pub fn wmin_method(&self) -> Result<WminMethod> {
        Ok(match self.wmin.method.as_deref().unwrap_or("exhaustive") {
            "exhaustive" => WminMethod::Exhaustive,
            "closed_form" => WminMethod::ClosedForm,
            "both" => WminMethod::Both,
            other => bail!("unknown wmin method {other:?}"),
        })
    }

    pub fn decoder_options(&self) -> Result<SclOptions> {
        let s = &self.sim;
        let mut o = SclOptions::new(s.list_size.unwrap_or(32));
        if let Some(c) = &s.check_node {
            o.check_node = c.parse::<CheckNode>()?;
        }
        if let Some(f) = &s.crc_fallback {
            o.fallback = f.parse::<CrcFallback>()?;
        }
        Ok(o)
    }

    pub fn sim_config(&self) -> Result<SimConfig> {
        let s = &self.sim;
        let grid = s.snr_db.clone().context("[sim] snr_db is missing")?;
        let mut c = SimConfig::new(self.profile()?, 1, grid);
        c.decoder = self.decoder_options()?;
        if let Some(v) = s.seed {
            c.seed = v;
        }
        if let Some(v) = s.min_errors {
            c.min_errors = v;
        }
        if let Some(v) = s.max_frames {
            c.max_frames = v;
        }
        if let Some(v) = s.workers {
            c.workers = v;
        }
        if let Some(v) = &s.snr_convention {
            c.snr_convention = v.parse::<SnrConvention>()?;
        }
        c.validate()?;
        Ok(c)
    }
}

