//! BI-AWGN Monte Carlo harness.
//!
//! Noise and messages come from ChaCha8 keyed by `(seed, domain)` with the
//! trial number as stream id, so a trial's outcome does not depend on how
//! trials are sharded across threads. Early stopping scans trial outcomes in
//! trial order, which makes the frame count exact as well.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitlinalg::BitBlock;
use crate::code::{Code, Scheme};
use crate::construction::{construct_profile, load_profile};
use crate::decode::{crc::CRC11, decode, CheckNode, DecoderConfig, LlrBlock, MetricMode};
use crate::error::{Error, Result};
use crate::precode::{Polynomial, POLY_10};
use crate::spectrum::SpectrumReport;
use crate::structure::union_bound;

const NOISE_DOMAIN: u8 = 1;
const MESSAGE_DOMAIN: u8 = 2;

/// Channel at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    pub ebn0_db: f64,
    pub rate: f64,
    /// `sqrt(1 / (2 R 10^(Eb/N0 / 10)))`
    pub sigma: f64,
    pub seed: u64,
}

impl ChannelConfig {
    pub fn new(ebn0_db: f64, rate: f64, seed: u64) -> Result<Self> {
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(Error::InvalidParameter(format!("rate {rate} outside (0, 1]")));
        }
        if !ebn0_db.is_finite() {
            return Err(Error::InvalidParameter(format!("Eb/N0 {ebn0_db} dB is not finite")));
        }
        let sigma = (1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0))).sqrt();
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("Eb/N0 {ebn0_db} dB gives sigma {sigma}")));
        }
        Ok(Self { ebn0_db, rate, sigma, seed })
    }
}

fn trial_rng(seed: u64, domain: u8, trial: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8] = domain;
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(trial);
    rng
}

/// BPSK over AWGN; returns channel LLRs `2y / sigma^2`.
pub fn transmit(x: &BitBlock, cfg: &ChannelConfig, trial: u64) -> LlrBlock {
    let mut rng = trial_rng(cfg.seed, NOISE_DOMAIN, trial);
    let scale = 2.0 / (cfg.sigma * cfg.sigma);
    let llr = (0..x.len())
        .map(|j| {
            let n: f64 = rng.sample(StandardNormal);
            let s = if x.get(j) { -1.0 } else { 1.0 };
            scale * (s + cfg.sigma * n)
        })
        .collect();
    LlrBlock::new(llr).expect("power-of-two length and finite values")
}

/// Uniform random message for `trial`.
pub fn random_message(len: usize, seed: u64, trial: u64) -> Vec<u8> {
    let mut rng = trial_rng(seed, MESSAGE_DOMAIN, trial);
    (0..len).map(|_| rng.gen_range(0..=1u8)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopRule {
    pub min_errors: u64,
    pub max_frames: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self { min_errors: 100, max_frames: 1_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlerPoint {
    pub ebn0_db: f64,
    pub frames: u64,
    pub block_errors: u64,
    pub bler: f64,
    /// Truncated union bound, when a spectrum was overlaid.
    pub union_bound: Option<f64>,
    pub elapsed_s: f64,
}

impl BlerPoint {
    /// Standard error of the BLER estimate.
    pub fn std_error(&self) -> f64 {
        if self.frames == 0 {
            return 0.0;
        }
        (self.bler * (1.0 - self.bler) / self.frames as f64).sqrt()
    }
}

fn frame_error(code: &Code, decoder: &DecoderConfig, ch: &ChannelConfig, trial: u64) -> Result<bool> {
    let message = random_message(code.message_len(), ch.seed, trial);
    let x = code.encode(&message)?;
    let llr = transmit(&x, ch, trial);
    let out = decode(&llr, code, decoder)?;
    Ok(out.best().message != message)
}

/// One SNR point.
pub fn run_point(code: &Code, decoder: &DecoderConfig, ebn0_db: f64, stop: StopRule, seed: u64) -> Result<BlerPoint> {
    if stop.min_errors == 0 {
        return Err(Error::InvalidParameter("min_errors must be at least 1".into()));
    }
    let ch = ChannelConfig::new(ebn0_db, code.rate(), seed)?;
    let start = Instant::now();
    let (mut frames, mut errors) = (0u64, 0u64);
    let mut batch = 64u64;
    'outer: while frames < stop.max_frames {
        let end = (frames + batch).min(stop.max_frames);
        let outcomes: Vec<bool> = (frames..end)
            .into_par_iter()
            .map(|t| frame_error(code, decoder, &ch, t))
            .collect::<Result<_>>()?;
        for e in outcomes {
            frames += 1;
            errors += e as u64;
            if errors >= stop.min_errors {
                break 'outer;
            }
        }
        batch = (batch * 2).min(8192);
    }
    let bler = if frames == 0 { 0.0 } else { errors as f64 / frames as f64 };
    Ok(BlerPoint {
        ebn0_db,
        frames,
        block_errors: errors,
        bler,
        union_bound: None,
        elapsed_s: start.elapsed().as_secs_f64(),
    })
}

pub fn run_bler(code: &Code, decoder: &DecoderConfig, snrs: &[f64], stop: StopRule, seed: u64) -> Result<Vec<BlerPoint>> {
    snrs.iter().map(|&s| run_point(code, decoder, s, stop, seed)).collect()
}

/// Fills the union-bound column from a minimum-weight spectrum of the same scheme.
pub fn overlay_union_bound(points: &[BlerPoint], spectrum: &SpectrumReport, code: &Code) -> Result<Vec<BlerPoint>> {
    if spectrum.scheme != code.scheme() {
        return Err(Error::Validation(format!(
            "spectrum is for {} but the simulated code is {}",
            spectrum.scheme,
            code.scheme()
        )));
    }
    Ok(points
        .iter()
        .map(|p| {
            let bound = match spectrum.wmin {
                Some(w) if spectrum.a_wmin > 0 => union_bound(spectrum.a_wmin as f64, w, code.rate(), p.ebn0_db),
                _ => 0.0,
            };
            BlerPoint { union_bound: Some(bound), ..p.clone() }
        })
        .collect())
}

pub const CSV_HEADER: [&str; 6] = ["ebn0_db", "frames", "block_errors", "bler", "union_bound", "elapsed_s"];

pub fn write_csv<W: Write>(points: &[BlerPoint], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    let err = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(err)?;
    for p in points {
        w.serialize(p).map_err(err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(text: &str) -> Result<Vec<BlerPoint>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Parse(e.to_string()))
}

/// Experiment description; every CLI flag has a field here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Recipe {
    pub seed: u64,
    pub code: CodeRecipe,
    pub decoder: DecoderRecipe,
    pub sweep: SweepRecipe,
    #[serde(default)]
    pub output: OutputRecipe,
}

/// Either `profile` or all of `n`, `k`, `design_snr_db`. `k` counts message
/// bits; a CRC-polar construction reserves 11 more indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeRecipe {
    pub scheme: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub design_snr_db: Option<f64>,
    /// Comma-separated taps, lowest degree first. Defaults to the degree-9
    /// polynomial `1,1,0,1,1,0,1,1,0,1` for pac and rpac.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecoderRecipe {
    pub list_size: usize,
    #[serde(default = "default_metric")]
    pub metric: String,
    #[serde(default = "default_check")]
    pub check_node: String,
}

fn default_metric() -> String {
    "exact".into()
}

fn default_check() -> String {
    "boxplus".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRecipe {
    pub ebn0_db: Vec<f64>,
    #[serde(default = "default_min_errors")]
    pub min_errors: u64,
    #[serde(default = "default_max_frames")]
    pub max_frames: u64,
}

fn default_min_errors() -> u64 {
    StopRule::default().min_errors
}

fn default_max_frames() -> u64 {
    StopRule::default().max_frames
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputRecipe {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    /// Weight cap for the support enumeration feeding the union-bound column.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound_wcap: Option<usize>,
}

impl Recipe {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn stop_rule(&self) -> Result<StopRule> {
        if self.sweep.min_errors == 0 {
            return Err(Error::Config("min_errors must be at least 1".into()));
        }
        Ok(StopRule { min_errors: self.sweep.min_errors, max_frames: self.sweep.max_frames })
    }

    pub fn decoder_config(&self) -> Result<DecoderConfig> {
        let metric: MetricMode = self.decoder.metric.parse()?;
        let check: CheckNode = self.decoder.check_node.parse()?;
        if self.decoder.list_size == 0 {
            return Err(Error::Config("list size must be at least 1".into()));
        }
        Ok(DecoderConfig::new(self.decoder.list_size).with_metric(metric).with_check_node(check))
    }

    pub fn build_code(&self) -> Result<Code> {
        self.code.build()
    }

    /// Resolves every field; nothing is run.
    pub fn validate(&self) -> Result<()> {
        let code = self.build_code()?;
        let cfg = self.decoder_config()?;
        self.stop_rule()?;
        for &s in &self.sweep.ebn0_db {
            ChannelConfig::new(s, code.rate(), self.seed)?;
        }
        let min = crate::decode::min_list_size(&code);
        if code.scheme() == Scheme::Rpac && cfg.list_size < min {
            return Err(Error::ListTooSmall { list_size: cfg.list_size, required: min });
        }
        Ok(())
    }
}

impl CodeRecipe {
    pub fn scheme(&self) -> Result<Scheme> {
        self.scheme.parse()
    }

    pub fn polynomial(&self) -> Result<Polynomial> {
        match &self.poly {
            Some(p) => p.parse(),
            None => Polynomial::new(&POLY_10),
        }
    }

    pub fn build(&self) -> Result<Code> {
        let scheme = self.scheme()?;
        let crc_bits = if scheme == Scheme::CrcPolar { CRC11.degree() } else { 0 };
        let profile = match (&self.profile, self.n, self.k, self.design_snr_db) {
            (Some(path), None, None, None) => load_profile(path)?,
            (None, Some(n), Some(k), Some(snr)) => construct_profile(n, k + crc_bits, snr)?,
            (Some(_), ..) => {
                return Err(Error::Config("give either a profile file or n/k/design_snr_db, not both".into()))
            }
            _ => return Err(Error::Config("code needs a profile file or all of n, k, design_snr_db".into())),
        };
        match scheme {
            Scheme::Polar => Ok(Code::polar(profile)),
            Scheme::Pac => Ok(Code::pac(profile, self.polynomial()?)),
            Scheme::Rpac => Code::rpac(profile, self.polynomial()?),
            Scheme::CrcPolar => Code::crc_polar(profile, CRC11),
        }
    }
}
