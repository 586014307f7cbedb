//! Successive-cancellation decoding: SC, SCL, CRC-aided SCL and look-ahead
//! SCL for reverse-precoded codes.
//!
//! All list decoders share one engine. A path carries its SC process (the
//! main tree) together with its estimate of `v`. At stage `i` the `v`
//! estimate is extended at index `i + a`, where the look-ahead `a` is `0` for
//! polar and PAC codes and the precoder degree `s` for reverse PAC codes;
//! `u_i` then follows from the precoder window, the branch metric is charged
//! against the path's decision soft value and the list is pruned to the `L`
//! smallest metrics.

pub mod crc;
mod list;
mod sc;

use std::fmt;
use std::str::FromStr;

use crate::code::{Code, Scheme};
use crate::error::{Error, Result};

pub use list::DecodeTrace;

/// Channel LLRs `ln P(y|0) / P(y|1)`, one per code bit.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrBlock(Vec<f64>);

impl LlrBlock {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 || !values.len().is_power_of_two() {
            return Err(Error::InvalidLength(values.len()));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("LLR {k} is not finite")));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MetricMode {
    /// `ln(1 + exp(-(1 - 2u) llr))`.
    #[default]
    Exact,
    /// Zero when `u` agrees with the hard decision, `|llr|` otherwise.
    Approximate,
}

impl FromStr for MetricMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(MetricMode::Exact),
            "approx" | "approximate" => Ok(MetricMode::Approximate),
            other => Err(Error::Parse(format!("unknown metric mode {other:?}"))),
        }
    }
}

impl fmt::Display for MetricMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricMode::Exact => "exact",
            MetricMode::Approximate => "approx",
        })
    }
}

/// Check-node update of the SC recursion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CheckNode {
    #[default]
    Boxplus,
    MinSum,
}

impl FromStr for CheckNode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "boxplus" | "exact" => Ok(CheckNode::Boxplus),
            "minsum" | "min-sum" => Ok(CheckNode::MinSum),
            other => Err(Error::Parse(format!("unknown check-node rule {other:?}"))),
        }
    }
}

impl fmt::Display for CheckNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckNode::Boxplus => "boxplus",
            CheckNode::MinSum => "minsum",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DecoderConfig {
    pub list_size: usize,
    pub metric: MetricMode,
    pub check_node: CheckNode,
}

impl DecoderConfig {
    pub fn new(list_size: usize) -> Self {
        Self {
            list_size,
            metric: MetricMode::default(),
            check_node: CheckNode::default(),
        }
    }

    pub fn with_metric(mut self, metric: MetricMode) -> Self {
        self.metric = metric;
        self
    }

    pub fn with_check_node(mut self, check_node: CheckNode) -> Self {
        self.check_node = check_node;
        self
    }
}

/// One decoded candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodedPath {
    pub message: Vec<u8>,
    /// Estimated `v`.
    pub v: Vec<u8>,
    /// Estimated `u`.
    pub u: Vec<u8>,
    pub metric: f64,
    /// CRC verdict for CRC-aided decoding.
    pub crc_ok: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ListOutput {
    /// Candidates, best first.
    pub paths: Vec<DecodedPath>,
    /// Soft values computed by all SC processes.
    pub node_visits: u64,
}

impl ListOutput {
    pub fn best(&self) -> &DecodedPath {
        &self.paths[0]
    }
}

/// Branch metric of deciding `u` against decision soft value `llr`.
#[inline]
pub fn branch_metric(u: u8, llr: f64, mode: MetricMode) -> f64 {
    match mode {
        MetricMode::Exact => {
            let x = if u == 0 { -llr } else { llr };
            x.max(0.0) + (-x.abs()).exp().ln_1p()
        }
        MetricMode::Approximate => {
            let hard = (llr < 0.0) as u8;
            if u == hard {
                0.0
            } else {
                llr.abs()
            }
        }
    }
}

/// Smallest list size accepted by [`lascl_decode`] for `code`.
///
/// When the first information index lies below the precoder degree `s`, the
/// look-ahead window `[0, s]` must be fully enumerated before any metric is
/// available, which needs `2^nu` paths for `nu` information indices in it.
pub fn min_list_size(code: &Code) -> usize {
    let s = code.precoder().degree();
    let profile = code.profile();
    match profile.info_set().first() {
        Some(&first) if first < s => {
            let nu = profile.info_set().iter().take_while(|&&i| i <= s).count();
            1usize << nu
        }
        _ => 1,
    }
}

fn check_llr(llr: &LlrBlock, code: &Code) -> Result<()> {
    if llr.len() != code.block_len() {
        return Err(Error::LengthMismatch {
            expected: code.block_len(),
            actual: llr.len(),
        });
    }
    Ok(())
}

/// Hard-decision successive cancellation.
pub fn sc_decode(llr: &LlrBlock, code: &Code, config: &DecoderConfig) -> Result<DecodedPath> {
    check_llr(llr, code)?;
    if code.scheme() == Scheme::Rpac {
        return Err(Error::Config(
            "reverse precoding cannot be decoded by plain SC; use look-ahead list decoding".into(),
        ));
    }
    Ok(list::sc(llr, code, config))
}

/// List decoding for polar, PAC and CRC-polar codes.
pub fn scl_decode(llr: &LlrBlock, code: &Code, config: &DecoderConfig) -> Result<ListOutput> {
    check_llr(llr, code)?;
    if config.list_size == 0 {
        return Err(Error::Config("list size must be at least 1".into()));
    }
    if code.scheme() == Scheme::Rpac {
        return Err(Error::Config(
            "reverse precoding needs look-ahead list decoding".into(),
        ));
    }
    Ok(list::run(llr, code, config, 0, None))
}

/// Look-ahead list decoding for reverse PAC codes.
pub fn lascl_decode(llr: &LlrBlock, code: &Code, config: &DecoderConfig) -> Result<ListOutput> {
    lascl_decode_traced(llr, code, config, None)
}

/// [`lascl_decode`] recording per-stage path bookkeeping into `trace`.
pub fn lascl_decode_traced(
    llr: &LlrBlock,
    code: &Code,
    config: &DecoderConfig,
    trace: Option<&mut DecodeTrace>,
) -> Result<ListOutput> {
    check_llr(llr, code)?;
    if code.scheme() != Scheme::Rpac {
        return Err(Error::Config(format!(
            "look-ahead list decoding expects an rpac code, got {}",
            code.scheme()
        )));
    }
    let required = min_list_size(code);
    if config.list_size < required.max(1) {
        return Err(Error::ListTooSmall {
            list_size: config.list_size,
            required: required.max(1),
        });
    }
    Ok(list::run(llr, code, config, code.precoder().degree(), trace))
}

/// Picks the decoder matching the code's scheme.
pub fn decode(llr: &LlrBlock, code: &Code, config: &DecoderConfig) -> Result<ListOutput> {
    match code.scheme() {
        Scheme::Rpac => lascl_decode(llr, code, config),
        _ => scl_decode(llr, code, config),
    }
}
