//! Information-set construction and code profiles.
//!
//! Reliabilities come from density evolution under the Gaussian
//! approximation: every bit channel carries a mean LLR `m`, the variable-node
//! combination doubles it and the check-node combination maps it through
//! `phi^{-1}(1 - (1 - phi(m))^2)`.
//!
//! `phi` uses the usual two-piece fit
//!
//! ```text
//! phi(x) = exp(-0.4527 x^0.86 + 0.0218)                  0 < x < 10
//! phi(x) = sqrt(pi / x) exp(-x / 4) (1 - 10 / (7 x))      x >= 10
//! phi(0) = 1
//! ```
//!
//! The inverse is closed form on the first piece and bisection on the second.
//! Everything runs on `ln phi` so very reliable channels do not underflow.
//!
//! The design SNR is per coded symbol (Es/N0): `sigma^2 = 1 / (2 * 10^(snr/10))`
//! and the channel mean LLR is `2 / sigma^2`. Keeping the code rate out of the
//! design point makes the information sets nested in `K`.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const PHI_ALPHA: f64 = 0.4527;
const PHI_BETA: f64 = 0.86;
const PHI_GAMMA: f64 = 0.0218;
const PHI_SPLIT: f64 = 10.0;

/// `ln phi(x)` for the two-piece approximation.
pub fn ln_phi(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x < PHI_SPLIT {
        -PHI_ALPHA * x.powf(PHI_BETA) + PHI_GAMMA
    } else {
        0.5 * (std::f64::consts::PI / x).ln() - x / 4.0 + (1.0 - 10.0 / (7.0 * x)).ln()
    }
}

/// Inverse of [`ln_phi`]: the `x >= 0` with `ln phi(x) = target`.
pub fn ln_phi_inverse(target: f64) -> f64 {
    if target >= PHI_GAMMA {
        return 0.0;
    }
    let split = -PHI_ALPHA * PHI_SPLIT.powf(PHI_BETA) + PHI_GAMMA;
    if target >= split {
        return ((PHI_GAMMA - target) / PHI_ALPHA).powf(1.0 / PHI_BETA);
    }
    // Second piece is strictly decreasing on [10, inf).
    let mut lo = PHI_SPLIT;
    let mut hi = 2.0 * PHI_SPLIT;
    while ln_phi(hi) > target {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if ln_phi(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Mean LLR after a check-node combination of two channels with mean `m`.
pub fn check_node_mean(m: f64) -> f64 {
    let lp = ln_phi(m);
    let p = lp.exp();
    ln_phi_inverse(lp + (2.0 - p).ln())
}

/// Per-bit-channel mean LLRs for `G_N` in natural order.
///
/// The most significant index bit selects the first polarization step.
pub fn ga_mean_llrs(block_len: usize, design_snr_db: f64) -> Result<Vec<f64>> {
    if block_len < 2 || !block_len.is_power_of_two() {
        return Err(Error::InvalidLength(block_len));
    }
    let channel = 4.0 * 10f64.powf(design_snr_db / 10.0);
    let mut means = vec![channel];
    while means.len() < block_len {
        means = means
            .iter()
            .flat_map(|&m| [check_node_mean(m), 2.0 * m])
            .collect();
    }
    Ok(means)
}

/// Where a profile's information set came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DesignSnr {
    /// Constructed by density evolution at this design SNR (dB).
    Db(f64),
    /// Injected from outside; no reliability claim is made.
    External,
}

impl fmt::Display for DesignSnr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DesignSnr::Db(v) => write!(f, "{v} dB"),
            DesignSnr::External => write!(f, "external"),
        }
    }
}

/// Block length, information/frozen split and reliability ordering of a code.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeProfile {
    block_len: usize,
    info_set: Vec<usize>,
    frozen_set: Vec<usize>,
    info_mask: Vec<bool>,
    /// Least reliable first.
    reliability_order: Vec<usize>,
    design: DesignSnr,
}

impl CodeProfile {
    /// Builds a profile from an explicit information set.
    ///
    /// With [`DesignSnr::Db`] the reliability order is recomputed by density
    /// evolution; with [`DesignSnr::External`] it lists the frozen indices
    /// ascending followed by the information indices ascending.
    pub fn from_info_set(block_len: usize, info_set: &[usize], design: DesignSnr) -> Result<Self> {
        if block_len < 2 || !block_len.is_power_of_two() {
            return Err(Error::InvalidLength(block_len));
        }
        let mut info_mask = vec![false; block_len];
        for &i in info_set {
            if i >= block_len {
                return Err(Error::Validation(format!(
                    "information index {i} is out of range for N = {block_len}"
                )));
            }
            if info_mask[i] {
                return Err(Error::Validation(format!("duplicate information index {i}")));
            }
            info_mask[i] = true;
        }
        let info: Vec<usize> = (0..block_len).filter(|&i| info_mask[i]).collect();
        let frozen: Vec<usize> = (0..block_len).filter(|&i| !info_mask[i]).collect();
        let reliability_order = match design {
            DesignSnr::Db(snr) => reliability_order(&ga_mean_llrs(block_len, snr)?),
            DesignSnr::External => frozen.iter().chain(info.iter()).copied().collect(),
        };
        Ok(Self {
            block_len,
            info_set: info,
            frozen_set: frozen,
            info_mask,
            reliability_order,
            design,
        })
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn log_len(&self) -> u32 {
        self.block_len.trailing_zeros()
    }

    pub fn k(&self) -> usize {
        self.info_set.len()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.block_len as f64
    }

    pub fn info_set(&self) -> &[usize] {
        &self.info_set
    }

    pub fn frozen_set(&self) -> &[usize] {
        &self.frozen_set
    }

    #[inline]
    pub fn is_info(&self, i: usize) -> bool {
        self.info_mask[i]
    }

    pub fn info_mask(&self) -> &[bool] {
        &self.info_mask
    }

    pub fn reliability_order(&self) -> &[usize] {
        &self.reliability_order
    }

    pub fn design(&self) -> DesignSnr {
        self.design
    }

    /// Position of index `i` in the reliability order (0 = least reliable).
    pub fn reliability_rank(&self, i: usize) -> usize {
        self.reliability_order
            .iter()
            .position(|&j| j == i)
            .expect("reliability order is a permutation")
    }

    pub fn to_toml_string(&self) -> String {
        let file = ProfileFile {
            n: self.block_len,
            k: self.k(),
            design_snr_db: match self.design {
                DesignSnr::Db(v) => SnrField::Db(v),
                DesignSnr::External => SnrField::Marker("external".into()),
            },
            info_set: self.info_set.clone(),
        };
        toml::to_string(&file).expect("profile serializes")
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ProfileFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let design = match file.design_snr_db {
            SnrField::Db(v) => DesignSnr::Db(v),
            SnrField::Marker(m) if m == "external" => DesignSnr::External,
            SnrField::Marker(m) => {
                return Err(Error::Validation(format!(
                    "design_snr_db must be a number or \"external\", got {m:?}"
                )))
            }
        };
        if file.info_set.len() != file.k {
            return Err(Error::Validation(format!(
                "K = {} but info_set lists {} indices",
                file.k,
                file.info_set.len()
            )));
        }
        if file.info_set.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Validation("info_set must be strictly ascending".into()));
        }
        if file.k == 0 || file.k > file.n {
            return Err(Error::Validation(format!("K = {} out of range for N = {}", file.k, file.n)));
        }
        Self::from_info_set(file.n, &file.info_set, design)
    }
}

fn reliability_order(means: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..means.len()).collect();
    // Ascending reliability; on equal means the lower index ranks as more
    // reliable, so it sorts later.
    order.sort_by(|&a, &b| means[a].total_cmp(&means[b]).then(b.cmp(&a)));
    order
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileFile {
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "K")]
    k: usize,
    design_snr_db: SnrField,
    info_set: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SnrField {
    Db(f64),
    Marker(String),
}

/// Constructs an `(N, K)` profile by Gaussian-approximation density evolution.
pub fn construct_profile(block_len: usize, k: usize, design_snr_db: f64) -> Result<CodeProfile> {
    if block_len < 2 || !block_len.is_power_of_two() {
        return Err(Error::InvalidLength(block_len));
    }
    if k == 0 || k > block_len {
        return Err(Error::InvalidParameter(format!(
            "K = {k} must satisfy 1 <= K <= N = {block_len}"
        )));
    }
    if !design_snr_db.is_finite() {
        return Err(Error::InvalidParameter("design SNR must be finite".into()));
    }
    let means = ga_mean_llrs(block_len, design_snr_db)?;
    let order = reliability_order(&means);
    let mut info: Vec<usize> = order[block_len - k..].to_vec();
    info.sort_unstable();
    CodeProfile::from_info_set(block_len, &info, DesignSnr::Db(design_snr_db))
}

pub fn save_profile(profile: &CodeProfile, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, profile.to_toml_string())?;
    Ok(())
}

pub fn load_profile(path: impl AsRef<Path>) -> Result<CodeProfile> {
    let text = std::fs::read_to_string(path)?;
    CodeProfile::from_toml_str(&text)
}

/// The `(64, 14)` information set used to illustrate reverse precoding.
pub const EXAMPLE_64_14_INFO_SET: [usize; 14] =
    [31, 46, 47, 51, 53, 54, 55, 57, 58, 59, 60, 61, 62, 63];

pub fn example_64_14_profile() -> CodeProfile {
    CodeProfile::from_info_set(64, &EXAMPLE_64_14_INFO_SET, DesignSnr::External)
        .expect("static profile is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_codes() {
        for snr in [-3.0, 0.0, 5.0] {
            let p = construct_profile(2, 1, snr).unwrap();
            assert_eq!(p.info_set(), &[1]);
        }
        let p = construct_profile(4, 4, 1.0).unwrap();
        assert_eq!(p.info_set(), &[0, 1, 2, 3]);
        assert!(p.frozen_set().is_empty());
    }

    #[test]
    fn example_set_is_reproduced() {
        for snr in [0.0, 2.0, 4.0, 6.0] {
            let p = construct_profile(64, 14, snr).unwrap();
            assert_eq!(p.info_set(), &EXAMPLE_64_14_INFO_SET, "design SNR {snr}");
        }
    }

    #[test]
    fn k_out_of_range() {
        assert!(matches!(construct_profile(64, 0, 1.0), Err(Error::InvalidParameter(_))));
        assert!(matches!(construct_profile(64, 65, 1.0), Err(Error::InvalidParameter(_))));
        assert!(matches!(construct_profile(48, 4, 1.0), Err(Error::InvalidLength(48))));
    }

    #[test]
    fn phi_inverse_round_trip() {
        for &x in &[0.05, 0.5, 3.0, 9.5, 10.5, 25.0, 300.0, 3000.0] {
            let back = ln_phi_inverse(ln_phi(x));
            assert!((back - x).abs() <= 1e-9 * x.max(1.0), "{x} -> {back}");
        }
        // The two pieces do not meet at 10, so values near the seam resolve
        // to the lower piece.
        let back = ln_phi_inverse(ln_phi(10.0));
        assert!((9.8..=10.0).contains(&back), "{back}");
    }

    #[test]
    fn check_node_degrades() {
        for &m in &[0.1, 1.0, 8.0, 40.0, 800.0] {
            let c = check_node_mean(m);
            assert!(c > 0.0 && c < m, "m = {m}, check = {c}");
        }
    }

    #[test]
    fn information_sets_are_nested() {
        for &len in &[16usize, 64, 128] {
            for snr in [0.0, 3.0] {
                let mut prev: Vec<usize> = Vec::new();
                for k in 1..=len {
                    let p = construct_profile(len, k, snr).unwrap();
                    assert!(prev.iter().all(|i| p.is_info(*i)));
                    for &i in p.info_set() {
                        assert!(p.reliability_rank(i) >= len - k);
                    }
                    prev = p.info_set().to_vec();
                }
            }
        }
    }

    #[test]
    fn toml_round_trip_is_exact() {
        let p = construct_profile(64, 50, 3.7).unwrap();
        let text = p.to_toml_string();
        let q = CodeProfile::from_toml_str(&text).unwrap();
        assert_eq!(p, q);
        assert_eq!(text, q.to_toml_string());

        let e = example_64_14_profile();
        assert_eq!(CodeProfile::from_toml_str(&e.to_toml_string()).unwrap(), e);
    }

    #[test]
    fn malformed_files() {
        let bad_k = "N = 8\nK = 3\ndesign_snr_db = \"external\"\ninfo_set = [5, 6]\n";
        assert!(matches!(CodeProfile::from_toml_str(bad_k), Err(Error::Validation(_))));
        let bad_index = "N = 8\nK = 2\ndesign_snr_db = 1.0\ninfo_set = [5, 8]\n";
        assert!(matches!(CodeProfile::from_toml_str(bad_index), Err(Error::Validation(_))));
        let garbage = "N = 8\nK = \ninfo_set = [1]\n";
        match CodeProfile::from_toml_str(garbage) {
            Err(Error::Parse(msg)) => assert!(msg.contains("line 2"), "{msg}"),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
