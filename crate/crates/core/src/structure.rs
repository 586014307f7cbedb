//! Coset structure of polar codes and the minimum-weight formula.
//!
//! A nonzero codeword belongs to coset `C_i` when the first nonzero position
//! of its `u`-domain representation is `i`. Only cosets whose leader row has
//! the minimum weight contribute minimum-weight codewords, and for the plain
//! polar code coset `i` contributes exactly `2^{|K_i|}` of them.

use std::fmt;

use crate::bitlinalg::{new_support_bits, row_weight};
use crate::construction::CodeProfile;
use crate::error::{Error, Result};

/// Minimum row weight over the information set.
pub fn compute_wmin(profile: &CodeProfile) -> Result<usize> {
    let n = profile.log_len();
    profile
        .info_set()
        .iter()
        .map(|&i| row_weight(i, n))
        .min()
        .ok_or_else(|| Error::InvalidProfile("information set is empty".into()))
}

/// `K_i`: information indices `j > i` whose binary support adds exactly one
/// bit to that of `i`.
pub fn compute_ki(i: usize, profile: &CodeProfile) -> Result<Vec<usize>> {
    if i >= profile.block_len() || !profile.is_info(i) {
        return Err(Error::InvalidArgument(format!("{i} is not an information index")));
    }
    Ok(profile
        .info_set()
        .iter()
        .copied()
        .filter(|&j| j > i && new_support_bits(j, i) == 1)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinWeightSummary {
    pub wmin: usize,
    /// Information indices whose row weight equals `wmin`.
    pub b_set: Vec<usize>,
    /// `sum_{i in B} 2^{|K_i|}`.
    pub a_wmin: u128,
}

/// Closed-form minimum weight and error coefficient of the plain polar code.
pub fn polar_awmin_formula(profile: &CodeProfile) -> Result<MinWeightSummary> {
    let wmin = compute_wmin(profile)?;
    let n = profile.log_len();
    let b_set: Vec<usize> = profile
        .info_set()
        .iter()
        .copied()
        .filter(|&i| row_weight(i, n) == wmin)
        .collect();
    let mut a_wmin = 0u128;
    for &i in &b_set {
        a_wmin += 1u128 << compute_ki(i, profile)?.len();
    }
    Ok(MinWeightSummary { wmin, b_set, a_wmin })
}

/// Whether a forward precoder can change the minimum-weight count of a coset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CosetClass {
    /// No frozen index above the leader.
    IncapableNoFrozen,
    /// Every frozen index above the leader adds exactly one support bit.
    IncapableAllSingleton,
    Capable,
}

impl CosetClass {
    pub fn is_incapable(self) -> bool {
        self != CosetClass::Capable
    }
}

impl fmt::Display for CosetClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CosetClass::IncapableNoFrozen => "incapable_no_frozen",
            CosetClass::IncapableAllSingleton => "incapable_all_singleton",
            CosetClass::Capable => "capable",
        })
    }
}

pub fn classify_coset(i: usize, profile: &CodeProfile) -> Result<CosetClass> {
    if i >= profile.block_len() || !profile.is_info(i) {
        return Err(Error::InvalidArgument(format!("{i} is not an information index")));
    }
    let mut above = profile.frozen_set().iter().copied().filter(|&f| f > i).peekable();
    if above.peek().is_none() {
        return Ok(CosetClass::IncapableNoFrozen);
    }
    if above.all(|f| new_support_bits(f, i) == 1) {
        Ok(CosetClass::IncapableAllSingleton)
    } else {
        Ok(CosetClass::Capable)
    }
}

/// One row of the coset analysis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetReport {
    pub leader: usize,
    pub row_weight: usize,
    pub k_i: Vec<usize>,
    pub class: CosetClass,
    /// Minimum-weight codewords of the coset under forward precoding, when
    /// the classification alone determines it.
    pub a_i_wmin: Option<u128>,
}

impl CosetReport {
    pub fn k_i_size(&self) -> usize {
        self.k_i.len()
    }
}

/// Per-coset classification for every information index.
pub fn coset_reports(profile: &CodeProfile) -> Result<Vec<CosetReport>> {
    let wmin = compute_wmin(profile)?;
    let n = profile.log_len();
    profile
        .info_set()
        .iter()
        .map(|&i| {
            let k_i = compute_ki(i, profile)?;
            let class = classify_coset(i, profile)?;
            let rw = row_weight(i, n);
            let a_i_wmin = if rw > wmin {
                Some(0)
            } else if class.is_incapable() {
                Some(1u128 << k_i.len())
            } else {
                None
            };
            Ok(CosetReport {
                leader: i,
                row_weight: rw,
                k_i,
                class,
                a_i_wmin,
            })
        })
        .collect()
}

/// Structured-text rendering of [`coset_reports`].
pub fn format_coset_reports(reports: &[CosetReport], wmin: usize) -> String {
    let mut out = String::from("leader,row_weight,in_b,k_i_size,class,two_pow_k_i,a_i_wmin_pac\n");
    for r in reports {
        let a = r.a_i_wmin.map_or_else(|| "unknown".to_string(), |a| a.to_string());
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.leader,
            r.row_weight,
            r.row_weight == wmin,
            r.k_i_size(),
            r.class,
            1u128 << r.k_i_size(),
            a
        ));
    }
    out
}

/// Gaussian tail `Q(x) = erfc(x / sqrt 2) / 2`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Truncated union bound `A Q(sqrt(2 w R Eb/N0))`.
pub fn union_bound(a_wmin: f64, wmin: usize, rate: f64, ebn0_db: f64) -> f64 {
    if a_wmin == 0.0 {
        return 0.0;
    }
    let ebn0 = 10f64.powf(ebn0_db / 10.0);
    a_wmin * q_function((2.0 * wmin as f64 * rate * ebn0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{example_64_14_profile, DesignSnr};

    fn rm14() -> CodeProfile {
        CodeProfile::from_info_set(16, &[7, 11, 13, 14, 15], DesignSnr::External).unwrap()
    }

    /// Q by composite Simpson quadrature of the normal density.
    fn q_quadrature(x: f64) -> f64 {
        let upper = x + 40.0;
        let panels = 400_000;
        let h = (upper - x) / panels as f64;
        let pdf = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut acc = pdf(x) + pdf(upper);
        for k in 1..panels {
            let t = x + k as f64 * h;
            acc += if k % 2 == 1 { 4.0 } else { 2.0 } * pdf(t);
        }
        acc * h / 3.0
    }

    #[test]
    fn wmin_examples() {
        assert_eq!(compute_wmin(&example_64_14_profile()).unwrap(), 16);
        let tiny = CodeProfile::from_info_set(2, &[1], DesignSnr::External).unwrap();
        assert_eq!(compute_wmin(&tiny).unwrap(), 2);
        let empty = CodeProfile::from_info_set(4, &[], DesignSnr::External).unwrap();
        assert!(matches!(compute_wmin(&empty), Err(Error::InvalidProfile(_))));
    }

    #[test]
    fn ki_examples() {
        let p = rm14();
        assert_eq!(compute_ki(7, &p).unwrap(), vec![11, 13, 14, 15]);
        assert_eq!(compute_ki(14, &p).unwrap(), vec![15]);
        assert!(compute_ki(15, &p).unwrap().is_empty());
        assert!(compute_ki(3, &p).is_err());
    }

    #[test]
    fn formula_rm14() {
        let s = polar_awmin_formula(&rm14()).unwrap();
        assert_eq!(s.wmin, 8);
        assert_eq!(s.a_wmin, 30);
        assert_eq!(s.b_set, vec![7, 11, 13, 14]);
    }

    #[test]
    fn classification_examples() {
        let p = example_64_14_profile();
        assert_eq!(classify_coset(63, &p).unwrap(), CosetClass::IncapableNoFrozen);
        assert_eq!(classify_coset(57, &p).unwrap(), CosetClass::IncapableNoFrozen);
        // Every index above 31 only adds bit 5.
        assert_eq!(classify_coset(31, &p).unwrap(), CosetClass::IncapableAllSingleton);
        assert_eq!(classify_coset(46, &p).unwrap(), CosetClass::Capable);
        // 56 is the only frozen index above 54 and adds one bit.
        assert_eq!(classify_coset(54, &p).unwrap(), CosetClass::IncapableAllSingleton);
    }

    #[test]
    fn union_bound_examples() {
        assert_eq!(union_bound(0.0, 4, 0.5, 3.0), 0.0);
        assert!((union_bound(1.0, 4, 0.5, f64::NEG_INFINITY) - 0.5).abs() < 1e-15);
        let ub = union_bound(944.0, 4, 50.0 / 64.0, 5.0);
        let arg = (2.0 * 4.0 * 50.0 / 64.0 * 10f64.powf(0.5)).sqrt();
        let oracle = 944.0 * q_quadrature(arg);
        assert!(((ub - oracle) / oracle).abs() < 1e-12, "{ub} vs {oracle}");
    }

    #[test]
    fn q_matches_quadrature() {
        for &x in &[0.0, 0.3, 1.0, 2.5, 4.4, 6.0, 8.0] {
            let q = q_function(x);
            let o = q_quadrature(x);
            assert!(((q - o) / o).abs() < 1e-12, "x = {x}: {q} vs {o}");
        }
    }
}
