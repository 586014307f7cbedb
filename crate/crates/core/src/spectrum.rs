//! Minimum-weight codeword enumeration.
//!
//! Two independent oracles:
//!
//! * [`enumerate_by_support`] walks every error pattern of weight up to a cap
//!   and keeps those passing the membership test of [`Code::contains`].
//!   The test is linear in `x`, so it is evaluated through per-position
//!   syndrome columns: `x` is a codeword iff the XOR of the columns on its
//!   support vanishes.
//! * [`enumerate_by_message`] encodes every nonzero message in Gray-code
//!   order and tallies the full weight distribution.
//!
//! Codewords are attributed to cosets by their `u`-domain leader
//! `min supp(x G_N)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;

use crate::bitlinalg::{polar_transform, BitBlock};
use crate::code::{Code, Scheme};
use crate::construction::CodeProfile;
use crate::error::{Error, Result};
use crate::precode::{demap, precode};
use crate::structure::polar_awmin_formula;

/// Default ceiling on the number of support patterns visited.
pub const DEFAULT_SUPPORT_BUDGET: u128 = 100_000_000;
/// Largest message length accepted by [`enumerate_by_message`].
pub const MAX_MESSAGE_BITS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    SupportEnum,
    MessageEnum,
    Formula,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::SupportEnum => "support_enum",
            Method::MessageEnum => "message_enum",
            Method::Formula => "formula",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumReport {
    pub scheme: Scheme,
    pub label: String,
    /// Smallest nonzero weight found, `None` when nothing was found under the cap.
    pub wmin: Option<usize>,
    pub a_wmin: u128,
    /// Minimum-weight codewords per `u`-domain leader.
    pub per_coset: BTreeMap<usize, u128>,
    pub method: Method,
    /// Weight cap for support enumeration, message count for message enumeration.
    pub search_cap: u128,
    /// Full weight distribution (message enumeration only), indexed by weight.
    pub distribution: Option<Vec<u128>>,
}

impl SpectrumReport {
    pub fn csv_header() -> &'static str {
        "scheme,wmin,A_wmin,method"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{}",
            self.label,
            self.wmin.map_or_else(|| "none".into(), |w| w.to_string()),
            self.a_wmin,
            self.method
        )
    }

    /// Structured-text rendering including the per-coset breakdown.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("scheme = {}\n", self.label));
        out.push_str(&format!("method = {}\n", self.method));
        out.push_str(&format!("search_cap = {}\n", self.search_cap));
        match self.wmin {
            Some(w) => out.push_str(&format!("wmin = {w}\n")),
            None => out.push_str("wmin = none\n"),
        }
        out.push_str(&format!("A_wmin = {}\n", self.a_wmin));
        out.push_str("leader,count\n");
        for (leader, count) in &self.per_coset {
            out.push_str(&format!("{leader},{count}\n"));
        }
        out
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Number of support patterns of weight `1..=w_cap`.
pub fn support_pattern_count(block_len: usize, w_cap: usize) -> u128 {
    (1..=w_cap).map(|w| binomial(block_len, w)).sum()
}

struct Syndromes {
    cols: Vec<Box<[u64]>>,
    words: usize,
}

impl Syndromes {
    fn new(code: &Code) -> Result<Self> {
        let profile = code.profile();
        let len = profile.block_len();
        let frozen = profile.frozen_set();
        let crc_bits = code.crc().map_or(0, |c| c.degree());
        let bits = frozen.len() + crc_bits;
        let words = bits.div_ceil(64).max(1);
        let mut cols = Vec::with_capacity(len);
        for j in 0..len {
            let v = demap(
                &polar_transform(&BitBlock::unit(len, j)?),
                code.precoder(),
                profile,
            )?;
            let mut col = vec![0u64; words];
            for (k, &f) in frozen.iter().enumerate() {
                if v.get(f) {
                    col[k / 64] |= 1 << (k % 64);
                }
            }
            if let Some(crc) = code.crc() {
                let data: Vec<u8> = profile.info_set().iter().map(|&i| v.bit(i)).collect();
                let r = crc.remainder(&data);
                for b in 0..crc_bits {
                    if (r >> b) & 1 == 1 {
                        let k = frozen.len() + b;
                        col[k / 64] |= 1 << (k % 64);
                    }
                }
            }
            cols.push(col.into_boxed_slice());
        }
        Ok(Self { cols, words })
    }
}

#[derive(Default)]
struct Tally {
    count: u128,
    per_coset: BTreeMap<usize, u128>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.count += other.count;
        for (k, v) in other.per_coset {
            *self.per_coset.entry(k).or_insert(0) += v;
        }
        self
    }
}

struct WeightSearch<'a> {
    syn: &'a Syndromes,
    lookup: HashMap<&'a [u64], Vec<usize>>,
    len: usize,
}

impl<'a> WeightSearch<'a> {
    fn new(syn: &'a Syndromes) -> Self {
        let mut lookup: HashMap<&[u64], Vec<usize>> = HashMap::new();
        for (j, col) in syn.cols.iter().enumerate() {
            lookup.entry(&col[..]).or_default().push(j);
        }
        Self {
            syn,
            lookup,
            len: syn.cols.len(),
        }
    }

    fn record(&self, support: &[usize], tally: &mut Tally) {
        let x = BitBlock::from_support(self.len, support).expect("support in range");
        let leader = polar_transform(&x).min_support().expect("nonzero codeword");
        tally.count += 1;
        *tally.per_coset.entry(leader).or_insert(0) += 1;
    }

    /// Codewords of weight exactly `w`, visited in colexicographic order of
    /// their supports and split by largest position.
    fn count(&self, w: usize) -> Tally {
        if w == 0 || w > self.len {
            return Tally::default();
        }
        if w == 1 {
            let mut tally = Tally::default();
            for j in 0..self.len {
                if self.syn.cols[j].iter().all(|&s| s == 0) {
                    self.record(&[j], &mut tally);
                }
            }
            return tally;
        }
        (w - 1..self.len)
            .into_par_iter()
            .map(|top| {
                let mut tally = Tally::default();
                let mut acc = self.syn.cols[top].to_vec();
                let mut chosen = vec![top];
                self.descend(w - 2, top, &mut acc, &mut chosen, &mut tally);
                tally
            })
            .reduce(Tally::default, Tally::merge)
    }

    fn descend(&self, left: usize, upper: usize, acc: &mut [u64], chosen: &mut Vec<usize>, tally: &mut Tally) {
        if left == 0 {
            let smallest = *chosen.last().expect("nonempty");
            if let Some(hits) = self.lookup.get(&acc[..]) {
                let end = hits.partition_point(|&j| j < smallest);
                for &j in &hits[..end] {
                    let mut support = chosen.clone();
                    support.push(j);
                    support.reverse();
                    self.record(&support, tally);
                }
            }
            return;
        }
        for c in left..upper {
            for (a, s) in acc.iter_mut().zip(self.syn.cols[c].iter()) {
                *a ^= s;
            }
            chosen.push(c);
            self.descend(left - 1, c, acc, chosen, tally);
            chosen.pop();
            for (a, s) in acc.iter_mut().zip(self.syn.cols[c].iter()) {
                *a ^= s;
            }
        }
    }
}

/// Enumerates all patterns of weight `<= w_cap` and reports the lightest
/// nonzero codewords found.
pub fn enumerate_by_support(code: &Code, w_cap: usize, budget: u128) -> Result<SpectrumReport> {
    let len = code.block_len();
    let required = support_pattern_count(len, w_cap);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let syn = Syndromes::new(code)?;
    debug_assert!(syn.words >= 1);
    let search = WeightSearch::new(&syn);
    let mut report = SpectrumReport {
        scheme: code.scheme(),
        label: code.label(),
        wmin: None,
        a_wmin: 0,
        per_coset: BTreeMap::new(),
        method: Method::SupportEnum,
        search_cap: w_cap as u128,
        distribution: None,
    };
    for w in 1..=w_cap {
        let tally = search.count(w);
        if tally.count > 0 {
            report.wmin = Some(w);
            report.a_wmin = tally.count;
            report.per_coset = tally.per_coset;
            break;
        }
    }
    Ok(report)
}

/// Encodes all `2^k - 1` nonzero messages and tallies the weight distribution.
pub fn enumerate_by_message(code: &Code) -> Result<SpectrumReport> {
    let k = code.message_len();
    if k > MAX_MESSAGE_BITS {
        return Err(Error::BudgetExceeded {
            required: 1u128 << k,
            budget: 1u128 << MAX_MESSAGE_BITS,
        });
    }
    let len = code.block_len();
    let words = len.div_ceil(64);
    let mut x_rows = Vec::with_capacity(k);
    let mut u_rows = Vec::with_capacity(k);
    for b in 0..k {
        let mut m = vec![0u8; k];
        m[b] = 1;
        let v = code.v_from_message(&m)?;
        let u = precode(&v, code.precoder(), code.profile())?;
        x_rows.push(polar_transform(&u).words().to_vec());
        u_rows.push(u.words().to_vec());
    }
    let high = k.min(6);
    let low = k - high;
    let chunks: Vec<(Vec<u128>, Vec<Vec<u64>>)> = (0u64..(1 << high))
        .into_par_iter()
        .map(|chunk| {
            let mut hist = vec![0u128; len + 1];
            let mut by_leader = vec![vec![0u64; len]; len + 1];
            let mut x = vec![0u64; words];
            let mut u = vec![0u64; words];
            for b in 0..high {
                if (chunk >> b) & 1 == 1 {
                    xor_into(&mut x, &x_rows[low + b]);
                    xor_into(&mut u, &u_rows[low + b]);
                }
            }
            let mut tally = |x: &[u64], u: &[u64]| {
                let w: usize = x.iter().map(|w| w.count_ones() as usize).sum();
                hist[w] += 1;
                let leader = u
                    .iter()
                    .enumerate()
                    .find(|(_, &w)| w != 0)
                    .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
                    .expect("nonzero message has nonzero u");
                by_leader[w][leader] += 1;
            };
            if chunk != 0 {
                tally(&x, &u);
            }
            for g in 1u64..(1 << low) {
                let b = g.trailing_zeros() as usize;
                xor_into(&mut x, &x_rows[b]);
                xor_into(&mut u, &u_rows[b]);
                tally(&x, &u);
            }
            (hist, by_leader)
        })
        .collect();
    let mut hist = vec![0u128; len + 1];
    let mut by_leader = vec![vec![0u128; len]; len + 1];
    for (h, l) in chunks {
        for w in 0..=len {
            hist[w] += h[w];
            for i in 0..len {
                by_leader[w][i] += l[w][i] as u128;
            }
        }
    }
    let wmin = (1..=len).find(|&w| hist[w] > 0);
    let per_coset = wmin
        .map(|w| {
            by_leader[w]
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(i, &c)| (i, c))
                .collect()
        })
        .unwrap_or_default();
    Ok(SpectrumReport {
        scheme: code.scheme(),
        label: code.label(),
        wmin,
        a_wmin: wmin.map_or(0, |w| hist[w]),
        per_coset,
        method: Method::MessageEnum,
        search_cap: (1u128 << k) - 1,
        distribution: Some(hist),
    })
}

fn xor_into(acc: &mut [u64], row: &[u64]) {
    for (a, r) in acc.iter_mut().zip(row) {
        *a ^= r;
    }
}

/// Spectrum of the plain polar code from the closed-form coset count.
pub fn formula_report(profile: &CodeProfile) -> Result<SpectrumReport> {
    let summary = polar_awmin_formula(profile)?;
    let mut per_coset = BTreeMap::new();
    for &i in &summary.b_set {
        per_coset.insert(i, 1u128 << crate::structure::compute_ki(i, profile)?.len());
    }
    Ok(SpectrumReport {
        scheme: Scheme::Polar,
        label: Scheme::Polar.to_string(),
        wmin: Some(summary.wmin),
        a_wmin: summary.a_wmin,
        per_coset,
        method: Method::Formula,
        search_cap: 0,
        distribution: None,
    })
}

/// One line of a scheme comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub report: SpectrumReport,
    /// Percentage of the first scheme's minimum-weight codewords removed.
    pub reduction_pct: Option<f64>,
}

/// Side-by-side spectra with reductions relative to the first entry.
pub fn compare_schemes(reports: Vec<SpectrumReport>) -> Vec<ComparisonRow> {
    let base = reports.first().map(|r| r.a_wmin).unwrap_or(0);
    reports
        .into_iter()
        .map(|report| {
            let reduction_pct = (base > 0)
                .then(|| 100.0 * (base as f64 - report.a_wmin as f64) / base as f64);
            ComparisonRow { report, reduction_pct }
        })
        .collect()
}

/// Runs support enumeration on every code and compares.
pub fn compare_codes(codes: &[Code], w_cap: usize, budget: u128) -> Result<Vec<ComparisonRow>> {
    let reports = codes
        .iter()
        .map(|c| enumerate_by_support(c, w_cap, budget))
        .collect::<Result<Vec<_>>>()?;
    Ok(compare_schemes(reports))
}

pub fn format_comparison(rows: &[ComparisonRow]) -> String {
    let mut out = String::from("scheme,wmin,A_wmin,method,reduction_pct\n");
    for r in rows {
        out.push_str(&r.report.csv_row());
        match r.reduction_pct {
            Some(p) => out.push_str(&format!(",{p:.2}\n")),
            None => out.push_str(",\n"),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{construct_profile, example_64_14_profile, DesignSnr};
    use crate::precode::{Polynomial, POLY_10};

    fn rm14() -> CodeProfile {
        CodeProfile::from_info_set(16, &[7, 11, 13, 14, 15], DesignSnr::External).unwrap()
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(64, 4), 635_376);
        assert_eq!(binomial(128, 4), 10_668_000);
        assert_eq!(binomial(3, 5), 0);
    }

    #[test]
    fn rm14_by_both_oracles() {
        let code = Code::polar(rm14());
        let s = enumerate_by_support(&code, 8, DEFAULT_SUPPORT_BUDGET).unwrap();
        let m = enumerate_by_message(&code).unwrap();
        assert_eq!((s.wmin, s.a_wmin), (Some(8), 30));
        assert_eq!((m.wmin, m.a_wmin), (Some(8), 30));
        assert_eq!(s.per_coset, m.per_coset);
        let expected: BTreeMap<usize, u128> = [(7, 16), (11, 8), (13, 4), (14, 2)].into();
        assert_eq!(s.per_coset, expected);
        assert_eq!(formula_report(&rm14()).unwrap().per_coset, expected);
        assert_eq!(m.distribution.as_ref().unwrap().iter().sum::<u128>(), 31);
    }

    #[test]
    fn smallest_code() {
        let p = CodeProfile::from_info_set(2, &[1], DesignSnr::External).unwrap();
        let m = enumerate_by_message(&Code::polar(p)).unwrap();
        assert_eq!((m.wmin, m.a_wmin), (Some(2), 1));
    }

    #[test]
    fn zero_cap_finds_nothing() {
        let code = Code::polar(rm14());
        let s = enumerate_by_support(&code, 0, DEFAULT_SUPPORT_BUDGET).unwrap();
        assert_eq!((s.wmin, s.a_wmin), (None, 0));
    }

    #[test]
    fn budget_guard() {
        let code = Code::polar(construct_profile(128, 110, 4.0).unwrap());
        match enumerate_by_support(&code, 6, DEFAULT_SUPPORT_BUDGET) {
            Err(Error::BudgetExceeded { required, .. }) => assert!(required > DEFAULT_SUPPORT_BUDGET),
            other => panic!("expected refusal, got {other:?}"),
        }
        let big = Code::polar(construct_profile(64, 30, 4.0).unwrap());
        assert!(matches!(enumerate_by_message(&big), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn example_profile_rpac_message_enumeration() {
        let poly = Polynomial::new(&POLY_10).unwrap();
        let profile = example_64_14_profile();
        let rpac = enumerate_by_message(&Code::rpac(profile.clone(), poly.clone()).unwrap()).unwrap();
        let pac = enumerate_by_message(&Code::pac(profile.clone(), poly)).unwrap();
        let polar = enumerate_by_message(&Code::polar(profile)).unwrap();
        for r in [&rpac, &pac, &polar] {
            assert_eq!(r.search_cap, 16383);
            assert_eq!(r.per_coset.values().sum::<u128>(), r.a_wmin);
            assert_eq!(r.wmin, Some(16));
        }
        assert!(rpac.a_wmin <= pac.a_wmin && pac.a_wmin <= polar.a_wmin);
    }

    #[test]
    fn comparison_of_identical_codes() {
        let code = Code::polar(rm14());
        let r = enumerate_by_support(&code, 8, DEFAULT_SUPPORT_BUDGET).unwrap();
        let rows = compare_schemes(vec![r.clone(), r]);
        assert_eq!(rows[1].reduction_pct, Some(0.0));
        assert!(format_comparison(&rows).starts_with("scheme,wmin,A_wmin,method"));
    }
}
