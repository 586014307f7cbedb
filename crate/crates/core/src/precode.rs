//! Convolutional pre-transforms applied before the polar transform.
//!
//! * forward (PAC): `u_i = sum_l p_l v_{i-l}`, taps below `0` read as zero.
//! * reverse (RPAC): `u_i = sum_l p_l v_{i+l}` when `w(g_i) >= w_min`,
//!   otherwise `u_i = v_i`; taps at or beyond `N` read as zero.
//!
//! Both maps are unit-triangular, so [`demap`] inverts them exactly by
//! substitution (ascending for forward, descending for reverse).

use std::fmt;
use std::str::FromStr;

use crate::bitlinalg::{polar_transform, row_weight, BitBlock};
use crate::construction::CodeProfile;
use crate::error::{Error, Result};
use crate::structure::compute_wmin;

/// Taps of the constraint-length-10 polynomial shared by PAC(10) and RPAC(10).
pub const POLY_10: [u8; 10] = [1, 1, 0, 1, 1, 0, 1, 1, 0, 1];
/// Taps of the constraint-length-7 polynomial used by RPAC(7).
pub const POLY_7: [u8; 7] = [1, 1, 0, 1, 1, 0, 1];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrecoderKind {
    Identity,
    Forward,
    Reverse,
}

impl fmt::Display for PrecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PrecoderKind::Identity => "identity",
            PrecoderKind::Forward => "forward",
            PrecoderKind::Reverse => "reverse",
        })
    }
}

/// Binary polynomial `p = [p_0, ..., p_s]` with `p_0 = p_s = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial(Vec<u8>);

impl Polynomial {
    pub fn new(taps: &[u8]) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::InvalidArgument("polynomial needs at least one tap".into()));
        }
        if let Some(bad) = taps.iter().find(|&&t| t > 1) {
            return Err(Error::InvalidArgument(format!("polynomial tap {bad} is not binary")));
        }
        if taps[0] != 1 || taps[taps.len() - 1] != 1 {
            return Err(Error::InvalidArgument(
                "polynomial must have p_0 = p_s = 1".into(),
            ));
        }
        Ok(Self(taps.to_vec()))
    }

    pub fn one() -> Self {
        Self(vec![1])
    }

    pub fn taps(&self) -> &[u8] {
        &self.0
    }

    /// Degree `s`.
    pub fn degree(&self) -> usize {
        self.0.len() - 1
    }
}

impl FromStr for Polynomial {
    type Err = Error;

    /// Comma-separated coefficients, `p_0` first: `1,1,0,1`.
    fn from_str(s: &str) -> Result<Self> {
        let taps = s
            .split(',')
            .map(|t| match t.trim() {
                "0" => Ok(0),
                "1" => Ok(1),
                other => Err(Error::Parse(format!("bad polynomial coefficient {other:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Polynomial::new(&taps)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|t| t.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Precoder kind, polynomial and, for reverse precoding, the row-weight
/// threshold of the conditional rule.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrecoderSpec {
    kind: PrecoderKind,
    poly: Polynomial,
    wmin_threshold: Option<usize>,
}

impl PrecoderSpec {
    pub fn identity() -> Self {
        Self {
            kind: PrecoderKind::Identity,
            poly: Polynomial::one(),
            wmin_threshold: None,
        }
    }

    pub fn forward(poly: Polynomial) -> Self {
        Self {
            kind: PrecoderKind::Forward,
            poly,
            wmin_threshold: None,
        }
    }

    pub fn reverse(poly: Polynomial, wmin_threshold: usize) -> Self {
        Self {
            kind: PrecoderKind::Reverse,
            poly,
            wmin_threshold: Some(wmin_threshold),
        }
    }

    /// Reverse precoder whose threshold is the minimum row weight of `profile`.
    pub fn reverse_for(poly: Polynomial, profile: &CodeProfile) -> Result<Self> {
        Ok(Self::reverse(poly, compute_wmin(profile)?))
    }

    pub fn kind(&self) -> PrecoderKind {
        self.kind
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    pub fn wmin_threshold(&self) -> Option<usize> {
        self.wmin_threshold
    }

    /// Whether reverse index `i` uses the convolution (rather than `u_i = v_i`).
    #[inline]
    pub fn reverse_active(&self, i: usize, n: u32) -> bool {
        row_weight(i, n) >= self.wmin_threshold.unwrap_or(0)
    }

    /// `u_i` computed from the `v` values this index depends on.
    ///
    /// Forward reads `v[i-s..=i]`, reverse reads `v[i..=i+s]`; positions
    /// outside `0..v.len()` count as zero.
    #[inline]
    pub fn output_bit(&self, v: &[u8], i: usize, n: u32) -> u8 {
        let taps = self.poly.taps();
        match self.kind {
            PrecoderKind::Identity => v[i],
            PrecoderKind::Forward => {
                let mut acc = 0;
                for (l, &p) in taps.iter().enumerate().take(i + 1) {
                    acc ^= p & v[i - l];
                }
                acc
            }
            PrecoderKind::Reverse => {
                if !self.reverse_active(i, n) {
                    return v[i];
                }
                let mut acc = 0;
                for (l, &p) in taps.iter().enumerate() {
                    match v.get(i + l) {
                        Some(&b) => acc ^= p & b,
                        None => break,
                    }
                }
                acc
            }
        }
    }

    /// Checks that a reverse threshold equals the profile's minimum row weight.
    pub fn validate_for(&self, profile: &CodeProfile) -> Result<()> {
        if self.kind == PrecoderKind::Reverse {
            let wmin = compute_wmin(profile)?;
            if self.wmin_threshold != Some(wmin) {
                return Err(Error::Validation(format!(
                    "reverse precoder threshold {:?} does not match the profile minimum weight {wmin}",
                    self.wmin_threshold
                )));
            }
        }
        Ok(())
    }
}

/// `u = v P` for a forward (or identity) precoder.
pub fn forward_map(v: &BitBlock, spec: &PrecoderSpec) -> Result<BitBlock> {
    if spec.kind == PrecoderKind::Reverse {
        return Err(Error::InvalidArgument("forward_map needs a forward precoder".into()));
    }
    let bits = v.to_bits();
    let n = v.log_len();
    let mut u = BitBlock::zeros(v.len())?;
    for i in 0..v.len() {
        u.set(i, spec.output_bit(&bits, i, n) == 1);
    }
    Ok(u)
}

/// `u = v P'` for a reverse precoder under the conditional row-weight rule.
pub fn reverse_map(v: &BitBlock, spec: &PrecoderSpec, profile: &CodeProfile) -> Result<BitBlock> {
    if spec.kind != PrecoderKind::Reverse {
        return Err(Error::InvalidArgument("reverse_map needs a reverse precoder".into()));
    }
    check_profile_len(v, profile)?;
    spec.validate_for(profile)?;
    let bits = v.to_bits();
    let n = v.log_len();
    let mut u = BitBlock::zeros(v.len())?;
    for i in 0..v.len() {
        u.set(i, spec.output_bit(&bits, i, n) == 1);
    }
    Ok(u)
}

/// Applies whichever map `spec` describes.
pub fn precode(v: &BitBlock, spec: &PrecoderSpec, profile: &CodeProfile) -> Result<BitBlock> {
    match spec.kind {
        PrecoderKind::Reverse => reverse_map(v, spec, profile),
        _ => forward_map(v, spec),
    }
}

/// Exact inverse of the pre-transform: returns `v` with `u = v M`.
pub fn demap(u: &BitBlock, spec: &PrecoderSpec, profile: &CodeProfile) -> Result<BitBlock> {
    check_profile_len(u, profile)?;
    let len = u.len();
    let n = u.log_len();
    let taps = spec.poly.taps();
    let mut v = vec![0u8; len];
    match spec.kind {
        PrecoderKind::Identity => return Ok(u.clone()),
        PrecoderKind::Forward => {
            for i in 0..len {
                let mut acc = u.bit(i);
                for (l, &p) in taps.iter().enumerate().skip(1).take(i) {
                    acc ^= p & v[i - l];
                }
                v[i] = acc;
            }
        }
        PrecoderKind::Reverse => {
            for i in (0..len).rev() {
                let mut acc = u.bit(i);
                if spec.reverse_active(i, n) {
                    for (l, &p) in taps.iter().enumerate().skip(1) {
                        if i + l >= len {
                            break;
                        }
                        acc ^= p & v[i + l];
                    }
                }
                v[i] = acc;
            }
        }
    }
    BitBlock::from_bits(&v)
}

/// Full encoding chain `x = v M G_N`.
pub fn encode_v(v: &BitBlock, spec: &PrecoderSpec, profile: &CodeProfile) -> Result<BitBlock> {
    Ok(polar_transform(&precode(v, spec, profile)?))
}

fn check_profile_len(v: &BitBlock, profile: &CodeProfile) -> Result<()> {
    if v.len() != profile.block_len() {
        return Err(Error::LengthMismatch {
            expected: profile.block_len(),
            actual: v.len(),
        });
    }
    Ok(())
}

/// Dense square binary matrix acting on row vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: Vec<Vec<u8>>,
}

impl BitMatrix {
    pub fn from_rows(rows: Vec<Vec<u8>>) -> Self {
        Self { rows }
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.rows[r][c]
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    /// `v M`.
    pub fn left_mul(&self, v: &[u8]) -> Vec<u8> {
        let cols = self.rows.first().map_or(0, |r| r.len());
        let mut out = vec![0u8; cols];
        for (r, &vr) in v.iter().enumerate() {
            if vr == 1 {
                for (o, &m) in out.iter_mut().zip(&self.rows[r]) {
                    *o ^= m;
                }
            }
        }
        out
    }

    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        BitMatrix::from_rows(self.rows.iter().map(|r| other.left_mul(r)).collect())
    }

    pub fn transpose(&self) -> BitMatrix {
        let n = self.rows.len();
        let m = self.rows.first().map_or(0, |r| r.len());
        BitMatrix::from_rows((0..m).map(|c| (0..n).map(|r| self.rows[r][c]).collect()).collect())
    }

    pub fn is_lower_triangular(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(r, row)| row.iter().skip(r + 1).all(|&b| b == 0))
    }

    pub fn is_upper_triangular(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(r, row)| row.iter().take(r).all(|&b| b == 0))
    }

    pub fn has_unit_diagonal(&self) -> bool {
        self.rows.iter().enumerate().all(|(r, row)| row[r] == 1)
    }
}

/// Explicit `size x size` matrix `M` with `u = v M`.
///
/// The reverse kind needs the row-weight rule, which depends on `n`, so
/// `size` must be a power of two there; forward and identity accept any size.
pub fn precoder_matrix(spec: &PrecoderSpec, size: usize) -> BitMatrix {
    let taps = spec.poly.taps();
    let n = size.trailing_zeros();
    let mut rows = vec![vec![0u8; size]; size];
    match spec.kind {
        PrecoderKind::Identity => {
            for (r, row) in rows.iter_mut().enumerate() {
                row[r] = 1;
            }
        }
        PrecoderKind::Forward => {
            for (r, row) in rows.iter_mut().enumerate() {
                for (l, &p) in taps.iter().enumerate() {
                    if r + l < size {
                        row[r + l] = p;
                    }
                }
            }
        }
        PrecoderKind::Reverse => {
            // Column i holds the taps of u_i.
            for i in 0..size {
                if spec.reverse_active(i, n) {
                    for (l, &p) in taps.iter().enumerate() {
                        if i + l < size {
                            rows[i + l][i] = p;
                        }
                    }
                } else {
                    rows[i][i] = 1;
                }
            }
        }
    }
    BitMatrix::from_rows(rows)
}

/// `G_N` as a dense matrix.
pub fn polar_matrix(len: usize) -> Result<BitMatrix> {
    let rows = (0..len)
        .map(|i| Ok(polar_transform(&BitBlock::unit(len, i)?).to_bits()))
        .collect::<Result<Vec<_>>>()?;
    Ok(BitMatrix::from_rows(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitlinalg::support;
    use crate::construction::{example_64_14_profile, DesignSnr};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn poly10() -> Polynomial {
        Polynomial::new(&POLY_10).unwrap()
    }

    fn random_block(rng: &mut ChaCha8Rng, len: usize) -> BitBlock {
        let bits: Vec<u8> = (0..len).map(|_| rng.gen_range(0..=1)).collect();
        BitBlock::from_bits(&bits).unwrap()
    }

    #[test]
    fn polynomial_parsing() {
        let p: Polynomial = "1,1,0,1,1,0,1,1,0,1".parse().unwrap();
        assert_eq!(p.taps(), &POLY_10);
        assert_eq!(p.degree(), 9);
        assert_eq!(p.to_string(), "1,1,0,1,1,0,1,1,0,1");
        assert!("1,1,0".parse::<Polynomial>().is_err());
        assert!("0,1".parse::<Polynomial>().is_err());
        assert!("1,2,1".parse::<Polynomial>().is_err());
    }

    #[test]
    fn forward_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v = random_block(&mut rng, 32);
        assert_eq!(forward_map(&v, &PrecoderSpec::forward(Polynomial::one())).unwrap(), v);

        let spec = PrecoderSpec::forward(Polynomial::new(&[1, 1]).unwrap());
        let u = forward_map(&BitBlock::unit(4, 0).unwrap(), &spec).unwrap();
        assert_eq!(u.to_bits(), vec![1, 1, 0, 0]);

        let u = forward_map(&BitBlock::unit(64, 54).unwrap(), &PrecoderSpec::forward(poly10())).unwrap();
        assert_eq!(support(&u), vec![54, 55, 57, 58, 60, 61, 63]);
    }

    #[test]
    fn reverse_examples() {
        let profile = example_64_14_profile();
        let one = PrecoderSpec::reverse_for(Polynomial::one(), &profile).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let v = random_block(&mut rng, 64);
        assert_eq!(reverse_map(&v, &one, &profile).unwrap(), v);

        let spec = PrecoderSpec::reverse_for(poly10(), &profile).unwrap();
        assert_eq!(spec.wmin_threshold(), Some(16));
        let zero = BitBlock::zeros(64).unwrap();
        assert!(reverse_map(&zero, &spec, &profile).unwrap().is_zero());

        // Taps at distances 0,1,3,4,6,7,9 below 54; rows 50 and 48 are too light.
        let u = reverse_map(&BitBlock::unit(64, 54).unwrap(), &spec, &profile).unwrap();
        assert_eq!(support(&u), vec![45, 47, 51, 53, 54]);
        assert_eq!(polar_transform(&u).weight(), 24);
    }

    #[test]
    fn reverse_threshold_must_match_profile() {
        let profile = example_64_14_profile();
        let spec = PrecoderSpec::reverse(poly10(), 8);
        let v = BitBlock::unit(64, 54).unwrap();
        assert!(matches!(reverse_map(&v, &spec, &profile), Err(Error::Validation(_))));
    }

    #[test]
    fn demap_examples() {
        let profile = example_64_14_profile();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let fwd = PrecoderSpec::forward(poly10());
        let rev = PrecoderSpec::reverse_for(poly10(), &profile).unwrap();
        for _ in 0..1000 {
            let v = random_block(&mut rng, 64);
            assert_eq!(demap(&forward_map(&v, &fwd).unwrap(), &fwd, &profile).unwrap(), v);
            assert_eq!(demap(&reverse_map(&v, &rev, &profile).unwrap(), &rev, &profile).unwrap(), v);
        }
        let zero = BitBlock::zeros(64).unwrap();
        assert!(demap(&zero, &rev, &profile).unwrap().is_zero());
    }

    #[test]
    fn matrix_examples() {
        let m = precoder_matrix(&PrecoderSpec::forward(Polynomial::new(&[1, 1]).unwrap()), 3);
        assert_eq!(m.rows(), &[vec![1, 1, 0], vec![0, 1, 1], vec![0, 0, 1]]);

        // All rows active: threshold 1 is met by every index.
        let p = poly10();
        let fwd = precoder_matrix(&PrecoderSpec::forward(p.clone()), 64);
        let rev = precoder_matrix(&PrecoderSpec::reverse(p, 1), 64);
        assert_eq!(rev, fwd.transpose());

        let profile = example_64_14_profile();
        let spec = PrecoderSpec::reverse_for(poly10(), &profile).unwrap();
        let m = precoder_matrix(&spec, 64);
        assert!(m.is_lower_triangular() && m.has_unit_diagonal());
        assert!(m.mul(&polar_matrix(64).unwrap()).is_lower_triangular());
        assert!(fwd.is_upper_triangular() && fwd.has_unit_diagonal());
    }

    #[test]
    fn matrix_agrees_with_streaming_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for &len in &[4usize, 16, 64, 128] {
            let k = len / 2;
            let profile = crate::construction::construct_profile(len, k, 2.0).unwrap();
            for taps in [&POLY_10[..], &POLY_7[..], &[1, 0, 1, 1][..]] {
                let p = Polynomial::new(taps).unwrap();
                let fwd = PrecoderSpec::forward(p.clone());
                let rev = PrecoderSpec::reverse_for(p, &profile).unwrap();
                let mf = precoder_matrix(&fwd, len);
                let mr = precoder_matrix(&rev, len);
                for _ in 0..20 {
                    let v = random_block(&mut rng, len);
                    assert_eq!(mf.left_mul(&v.to_bits()), forward_map(&v, &fwd).unwrap().to_bits());
                    assert_eq!(
                        mr.left_mul(&v.to_bits()),
                        reverse_map(&v, &rev, &profile).unwrap().to_bits()
                    );
                }
            }
        }
    }

    #[test]
    fn support_preservation_and_motion_exhaustive_16() {
        let profile = CodeProfile::from_info_set(16, &[7, 11, 13, 14, 15], DesignSnr::External).unwrap();
        let p = Polynomial::new(&[1, 0, 1, 1]).unwrap();
        let fwd = PrecoderSpec::forward(p.clone());
        let rev = PrecoderSpec::reverse_for(p, &profile).unwrap();
        for word in 1u32..(1 << 16) {
            let bits: Vec<u8> = (0..16).map(|i| ((word >> i) & 1) as u8).collect();
            let v = BitBlock::from_bits(&bits).unwrap();
            let uf = forward_map(&v, &fwd).unwrap();
            assert_eq!(uf.min_support(), v.min_support());
            let ur = reverse_map(&v, &rev, &profile).unwrap();
            assert_eq!(demap(&uf, &fwd, &profile).unwrap(), v);
            assert_eq!(demap(&ur, &rev, &profile).unwrap(), v);
        }
        let (mut down, mut up) = (0, 0);
        for word in 1u32..32 {
            let v = BitBlock::from_support(
                16,
                &profile.info_set().iter().enumerate().filter(|(k, _)| word >> k & 1 == 1).map(|(_, &i)| i).collect::<Vec<_>>(),
            )
            .unwrap();
            let lead = v.min_support().unwrap();
            let lr = reverse_map(&v, &rev, &profile).unwrap().min_support().unwrap();
            down += (lr < lead) as usize;
            up += (lr > lead) as usize;
        }
        assert!(down > 0);
        assert!(up > 0);
        // v_13 + v_15 cancels in u_13, u_11 = v_13 + v_14 cancels, row 10 is inactive.
        let v = BitBlock::from_support(16, &[13, 14, 15]).unwrap();
        assert_eq!(reverse_map(&v, &rev, &profile).unwrap().to_bits().iter().enumerate().filter(|(_, &b)| b == 1).map(|(i, _)| i).collect::<Vec<_>>(), vec![14, 15]);
    }

}
