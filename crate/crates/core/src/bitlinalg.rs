//! Binary vectors over GF(2) and the polar transform.
//!
//! Indices follow the natural order throughout: bit `i_0` of an index is its
//! least significant bit and no bit-reversal permutation is ever applied.

use std::fmt;

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

/// Masks selecting the positions whose index has bit `log2(h)` clear, for
/// butterfly spans `h < 64`.
const BUTTERFLY_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

/// A length-`N` binary vector, `N = 2^n` with `n >= 1`.
///
/// Used for the message-side vector `v`, the transform input `u` and the
/// codeword `x`. Storage is packed; every interface speaks in positions.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitBlock {
    words: Vec<u64>,
    len: usize,
}

fn check_len(len: usize) -> Result<()> {
    if len >= 2 && len.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::InvalidLength(len))
    }
}

impl BitBlock {
    pub fn zeros(len: usize) -> Result<Self> {
        check_len(len)?;
        Ok(Self {
            words: vec![0; len.div_ceil(WORD_BITS)],
            len,
        })
    }

    /// Builds a block from a slice of 0/1 values.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let mut block = Self::zeros(bits.len())?;
        for (i, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => block.set(i, true),
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "bit {i} has value {other}, expected 0 or 1"
                    )))
                }
            }
        }
        Ok(block)
    }

    pub fn from_support(len: usize, support: &[usize]) -> Result<Self> {
        let mut block = Self::zeros(len)?;
        for &i in support {
            if i >= len {
                return Err(Error::InvalidArgument(format!(
                    "index {i} out of range for length {len}"
                )));
            }
            block.flip(i);
        }
        Ok(block)
    }

    /// Unit vector with a single one at `index`.
    pub fn unit(len: usize, index: usize) -> Result<Self> {
        Self::from_support(len, &[index])
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `n = log2(N)`.
    pub fn log_len(&self) -> u32 {
        self.len.trailing_zeros()
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "index {i} out of range");
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn bit(&self, i: usize) -> u8 {
        self.get(i) as u8
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "index {i} out of range");
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "index {i} out of range");
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Smallest index holding a one, `None` for the all-zero vector.
    pub fn min_support(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| k * WORD_BITS + w.trailing_zeros() as usize)
    }

    /// Ascending iterator over the positions holding a one.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let t = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(k * WORD_BITS + t)
                }
            })
        })
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.bit(i)).collect()
    }

    pub fn xor_assign(&mut self, other: &BitBlock) {
        assert_eq!(self.len, other.len, "xor of blocks with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitBlock) -> BitBlock {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    /// In-place `x = u G_N`.
    pub fn polar_transform_in_place(&mut self) {
        polar_transform_words(&mut self.words, self.len);
    }
}

impl fmt::Debug for BitBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitBlock[")?;
        for i in 0..self.len {
            write!(f, "{}", self.bit(i))?;
        }
        write!(f, "]")
    }
}

/// Butterfly passes of `G_N` over packed words holding `len` bits.
pub(crate) fn polar_transform_words(words: &mut [u64], len: usize) {
    let mut h = 1;
    while h < len {
        if h < WORD_BITS {
            let mask = BUTTERFLY_MASKS[h.trailing_zeros() as usize];
            for w in words.iter_mut() {
                *w ^= (*w >> h) & mask;
            }
        } else {
            let span = h / WORD_BITS;
            for block in words.chunks_mut(2 * span) {
                let (lo, hi) = block.split_at_mut(span);
                for (a, b) in lo.iter_mut().zip(hi.iter()) {
                    *a ^= b;
                }
            }
        }
        h <<= 1;
    }
}

/// `x = u G_N` where `G_N` is the n-fold Kronecker power of `[[1,0],[1,1]]`.
pub fn polar_transform(u: &BitBlock) -> BitBlock {
    let mut x = u.clone();
    x.polar_transform_in_place();
    x
}

/// Row `g_i` of `G_N`.
pub fn polar_row(i: usize, len: usize) -> Result<BitBlock> {
    Ok(polar_transform(&BitBlock::unit(len, i)?))
}

/// Weight of row `g_i` of `G_{2^n}`, i.e. `2^{wt(bin(i))}`.
#[inline]
pub fn row_weight(i: usize, n: u32) -> usize {
    debug_assert!(n >= usize::BITS || i < (1usize << n));
    1usize << i.count_ones()
}

/// Number of bits set in `bin(j)` that are not set in `bin(i)`.
#[inline]
pub fn new_support_bits(j: usize, i: usize) -> u32 {
    (j & !i).count_ones()
}

/// Positions holding a one, ascending.
pub fn support(v: &BitBlock) -> Vec<usize> {
    v.ones().collect()
}

/// Index together with its binary support and row weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexInfo {
    pub index: usize,
    pub binary_support: Vec<u32>,
    pub row_weight: usize,
}

impl IndexInfo {
    pub fn new(index: usize, n: u32) -> Result<Self> {
        if n >= usize::BITS || index >= (1usize << n) {
            return Err(Error::InvalidArgument(format!(
                "index {index} out of range for n = {n}"
            )));
        }
        let binary_support = (0..n).filter(|b| (index >> b) & 1 == 1).collect();
        Ok(Self {
            index,
            binary_support,
            row_weight: row_weight(index, n),
        })
    }
}
