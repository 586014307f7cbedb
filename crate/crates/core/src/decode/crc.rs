//! Systematic CRC used by the CRC-aided polar baseline.

use std::fmt;

/// Generator polynomial of degree `degree`; `low_taps` holds the
/// coefficients of `x^{degree-1} .. x^0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CrcPoly {
    degree: usize,
    low_taps: u64,
}

/// `g(x) = x^11 + x^10 + x^9 + x^5 + 1`.
pub const CRC11: CrcPoly = CrcPoly {
    degree: 11,
    low_taps: (1 << 10) | (1 << 9) | (1 << 5) | 1,
};

impl CrcPoly {
    pub fn new(degree: usize, low_taps: u64) -> Self {
        assert!((1..64).contains(&degree), "CRC degree must be in 1..64");
        assert!(low_taps < (1 << degree), "taps exceed the degree");
        Self { degree, low_taps }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `bits(x) x^degree mod g(x)`, first bit is the highest-degree coefficient.
    pub fn remainder(&self, bits: &[u8]) -> u64 {
        let top = self.degree - 1;
        let mask = (1u64 << self.degree) - 1;
        let mut reg = 0u64;
        for &b in bits {
            let feedback = ((reg >> top) & 1) ^ (b as u64 & 1);
            reg = (reg << 1) & mask;
            if feedback == 1 {
                reg ^= self.low_taps;
            }
        }
        reg
    }

    /// The `degree` parity bits of `message`, highest degree first.
    pub fn parity(&self, message: &[u8]) -> Vec<u8> {
        let r = self.remainder(message);
        (0..self.degree)
            .map(|k| ((r >> (self.degree - 1 - k)) & 1) as u8)
            .collect()
    }
}

impl fmt::Display for CrcPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x^{}", self.degree)?;
        for d in (0..self.degree).rev() {
            if (self.low_taps >> d) & 1 == 1 {
                match d {
                    0 => write!(f, "+1")?,
                    1 => write!(f, "+x")?,
                    _ => write!(f, "+x^{d}")?,
                }
            }
        }
        Ok(())
    }
}

/// Message followed by its CRC.
pub fn crc_attach(message: &[u8], poly: &CrcPoly) -> Vec<u8> {
    let mut out = message.to_vec();
    out.extend(poly.parity(message));
    out
}

/// True when `bits` (message then CRC) leaves a zero remainder.
pub fn crc_check(bits: &[u8], poly: &CrcPoly) -> bool {
    poly.remainder(bits) == 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_message() {
        let w = crc_attach(&[0; 50], &CRC11);
        assert_eq!(w.len(), 61);
        assert!(w.iter().all(|&b| b == 0));
        assert!(crc_check(&w, &CRC11));
    }

    #[test]
    fn single_errors_detected_and_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let len = rng.gen_range(1..100);
            let m: Vec<u8> = (0..len).map(|_| rng.gen_range(0..=1)).collect();
            let mut w = crc_attach(&m, &CRC11);
            assert!(crc_check(&w, &CRC11));
            let k = rng.gen_range(0..w.len());
            w[k] ^= 1;
            assert!(!crc_check(&w, &CRC11));
        }
    }

    #[test]
    fn parity_matches_polynomial_long_division() {
        // Remainder of m(x) x^11 by schoolbook division on a dense vector.
        let g = [1u8, 1, 1, 0, 0, 0, 1, 0, 0, 0, 0, 1];
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..200 {
            let m: Vec<u8> = (0..40).map(|_| rng.gen_range(0..=1)).collect();
            let mut work = m.clone();
            work.extend([0u8; 11]);
            for i in 0..m.len() {
                if work[i] == 1 {
                    for (k, &gk) in g.iter().enumerate() {
                        work[i + k] ^= gk;
                    }
                }
            }
            assert_eq!(&work[m.len()..], CRC11.parity(&m).as_slice());
        }
    }

    #[test]
    fn display() {
        assert_eq!(CRC11.to_string(), "x^11+x^10+x^9+x^5+1");
    }
}
