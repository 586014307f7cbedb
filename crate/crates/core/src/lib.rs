//! Polar, PAC and reverse-PAC (RPAC) codes.
//!
//! * [`bitlinalg`]: GF(2) vectors and the polar transform
//! * [`construction`]: information sets by Gaussian-approximation density
//!   evolution, profile files
//! * [`precode`]: forward and reverse convolutional pre-transforms
//! * [`structure`]: coset analysis and the polar error-coefficient formula
//! * [`spectrum`]: brute-force minimum-weight enumeration
//! * [`decode`]: SC, SCL, CRC-aided SCL and look-ahead SCL
//! * [`sim`]: BI-AWGN Monte Carlo block-error-rate harness

pub mod bitlinalg;
pub mod code;
pub mod construction;
pub mod decode;
pub mod error;
pub mod precode;
pub mod sim;
pub mod spectrum;
pub mod structure;

pub use code::{Code, Scheme};
pub use error::{Error, Result};
