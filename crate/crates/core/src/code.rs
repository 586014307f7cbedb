//! A concrete code: profile, pre-transform and optional outer CRC.

use std::fmt;
use std::str::FromStr;

use crate::bitlinalg::{polar_transform, BitBlock};
use crate::construction::CodeProfile;
use crate::decode::crc::{crc_attach, CrcPoly};
use crate::error::{Error, Result};
use crate::precode::{demap, precode, Polynomial, PrecoderKind, PrecoderSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Polar,
    Pac,
    Rpac,
    CrcPolar,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Polar => "polar",
            Scheme::Pac => "pac",
            Scheme::Rpac => "rpac",
            Scheme::CrcPolar => "crc_polar",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "polar" => Ok(Scheme::Polar),
            "pac" => Ok(Scheme::Pac),
            "rpac" => Ok(Scheme::Rpac),
            "crc_polar" | "crc-polar" => Ok(Scheme::CrcPolar),
            other => Err(Error::Parse(format!("unknown scheme {other:?}"))),
        }
    }
}

/// Everything needed to encode and check membership.
///
/// Message bits (followed by CRC bits when present) are placed on the
/// information indices in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Code {
    profile: CodeProfile,
    precoder: PrecoderSpec,
    crc: Option<CrcPoly>,
}

impl Code {
    pub fn polar(profile: CodeProfile) -> Self {
        Self {
            profile,
            precoder: PrecoderSpec::identity(),
            crc: None,
        }
    }

    pub fn pac(profile: CodeProfile, poly: Polynomial) -> Self {
        Self {
            profile,
            precoder: PrecoderSpec::forward(poly),
            crc: None,
        }
    }

    pub fn rpac(profile: CodeProfile, poly: Polynomial) -> Result<Self> {
        let precoder = PrecoderSpec::reverse_for(poly, &profile)?;
        Ok(Self {
            profile,
            precoder,
            crc: None,
        })
    }

    /// Polar code whose `K` information indices carry `K - deg(crc)` message
    /// bits and their CRC.
    pub fn crc_polar(profile: CodeProfile, crc: CrcPoly) -> Result<Self> {
        if profile.k() <= crc.degree() {
            return Err(Error::InvalidParameter(format!(
                "information set of size {} cannot hold a degree-{} CRC",
                profile.k(),
                crc.degree()
            )));
        }
        Ok(Self {
            profile,
            precoder: PrecoderSpec::identity(),
            crc: Some(crc),
        })
    }

    /// Generic constructor; validates the precoder against the profile.
    pub fn new(profile: CodeProfile, precoder: PrecoderSpec, crc: Option<CrcPoly>) -> Result<Self> {
        precoder.validate_for(&profile)?;
        if crc.is_some() && precoder.kind() != PrecoderKind::Identity {
            return Err(Error::InvalidParameter("CRC is only supported on the plain polar code".into()));
        }
        if let Some(c) = crc {
            return Self::crc_polar(profile, c);
        }
        Ok(Self {
            profile,
            precoder,
            crc: None,
        })
    }

    pub fn scheme(&self) -> Scheme {
        match (self.precoder.kind(), self.crc) {
            (_, Some(_)) => Scheme::CrcPolar,
            (PrecoderKind::Identity, None) => Scheme::Polar,
            (PrecoderKind::Forward, None) => Scheme::Pac,
            (PrecoderKind::Reverse, None) => Scheme::Rpac,
        }
    }

    pub fn profile(&self) -> &CodeProfile {
        &self.profile
    }

    pub fn precoder(&self) -> &PrecoderSpec {
        &self.precoder
    }

    pub fn crc(&self) -> Option<&CrcPoly> {
        self.crc.as_ref()
    }

    pub fn block_len(&self) -> usize {
        self.profile.block_len()
    }

    pub fn message_len(&self) -> usize {
        self.profile.k() - self.crc.map_or(0, |c| c.degree())
    }

    /// Message rate `message_len / N`.
    pub fn rate(&self) -> f64 {
        self.message_len() as f64 / self.block_len() as f64
    }

    /// Places message (and CRC) bits on the information indices.
    pub fn v_from_message(&self, message: &[u8]) -> Result<BitBlock> {
        if message.len() != self.message_len() {
            return Err(Error::LengthMismatch {
                expected: self.message_len(),
                actual: message.len(),
            });
        }
        let data = match &self.crc {
            Some(c) => crc_attach(message, c),
            None => message.to_vec(),
        };
        let mut v = BitBlock::zeros(self.block_len())?;
        for (&i, &b) in self.profile.info_set().iter().zip(&data) {
            v.set(i, b == 1);
        }
        Ok(v)
    }

    /// Message bits read back from a `v` vector (CRC bits dropped).
    pub fn message_from_v(&self, v: &[u8]) -> Vec<u8> {
        self.profile
            .info_set()
            .iter()
            .take(self.message_len())
            .map(|&i| v[i])
            .collect()
    }

    pub fn encode(&self, message: &[u8]) -> Result<BitBlock> {
        let v = self.v_from_message(message)?;
        Ok(polar_transform(&precode(&v, &self.precoder, &self.profile)?))
    }

    /// Membership test: `x` is a codeword iff its de-mapped `v` is zero on
    /// every frozen index and, with a CRC, the information bits check.
    pub fn contains(&self, x: &BitBlock) -> Result<bool> {
        let v = demap(&polar_transform(x), &self.precoder, &self.profile)?;
        if self.profile.frozen_set().iter().any(|&f| v.get(f)) {
            return Ok(false);
        }
        Ok(match &self.crc {
            Some(c) => {
                let data: Vec<u8> = self.profile.info_set().iter().map(|&i| v.bit(i)).collect();
                c.remainder(&data) == 0
            }
            None => true,
        })
    }

    /// Short human label, e.g. `rpac(10)`.
    pub fn label(&self) -> String {
        match self.scheme() {
            Scheme::Pac | Scheme::Rpac => format!("{}({})", self.scheme(), self.precoder.degree() + 1),
            s => s.to_string(),
        }
    }
}
