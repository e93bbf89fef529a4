use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Three strictly positive, finite masses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct Masses([f64; 3]);

impl Masses {
    pub fn new(m: [f64; 3]) -> Result<Self> {
        if m.iter().all(|x| x.is_finite() && *x > 0.0) {
            Ok(Self(m))
        } else {
            Err(Error::InvalidInput(format!("masses must be positive and finite, got {m:?}")))
        }
    }

    pub fn equal(m: f64) -> Result<Self> {
        Self::new([m; 3])
    }

    pub fn unit() -> Self {
        Self([1.0; 3])
    }

    pub fn values(&self) -> [f64; 3] {
        self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn sqrt(&self) -> [f64; 3] {
        self.0.map(f64::sqrt)
    }

    pub fn are_equal(&self) -> bool {
        self.0[0] == self.0[1] && self.0[1] == self.0[2]
    }

    /// Largest pairwise difference.
    pub fn max_gap(&self) -> f64 {
        let [a, b, c] = self.0;
        (a - b).abs().max((b - c).abs()).max((c - a).abs())
    }
}

impl std::ops::Index<usize> for Masses {
    type Output = f64;

    fn index(&self, k: usize) -> &f64 {
        &self.0[k]
    }
}

impl TryFrom<[f64; 3]> for Masses {
    type Error = Error;

    fn try_from(m: [f64; 3]) -> Result<Self> {
        Self::new(m)
    }
}

impl From<Masses> for [f64; 3] {
    fn from(m: Masses) -> Self {
        m.0
    }
}

impl FromStr for Masses {
    type Err = Error;

    /// Parses `"m1,m2,m3"`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidInput(format!("bad mass list '{s}': {e}")))?;
        let arr: [f64; 3] = parts
            .try_into()
            .map_err(|_| Error::InvalidInput(format!("expected three masses, got '{s}'")))?;
        Self::new(arr)
    }
}

impl fmt::Display for Masses {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.0[0], self.0[1], self.0[2])
    }
}
