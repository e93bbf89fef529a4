//! Pairwise potentials `U(cos σ)` and their derivatives with respect to `cos σ`.
//!
//! The sign convention follows the Lagrangian `L = K + V` with
//! `V = Σ m_i m_j U(cos σ_ij)`: a potential is attractive when `U′ > 0`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Below this value of `1 − cos²σ` a pair is treated as singular.
pub const SINGULAR_SIN2: f64 = 1e-14;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// User-supplied potential given as functions of `cos σ`.
#[derive(Clone)]
pub struct CustomPotential {
    name: String,
    u: ScalarFn,
    u_prime: ScalarFn,
    attractive: bool,
}

impl CustomPotential {
    /// Wraps `u` and `u_prime`, checking the declared sign of `u_prime` on a
    /// grid of `σ ∈ (0, π)`.
    pub fn new(
        name: impl Into<String>,
        u: impl Fn(f64) -> f64 + Send + Sync + 'static,
        u_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
        attractive: bool,
    ) -> Result<Self> {
        let pot = Self {
            name: name.into(),
            u: Arc::new(u),
            u_prime: Arc::new(u_prime),
            attractive,
        };
        let n = 512;
        for k in 1..n {
            let sigma = std::f64::consts::PI * k as f64 / n as f64;
            let d = (pot.u_prime)(sigma.cos());
            if !d.is_finite() || d == 0.0 || (d > 0.0) != attractive {
                return Err(Error::InvalidInput(format!(
                    "potential '{}' has U'(cos {sigma:.4}) = {d}, inconsistent with declared sign",
                    pot.name
                )));
            }
        }
        Ok(pot)
    }
}

impl fmt::Debug for CustomPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomPotential")
            .field("name", &self.name)
            .field("attractive", &self.attractive)
            .finish()
    }
}

/// Which pairwise potential drives the bodies.
#[derive(Debug, Clone, Default)]
pub enum PotentialKind {
    /// `U = cot σ`, the curved analogue of Newtonian gravity.
    #[default]
    Cotangent,
    /// `U = −cot σ` (repulsive).
    NegatedCotangent,
    Custom(CustomPotential),
}

impl PotentialKind {
    pub fn name(&self) -> &str {
        match self {
            Self::Cotangent => "cotangent",
            Self::NegatedCotangent => "negated-cotangent",
            Self::Custom(c) => &c.name,
        }
    }

    pub fn is_attractive(&self) -> bool {
        match self {
            Self::Cotangent => true,
            Self::NegatedCotangent => false,
            Self::Custom(c) => c.attractive,
        }
    }

    /// The potential `−U`.
    pub fn negated(&self) -> Self {
        match self {
            Self::Cotangent => Self::NegatedCotangent,
            Self::NegatedCotangent => Self::Cotangent,
            Self::Custom(c) => {
                let u = c.u.clone();
                let du = c.u_prime.clone();
                Self::Custom(CustomPotential {
                    name: format!("negated-{}", c.name),
                    u: Arc::new(move |x| -u(x)),
                    u_prime: Arc::new(move |x| -du(x)),
                    attractive: !c.attractive,
                })
            }
        }
    }

    fn sign(&self) -> f64 {
        if matches!(self, Self::NegatedCotangent) {
            -1.0
        } else {
            1.0
        }
    }

    /// `U(cos σ)`.
    pub fn u_value(&self, cos_sigma: f64) -> Result<f64> {
        let sin2 = check_separation(cos_sigma)?;
        Ok(match self {
            Self::Custom(c) => (c.u)(cos_sigma),
            _ => self.sign() * cos_sigma / sin2.sqrt(),
        })
    }

    /// `U′(cos σ) = dU/d(cos σ)`.
    pub fn u_prime(&self, cos_sigma: f64) -> Result<f64> {
        let sin2 = check_separation(cos_sigma)?;
        Ok(match self {
            Self::Custom(c) => (c.u_prime)(cos_sigma),
            _ => self.sign() / (sin2 * sin2.sqrt()),
        })
    }

    /// `U′(cos θ_ij)` for a signed meridian difference; for the cotangent this
    /// is `1/|sin θ_ij|³`, even in `θ_ij`.
    pub fn u_prime_meridian(&self, theta_diff: f64) -> Result<f64> {
        let s = theta_diff.sin();
        let sin2 = s * s;
        if sin2 < SINGULAR_SIN2 {
            return Err(Error::SingularSeparation {
                i: 0,
                j: 0,
                cos_sigma: theta_diff.cos(),
            });
        }
        Ok(match self {
            Self::Custom(c) => (c.u_prime)(theta_diff.cos()),
            _ => self.sign() / (sin2 * s.abs()),
        })
    }
}

fn check_separation(cos_sigma: f64) -> Result<f64> {
    let sin2 = 1.0 - cos_sigma * cos_sigma;
    if !(sin2 >= SINGULAR_SIN2) {
        return Err(Error::SingularSeparation { i: 0, j: 0, cos_sigma });
    }
    Ok(sin2)
}

/// Tags the pair indices onto a separation error.
pub(crate) fn with_pair(err: Error, i: usize, j: usize) -> Error {
    match err {
        Error::SingularSeparation { cos_sigma, .. } => Error::SingularSeparation { i, j, cos_sigma },
        other => other,
    }
}

impl FromStr for PotentialKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cotangent" | "cot" => Ok(Self::Cotangent),
            "negated-cotangent" | "-cotangent" | "repulsive-cotangent" => Ok(Self::NegatedCotangent),
            other => Err(Error::InvalidInput(format!("unknown potential '{other}'"))),
        }
    }
}

impl fmt::Display for PotentialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Serialized by name; custom potentials cannot be read back.
impl serde::Serialize for PotentialKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> serde::Deserialize<'de> for PotentialKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let name = String::deserialize(d)?;
        name.parse().map_err(serde::de::Error::custom)
    }
}
