//! Extended-real parameters for the ball family.
//!
//! The index `q` is carried as a sum type rather than a sentinel float:
//! at `q = ∞` the Lorentz weight becomes `1/i` and the natural rescaling
//! becomes `log(n + 1)`, which differ structurally from the finite-`q`
//! formulas, not just numerically.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// An extended positive real, finite or `∞`. Used for the secondary
/// exponent `r` of the `ℓ_r` norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ExtReal {
    Finite(f64),
    Infinite,
}

impl ExtReal {
    pub fn new(value: f64) -> Result<Self, Error> {
        if value.is_nan() || value <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "extended real must be positive, got {value}"
            )));
        }
        if value.is_infinite() {
            Ok(ExtReal::Infinite)
        } else {
            Ok(ExtReal::Finite(value))
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtReal::Infinite)
    }

    /// The value as a float, `∞` mapping to `f64::INFINITY`.
    pub fn as_f64(self) -> f64 {
        match self {
            ExtReal::Finite(v) => v,
            ExtReal::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for ExtReal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim() {
            "inf" | "infinity" | "Inf" | "∞" => Ok(ExtReal::Infinite),
            other => {
                let v: f64 = other.parse().map_err(|_| {
                    Error::InvalidParameter(format!("cannot parse `{other}` as a number or `inf`"))
                })?;
                ExtReal::new(v)
            }
        }
    }
}

/// The primary index `q ∈ [1, ∞]` of the Lorentz ball `ℬ_{q,1}^n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum QIndex {
    Finite(f64),
    Infinite,
}

impl QIndex {
    pub fn new(q: f64) -> Result<Self, Error> {
        if q.is_nan() || q < 1.0 {
            return Err(Error::InvalidParameter(format!("q must satisfy q >= 1, got {q}")));
        }
        if q.is_infinite() {
            Ok(QIndex::Infinite)
        } else {
            Ok(QIndex::Finite(q))
        }
    }

    pub fn infinity() -> Self {
        QIndex::Infinite
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, QIndex::Infinite)
    }

    pub fn as_f64(self) -> f64 {
        match self {
            QIndex::Finite(q) => q,
            QIndex::Infinite => f64::INFINITY,
        }
    }

    /// Exponent of the Lorentz weight `i^{1/q - 1}`; `-1` at `q = ∞`.
    pub fn weight_exponent(self) -> f64 {
        match self {
            QIndex::Finite(q) => 1.0 / q - 1.0,
            QIndex::Infinite => -1.0,
        }
    }

    /// The weight `i^{1/q - 1}` of the `i`-th largest coordinate (`1/i` at `q = ∞`).
    pub fn weight(self, i: usize) -> f64 {
        (i as f64).powf(self.weight_exponent())
    }

    /// Scaling factor of the ball `𝔻̃`: `n^{1/q}` for finite `q`,
    /// `log(n + 1)` at `q = ∞`.
    pub fn tilde_scale(self, n: usize) -> f64 {
        match self {
            QIndex::Finite(q) => (n as f64).powf(1.0 / q),
            QIndex::Infinite => ((n + 1) as f64).ln(),
        }
    }
}

impl fmt::Display for QIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QIndex::Finite(q) => write!(f, "{q}"),
            QIndex::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for QIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let v = ExtReal::from_str(s)?;
        match v {
            ExtReal::Finite(q) => QIndex::new(q),
            ExtReal::Infinite => Ok(QIndex::Infinite),
        }
    }
}
