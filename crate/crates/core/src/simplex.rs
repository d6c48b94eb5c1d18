use serde::Serialize;

use crate::error::{Error, Result};

/// A nonnegative vector summing to 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplexPoint {
    pub x: Vec<f64>,
}

impl SimplexPoint {
    /// Validates nonnegativity and unit sum within `1e-12`.
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if x.is_empty() || x.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::Domain {
                name: "simplex point",
                value: f64::NAN,
                reason: "components must be finite and nonnegative",
            });
        }
        let s: f64 = x.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::Domain {
                name: "simplex sum",
                value: s,
                reason: "components must sum to 1",
            });
        }
        Ok(Self { x })
    }

    /// Scales a nonnegative vector onto the simplex.
    pub fn normalized(x: Vec<f64>) -> Result<Self> {
        let s: f64 = x.iter().sum();
        if !(s > 0.0) {
            return Err(Error::Domain {
                name: "simplex sum",
                value: s,
                reason: "need a positive total",
            });
        }
        Self::new(x.into_iter().map(|v| v / s).collect())
    }

    pub fn barycenter(n: usize) -> Self {
        Self {
            x: vec![1.0 / n as f64; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn distance(&self, other: &SimplexPoint) -> f64 {
        self.x
            .iter()
            .zip(&other.x)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}
