//! Parameter grids for sweeps, written `start:stop:step`, a comma list, or a single value.

use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// Grids longer than this are rejected rather than allocated.
pub const MAX_GRID_POINTS: usize = 10_000_000;

/// An increasing list of sample values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    values: Vec<f64>,
}

impl Grid {
    /// `start, start + step, …` up to and including `stop` (within a thousandth of a step).
    pub fn range(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
            return Err(Error::Parse("grid bounds must be finite".into()));
        }
        if !(step > 0.0) {
            return Err(Error::Parse(format!("grid step {step} must be positive")));
        }
        if stop < start {
            return Err(Error::Parse(format!(
                "grid stop {stop} is below start {start}"
            )));
        }
        let count = ((stop - start) / step + 1e-3).floor() + 1.0;
        if !(count <= MAX_GRID_POINTS as f64) {
            return Err(Error::Parse(format!(
                "grid has more than {MAX_GRID_POINTS} points"
            )));
        }
        let values = (0..count as usize)
            .map(|k| (start + k as f64 * step).min(stop))
            .collect();
        Ok(Self { values })
    }

    pub fn from_values(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Parse("grid is empty".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse("grid values must be finite".into()));
        }
        if values.len() > MAX_GRID_POINTS {
            return Err(Error::Parse(format!(
                "grid has more than {MAX_GRID_POINTS} points"
            )));
        }
        values.sort_by(f64::total_cmp);
        values.dedup();
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn number(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("'{}' is not a number", s.trim())))
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            let [start, stop, step] = parts[..] else {
                return Err(Error::Parse(format!(
                    "'{s}' is not of the form start:stop:step"
                )));
            };
            Grid::range(number(start)?, number(stop)?, number(step)?)
        } else {
            Grid::from_values(s.split(',').map(number).collect::<Result<_>>()?)
        }
    }
}
