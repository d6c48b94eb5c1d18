//! Geometry of the invariant set: nested image intervals, gaps in the irrational regime,
//! dynamics classification, gauge cover values and invariant-measure samples.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::circle_map::{BranchPolicy, MapParams, OrbitIter};
use crate::error::{Error, Result};
use crate::numeric::{CompensatedSum, Enclosure};
use crate::rotation::{
    phi_at_multiple, phi_rho, rotation_number, PlateauPosition, RotationNumber, RotationOptions,
};

/// Sorted, pairwise disjoint closed intervals in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalUnion {
    pub intervals: Vec<(f64, f64)>,
}

impl IntervalUnion {
    pub fn unit() -> Self {
        Self {
            intervals: vec![(0.0, 1.0)],
        }
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn total_length(&self) -> f64 {
        self.intervals
            .iter()
            .map(|(l, r)| r - l)
            .collect::<CompensatedSum>()
            .value()
    }

    /// Distance from `x` to the union.
    pub fn distance(&self, x: f64) -> f64 {
        self.intervals
            .iter()
            .map(|&(l, r)| {
                if x < l {
                    l - x
                } else if x > r {
                    x - r
                } else {
                    0.0
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: f64, eps: f64) -> bool {
        self.distance(x) <= eps
    }

    /// Every interval of `self` lies inside some interval of `other`, up to `eps`.
    pub fn is_subset_of(&self, other: &IntervalUnion, eps: f64) -> bool {
        self.intervals.iter().all(|&(l, r)| {
            other
                .intervals
                .iter()
                .any(|&(ol, or)| ol - eps <= l && r <= or + eps)
        })
    }

    fn normalize(mut intervals: Vec<(f64, f64)>) -> Self {
        intervals.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
        for (l, r) in intervals {
            match out.last_mut() {
                Some(last) if l <= last.1 => last.1 = last.1.max(r),
                _ => out.push((l, r)),
            }
        }
        Self { intervals: out }
    }
}

/// `f±ⁿ([0, 1])` as at most `n + 1` intervals of total length `aⁿ`.
pub fn invariant_intervals(params: &MapParams, n: usize) -> Result<IntervalUnion> {
    params.require_contracting()?;
    let (a, b) = (params.a, params.b);
    let tau = params.discontinuity();
    let wraps = a + b >= 1.0;
    let image = |x: f64| {
        let shift = match tau {
            Some(t) if wraps && x > t => 1.0,
            _ => 0.0,
        };
        a * x + b - shift
    };
    let mut set = IntervalUnion::unit();
    for _ in 0..n {
        let mut next = Vec::with_capacity(set.len() + 1);
        for &(l, r) in &set.intervals {
            match tau {
                Some(t) if l - params.tau_eps <= t && t <= r + params.tau_eps => {
                    // The left piece ends at 1 under f₊; the right piece starts at 0 under f₋.
                    let k = (a * t + b).round();
                    next.push(((a * l + b + 1.0 - k).min(1.0), 1.0));
                    next.push((0.0, (a * r + b - k).max(0.0)));
                }
                _ => next.push((image(l), image(r))),
            }
        }
        set = IntervalUnion::normalize(next);
    }
    Ok(set)
}

/// The dynamics trichotomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DynamicsClass {
    /// Periodic attractor not containing the discontinuity.
    Case1a,
    /// Periodic orbit through 0.
    Case1bZero,
    /// Periodic orbit through 1.
    Case1bOne,
    /// No periodic orbit with denominator up to the certification cap.
    Case2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Classification {
    pub class: DynamicsClass,
    /// Propagated from a boundary-uncertain or ambiguous rotation number.
    pub ambiguous: bool,
    pub rotation: RotationNumber,
}

pub fn classify(params: &MapParams) -> Result<Classification> {
    classify_with(params, RotationOptions::default())
}

pub fn classify_with(params: &MapParams, opts: RotationOptions) -> Result<Classification> {
    let rotation = rotation_number(params, opts)?;
    let class = match rotation {
        RotationNumber::Rational { position, .. } => match position {
            PlateauPosition::Interior => DynamicsClass::Case1a,
            PlateauPosition::Lower => DynamicsClass::Case1bZero,
            PlateauPosition::Upper => DynamicsClass::Case1bOne,
        },
        RotationNumber::Enclosure { .. } => DynamicsClass::Case2,
    };
    Ok(Classification {
        class,
        ambiguous: !rotation.is_certain(),
        rotation,
    })
}

/// Gauge functions `h` for covering estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gauge {
    Power(f64),
    LogInv,
    LogInvSq,
}

/// `(n + 1) h(aⁿ)`, computed through `n log a` so large `n` does not underflow.
pub fn gauge_cover_value(params: &MapParams, n: u64, gauge: Gauge) -> Result<f64> {
    params.require_contracting()?;
    if n == 0 {
        return Err(Error::Domain {
            name: "n",
            value: 0.0,
            reason: "must be at least 1",
        });
    }
    let log_t = n as f64 * params.a.ln();
    let h = match gauge {
        Gauge::Power(alpha) => (alpha * log_t).exp(),
        Gauge::LogInv => 1.0 / log_t.abs(),
        Gauge::LogInvSq => 1.0 / (log_t * log_t),
    };
    Ok((n + 1) as f64 * h)
}

/// One gap `(φ_ρ(x_i-), φ_ρ(x_i))` of the invariant Cantor set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gap {
    pub index: usize,
    /// `x_i = frac(i ρ̂)`.
    pub x: f64,
    pub left: Enclosure,
    pub right: Enclosure,
    /// `(1-a) a^{i-1}`.
    pub expected_length: f64,
    /// Half-widths of the two endpoint enclosures, summed.
    pub endpoint_error: f64,
    /// Width of the rotation enclosure the midpoint was taken from.
    pub rho_uncertainty: f64,
}

impl Gap {
    pub fn length(&self) -> f64 {
        self.right.mid() - self.left.mid()
    }
}

fn irrational_midpoint(rho: &RotationNumber) -> Result<(f64, f64)> {
    match rho {
        RotationNumber::Rational { ratio, .. } => Err(Error::RationalRotation {
            p: ratio.p,
            q: ratio.q,
        }),
        RotationNumber::Enclosure { enclosure, .. } => Ok((enclosure.mid(), enclosure.width())),
    }
}

/// The first `m` gaps, evaluated at the midpoint of an irrational-regime rotation enclosure.
pub fn gaps(params: &MapParams, rho: &RotationNumber, m: usize, tol: f64) -> Result<Vec<Gap>> {
    params.require_contracting()?;
    let (r, width) = irrational_midpoint(rho)?;
    let (a, b) = (params.a, params.b);
    (1..=m)
        .map(|i| {
            let left = phi_at_multiple(a, b, r, i as i64, true, tol)?;
            let right = phi_at_multiple(a, b, r, i as i64, false, tol)?;
            let x = (i as f64 * r).rem_euclid(1.0);
            Ok(Gap {
                index: i,
                x,
                left,
                right,
                expected_length: (1.0 - a) * a.powi(i as i32 - 1),
                endpoint_error: 0.5 * (left.width() + right.width()),
                rho_uncertainty: width,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SampleKind {
    Empirical,
    Pushforward,
}

/// A finite sample of an (approximate) invariant measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureSample {
    pub kind: SampleKind,
    pub points: Vec<f64>,
}

impl MeasureSample {
    pub fn mean(&self) -> f64 {
        self.points
            .iter()
            .copied()
            .collect::<CompensatedSum>()
            .value()
            / self.points.len() as f64
    }

    /// CSV with a header naming the kind and map parameters, then one value per line.
    pub fn write_csv<W: Write>(&self, params: &MapParams, mut w: W) -> io::Result<()> {
        let kind = match self.kind {
            SampleKind::Empirical => "empirical",
            SampleKind::Pushforward => "pushforward",
        };
        writeln!(w, "{kind}_a={:.16e}_b={:.16e}", params.a, params.b)?;
        for x in &self.points {
            writeln!(w, "{x:.16e}")?;
        }
        Ok(())
    }
}

/// First `n` orbit points as an empirical sample.
pub fn empirical_measure(
    params: &MapParams,
    x0: f64,
    n: usize,
    policy: BranchPolicy,
) -> Result<MeasureSample> {
    let mut it = OrbitIter::new(*params, x0, policy)?;
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        points.push(it.advance()?.x);
    }
    Ok(MeasureSample {
        kind: SampleKind::Empirical,
        points,
    })
}

/// Image of Lebesgue measure under `φ_ρ`, sampled at the midpoints `(k + ½)/m`.
pub fn pushforward_measure(
    params: &MapParams,
    rho: &RotationNumber,
    m: usize,
    tol: f64,
) -> Result<MeasureSample> {
    params.require_contracting()?;
    let (r, _) = irrational_midpoint(rho)?;
    let (a, b) = (params.a, params.b);
    let points = (0..m)
        .into_par_iter()
        .map(|k| {
            let x = (k as f64 + 0.5) / m as f64;
            phi_rho(a, b, r, x, tol).map(|e| e.mid().clamp(0.0, 1.0))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(MeasureSample {
        kind: SampleKind::Pushforward,
        points,
    })
}

/// Two-sample Kolmogorov-Smirnov distance.
pub fn ks_distance(x: &MeasureSample, y: &MeasureSample) -> f64 {
    let mut u = x.points.clone();
    let mut v = y.points.clone();
    u.sort_by(f64::total_cmp);
    v.sort_by(f64::total_cmp);
    let (nu, nv) = (u.len() as f64, v.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < u.len() && j < v.len() {
        let t = u[i].min(v[j]);
        while i < u.len() && u[i] <= t {
            i += 1;
        }
        while j < v.len() && v[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / nu - j as f64 / nv).abs());
    }
    d
}

/// Kolmogorov-Smirnov distance with horizontal slack `delta`: the smallest `ε` such that
/// `F_x(t - δ) - ε <= F_y(t) <= F_x(t + δ) + ε` for all `t`.
///
/// Atoms of the two samples that agree to within `delta` are treated as the same point, which
/// keeps the statistic stable when both measures are close to the same atomic measure.
pub fn ks_distance_with_slack(x: &MeasureSample, y: &MeasureSample, delta: f64) -> f64 {
    let mut u = x.points.clone();
    let mut v = y.points.clone();
    u.sort_by(f64::total_cmp);
    v.sort_by(f64::total_cmp);
    let cdf = |s: &[f64], t: f64| s.partition_point(|&z| z <= t) as f64 / s.len() as f64;
    let mut d: f64 = 0.0;
    for &t in u.iter().chain(v.iter()) {
        d = d
            .max(cdf(&v, t) - cdf(&u, t + delta))
            .max(cdf(&u, t - delta) - cdf(&v, t))
            .max(cdf(&u, t) - cdf(&v, t + delta))
            .max(cdf(&v, t - delta) - cdf(&u, t));
    }
    d
}
