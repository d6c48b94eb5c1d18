//! Rotation numbers: the series `b₋`, `b₊`, `ψ`, `φ_ρ` with rigorous truncation, certified
//! rational detection, plateaus, orbit averages and periodic orbits.

use rayon::prelude::*;
use serde::Serialize;

use crate::circle_map::{orbit, BranchPolicy, MapParams, Orbit, OrbitIter};
use crate::error::{Error, Result};
use crate::fraction::{farey, stern_brocot_between, Fraction};
use crate::numeric::{
    ceil_affine, ceil_mul, div_floor, floor_affine, floor_mul, one_minus_pow, CompensatedSum,
    Enclosure,
};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_Q_MAX: u64 = 64;

/// Series tolerance used internally by the rotation-number search.
const SEARCH_SERIES_TOL: f64 = 1e-15;

/// A rotation value fed to the series: an exact fraction or a float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rho {
    Ratio(Fraction),
    Real(f64),
}

impl From<Fraction> for Rho {
    fn from(f: Fraction) -> Self {
        Rho::Ratio(f)
    }
}

impl From<f64> for Rho {
    fn from(x: f64) -> Self {
        Rho::Real(x)
    }
}

impl Rho {
    pub fn value(&self) -> f64 {
        match self {
            Rho::Ratio(f) => f.value(),
            Rho::Real(x) => *x,
        }
    }
}

fn check_slope(a: f64) -> Result<()> {
    if a > 0.0 && a < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidSlope(a))
    }
}

fn check_rho(rho: &Rho) -> Result<()> {
    let v = rho.value();
    let ok = match rho {
        Rho::Ratio(f) => f.p <= f.q,
        Rho::Real(x) => (0.0..=1.0).contains(x),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "rho",
            value: v,
            reason: "must lie in [0, 1]",
        })
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "tol",
            value: tol,
            reason: "must be positive",
        })
    }
}

/// Smallest `m` with `a^m * bound(m) <= target`.
fn tail_index(a: f64, target: f64, bound: impl Fn(f64) -> f64) -> usize {
    let mut m = 1usize;
    let mut am = a;
    while am * bound(m as f64) > target {
        m += 1;
        am *= a;
    }
    m
}

/// `Σ_{j<m} a^j c(j+1)` with a running rounding-error estimate.
fn weighted_sum(a: f64, m: usize, c: impl Fn(i64) -> i64) -> (f64, f64) {
    let mut s = CompensatedSum::new();
    let mut err = 0.0;
    let mut aj = 1.0;
    for j in 0..m {
        let t = aj * c(j as i64 + 1) as f64;
        s.add(t);
        err += t.abs() * (j as f64 + 4.0);
        aj *= a;
    }
    let v = s.value();
    (v, (err + 2.0 * v.abs()) * f64::EPSILON)
}

/// Enclosure of the truncated series `(1-a)² Σ a^j c_j` plus `offset`, for integer
/// coefficients `0 <= c_j <= j + 2`.
fn staircase_series(a: f64, rho: f64, tol: f64, upper: bool) -> Enclosure {
    let w = 1.0 - a;
    let m = tail_index(a, tol / 2.0, |m| (m + 2.0) * w + a);
    let tail = a.powi(m as i32) * ((m as f64 + 2.0) * w + a);
    let (s, err) = if upper {
        weighted_sum(a, m, |k| floor_mul(k, rho))
    } else {
        weighted_sum(a, m, |k| ceil_mul(k, rho))
    };
    let offset = if upper { w } else { 0.0 };
    let v = offset + w * w * s;
    let slack = w * w * err + 2.0 * f64::EPSILON * v.abs();
    Enclosure::new(v - slack, v + tail + slack)
}

/// Closed form over one period for `ρ = p/q`: `Σ_{r=1}^{q} a^{r-1} c_r` where `c_{r+q} = c_r + p`.
fn periodic_series(a: f64, f: Fraction, upper: bool) -> Enclosure {
    let (p, q) = (f.p as i64, f.q as i64);
    let (s, err) = weighted_sum(a, q as usize, |r| {
        if upper {
            div_floor(r * p, q)
        } else {
            -div_floor(-r * p, q)
        }
    });
    let w = 1.0 - a;
    let d = one_minus_pow(a, f.q);
    let aq = a.powi(f.q as i32);
    let t1 = w * w * s / d;
    let t2 = p as f64 * w * aq / d;
    let offset = if upper { w } else { 0.0 };
    let v = offset + t1 + t2;
    let scale = (q as f64 + 8.0) * (offset + t1.abs() + t2.abs());
    let slack = w * w * err / d + 4.0 * scale * f64::EPSILON;
    Enclosure::around(v, slack)
}

/// `b₋(a, ρ) = (1-a)² Σ_{j≥0} a^j ⌈(j+1)ρ⌉`, the left end of the plateau of `ρ`.
pub fn b_lower(a: f64, rho: impl Into<Rho>, tol: f64) -> Result<Enclosure> {
    let rho = rho.into();
    check_slope(a)?;
    check_rho(&rho)?;
    check_tol(tol)?;
    Ok(match rho {
        Rho::Ratio(f) => periodic_series(a, f, false),
        Rho::Real(x) => staircase_series(a, x, tol, false),
    })
}

/// `b₊(a, ρ) = 1 - a + (1-a)² Σ_{j≥0} a^j ⌊(j+1)ρ⌋`, the right end of the plateau of `ρ`.
pub fn b_upper(a: f64, rho: impl Into<Rho>, tol: f64) -> Result<Enclosure> {
    let rho = rho.into();
    check_slope(a)?;
    check_rho(&rho)?;
    check_tol(tol)?;
    Ok(match rho {
        Rho::Ratio(f) => periodic_series(a, f, true),
        Rho::Real(x) => staircase_series(a, x, tol, true),
    })
}

/// `ψ(ρ) = (b - b₋(a, ρ)) / (1-a)`.
pub fn psi(a: f64, b: f64, rho: impl Into<Rho>, tol: f64) -> Result<Enclosure> {
    Ok(b_lower(a, rho, tol)?.reflect_sub(b, 1.0 - a))
}

/// `ψ(ρ+) = (b - b₊(a, ρ)) / (1-a)`.
pub fn psi_right(a: f64, b: f64, rho: impl Into<Rho>, tol: f64) -> Result<Enclosure> {
    Ok(b_upper(a, rho, tol)?.reflect_sub(b, 1.0 - a))
}

/// `φ_ρ(x) = b/(1-a) + (1-a) Σ_{j≥0} a^j ⌊x - (j+1)ρ⌋`.
pub fn phi_rho(a: f64, b: f64, rho: impl Into<Rho>, x: f64, tol: f64) -> Result<Enclosure> {
    let rho = rho.into();
    check_slope(a)?;
    check_rho(&rho)?;
    check_tol(tol)?;
    Ok(match rho {
        Rho::Ratio(f) => phi_rational(a, b, f, floor_mul(f.q as i64, x)),
        Rho::Real(r) => phi_real(a, b, tol, x.abs(), |k| floor_affine(x, k, r)),
    })
}

/// Left limit `φ_ρ(x-)`.
pub fn phi_rho_left(a: f64, b: f64, rho: f64, x: f64, tol: f64) -> Result<Enclosure> {
    check_slope(a)?;
    check_rho(&Rho::Real(rho))?;
    check_tol(tol)?;
    Ok(phi_real(a, b, tol, x.abs(), |k| ceil_affine(x, k, rho) - 1))
}

/// `φ_ρ` (or its left limit) at `x = frac(mρ)`, evaluated symbolically so the floor terms are exact.
pub fn phi_at_multiple(
    a: f64,
    b: f64,
    rho: f64,
    m: i64,
    left: bool,
    tol: f64,
) -> Result<Enclosure> {
    check_slope(a)?;
    check_rho(&Rho::Real(rho))?;
    check_tol(tol)?;
    let base = floor_mul(m, rho);
    Ok(phi_real(a, b, tol, 1.0, |k| {
        if left {
            ceil_mul(m - k, rho) - base - 1
        } else {
            floor_mul(m - k, rho) - base
        }
    }))
}

/// `φ_ρ(k/q)` at a rational rotation value, where the series has period `q`.
fn phi_rational(a: f64, b: f64, f: Fraction, k: i64) -> Enclosure {
    let (p, q) = (f.p as i64, f.q as i64);
    let w = 1.0 - a;
    let mut s = CompensatedSum::new();
    let mut err = 0.0;
    let mut ar = 1.0;
    for r in 0..q {
        let t = ar * div_floor(k - (r + 1) * p, q) as f64;
        s.add(t);
        err += t.abs() * (r as f64 + 4.0);
        ar *= a;
    }
    let d = one_minus_pow(a, f.q);
    let aq = a.powi(f.q as i32);
    let t0 = b / w;
    let t1 = w * s.value() / d;
    let t2 = p as f64 * aq / d;
    let v = t0 + t1 - t2;
    let scale = (q as f64 + 8.0) * (t0.abs() + t1.abs() + t2.abs());
    Enclosure::around(v, w * err * f64::EPSILON / d + 4.0 * scale * f64::EPSILON)
}

fn phi_real(a: f64, b: f64, tol: f64, xabs: f64, c: impl Fn(i64) -> i64) -> Enclosure {
    let w = 1.0 - a;
    let m = tail_index(a, tol / 2.0, |m| m + a / w + 2.0 + xabs);
    let tail = a.powi(m as i32) * (m as f64 + a / w + 2.0 + xabs);
    let (s, err) = weighted_sum(a, m, c);
    let t0 = b / w;
    let v = t0 + w * s;
    let slack = w * err + 4.0 * f64::EPSILON * (t0.abs() + (w * s).abs());
    Enclosure::around(v, tail + slack)
}

/// Where `b` sits inside the plateau of its rational rotation number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PlateauPosition {
    /// `b = b₋`: the periodic orbit contains 0.
    Lower,
    Interior,
    /// `b = b₊`: the periodic orbit contains 1.
    Upper,
}

/// Result of [`rotation_number`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum RotationNumber {
    /// Certified `b₋(a, p/q) <= b <= b₊(a, p/q)`.
    Rational {
        ratio: Fraction,
        position: PlateauPosition,
        /// `b` is within enclosure width of a plateau end, so `position` is a best guess.
        boundary_uncertain: bool,
    },
    /// No plateau with `q <= q_max` contains `b`; the rotation number lies in the interval.
    Enclosure {
        enclosure: Enclosure,
        /// The bracket could not be narrowed to the requested tolerance.
        ambiguous: bool,
    },
}

impl RotationNumber {
    pub fn as_rational(&self) -> Option<Fraction> {
        match self {
            RotationNumber::Rational { ratio, .. } => Some(*ratio),
            RotationNumber::Enclosure { .. } => None,
        }
    }

    /// The enclosure, exact for rationals.
    pub fn interval(&self) -> Enclosure {
        match self {
            RotationNumber::Rational { ratio, .. } => Enclosure::point(ratio.value()),
            RotationNumber::Enclosure { enclosure, .. } => *enclosure,
        }
    }

    pub fn midpoint(&self) -> f64 {
        self.interval().mid()
    }

    /// Whether the classification is reliable without caveats.
    pub fn is_certain(&self) -> bool {
        match self {
            RotationNumber::Rational {
                boundary_uncertain, ..
            } => !boundary_uncertain,
            RotationNumber::Enclosure { ambiguous, .. } => !ambiguous,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationOptions {
    pub q_max: u64,
    pub tol: f64,
}

impl Default for RotationOptions {
    fn default() -> Self {
        Self {
            q_max: DEFAULT_Q_MAX,
            tol: DEFAULT_TOL,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Below,
    Above,
    Unknown,
}

/// Compares `b₋(a, ρ)` with `b`.
fn side(a: f64, b: f64, rho: f64) -> Side {
    let e = staircase_series(a, rho, SEARCH_SERIES_TOL, false);
    if e.hi <= b {
        Side::Below
    } else if e.lo > b {
        Side::Above
    } else {
        Side::Unknown
    }
}

/// Tests `b` against the plateau of `f`.
fn plateau_membership(a: f64, b: f64, f: Fraction) -> Option<(PlateauPosition, bool)> {
    let lo = periodic_series(a, f, false);
    let hi = periodic_series(a, f, true);
    if b < lo.lo || b > hi.hi {
        return None;
    }
    if b <= lo.hi {
        return Some((PlateauPosition::Lower, !(lo.is_exact() && b == lo.lo)));
    }
    if b >= hi.lo {
        return Some((PlateauPosition::Upper, !(hi.is_exact() && b == hi.hi)));
    }
    Some((PlateauPosition::Interior, false))
}

/// Certified rotation number of `f±`.
///
/// Bisects on the sign of `ψ` (using that `b₋` is increasing), then tests every fraction with
/// denominator at most `q_max` inside the bracket against its plateau.
pub fn rotation_number(params: &MapParams, opts: RotationOptions) -> Result<RotationNumber> {
    params.require_contracting()?;
    check_tol(opts.tol)?;
    let (a, b) = (params.a, params.b);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut ambiguous = false;
    for _ in 0..200 {
        if hi - lo <= opts.tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        match side(a, b, mid) {
            Side::Below => lo = mid,
            Side::Above => hi = mid,
            Side::Unknown => {
                // Locate the two frontiers separately.
                let (mut l, mut u) = (lo, mid);
                for _ in 0..64 {
                    let m = 0.5 * (l + u);
                    if m <= l || m >= u {
                        break;
                    }
                    if side(a, b, m) == Side::Below {
                        l = m;
                    } else {
                        u = m;
                    }
                }
                let (mut l2, mut u2) = (mid, hi);
                for _ in 0..64 {
                    let m = 0.5 * (l2 + u2);
                    if m <= l2 || m >= u2 {
                        break;
                    }
                    if side(a, b, m) == Side::Above {
                        u2 = m;
                    } else {
                        l2 = m;
                    }
                }
                lo = l;
                hi = u2;
                ambiguous = hi - lo > opts.tol;
                break;
            }
        }
    }
    let slack = 4.0 * f64::EPSILON;
    for f in stern_brocot_between(lo - slack, hi + slack, opts.q_max) {
        if let Some((position, boundary_uncertain)) = plateau_membership(a, b, f) {
            return Ok(RotationNumber::Rational {
                ratio: f,
                position,
                boundary_uncertain,
            });
        }
    }
    Ok(RotationNumber::Enclosure {
        enclosure: Enclosure::new(lo, hi),
        ambiguous,
    })
}

/// Estimate from the lift, `F₋ⁿ(0)/n ± 1/n`, clipped to `[0, 1)`.
pub fn rotation_number_orbit_estimate(params: &MapParams, n: usize) -> Result<Enclosure> {
    if n == 0 {
        return Err(Error::Domain {
            name: "n",
            value: 0.0,
            reason: "must be at least 1",
        });
    }
    let mut it = OrbitIter::new(*params, 0.0, BranchPolicy::AlwaysLower)?;
    let mut wraps: i64 = 0;
    for _ in 0..n {
        wraps += it.advance()?.symbol;
    }
    let est = (wraps as f64 + it.current()) / n as f64;
    let r = 1.0 / n as f64;
    Ok(Enclosure::new((est - r).max(0.0), (est + r).min(1.0)))
}

fn check_fraction(p: u64, q: u64) -> Result<Fraction> {
    let f = Fraction::reduced(p, q)?;
    if f.p >= f.q {
        return Err(Error::InvalidFraction {
            p: p as i64,
            q: q as i64,
        });
    }
    Ok(f)
}

/// Enclosures of both ends of the plateau `[b₋(a, p/q), b₊(a, p/q)]`.
pub fn plateau(a: f64, p: u64, q: u64) -> Result<(Enclosure, Enclosure)> {
    check_slope(a)?;
    let f = check_fraction(p, q)?;
    Ok((periodic_series(a, f, false), periodic_series(a, f, true)))
}

/// Exact plateau length `a^{q-1}(1-a)²/(1-a^q)`.
pub fn plateau_length(a: f64, q: u64) -> f64 {
    let w = 1.0 - a;
    a.powi(q as i32 - 1) * w * w / one_minus_pow(a, q)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Plateau {
    pub ratio: Fraction,
    pub lower: Enclosure,
    pub upper: Enclosure,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlateauSweep {
    pub a: f64,
    pub q_max: u64,
    /// Sorted by rotation value.
    pub plateaus: Vec<Plateau>,
    pub total_length: f64,
    /// `1 - (q_max + 1/(1-a)) a^{q_max}`, a lower bound for the total length.
    pub tail_bound: f64,
}

/// All plateaus with denominator at most `q_max`.
pub fn plateau_sweep(a: f64, q_max: u64) -> Result<PlateauSweep> {
    check_slope(a)?;
    if q_max == 0 {
        return Err(Error::Domain {
            name: "q_max",
            value: 0.0,
            reason: "must be at least 1",
        });
    }
    let plateaus: Vec<Plateau> = farey(q_max)
        .into_par_iter()
        .map(|f| Plateau {
            ratio: f,
            lower: periodic_series(a, f, false),
            upper: periodic_series(a, f, true),
            length: plateau_length(a, f.q),
        })
        .collect();
    let total_length = plateaus
        .iter()
        .map(|p| p.length)
        .collect::<CompensatedSum>()
        .value();
    let tail_bound = 1.0 - (q_max as f64 + 1.0 / (1.0 - a)) * a.powi(q_max as i32);
    Ok(PlateauSweep {
        a,
        q_max,
        plateaus,
        total_length,
        tail_bound,
    })
}

/// `(1/n) Σ_{i<n} x_i` along an orbit.
pub fn orbit_mean(params: &MapParams, x0: f64, n: usize, policy: BranchPolicy) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain {
            name: "n",
            value: 0.0,
            reason: "must be at least 1",
        });
    }
    let mut it = OrbitIter::new(*params, x0, policy)?;
    let mut s = CompensatedSum::new();
    for _ in 0..n {
        s.add(it.advance()?.x);
    }
    Ok(s.value() / n as f64)
}

/// Centre of mass of the invariant measure, `(b - ρ)/(1-a)`.
pub fn chi(params: &MapParams, rho: f64) -> f64 {
    (params.b - rho) / (1.0 - params.a)
}

/// Mean symbol and `max_n |Σ_{i<n} ε_i - ρ n|` along `orbit`.
pub fn symbol_frequency_check(orbit: &Orbit, rho: f64) -> Result<(f64, f64)> {
    if orbit.points.len() < 2 {
        return Err(Error::Domain {
            name: "orbit length",
            value: orbit.points.len() as f64,
            reason: "need at least one step",
        });
    }
    let mut partial: i64 = 0;
    let mut max_dev: f64 = 0.0;
    for (i, e) in orbit.symbols.iter().enumerate() {
        partial += e;
        max_dev = max_dev.max((partial as f64 - rho * (i + 1) as f64).abs());
    }
    let mean = partial as f64 / orbit.symbols.len() as f64;
    Ok((mean, max_dev))
}

/// Which plateau end, if any, the offset sits at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundaryCase {
    /// `b = b₋`, `0 ∈ C`.
    LowerBoundary,
    Interior,
    /// `b = b₊`, `1 ∈ C`.
    UpperBoundary,
}

/// The periodic orbit `C = {φ_ρ(k/q)}` for a rational rotation number.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicOrbitInfo {
    /// Sorted, `q` entries.
    pub points: Vec<f64>,
    pub p: u64,
    pub q: u64,
    pub boundary_case: BoundaryCase,
    pub boundary_uncertain: bool,
    /// Largest `|f^q(c) - c|` over the orbit, from direct iteration.
    pub return_error: f64,
}

/// Periodic orbit of `f±`, or `None` when the rotation number is not certified rational.
pub fn periodic_orbit(params: &MapParams) -> Result<Option<PeriodicOrbitInfo>> {
    let rot = rotation_number(params, RotationOptions::default())?;
    periodic_orbit_for(params, &rot)
}

/// As [`periodic_orbit`] with a rotation number already in hand.
pub fn periodic_orbit_for(
    params: &MapParams,
    rot: &RotationNumber,
) -> Result<Option<PeriodicOrbitInfo>> {
    let RotationNumber::Rational {
        ratio,
        position,
        boundary_uncertain,
    } = *rot
    else {
        return Ok(None);
    };
    let (a, b) = (params.a, params.b);
    let q = ratio.q;
    let mut points: Vec<f64> = (0..q as i64)
        .map(|k| phi_rational(a, b, ratio, k).mid().clamp(0.0, 1.0))
        .collect();
    let boundary_case = match position {
        PlateauPosition::Lower => {
            points[0] = 0.0;
            BoundaryCase::LowerBoundary
        }
        PlateauPosition::Interior => BoundaryCase::Interior,
        PlateauPosition::Upper => {
            points[q as usize - 1] = 1.0;
            BoundaryCase::UpperBoundary
        }
    };
    let policy = if boundary_case == BoundaryCase::UpperBoundary {
        BranchPolicy::AlwaysUpper
    } else {
        BranchPolicy::AlwaysLower
    };
    let mut return_error: f64 = 0.0;
    for &c in &points {
        let o = orbit(params, c, q as usize, policy.clone())?;
        return_error = return_error.max((o.points[q as usize] - c).abs());
    }
    Ok(Some(PeriodicOrbitInfo {
        points,
        p: ratio.p,
        q,
        boundary_case,
        boundary_uncertain,
        return_error,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frac(p: u64, q: u64) -> Fraction {
        Fraction::new(p, q).unwrap()
    }

    #[test]
    fn b_lower_half() {
        for &a in &[0.2, 0.5, 0.8] {
            let e = b_lower(a, frac(1, 2), 1e-12).unwrap();
            assert!(e.contains(1.0 / (1.0 + a)) || (e.mid() - 1.0 / (1.0 + a)).abs() < 1e-15);
            let r = b_lower(a, 0.5, 1e-12).unwrap();
            assert!(r.lo - 1e-15 <= 1.0 / (1.0 + a) && 1.0 / (1.0 + a) <= r.hi + 1e-15);
            assert!(r.width() <= 1e-12);
        }
    }

    #[test]
    fn b_lower_endpoints() {
        assert_eq!(b_lower(0.3, Fraction::ZERO, 1e-12).unwrap().mid(), 0.0);
        assert!((b_lower(0.3, Fraction::ONE, 1e-12).unwrap().mid() - 1.0).abs() < 1e-15);
        assert!((b_lower(0.3, 1.0, 1e-12).unwrap().mid() - 1.0).abs() < 1e-12);
        assert!(b_lower(0.3, 0.0, 1e-12).unwrap().contains(0.0));
    }

    #[test]
    fn b_upper_examples() {
        assert!((b_upper(0.5, frac(1, 2), 1e-12).unwrap().mid() - 5.0 / 6.0).abs() < 1e-15);
        assert!((b_upper(0.3, Fraction::ZERO, 1e-12).unwrap().mid() - 0.7).abs() < 1e-15);
        let w = b_upper(0.5, frac(1, 3), 1e-12).unwrap().mid()
            - b_lower(0.5, frac(1, 3), 1e-12).unwrap().mid();
        assert!((w - 1.0 / 14.0).abs() < 1e-15);
    }

    #[test]
    fn psi_closed_forms() {
        let (a, b) = (0.4, 0.35);
        assert!(psi(a, b, 0.0, 1e-12).unwrap().contains(b / (1.0 - a)));
        let p1 = psi(a, b, 1.0, 1e-12).unwrap();
        assert!((p1.mid() + (1.0 - b) / (1.0 - a)).abs() < 1e-12);
        let p0 = psi_right(a, b, Fraction::ZERO, 1e-12).unwrap();
        assert!((p0.mid() - (a + b - 1.0) / (1.0 - a)).abs() < 1e-14);
    }

    #[test]
    fn phi_rational_matches_series() {
        let (a, b) = (0.6, 0.55);
        let f = frac(2, 5);
        for k in -3..8 {
            let x = k as f64 / 5.0 + 0.01;
            let exact = phi_rho(a, b, f, x, 1e-13).unwrap();
            let series = phi_rho(a, b, f.value(), x, 1e-13).unwrap();
            assert!((exact.mid() - series.mid()).abs() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn rotation_examples() {
        let opts = RotationOptions::default();
        let r = rotation_number(&MapParams::new(0.5, 0.7).unwrap(), opts).unwrap();
        assert_eq!(
            r,
            RotationNumber::Rational {
                ratio: frac(1, 2),
                position: PlateauPosition::Interior,
                boundary_uncertain: false
            }
        );
        let r = rotation_number(&MapParams::new(0.5, 0.3).unwrap(), opts).unwrap();
        assert_eq!(r.as_rational(), Some(Fraction::ZERO));
        let r = rotation_number(&MapParams::new(2.0 / 7.0, 13.0 / 21.0).unwrap(), opts).unwrap();
        assert_eq!(r.as_rational(), Some(Fraction::ZERO));
        let r = rotation_number(&MapParams::new(0.5, 0.55).unwrap(), opts).unwrap();
        assert_eq!(r.as_rational(), Some(frac(1, 4)));
    }

    #[test]
    fn rotation_boundaries_are_flagged() {
        let opts = RotationOptions::default();
        let r = rotation_number(&MapParams::new(0.5, 2.0 / 3.0).unwrap(), opts).unwrap();
        match r {
            RotationNumber::Rational {
                ratio, position, ..
            } => {
                assert_eq!(ratio, frac(1, 2));
                assert_eq!(position, PlateauPosition::Lower);
            }
            other => panic!("unexpected {other:?}"),
        }
        let r = rotation_number(&MapParams::new(0.5, 5.0 / 6.0).unwrap(), opts).unwrap();
        match r {
            RotationNumber::Rational {
                ratio, position, ..
            } => {
                assert_eq!(ratio, frac(1, 2));
                assert_eq!(position, PlateauPosition::Upper);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn orbit_estimate_examples() {
        let e = rotation_number_orbit_estimate(&MapParams::new(0.5, 2.0 / 3.0).unwrap(), 10_000)
            .unwrap();
        assert!(e.contains(0.5));
        let e = rotation_number_orbit_estimate(&MapParams::new(0.3, 0.2).unwrap(), 100).unwrap();
        assert!(e.contains(0.0));
    }

    #[test]
    fn plateau_examples() {
        let (l, u) = plateau(0.5, 1, 2).unwrap();
        assert!((l.mid() - 2.0 / 3.0).abs() < 1e-15 && (u.mid() - 5.0 / 6.0).abs() < 1e-15);
        let (l, u) = plateau(0.7, 0, 1).unwrap();
        assert_eq!(l.mid(), 0.0);
        assert!((u.mid() - 0.3).abs() < 1e-15);
        assert!((plateau_length(0.5, 3) - 1.0 / 14.0).abs() < 1e-16);
        assert!(plateau(0.5, 2, 4).is_err());
        assert!(plateau(0.5, 1, 1).is_err());
    }

    #[test]
    fn sweep_small() {
        let s = plateau_sweep(0.5, 1).unwrap();
        assert_eq!(s.plateaus.len(), 1);
        assert_eq!(s.total_length, 0.5);
        let s = plateau_sweep(0.5, 2).unwrap();
        assert_eq!(s.plateaus.len(), 2);
        assert!((s.plateaus[1].lower.mid() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn chi_and_mean() {
        let p = MapParams::new(0.5, 2.0 / 3.0).unwrap();
        assert!((chi(&p, 0.5) - 1.0 / 3.0).abs() < 1e-15);
        let m = orbit_mean(&p, 0.0, 1000, BranchPolicy::AlwaysLower).unwrap();
        assert!((m - 1.0 / 3.0).abs() < 1e-15);
        let p = MapParams::new(0.5, 0.2).unwrap();
        assert!((chi(&p, 0.0) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn periodic_orbit_examples() {
        let p = MapParams::new(0.5, 2.0 / 3.0).unwrap();
        let c = periodic_orbit(&p).unwrap().unwrap();
        assert_eq!(c.q, 2);
        assert_eq!(c.boundary_case, BoundaryCase::LowerBoundary);
        assert_eq!(c.points[0], 0.0);
        assert!((c.points[1] - 2.0 / 3.0).abs() < 1e-12);

        let p = MapParams::new(0.5, 0.75).unwrap();
        let c = periodic_orbit(&p).unwrap().unwrap();
        assert_eq!(c.boundary_case, BoundaryCase::Interior);
        assert!((c.points[0] - 1.0 / 6.0).abs() < 1e-12);
        assert!((c.points[1] - 5.0 / 6.0).abs() < 1e-12);
        assert!(c.return_error < 1e-9);

        let p = MapParams::new(0.5, 5.0 / 6.0).unwrap();
        let c = periodic_orbit(&p).unwrap().unwrap();
        assert_eq!(c.boundary_case, BoundaryCase::UpperBoundary);
        assert_eq!(c.points[1], 1.0);
        assert!(c.return_error < 1e-9);
    }
}
