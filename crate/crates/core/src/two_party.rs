//! Two-party Phragmén through the circle map.
//!
//! With vote shares `α` on A, `β` on B and `γ` on AB, and `α > β > 0`, the seat sequence
//! is an initial run `A^ℓ` followed by one block `B A^{1+b₀+ε}` per iterate of `f±`, where
//! `ε` is the orbit's symbol. The limit share of B is `1/(2 + b₀ + ρ)`.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::circle_map::{Branch, BranchChooser, BranchPolicy, MapParams};
use crate::election::{BallotProfile, Method, SeatSequence};
use crate::error::{Error, Result};
use crate::fraction::Fraction;
use crate::numeric::Enclosure;
use crate::rotation::{rotation_number, RotationNumber, RotationOptions};

const SUM_TOL: f64 = 1e-12;
/// Below this value of `1 - a` the rotation number is bracketed by `a + b - 1 <= ρ <= b`
/// instead of certified, since certification cost grows like `1/(1 - a)`.
pub const NEAR_UNIT_SLOPE: f64 = 1e-6;
/// Relative distance below which a derived quantity is treated as an integer.
const SNAP_TOL: f64 = 1e-12;

/// Vote shares of A only, B only and AB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoPartyVotes {
    pub alpha: f64,
    pub beta: f64,
    pub gamma_ab: f64,
}

impl TwoPartyVotes {
    pub fn new(alpha: f64, beta: f64, gamma_ab: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta), ("gamma_ab", gamma_ab)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Domain {
                    name,
                    value: v,
                    reason: "must be finite and nonnegative",
                });
            }
        }
        let s = alpha + beta + gamma_ab;
        if (s - 1.0).abs() > SUM_TOL {
            return Err(Error::Domain {
                name: "alpha + beta + gamma_ab",
                value: s,
                reason: "shares must sum to 1",
            });
        }
        Ok(Self {
            alpha,
            beta,
            gamma_ab,
        })
    }

    /// `γ = 1 - α - β`, snapped to 0 when within rounding of it.
    pub fn from_ab(alpha: f64, beta: f64) -> Result<Self> {
        let g = 1.0 - alpha - beta;
        Self::new(alpha, beta, if g.abs() <= SUM_TOL { 0.0 } else { g })
    }

    /// The same election with the party labels exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            alpha: self.beta,
            beta: self.alpha,
            gamma_ab: self.gamma_ab,
        }
    }

    /// Ballot profile with parties `A`, `B`.
    pub fn to_profile(&self) -> Result<BallotProfile> {
        BallotProfile::from_letters(&[("A", self.alpha), ("B", self.beta), ("AB", self.gamma_ab)])
    }
}

/// Parameters of the reduced map `w ↦ a w + b̃`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedMap {
    pub a: f64,
    pub b_raw: f64,
    /// Fractional part of `b_raw`.
    pub b: f64,
    pub b0: i64,
    /// Start of the `f±` orbit, `{α/β}`.
    pub w0: f64,
    /// Length of the initial run of A seats, `⌊α/β⌋`.
    pub ell: i64,
    /// `α/β` is an integer, so the last seat of the initial run is a tie.
    pub ratio_is_integer: bool,
}

impl ReducedMap {
    /// The circle map whose orbit codes the seat sequence.
    pub fn params(&self) -> Result<MapParams> {
        if self.a == 1.0 {
            MapParams::unit_slope(self.b)
        } else {
            MapParams::new(self.a, self.b)
        }
    }
}

/// `(⌊x⌋, {x}, snapped)` with values within relative `SNAP_TOL` of an integer snapped to it.
fn split_snapped(x: f64) -> (i64, f64, bool) {
    let r = x.round();
    if (x - r).abs() <= SNAP_TOL * x.abs().max(1.0) {
        (r as i64, 0.0, true)
    } else {
        let f = x.floor();
        (f as i64, x - f, false)
    }
}

/// Derives the reduced map. Requires `α > β > 0`.
pub fn derive_map(v: &TwoPartyVotes) -> Result<ReducedMap> {
    let (al, be) = (v.alpha, v.beta);
    if !(be > 0.0) {
        return Err(Error::Domain {
            name: "beta",
            value: be,
            reason: "must be positive",
        });
    }
    if !(al > be) {
        return Err(Error::Domain {
            name: "alpha",
            value: al,
            reason: "must exceed beta",
        });
    }
    let d = (1.0 - al) * (1.0 - be);
    let a = if v.gamma_ab == 0.0 { 1.0 } else { al * be / d };
    let b_raw = (al - be) / be + al * (1.0 - al - be) / d;
    let rhs = al / (be * (1.0 - be)) - 1.0;
    if (a + b_raw - rhs).abs() > 1e-12 * rhs.abs().max(1.0) {
        return Err(Error::Domain {
            name: "a + b_raw",
            value: a + b_raw,
            reason: "inconsistent with alpha / (beta (1 - beta)) - 1",
        });
    }
    let (b0, b, _) = split_snapped(b_raw);
    let (ell, w0, ratio_is_integer) = split_snapped(al / be);
    Ok(ReducedMap {
        a,
        b_raw,
        b,
        b0,
        w0,
        ell,
        ratio_is_integer,
    })
}

/// Which closed form produced a prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PbCase {
    /// One party has no votes of its own and receives nothing.
    AllToOne,
    /// Equal own votes: the seats alternate.
    Equal,
    /// No AB votes: the map is a rotation by `b`.
    Rotation,
    /// `0 < a < 1`.
    Contracting,
}

/// Limit share of party B.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PbPrediction {
    pub pb: Enclosure,
    /// Exact value of `pb` when the rotation number was certified rational.
    pub pb_ratio: Option<Fraction>,
    pub case: PbCase,
    /// Rotation number of the reduced map, for the rotation and contracting cases.
    pub rho: Option<RotationNumber>,
    pub b0: Option<i64>,
    /// The labels were exchanged to compute with `α >= β`.
    pub swapped: bool,
}

fn complement_ratio(f: Fraction) -> Fraction {
    Fraction::new(f.q - f.p, f.q).expect("complement of a fraction in [0, 1] is valid")
}

/// Limit share `p_B`, with the default rotation options.
pub fn predicted_pb(v: &TwoPartyVotes) -> Result<PbPrediction> {
    predicted_pb_with(v, RotationOptions::default())
}

pub fn predicted_pb_with(v: &TwoPartyVotes, opts: RotationOptions) -> Result<PbPrediction> {
    if v.alpha < v.beta {
        let mut p = predicted_pb_with(&v.swapped(), opts)?;
        p.pb = p.pb.reflect_sub(1.0, 1.0).intersect(0.0, 1.0);
        p.pb_ratio = p.pb_ratio.map(complement_ratio);
        p.swapped = true;
        return Ok(p);
    }
    let plain = |pb: Enclosure, pb_ratio, case| PbPrediction {
        pb,
        pb_ratio,
        case,
        rho: None,
        b0: None,
        swapped: false,
    };
    if v.alpha == 0.0 {
        return Err(Error::Indeterminate(
            "with only AB votes every seat is a tie between A and B",
        ));
    }
    if v.beta == 0.0 {
        return Ok(plain(
            Enclosure::point(0.0),
            Some(Fraction::ZERO),
            PbCase::AllToOne,
        ));
    }
    if v.alpha == v.beta {
        let half = Fraction::new(1, 2)?;
        return Ok(plain(Enclosure::point(0.5), Some(half), PbCase::Equal));
    }
    let m = derive_map(v)?;
    let base = 2.0 + m.b0 as f64;
    if v.gamma_ab == 0.0 {
        let rho = Enclosure::point(m.b);
        return Ok(PbPrediction {
            pb: Enclosure::point(1.0 / (base + m.b)),
            pb_ratio: None,
            case: PbCase::Rotation,
            rho: Some(RotationNumber::Enclosure {
                enclosure: rho,
                ambiguous: false,
            }),
            b0: Some(m.b0),
            swapped: false,
        });
    }
    let rot = if 1.0 - m.a < NEAR_UNIT_SLOPE {
        let enclosure = Enclosure::new((m.a + m.b - 1.0).max(0.0), m.b);
        RotationNumber::Enclosure {
            enclosure,
            ambiguous: enclosure.width() > opts.tol,
        }
    } else {
        rotation_number(&m.params()?, opts)?
    };
    let (pb, pb_ratio) = match rot {
        RotationNumber::Rational { ratio, .. } => {
            let (p, q) = (ratio.p, ratio.q);
            let den = (m.b0 as u64 + 2) * q + p;
            let f = Fraction::new(q, den)?;
            (Enclosure::point(f.value()), Some(f))
        }
        RotationNumber::Enclosure { enclosure, .. } => (
            Enclosure::new(1.0 / (base + enclosure.hi), 1.0 / (base + enclosure.lo)),
            None,
        ),
    };
    Ok(PbPrediction {
        pb,
        pb_ratio,
        case: PbCase::Contracting,
        rho: Some(rot),
        b0: Some(m.b0),
        swapped: false,
    })
}

/// Seat sequence read off the `f±` orbit. Requires `α > β > 0`.
///
/// The policy resolves every tie between A and B: `Lower` gives the seat to A. The
/// returned sequence carries no scores, and its tie flags mark the seats decided by the
/// policy.
pub fn predicted_seats(
    v: &TwoPartyVotes,
    n_seats: usize,
    policy: BranchPolicy,
) -> Result<SeatSequence> {
    let m = derive_map(v)?;
    let params = m.params()?;
    let mut chooser = BranchChooser::new(policy);
    let mut winners = Vec::with_capacity(n_seats);
    let mut ties = Vec::with_capacity(n_seats);
    let (mut run, mut w) = (m.ell as usize, m.w0);
    // At an integer ratio the seat after the first ℓ - 1 A seats is a tie.
    let mut first_tie = None;
    if m.ratio_is_integer {
        first_tie = Some(chooser.choose(0)?);
        if first_tie == Some(Branch::Upper) {
            run -= 1;
            w = 1.0;
        }
    }
    for k in 0..run.min(n_seats) {
        winners.push(0);
        ties.push(first_tie == Some(Branch::Lower) && k + 1 == run);
    }
    if run < n_seats {
        winners.push(1);
        ties.push(first_tie == Some(Branch::Upper));
    }
    let mut step = 1;
    while winners.len() < n_seats {
        let (next, tied) = if params.at_discontinuity(w) {
            (params.step(w, chooser.choose(step)?), true)
        } else {
            (params.step_lower(w), false)
        };
        let eps = (params.a * w + params.b - next).round() as i64;
        let k = 1 + m.b0 + eps;
        for j in 0..k {
            if winners.len() == n_seats {
                break;
            }
            winners.push(0);
            // The tie is between the last A of the block and the next B.
            ties.push(tied && j + 1 == k);
        }
        if winners.len() < n_seats {
            winners.push(1);
            ties.push(false);
        }
        w = next;
        step += 1;
    }
    Ok(SeatSequence {
        method: Method::PhragmenPower,
        parties: vec!["A".into(), "B".into()],
        winners,
        scores: Vec::new(),
        tie_flags: ties,
    })
}

/// Limit shares with a closed-form region test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PbTarget {
    Half,
    Third,
}

/// Whether `p_B` equals the target, by polynomial inequalities in `α, β`.
pub fn region_pb(v: &TwoPartyVotes, target: PbTarget) -> bool {
    let (al, be) = (v.alpha, v.beta);
    match target {
        PbTarget::Half => {
            !(al == 0.0 && be == 0.0) && al <= 2.0 * be * (1.0 - be) && be <= 2.0 * al * (1.0 - al)
        }
        PbTarget::Third => {
            al >= be
                && be > 0.0
                && al - 2.0 * be - al * al + 2.0 * al * be + 2.0 * be * be - 3.0 * al * be * be
                    >= 0.0
                && al <= 3.0 * be * (1.0 - be)
        }
    }
}

/// One cell of a staircase table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StaircaseRow {
    pub alpha: f64,
    pub beta: f64,
    /// `None` where the limit is indeterminate (no own votes at all).
    pub prediction: Option<PbPrediction>,
}

impl StaircaseRow {
    pub fn rho_kind(&self) -> &'static str {
        match &self.prediction {
            None => "indeterminate",
            Some(p) => match (p.case, &p.rho) {
                (PbCase::AllToOne, _) | (PbCase::Equal, _) => "special",
                (PbCase::Rotation, _) => "rotation",
                (_, Some(RotationNumber::Rational { .. })) => "rational",
                _ => "enclosure",
            },
        }
    }

    /// Denominator of the rotation number when it is rational.
    pub fn q(&self) -> Option<u64> {
        self.prediction
            .as_ref()
            .and_then(|p| p.rho)
            .and_then(|r| r.as_rational())
            .map(|f| f.q)
    }
}

/// `p_B` over all grid points `(α, β)` with `α + β <= 1`, rows sorted by `(α, β)`.
pub fn staircase(
    alphas: &[f64],
    betas: &[f64],
    opts: RotationOptions,
) -> Result<Vec<StaircaseRow>> {
    let mut cells: Vec<(f64, f64)> = alphas
        .iter()
        .flat_map(|&a| betas.iter().map(move |&b| (a, b)))
        .filter(|&(a, b)| a >= 0.0 && b >= 0.0 && a + b <= 1.0 + SUM_TOL)
        .collect();
    cells.sort_by(|x, y| x.partial_cmp(y).expect("grid values are finite"));
    cells.dedup();
    cells
        .par_iter()
        .map(|&(alpha, beta)| {
            let v = TwoPartyVotes::from_ab(alpha, beta)?;
            let prediction = match predicted_pb_with(&v, opts) {
                Ok(p) => Some(p),
                Err(Error::Indeterminate(_)) => None,
                Err(e) => return Err(e),
            };
            Ok(StaircaseRow {
                alpha,
                beta,
                prediction,
            })
        })
        .collect()
}

/// CSV with columns `alpha, beta, pB_lo, pB_hi, rho_kind, q`.
pub fn write_staircase_csv<W: Write>(rows: &[StaircaseRow], mut w: W) -> io::Result<()> {
    writeln!(w, "alpha,beta,pB_lo,pB_hi,rho_kind,q")?;
    for r in rows {
        let (lo, hi) = r
            .prediction
            .map_or((f64::NAN, f64::NAN), |p| (p.pb.lo, p.pb.hi));
        let q = r.q().map(|q| q.to_string()).unwrap_or_default();
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
            r.alpha,
            r.beta,
            lo,
            hi,
            r.rho_kind(),
            q
        )?;
    }
    Ok(())
}
