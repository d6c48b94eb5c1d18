//! The contractive interval map `f±(x) = {ax + b}`, its branches, lifts and orbits.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Default tolerance for deciding that an orbit point sits on the discontinuity.
pub const DEFAULT_TAU_EPS: f64 = 1e-12;

/// Slope and offset of `f±`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MapParams {
    pub a: f64,
    pub b: f64,
    /// Points within this distance of the discontinuity count as hitting it.
    pub tau_eps: f64,
    unit_slope: bool,
}

impl MapParams {
    /// Contracting map with `0 < a < 1`, `0 <= b < 1`.
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::InvalidSlope(a));
        }
        if !(0.0..1.0).contains(&b) {
            return Err(Error::InvalidOffset(b));
        }
        Ok(Self {
            a,
            b,
            tau_eps: DEFAULT_TAU_EPS,
            unit_slope: false,
        })
    }

    /// The circle rotation `{x + b}`. Only the two-party reduction needs this degenerate case.
    pub fn unit_slope(b: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&b) {
            return Err(Error::InvalidOffset(b));
        }
        Ok(Self {
            a: 1.0,
            b,
            tau_eps: DEFAULT_TAU_EPS,
            unit_slope: true,
        })
    }

    pub fn with_tau_eps(mut self, tau_eps: f64) -> Self {
        self.tau_eps = tau_eps;
        self
    }

    pub fn is_unit_slope(&self) -> bool {
        self.unit_slope
    }

    /// Errors unless the map is a strict contraction.
    pub fn require_contracting(&self) -> Result<()> {
        if self.unit_slope {
            Err(Error::InvalidSlope(self.a))
        } else {
            Ok(())
        }
    }

    /// The point of discontinuity in `[0, 1]`, if any.
    pub fn discontinuity(&self) -> Option<f64> {
        if self.b == 0.0 {
            Some(0.0)
        } else if self.a + self.b >= 1.0 {
            Some((1.0 - self.b) / self.a)
        } else {
            None
        }
    }

    /// Whether `ax + b` is (within tolerance) an integer, returning that integer.
    fn integer_image(&self, x: f64) -> Option<f64> {
        let y = self.a * x + self.b;
        let n = y.round();
        ((y - n).abs() <= self.a * self.tau_eps).then_some(n)
    }

    /// True when `x` is a visit to the discontinuity, where the two branches differ.
    pub fn at_discontinuity(&self, x: f64) -> bool {
        self.integer_image(x).is_some()
    }

    /// Right-continuous branch `f₋`, values in `[0, 1)`.
    pub fn step_lower(&self, x: f64) -> f64 {
        if self.integer_image(x).is_some() {
            return 0.0;
        }
        let y = self.a * x + self.b;
        y - y.floor()
    }

    /// Left-continuous branch `f₊`, values in `(0, 1]`.
    pub fn step_upper(&self, x: f64) -> f64 {
        if self.integer_image(x).is_some() {
            return 1.0;
        }
        self.step_lower(x)
    }

    pub fn step(&self, x: f64, branch: Branch) -> f64 {
        match branch {
            Branch::Lower => self.step_lower(x),
            Branch::Upper => self.step_upper(x),
        }
    }

    /// Lift of `f₋`: `a{x} + b + ⌊x⌋`.
    pub fn lift_lower(&self, x: f64) -> f64 {
        let fl = x.floor();
        self.a * (x - fl) + self.b + fl
    }

    /// Lift of `f₊`, the left limit of [`MapParams::lift_lower`].
    pub fn lift_upper(&self, x: f64) -> f64 {
        self.a * x + self.b - (1.0 - self.a) * (1.0 - x).floor()
    }

    /// The `x` with `y ∈ f±(x)`, when `y` lies in the image.
    pub fn inverse(&self, y: f64) -> Result<Option<f64>> {
        if self.a + self.b <= 1.0 {
            return Err(Error::InverseDomain);
        }
        if !(0.0..=1.0).contains(&y) {
            return Ok(None);
        }
        if y >= self.b {
            Ok(Some((y - self.b) / self.a))
        } else if y <= self.a + self.b - 1.0 {
            Ok(Some((y + 1.0 - self.b) / self.a))
        } else {
            Ok(None)
        }
    }

    /// Parameters of the map conjugate under `x ↦ 1 - x`; branches swap roles.
    pub fn reflect(&self) -> MapParams {
        let b = (-(self.a + self.b)).rem_euclid(1.0);
        MapParams { b, ..*self }
    }
}

/// Which branch an orbit takes at the discontinuity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    Lower,
    Upper,
}

/// Rule for choosing a branch at visits to the discontinuity.
#[derive(Debug, Clone, PartialEq)]
pub enum BranchPolicy {
    AlwaysLower,
    AlwaysUpper,
    /// Consumed one entry per visit; running out is an error.
    Scripted(Vec<Branch>),
    SeededRandom(u64),
}

/// Stateful branch chooser built from a [`BranchPolicy`].
#[derive(Debug, Clone)]
pub struct BranchChooser {
    policy: BranchPolicy,
    cursor: usize,
    rng: Option<ChaCha8Rng>,
}

impl BranchChooser {
    pub fn new(policy: BranchPolicy) -> Self {
        let rng = match policy {
            BranchPolicy::SeededRandom(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        Self {
            policy,
            cursor: 0,
            rng,
        }
    }

    /// Branch for the next visit; `step` is only used in the error.
    pub fn choose(&mut self, step: usize) -> Result<Branch> {
        match &self.policy {
            BranchPolicy::AlwaysLower => Ok(Branch::Lower),
            BranchPolicy::AlwaysUpper => Ok(Branch::Upper),
            BranchPolicy::Scripted(list) => {
                let b = list
                    .get(self.cursor)
                    .copied()
                    .ok_or(Error::BranchScriptExhausted { step })?;
                self.cursor += 1;
                Ok(b)
            }
            BranchPolicy::SeededRandom(_) => {
                let rng = self.rng.as_mut().expect("seeded policy owns an rng");
                Ok(if rng.gen::<bool>() {
                    Branch::Upper
                } else {
                    Branch::Lower
                })
            }
        }
    }
}

/// A finite trajectory `x_0, …, x_n` with its symbolic coding.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Orbit {
    pub points: Vec<f64>,
    /// `ε_i = a x_i + b - x_{i+1}`, one per step.
    pub symbols: Vec<i64>,
    /// Steps at which the orbit hit the discontinuity and the branch taken.
    pub choices_at_tau: Vec<(usize, Branch)>,
}

/// One step of an orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitStep {
    pub index: usize,
    pub x: f64,
    pub next: f64,
    pub symbol: i64,
    pub choice: Option<Branch>,
}

/// Lazily generated orbit, useful for long averages without storing points.
#[derive(Debug, Clone)]
pub struct OrbitIter {
    params: MapParams,
    x: f64,
    index: usize,
    chooser: BranchChooser,
}

impl OrbitIter {
    pub fn new(params: MapParams, x0: f64, policy: BranchPolicy) -> Result<Self> {
        if !(0.0..=1.0).contains(&x0) {
            return Err(Error::Domain {
                name: "x0",
                value: x0,
                reason: "must lie in [0, 1]",
            });
        }
        Ok(Self {
            params,
            x: x0,
            index: 0,
            chooser: BranchChooser::new(policy),
        })
    }

    pub fn current(&self) -> f64 {
        self.x
    }

    /// Advances one step.
    pub fn advance(&mut self) -> Result<OrbitStep> {
        let p = &self.params;
        let x = self.x;
        let (next, choice) = if p.at_discontinuity(x) {
            let branch = self.chooser.choose(self.index)?;
            (p.step(x, branch), Some(branch))
        } else {
            (p.step_lower(x), None)
        };
        let raw = p.a * x + p.b - next;
        let symbol = raw.round();
        assert!(
            (raw - symbol).abs() < 1e-9,
            "symbol {raw} is not near an integer"
        );
        let step = OrbitStep {
            index: self.index,
            x,
            next,
            symbol: symbol as i64,
            choice,
        };
        self.x = next;
        self.index += 1;
        Ok(step)
    }
}

/// `n` steps of the orbit of `x0`.
pub fn orbit(params: &MapParams, x0: f64, n: usize, policy: BranchPolicy) -> Result<Orbit> {
    let mut it = OrbitIter::new(*params, x0, policy)?;
    let mut points = Vec::with_capacity(n + 1);
    let mut symbols = Vec::with_capacity(n);
    let mut choices_at_tau = Vec::new();
    points.push(x0);
    for _ in 0..n {
        let s = it.advance()?;
        points.push(s.next);
        symbols.push(s.symbol);
        if let Some(c) = s.choice {
            choices_at_tau.push((s.index, c));
        }
    }
    Ok(Orbit {
        points,
        symbols,
        choices_at_tau,
    })
}
