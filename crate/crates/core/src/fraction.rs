//! Reduced fractions in `[0, 1]` and Stern-Brocot enumeration.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};

/// A reduced fraction `p/q` with `q >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Fraction {
    pub p: u64,
    pub q: u64,
}

impl Fraction {
    pub const ZERO: Fraction = Fraction { p: 0, q: 1 };
    pub const ONE: Fraction = Fraction { p: 1, q: 1 };

    /// Builds `p/q` in lowest terms.
    pub fn new(p: u64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidFraction { p: p as i64, q: 0 });
        }
        let g = p.gcd(&q);
        Ok(Self { p: p / g, q: q / g })
    }

    /// Like [`Fraction::new`] but rejects non-reduced input.
    pub fn reduced(p: u64, q: u64) -> Result<Self> {
        if q == 0 || p.gcd(&q) != 1 {
            return Err(Error::InvalidFraction {
                p: p as i64,
                q: q as i64,
            });
        }
        Ok(Self { p, q })
    }

    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    pub fn mediant(&self, other: &Fraction) -> Fraction {
        Fraction {
            p: self.p + other.p,
            q: self.q + other.q,
        }
    }

    /// `self < other` by cross multiplication.
    pub fn lt(&self, other: &Fraction) -> bool {
        (self.p as u128) * (other.q as u128) < (other.p as u128) * (self.q as u128)
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for Fraction {
    type Err = Error;

    /// Accepts `p/q` or a bare integer.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("malformed fraction {s:?}"));
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s, "1"),
        };
        let p: u64 = p.parse().map_err(|_| bad())?;
        let q: u64 = q.parse().map_err(|_| bad())?;
        Fraction::new(p, q)
    }
}

/// All reduced fractions in `[0, 1)` with denominator at most `n`, in increasing order.
pub fn farey(n: u64) -> Vec<Fraction> {
    assert!(n >= 1);
    let mut out = Vec::new();
    let (mut a, mut b, mut c, mut d) = (0u64, 1u64, 1u64, n);
    out.push(Fraction { p: a, q: b });
    while c < d {
        let k = (n + b) / d;
        let (e, f) = (k * c - a, k * d - b);
        a = c;
        b = d;
        c = e;
        d = f;
        out.push(Fraction { p: a, q: b });
    }
    out
}

/// Fractions in `[lo, hi] ∩ [0, 1)` with denominator at most `q_max`, found by descending the
/// Stern-Brocot tree. Ordered by denominator, then value.
pub fn stern_brocot_between(lo: f64, hi: f64, q_max: u64) -> Vec<Fraction> {
    let mut out = Vec::new();
    if lo <= 0.0 && hi >= 0.0 {
        out.push(Fraction::ZERO);
    }
    let mut stack = vec![(Fraction::ZERO, Fraction::ONE)];
    while let Some((l, r)) = stack.pop() {
        let m = l.mediant(&r);
        if m.q > q_max {
            continue;
        }
        let v = m.value();
        if lo <= v && v <= hi {
            out.push(m);
        }
        if lo < v {
            stack.push((l, m));
        }
        if hi > v {
            stack.push((m, r));
        }
    }
    out.sort_by(|x, y| x.q.cmp(&y.q).then(x.value().total_cmp(&y.value())));
    out
}
