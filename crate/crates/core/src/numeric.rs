//! Interval enclosures, error-free floor evaluation and compensated sums.

use serde::Serialize;

/// A closed interval `[lo, hi]` known to contain a quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Enclosure {
    pub lo: f64,
    pub hi: f64,
}

impl Enclosure {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "inverted enclosure [{lo}, {hi}]");
        Self { lo, hi }
    }

    pub fn point(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    /// `[v - r, v + r]`.
    pub fn around(v: f64, r: f64) -> Self {
        Self {
            lo: v - r,
            hi: v + r,
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    /// `self + c` for a constant `c`, with one ulp of outward slack.
    pub fn shift(&self, c: f64) -> Self {
        Self::new(next_down(self.lo + c), next_up(self.hi + c))
    }

    /// `c * self` with outward rounding slack.
    pub fn scale(&self, c: f64) -> Self {
        let (x, y) = (self.lo * c, self.hi * c);
        Self::new(next_down(x.min(y)), next_up(x.max(y)))
    }

    /// `(b - self) / d` for `d > 0`.
    pub fn reflect_sub(&self, b: f64, d: f64) -> Self {
        Self::new(next_down((b - self.hi) / d), next_up((b - self.lo) / d))
    }

    pub fn intersect(&self, lo: f64, hi: f64) -> Self {
        Self::new(self.lo.max(lo).min(hi), self.hi.min(hi).max(lo))
    }
}

fn next_up(x: f64) -> f64 {
    if x.is_nan() || x == f64::INFINITY {
        return x;
    }
    if x == 0.0 {
        return f64::from_bits(1);
    }
    let bits = x.to_bits();
    f64::from_bits(if x > 0.0 { bits + 1 } else { bits - 1 })
}

fn next_down(x: f64) -> f64 {
    -next_up(-x)
}

/// Error-free transformation: `s + e == a + b` exactly.
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// `floor(k * rho)` computed exactly.
pub fn floor_mul(k: i64, rho: f64) -> i64 {
    let kf = k as f64;
    let p = kf * rho;
    let e = kf.mul_add(rho, -p);
    let f = p.floor();
    if p == f && e < 0.0 {
        f as i64 - 1
    } else {
        f as i64
    }
}

/// `ceil(k * rho)` computed exactly.
pub fn ceil_mul(k: i64, rho: f64) -> i64 {
    -floor_mul(-k, rho)
}

/// `floor(x - k * rho)`, exact unless the true value is within ~1e-30 of an integer.
pub fn floor_affine(x: f64, k: i64, rho: f64) -> i64 {
    let kf = k as f64;
    let p = kf * rho;
    let e = kf.mul_add(rho, -p);
    let (s, es) = two_sum(x, -p);
    let t = es - e;
    let r = s + t;
    let f = r.floor();
    if r == f {
        let (u, ul) = two_sum(s, -f);
        if u + (ul + t) < 0.0 {
            return f as i64 - 1;
        }
    }
    f as i64
}

/// `ceil(x - k * rho)` with the same exactness as [`floor_affine`].
pub fn ceil_affine(x: f64, k: i64, rho: f64) -> i64 {
    // ceil(x - k rho) = -floor(-x + k rho)
    let kf = k as f64;
    let p = kf * rho;
    let e = kf.mul_add(rho, -p);
    let (s, es) = two_sum(-x, p);
    let t = es + e;
    let r = s + t;
    let f = r.floor();
    let fl = if r == f {
        let (u, ul) = two_sum(s, -f);
        if u + (ul + t) < 0.0 {
            f as i64 - 1
        } else {
            f as i64
        }
    } else {
        f as i64
    };
    -fl
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// `1 - a^n` without cancellation.
pub fn one_minus_pow(a: f64, n: u64) -> f64 {
    -((n as f64) * a.ln()).exp_m1()
}

/// Floor division for signed integers.
pub fn div_floor(n: i64, d: i64) -> i64 {
    num_integer::Integer::div_floor(&n, &d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_mul_is_exact_at_integers() {
        assert_eq!(floor_mul(3, 1.0 / 3.0), 0);
        assert_eq!(floor_mul(10, 0.1), 1);
        assert_eq!(floor_mul(-3, 1.0 / 3.0), -1);
        assert_eq!(ceil_mul(3, 1.0 / 3.0), 1);
        assert_eq!(ceil_mul(4, 0.5), 2);
        assert_eq!(floor_mul(4, 0.5), 2);
    }

    #[test]
    fn floor_mul_matches_rational_oracle() {
        // 1/3 as a double is slightly below 1/3, so 3 * rho < 1.
        let rho = 1.0_f64 / 3.0;
        assert!(
            num_rational::BigRational::from_float(rho).unwrap()
                < num_rational::BigRational::new(1.into(), 3.into())
        );
        assert_eq!(floor_mul(3, rho), 0);
        assert_eq!(ceil_mul(3, rho), 1);
    }

    #[test]
    fn affine_floors() {
        assert_eq!(floor_affine(0.5, 1, 0.5), 0);
        assert_eq!(ceil_affine(0.5, 1, 0.5), 0);
        assert_eq!(floor_affine(0.25, 1, 0.5), -1);
        assert_eq!(ceil_affine(0.25, 1, 0.5), 0);
        assert_eq!(floor_affine(0.0, 7, 0.75), -6);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let s: CompensatedSum = [1.0, 1e-16, 1e-16, -1.0].into_iter().collect();
        assert!((s.value() - 2e-16).abs() < 1e-30);
    }

    #[test]
    fn one_minus_pow_small_power() {
        assert!((one_minus_pow(0.5, 3) - 0.875).abs() < 1e-15);
    }
}
