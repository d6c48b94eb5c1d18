//! Limit seat shares of Thiele's method.
//!
//! The shares converge to the maximizers of `ψ(x) = Σ_σ v_σ log x_σ` over the simplex, where
//! `x_σ = Σ_{i∈σ} x_i`. The maximizer is found face by face: on the relative interior of a
//! face `S`, stationarity reads `∂_iψ = V` for `i ∈ S` with `V = Σ_σ v_σ`.

use std::io::{self, Write};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::election::{run, seat_shares, BallotProfile, Method, PartySet, TieBreak};
use crate::error::{Error, Result};
use crate::simplex::SimplexPoint;

/// Profiles with at most this many parties are solved by visiting every face.
pub const MAX_ENUMERATED_PARTIES: usize = 12;
/// Relative stationarity defect accepted for a solution.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Relative eigenvalue margin separating strict concavity from flat directions.
pub const HESSIAN_MARGIN: f64 = 1e-8;

const NEWTON_ITERS: usize = 100;
const WARM_START_ITERS: usize = 200;
const STALL_ITERS: usize = 12;
/// A face coordinate below this is treated as escaping to the face boundary.
const ESCAPE: f64 = 1e-11;

/// Whether the maximizer is a single point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Uniqueness {
    Unique,
    /// The maximizing set contains a segment along each of these orthonormal directions.
    FlatDirections(Vec<Vec<f64>>),
    /// Neither certificate applies at the numerical margins.
    Unknown,
}

/// A maximizer of `ψ` with diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitResult {
    pub point: SimplexPoint,
    /// Parties with positive share, increasing.
    pub support: Vec<usize>,
    pub objective: f64,
    /// `max_{i∈S} |∂_iψ - V|/V` together with any positive `∂*_jψ / V` off the support.
    pub residual: f64,
    pub unique: Uniqueness,
}

/// Positive-weight ballots as (members, weight).
fn active_ballots(v: &BallotProfile) -> Vec<(PartySet, f64)> {
    v.votes()
        .iter()
        .copied()
        .filter(|&(_, w)| w > 0.0)
        .collect()
}

fn set_share(s: PartySet, x: &[f64]) -> f64 {
    s.members().map(|i| x[i]).sum()
}

/// `ψ(x)`; `f64::NEG_INFINITY` when a ballot with votes has `x_σ = 0`.
pub fn objective(v: &BallotProfile, x: &SimplexPoint) -> f64 {
    let mut total = 0.0;
    for (s, w) in active_ballots(v) {
        let xs = set_share(s, &x.x);
        if xs <= 0.0 {
            return f64::NEG_INFINITY;
        }
        total += w * xs.ln();
    }
    total
}

/// `∂_iψ = Σ_{σ∋i} v_σ / x_σ`, with `+∞` where some `x_σ` vanishes.
pub fn gradient(v: &BallotProfile, x: &SimplexPoint) -> Vec<f64> {
    let mut g = vec![0.0; x.dim()];
    for (s, w) in active_ballots(v) {
        let xs = set_share(s, &x.x);
        let term = if xs > 0.0 { w / xs } else { f64::INFINITY };
        for i in s.members() {
            g[i] += term;
        }
    }
    g
}

/// `∂*_iψ = ∂_iψ - Σ_j x_j ∂_jψ`, the derivative towards vertex `i`.
pub fn directional_derivatives(v: &BallotProfile, x: &SimplexPoint) -> Vec<f64> {
    // Σ_j x_j ∂_jψ collapses to the votes of ballots with x_σ > 0.
    let mean: f64 = active_ballots(v)
        .iter()
        .filter(|(s, _)| set_share(*s, &x.x) > 0.0)
        .map(|(_, w)| w)
        .sum();
    gradient(v, x).into_iter().map(|g| g - mean).collect()
}

/// `ψ` restricted to a face, in face coordinates.
struct Face {
    members: Vec<usize>,
    /// Ballots as face-coordinate lists; every ballot meets the face.
    ballots: Vec<(Vec<usize>, f64)>,
    total: f64,
}

enum FaceOutcome {
    Stationary {
        y: Vec<f64>,
        residual: f64,
    },
    /// Newton drove this face coordinate to zero.
    Escaped(usize),
    Stalled,
}

impl Face {
    /// `None` when some ballot misses the face, where `ψ = -∞`.
    fn new(ballots: &[(PartySet, f64)], members: Vec<usize>) -> Option<Self> {
        let mut out = Vec::with_capacity(ballots.len());
        for &(s, w) in ballots {
            let local: Vec<usize> = members
                .iter()
                .enumerate()
                .filter(|(_, &m)| s.contains(m))
                .map(|(k, _)| k)
                .collect();
            if local.is_empty() {
                return None;
            }
            out.push((local, w));
        }
        let total = ballots.iter().map(|(_, w)| w).sum();
        Some(Self {
            members,
            ballots: out,
            total,
        })
    }

    fn value(&self, y: &[f64]) -> f64 {
        self.ballots
            .iter()
            .map(|(s, w)| w * s.iter().map(|&k| y[k]).sum::<f64>().ln())
            .sum()
    }

    fn grad(&self, y: &[f64]) -> DVector<f64> {
        let mut g = DVector::zeros(y.len());
        for (s, w) in &self.ballots {
            let d = w / s.iter().map(|&i| y[i]).sum::<f64>();
            s.iter().for_each(|&i| g[i] += d);
        }
        g
    }

    fn derivatives(&self, y: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let k = y.len();
        let mut g = DVector::zeros(k);
        let mut h = DMatrix::zeros(k, k);
        for (s, w) in &self.ballots {
            let ys: f64 = s.iter().map(|&i| y[i]).sum();
            let (d1, d2) = (w / ys, w / (ys * ys));
            for &i in s {
                g[i] += d1;
                for &j in s {
                    h[(i, j)] -= d2;
                }
            }
        }
        (g, h)
    }

    /// `diag(y) ∇ψ` and `diag(y) ∇²ψ diag(y)`, finite even for tiny coordinates.
    fn scaled_derivatives(&self, y: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let k = y.len();
        let mut g = DVector::zeros(k);
        let mut h = DMatrix::zeros(k, k);
        for (s, w) in &self.ballots {
            let ys: f64 = s.iter().map(|&i| y[i]).sum();
            for &i in s {
                let ri = y[i] / ys;
                g[i] += w * ri;
                for &j in s {
                    h[(i, j)] -= w * ri * (y[j] / ys);
                }
            }
        }
        (g, h)
    }

    fn residual(&self, g: &DVector<f64>) -> f64 {
        g.iter()
            .map(|gi| (gi - self.total).abs() / self.total)
            .fold(0.0, f64::max)
    }

    /// Newton on `∂_iψ = V` without renormalizing; a root sums to one by homogeneity.
    fn polish(&self, mut res: f64, mut y: Vec<f64>) -> (f64, Vec<f64>) {
        for _ in 0..8 {
            let (g, h) = self.derivatives(&y);
            let f = g.add_scalar(-self.total);
            if !h.iter().all(|c| c.is_finite()) {
                break;
            }
            let eps = 1e-14 * h.amax();
            let Some(Ok(step)) = h
                .try_svd(true, true, f64::EPSILON, 0)
                .map(|d| d.solve(&(-f), eps))
            else {
                break;
            };
            let trial: Vec<f64> = y.iter().zip(step.iter()).map(|(a, d)| a + d).collect();
            if trial.iter().any(|&c| c <= 0.0) {
                break;
            }
            let r = self.residual(&self.grad(&trial));
            if r >= res {
                break;
            }
            (res, y) = (r, trial);
        }
        (res, y)
    }

    /// Multiplicative ascent `y_i <- y_i ∂_iψ / V` restricted to the face.
    fn ascend(&self, y: &mut [f64], iters: usize) {
        let mut g = vec![0.0; y.len()];
        for _ in 0..iters {
            g.iter_mut().for_each(|c| *c = 0.0);
            for (s, w) in &self.ballots {
                let ys: f64 = s.iter().map(|&i| y[i]).sum();
                for &i in s {
                    g[i] += w / ys;
                }
            }
            y.iter_mut()
                .zip(&g)
                .for_each(|(c, gi)| *c *= gi / self.total);
            let sum: f64 = y.iter().sum();
            y.iter_mut().for_each(|c| *c /= sum);
        }
    }

    /// Damped Newton from the barycenter, retried after multiplicative ascent when early
    /// overshoots drive a coordinate to the boundary.
    fn solve(&self) -> FaceOutcome {
        let k = self.members.len();
        let y = vec![1.0 / k as f64; k];
        match self.newton(y.clone()) {
            FaceOutcome::Stationary { y, residual } => FaceOutcome::Stationary { y, residual },
            _ => {
                let mut y = y;
                self.ascend(&mut y, WARM_START_ITERS);
                self.newton(y)
            }
        }
    }

    fn newton(&self, mut y: Vec<f64>) -> FaceOutcome {
        let k = y.len();
        let low = (0..k)
            .min_by(|&a, &b| y[a].total_cmp(&y[b]))
            .expect("face is nonempty");
        if !(y[low] >= ESCAPE) {
            return FaceOutcome::Escaped(low);
        }
        // Rounding keeps the last iterates bouncing, so the best one is kept.
        let mut best = (f64::INFINITY, y.clone());
        let mut idle = 0;
        for _ in 0..NEWTON_ITERS {
            let g = self.grad(&y);
            let res = self.residual(&g);
            idle = if res < 0.5 * best.0 { 0 } else { idle + 1 };
            if res < best.0 {
                best = (res, y.clone());
            }
            if idle >= STALL_ITERS || (idle >= 3 && best.0 <= RESIDUAL_TOL) {
                break;
            }
            if res <= 1e-15 || k == 1 {
                return FaceOutcome::Stationary { y, residual: res };
            }
            let (gs, hs) = self.scaled_derivatives(&y);
            let dir = newton_direction(&y, &gs, &hs);
            // Near the optimum the gain in ψ drops below rounding, so a smaller residual also counts.
            let f0 = self.value(&y);
            // A single step may shrink a coordinate at most tenfold, so escapes are gradual.
            let mut t = y
                .iter()
                .zip(dir.iter())
                .filter(|(_, d)| **d < 0.0)
                .map(|(a, d)| -0.9 * a / d)
                .fold(1.0, f64::min);
            let mut moved = false;
            for _ in 0..40 {
                let mut trial: Vec<f64> =
                    y.iter().zip(dir.iter()).map(|(a, d)| a + t * d).collect();
                let s: f64 = trial.iter().sum();
                trial.iter_mut().for_each(|c| *c /= s);
                if self.value(&trial) >= f0 || self.residual(&self.grad(&trial)) < res {
                    y = trial;
                    moved = true;
                    break;
                }
                t *= 0.5;
            }
            if let Some((i, _)) = y
                .iter()
                .enumerate()
                .filter(|(_, &c)| c < ESCAPE)
                .min_by(|a, b| a.1.total_cmp(b.1))
            {
                return FaceOutcome::Escaped(i);
            }
            if !moved {
                break;
            }
        }
        let res = self.residual(&self.grad(&y));
        let (res, y) = if best.0 < res { best } else { (res, y) };
        let (res, y) = self.polish(res, y);
        if res <= RESIDUAL_TOL {
            FaceOutcome::Stationary { y, residual: res }
        } else {
            let i = (0..k)
                .min_by(|&a, &b| y[a].total_cmp(&y[b]))
                .expect("face is nonempty");
            if y[i] < 1e-6 {
                FaceOutcome::Escaped(i)
            } else {
                FaceOutcome::Stalled
            }
        }
    }
}

/// Maximizer of the quadratic model on `Σ d = 0`, falling back to the projected gradient.
///
/// Solved in the variables `d = diag(y) e`, which keeps the system bounded when
/// coordinates differ by many orders of magnitude.
fn newton_direction(y: &[f64], gs: &DVector<f64>, hs: &DMatrix<f64>) -> DVector<f64> {
    let k = gs.len();
    let yv = DVector::from_column_slice(y);
    let scale = hs.amax().max(f64::MIN_POSITIVE) / yv.amax();
    let mut m = DMatrix::zeros(k + 1, k + 1);
    m.view_mut((0, 0), (k, k)).copy_from(hs);
    for i in 0..k {
        m[(i, k)] = scale * y[i];
        m[(k, i)] = scale * y[i];
    }
    let mut rhs = DVector::zeros(k + 1);
    rhs.rows_mut(0, k).copy_from(&(-gs));
    let projected = gs - &yv * (yv.dot(gs) / yv.dot(&yv));
    let fallback = projected.component_mul(&yv);
    let eps = 1e-14 * m.amax();
    if !m.iter().all(|c| c.is_finite()) {
        return fallback;
    }
    let Some(svd) = m.try_svd(true, true, f64::EPSILON, 0) else {
        return fallback;
    };
    match svd.solve(&rhs, eps) {
        Ok(sol) => {
            let e: DVector<f64> = sol.rows(0, k).into_owned();
            if e.iter().all(|c| c.is_finite()) && e.dot(&projected) > 0.0 {
                e.component_mul(&yv)
            } else {
                fallback
            }
        }
        Err(_) => fallback,
    }
}

/// Orthonormal basis, in `n` coordinates, of the directions with zero sum supported on `members`.
fn tangent_basis(members: &[usize], n: usize) -> DMatrix<f64> {
    let k = members.len();
    let mut m = DMatrix::zeros(n, k - 1);
    let last = members[k - 1];
    for (c, &i) in members[..k - 1].iter().enumerate() {
        m[(i, c)] = 1.0;
        m[(last, c)] = -1.0;
    }
    m.qr().q()
}

fn full_hessian(ballots: &[(PartySet, f64)], x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let mut h = DMatrix::zeros(n, n);
    for &(s, w) in ballots {
        let xs = set_share(s, x);
        let d2 = w / (xs * xs);
        for i in s.members() {
            for j in s.members() {
                h[(i, j)] -= d2;
            }
        }
    }
    h
}

fn classify_uniqueness(ballots: &[(PartySet, f64)], x: &[f64], support: &[usize]) -> Uniqueness {
    let n = x.len();
    if n == 1 {
        return Uniqueness::Unique;
    }
    let h = full_hessian(ballots, x);
    let scale = (0..n)
        .map(|i| h[(i, i)].abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let all: Vec<usize> = (0..n).collect();
    let q = tangent_basis(&all, n);
    let reduced = q.transpose() * &h * &q;
    let eig = SymmetricEigen::new(reduced);
    if eig
        .eigenvalues
        .iter()
        .all(|&l| l <= -HESSIAN_MARGIN * scale)
    {
        return Uniqueness::Unique;
    }
    // Flat directions that stay inside the support face are feasible both ways.
    if support.len() < 2 {
        return Uniqueness::Unknown;
    }
    let qs = tangent_basis(support, n);
    let face = qs.transpose() * &h * &qs;
    let eig = SymmetricEigen::new(face);
    let flat: Vec<Vec<f64>> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l.abs() <= HESSIAN_MARGIN * scale)
        .map(|(c, _)| (&qs * eig.eigenvectors.column(c)).iter().copied().collect())
        .collect();
    if flat.is_empty() {
        Uniqueness::Unknown
    } else {
        Uniqueness::FlatDirections(flat)
    }
}

/// Candidate maximizer on one face.
struct Candidate {
    members: Vec<usize>,
    x: Vec<f64>,
    objective: f64,
    residual: f64,
}

fn lift(face: &Face, y: &[f64], n: usize) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for (k, &i) in face.members.iter().enumerate() {
        x[i] = y[k];
    }
    x
}

/// Off-support optimality defect `max_j max(0, ∂*_jψ)/V`.
fn boundary_defect(v: &BallotProfile, x: &[f64], members: &[usize]) -> f64 {
    let p = SimplexPoint { x: x.to_vec() };
    let total = v.total_weight();
    directional_derivatives(v, &p)
        .iter()
        .enumerate()
        .filter(|(j, _)| !members.contains(j))
        .map(|(_, d)| (d / total).max(0.0))
        .fold(0.0, f64::max)
}

fn members_of(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask >> i & 1 == 1).collect()
}

fn enumerate_faces(v: &BallotProfile, ballots: &[(PartySet, f64)]) -> Vec<Candidate> {
    let n = v.num_parties();
    (1u32..(1u32 << n))
        .into_par_iter()
        .filter_map(|mask| {
            let face = Face::new(ballots, members_of(mask, n))?;
            match face.solve() {
                FaceOutcome::Stationary { y, residual } => {
                    let x = lift(&face, &y, n);
                    let objective = face.value(&y);
                    Some(Candidate {
                        residual: residual.max(boundary_defect(v, &x, &face.members)),
                        members: face.members,
                        x,
                        objective,
                    })
                }
                _ => None,
            }
        })
        .collect()
}

/// Multiplicative ascent `x_i ← x_i ∂_iψ / V`, used to guess the support of large profiles.
fn multiplicative_ascent(v: &BallotProfile, iters: usize) -> Vec<f64> {
    let n = v.num_parties();
    let total = v.total_weight();
    let mut x = SimplexPoint::barycenter(n);
    for _ in 0..iters {
        let g = gradient(v, &x);
        x.x = x.x.iter().zip(&g).map(|(xi, gi)| xi * gi / total).collect();
        let s: f64 = x.x.iter().sum();
        x.x.iter_mut().for_each(|c| *c /= s);
    }
    x.x
}

fn active_set(v: &BallotProfile, ballots: &[(PartySet, f64)]) -> Vec<Candidate> {
    let n = v.num_parties();
    let guess = multiplicative_ascent(v, 2000);
    let mut members: Vec<usize> = (0..n).filter(|&i| guess[i] > 1e-6).collect();
    let total = v.total_weight();
    for _ in 0..4 * n {
        let Some(face) = Face::new(ballots, members.clone()) else {
            // Re-admit the party with the largest ascent share among those missing.
            let j = (0..n)
                .filter(|i| !members.contains(i))
                .max_by(|&a, &b| guess[a].total_cmp(&guess[b]));
            match j {
                Some(j) => {
                    members.push(j);
                    members.sort_unstable();
                    continue;
                }
                None => break,
            }
        };
        match face.solve() {
            FaceOutcome::Stationary { y, residual } => {
                let x = lift(&face, &y, n);
                let p = SimplexPoint { x: x.clone() };
                let dd = directional_derivatives(v, &p);
                let worst = (0..n)
                    .filter(|j| !members.contains(j))
                    .max_by(|&a, &b| dd[a].total_cmp(&dd[b]));
                match worst {
                    Some(j) if dd[j] / total > RESIDUAL_TOL => {
                        members.push(j);
                        members.sort_unstable();
                    }
                    _ => {
                        return vec![Candidate {
                            residual: residual.max(boundary_defect(v, &x, &members)),
                            objective: face.value(&y),
                            members,
                            x,
                        }]
                    }
                }
            }
            FaceOutcome::Escaped(k) => {
                members.remove(k);
            }
            FaceOutcome::Stalled => break,
        }
        if members.is_empty() {
            break;
        }
    }
    Vec::new()
}

/// Maximizes `ψ` over the simplex.
pub fn solve_limit(v: &BallotProfile) -> Result<LimitResult> {
    let ballots = active_ballots(v);
    let n = v.num_parties();
    let candidates = if n <= MAX_ENUMERATED_PARTIES {
        enumerate_faces(v, &ballots)
    } else {
        active_set(v, &ballots)
    };
    let best = candidates
        .iter()
        .filter(|c| c.residual <= RESIDUAL_TOL)
        .map(|c| c.objective)
        .fold(f64::NEG_INFINITY, f64::max);
    if best == f64::NEG_INFINITY {
        return Err(Error::NoStationaryPoint);
    }
    let slack = 1e-12 * best.abs().max(1.0);
    // Among equal maxima prefer the largest support, then the lexicographically first.
    let chosen = candidates
        .into_iter()
        .filter(|c| c.residual <= RESIDUAL_TOL && c.objective >= best - slack)
        .min_by(|a, b| {
            b.members
                .len()
                .cmp(&a.members.len())
                .then_with(|| a.members.cmp(&b.members))
        })
        .expect("best was attained");
    let unique = classify_uniqueness(&ballots, &chosen.x, &chosen.members);
    let point = SimplexPoint::normalized(chosen.x)?;
    Ok(LimitResult {
        objective: objective(v, &point),
        point,
        support: chosen.members,
        residual: chosen.residual,
        unique,
    })
}

/// One connected block of parties.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Block {
    pub parties: Vec<usize>,
    /// Share of all votes cast inside the block.
    pub weight: f64,
    /// Limit of the election restricted to the block, in block coordinates.
    pub limit: LimitResult,
}

/// Splits the parties into connected components of the ballots with votes and solves each.
pub fn block_decompose(v: &BallotProfile) -> Result<Vec<Block>> {
    let n = v.num_parties();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut c = i;
        while p[c] != r {
            let next = p[c];
            p[c] = r;
            c = next;
        }
        r
    }
    let ballots = active_ballots(v);
    for (s, _) in &ballots {
        let mut it = s.members();
        if let Some(first) = it.next() {
            for m in it {
                let (ra, rb) = (find(&mut parent, first), find(&mut parent, m));
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if root_of[r] == usize::MAX {
            root_of[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_of[r]].push(i);
    }
    let total = v.total_weight();
    groups
        .into_iter()
        .map(|parties| {
            let sub = v.restrict(&parties)?;
            Ok(Block {
                weight: sub.total_weight() / total,
                limit: solve_limit(&sub)?,
                parties,
            })
        })
        .collect()
}

/// Global limit `x_i = q_j x'_i` assembled from the blocks.
pub fn compose_blocks(blocks: &[Block], n: usize) -> Result<SimplexPoint> {
    let mut x = vec![0.0; n];
    for b in blocks {
        for (k, &i) in b.parties.iter().enumerate() {
            x[i] = b.weight * b.limit.point.x[k];
        }
    }
    SimplexPoint::normalized(x)
}

/// Simulated shares against the limit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationComparison {
    pub limit: LimitResult,
    pub shares: SimplexPoint,
    /// Euclidean distance to the limit point, with flat directions projected out.
    pub distance: f64,
}

pub fn compare_with_simulation(
    v: &BallotProfile,
    n_seats: usize,
    tiebreak: TieBreak,
) -> Result<SimulationComparison> {
    let limit = solve_limit(v)?;
    let seq = run(Method::Thiele, v, n_seats, tiebreak)?;
    let shares = seat_shares(&seq, n_seats)?;
    let mut r: Vec<f64> = shares
        .x
        .iter()
        .zip(&limit.point.x)
        .map(|(s, l)| s - l)
        .collect();
    if let Uniqueness::FlatDirections(basis) = &limit.unique {
        for u in basis {
            let c: f64 = r.iter().zip(u).map(|(a, b)| a * b).sum();
            r.iter_mut().zip(u).for_each(|(a, b)| *a -= c * b);
        }
    }
    let distance = r.iter().map(|c| c * c).sum::<f64>().sqrt();
    Ok(SimulationComparison {
        limit,
        shares,
        distance,
    })
}

/// Plain-text record of a limit, one `key: value` line per field.
pub fn write_limit_text<W: Write>(r: &LimitResult, parties: &[String], mut w: W) -> io::Result<()> {
    let join = |xs: &[f64]| {
        xs.iter()
            .map(|c| format!("{c:.16e}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    writeln!(w, "parties: {}", parties.join(" "))?;
    writeln!(w, "point: {}", join(&r.point.x))?;
    let names: Vec<&str> = r.support.iter().map(|&i| parties[i].as_str()).collect();
    writeln!(w, "support: {}", names.join(" "))?;
    writeln!(w, "objective: {:.16e}", r.objective)?;
    writeln!(w, "residual: {:.16e}", r.residual)?;
    match &r.unique {
        Uniqueness::Unique => writeln!(w, "uniqueness: unique")?,
        Uniqueness::Unknown => writeln!(w, "uniqueness: unknown")?,
        Uniqueness::FlatDirections(basis) => {
            writeln!(w, "uniqueness: flat {}", basis.len())?;
            for u in basis {
                writeln!(w, "flat_direction: {}", join(u))?;
            }
        }
    }
    Ok(())
}
