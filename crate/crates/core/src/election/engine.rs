use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::profile::BallotProfile;
use crate::error::{Error, Result};
use crate::simplex::SimplexPoint;

/// Scores within this relative distance of the best are ties.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// How ties between equally placed parties are resolved.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    LowestIndex,
    /// Uniform choice among the tied parties, from a ChaCha8 stream.
    SeededLot(u64),
    /// One party index per tie, in order; running out or naming an untied party is an error.
    Scripted(Vec<usize>),
}

/// Stateful tie resolver.
#[derive(Debug, Clone)]
pub struct TieBreaker {
    rule: TieBreak,
    cursor: usize,
    rng: Option<ChaCha8Rng>,
}

impl TieBreaker {
    pub fn new(rule: TieBreak) -> Self {
        let rng = match rule {
            TieBreak::SeededLot(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        Self {
            rule,
            cursor: 0,
            rng,
        }
    }

    /// Picks one of `tied` (sorted, nonempty).
    pub fn choose(&mut self, tied: &[usize], seat: usize) -> Result<usize> {
        if tied.len() == 1 {
            return Ok(tied[0]);
        }
        match &self.rule {
            TieBreak::LowestIndex => Ok(tied[0]),
            TieBreak::SeededLot(_) => {
                let rng = self.rng.as_mut().expect("lot owns an rng");
                Ok(tied[rng.gen_range(0..tied.len())])
            }
            TieBreak::Scripted(list) => {
                let &choice = list
                    .get(self.cursor)
                    .ok_or(Error::TieScriptExhausted { seat })?;
                self.cursor += 1;
                if tied.contains(&choice) {
                    Ok(choice)
                } else {
                    Err(Error::TieScriptInvalid { seat, choice })
                }
            }
        }
    }
}

/// Outcome of one seat allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub winner: usize,
    /// `Δ_i` for the voting-power form, `W_i` otherwise.
    pub scores: Vec<f64>,
    pub tie: bool,
}

fn select(
    scores: &[f64],
    minimize: bool,
    tb: &mut TieBreaker,
    seat: usize,
) -> Result<(usize, bool)> {
    let best = scores.iter().copied().fold(
        if minimize {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        },
        |m, s| {
            if minimize {
                m.min(s)
            } else {
                m.max(s)
            }
        },
    );
    let thresh = TIE_TOLERANCE * best.abs().max(f64::MIN_POSITIVE);
    let tied: Vec<usize> = (0..scores.len())
        .filter(|&i| (scores[i] - best).abs() <= thresh)
        .collect();
    let winner = tb.choose(&tied, seat)?;
    Ok((winner, tied.len() > 1))
}

/// Voting-power state: free power `x_σ` per ballot type.
#[derive(Debug, Clone, PartialEq)]
pub struct PhragmenPowerState {
    pub free_power: Vec<f64>,
    pub seats: Vec<u64>,
}

impl PhragmenPowerState {
    pub fn new(profile: &BallotProfile) -> Self {
        Self {
            free_power: vec![0.0; profile.votes().len()],
            seats: vec![0; profile.num_parties()],
        }
    }

    /// `V_i = Σ_{σ∋i} v_σ x_σ`.
    pub fn used_power(&self, profile: &BallotProfile) -> Vec<f64> {
        let mut v = vec![0.0; profile.num_parties()];
        for ((s, w), x) in profile.votes().iter().zip(&self.free_power) {
            for i in s.members() {
                v[i] += w * x;
            }
        }
        v
    }

    fn seat_count(&self) -> usize {
        self.seats.iter().sum::<u64>() as usize
    }
}

/// One seat by the voting-power formulation: `Δ_i = (1 - V_i)/W̄_i`, smallest wins.
pub fn phragmen_step_power(
    profile: &BallotProfile,
    state: &mut PhragmenPowerState,
    tb: &mut TieBreaker,
) -> Result<Step> {
    let used = state.used_power(profile);
    if let Some((party, &value)) = used
        .iter()
        .enumerate()
        .find(|(_, &v)| v > 1.0 + TIE_TOLERANCE)
    {
        return Err(Error::StateOutsideK { party, value });
    }
    let scores: Vec<f64> = (0..profile.num_parties())
        .map(|i| (1.0 - used[i]).max(0.0) / profile.party_weight(i))
        .collect();
    let (winner, tie) = select(&scores, true, tb, state.seat_count())?;
    let dt = scores[winner];
    for ((s, _), x) in profile.votes().iter().zip(state.free_power.iter_mut()) {
        if s.contains(winner) {
            *x = 0.0;
        } else {
            *x += dt;
        }
    }
    state.seats[winner] += 1;
    Ok(Step {
        winner,
        scores,
        tie,
    })
}

/// Reduced-vote state: place number `q_σ` per ballot type.
#[derive(Debug, Clone, PartialEq)]
pub struct PhragmenReducedState {
    pub place_numbers: Vec<f64>,
    pub seats: Vec<u64>,
}

impl PhragmenReducedState {
    pub fn new(profile: &BallotProfile) -> Self {
        Self {
            place_numbers: vec![0.0; profile.votes().len()],
            seats: vec![0; profile.num_parties()],
        }
    }
}

/// One seat by the reduced-vote formulation: `W_i = W̄_i / (1 + Σ_{σ∋i} q_σ)`, largest wins.
pub fn phragmen_step_reduced(
    profile: &BallotProfile,
    state: &mut PhragmenReducedState,
    tb: &mut TieBreaker,
) -> Result<Step> {
    let n = profile.num_parties();
    let mut load = vec![0.0; n];
    for ((s, _), q) in profile.votes().iter().zip(&state.place_numbers) {
        for i in s.members() {
            load[i] += q;
        }
    }
    let scores: Vec<f64> = (0..n)
        .map(|i| profile.party_weight(i) / (1.0 + load[i]))
        .collect();
    let seat = state.seats.iter().sum::<u64>() as usize;
    let (winner, tie) = select(&scores, false, tb, seat)?;
    let w = scores[winner];
    for ((s, v), q) in profile.votes().iter().zip(state.place_numbers.iter_mut()) {
        if s.contains(winner) {
            *q = v / w;
        }
    }
    state.seats[winner] += 1;
    Ok(Step {
        winner,
        scores,
        tie,
    })
}

/// Thiele state: seats `n_σ` held by the parties of each ballot type.
#[derive(Debug, Clone, PartialEq)]
pub struct ThieleState {
    pub counts: Vec<u64>,
    pub seats: Vec<u64>,
}

impl ThieleState {
    pub fn new(profile: &BallotProfile) -> Self {
        Self {
            counts: vec![0; profile.votes().len()],
            seats: vec![0; profile.num_parties()],
        }
    }
}

/// One seat by Thiele's method: `W_i = Σ_{σ∋i} v_σ/(1 + n_σ)`, largest wins.
pub fn thiele_step(
    profile: &BallotProfile,
    state: &mut ThieleState,
    tb: &mut TieBreaker,
) -> Result<Step> {
    let mut scores = vec![0.0; profile.num_parties()];
    for ((s, v), &c) in profile.votes().iter().zip(&state.counts) {
        let r = v / (1.0 + c as f64);
        for i in s.members() {
            scores[i] += r;
        }
    }
    let seat = state.seats.iter().sum::<u64>() as usize;
    let (winner, tie) = select(&scores, false, tb, seat)?;
    for ((s, _), c) in profile.votes().iter().zip(state.counts.iter_mut()) {
        if s.contains(winner) {
            *c += 1;
        }
    }
    state.seats[winner] += 1;
    Ok(Step {
        winner,
        scores,
        tie,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    PhragmenPower,
    PhragmenReduced,
    Thiele,
}

/// Full record of an election run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeatSequence {
    pub method: Method,
    pub parties: Vec<String>,
    pub winners: Vec<usize>,
    /// Row-major, one row of `parties.len()` scores per seat.
    pub scores: Vec<f64>,
    pub tie_flags: Vec<bool>,
}

impl SeatSequence {
    pub fn len(&self) -> usize {
        self.winners.len()
    }

    pub fn is_empty(&self) -> bool {
        self.winners.is_empty()
    }

    /// Empty when the sequence was not produced by a scoring run.
    pub fn scores_at(&self, step: usize) -> &[f64] {
        let n = self.parties.len();
        self.scores.get(step * n..(step + 1) * n).unwrap_or(&[])
    }

    pub fn any_tie(&self) -> bool {
        self.tie_flags.iter().any(|&t| t)
    }

    /// Seat counts per party after the first `n` seats.
    pub fn counts(&self, n: usize) -> Vec<u64> {
        let mut c = vec![0; self.parties.len()];
        for &w in &self.winners[..n] {
            c[w] += 1;
        }
        c
    }

    /// Winners as party names concatenated, handy for single-letter parties.
    pub fn winner_string(&self) -> String {
        self.winners
            .iter()
            .map(|&w| self.parties[w].as_str())
            .collect()
    }

    /// CSV with columns `step, winner, tie_flag, score_1..score_N`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(w, "step,winner,tie_flag")?;
        for i in 1..=self.parties.len() {
            write!(w, ",score_{i}")?;
        }
        writeln!(w)?;
        for (k, &win) in self.winners.iter().enumerate() {
            write!(w, "{},{},{}", k + 1, self.parties[win], self.tie_flags[k])?;
            for s in self.scores_at(k) {
                write!(w, ",{s:.16e}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Allocates `n_seats` seats one at a time.
pub fn run(
    method: Method,
    profile: &BallotProfile,
    n_seats: usize,
    tiebreak: TieBreak,
) -> Result<SeatSequence> {
    if n_seats == 0 {
        return Err(Error::Domain {
            name: "seats",
            value: 0.0,
            reason: "must be at least 1",
        });
    }
    let mut tb = TieBreaker::new(tiebreak);
    let n = profile.num_parties();
    let mut seq = SeatSequence {
        method,
        parties: profile.parties().to_vec(),
        winners: Vec::with_capacity(n_seats),
        scores: Vec::with_capacity(n_seats * n),
        tie_flags: Vec::with_capacity(n_seats),
    };
    let mut push = |s: Step| {
        seq.winners.push(s.winner);
        seq.scores.extend_from_slice(&s.scores);
        seq.tie_flags.push(s.tie);
    };
    match method {
        Method::PhragmenPower => {
            let mut st = PhragmenPowerState::new(profile);
            for _ in 0..n_seats {
                push(phragmen_step_power(profile, &mut st, &mut tb)?);
            }
        }
        Method::PhragmenReduced => {
            let mut st = PhragmenReducedState::new(profile);
            for _ in 0..n_seats {
                push(phragmen_step_reduced(profile, &mut st, &mut tb)?);
            }
        }
        Method::Thiele => {
            let mut st = ThieleState::new(profile);
            for _ in 0..n_seats {
                push(thiele_step(profile, &mut st, &mut tb)?);
            }
        }
    }
    Ok(seq)
}

/// Share vector `n_i / n` after the first `n` seats.
pub fn seat_shares(seq: &SeatSequence, n: usize) -> Result<SimplexPoint> {
    if n == 0 || n > seq.len() {
        return Err(Error::Domain {
            name: "n",
            value: n as f64,
            reason: "must be between 1 and the sequence length",
        });
    }
    let c = seq.counts(n);
    SimplexPoint::normalized(c.into_iter().map(|x| x as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_party(a: f64, b: f64, ab: f64) -> BallotProfile {
        BallotProfile::from_letters(&[("A", a), ("B", b), ("AB", ab)]).unwrap()
    }

    #[test]
    fn first_seat_goes_to_largest_support() {
        let p = BallotProfile::from_letters(&[("A", 3.0), ("B", 2.0), ("BC", 2.0)]).unwrap();
        let mut st = PhragmenPowerState::new(&p);
        let mut tb = TieBreaker::new(TieBreak::LowestIndex);
        let s = phragmen_step_power(&p, &mut st, &mut tb).unwrap();
        assert_eq!(s.winner, 1);
        assert!((s.scores[0] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn remark_profile_alternates() {
        let p = two_party(0.4, 0.3, 0.3);
        for m in [Method::PhragmenPower, Method::PhragmenReduced] {
            let s = run(m, &p, 6, TieBreak::LowestIndex).unwrap();
            assert_eq!(s.winner_string(), "ABABAB");
        }
    }

    #[test]
    fn equal_parties_stay_balanced() {
        let p = two_party(1.0, 1.0, 0.0);
        let s = run(Method::PhragmenPower, &p, 101, TieBreak::LowestIndex).unwrap();
        for n in 1..=101 {
            let c = s.counts(n);
            assert!(c[0].abs_diff(c[1]) <= 1);
        }
    }

    #[test]
    fn dhondt_for_single_party_ballots() {
        let p = BallotProfile::from_letters(&[("A", 100.0), ("B", 60.0), ("C", 30.0)]).unwrap();
        let s = run(Method::PhragmenReduced, &p, 6, TieBreak::LowestIndex).unwrap();
        // Quotients: A 100, 50, 33.3; B 60, 30; C 30. B and C tie at 30.
        assert_eq!(s.winner_string(), "ABAABC");
        assert_eq!(s.tie_flags, vec![false, false, false, false, true, false]);
        let t = run(Method::Thiele, &p, 6, TieBreak::LowestIndex).unwrap();
        assert_eq!(t.winners, s.winners);
    }

    #[test]
    fn place_numbers_sum_to_seats() {
        let p = BallotProfile::from_letters(&[("A", 2.0), ("AB", 3.0), ("BC", 1.5), ("C", 1.0)])
            .unwrap();
        let mut st = PhragmenReducedState::new(&p);
        let mut tb = TieBreaker::new(TieBreak::LowestIndex);
        for k in 1..=50 {
            phragmen_step_reduced(&p, &mut st, &mut tb).unwrap();
            let total: f64 = st.place_numbers.iter().sum();
            assert!((total - k as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn all_ab_votes_depend_on_tiebreak() {
        let p = BallotProfile::from_letters(&[("AB", 1.0)]).unwrap();
        let s = run(Method::PhragmenPower, &p, 20, TieBreak::LowestIndex).unwrap();
        assert_eq!(s.counts(20), vec![20, 0]);
        assert!(s.tie_flags.iter().all(|&t| t));
        let s = run(Method::PhragmenPower, &p, 200, TieBreak::SeededLot(7)).unwrap();
        let c = s.counts(200);
        assert!(c[0] > 60 && c[1] > 60, "{c:?}");
    }

    #[test]
    fn scripted_ties() {
        let p = BallotProfile::from_letters(&[("AB", 1.0)]).unwrap();
        let s = run(Method::Thiele, &p, 3, TieBreak::Scripted(vec![1, 0, 1])).unwrap();
        assert_eq!(s.winner_string(), "BAB");
        let e = run(Method::Thiele, &p, 3, TieBreak::Scripted(vec![1])).unwrap_err();
        assert_eq!(e, Error::TieScriptExhausted { seat: 1 });
        let e = run(Method::Thiele, &p, 1, TieBreak::Scripted(vec![5])).unwrap_err();
        assert_eq!(e, Error::TieScriptInvalid { seat: 0, choice: 5 });
    }

    #[test]
    fn shares() {
        let p = two_party(1.0, 1.0, 0.0);
        let s = run(Method::Thiele, &p, 4, TieBreak::LowestIndex).unwrap();
        assert_eq!(s.winner_string(), "ABAB");
        assert_eq!(seat_shares(&s, 4).unwrap().x, vec![0.5, 0.5]);
        assert_eq!(seat_shares(&s, 1).unwrap().x, vec![1.0, 0.0]);
        let p = two_party(1.0, 2.0, 0.0);
        let s = run(Method::Thiele, &p, 3, TieBreak::LowestIndex).unwrap();
        assert_eq!(s.winner_string(), "BAB");
        let sh = seat_shares(&s, 3).unwrap();
        assert!((sh.x[0] - 1.0 / 3.0).abs() < 1e-15 && (sh.x[1] - 2.0 / 3.0).abs() < 1e-15);
        assert!(seat_shares(&s, 4).is_err());
    }

    #[test]
    fn csv_export() {
        let p = two_party(2.0, 1.0, 0.0);
        let s = run(Method::Thiele, &p, 2, TieBreak::LowestIndex).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "step,winner,tie_flag,score_1,score_2");
        assert!(lines[1].starts_with("1,A,false,2.0000000000000000e0,"));
        assert!(lines[2].starts_with("2,A,true,"));
    }
}
