//! Sequential party-version election methods: Phragmén (voting-power and reduced-vote forms)
//! and Thiele.

mod engine;
mod profile;

pub use engine::{
    phragmen_step_power, phragmen_step_reduced, run, seat_shares, thiele_step, Method,
    PhragmenPowerState, PhragmenReducedState, SeatSequence, Step, ThieleState, TieBreak,
    TieBreaker, TIE_TOLERANCE,
};
pub use profile::{BallotProfile, PartySet, ProfileFile, VoteEntry, MAX_PARTIES};
