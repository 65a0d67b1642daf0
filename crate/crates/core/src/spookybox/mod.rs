//! The SpookyBox game: a box game on a multihypergraph in which Maker and
//! Breaker claim vertices while a third player, the Ghost, may grow boxes
//! with unclaimed vertices before Maker moves and may haunt (remove from
//! play) any vertex Maker proposes.
//!
//! Maker plays the `(λ, τ)`-potential strategy: she proposes the free vertex
//! whose claim would reduce `Σ_S (1−λ)^{|S∩X|}(1+τ)^{|S∩Y|}` the most.
//! Potentials are stored per box in log domain; effects are cached per
//! vertex relative to a common shift and refreshed lazily for the boxes
//! whose potential changed since the last selection.

mod game;
mod params;
pub mod policies;
mod transcript;

pub use game::{BoxGame, GhostDecision, Owner, Phase, ProposalOutcome, RoundRecord, Violation};
pub use params::{box_log_potential, derive_parameters, log_sum_exp, BoxGameConfig, Parameters};
pub use policies::{random_hypergraph, run_box_game, BreakerPolicy, GhostPolicy};
pub use transcript::{BoxEvent, BoxGameSummary, BoxGameTranscript, PolicyNames, RoundScript, Script};

/// Absolute tolerance on fair-share deficits.
pub const DEFICIT_TOLERANCE: f64 = 1e-9;

/// Relative tolerance on per-round potential monotonicity.
pub const MONOTONE_TOLERANCE: f64 = 1e-9;
