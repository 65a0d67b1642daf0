//! The real `(1:b)` game on `E(K_n)`.
//!
//! With the potential-strategy Maker, odd Maker turns are played in the
//! degree game (one box per vertex holding the `n − 1` edges at it) and even
//! turns in the neighbourhood game (one box per vertex, grown by the ghost
//! with unclaimed edges between Maker neighbours). The engine plays the
//! ghost: a proposal is haunted when it is not in Γ or already belongs to
//! Maker through the other game. Each box game sees the union of the Breaker
//! moves made since its previous step, i.e. bias `2b`.

mod game;
mod params;
mod report;
mod transcript;

pub use game::RealGame;
pub use params::{EllSetting, MakerKind, RealGameParams, TheoremHypotheses, MAX_N};
pub use report::{gamma_neighbourhoods, s_process, EdgeCensus, GameReport, SProcess};
pub use transcript::{BoxHeader, GameEvent, GameId, RealTranscript};

use crate::breaker::BreakerStrategy;
use crate::error::Result;

/// Plays a full game. `observe` runs after every Maker and Breaker turn.
pub fn run_game_with<F>(
    params: RealGameParams,
    strategy: &mut dyn BreakerStrategy,
    mut observe: F,
) -> Result<(RealTranscript, GameReport)>
where
    F: FnMut(&RealGame) -> Result<()>,
{
    strategy.spec().validate(params.n)?;
    let mut game = RealGame::new(params)?;
    if game.params().breaker_first && !game.is_over() {
        game.breaker_turn(strategy)?;
        observe(&game)?;
    }
    while !game.is_over() {
        game.maker_turn()?;
        observe(&game)?;
        if game.is_over() {
            break;
        }
        game.breaker_turn(strategy)?;
        observe(&game)?;
    }
    game.finish()?;
    let diagnostics = strategy.diagnostics();
    let transcript = game.transcript(strategy.spec(), &[]);
    let report = GameReport::build(&game, &transcript, diagnostics);
    Ok((transcript, report))
}

pub fn run_game(
    params: RealGameParams,
    strategy: &mut dyn BreakerStrategy,
) -> Result<(RealTranscript, GameReport)> {
    run_game_with(params, strategy, |_| Ok(()))
}
