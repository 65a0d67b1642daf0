//! Ghost and Breaker decision procedures for standalone box games.

use rand::seq::{IteratorRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::game::{BoxGame, GhostDecision, Phase};
use super::params::BoxGameConfig;
use super::transcript::{BoxGameTranscript, RoundScript, Script};
use crate::error::{Error, Result};

pub trait GhostPolicy {
    fn name(&self) -> String;
    /// Box additions for the current round's ghost phase.
    fn grow(&mut self, game: &BoxGame) -> Vec<(u32, Vec<u32>)>;
    fn decide(&mut self, game: &BoxGame, proposal: u32) -> GhostDecision;
}

pub trait BreakerPolicy {
    fn name(&self) -> String;
    /// Claims made before the first round, if any.
    fn opening(&mut self, _game: &BoxGame) -> Option<Vec<u32>> {
        None
    }
    fn claim(&mut self, game: &BoxGame) -> Vec<u32>;
}

/// Never grows, never haunts.
#[derive(Clone, Debug, Default)]
pub struct NullGhost;

impl GhostPolicy for NullGhost {
    fn name(&self) -> String {
        "null".into()
    }
    fn grow(&mut self, _game: &BoxGame) -> Vec<(u32, Vec<u32>)> {
        Vec::new()
    }
    fn decide(&mut self, _game: &BoxGame, _proposal: u32) -> GhostDecision {
        GhostDecision::Allow
    }
}

/// Haunts every proposal.
#[derive(Clone, Debug, Default)]
pub struct AlwaysHauntGhost;

impl GhostPolicy for AlwaysHauntGhost {
    fn name(&self) -> String {
        "always-haunt".into()
    }
    fn grow(&mut self, _game: &BoxGame) -> Vec<(u32, Vec<u32>)> {
        Vec::new()
    }
    fn decide(&mut self, _game: &BoxGame, _proposal: u32) -> GhostDecision {
        GhostDecision::Haunt(Vec::new())
    }
}

/// Random legal growth and haunting.
#[derive(Clone, Debug)]
pub struct RandomGhost {
    rng: ChaCha8Rng,
    pub grow_per_round: usize,
    pub haunt_probability: f64,
    pub extra_haunts: usize,
}

impl RandomGhost {
    pub fn new(seed: u64) -> Self {
        RandomGhost {
            rng: ChaCha8Rng::seed_from_u64(seed),
            grow_per_round: 4,
            haunt_probability: 0.3,
            extra_haunts: 1,
        }
    }
}

impl GhostPolicy for RandomGhost {
    fn name(&self) -> String {
        "random".into()
    }

    fn grow(&mut self, game: &BoxGame) -> Vec<(u32, Vec<u32>)> {
        let e = game.boxes().len();
        if e == 0 || game.free_count() == 0 {
            return Vec::new();
        }
        let cap = game.config().max_box as usize;
        let mut out: Vec<(u32, Vec<u32>)> = Vec::new();
        for _ in 0..self.grow_per_round {
            let s = self.rng.gen_range(0..e) as u32;
            let room = cap.saturating_sub(
                game.boxes()[s as usize].len()
                    + out.iter().filter(|(b, _)| *b == s).map(|(_, a)| a.len()).sum::<usize>(),
            );
            if room == 0 {
                continue;
            }
            let Some(v) = game.free_vertices().choose(&mut self.rng) else {
                break;
            };
            let fresh = !game.incidence(v).contains(&s)
                && !out.iter().any(|(b, a)| *b == s && a.contains(&v));
            if fresh {
                out.push((s, vec![v]));
            }
        }
        out
    }

    fn decide(&mut self, game: &BoxGame, proposal: u32) -> GhostDecision {
        if !self.rng.gen_bool(self.haunt_probability) {
            return GhostDecision::Allow;
        }
        let extras = game
            .free_vertices()
            .filter(|&v| v != proposal)
            .choose_multiple(&mut self.rng, self.extra_haunts);
        GhostDecision::Haunt(extras)
    }
}

/// Pours free vertices into the box where Maker's share is lowest and haunts
/// proposals outside it, steering Maker away from the box Breaker attacks.
#[derive(Clone, Debug)]
pub struct ConcentrateGhost {
    pub grow_per_round: usize,
}

impl Default for ConcentrateGhost {
    fn default() -> Self {
        ConcentrateGhost { grow_per_round: 3 }
    }
}

fn weakest_box(game: &BoxGame) -> Option<u32> {
    let cfg = game.config();
    let share = cfg.m as f64 / (cfg.m + cfg.b) as f64;
    (0..game.boxes().len() as u32)
        .filter(|&s| game.boxes()[s as usize].iter().any(|&v| game.is_free(v)) || game.boxes()[s as usize].len() < cfg.max_box as usize)
        .max_by(|&a, &b| {
            let d = |s: u32| share * (game.x_count(s) + game.y_count(s)) as f64 - game.x_count(s) as f64;
            d(a).total_cmp(&d(b)).then(b.cmp(&a))
        })
}

impl GhostPolicy for ConcentrateGhost {
    fn name(&self) -> String {
        "concentrate".into()
    }

    fn grow(&mut self, game: &BoxGame) -> Vec<(u32, Vec<u32>)> {
        let Some(s) = weakest_box(game) else {
            return Vec::new();
        };
        let room = (game.config().max_box as usize).saturating_sub(game.boxes()[s as usize].len());
        let add: Vec<u32> = game
            .free_vertices()
            .filter(|v| !game.incidence(*v).contains(&s))
            .take(room.min(self.grow_per_round))
            .collect();
        if add.is_empty() {
            Vec::new()
        } else {
            vec![(s, add)]
        }
    }

    fn decide(&mut self, game: &BoxGame, proposal: u32) -> GhostDecision {
        match weakest_box(game) {
            Some(s) if !game.incidence(proposal).contains(&s) => GhostDecision::Haunt(Vec::new()),
            _ => GhostDecision::Allow,
        }
    }
}

/// Claims nothing.
#[derive(Clone, Debug, Default)]
pub struct NullBreaker;

impl BreakerPolicy for NullBreaker {
    fn name(&self) -> String {
        "null".into()
    }
    fn claim(&mut self, _game: &BoxGame) -> Vec<u32> {
        Vec::new()
    }
}

/// `b` uniformly random free vertices.
#[derive(Clone, Debug)]
pub struct RandomBreaker {
    rng: ChaCha8Rng,
}

impl RandomBreaker {
    pub fn new(seed: u64) -> Self {
        RandomBreaker {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl BreakerPolicy for RandomBreaker {
    fn name(&self) -> String {
        "random".into()
    }
    fn claim(&mut self, game: &BoxGame) -> Vec<u32> {
        let b = game.config().b as usize;
        let mut picks = game.free_vertices().choose_multiple(&mut self.rng, b);
        picks.shuffle(&mut self.rng);
        picks
    }
}

/// Claims free vertices of the box where Maker is furthest behind, topping
/// up from the next boxes in the same order.
#[derive(Clone, Debug, Default)]
pub struct GreedyConcentrateBreaker;

impl BreakerPolicy for GreedyConcentrateBreaker {
    fn name(&self) -> String {
        "greedy-concentrate".into()
    }

    fn claim(&mut self, game: &BoxGame) -> Vec<u32> {
        let b = game.config().b as usize;
        let deficits = game.fair_share_deficits();
        let mut order: Vec<u32> = (0..deficits.len() as u32).collect();
        order.sort_by(|&x, &y| deficits[y as usize].total_cmp(&deficits[x as usize]).then(x.cmp(&y)));
        let mut out: Vec<u32> = Vec::with_capacity(b);
        for s in order {
            for &v in &game.boxes()[s as usize] {
                if out.len() == b {
                    return out;
                }
                if game.is_free(v) && !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        for v in game.free_vertices() {
            if out.len() == b {
                break;
            }
            if !out.contains(&v) {
                out.push(v);
            }
        }
        out
    }
}

/// Replays the ghost side of a [`Script`]; rounds beyond the script grow
/// nothing and allow everything.
#[derive(Clone, Debug)]
pub struct ScriptedGhost {
    rounds: Vec<RoundScript>,
    cursor: (usize, usize),
}

impl ScriptedGhost {
    pub fn new(script: &Script) -> Self {
        ScriptedGhost {
            rounds: script.rounds.clone(),
            cursor: (usize::MAX, 0),
        }
    }

    fn round_index(game: &BoxGame) -> usize {
        (game.round() - 1) as usize
    }
}

impl GhostPolicy for ScriptedGhost {
    fn name(&self) -> String {
        "scripted".into()
    }

    fn grow(&mut self, game: &BoxGame) -> Vec<(u32, Vec<u32>)> {
        let r = Self::round_index(game);
        self.cursor = (r, 0);
        self.rounds.get(r).map(|s| s.grows.clone()).unwrap_or_default()
    }

    fn decide(&mut self, game: &BoxGame, _proposal: u32) -> GhostDecision {
        let r = Self::round_index(game);
        if self.cursor.0 != r {
            self.cursor = (r, 0);
        }
        let d = self
            .rounds
            .get(r)
            .and_then(|s| s.decisions.get(self.cursor.1))
            .cloned()
            .unwrap_or(GhostDecision::Allow);
        self.cursor.1 += 1;
        d
    }
}

/// Replays the Breaker side of a [`Script`]; claims nothing once it runs out.
#[derive(Clone, Debug)]
pub struct ScriptedBreaker {
    opening: Option<Vec<u32>>,
    rounds: Vec<Vec<u32>>,
}

impl ScriptedBreaker {
    pub fn new(script: &Script) -> Self {
        ScriptedBreaker {
            opening: script.opening.clone(),
            rounds: script.rounds.iter().map(|r| r.breaker.clone()).collect(),
        }
    }
}

impl BreakerPolicy for ScriptedBreaker {
    fn name(&self) -> String {
        "scripted".into()
    }
    fn opening(&mut self, _game: &BoxGame) -> Option<Vec<u32>> {
        self.opening.take()
    }
    fn claim(&mut self, game: &BoxGame) -> Vec<u32> {
        self.rounds
            .get((game.round() - 1) as usize)
            .cloned()
            .unwrap_or_default()
    }
}

fn fault(policy: &str, e: Error) -> Error {
    match e {
        Error::Protocol { round, message } => Error::StrategyFault {
            strategy: policy.to_string(),
            message: format!("round {round}: {message}"),
        },
        other => other,
    }
}

/// Plays a full box game with Maker's potential strategy.
pub fn run_box_game(
    cfg: BoxGameConfig,
    initial: Vec<Vec<u32>>,
    ghost: &mut dyn GhostPolicy,
    breaker: &mut dyn BreakerPolicy,
) -> Result<BoxGameTranscript> {
    let mut game = BoxGame::new(cfg, initial)?;
    let (gname, bname) = (ghost.name(), breaker.name());
    if let Some(open) = breaker.opening(&game) {
        game.opening_breaker_claim(&open).map_err(|e| fault(&bname, e))?;
    }
    while !game.is_finished() {
        let adds = ghost.grow(&game);
        game.ghost_grow(&adds).map_err(|e| fault(&gname, e))?;
        while game.phase() == Phase::MakerMove {
            let Some(v) = game.propose()? else { break };
            let d = ghost.decide(&game, v);
            game.resolve_maker_proposal(d).map_err(|e| fault(&gname, e))?;
        }
        let claims = breaker.claim(&game);
        game.breaker_claim(&claims).map_err(|e| fault(&bname, e))?;
    }
    Ok(BoxGameTranscript::from_game(&mut game, &gname, &bname))
}

/// `e` boxes of `size` distinct random vertices each.
pub fn random_hypergraph(vertex_count: u32, e: u32, size: u32, seed: u64) -> Vec<Vec<u32>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = size.min(vertex_count) as usize;
    (0..e)
        .map(|_| {
            let mut b = rand::seq::index::sample(&mut rng, vertex_count as usize, size)
                .into_iter()
                .map(|v| v as u32)
                .collect::<Vec<_>>();
            b.sort_unstable();
            b
        })
        .collect()
}
