use serde::{Deserialize, Serialize};

use super::game::{BoxGame, GhostDecision, Phase};
use super::params::{BoxGameConfig, Parameters};
use crate::error::{Error, Result};
use crate::hash::{digest_lines, hex16};

/// One step of a box game. Rounds end with a `BK` event, which is emitted
/// even when Breaker claims nothing; a leading `BK` is an opening move.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "t")]
pub enum BoxEvent {
    #[serde(rename = "GG")]
    Grow {
        #[serde(rename = "box")]
        box_id: u32,
        add: Vec<u32>,
        size: u32,
    },
    #[serde(rename = "MP")]
    Propose { v: u32 },
    #[serde(rename = "MK")]
    Claim { v: u32 },
    /// The proposal comes first, then the extra haunted vertices.
    #[serde(rename = "GH")]
    Haunt { v: Vec<u32> },
    #[serde(rename = "BK")]
    Breaker { v: Vec<u32> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxGameSummary {
    pub rounds: u64,
    pub maker_claims: u64,
    pub breaker_claims: u64,
    pub haunted: u64,
    pub baseline_log_potential: f64,
    pub final_log_potential: f64,
    /// `null` when no round was completed.
    pub max_deficit: Option<f64>,
    pub violations: u64,
    pub monotone_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyNames {
    pub ghost: String,
    pub breaker: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxGameTranscript {
    pub kind: String,
    pub code_version: String,
    pub config: BoxGameConfig,
    pub params: Parameters,
    /// Whether the fair-share guarantee applies (`M ≥ 9(m+b) ln e` and `ℓ ≥ ℓ_min`).
    pub guaranteed: bool,
    pub policies: PolicyNames,
    pub initial: Vec<Vec<u32>>,
    pub events: Vec<BoxEvent>,
    pub hash: String,
    pub summary: BoxGameSummary,
}

pub(crate) fn summarize(game: &BoxGame) -> BoxGameSummary {
    let mut s = BoxGameSummary {
        rounds: game.round_records().len() as u64,
        maker_claims: 0,
        breaker_claims: 0,
        haunted: 0,
        baseline_log_potential: game.baseline_log_potential(),
        final_log_potential: game.total_log_potential(),
        max_deficit: game.round_records().iter().map(|r| r.max_deficit).reduce(f64::max),
        violations: game.violations().1,
        monotone_ok: game.monotone_breaks().is_empty(),
    };
    for v in 0..game.config().vertex_count {
        match game.owner(v) {
            super::Owner::Maker => s.maker_claims += 1,
            super::Owner::Breaker => s.breaker_claims += 1,
            super::Owner::Haunted => s.haunted += 1,
            super::Owner::Free => {}
        }
    }
    s
}

impl BoxGameTranscript {
    pub(crate) fn from_game(game: &mut BoxGame, ghost: &str, breaker: &str) -> Self {
        let events = game.take_events();
        let cfg = game.config().clone();
        let params = *game.params();
        BoxGameTranscript {
            kind: "box".into(),
            code_version: crate::CODE_VERSION.into(),
            guaranteed: params.preconditions_ok && cfg.ell >= params.ell_min,
            config: cfg,
            params,
            policies: PolicyNames {
                ghost: ghost.into(),
                breaker: breaker.into(),
            },
            initial: game.initial_boxes().to_vec(),
            hash: hex16(digest_lines(&events)),
            events,
            summary: summarize(game),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::from_json(text, &e))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcript serialises")
    }

    pub fn recompute_hash(&self) -> String {
        hex16(digest_lines(&self.events))
    }

    /// Plays the events back through a fresh game, checking every step
    /// (including that each proposal is the potential-strategy choice).
    pub fn replay(&self) -> Result<BoxGame> {
        self.replay_with(|_, _| Ok(()))
    }

    /// Like [`replay`](Self::replay), calling `inspect` after every event.
    pub fn replay_with<F>(&self, mut inspect: F) -> Result<BoxGame>
    where
        F: FnMut(&BoxGame, &BoxEvent) -> Result<()>,
    {
        let mut game = BoxGame::new(self.config.clone(), self.initial.clone())?.without_events();
        let mut pending_grows: Vec<(u32, Vec<u32>)> = Vec::new();
        for (i, ev) in self.events.iter().enumerate() {
            let at = |e: Error| match e {
                Error::Protocol { round, message } => Error::Protocol {
                    round,
                    message: format!("event {i}: {message}"),
                },
                other => other,
            };
            match ev {
                BoxEvent::Grow { box_id, add, size } => {
                    if game.phase() != Phase::GhostGrow {
                        return Err(Error::protocol(
                            game.round(),
                            format!("event {i}: box growth outside the ghost phase"),
                        ));
                    }
                    let before = game.boxes().get(*box_id as usize).map_or(0, Vec::len)
                        + pending_grows
                            .iter()
                            .filter(|(b, _)| b == box_id)
                            .map(|(_, a)| a.len())
                            .sum::<usize>();
                    if before + add.len() != *size as usize {
                        return Err(Error::protocol(
                            game.round(),
                            format!("event {i}: box {box_id} size {size} does not match"),
                        ));
                    }
                    pending_grows.push((*box_id, add.clone()));
                }
                BoxEvent::Propose { v } => {
                    if game.phase() == Phase::GhostGrow {
                        game.ghost_grow(&std::mem::take(&mut pending_grows)).map_err(at)?;
                    }
                    let got = game.propose().map_err(at)?;
                    if got != Some(*v) {
                        return Err(Error::protocol(
                            game.round(),
                            format!("event {i}: proposal {v} but the potential strategy picks {got:?}"),
                        ));
                    }
                }
                BoxEvent::Claim { v } => {
                    if game.pending_proposal() != Some(*v) {
                        return Err(Error::protocol(
                            game.round(),
                            format!("event {i}: claim of {v} without a matching proposal"),
                        ));
                    }
                    game.resolve_maker_proposal(GhostDecision::Allow).map_err(at)?;
                }
                BoxEvent::Haunt { v } => {
                    let first = v.first().copied();
                    if first.is_none() || game.pending_proposal() != first {
                        return Err(Error::protocol(
                            game.round(),
                            format!("event {i}: haunt does not start with the pending proposal"),
                        ));
                    }
                    game.resolve_maker_proposal(GhostDecision::Haunt(v[1..].to_vec()))
                        .map_err(at)?;
                }
                BoxEvent::Breaker { v } => {
                    if i == 0 {
                        game.opening_breaker_claim(v).map_err(at)?;
                    } else {
                        if game.phase() == Phase::GhostGrow {
                            game.ghost_grow(&std::mem::take(&mut pending_grows)).map_err(at)?;
                        }
                        if game.phase() == Phase::MakerMove {
                            game.end_maker_phase().map_err(at)?;
                        }
                        game.breaker_claim(v).map_err(at)?;
                    }
                }
            }
            inspect(&game, ev)?;
        }
        if !pending_grows.is_empty() {
            return Err(Error::protocol(game.round(), "transcript ends inside a ghost phase"));
        }
        Ok(game)
    }
}

/// Decisions for one round, in the order they are asked for.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RoundScript {
    pub grows: Vec<(u32, Vec<u32>)>,
    pub decisions: Vec<GhostDecision>,
    pub breaker: Vec<u32>,
}

/// Ghost and Breaker moves extracted from an event list.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Script {
    pub opening: Option<Vec<u32>>,
    pub rounds: Vec<RoundScript>,
}

impl Script {
    /// Accepts a full box transcript or a bare JSON array of events.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::from_json(text, &e))?;
        let events: Vec<BoxEvent> = match value {
            serde_json::Value::Array(_) => {
                serde_json::from_value(value).map_err(|e| Error::Parse {
                    offset: 0,
                    message: e.to_string(),
                })?
            }
            serde_json::Value::Object(_) => BoxGameTranscript::from_json(text)?.events,
            _ => {
                return Err(Error::Parse {
                    offset: 0,
                    message: "expected a transcript object or an event array".into(),
                })
            }
        };
        Script::from_events(&events)
    }

    pub fn from_events(events: &[BoxEvent]) -> Result<Self> {
        let mut script = Script::default();
        let mut current = RoundScript::default();
        let mut proposal: Option<u32> = None;
        for (i, ev) in events.iter().enumerate() {
            match ev {
                BoxEvent::Grow { box_id, add, .. } => current.grows.push((*box_id, add.clone())),
                BoxEvent::Propose { v } => {
                    if proposal.is_some() {
                        return Err(Error::InvalidArgument(format!(
                            "event {i}: proposal while another is unresolved"
                        )));
                    }
                    proposal = Some(*v);
                }
                BoxEvent::Claim { v } => {
                    if proposal.take() != Some(*v) {
                        return Err(Error::InvalidArgument(format!(
                            "event {i}: claim of {v} without its proposal"
                        )));
                    }
                    current.decisions.push(GhostDecision::Allow);
                }
                BoxEvent::Haunt { v } => {
                    if v.is_empty() || proposal.take() != Some(v[0]) {
                        return Err(Error::InvalidArgument(format!(
                            "event {i}: haunt without its proposal"
                        )));
                    }
                    current.decisions.push(GhostDecision::Haunt(v[1..].to_vec()));
                }
                BoxEvent::Breaker { v } => {
                    if proposal.is_some() {
                        return Err(Error::InvalidArgument(format!(
                            "event {i}: Breaker moved during an unresolved proposal"
                        )));
                    }
                    if i == 0 {
                        script.opening = Some(v.clone());
                        continue;
                    }
                    current.breaker = v.clone();
                    script.rounds.push(std::mem::take(&mut current));
                }
            }
        }
        if current != RoundScript::default() {
            script.rounds.push(current);
        }
        Ok(script)
    }
}
