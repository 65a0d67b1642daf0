use serde::{Deserialize, Serialize};

use super::params::{RealGameParams, TheoremHypotheses};
use crate::breaker::BreakerSpec;
use crate::error::{Error, Result};
use crate::hash::{digest_lines, hex16};
use crate::spookybox::{BoxGameConfig, Parameters};

/// Which auxiliary box game an event belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GameId {
    Deg,
    Nbh,
}

impl GameId {
    pub fn index(self) -> usize {
        match self {
            GameId::Deg => 0,
            GameId::Nbh => 1,
        }
    }

    /// Degree game on odd Maker turns, neighbourhood game on even ones.
    pub fn for_turn(turn: u64) -> Self {
        if turn % 2 == 1 {
            GameId::Deg
        } else {
            GameId::Nbh
        }
    }
}

fn is_zero(x: &u32) -> bool {
    *x == 0
}

/// A transcript record. Every Breaker turn produces one `BK`, so the
/// events between two `BK`s form one Maker turn.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "t")]
pub enum GameEvent {
    /// Neighbourhood-box growth; `drop` counts additions cut off by the cap.
    #[serde(rename = "GG")]
    Grow {
        g: GameId,
        #[serde(rename = "box")]
        box_id: u32,
        add: Vec<u32>,
        size: u32,
        #[serde(default, skip_serializing_if = "is_zero")]
        drop: u32,
    },
    /// A proposal the ghost haunted: `out` when the edge is not in Γ,
    /// otherwise it was already Maker's through the other game.
    #[serde(rename = "GH")]
    Haunt {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        g: Option<GameId>,
        e: u32,
        out: bool,
    },
    #[serde(rename = "MK")]
    Claim {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        g: Option<GameId>,
        e: u32,
    },
    #[serde(rename = "BK")]
    Breaker { e: Vec<u32> },
}

/// Auxiliary game settings as recorded in a transcript header.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxHeader {
    pub config: BoxGameConfig,
    pub params: Parameters,
    pub guaranteed: bool,
}

impl BoxHeader {
    pub fn new(config: BoxGameConfig, params: Parameters) -> Self {
        BoxHeader {
            guaranteed: params.preconditions_ok,
            config,
            params,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealTranscript {
    pub kind: String,
    pub code_version: String,
    pub params: RealGameParams,
    pub breaker: BreakerSpec,
    /// Present for the potential-strategy Maker.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree_game: Option<BoxHeader>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nbhd_game: Option<BoxHeader>,
    pub hypotheses: TheoremHypotheses,
    pub warnings: Vec<String>,
    pub events: Vec<GameEvent>,
    pub hash: String,
}

impl RealTranscript {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::from_json(text, &e))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcript serialises")
    }

    pub fn recompute_hash(&self) -> String {
        hex16(digest_lines(&self.events))
    }

    pub fn box_header(&self, g: GameId) -> Option<&BoxHeader> {
        match g {
            GameId::Deg => self.degree_game.as_ref(),
            GameId::Nbh => self.nbhd_game.as_ref(),
        }
    }
}
