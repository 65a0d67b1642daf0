use serde::{Deserialize, Serialize};

use super::game::RealGame;
use super::params::RealGameParams;
use super::transcript::{GameEvent, GameId, RealTranscript};
use crate::analysis::{k4_witness_at, triangle_witness};
use crate::breaker::BreakerSpec;
use crate::graph::{intersection_count, raw_edge_index, raw_endpoints, EdgeId, EdgeStatus, SimpleGraph};
use crate::oracle::in_gamma;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeCensus {
    pub maker: u64,
    pub breaker: u64,
    pub revealed_out: u64,
    pub unclaimed: u64,
}

/// Growth of the sets `S(v)`: `u` joins `S(v)` when Maker claims `uv` while
/// `|N_M(v) ∩ N_B(u)| ≥ √δ·pn`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SProcess {
    pub threshold: f64,
    pub sizes: Vec<u32>,
    pub max_size: u32,
    /// `|S(v)| ≥ 8√δ·pn` for some `v`.
    pub size_failure: bool,
    /// `deg_M(v) ≥ 2pn` for some `v` at some point.
    pub degree_failure: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameReport {
    pub code_version: String,
    pub params: RealGameParams,
    pub breaker: BreakerSpec,
    pub transcript_hash: String,
    pub census: EdgeCensus,
    pub maker_turns: u64,
    pub breaker_turns: u64,
    pub min_maker_degree: u32,
    pub max_maker_degree: u32,
    /// `e(G_M[N_Γ(v)])` per vertex, over the full random graph.
    pub nbhd_gamma_edges: Vec<u64>,
    /// `e(G_M[N_M(v)])` per vertex.
    pub nbhd_maker_edges: Vec<u64>,
    pub min_nbhd_edges: u64,
    /// `1 − δ(G_M)/(pn)`.
    pub eps_hat_degree: f64,
    /// `1 − min_v e(G_M[N_Γ(v)]) / (p³n²/2)`.
    pub eps_hat_nbhd: f64,
    pub max_deficit_degree_game: Option<f64>,
    pub max_deficit_nbhd_game: Option<f64>,
    pub violations_degree_game: u64,
    pub violations_nbhd_game: u64,
    pub potential_monotone: bool,
    pub s_process: SProcess,
    pub triangle_free: bool,
    pub v0: u32,
    pub k4_free_at_v0: bool,
    pub overflow_dropped: u64,
    pub max_feed: u32,
    pub warnings: Vec<String>,
    pub diagnostics: Vec<String>,
}

/// Replays the Maker and Breaker graphs from `t` and tracks `S(v)`.
pub fn s_process(t: &RealTranscript) -> SProcess {
    let n = t.params.n;
    let pn = t.params.p * n as f64;
    let threshold = t.params.delta().sqrt() * pn;
    let mut gm = SimpleGraph::new(n as usize);
    let mut gb = SimpleGraph::new(n as usize);
    let mut sizes = vec![0u32; n as usize];
    let mut degree_failure = false;
    for ev in &t.events {
        match ev {
            GameEvent::Claim { e, .. } => {
                let (u, v) = raw_endpoints(*e, n);
                for (a, c) in [(v, u), (u, v)] {
                    let common = intersection_count(gm.neighbours(a), gb.neighbours(c));
                    if common as f64 >= threshold {
                        sizes[a as usize] += 1;
                    }
                }
                let _ = gm.add_edge(u, v);
                if gm.degree(u).max(gm.degree(v)) as f64 >= 2.0 * pn {
                    degree_failure = true;
                }
            }
            GameEvent::Breaker { e } => {
                for &x in e {
                    let (u, v) = raw_endpoints(x, n);
                    let _ = gb.add_edge(u, v);
                }
            }
            _ => {}
        }
    }
    let max_size = sizes.iter().copied().max().unwrap_or(0);
    SProcess {
        threshold,
        size_failure: max_size as f64 >= 8.0 * threshold,
        sizes,
        max_size,
        degree_failure,
    }
}

/// Sorted Γ-neighbourhood of every vertex.
pub fn gamma_neighbourhoods(n: u32, p: f64, seed: u64) -> Vec<Vec<u32>> {
    let mut nb = vec![Vec::new(); n as usize];
    for u in 0..n {
        for v in u + 1..n {
            if in_gamma(seed, p, EdgeId(raw_edge_index(u, v, n))) {
                nb[u as usize].push(v);
                nb[v as usize].push(u);
            }
        }
    }
    for l in &mut nb {
        l.sort_unstable();
    }
    nb
}

impl GameReport {
    pub fn build(game: &RealGame, t: &RealTranscript, diagnostics: Vec<String>) -> Self {
        let params = game.params();
        let n = params.n;
        let gm = game.maker_graph();
        let ledger = game.ledger();
        let census = EdgeCensus {
            maker: ledger.count(EdgeStatus::Maker) as u64,
            breaker: ledger.count(EdgeStatus::Breaker) as u64,
            revealed_out: ledger.count(EdgeStatus::RevealedOut) as u64,
            unclaimed: ledger.count(EdgeStatus::Unclaimed) as u64,
        };
        let gamma = gamma_neighbourhoods(n, params.p, params.seed);
        let nbhd_gamma_edges: Vec<u64> = gamma.iter().map(|s| gm.edges_within(s) as u64).collect();
        let nbhd_maker_edges: Vec<u64> = (0..n)
            .map(|v| gm.edges_within(gm.neighbours(v)) as u64)
            .collect();
        let min_maker_degree = gm.min_degree() as u32;
        let min_nbhd_edges = nbhd_gamma_edges.iter().copied().min().unwrap_or(0);
        let nf = n as f64;
        let deficit = |g: GameId| {
            game.box_game(g).and_then(|b| {
                let m = b.max_deficit();
                m.is_finite().then_some(m)
            })
        };
        let violations = |g: GameId| game.box_game(g).map_or(0, |b| b.violations().1);
        let monotone = [GameId::Deg, GameId::Nbh]
            .iter()
            .all(|&g| game.box_game(g).map_or(true, |b| b.monotone_breaks().is_empty()));
        let v0 = match t.breaker {
            BreakerSpec::K4Blocker { v0 } => v0,
            _ => 0,
        };
        GameReport {
            code_version: crate::CODE_VERSION.into(),
            params: params.clone(),
            breaker: t.breaker.clone(),
            transcript_hash: t.hash.clone(),
            census,
            maker_turns: game.maker_turns(),
            breaker_turns: game.breaker_turns(),
            min_maker_degree,
            max_maker_degree: gm.max_degree() as u32,
            min_nbhd_edges,
            eps_hat_degree: 1.0 - min_maker_degree as f64 / (params.p * nf),
            eps_hat_nbhd: 1.0 - min_nbhd_edges as f64 / (params.p.powi(3) * nf * nf / 2.0),
            nbhd_gamma_edges,
            nbhd_maker_edges,
            max_deficit_degree_game: deficit(GameId::Deg),
            max_deficit_nbhd_game: deficit(GameId::Nbh),
            violations_degree_game: violations(GameId::Deg),
            violations_nbhd_game: violations(GameId::Nbh),
            potential_monotone: monotone,
            s_process: s_process(t),
            triangle_free: triangle_witness(gm).is_none(),
            v0,
            k4_free_at_v0: v0 >= n || k4_witness_at(gm, v0).is_none(),
            overflow_dropped: game.overflow_dropped(),
            max_feed: game.max_feed() as u32,
            warnings: t.warnings.clone(),
            diagnostics,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}
