//! Parameter sweeps. Games run in parallel; rows come back in grid order.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::breaker::BreakerSpec;
use crate::engine::{run_game, EllSetting, GameReport, MakerKind, RealGameParams};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n: u32,
    pub p: f64,
    pub epsilon: f64,
    pub biases: Vec<u32>,
    pub seeds: Vec<u64>,
    pub breaker: BreakerSpec,
    #[serde(default = "default_maker")]
    pub maker: MakerKind,
    #[serde(default = "default_ell")]
    pub ell: EllSetting,
    #[serde(default)]
    pub breaker_first: bool,
}

fn default_maker() -> MakerKind {
    MakerKind::Potential
}

fn default_ell() -> EllSetting {
    EllSetting::Auto
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: u32,
    pub p: f64,
    pub b: u32,
    pub eps: f64,
    pub seed: u64,
    pub min_degree: u32,
    pub min_nbhd_edges: u64,
    pub max_deficit_degree_game: Option<f64>,
    pub max_deficit_nbhd_game: Option<f64>,
    pub triangle_free: bool,
    pub k4_free_at_v0: bool,
    pub transcript_hash: String,
}

impl SweepRow {
    pub fn from_report(r: &GameReport) -> Self {
        SweepRow {
            n: r.params.n,
            p: r.params.p,
            b: r.params.b,
            eps: r.params.epsilon,
            seed: r.params.seed,
            min_degree: r.min_maker_degree,
            min_nbhd_edges: r.min_nbhd_edges,
            max_deficit_degree_game: r.max_deficit_degree_game,
            max_deficit_nbhd_game: r.max_deficit_nbhd_game,
            triangle_free: r.triangle_free,
            k4_free_at_v0: r.k4_free_at_v0,
            transcript_hash: r.transcript_hash.clone(),
        }
    }
}

pub const CSV_COLUMNS: [&str; 12] = [
    "n",
    "p",
    "b",
    "eps",
    "seed",
    "min_degree",
    "min_nbhd_edges",
    "max_deficit_degree_game",
    "max_deficit_nbhd_game",
    "triangle_free",
    "k4_free_at_v0",
    "transcript_hash",
];

impl SweepConfig {
    pub fn params_for(&self, b: u32, seed: u64) -> RealGameParams {
        let mut p = RealGameParams::new(self.n, self.p, b, self.epsilon, seed).with_maker(self.maker);
        p.ell_degree = self.ell;
        p.ell_nbhd = self.ell;
        p.breaker_first = self.breaker_first;
        p
    }

    pub fn validate(&self) -> Result<()> {
        if self.biases.is_empty() || self.seeds.is_empty() {
            return Err(Error::Config("sweep needs at least one bias and one seed".into()));
        }
        self.breaker.validate(self.n)?;
        for &b in &self.biases {
            self.params_for(b, self.seeds[0]).validate()?;
        }
        Ok(())
    }

    /// `(b, seed)` pairs in row order.
    pub fn grid(&self) -> Vec<(u32, u64)> {
        self.biases
            .iter()
            .flat_map(|&b| self.seeds.iter().map(move |&s| (b, s)))
            .collect()
    }
}

/// Runs every `(b, seed)` game. Rows are ordered by bias, then seed, as
/// listed in the config.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<GameReport>> {
    cfg.validate()?;
    cfg.grid()
        .into_par_iter()
        .map(|(b, seed)| {
            let mut strategy = cfg.breaker.build();
            run_game(cfg.params_for(b, seed), strategy.as_mut()).map(|(_, r)| r)
        })
        .collect()
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| format!("{v:.9}"))
}

/// CSV with a `#` comment line carrying the config and code version.
pub fn write_csv<W: Write>(mut out: W, cfg: &SweepConfig, rows: &[SweepRow]) -> Result<()> {
    let header = serde_json::to_string(cfg).expect("config serialises");
    writeln!(out, "# {} config={}", crate::CODE_VERSION, header)?;
    writeln!(out, "{}", CSV_COLUMNS.join(","))?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.n,
            r.p,
            r.b,
            r.eps,
            r.seed,
            r.min_degree,
            r.min_nbhd_edges,
            opt(r.max_deficit_degree_game),
            opt(r.max_deficit_nbhd_game),
            r.triangle_free,
            r.k4_free_at_v0,
            r.transcript_hash
        )?;
    }
    Ok(())
}
