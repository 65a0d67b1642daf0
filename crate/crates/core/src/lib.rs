//! Simulation and verification engine for biased `(1:b)` Maker-Breaker games
//! played on the edge set of the complete graph `K_n`.
//!
//! The crate is organised around a handful of pieces:
//!
//! * [`graph`]: edge encodings, the per-edge [`ClaimLedger`](graph::ClaimLedger)
//!   and sorted-adjacency [`SimpleGraph`](graph::SimpleGraph).
//! * [`spookybox`]: the three-player box game (Maker, Breaker, Ghost) and
//!   Maker's `(λ, τ)`-potential strategy with incrementally maintained
//!   log-domain potentials.
//! * [`oracle`]: a lazily revealed `G(n, p)` whose edge membership is a pure
//!   function of a seed.
//! * [`engine`]: the real game on `E(K_n)`, driven by a degree box game and a
//!   neighbourhood box game against a pluggable Breaker.
//! * [`breaker`]: Breaker strategies, including the triangle and `K_4`
//!   blockers.
//! * [`analysis`]: exact subgraph detectors, factor search, a brute-force
//!   regularity checker and the transcript verifier.
//! * [`sweep`]: deterministic parameter sweeps over many games.

pub mod analysis;
pub mod breaker;
pub mod engine;
pub mod error;
pub mod graph;
mod hash;
pub mod oracle;
pub mod spookybox;
pub mod sweep;

pub use error::{Error, Result};
pub use hash::fnv_digest;

/// Version string embedded in every transcript, report and sweep header.
pub const CODE_VERSION: &str = concat!("ghostbox ", env!("CARGO_PKG_VERSION"));
