//! The random graph Γ = G(n, p), revealed one edge at a time.
//!
//! Membership of an edge is a pure function of `(seed, edge id, p)`, so the
//! graph does not depend on the order in which Maker's queries arrive and a
//! transcript can be replayed (or audited) from its header alone.

use serde::{Deserialize, Serialize};

use crate::graph::{edge_count, EdgeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Membership {
    InGamma,
    NotInGamma,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Revealed {
    Unknown,
    InGamma,
    NotInGamma,
}

#[inline]
fn splitmix_finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Fixed 64-bit avalanche hash of `(seed, id)`.
#[inline]
pub fn mix64(seed: u64, id: u64) -> u64 {
    let inner = splitmix_finalize(id.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    splitmix_finalize(seed ^ inner)
}

/// Uniform value in `[0, 1)` from the top 53 bits of [`mix64`].
#[inline]
pub fn unit_value(seed: u64, id: EdgeId) -> f64 {
    (mix64(seed, id.0 as u64) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Whether `id` belongs to Γ for the given seed and edge probability.
#[inline]
pub fn in_gamma(seed: u64, p: f64, id: EdgeId) -> bool {
    unit_value(seed, id) < p
}

#[derive(Clone, Debug)]
pub struct GammaOracle {
    n: usize,
    p: f64,
    seed: u64,
    status: Vec<Revealed>,
    revealed_in: usize,
    revealed_out: usize,
}

impl GammaOracle {
    /// `p` is clamped to `[0, 1]`; callers validate ranges beforehand.
    pub fn new(n: usize, p: f64, seed: u64) -> Self {
        GammaOracle {
            n,
            p: p.clamp(0.0, 1.0),
            seed,
            status: vec![Revealed::Unknown; edge_count(n)],
            revealed_in: 0,
            revealed_out: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Reveals (once) and returns the membership of `id`.
    pub fn query(&mut self, id: EdgeId) -> Membership {
        match self.status[id.index()] {
            Revealed::InGamma => Membership::InGamma,
            Revealed::NotInGamma => Membership::NotInGamma,
            Revealed::Unknown => {
                if in_gamma(self.seed, self.p, id) {
                    self.status[id.index()] = Revealed::InGamma;
                    self.revealed_in += 1;
                    Membership::InGamma
                } else {
                    self.status[id.index()] = Revealed::NotInGamma;
                    self.revealed_out += 1;
                    Membership::NotInGamma
                }
            }
        }
    }

    pub fn peek(&self, id: EdgeId) -> Revealed {
        self.status[id.index()]
    }

    /// `(revealed_in, revealed_out, unknown)`.
    pub fn census(&self) -> (usize, usize, usize) {
        let total = self.status.len();
        (
            self.revealed_in,
            self.revealed_out,
            total - self.revealed_in - self.revealed_out,
        )
    }

    pub fn status_table(&self) -> &[Revealed] {
        &self.status
    }
}
