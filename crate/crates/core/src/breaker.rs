//! Breaker strategies for the real game on `E(K_n)`.
//!
//! Strategies only see public information through a [`BreakerView`]: the
//! ledger, both players' graphs and Maker's last claim. The random graph is
//! hidden from them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{intersection, raw_edge_index, ClaimLedger, EdgeId, SimpleGraph};
use crate::oracle::mix64;

/// What a Breaker strategy may look at.
#[derive(Clone, Copy)]
pub struct BreakerView<'a> {
    pub n: u32,
    pub b: u32,
    /// 1-based index of this Breaker turn.
    pub round: u64,
    pub ledger: &'a ClaimLedger,
    pub maker: &'a SimpleGraph,
    pub breaker: &'a SimpleGraph,
    /// Edge Maker claimed in the turn just before this one, if any.
    pub last_maker_edge: Option<(u32, u32)>,
}

impl BreakerView<'_> {
    #[inline]
    pub fn edge(&self, u: u32, v: u32) -> EdgeId {
        EdgeId(raw_edge_index(u, v, self.n))
    }

    #[inline]
    pub fn is_unclaimed(&self, u: u32, v: u32) -> bool {
        u != v && self.ledger.is_unclaimed(self.edge(u, v))
    }
}

pub trait BreakerStrategy: Send {
    fn spec(&self) -> BreakerSpec;
    fn claim(&mut self, view: &BreakerView) -> Vec<EdgeId>;
    /// Notes about moves that broke the strategy's assumptions.
    fn diagnostics(&self) -> Vec<String> {
        Vec::new()
    }
}

/// Serialisable strategy selection, recorded in transcript headers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", content = "params", rename_all = "kebab-case")]
pub enum BreakerSpec {
    Null,
    Random { seed: u64 },
    VertexFocus { target: u32 },
    TriangleBlocker,
    K4Blocker { v0: u32 },
}

impl BreakerSpec {
    pub fn name(&self) -> &'static str {
        match self {
            BreakerSpec::Null => "null",
            BreakerSpec::Random { .. } => "random",
            BreakerSpec::VertexFocus { .. } => "vertex-focus",
            BreakerSpec::TriangleBlocker => "triangle-blocker",
            BreakerSpec::K4Blocker { .. } => "k4-blocker",
        }
    }

    pub fn validate(&self, n: u32) -> Result<()> {
        match *self {
            BreakerSpec::VertexFocus { target: v } | BreakerSpec::K4Blocker { v0: v } if v >= n => {
                Err(Error::Config(format!("{} vertex {v} is not below n = {n}", self.name())))
            }
            _ => Ok(()),
        }
    }

    pub fn build(&self) -> Box<dyn BreakerStrategy> {
        match *self {
            BreakerSpec::Null => Box::new(NullBreaker),
            BreakerSpec::Random { seed } => Box::new(RandomBreaker { seed }),
            BreakerSpec::VertexFocus { target } => Box::new(VertexFocus { target }),
            BreakerSpec::TriangleBlocker => Box::new(TriangleBlocker),
            BreakerSpec::K4Blocker { v0 } => Box::new(K4Blocker::new(v0)),
        }
    }
}

/// `⌈√n⌉`.
pub fn ceil_sqrt(n: u32) -> u32 {
    let mut s = (n as f64).sqrt() as u32;
    while s * s > n {
        s -= 1;
    }
    while s * s < n {
        s += 1;
    }
    s
}

/// `⌈n^{1/3}⌉`.
pub fn ceil_cbrt(n: u32) -> u32 {
    let n = n as u64;
    let mut s = (n as f64).cbrt() as u64;
    while s * s * s > n {
        s -= 1;
    }
    while s * s * s < n {
        s += 1;
    }
    s as u32
}

/// Up to `k` unclaimed edges at `u`, lowest co-endpoint first, skipping any already in `taken`.
fn lowest_at(view: &BreakerView, u: u32, k: usize, taken: &[EdgeId]) -> Vec<EdgeId> {
    let mut out = Vec::with_capacity(k);
    for w in 0..view.n {
        if out.len() == k {
            break;
        }
        if view.is_unclaimed(u, w) {
            let e = view.edge(u, w);
            if !taken.contains(&e) {
                out.push(e);
            }
        }
    }
    out
}

fn push_unique(out: &mut Vec<EdgeId>, e: EdgeId) {
    if !out.contains(&e) {
        out.push(e);
    }
}

#[derive(Clone, Debug, Default)]
pub struct NullBreaker;

impl BreakerStrategy for NullBreaker {
    fn spec(&self) -> BreakerSpec {
        BreakerSpec::Null
    }
    fn claim(&mut self, _view: &BreakerView) -> Vec<EdgeId> {
        Vec::new()
    }
}

/// `b` uniform unclaimed edges; the generator is reseeded from `(seed, round)`.
#[derive(Clone, Debug)]
pub struct RandomBreaker {
    pub seed: u64,
}

impl BreakerStrategy for RandomBreaker {
    fn spec(&self) -> BreakerSpec {
        BreakerSpec::Random { seed: self.seed }
    }

    fn claim(&mut self, view: &BreakerView) -> Vec<EdgeId> {
        let free = view.ledger.unclaimed();
        let b = view.b as usize;
        let total = view.ledger.len();
        if free <= b {
            return view
                .ledger
                .iter()
                .filter(|(_, s)| *s == crate::graph::EdgeStatus::Unclaimed)
                .map(|(e, _)| e)
                .collect();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(mix64(self.seed, view.round));
        if free * 8 >= total {
            let mut out = Vec::with_capacity(b);
            while out.len() < b {
                let e = EdgeId(rng.gen_range(0..total as u32));
                if view.ledger.is_unclaimed(e) && !out.contains(&e) {
                    out.push(e);
                }
            }
            out
        } else {
            let pool: Vec<EdgeId> = view
                .ledger
                .iter()
                .filter(|(_, s)| *s == crate::graph::EdgeStatus::Unclaimed)
                .map(|(e, _)| e)
                .collect();
            rand::seq::index::sample(&mut rng, pool.len(), b)
                .into_iter()
                .map(|i| pool[i])
                .collect()
        }
    }
}

/// Claims edges at one vertex until none remain.
#[derive(Clone, Debug)]
pub struct VertexFocus {
    pub target: u32,
}

impl BreakerStrategy for VertexFocus {
    fn spec(&self) -> BreakerSpec {
        BreakerSpec::VertexFocus {
            target: self.target,
        }
    }
    fn claim(&mut self, view: &BreakerView) -> Vec<EdgeId> {
        lowest_at(view, self.target, view.b as usize, &[])
    }
}

/// Answers Maker's `uv` with `⌈√n⌉` edges at each endpoint plus every
/// edge that would close a triangle on Maker's next move.
#[derive(Clone, Debug, Default)]
pub struct TriangleBlocker;

impl TriangleBlocker {
    /// Unclaimed `vw` for `w ∈ N_M(u)` and `uw` for `w ∈ N_M(v)`.
    pub fn dangerous_edges(view: &BreakerView, u: u32, v: u32) -> Vec<EdgeId> {
        let mut out = Vec::new();
        for (a, b) in [(u, v), (v, u)] {
            for &w in view.maker.neighbours(a) {
                if w != b && view.is_unclaimed(b, w) {
                    push_unique(&mut out, view.edge(b, w));
                }
            }
        }
        out
    }
}

impl BreakerStrategy for TriangleBlocker {
    fn spec(&self) -> BreakerSpec {
        BreakerSpec::TriangleBlocker
    }

    fn claim(&mut self, view: &BreakerView) -> Vec<EdgeId> {
        let Some((u, v)) = view.last_maker_edge else {
            return Vec::new();
        };
        let s = ceil_sqrt(view.n) as usize;
        // Dangerous edges first so that a short budget never leaves a triangle open.
        let mut out = Self::dangerous_edges(view, u, v);
        let at_u = lowest_at(view, u, s, &out);
        out.extend(at_u);
        let at_v = lowest_at(view, v, s, &out);
        out.extend(at_v);
        out.truncate(view.b as usize);
        out
    }
}

/// Keeps Maker from building a `K_4` through `v0`.
#[derive(Clone, Debug)]
pub struct K4Blocker {
    pub v0: u32,
    notes: Vec<String>,
}

impl K4Blocker {
    pub fn new(v0: u32) -> Self {
        K4Blocker {
            v0,
            notes: Vec::new(),
        }
    }

    /// Up to `k` vertices `z ∈ nbhd` with `yz` unclaimed, by Maker degree
    /// inside `nbhd` (descending), ties to the lower index.
    fn top_within(view: &BreakerView, nbhd: &[u32], y: u32, k: usize) -> Vec<EdgeId> {
        let mut ranked: Vec<(usize, u32)> = nbhd
            .iter()
            .filter(|&&z| z != y && view.is_unclaimed(y, z))
            .map(|&z| (crate::graph::intersection_count(view.maker.neighbours(z), nbhd), z))
            .collect();
        ranked.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        ranked.into_iter().take(k).map(|(_, z)| view.edge(y, z)).collect()
    }

    fn inner_edges(view: &BreakerView, set: &[u32], out: &mut Vec<EdgeId>) {
        for (i, &a) in set.iter().enumerate() {
            for &c in &set[i + 1..] {
                if view.is_unclaimed(a, c) {
                    push_unique(out, view.edge(a, c));
                }
            }
        }
    }
}

impl BreakerStrategy for K4Blocker {
    fn spec(&self) -> BreakerSpec {
        BreakerSpec::K4Blocker { v0: self.v0 }
    }

    fn diagnostics(&self) -> Vec<String> {
        self.notes.clone()
    }

    fn claim(&mut self, view: &BreakerView) -> Vec<EdgeId> {
        let v0 = self.v0;
        let q = ceil_cbrt(view.n) as usize;
        let nbhd = view.maker.neighbours(v0);
        let mut dangerous = Vec::new();
        let mut rule = Vec::new();
        if let Some((x, y)) = view.last_maker_edge {
            if x == v0 || y == v0 {
                // (ii): Maker just took v0y.
                let y = if x == v0 { y } else { x };
                let others: Vec<u32> = nbhd.iter().copied().filter(|&z| z != y).collect();
                let touching = intersection(view.maker.neighbours(y), &others);
                if !touching.is_empty() {
                    self.notes.push(format!(
                        "round {}: v0-edge to {y} already joined to neighbourhood vertices {touching:?}",
                        view.round
                    ));
                    Self::inner_edges(view, &touching, &mut dangerous);
                }
                rule = Self::top_within(view, &others, y, 2 * q);
            } else if nbhd.binary_search(&x).is_ok() && nbhd.binary_search(&y).is_ok() {
                // (iii): an edge inside N(v0).
                for a in [x, y] {
                    let common = intersection(nbhd, view.maker.neighbours(a));
                    Self::inner_edges(view, &common, &mut dangerous);
                }
                for a in [x, y] {
                    for e in Self::top_within(view, nbhd, a, 2 * q) {
                        push_unique(&mut rule, e);
                    }
                }
            } else {
                // (i): keep both endpoints out of N(v0).
                for a in [x, y] {
                    if view.is_unclaimed(v0, a) {
                        rule.push(view.edge(v0, a));
                    }
                }
            }
        }
        let mut out = dangerous;
        for e in rule {
            push_unique(&mut out, e);
        }
        let quota = lowest_at(view, v0, q, &out);
        out.extend(quota);
        out.truncate(view.b as usize);
        out
    }
}
