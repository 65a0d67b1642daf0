//! Vertex and edge encodings for `K_n`, the claim ledger and simple graphs.
//!
//! Edges of `K_n` are ranked lexicographically: `{u, v}` with `u < v` maps to
//! `u·n − u(u+1)/2 + (v − u − 1)`. Every per-edge array in the crate is
//! indexed by this rank.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Number of edges of `K_n`.
#[inline]
pub fn edge_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

#[inline]
fn row_start(u: u64, n: u64) -> u64 {
    u * n - u * (u + 1) / 2
}

/// Rank of the pair `{u, v}` among all pairs of `[n]` in lexicographic order.
pub fn edge_index(u: VertexId, v: VertexId, n: usize) -> Result<EdgeId> {
    if u == v {
        return Err(Error::InvalidArgument(format!("loop at vertex {}", u.0)));
    }
    if u.index() >= n || v.index() >= n {
        return Err(Error::InvalidArgument(format!(
            "vertex out of range: ({}, {}) with n = {n}",
            u.0, v.0
        )));
    }
    Ok(EdgeId(raw_edge_index(u.0, v.0, n as u32)))
}

/// Unchecked ranking used on hot paths. Requires `u != v`, both `< n`.
#[inline]
pub fn raw_edge_index(u: u32, v: u32, n: u32) -> u32 {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    let (a, b, n) = (a as u64, b as u64, n as u64);
    (row_start(a, n) + (b - a - 1)) as u32
}

/// Inverse of [`edge_index`]; always returns `(u, v)` with `u < v`.
pub fn endpoints(id: EdgeId, n: usize) -> Result<(VertexId, VertexId)> {
    if id.index() >= edge_count(n) {
        return Err(Error::InvalidArgument(format!(
            "edge id {} out of range for n = {n}",
            id.0
        )));
    }
    let (u, v) = raw_endpoints(id.0, n as u32);
    Ok((VertexId(u), VertexId(v)))
}

/// Unchecked inverse of [`raw_edge_index`].
#[inline]
pub fn raw_endpoints(id: u32, n: u32) -> (u32, u32) {
    let (id, nn) = (id as u64, n as u64);
    // Largest u with row_start(u) <= id, from the quadratic, then corrected.
    let b = 2.0 * nn as f64 - 1.0;
    let est = ((b - (b * b - 8.0 * id as f64).max(0.0).sqrt()) / 2.0).floor();
    let mut u = (est.max(0.0) as u64).min(nn.saturating_sub(2));
    while u > 0 && row_start(u, nn) > id {
        u -= 1;
    }
    while u + 1 < nn && row_start(u + 1, nn) <= id {
        u += 1;
    }
    let v = id - row_start(u, nn) + u + 1;
    (u as u32, v as u32)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum EdgeStatus {
    Unclaimed = 0,
    Maker = 1,
    Breaker = 2,
    /// Queried by Maker and found not to be in Γ.
    RevealedOut = 3,
}

/// Per-edge ownership of `E(K_n)`.
#[derive(Clone, Debug)]
pub struct ClaimLedger {
    n: usize,
    status: Vec<EdgeStatus>,
    counts: [usize; 4],
}

impl ClaimLedger {
    pub fn new(n: usize) -> Self {
        let m = edge_count(n);
        ClaimLedger {
            n,
            status: vec![EdgeStatus::Unclaimed; m],
            counts: [m, 0, 0, 0],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.status.len()
    }

    pub fn is_empty(&self) -> bool {
        self.status.is_empty()
    }

    #[inline]
    pub fn status(&self, e: EdgeId) -> EdgeStatus {
        self.status[e.index()]
    }

    #[inline]
    pub fn is_unclaimed(&self, e: EdgeId) -> bool {
        self.status[e.index()] == EdgeStatus::Unclaimed
    }

    pub fn count(&self, s: EdgeStatus) -> usize {
        self.counts[s as usize]
    }

    pub fn unclaimed(&self) -> usize {
        self.counts[EdgeStatus::Unclaimed as usize]
    }

    /// Moves an unclaimed edge to `to`. Any other transition is rejected.
    pub fn set(&mut self, e: EdgeId, to: EdgeStatus) -> Result<()> {
        let cur = *self
            .status
            .get(e.index())
            .ok_or_else(|| Error::InvalidArgument(format!("edge id {} out of range", e.0)))?;
        if cur != EdgeStatus::Unclaimed || to == EdgeStatus::Unclaimed {
            return Err(Error::Invariant(format!(
                "illegal ledger transition {cur:?} -> {to:?} on edge {}",
                e.0
            )));
        }
        self.status[e.index()] = to;
        self.counts[cur as usize] -= 1;
        self.counts[to as usize] += 1;
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (EdgeId, EdgeStatus)> + '_ {
        self.status
            .iter()
            .enumerate()
            .map(|(i, s)| (EdgeId(i as u32), *s))
    }
}

/// Undirected simple graph on `[n]` with sorted neighbour lists.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimpleGraph {
    adj: Vec<Vec<u32>>,
    edge_count: usize,
}

impl SimpleGraph {
    pub fn new(n: usize) -> Self {
        SimpleGraph {
            adj: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let mut g = SimpleGraph::new(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let adj = (0..n as u32)
            .map(|u| (0..n as u32).filter(|&v| v != u).collect())
            .collect();
        SimpleGraph {
            adj,
            edge_count: edge_count(n),
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Inserts `{u, v}`; returns `false` if it was already present.
    pub fn add_edge(&mut self, u: u32, v: u32) -> Result<bool> {
        let n = self.adj.len();
        if u == v || u as usize >= n || v as usize >= n {
            return Err(Error::InvalidArgument(format!(
                "cannot add edge ({u}, {v}) to a graph on {n} vertices"
            )));
        }
        match self.adj[u as usize].binary_search(&v) {
            Ok(_) => Ok(false),
            Err(pos) => {
                self.adj[u as usize].insert(pos, v);
                let pos = self.adj[v as usize].binary_search(&u).unwrap_err();
                self.adj[v as usize].insert(pos, u);
                self.edge_count += 1;
                Ok(true)
            }
        }
    }

    #[inline]
    pub fn neighbours(&self, u: u32) -> &[u32] {
        &self.adj[u as usize]
    }

    #[inline]
    pub fn degree(&self, u: u32) -> usize {
        self.adj[u as usize].len()
    }

    #[inline]
    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj
            .get(u as usize)
            .is_some_and(|l| l.binary_search(&v).is_ok())
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, l)| {
            let u = u as u32;
            l.iter().filter(move |&&v| v > u).map(move |&v| (u, v))
        })
    }

    /// Number of edges with both endpoints in the sorted set `set`.
    pub fn edges_within(&self, set: &[u32]) -> usize {
        set.iter()
            .map(|&u| intersection_count(self.neighbours(u), set))
            .sum::<usize>()
            / 2
    }

    /// Full-scan consistency check: symmetry, no loops, sorted, no
    /// duplicates and the cached edge count.
    pub fn check_consistency(&self) -> Result<()> {
        let mut deg_sum = 0;
        for (u, l) in self.adj.iter().enumerate() {
            deg_sum += l.len();
            if l.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Invariant(format!("neighbours of {u} not strictly sorted")));
            }
            for &v in l {
                if v as usize == u || !self.has_edge(v, u as u32) {
                    return Err(Error::Invariant(format!("asymmetric or loop edge ({u}, {v})")));
                }
            }
        }
        if deg_sum != 2 * self.edge_count {
            return Err(Error::Invariant("edge count mismatch".into()));
        }
        Ok(())
    }
}

/// Size of the intersection of two sorted slices (linear merge).
pub fn intersection_count(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// Sorted intersection of two sorted slices.
pub fn intersection(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn idx(u: u32, v: u32, n: usize) -> u32 {
        edge_index(VertexId(u), VertexId(v), n).unwrap().0
    }

    #[test]
    fn pair_ranks() {
        assert_eq!(idx(0, 1, 5), 0);
        assert_eq!(idx(0, 4, 5), 3);
        assert_eq!(idx(3, 4, 5), 9);
        assert_eq!(idx(4, 3, 5), 9);
        assert_eq!(endpoints(EdgeId(0), 5).unwrap(), (VertexId(0), VertexId(1)));
        assert_eq!(endpoints(EdgeId(9), 5).unwrap(), (VertexId(3), VertexId(4)));
    }

    #[test]
    fn bad_pairs_are_rejected() {
        assert!(edge_index(VertexId(2), VertexId(2), 5).is_err());
        assert!(edge_index(VertexId(0), VertexId(5), 5).is_err());
        assert!(endpoints(EdgeId(10), 5).is_err());
        assert!(endpoints(EdgeId(0), 1).is_err());
    }

    #[test]
    fn exhaustive_round_trip_small_n() {
        for n in 2..=64usize {
            let mut next = 0u32;
            for u in 0..n as u32 {
                for v in u + 1..n as u32 {
                    let id = idx(u, v, n);
                    assert_eq!(id, next, "lexicographic rank n={n} ({u},{v})");
                    next += 1;
                    let (a, b) = endpoints(EdgeId(id), n).unwrap();
                    assert_eq!((a.0, b.0), (u, v));
                }
            }
            assert_eq!(next as usize, edge_count(n));
        }
    }

    proptest! {
        #[test]
        fn round_trip_large_n(n in 2u32..60_000, a in any::<u32>(), b in any::<u32>()) {
            let u = a % n;
            let v = b % n;
            prop_assume!(u != v);
            let id = raw_edge_index(u, v, n);
            prop_assert!((id as usize) < edge_count(n as usize));
            prop_assert_eq!(raw_endpoints(id, n), (u.min(v), u.max(v)));
        }
    }

    #[test]
    fn ledger_transitions_and_counts() {
        let mut l = ClaimLedger::new(5);
        assert_eq!(l.unclaimed(), 10);
        l.set(EdgeId(0), EdgeStatus::Maker).unwrap();
        l.set(EdgeId(1), EdgeStatus::Breaker).unwrap();
        l.set(EdgeId(2), EdgeStatus::RevealedOut).unwrap();
        assert!(l.set(EdgeId(0), EdgeStatus::Breaker).is_err());
        assert!(l.set(EdgeId(3), EdgeStatus::Unclaimed).is_err());
        let total: usize = [
            EdgeStatus::Unclaimed,
            EdgeStatus::Maker,
            EdgeStatus::Breaker,
            EdgeStatus::RevealedOut,
        ]
        .iter()
        .map(|&s| l.count(s))
        .sum();
        assert_eq!(total, 10);
        assert_eq!(l.count(EdgeStatus::Maker), 1);
    }

    #[test]
    fn graph_symmetry_and_within_counts() {
        let mut g = SimpleGraph::new(6);
        for (u, v) in [(0, 1), (1, 2), (0, 2), (3, 4), (2, 5)] {
            assert!(g.add_edge(u, v).unwrap());
        }
        assert!(!g.add_edge(1, 0).unwrap());
        assert!(g.add_edge(3, 3).is_err());
        g.check_consistency().unwrap();
        assert_eq!(g.edge_count(), 5);
        assert_eq!(g.edges_within(&[0, 1, 2]), 3);
        assert_eq!(g.edges_within(&[0, 1, 5]), 1);
        assert_eq!(intersection(g.neighbours(0), g.neighbours(1)), vec![2]);
        assert_eq!(g.min_degree(), 1);
        assert_eq!(SimpleGraph::complete(5).edge_count(), 10);
        SimpleGraph::complete(5).check_consistency().unwrap();
    }
}
