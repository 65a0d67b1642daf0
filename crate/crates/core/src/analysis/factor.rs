use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::graph::SimpleGraph;

/// Default largest `n` accepted by [`kr_factor_search`].
pub const FACTOR_LIMIT: usize = 36;

/// A partition of `V(G)` into vertex-disjoint copies of `K_r`, or `None`.
pub fn kr_factor_search(g: &SimpleGraph, r: usize) -> Result<Option<Vec<Vec<u32>>>> {
    kr_factor_search_with_limit(g, r, FACTOR_LIMIT)
}

pub fn kr_factor_search_with_limit(
    g: &SimpleGraph,
    r: usize,
    limit: usize,
) -> Result<Option<Vec<Vec<u32>>>> {
    let n = g.n();
    if n > limit.min(64) {
        return Err(Error::Size {
            what: "n",
            got: n,
            limit: limit.min(64),
        });
    }
    if r < 2 {
        return Err(Error::InvalidArgument(format!("r must be at least 2, got {r}")));
    }
    if n % r != 0 {
        return Err(Error::InvalidArgument(format!("r = {r} does not divide n = {n}")));
    }
    let adj: Vec<u64> = (0..n as u32)
        .map(|u| g.neighbours(u).iter().fold(0u64, |m, &v| m | (1 << v)))
        .collect();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut search = Search {
        adj: &adj,
        r,
        dead: HashSet::new(),
        chosen: Vec::new(),
    };
    if !search.solve(full) {
        return Ok(None);
    }
    let factor: Vec<Vec<u32>> = search
        .chosen
        .iter()
        .map(|&mask| (0..n as u32).filter(|&v| mask >> v & 1 == 1).collect())
        .collect();
    check_factor(g, r, &factor)?;
    Ok(Some(factor))
}

fn check_factor(g: &SimpleGraph, r: usize, factor: &[Vec<u32>]) -> Result<()> {
    let mut seen = vec![false; g.n()];
    for part in factor {
        if part.len() != r {
            return Err(Error::Invariant(format!("factor part {part:?} has wrong size")));
        }
        for (i, &a) in part.iter().enumerate() {
            if std::mem::replace(&mut seen[a as usize], true) {
                return Err(Error::Invariant(format!("vertex {a} covered twice")));
            }
            for &b in &part[i + 1..] {
                if !g.has_edge(a, b) {
                    return Err(Error::Invariant(format!("factor uses non-edge ({a}, {b})")));
                }
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Invariant("factor does not cover every vertex".into()));
    }
    Ok(())
}

struct Search<'a> {
    adj: &'a [u64],
    r: usize,
    dead: HashSet<u64>,
    chosen: Vec<u64>,
}

impl Search<'_> {
    /// Covers `left` by branching on its lowest vertex.
    fn solve(&mut self, left: u64) -> bool {
        if left == 0 {
            return true;
        }
        if self.dead.contains(&left) {
            return false;
        }
        // every remaining vertex needs r-1 remaining neighbours
        let mut rest = left;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if ((self.adj[v] & left).count_ones() as usize) < self.r - 1 {
                self.dead.insert(left);
                return false;
            }
        }
        let v = left.trailing_zeros() as usize;
        let cand = self.adj[v] & left;
        if self.extend(left, 1 << v, cand, self.r - 1) {
            return true;
        }
        self.dead.insert(left);
        false
    }

    /// Grows the clique `clique` by `need` vertices from `cand`.
    fn extend(&mut self, left: u64, clique: u64, mut cand: u64, need: usize) -> bool {
        if need == 0 {
            self.chosen.push(clique);
            if self.solve(left & !clique) {
                return true;
            }
            self.chosen.pop();
            return false;
        }
        while (cand.count_ones() as usize) >= need {
            let w = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            if self.extend(left, clique | 1 << w, cand & self.adj[w], need - 1) {
                return true;
            }
        }
        false
    }
}
