use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SimpleGraph;

/// Largest side accepted by [`regular_pair_check`].
pub const REGULARITY_LIMIT: usize = 15;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityVerdict {
    pub regular: bool,
    /// `min over X', Y' of e(X',Y') − (d−ε)p|X'||Y'|`.
    pub min_slack: f64,
    /// Subsets attaining `min_slack` when the pair is not regular.
    pub witness: Option<(Vec<u32>, Vec<u32>)>,
}

/// Exact check that `e(X',Y') ≥ (d−ε)p|X'||Y'|` for all `X' ⊆ X`, `Y' ⊆ Y`.
///
/// For a fixed `X'` the worst `Y'` takes exactly the `y` whose degree into
/// `X'` falls below `(d−ε)p|X'|`, so only `2^|X|` subsets are enumerated.
pub fn regular_pair_check(
    g: &SimpleGraph,
    x: &[u32],
    y: &[u32],
    eps: f64,
    d: f64,
    p: f64,
) -> Result<RegularityVerdict> {
    for (name, side) in [("X", x), ("Y", y)] {
        if side.len() > REGULARITY_LIMIT {
            return Err(Error::Size {
                what: if name == "X" { "|X|" } else { "|Y|" },
                got: side.len(),
                limit: REGULARITY_LIMIT,
            });
        }
        let mut s = side.to_vec();
        s.sort_unstable();
        if s.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!("{name} has repeated vertices")));
        }
        if let Some(v) = s.iter().find(|&&v| v as usize >= g.n()) {
            return Err(Error::InvalidArgument(format!("vertex {v} out of range")));
        }
    }
    if x.iter().any(|v| y.contains(v)) {
        return Err(Error::InvalidArgument("X and Y intersect".into()));
    }
    let c = (d - eps) * p;
    // bit i of adj_y[j]: x[i] ~ y[j]
    let adj_y: Vec<u32> = y
        .iter()
        .map(|&w| {
            x.iter()
                .enumerate()
                .filter(|(_, &u)| g.has_edge(u, w))
                .fold(0u32, |m, (i, _)| m | 1 << i)
        })
        .collect();
    let mut best = (0.0f64, 0u32, 0u32);
    for xs in 1u32..(1u32 << x.len()) {
        let size = xs.count_ones() as f64;
        let mut slack = 0.0;
        let mut ys = 0u32;
        for (j, &a) in adj_y.iter().enumerate() {
            let t = (a & xs).count_ones() as f64 - c * size;
            if t < 0.0 {
                slack += t;
                ys |= 1 << j;
            }
        }
        if slack < best.0 {
            best = (slack, xs, ys);
        }
    }
    let pick = |set: &[u32], mask: u32| -> Vec<u32> {
        set.iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &v)| v)
            .collect()
    };
    Ok(RegularityVerdict {
        regular: best.0 >= 0.0,
        min_slack: best.0,
        witness: (best.0 < 0.0).then(|| (pick(x, best.1), pick(y, best.2))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_and_empty_pairs() {
        let mut g = SimpleGraph::new(6);
        for a in 0..3 {
            for b in 3..6 {
                g.add_edge(a, b).unwrap();
            }
        }
        let v = regular_pair_check(&g, &[0, 1, 2], &[3, 4, 5], 0.1, 1.0, 1.0).unwrap();
        assert!(v.regular);
        let empty = SimpleGraph::new(6);
        let v = regular_pair_check(&empty, &[0, 1, 2], &[3, 4, 5], 0.1, 0.5, 1.0).unwrap();
        assert!(!v.regular);
        assert_eq!(v.witness, Some((vec![0, 1, 2], vec![3, 4, 5])));
        assert!(regular_pair_check(&g, &[0, 1], &[1, 2], 0.1, 1.0, 1.0).is_err());
    }
}
