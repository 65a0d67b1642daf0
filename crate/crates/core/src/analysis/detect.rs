use crate::graph::{intersection, intersection_count, SimpleGraph};

/// Some triangle `(u, v, w)` with `u < v < w`, the lexicographically first.
pub fn triangle_witness(g: &SimpleGraph) -> Option<(u32, u32, u32)> {
    for u in 0..g.n() as u32 {
        let nu = g.neighbours(u);
        for &v in nu.iter().filter(|&&v| v > u) {
            let nv = g.neighbours(v);
            // first common neighbour above v
            let (mut i, mut j) = (0, 0);
            while i < nu.len() && j < nv.len() {
                match nu[i].cmp(&nv[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        if nu[i] > v {
                            return Some((u, v, nu[i]));
                        }
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
    }
    None
}

/// A `K_4` containing `v0`, as a sorted quadruple.
pub fn k4_witness_at(g: &SimpleGraph, v0: u32) -> Option<[u32; 4]> {
    if v0 as usize >= g.n() {
        return None;
    }
    let nb = g.neighbours(v0);
    for &a in nb {
        let na = intersection(g.neighbours(a), nb);
        for &b in na.iter().filter(|&&b| b > a) {
            let nab = intersection(g.neighbours(b), &na);
            if let Some(&c) = nab.iter().find(|&&c| c > b) {
                let mut q = [v0, a, b, c];
                q.sort_unstable();
                return Some(q);
            }
        }
    }
    None
}

/// `|N(v0) ∩ N(z)|`.
pub fn codegree_at(g: &SimpleGraph, v0: u32, z: u32) -> usize {
    intersection_count(g.neighbours(v0), g.neighbours(z))
}

/// `max_{z ≠ v0} |N(v0) ∩ N(z)|` with the maximising `z` (lowest on ties).
/// Returns `(v0, 0)` on a one-vertex graph.
pub fn max_codegree(g: &SimpleGraph, v0: u32) -> (u32, usize) {
    (0..g.n() as u32)
        .filter(|&z| z != v0)
        .map(|z| (z, codegree_at(g, v0, z)))
        .reduce(|best, cur| if cur.1 > best.1 { cur } else { best })
        .unwrap_or((v0, 0))
}
