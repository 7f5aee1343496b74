//! Brute-force reference oracles for desk-scale verification: exhaustive
//! maximum matching, subset-maximization Hall deficiency, and a tight
//! bitmask bipartite matcher used by the exhaustive cover verifiers.

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

/// Adjacency rows packed into one `u32` mask per vertex. Only valid for
/// `n <= 32`; the exhaustive verifiers stay at `n <= 14`.
pub fn mask_rows(g: &Graph) -> Vec<u32> {
    assert!(g.n() <= 32);
    (0..g.n()).map(|u| g.row(u)[0] as u32).collect()
}

/// Maximum matching size of the bipartite graph between mask `a` and mask
/// `b` under adjacency `rows`, by augmenting paths. Exact.
pub fn mu_bipartite_masks(rows: &[u32], a: u32, b: u32) -> u32 {
    let mut mate_of_b = [u32::MAX; 32];
    let mut size = 0;
    let mut av = a;
    while av != 0 {
        let u = av.trailing_zeros();
        av &= av - 1;
        let mut visited = 0u32;
        if kuhn_augment(rows, u, b, &mut visited, &mut mate_of_b) {
            size += 1;
        }
    }
    size
}

fn kuhn_augment(rows: &[u32], u: u32, b: u32, visited: &mut u32, mate_of_b: &mut [u32; 32]) -> bool {
    let mut cand = rows[u as usize] & b & !*visited;
    while cand != 0 {
        let v = cand.trailing_zeros();
        cand &= cand - 1;
        *visited |= 1 << v;
        if mate_of_b[v as usize] == u32::MAX
            || kuhn_augment(rows, mate_of_b[v as usize], b, visited, mate_of_b)
        {
            mate_of_b[v as usize] = u;
            return true;
        }
    }
    false
}

/// Maximum matching size by exhaustive branching over the lowest uncovered
/// vertex, memoized on the set of available vertices. Independent of the
/// augmenting-path engines.
pub fn max_matching_exhaustive(g: &Graph) -> Result<u32> {
    let n = g.n();
    if n > 20 {
        return Err(Error::InvalidParam(format!(
            "exhaustive matching oracle capped at n <= 20, got {n}"
        )));
    }
    let rows: Vec<u32> = (0..n).map(|u| g.row(u)[0] as u32).collect();
    let mut memo = vec![u8::MAX; 1usize << n];
    Ok(branch(&rows, ((1u64 << n) - 1) as u32, &mut memo) as u32)
}

fn branch(rows: &[u32], avail: u32, memo: &mut [u8]) -> u8 {
    if avail == 0 {
        return 0;
    }
    if memo[avail as usize] != u8::MAX {
        return memo[avail as usize];
    }
    let v = avail.trailing_zeros();
    let rest = avail & !(1 << v);
    // v stays unmatched
    let mut best = branch(rows, rest, memo);
    // or v matches any available neighbor
    let mut nbrs = rows[v as usize] & rest;
    while nbrs != 0 {
        let u = nbrs.trailing_zeros();
        nbrs &= nbrs - 1;
        best = best.max(1 + branch(rows, rest & !(1 << u), memo));
    }
    memo[avail as usize] = best;
    best
}

/// Hall deficiency via its subset-maximization definition: pad both sides
/// to `n' = max(|left|, |right|)` and return
/// `max over A of (|A| - |N(A)|)` where `A` ranges over subsets of either
/// padded side. Exhaustive; requires `n' <= 12`.
pub fn hall_deficiency_subset_oracle(
    g: &Graph,
    left: &VertexSet,
    right: &VertexSet,
) -> Result<usize> {
    let np = left.len().max(right.len());
    if np > 12 {
        return Err(Error::InvalidParam(format!(
            "subset Hall oracle capped at side size 12, got {np}"
        )));
    }
    let side_deficiency = |side: &VertexSet, other: &VertexSet| -> usize {
        let pad = np - side.len();
        let other_mask = other.mask(g.n());
        let words = other_mask.len();
        let mut best = 0isize;
        for subset in 0u32..(1u32 << side.len()) {
            let mut neigh = vec![0u64; words];
            for (idx, &v) in side.members().iter().enumerate() {
                if subset >> idx & 1 == 1 {
                    for (w, (r, m)) in g.row(v).iter().zip(&other_mask).enumerate() {
                        neigh[w] |= r & m;
                    }
                }
            }
            let nsize: u32 = neigh.iter().map(|w| w.count_ones()).sum();
            let gain = subset.count_ones() as isize - nsize as isize;
            best = best.max(gain);
        }
        // padded (isolated) vertices always help: they add to |A| for free
        (best + pad as isize).max(0) as usize
    };
    Ok(side_deficiency(left, right).max(side_deficiency(right, left)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_graph, GraphKind};
    use crate::matching::{hall_deficiency, max_matching_general};

    #[test]
    fn exhaustive_matches_known_values() {
        let tri = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(max_matching_exhaustive(&tri).unwrap(), 1);
        let pm = gen_graph(GraphKind::PerfectMatching, 8, 0).unwrap();
        assert_eq!(max_matching_exhaustive(&pm).unwrap(), 4);
        let c5 = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        assert_eq!(max_matching_exhaustive(&c5).unwrap(), 2);
    }

    #[test]
    fn mask_matcher_agrees_with_exhaustive_on_splits() {
        let g = gen_graph(GraphKind::Gnp { p: 0.45 }, 10, 11).unwrap();
        let rows = mask_rows(&g);
        // bipartite restriction vs exhaustive matching of the restricted graph
        for (a, b) in [(0b0000011111u32, 0b1111100000u32), (0b0101010101, 0b1010101010)] {
            let mut h = Graph::new(10);
            for (u, v) in g.edges() {
                let (mu, mv) = (1u32 << u, 1u32 << v);
                if (mu & a != 0 && mv & b != 0) || (mu & b != 0 && mv & a != 0) {
                    h.insert_edge(u, v).unwrap();
                }
            }
            assert_eq!(
                mu_bipartite_masks(&rows, a, b),
                max_matching_exhaustive(&h).unwrap()
            );
        }
    }

    #[test]
    fn subset_oracle_matches_engine_deficiency() {
        for seed in 0..20u64 {
            let g = gen_graph(GraphKind::Gnp { p: 0.35 }, 12, seed).unwrap();
            let left = VertexSet::new((0..6).collect());
            let right = VertexSet::new((6..12).collect());
            let via_mu = hall_deficiency(&g, &left, &right).unwrap();
            let via_subsets = hall_deficiency_subset_oracle(&g, &left, &right).unwrap();
            assert_eq!(via_mu, via_subsets, "seed {seed}");
        }
        // max_matching_general agrees with exhaustive on the same corpus
        for seed in 0..20u64 {
            let g = gen_graph(GraphKind::Gnp { p: 0.5 }, 9, 100 + seed).unwrap();
            assert_eq!(
                max_matching_general(&g).size() as u32,
                max_matching_exhaustive(&g).unwrap()
            );
        }
    }
}
