//! Fractional matchings and support consolidation.
//!
//! [`consolidate`] rounds a fractional matching `x` into `y` with, for a
//! slack `epsilon`:
//!
//! 1. `y_v <= x_v` for every vertex (vertex sums);
//! 2. `supp(y) ⊆ supp(x)`;
//! 3. every nonzero `y_e` is at least `epsilon^3 / (12 ln(1/epsilon))`;
//! 4. `|y| >= |x| - 2 * epsilon * n`.
//!
//! Properties 1-3 hold on every output; property 4 holds in expectation per
//! attempt and is enforced by resampling with fresh streams, up to
//! [`CONSOLIDATE_RETRY_CAP`] attempts.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Vertex;

pub const CONSOLIDATE_RETRY_CAP: u32 = 64;

/// Nonnegative edge weights over a host vertex set. Per-edge weights stay in
/// `[0, 1]`; per-vertex sums may exceed one (the matching polytope is not
/// required).
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalMatching {
    n_nodes: u32,
    weights: BTreeMap<(Vertex, Vertex), f64>,
}

impl FractionalMatching {
    pub fn new(n_nodes: u32) -> Self {
        FractionalMatching { n_nodes, weights: BTreeMap::new() }
    }

    pub fn n_nodes(&self) -> u32 {
        self.n_nodes
    }

    /// Set an edge weight in `[0, 1]`. Zero removes the entry.
    pub fn set(&mut self, u: Vertex, v: Vertex, w: f64) -> Result<()> {
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        if u >= self.n_nodes || v >= self.n_nodes {
            return Err(Error::VertexOutOfRange { vertex: u.max(v), n: self.n_nodes });
        }
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidParam(format!("edge weight {w} outside [0,1]")));
        }
        let key = if u < v { (u, v) } else { (v, u) };
        if w == 0.0 {
            self.weights.remove(&key);
        } else {
            self.weights.insert(key, w);
        }
        Ok(())
    }

    pub fn weight(&self, u: Vertex, v: Vertex) -> f64 {
        let key = if u < v { (u, v) } else { (v, u) };
        self.weights.get(&key).copied().unwrap_or(0.0)
    }

    /// Support: edges with nonzero weight, canonical order.
    pub fn support(&self) -> impl Iterator<Item = ((Vertex, Vertex), f64)> + '_ {
        self.weights.iter().map(|(&e, &w)| (e, w))
    }

    pub fn support_len(&self) -> usize {
        self.weights.len()
    }

    /// Total mass `|x|`.
    pub fn total(&self) -> f64 {
        self.weights.values().sum()
    }

    /// Per-vertex sum `x_v`.
    pub fn vertex_sum(&self, v: Vertex) -> f64 {
        self.weights
            .iter()
            .filter(|(&(a, b), _)| a == v || b == v)
            .map(|(_, &w)| w)
            .sum()
    }

    fn vertex_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n_nodes as usize];
        for (&(u, v), &w) in &self.weights {
            sums[u as usize] += w;
            sums[v as usize] += w;
        }
        sums
    }
}

/// Floor for nonzero consolidated weights.
pub fn consolidation_floor(epsilon: f64) -> f64 {
    epsilon.powi(3) / (12.0 * (1.0 / epsilon).ln())
}

/// Number of Bernoulli trials per edge.
pub fn consolidation_trials(epsilon: f64) -> u64 {
    ((6.0 * (1.0 / epsilon).ln() / epsilon.powi(3)).ceil() as u64).max(1)
}

/// Consolidate the support of `x`: Bernoulli-sample each edge
/// `beta = ceil(6 ln(1/eps) / eps^3)` times, take success fractions `z_e`,
/// zero out every edge touching a vertex with `z_v >= (1+eps) x_v`, and
/// scale the rest by `1/(1+eps)`. Resamples on fresh streams until the mass
/// bound (property 4) holds.
pub fn consolidate(x: &FractionalMatching, epsilon: f64, seed: u64) -> Result<FractionalMatching> {
    if !(0.0..1.0).contains(&epsilon) || epsilon <= 0.0 {
        return Err(Error::InvalidParam(format!("epsilon {epsilon} outside (0,1)")));
    }
    let beta = consolidation_trials(epsilon);
    let floor = consolidation_floor(epsilon);
    let target = x.total() - 2.0 * epsilon * x.n_nodes() as f64;
    let x_sums = x.vertex_sums();

    let mut best: Option<FractionalMatching> = None;
    let mut best_total = f64::NEG_INFINITY;
    for attempt in 0..CONSOLIDATE_RETRY_CAP {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt as u64);

        let mut z: BTreeMap<(Vertex, Vertex), f64> = BTreeMap::new();
        let mut z_sums = vec![0.0; x.n_nodes() as usize];
        for ((u, v), w) in x.support() {
            let successes = (0..beta).filter(|_| rng.random::<f64>() < w).count();
            if successes > 0 {
                let ze = successes as f64 / beta as f64;
                z.insert((u, v), ze);
                z_sums[u as usize] += ze;
                z_sums[v as usize] += ze;
            }
        }
        let mut y = FractionalMatching::new(x.n_nodes());
        for (&(u, v), &ze) in &z {
            let keep = z_sums[u as usize] < (1.0 + epsilon) * x_sums[u as usize]
                && z_sums[v as usize] < (1.0 + epsilon) * x_sums[v as usize];
            if keep {
                let ye = (ze / (1.0 + epsilon)).min(1.0);
                // the construction keeps nonzero z_e above the floor for any
                // epsilon below ~0.7; clamp defensively so property 3 is
                // unconditional
                if ye >= floor {
                    y.weights.insert((u, v), ye);
                }
            }
        }
        debug_assert!(check_consolidation_properties(x, &y, epsilon)[..3].iter().all(|&p| p));
        let total = y.total();
        if total >= target - 1e-9 {
            return Ok(y);
        }
        if total > best_total {
            best_total = total;
            best = Some(y);
        }
    }
    Err(Error::ConsolidateRetriesExceeded {
        retries: CONSOLIDATE_RETRY_CAP,
        best: Box::new(best.unwrap_or_else(|| FractionalMatching::new(x.n_nodes()))),
    })
}

/// The four lemma properties, for tests and verifiers.
pub fn check_consolidation_properties(
    x: &FractionalMatching,
    y: &FractionalMatching,
    epsilon: f64,
) -> [bool; 4] {
    let floor = consolidation_floor(epsilon);
    let p1 = (0..x.n_nodes()).all(|v| y.vertex_sum(v) <= x.vertex_sum(v) + 1e-9);
    let p2 = y.support().all(|(e, _)| x.weight(e.0, e.1) > 0.0);
    let p3 = y.support().all(|(_, w)| w >= floor - 1e-12);
    let p4 = y.total() >= x.total() - 2.0 * epsilon * x.n_nodes() as f64 - 1e-9;
    [p1, p2, p3, p4]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_input_consolidates_to_zero() {
        let x = FractionalMatching::new(6);
        let y = consolidate(&x, 0.5, 1).unwrap();
        assert_eq!(y.support_len(), 0);
        assert_eq!(y.total(), 0.0);
    }

    #[test]
    fn single_full_edge() {
        let mut x = FractionalMatching::new(2);
        x.set(0, 1, 1.0).unwrap();
        let y = consolidate(&x, 0.5, 7).unwrap();
        let w = y.weight(0, 1);
        let floor = consolidation_floor(0.5);
        assert!(w == 0.0 || (floor..=1.0).contains(&w), "weight {w} outside {{0}} ∪ [{floor},1]");
        let props = check_consolidation_properties(&x, &y, 0.5);
        assert!(props[0] && props[1] && props[2]);
    }

    #[test]
    fn uniform_meta_matching_all_properties_100_seeds() {
        // uniform 1/k fractional matching on the complete k-vertex meta graph
        let k = 8u32;
        let mut x = FractionalMatching::new(k);
        for u in 0..k {
            for v in (u + 1)..k {
                x.set(u, v, 1.0 / k as f64).unwrap();
            }
        }
        for seed in 0..100 {
            let y = consolidate(&x, 0.3, seed).expect("retry cap generous at this scale");
            let props = check_consolidation_properties(&x, &y, 0.3);
            assert_eq!(props, [true; 4], "seed {seed} failed {props:?}");
        }
    }

    #[test]
    fn rejects_bad_epsilon() {
        let x = FractionalMatching::new(4);
        assert!(consolidate(&x, 0.0, 0).is_err());
        assert!(consolidate(&x, 1.0, 0).is_err());
    }

    #[test]
    fn weight_bounds_enforced() {
        let mut x = FractionalMatching::new(4);
        assert!(x.set(0, 1, 1.2).is_err());
        assert!(x.set(0, 0, 0.5).is_err());
        assert!(x.set(0, 9, 0.5).is_err());
        x.set(0, 1, 0.25).unwrap();
        x.set(1, 2, 0.5).unwrap();
        assert_eq!(x.vertex_sum(1), 0.75);
        assert_eq!(x.total(), 0.75);
    }
}
