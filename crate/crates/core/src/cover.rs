//! Matching covers: construction from a regularity partition, hitting-set
//! and matching-cover verification (exhaustive at tiny scale, sampled
//! otherwise), a brute-force optimal cover, double-cover lifting, and
//! verification of induced-matching edge partitions.
//!
//! A subgraph `H` of `G` is an `alpha`-matching cover when
//! `mu(H[A,B]) >= mu(G[A,B]) - alpha*n` for all disjoint `A, B`; an
//! `alpha`-hitting set contains an edge between every perfectly matched
//! disjoint pair with `|A| = |B| = ceil(alpha*n)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{encode_edge, Graph, Vertex, VertexSet};
use crate::matching::{max_matching_bipartite, max_matching_general, Matching};
use crate::oracle::{mask_rows, mu_bipartite_masks};
use crate::regularity::{PartitionResult, PartitionRun, RegularityConfig};

/// Parameters of the cover construction.
#[derive(Debug, Clone)]
pub struct CoverParams {
    /// Lower bound on the number of partition classes.
    pub t: u32,
    pub gamma: f64,
    /// Sampling probability for good-pair edges.
    pub p_sample: f64,
    /// Density cutoff for a good pair; default `8 * gamma`.
    pub good_density_threshold: f64,
    pub max_rounds: u32,
    pub seed: u64,
}

impl CoverParams {
    /// Desk-scale defaults: `t = 4`, `gamma = 0.2`,
    /// `p_sample = min(1, 10 / ln n)`, threshold `8 * gamma`.
    pub fn defaults(n: u32, seed: u64) -> Self {
        let gamma = 0.2;
        CoverParams {
            t: 4,
            gamma,
            p_sample: (10.0 / (n.max(2) as f64).ln()).min(1.0),
            good_density_threshold: 8.0 * gamma,
            max_rounds: 20,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p_sample) || self.p_sample <= 0.0 {
            return Err(Error::InvalidParam(format!("p_sample {} outside (0,1]", self.p_sample)));
        }
        if self.good_density_threshold < 0.0 {
            return Err(Error::InvalidParam("negative density threshold".into()));
        }
        Ok(())
    }

    /// Verification default `alpha = (gamma * ln(1/gamma))^(1/3)`; the
    /// hidden constant of the analysis is not asserted.
    pub fn default_alpha(&self) -> f64 {
        (self.gamma * (1.0 / self.gamma).ln()).cbrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairClass {
    Good,
    Bad,
}

/// Output of the cover construction: `F = F1 ∪ F2 ∪ F3` with the pair
/// classification and the partition used.
#[derive(Debug)]
pub struct CoverReport {
    /// Edges between bad pairs.
    pub f1: Vec<(Vertex, Vertex)>,
    /// Edges inside classes (including the exceptional one).
    pub f2: Vec<(Vertex, Vertex)>,
    /// Sampled edges between good pairs.
    pub f3: Vec<(Vertex, Vertex)>,
    /// Classification of every class pair `0 <= i < j <= k`.
    pub pair_class: BTreeMap<(usize, usize), PairClass>,
    pub partition: PartitionResult,
    pub params: CoverParams,
}

impl CoverReport {
    /// The cover `F`, deduplicated and in canonical order.
    pub fn f(&self) -> Vec<(Vertex, Vertex)> {
        let mut all: Vec<(Vertex, Vertex)> =
            self.f1.iter().chain(&self.f2).chain(&self.f3).copied().collect();
        all.sort_unstable();
        all.dedup();
        all
    }

    pub fn f_len(&self) -> usize {
        self.f1.len() + self.f2.len() + self.f3.len()
    }

    /// The three subsets are disjoint by construction; exposed for tests.
    pub fn parts_disjoint(&self) -> bool {
        let mut all: Vec<(Vertex, Vertex)> =
            self.f1.iter().chain(&self.f2).chain(&self.f3).copied().collect();
        let before = all.len();
        all.sort_unstable();
        all.dedup();
        all.len() == before
    }

    /// Desk-scale sparsity bound for `|F1| + |F2|`: the three itemized
    /// counts summed, `(gamma^2 + 1/k + gamma + 5*gamma) * n^2 + n^2/k`.
    pub fn f12_sparsity_bound(&self, n: u32) -> f64 {
        let gamma = self.params.gamma;
        let k = self.partition.partition.k().max(1) as f64;
        let n2 = (n as f64).powi(2);
        (gamma * gamma + 1.0 / k + gamma + 5.0 * gamma) * n2 + n2 / k
    }

    /// Write `partition.txt`, `pairs.csv`, and `f1/f2/f3.edges` files.
    pub fn write_to_dir(&self, n: u32, dir: &std::path::Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("partition.txt"), self.partition.partition.to_text())?;
        let mut csv = String::from(crate::regularity::PairStatus::csv_header());
        csv.push('\n');
        for s in &self.partition.statuses {
            let _ = writeln!(csv, "{}", s.to_csv_row());
        }
        std::fs::write(dir.join("pairs.csv"), csv)?;
        for (name, edges) in [("f1", &self.f1), ("f2", &self.f2), ("f3", &self.f3)] {
            let g = Graph::from_edges(n, edges.iter().copied())?;
            std::fs::write(dir.join(format!("{name}.edges")), crate::graph::write_edge_list(&g))?;
        }
        Ok(())
    }
}

enum BuildPhase {
    Partition(Box<PartitionRun>),
    Assemble {
        partition: PartitionResult,
        pair_cursor: usize,
        pairs: Vec<(usize, usize)>,
        pair_class: BTreeMap<(usize, usize), PairClass>,
        f1: Vec<(Vertex, Vertex)>,
        f2: Vec<(Vertex, Vertex)>,
        f3: Vec<(Vertex, Vertex)>,
        rng: ChaCha8Rng,
    },
    Done(Box<CoverReport>),
    Taken,
}

/// Resumable cover construction: partition rounds, then pair-by-pair
/// assembly of `F1`, `F2`, `F3`. [`build_cover`] drives it to completion;
/// the dynamic engine advances it a few steps per update.
pub struct CoverBuild {
    params: CoverParams,
    phase: BuildPhase,
}

impl CoverBuild {
    pub fn new(g: &Graph, params: CoverParams) -> Result<Self> {
        params.validate()?;
        let cfg = RegularityConfig {
            t: params.t,
            gamma: params.gamma,
            max_rounds: params.max_rounds,
            seed: params.seed,
        };
        let run = PartitionRun::new(g, cfg)?;
        Ok(CoverBuild { params, phase: BuildPhase::Partition(Box::new(run)) })
    }

    pub fn is_done(&self) -> bool {
        matches!(self.phase, BuildPhase::Done(_))
    }

    /// Upper bound on the units a single step may charge.
    pub fn max_step_units(&self, n: u32) -> u64 {
        let n = n as u64;
        n * n / 4 + 4 * n
    }

    /// One unit of progress; returns work units charged (adjacency probes
    /// plus edge moves, by the size-based model).
    pub fn step(&mut self, g: &Graph) -> Result<u64> {
        match &mut self.phase {
            BuildPhase::Done(_) | BuildPhase::Taken => Ok(0),
            BuildPhase::Partition(run) => {
                let units = run.step(g)?;
                if run.is_done() {
                    let BuildPhase::Partition(run) =
                        std::mem::replace(&mut self.phase, BuildPhase::Taken)
                    else {
                        unreachable!()
                    };
                    let partition = run.into_result();
                    let k = partition.partition.k();
                    // pairs 0 <= i <= j <= k; i == j collects F2
                    let mut pairs = Vec::new();
                    for i in 0..=k {
                        for j in i..=k {
                            pairs.push((i, j));
                        }
                    }
                    let mut rng = ChaCha8Rng::seed_from_u64(self.params.seed);
                    rng.set_stream(1); // the partition shuffle uses stream 0
                    self.phase = BuildPhase::Assemble {
                        partition,
                        pair_cursor: 0,
                        pairs,
                        pair_class: BTreeMap::new(),
                        f1: Vec::new(),
                        f2: Vec::new(),
                        f3: Vec::new(),
                        rng,
                    };
                }
                Ok(units)
            }
            BuildPhase::Assemble {
                partition,
                pair_cursor,
                pairs,
                pair_class,
                f1,
                f2,
                f3,
                rng,
            } => {
                if *pair_cursor >= pairs.len() {
                    let BuildPhase::Assemble { partition, pair_class, f1, f2, f3, .. } =
                        std::mem::replace(&mut self.phase, BuildPhase::Taken)
                    else {
                        unreachable!()
                    };
                    self.phase = BuildPhase::Done(Box::new(CoverReport {
                        f1,
                        f2,
                        f3,
                        pair_class,
                        partition,
                        params: self.params.clone(),
                    }));
                    return Ok(1);
                }
                let (i, j) = pairs[*pair_cursor];
                *pair_cursor += 1;
                let part = &partition.partition;
                if i == j {
                    let within = g.edges_within(part.class(i));
                    let units = (part.class(i).len() as u64).pow(2) / 2 + within.len() as u64;
                    f2.extend(within);
                    return Ok(units);
                }
                let status = partition
                    .statuses
                    .iter()
                    .find(|s| (s.i, s.j) == (i, j) || (s.i, s.j) == (j, i));
                let good = i != 0
                    && status.is_some_and(|s| {
                        s.regular
                            && s.density.as_f64() >= self.params.good_density_threshold - 1e-12
                    });
                pair_class.insert((i, j), if good { PairClass::Good } else { PairClass::Bad });
                let edges = g.edges_between_list(part.class(i), part.class(j));
                let units =
                    part.class(i).len() as u64 * part.class(j).len() as u64 + edges.len() as u64;
                if good {
                    // independent Bernoulli per edge, sorted encoded order
                    let mut sorted = edges;
                    sorted.sort_unstable_by_key(|&(u, v)| encode_edge(g.n(), u, v));
                    for (u, v) in sorted {
                        if rng.random::<f64>() < self.params.p_sample {
                            f3.push((u, v));
                        }
                    }
                } else {
                    f1.extend(edges);
                }
                Ok(units)
            }
        }
    }

    pub fn into_report(self) -> CoverReport {
        match self.phase {
            BuildPhase::Done(report) => *report,
            _ => panic!("cover build not finished"),
        }
    }
}

/// Build the cover `F = F1 ∪ F2 ∪ F3` of `g`.
pub fn build_cover(g: &Graph, params: CoverParams) -> Result<CoverReport> {
    let mut build = CoverBuild::new(g, params)?;
    while !build.is_done() {
        build.step(g)?;
    }
    Ok(build.into_report())
}

/// Verification verdict with the first violated pair, if any.
#[derive(Debug, Clone)]
pub struct VerifyOutcome {
    pub pass: bool,
    pub counterexample: Option<(VertexSet, VertexSet)>,
    pub pairs_checked: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    Exhaustive,
    Sampled { samples: u32, seed: u64 },
}

fn check_h_subgraph(g: &Graph, h: &Graph) -> Result<()> {
    if h.n() != g.n() {
        return Err(Error::InvalidParam(format!(
            "cover has {} vertices, graph has {}",
            h.n(),
            g.n()
        )));
    }
    if let Some((u, v)) = h.edges().find(|&(u, v)| !g.adjacency_query(u, v)) {
        return Err(Error::InvalidParam(format!("cover edge ({u},{v}) not in the graph")));
    }
    Ok(())
}

/// Iterate canonical disjoint nonempty pairs `(a, b)` of subsets of `0..n`
/// (the lowest vertex of `a | b` lies in `a`); stop when `visit` returns
/// false.
fn for_each_disjoint_pair(n: u32, mut visit: impl FnMut(u32, u32) -> bool) {
    let full: u32 = (1u32 << n) - 1;
    for a in 1..=full {
        let rem = full & !a;
        let mut b = rem;
        loop {
            if b != 0 {
                let lsb = (a | b) & (a | b).wrapping_neg();
                if a & lsb != 0 && !visit(a, b) {
                    return;
                }
            }
            if b == 0 {
                break;
            }
            b = (b - 1) & rem;
        }
    }
}

fn mask_to_set(mask: u32) -> VertexSet {
    VertexSet::new((0..32).filter(|&i| mask >> i & 1 == 1).collect())
}

/// Check that `h` is an `alpha`-hitting set of `g`: every perfectly matched
/// disjoint pair with `|A| = |B| = ceil(alpha*n)` has an `h`-edge between
/// its sides. Exhaustive mode requires `n <= 14`.
pub fn verify_hitting_set(
    g: &Graph,
    h: &Graph,
    alpha: f64,
    mode: VerifyMode,
) -> Result<VerifyOutcome> {
    check_h_subgraph(g, h)?;
    let n = g.n();
    let s = ((alpha * n as f64 - 1e-9).ceil()).max(0.0) as usize;
    if s == 0 || 2 * s > n as usize {
        // no pairs of the required shape exist; vacuous pass
        return Ok(VerifyOutcome { pass: true, counterexample: None, pairs_checked: 0 });
    }
    match mode {
        VerifyMode::Exhaustive => {
            if n > 14 {
                return Err(Error::InvalidParam(format!(
                    "exhaustive hitting-set verification capped at n <= 14, got {n}"
                )));
            }
            let rows_g = mask_rows(g);
            let rows_h = mask_rows(h);
            let mut checked = 0u64;
            let mut counterexample = None;
            for_each_disjoint_pair(n, |a, b| {
                if a.count_ones() as usize != s || b.count_ones() as usize != s {
                    return true;
                }
                if mu_bipartite_masks(&rows_g, a, b) as usize != s {
                    return true;
                }
                checked += 1;
                let hit = (0..n).any(|u| a >> u & 1 == 1 && rows_h[u as usize] & b != 0);
                if hit {
                    true
                } else {
                    counterexample = Some((mask_to_set(a), mask_to_set(b)));
                    false
                }
            });
            Ok(VerifyOutcome {
                pass: counterexample.is_none(),
                counterexample,
                pairs_checked: checked,
            })
        }
        VerifyMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut checked = 0u64;
            for (a, b) in sampled_matched_pairs(g, s, samples, &mut rng) {
                checked += 1;
                if h.edges_between(&a, &b) == 0 {
                    return Ok(VerifyOutcome {
                        pass: false,
                        counterexample: Some((a, b)),
                        pairs_checked: checked,
                    });
                }
            }
            Ok(VerifyOutcome { pass: true, counterexample: None, pairs_checked: checked })
        }
    }
}

/// Draw perfectly matched `(A, B)` pairs of side size `s` from the maximum
/// matching and random greedy matchings, splitting edge endpoints uniformly.
fn sampled_matched_pairs(
    g: &Graph,
    s: usize,
    samples: u32,
    rng: &mut ChaCha8Rng,
) -> Vec<(VertexSet, VertexSet)> {
    let mut pairs = Vec::new();
    if s == 0 {
        return pairs;
    }
    let maximum = max_matching_general(g);
    let mut edge_pool: Vec<(Vertex, Vertex)> = g.edges().collect();
    for round in 0..samples {
        let matching = if round % 2 == 0 {
            maximum.clone()
        } else {
            edge_pool.shuffle(rng);
            crate::matching::greedy_stream_matching(g.n(), edge_pool.iter().copied())
        };
        if matching.size() < s {
            continue;
        }
        let mut chosen: Vec<(Vertex, Vertex)> = matching.edges().to_vec();
        chosen.shuffle(rng);
        chosen.truncate(s);
        let mut a = Vec::with_capacity(s);
        let mut b = Vec::with_capacity(s);
        for &(u, v) in &chosen {
            if rng.random::<bool>() {
                a.push(u);
                b.push(v);
            } else {
                a.push(v);
                b.push(u);
            }
        }
        pairs.push((VertexSet::new(a), VertexSet::new(b)));
    }
    pairs
}

/// Check that `h` is an `alpha`-matching cover of `g`:
/// `mu(h[A,B]) >= mu(g[A,B]) - alpha*n` over all (exhaustive, `n <= 12`) or
/// sampled disjoint pairs.
pub fn verify_matching_cover(
    g: &Graph,
    h: &Graph,
    alpha: f64,
    mode: VerifyMode,
) -> Result<VerifyOutcome> {
    check_h_subgraph(g, h)?;
    let n = g.n();
    let slack = alpha * n as f64 + 1e-9;
    match mode {
        VerifyMode::Exhaustive => {
            if n > 12 {
                return Err(Error::InvalidParam(format!(
                    "exhaustive matching-cover verification capped at n <= 12, got {n}"
                )));
            }
            let rows_g = mask_rows(g);
            let rows_h = mask_rows(h);
            // A-masks split across threads; the lowest violating (a, b)
            // is reported afterwards, so the result stays deterministic
            let full: u32 = (1 << n) - 1;
            let found: Vec<(u32, u32, u64)> = (1..=full)
                .into_par_iter()
                .map(|a| {
                    let mut checked = 0u64;
                    let rem = full & !a;
                    let mut b = rem;
                    let mut bad = None;
                    loop {
                        if b != 0 {
                            let lsb = (a | b) & (a | b).wrapping_neg();
                            if a & lsb != 0 {
                                let mu_g = mu_bipartite_masks(&rows_g, a, b);
                                if mu_g as f64 > slack {
                                    checked += 1;
                                    let mu_h = mu_bipartite_masks(&rows_h, a, b);
                                    if (mu_g - mu_h) as f64 > slack {
                                        bad = Some((a, b));
                                        break;
                                    }
                                }
                            }
                        }
                        if b == 0 {
                            break;
                        }
                        b = (b - 1) & rem;
                    }
                    (bad.map_or(0, |p| p.0), bad.map_or(0, |p| p.1), checked)
                })
                .collect();
            let pairs_checked = found.iter().map(|&(_, _, c)| c).sum();
            let counterexample = found
                .iter()
                .filter(|&&(a, _, _)| a != 0)
                .min_by_key(|&&(a, b, _)| (a, b))
                .map(|&(a, b, _)| (mask_to_set(a), mask_to_set(b)));
            Ok(VerifyOutcome { pass: counterexample.is_none(), counterexample, pairs_checked })
        }
        VerifyMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut checked = 0u64;
            let mu_full = max_matching_general(g).size();
            for round in 0..samples {
                // matched pairs of varying sizes plus fully random sets
                let pair = if round % 3 == 2 {
                    random_disjoint_pair(n, &mut rng)
                } else if mu_full > 0 {
                    let s = rng.random_range(1..=mu_full);
                    sampled_matched_pairs(g, s, 1, &mut rng).pop()
                } else {
                    None
                };
                let Some((a, b)) = pair else { continue };
                checked += 1;
                let mu_g = max_matching_bipartite(g, &a, &b)?.size();
                if mu_g as f64 <= slack {
                    continue;
                }
                let mu_h = max_matching_bipartite(h, &a, &b)?.size();
                if (mu_g - mu_h) as f64 > slack {
                    return Ok(VerifyOutcome {
                        pass: false,
                        counterexample: Some((a, b)),
                        pairs_checked: checked,
                    });
                }
            }
            Ok(VerifyOutcome { pass: true, counterexample: None, pairs_checked: checked })
        }
    }
}

fn random_disjoint_pair(n: u32, rng: &mut ChaCha8Rng) -> Option<(VertexSet, VertexSet)> {
    if n < 2 {
        return None;
    }
    let mut order: Vec<Vertex> = (0..n).collect();
    order.shuffle(rng);
    let half = (n as usize / 2).max(1);
    let asize = rng.random_range(1..=half);
    let bsize = rng.random_range(1..=(n as usize - asize));
    Some((
        VertexSet::new(order[..asize].to_vec()),
        VertexSet::new(order[asize..asize + bsize].to_vec()),
    ))
}

/// Smallest edge subset passing exhaustive matching-cover verification;
/// ties broken by lexicographic edge encoding. Enumerates subsets in
/// increasing size, so `m <= 20`.
pub fn brute_force_optimal_cover(g: &Graph, alpha: f64) -> Result<Vec<(Vertex, Vertex)>> {
    let m = g.m();
    if m > 20 {
        return Err(Error::InvalidParam(format!("brute-force cover capped at m <= 20, got {m}")));
    }
    if g.n() > 12 {
        return Err(Error::InvalidParam(format!(
            "brute-force cover uses exhaustive verification, n <= 12 required, got {}",
            g.n()
        )));
    }
    let n = g.n();
    let slack = alpha * n as f64 + 1e-9;
    let rows_g = mask_rows(g);
    let mut edges: Vec<(Vertex, Vertex)> = g.edges().collect();
    edges.sort_unstable_by_key(|&(u, v)| encode_edge(n, u, v));

    // pairs any candidate must satisfy; everything else holds trivially
    let mut relevant: Vec<(u32, u32, u32)> = Vec::new();
    for_each_disjoint_pair(n, |a, b| {
        let mu_g = mu_bipartite_masks(&rows_g, a, b);
        if mu_g as f64 > slack {
            relevant.push((a, b, mu_g));
        }
        true
    });

    let m = m as usize;
    for size in 0..=m {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            let mut rows_h = vec![0u32; n as usize];
            for &idx in &combo {
                let (u, v) = edges[idx];
                rows_h[u as usize] |= 1 << v;
                rows_h[v as usize] |= 1 << u;
            }
            let mut violated = None;
            for (pos, &(a, b, mu_g)) in relevant.iter().enumerate() {
                if (mu_g - mu_bipartite_masks(&rows_h, a, b)) as f64 > slack {
                    violated = Some(pos);
                    break;
                }
            }
            match violated {
                None => return Ok(combo.iter().map(|&i| edges[i]).collect()),
                Some(pos) => {
                    // recently violating pairs prune candidates fast
                    relevant[..=pos].rotate_right(1);
                }
            }
            if !next_combination(&mut combo, m) {
                break;
            }
        }
    }
    unreachable!("the full edge set always passes");
}

fn next_combination(combo: &mut [usize], m: usize) -> bool {
    let k = combo.len();
    if k == 0 {
        return false;
    }
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < m - (k - i) {
            combo[i] += 1;
            for j in (i + 1)..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Lift a bipartite cover of the double cover back to the base graph: keep
/// `(u,v)` iff the cover kept `(u, n+v)` or `(v, n+u)`. An `alpha'`-cover
/// of the double cover yields a `2*alpha'`-cover of `g`.
pub fn lift_cover_via_double_cover(
    g: &Graph,
    bipartite_cover_fn: impl FnOnce(&Graph) -> Result<Vec<(Vertex, Vertex)>>,
) -> Result<Vec<(Vertex, Vertex)>> {
    let n = g.n();
    let dc = g.double_cover();
    let cover = bipartite_cover_fn(&dc)?;
    let mut lifted: Vec<(Vertex, Vertex)> = cover
        .into_iter()
        .map(|(x, y)| {
            let (lo, hi) = if x < y { (x, y) } else { (y, x) };
            debug_assert!(lo < n && hi >= n, "double-cover edges cross the bipartition");
            let (u, v) = (lo, hi - n);
            if u < v {
                (u, v)
            } else {
                (v, u)
            }
        })
        .collect();
    lifted.sort_unstable();
    lifted.dedup();
    debug_assert!(lifted.iter().all(|&(u, v)| g.adjacency_query(u, v)));
    Ok(lifted)
}

/// True iff `matchings` partition `E(g)` into induced matchings of size
/// exactly `r`: vertex-disjoint within each matching, and no `g`-edge joins
/// two vertices of the same matching besides its own edges.
pub fn verify_rs_partition(g: &Graph, matchings: &[Matching], r: usize) -> bool {
    let mut seen = std::collections::BTreeSet::new();
    for m in matchings {
        if m.size() != r || !m.is_valid_in(g) {
            return false;
        }
        for &(u, v) in m.edges() {
            if !seen.insert(if u < v { (u, v) } else { (v, u) }) {
                return false; // edge appears in two matchings
            }
        }
        let vertices = m.covered_vertices();
        let inside = g.edges_within(&vertices);
        if inside.len() != m.size() {
            return false; // a chord makes the matching non-induced
        }
    }
    seen.len() as u64 == g.support_size()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_graph, rs_layered_matchings, GraphKind};

    #[test]
    fn cover_of_empty_graph_is_empty() {
        let g = Graph::new(32);
        let report = build_cover(&g, CoverParams::defaults(32, 1)).unwrap();
        assert_eq!(report.f_len(), 0);
    }

    #[test]
    fn all_edges_inside_one_class_go_to_f2() {
        // t = 1 forces a single class holding every edge
        let g = gen_graph(GraphKind::Gnp { p: 0.5 }, 16, 3).unwrap();
        let mut params = CoverParams::defaults(16, 3);
        params.t = 1;
        let report = build_cover(&g, params).unwrap();
        assert_eq!(report.f1.len(), 0);
        assert_eq!(report.f3.len(), 0);
        assert_eq!(report.f().len() as u64, g.m(), "F2 takes everything");
    }

    #[test]
    fn cover_parts_disjoint_and_deterministic() {
        let g = gen_graph(GraphKind::Gnp { p: 0.5 }, 256, 9).unwrap();
        let mut params = CoverParams::defaults(256, 9);
        params.gamma = 0.15;
        params.p_sample = 0.3;
        params.good_density_threshold = 0.4;
        let r1 = build_cover(&g, params.clone()).unwrap();
        let r2 = build_cover(&g, params.clone()).unwrap();
        assert!(r1.parts_disjoint());
        assert_eq!(r1.f(), r2.f(), "same seed, same cover");
        assert!(!r1.f3.is_empty(), "good pairs should exist at these densities");
        assert!(
            (r1.f_len() as f64) < 0.8 * g.m() as f64,
            "sampling should shrink the cover: {} of {}",
            r1.f_len(),
            g.m()
        );
        params.seed = 10;
        let r3 = build_cover(&g, params).unwrap();
        assert_ne!(r1.f3, r3.f3, "different seed resamples F3");
    }

    #[test]
    fn good_pairs_require_density_and_regularity() {
        let g = gen_graph(GraphKind::Gnp { p: 0.5 }, 256, 21).unwrap();
        let mut params = CoverParams::defaults(256, 21);
        params.gamma = 0.15;
        params.p_sample = 0.5;
        params.good_density_threshold = 0.4;
        let report = build_cover(&g, params).unwrap();
        let k = report.partition.partition.k();
        for i in 0..=k {
            // pairs touching the exceptional class are always bad
            if report.pair_class.contains_key(&(0, i)) {
                assert_eq!(report.pair_class[&(0, i)], PairClass::Bad);
            }
        }
        assert!(report.pair_class.values().any(|&c| c == PairClass::Good));
    }

    #[test]
    fn hitting_set_trivial_cases() {
        let g = gen_graph(GraphKind::Gnp { p: 0.8 }, 10, 4).unwrap();
        let out = verify_hitting_set(&g, &g, 0.3, VerifyMode::Exhaustive).unwrap();
        assert!(out.pass, "the graph hits itself at any alpha");

        let pm = gen_graph(GraphKind::PerfectMatching, 10, 0).unwrap();
        let empty = Graph::new(10);
        let out = verify_hitting_set(&pm, &empty, 0.2, VerifyMode::Exhaustive).unwrap();
        assert!(!out.pass);
        let (a, b) = out.counterexample.unwrap();
        assert_eq!((a.len(), b.len()), (2, 2));
        assert_eq!(pm.edges_between(&a, &b), 2, "counterexample is a 2-edge submatching");
    }

    #[test]
    fn matching_cover_trivial_cases() {
        let g = gen_graph(GraphKind::Gnp { p: 0.7 }, 10, 5).unwrap();
        assert!(verify_matching_cover(&g, &g, 0.0, VerifyMode::Exhaustive).unwrap().pass);

        let pm = gen_graph(GraphKind::PerfectMatching, 8, 0).unwrap();
        let empty = Graph::new(8);
        // mu = 4: alpha below mu/n = 1/2 fails against the empty cover
        assert!(!verify_matching_cover(&pm, &empty, 0.3, VerifyMode::Exhaustive).unwrap().pass);
        assert!(verify_matching_cover(&pm, &empty, 0.6, VerifyMode::Exhaustive).unwrap().pass);
    }

    #[test]
    fn sampled_mode_agrees_on_clear_cases() {
        let pm = gen_graph(GraphKind::PerfectMatching, 40, 0).unwrap();
        let empty = Graph::new(40);
        let mode = VerifyMode::Sampled { samples: 200, seed: 11 };
        assert!(!verify_matching_cover(&pm, &empty, 0.1, mode).unwrap().pass);
        assert!(verify_matching_cover(&pm, &pm, 0.0, mode).unwrap().pass);
        assert!(!verify_hitting_set(&pm, &empty, 0.1, mode).unwrap().pass);
        assert!(verify_hitting_set(&pm, &pm, 0.1, mode).unwrap().pass);
    }

    #[test]
    fn verify_rejects_non_subgraph_cover() {
        let g = gen_graph(GraphKind::PerfectMatching, 6, 0).unwrap();
        let mut h = Graph::new(6);
        h.insert_edge(0, 2).unwrap();
        assert!(verify_matching_cover(&g, &h, 0.5, VerifyMode::Exhaustive).is_err());
    }

    #[test]
    fn brute_force_cover_small_cases() {
        // single edge: slack alpha*n >= 1 makes the empty set optimal
        let single = Graph::from_edges(4, [(0, 1)]).unwrap();
        assert_eq!(brute_force_optimal_cover(&single, 0.3).unwrap().len(), 0);

        // perfect matching at alpha = 0: every edge is needed
        let pm = gen_graph(GraphKind::PerfectMatching, 6, 0).unwrap();
        assert_eq!(brute_force_optimal_cover(&pm, 0.0).unwrap().len(), 3);

        // triangle at alpha = 1/3: mu of any pair is 1 <= alpha*n = 1
        let tri = Graph::from_edges(3, [(0, 1), (0, 2), (1, 2)]).unwrap();
        let cover = brute_force_optimal_cover(&tri, 1.0 / 3.0).unwrap();
        assert_eq!(cover.len(), 0);
        let h = Graph::from_edges(3, cover.into_iter()).unwrap();
        assert!(verify_matching_cover(&tri, &h, 1.0 / 3.0, VerifyMode::Exhaustive).unwrap().pass);
    }

    #[test]
    fn brute_force_is_minimal_vs_scan() {
        // check minimality by scanning all subsets of smaller size
        let g = gen_graph(GraphKind::Gnp { p: 0.45 }, 7, 17).unwrap();
        let alpha = 0.15;
        let best = brute_force_optimal_cover(&g, alpha).unwrap();
        let h = Graph::from_edges(7, best.iter().copied()).unwrap();
        assert!(verify_matching_cover(&g, &h, alpha, VerifyMode::Exhaustive).unwrap().pass);

        let edges: Vec<_> = g.edges().collect();
        let m = edges.len();
        for mask in 0u32..(1 << m) {
            if (mask.count_ones() as usize) < best.len() {
                let subset: Vec<_> = (0..m).filter(|&i| mask >> i & 1 == 1).map(|i| edges[i]).collect();
                let h = Graph::from_edges(7, subset.into_iter()).unwrap();
                assert!(
                    !verify_matching_cover(&g, &h, alpha, VerifyMode::Exhaustive).unwrap().pass,
                    "a smaller cover exists; brute force not minimal"
                );
            }
        }
    }

    #[test]
    fn double_cover_lift_trivial_cases() {
        let g = gen_graph(GraphKind::Gnp { p: 0.6 }, 8, 2).unwrap();
        let lifted = lift_cover_via_double_cover(&g, |dc| Ok(dc.edges().collect())).unwrap();
        assert_eq!(lifted, g.edges().collect::<Vec<_>>());
        let lifted = lift_cover_via_double_cover(&g, |_| Ok(Vec::new())).unwrap();
        assert!(lifted.is_empty());
    }

    #[test]
    fn rs_partition_verification() {
        let pm = gen_graph(GraphKind::PerfectMatching, 8, 0).unwrap();
        let all = Matching::new(pm.edges().collect());
        assert!(verify_rs_partition(&pm, &[all], 4));

        // K4: two disjoint edges form a matching but chords break inducedness
        let k4 = gen_graph(GraphKind::Gnp { p: 1.0 }, 4, 0).unwrap();
        let claim = Matching::new(vec![(0, 1), (2, 3)]);
        assert!(!verify_rs_partition(&k4, &[claim], 2));

        let rs = gen_graph(GraphKind::RsLayered { r: 4, t: 3 }, 16, 0).unwrap();
        let layers: Vec<Matching> =
            rs_layered_matchings(4, 3).into_iter().map(Matching::new).collect();
        assert!(verify_rs_partition(&rs, &layers, 4));
        assert!(!verify_rs_partition(&rs, &layers, 3), "wrong r must fail");
        assert!(!verify_rs_partition(&rs, &layers[..2], 4), "missing edges must fail");
    }

    #[test]
    fn cover_report_round_trips_to_dir() {
        let g = gen_graph(GraphKind::Gnp { p: 0.5 }, 20, 8).unwrap();
        let mut params = CoverParams::defaults(20, 8);
        params.t = 2;
        let report = build_cover(&g, params).unwrap();
        let dir = std::env::temp_dir().join(format!("coverdir-{}", std::process::id()));
        report.write_to_dir(20, &dir).unwrap();
        for file in ["partition.txt", "pairs.csv", "f1.edges", "f2.edges", "f3.edges"] {
            assert!(dir.join(file).exists(), "{file} missing");
        }
        let f2 =
            crate::graph::read_edge_list(&std::fs::read_to_string(dir.join("f2.edges")).unwrap())
                .unwrap();
        assert_eq!(f2.m() as usize, report.f2.len());
        std::fs::remove_dir_all(&dir).ok();
    }
}
