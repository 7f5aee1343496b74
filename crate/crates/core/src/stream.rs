//! Single-pass streaming matching: the buffer cascade, vertex
//! sparsification, and the two end-to-end drivers (store-plus-cascade and
//! guess-the-optimum branching).
//!
//! The cascade keeps `t = ceil(log2 k) + 2` buffers backed by compact edge
//! dictionaries. `B1` flushes each time it has taken `m/k` arrivals: a
//! cover of its contents moves to `B2` and `B1` restarts. Higher buffers
//! flush at twice the cover-size bound. The flush counts obey
//! `k_i <= k / 2^(i-1)` and the top buffer never flushes; both are enforced
//! as hard errors, since a violation means the cover subroutine broke its
//! size contract.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::compact::CompactEdgeDict;
use crate::cover::{brute_force_optimal_cover, build_cover, CoverParams};
use crate::error::{Error, Result};
use crate::graph::{decode_edge, encode_edge, pair_universe, Graph, Vertex};
use crate::matching::{max_matching_general, Matching};

/// Edge source that can be consumed exactly once; a second read is a hard
/// error.
#[derive(Debug)]
pub struct SinglePassStream {
    edges: Option<Vec<(Vertex, Vertex)>>,
    len: u64,
}

impl SinglePassStream {
    pub fn new(edges: Vec<(Vertex, Vertex)>) -> Self {
        let len = edges.len() as u64;
        SinglePassStream { edges: Some(edges), len }
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Take the edges; errors on any second read.
    pub fn take(&mut self) -> Result<Vec<(Vertex, Vertex)>> {
        self.edges.take().ok_or(Error::SinglePassViolated)
    }
}

/// A matching-cover subroutine over an edge set: regularity-based,
/// brute-force at tiny scale, or identity for plumbing.
pub type CoverFn<'a> = Box<dyn FnMut(&Graph) -> Result<Vec<(Vertex, Vertex)>> + 'a>;

/// Cover subroutine families usable inside the cascade.
#[derive(Debug, Clone)]
pub enum CoverKind {
    /// Returns its input; a 0-matching cover.
    Identity,
    /// Exhaustive optimal cover; requires tiny buffers (`m <= 20`).
    Brute { alpha: f64 },
    /// Brute force when the buffer is tiny, identity otherwise. Still honors
    /// any `alpha'` since identity loses nothing.
    BruteOrIdentity { alpha: f64 },
    /// Regularity-based construction; the seed is advanced per flush.
    Regularity { params: CoverParams },
}

pub fn make_cover_fn(kind: CoverKind) -> CoverFn<'static> {
    let mut flushes = 0u64;
    Box::new(move |g: &Graph| {
        flushes += 1;
        match &kind {
            CoverKind::Identity => Ok(g.edges().collect()),
            CoverKind::Brute { alpha } => brute_force_optimal_cover(g, *alpha),
            CoverKind::BruteOrIdentity { alpha } => {
                if g.m() <= 20 && g.n() <= 12 {
                    brute_force_optimal_cover(g, *alpha)
                } else {
                    Ok(g.edges().collect())
                }
            }
            CoverKind::Regularity { params } => {
                let mut p = params.clone();
                p.seed = p.seed.wrapping_add(flushes);
                if (g.n() as f64) < p.t as f64 / p.gamma {
                    // buffer too small for the partition; take everything
                    return Ok(g.edges().collect());
                }
                Ok(build_cover(g, p)?.f())
            }
        }
    })
}

/// How the per-buffer capacity bound `MC` is fixed.
#[derive(Debug, Clone, Copy)]
pub enum McBound {
    Fixed(u64),
    /// Measure the first flush's cover and scale it.
    CalibrateFirstFlush { factor: f64 },
}

#[derive(Debug, Clone)]
pub struct CascadeConfig {
    pub n: u32,
    /// Declared bound on the stream length (with multiplicity).
    pub m_bound: u64,
    pub k: u64,
    /// Target cover parameter of the whole cascade; each flush must honor
    /// `alpha' = alpha / (2k)`.
    pub alpha: f64,
    pub mc_bound: McBound,
}

struct Buffer {
    dict: CompactEdgeDict,
    edges: Vec<(Vertex, Vertex)>,
    arrivals: u64,
}

impl Buffer {
    fn new(universe: u64, capacity: u64) -> Self {
        Buffer {
            dict: CompactEdgeDict::new(universe, capacity as usize),
            edges: Vec::new(),
            arrivals: 0,
        }
    }

    fn insert(&mut self, n: u32, u: Vertex, v: Vertex) -> Result<()> {
        self.arrivals += 1;
        if self.dict.insert(encode_edge(n, u, v))? {
            self.edges.push(if u < v { (u, v) } else { (v, u) });
        }
        Ok(())
    }

    fn clear(&mut self) {
        self.dict.clear();
        self.edges.clear();
        self.arrivals = 0;
    }
}

#[derive(Debug, Clone)]
pub struct CascadeStats {
    pub flush_counts: Vec<u64>,
    pub peak_bits: u64,
    pub current_bits: u64,
    pub arrivals: u64,
    pub mc_bound: Option<u64>,
    pub t_levels: usize,
    pub b1_capacity: u64,
}

/// The buffer cascade. Feed edges one at a time; [`finalize`] returns the
/// union of all buffers, an `alpha`-matching cover of everything fed when
/// the cover subroutine honors `alpha' = alpha/2k`.
pub struct BufferCascade<'a> {
    cfg: CascadeConfig,
    t_levels: usize,
    b1_capacity: u64,
    mc_bound: Option<u64>,
    buffers: Vec<Buffer>,
    flush_counts: Vec<u64>,
    cover_fn: CoverFn<'a>,
    current_bits: u64,
    peak_bits: u64,
    arrivals: u64,
}

impl<'a> BufferCascade<'a> {
    pub fn new(cfg: CascadeConfig, cover_fn: CoverFn<'a>) -> Result<Self> {
        if cfg.k == 0 {
            return Err(Error::InvalidParam("cascade needs k >= 1".into()));
        }
        if cfg.m_bound == 0 {
            return Err(Error::InvalidParam("cascade needs a positive stream bound".into()));
        }
        let t_levels = (cfg.k.max(1) as f64).log2().ceil() as usize + 2;
        let b1_capacity = cfg.m_bound.div_ceil(cfg.k).max(1);
        let universe = pair_universe(cfg.n);
        let mc_bound = match cfg.mc_bound {
            McBound::Fixed(mc) => Some(mc.max(1)),
            McBound::CalibrateFirstFlush { .. } => None,
        };
        let mut cascade = BufferCascade {
            cfg,
            t_levels,
            b1_capacity,
            mc_bound,
            buffers: vec![Buffer::new(universe, b1_capacity)],
            flush_counts: vec![0; t_levels],
            cover_fn,
            current_bits: 0,
            peak_bits: 0,
            arrivals: 0,
        };
        if let Some(mc) = cascade.mc_bound {
            cascade.create_upper_buffers(mc);
        }
        cascade.update_space();
        Ok(cascade)
    }

    pub fn alpha_prime(&self) -> f64 {
        self.cfg.alpha / (2.0 * self.cfg.k as f64)
    }

    fn create_upper_buffers(&mut self, mc: u64) {
        let universe = pair_universe(self.cfg.n);
        // capacity 3*MC: the trigger is 2*MC and one in-contract batch may
        // overshoot by up to MC before the trigger is checked
        while self.buffers.len() < self.t_levels {
            self.buffers.push(Buffer::new(universe, (3 * mc).min(universe)));
        }
    }

    fn update_space(&mut self) {
        self.current_bits = self.buffers.iter().map(|b| b.dict.bits_used()).sum();
        self.peak_bits = self.peak_bits.max(self.current_bits);
    }

    fn should_flush(&self, level: usize) -> bool {
        if level == 0 {
            self.buffers[0].arrivals >= self.b1_capacity
        } else {
            match self.mc_bound {
                Some(mc) => self.buffers[level].edges.len() as u64 >= 2 * mc,
                None => false,
            }
        }
    }

    pub fn feed(&mut self, u: Vertex, v: Vertex) -> Result<()> {
        self.arrivals += 1;
        if self.arrivals > self.cfg.m_bound {
            return Err(Error::InvalidParam(format!(
                "stream exceeded its declared bound of {} edges",
                self.cfg.m_bound
            )));
        }
        self.buffers[0].insert(self.cfg.n, u, v)?;
        self.update_space();
        let mut level = 0;
        while level < self.buffers.len() && self.should_flush(level) {
            if level + 1 >= self.t_levels {
                return Err(Error::CascadeOverflow { level: level + 2, top: self.t_levels });
            }
            self.flush(level)?;
            level += 1;
        }
        Ok(())
    }

    fn flush(&mut self, level: usize) -> Result<()> {
        let support = Graph::from_edges(self.cfg.n, self.buffers[level].edges.iter().copied())?;
        let cover = (self.cover_fn)(&support)?;
        if self.mc_bound.is_none() {
            let McBound::CalibrateFirstFlush { factor } = self.cfg.mc_bound else {
                unreachable!()
            };
            let mc = ((cover.len() as f64 * factor).ceil() as u64).max(self.b1_capacity);
            self.mc_bound = Some(mc);
            self.create_upper_buffers(mc);
        }
        let mc = self.mc_bound.expect("bound set");
        if cover.len() as u64 > mc {
            return Err(Error::CoverSizeExceeded { got: cover.len(), bound: mc });
        }
        self.flush_counts[level] += 1;
        // k_i <= k / 2^(i-1) with i = level + 1, checked continuously
        if self.flush_counts[level] << level > self.cfg.k {
            return Err(Error::FlushBoundViolated {
                level: level + 1,
                count: self.flush_counts[level],
            });
        }
        self.buffers[level].clear();
        for (u, v) in cover {
            self.buffers[level + 1].insert(self.cfg.n, u, v)?;
        }
        self.update_space();
        Ok(())
    }

    pub fn stats(&self) -> CascadeStats {
        CascadeStats {
            flush_counts: self.flush_counts.clone(),
            peak_bits: self.peak_bits,
            current_bits: self.current_bits,
            arrivals: self.arrivals,
            mc_bound: self.mc_bound,
            t_levels: self.t_levels,
            b1_capacity: self.b1_capacity,
        }
    }

    /// The union of all buffer contents, deduplicated, canonical order.
    pub fn finalize(self) -> (Vec<(Vertex, Vertex)>, CascadeStats) {
        let stats = self.stats();
        let mut all: Vec<(Vertex, Vertex)> =
            self.buffers.iter().flat_map(|b| b.edges.iter().copied()).collect();
        all.sort_unstable();
        all.dedup();
        (all, stats)
    }
}

/// Random contraction table `V -> [range]`.
#[derive(Debug, Clone)]
pub struct SparsifierMap {
    table: Vec<u32>,
    range: u32,
}

impl SparsifierMap {
    /// A uniformly random function, as a full seeded table.
    pub fn random(n: u32, range: u32, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let range = range.max(1);
        SparsifierMap { table: (0..n).map(|_| rng.random_range(0..range)).collect(), range }
    }

    pub fn range(&self) -> u32 {
        self.range
    }

    pub fn bucket(&self, v: Vertex) -> u32 {
        self.table[v as usize]
    }

    /// Contract an edge; `None` when both endpoints collide (self-loops are
    /// dropped).
    pub fn map_edge(&self, u: Vertex, v: Vertex) -> Option<(u32, u32)> {
        let (a, b) = (self.bucket(u), self.bucket(v));
        if a == b {
            None
        } else {
            Some(if a < b { (a, b) } else { (b, a) })
        }
    }
}

/// Contract a stream into a multi-graph on `ceil(8*opt/theta)` buckets.
pub fn vertex_sparsify(
    stream: impl IntoIterator<Item = (Vertex, Vertex)>,
    n: u32,
    opt: u64,
    theta: f64,
    seed: u64,
) -> Result<(Graph, SparsifierMap)> {
    if opt == 0 {
        return Err(Error::InvalidParam("sparsification needs opt >= 1".into()));
    }
    if !(0.0..1.0).contains(&theta) || theta <= 0.0 {
        return Err(Error::InvalidParam(format!("theta {theta} outside (0,1)")));
    }
    let range = ((8.0 * opt as f64 / theta).ceil() as u64).min(u32::MAX as u64) as u32;
    let map = SparsifierMap::random(n, range, seed);
    let mut h = Graph::new_multi(range);
    for (u, v) in stream {
        if let Some((a, b)) = map.map_edge(u, v) {
            h.insert_edge(a, b)?;
        }
    }
    Ok((h, map))
}

/// Metrics emitted by the stream drivers.
#[derive(Debug, Clone)]
pub struct StreamReport {
    pub algorithm: &'static str,
    pub n: u32,
    pub stream_len: u64,
    pub matching_size: usize,
    /// Whether the answer came from the exact stored-edges path.
    pub exact_path: bool,
    pub store_peak_bits: u64,
    pub cascade_peak_bits: u64,
    pub flush_counts: Vec<u64>,
    pub mc_bound: Option<u64>,
    /// Per-branch projected matching sizes (guessing driver only).
    pub branch_sizes: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct RegularityStreamParams {
    pub k: u64,
    pub alpha: f64,
    pub cover: CoverParams,
    pub mc: McBound,
}

/// Single-pass driver: store the first `2n^2/k` edges compactly and run the
/// cascade with the regularity cover in parallel. If the whole stream fit,
/// answer exactly from the store; otherwise answer from the cascade output.
pub fn stream_match_regularity(
    stream: &mut SinglePassStream,
    n: u32,
    params: &RegularityStreamParams,
) -> Result<(Matching, StreamReport)> {
    let edges = stream.take()?;
    let store_cap = (2 * (n as u64) * (n as u64) / params.k).max(1);
    let universe = pair_universe(n);
    let mut store = CompactEdgeDict::new(universe, store_cap.min(universe) as usize);
    let cascade_cfg = CascadeConfig {
        n,
        m_bound: (edges.len() as u64).max(1),
        k: params.k,
        alpha: params.alpha,
        mc_bound: params.mc,
    };
    let cover_fn = make_cover_fn(CoverKind::Regularity { params: params.cover.clone() });
    let mut cascade = BufferCascade::new(cascade_cfg, cover_fn)?;

    let mut arrivals = 0u64;
    let mut overflowed = false;
    let mut store_peak = 0u64;
    for &(u, v) in &edges {
        arrivals += 1;
        if arrivals <= store_cap {
            store.insert(encode_edge(n, u, v))?;
        } else {
            overflowed = true;
        }
        store_peak = store_peak.max(store.bits_used());
        cascade.feed(u, v)?;
    }

    let (cover_edges, stats) = cascade.finalize();
    let (matching, exact_path) = if !overflowed {
        let stored =
            Graph::from_edges(n, store.keys().into_iter().map(|id| decode_edge(n, id)))?;
        (max_matching_general(&stored), true)
    } else {
        let h = Graph::from_edges(n, cover_edges.iter().copied())?;
        (max_matching_general(&h), false)
    };
    let report = StreamReport {
        algorithm: "regularity-cascade",
        n,
        stream_len: arrivals,
        matching_size: matching.size(),
        exact_path,
        store_peak_bits: store_peak,
        cascade_peak_bits: stats.peak_bits,
        flush_counts: stats.flush_counts.clone(),
        mc_bound: stats.mc_bound,
        branch_sizes: Vec::new(),
    };
    Ok((matching, report))
}

#[derive(Debug, Clone)]
pub struct OptGuessParams {
    pub k: u64,
    pub epsilon: f64,
    pub cover: CoverKind,
    pub mc: McBound,
    pub seed: u64,
}

/// Guess-the-optimum driver: `log2 k` parallel branches, branch `i`
/// contracting to `32 * opt_i / eps` buckets with `opt_i = n / 2^(i+1)`,
/// each cascading at `alpha = eps^2 / 64`; the first `n^2/k` raw edges are
/// stored as `H0`. Returns the best of the stored matching and the
/// branch matchings projected back through the contraction preimages.
pub fn stream_match_optguess(
    stream: &mut SinglePassStream,
    n: u32,
    params: &OptGuessParams,
) -> Result<(Matching, StreamReport)> {
    if !(0.0..1.0).contains(&params.epsilon) || params.epsilon <= 0.0 {
        return Err(Error::InvalidParam(format!("epsilon {} outside (0,1)", params.epsilon)));
    }
    let edges = stream.take()?;
    let t_branches = ((params.k.max(2) as f64).log2().ceil() as u32).max(1);
    let alpha = params.epsilon * params.epsilon / 64.0;
    let m_bound = (n as u64) * (n as u64 - 1) / 2;

    struct Branch<'a> {
        map: SparsifierMap,
        cascade: BufferCascade<'a>,
        // preimages per super-edge, in arrival order
        preimages: std::collections::BTreeMap<(u32, u32), Vec<(Vertex, Vertex)>>,
    }
    let mut branches = Vec::new();
    for i in 1..=t_branches {
        let opt_i = ((n as u64) >> (i + 1)).max(1);
        let range = ((32.0 * opt_i as f64 / params.epsilon).ceil() as u64).min(u32::MAX as u64) as u32;
        let map = SparsifierMap::random(n, range, params.seed.wrapping_add(i as u64));
        let cfg = CascadeConfig {
            n: range,
            m_bound,
            k: params.k,
            alpha,
            mc_bound: params.mc,
        };
        let cascade = BufferCascade::new(cfg, make_cover_fn(params.cover.clone()))?;
        branches.push(Branch { map, cascade, preimages: Default::default() });
    }

    let store_cap = ((n as u64) * (n as u64) / params.k).max(1);
    let universe = pair_universe(n);
    let mut store = CompactEdgeDict::new(universe, store_cap.min(universe) as usize);
    let mut store_peak = 0u64;
    let mut arrivals = 0u64;
    for &(u, v) in &edges {
        arrivals += 1;
        if arrivals <= store_cap {
            store.insert(encode_edge(n, u, v))?;
        }
        store_peak = store_peak.max(store.bits_used());
        for branch in &mut branches {
            if let Some((a, b)) = branch.map.map_edge(u, v) {
                branch.preimages.entry((a, b)).or_default().push((u, v));
                branch.cascade.feed(a, b)?;
            }
        }
    }

    let stored = Graph::from_edges(n, store.keys().into_iter().map(|id| decode_edge(n, id)))?;
    let mut best = max_matching_general(&stored);
    let exact_path = arrivals <= store_cap;
    let mut branch_sizes = Vec::new();
    let mut cascade_peak = 0u64;
    let mut flush_counts = Vec::new();
    let mut mc_bound = None;
    for branch in branches {
        let map = branch.map;
        let preimages = branch.preimages;
        let (cover_edges, stats) = branch.cascade.finalize();
        cascade_peak += stats.peak_bits;
        if flush_counts.len() < stats.flush_counts.len() {
            flush_counts = stats.flush_counts.clone();
        }
        mc_bound = mc_bound.or(stats.mc_bound);
        let h = Graph::from_edges(map.range(), cover_edges.iter().copied())?;
        let super_matching = max_matching_general(&h);
        // greedy preimage projection: first arrival with both endpoints free
        let mut used = vec![false; n as usize];
        let mut projected = Vec::with_capacity(super_matching.size());
        for &(a, b) in super_matching.edges() {
            let candidates =
                preimages.get(&(a, b)).ok_or(Error::MissingPreimage(a, b))?;
            let (u, v) = *candidates
                .iter()
                .find(|&&(u, v)| !used[u as usize] && !used[v as usize])
                .ok_or(Error::MissingPreimage(a, b))?;
            used[u as usize] = true;
            used[v as usize] = true;
            projected.push((u, v));
        }
        let projected = Matching::new(projected);
        branch_sizes.push(projected.size());
        if projected.size() > best.size() {
            best = projected;
        }
    }

    let report = StreamReport {
        algorithm: "optguess",
        n,
        stream_len: arrivals,
        matching_size: best.size(),
        exact_path,
        store_peak_bits: store_peak,
        cascade_peak_bits: cascade_peak,
        flush_counts,
        mc_bound,
        branch_sizes,
    };
    Ok((best, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_graph, GraphKind};
    use crate::oracle::max_matching_exhaustive;

    fn seeded_stream(n: u32, p: f64, seed: u64) -> (Graph, Vec<(Vertex, Vertex)>) {
        let g = gen_graph(GraphKind::Gnp { p }, n, seed).unwrap();
        let edges: Vec<_> = g.edges().collect();
        (g, edges)
    }

    #[test]
    fn single_pass_enforced() {
        let mut s = SinglePassStream::new(vec![(0, 1)]);
        assert!(s.take().is_ok());
        assert!(matches!(s.take(), Err(Error::SinglePassViolated)));
    }

    #[test]
    fn short_stream_never_flushes() {
        let cfg = CascadeConfig {
            n: 10,
            m_bound: 40,
            k: 4,
            alpha: 0.4,
            mc_bound: McBound::Fixed(10),
        };
        let mut cascade = BufferCascade::new(cfg, make_cover_fn(CoverKind::Identity)).unwrap();
        let edges = [(0u32, 1u32), (2, 3), (4, 5)];
        for &(u, v) in &edges {
            cascade.feed(u, v).unwrap();
        }
        let (out, stats) = cascade.finalize();
        assert_eq!(out, edges.to_vec());
        assert!(stats.flush_counts.iter().all(|&c| c == 0));
    }

    #[test]
    fn identity_cover_plumbing() {
        // stream of 2*b1_capacity edges with identity cover: B2 holds all,
        // k_1 = 2
        let n = 40u32;
        let g = gen_graph(GraphKind::PerfectMatching, n, 0).unwrap();
        let edges: Vec<_> = g.edges().collect();
        let cfg = CascadeConfig {
            n,
            m_bound: edges.len() as u64,
            k: 2,
            alpha: 0.4,
            mc_bound: McBound::Fixed(edges.len() as u64),
        };
        let mut cascade = BufferCascade::new(cfg, make_cover_fn(CoverKind::Identity)).unwrap();
        for &(u, v) in &edges {
            cascade.feed(u, v).unwrap();
        }
        let stats = cascade.stats();
        assert_eq!(stats.flush_counts[0], 2);
        assert_eq!(stats.flush_counts[1], 0);
        let (out, _) = cascade.finalize();
        assert_eq!(out.len(), edges.len());
    }

    #[test]
    fn flush_counts_within_bound_on_random_streams() {
        for seed in 0..10u64 {
            let (_, edges) = seeded_stream(10, 0.8, seed);
            let k = 4;
            // at sub-unit slack alpha'*n the optimal cover of a buffer is
            // close to the buffer itself, so the honest MC declaration is
            // the whole pair universe
            let cfg = CascadeConfig {
                n: 10,
                m_bound: edges.len() as u64,
                k,
                alpha: 0.6,
                mc_bound: McBound::Fixed(pair_universe(10)),
            };
            let mut cascade =
                BufferCascade::new(cfg, make_cover_fn(CoverKind::Brute { alpha: 0.6 / 8.0 }))
                    .unwrap();
            for &(u, v) in &edges {
                cascade.feed(u, v).unwrap();
            }
            let stats = cascade.stats();
            for (idx, &count) in stats.flush_counts.iter().enumerate() {
                assert!(count << idx <= k, "k_{} = {count} too big", idx + 1);
            }
            assert_eq!(*stats.flush_counts.last().unwrap(), 0, "top buffer flushed");
        }
    }

    #[test]
    fn broken_cover_fn_is_detected() {
        // a "cover" that doubles edges cannot honor any size bound
        let bad: CoverFn = Box::new(|g: &Graph| {
            let mut out: Vec<_> = g.edges().collect();
            let extra: Vec<_> = (0..g.n() - 1).map(|u| (u, u + 1)).collect();
            out.extend(extra);
            out.sort_unstable();
            out.dedup();
            Ok(out)
        });
        let cfg = CascadeConfig {
            n: 30,
            m_bound: 200,
            k: 8,
            alpha: 0.4,
            mc_bound: McBound::Fixed(3),
        };
        let mut cascade = BufferCascade::new(cfg, bad).unwrap();
        let mut failed = false;
        'outer: for u in 0..29u32 {
            for v in (u + 1)..30 {
                match cascade.feed(u, v) {
                    Ok(()) => {}
                    Err(Error::CoverSizeExceeded { .. }) | Err(Error::CascadeOverflow { .. }) => {
                        failed = true;
                        break 'outer;
                    }
                    Err(e) => panic!("unexpected error {e}"),
                }
            }
        }
        assert!(failed, "oversized covers must surface as hard errors");
    }

    #[test]
    fn cascade_with_brute_cover_is_a_cover() {
        // exhaustive verification of the final union on tiny instances
        use crate::cover::{verify_matching_cover, VerifyMode};
        for seed in 0..5u64 {
            let (g, edges) = seeded_stream(10, 0.6, 100 + seed);
            if edges.is_empty() {
                continue;
            }
            let k = 3;
            let alpha = 0.6;
            let cfg = CascadeConfig {
                n: 10,
                m_bound: edges.len() as u64,
                k,
                alpha,
                mc_bound: McBound::Fixed(pair_universe(10)),
            };
            let alpha_prime = alpha / (2 * k) as f64;
            let mut cascade =
                BufferCascade::new(cfg, make_cover_fn(CoverKind::Brute { alpha: alpha_prime }))
                    .unwrap();
            for &(u, v) in &edges {
                cascade.feed(u, v).unwrap();
            }
            let (out, _) = cascade.finalize();
            let h = Graph::from_edges(10, out.into_iter()).unwrap();
            let verdict = verify_matching_cover(&g, &h, alpha, VerifyMode::Exhaustive).unwrap();
            assert!(verdict.pass, "seed {seed}: cascade output not an alpha-cover");
        }
    }

    #[test]
    fn sparsifier_injective_preserves_mu() {
        let g = gen_graph(GraphKind::PerfectMatching, 16, 0).unwrap();
        // huge range: collisions essentially impossible at this seed
        let (h, map) = vertex_sparsify(g.edges(), 16, 8, 0.01, 3).unwrap();
        assert_eq!(h.m(), 8);
        assert_eq!(max_matching_general(&h.support()).size(), 8);
        let buckets: std::collections::HashSet<u32> = (0..16).map(|v| map.bucket(v)).collect();
        assert_eq!(buckets.len(), 16, "expected injectivity at this range");
    }

    #[test]
    fn sparsifier_collision_drops_self_loops() {
        let g = gen_graph(GraphKind::PerfectMatching, 8, 0).unwrap();
        let map = SparsifierMap { table: vec![0; 8], range: 1 };
        let mut h = Graph::new_multi(1);
        for (u, v) in g.edges() {
            assert!(map.map_edge(u, v).is_none());
        }
        for (u, v) in g.edges() {
            if let Some((a, b)) = map.map_edge(u, v) {
                h.insert_edge(a, b).unwrap();
            }
        }
        assert_eq!(h.m(), 0);
    }

    #[test]
    fn regularity_driver_sparse_stream_is_exact() {
        let (g, edges) = seeded_stream(24, 0.2, 7);
        let mu = max_matching_general(&g).size();
        let mut stream = SinglePassStream::new(edges);
        let params = RegularityStreamParams {
            k: 4,
            alpha: 0.5,
            cover: CoverParams::defaults(24, 7),
            mc: McBound::CalibrateFirstFlush { factor: 1.5 },
        };
        let (m, report) = stream_match_regularity(&mut stream, 24, &params).unwrap();
        assert!(report.exact_path, "2n^2/k covers this stream");
        assert_eq!(m.size(), mu);
        assert!(m.is_valid_in(&g));
    }

    #[test]
    fn optguess_small_mu_uses_stored_path() {
        // mu <= n/2k: every edge fits in H0 and the answer is exact
        let g = gen_graph(GraphKind::PerfectMatching, 32, 0).unwrap();
        let mut edges: Vec<_> = g.edges().collect();
        edges.truncate(3); // mu = 3 <= 32/(2*4) = 4
        let host = Graph::from_edges(32, edges.iter().copied()).unwrap();
        let mut stream = SinglePassStream::new(edges);
        let params = OptGuessParams {
            k: 4,
            epsilon: 0.05,
            cover: CoverKind::BruteOrIdentity { alpha: 0.05 * 0.05 / 64.0 },
            mc: McBound::Fixed(64),
            seed: 5,
        };
        let (m, report) = stream_match_optguess(&mut stream, 32, &params).unwrap();
        assert!(report.exact_path);
        assert_eq!(m.size(), 3);
        assert!(m.is_valid_in(&host));
        assert_eq!(report.branch_sizes.len(), 2, "log2(4) branches");
    }

    #[test]
    fn optguess_projected_matching_valid_in_original() {
        for seed in 0..5u64 {
            let (g, edges) = seeded_stream(48, 0.5, 40 + seed);
            let mu = max_matching_exhaustive(&gen_graph(GraphKind::Gnp { p: 0.0 }, 1, 0).unwrap())
                .unwrap_or(0);
            let _ = mu;
            let mu = max_matching_general(&g).size();
            let mut stream = SinglePassStream::new(edges);
            let params = OptGuessParams {
                k: 4,
                epsilon: 0.1,
                cover: CoverKind::Identity,
                mc: McBound::Fixed(pair_universe(48)),
                seed,
            };
            let (m, _) = stream_match_optguess(&mut stream, 48, &params).unwrap();
            assert!(m.is_valid_in(&g), "projected matching must live in G");
            assert!(m.size() <= mu);
            assert!(
                m.size() as f64 >= 0.8 * mu as f64,
                "identity covers lose only sparsification slack: {} vs {mu}",
                m.size()
            );
        }
    }
}
