//! Graph representation: a mutable simple (or multi-) graph on vertices `0..n`
//! with an adjacency-bitset view and an edge-list view.
//!
//! Edges are unordered pairs `(u, v)` with `u != v`. An unordered pair with
//! `u < v` is encoded as the integer `u*n - u*(u+1)/2 + (v-u-1)`, a bijection
//! onto `0..n*(n-1)/2`. That encoding fixes the universe of the compact edge
//! dictionary and gives every edge set a canonical iteration order.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type Vertex = u32;

/// Number of unordered vertex pairs on `n` vertices.
pub fn pair_universe(n: u32) -> u64 {
    let n = n as u64;
    n * (n - 1) / 2
}

/// Encode an unordered pair as an index in `0..pair_universe(n)`.
pub fn encode_edge(n: u32, u: Vertex, v: Vertex) -> u64 {
    debug_assert!(u != v && u < n && v < n);
    let (u, v) = if u < v { (u, v) } else { (v, u) };
    let (n, u, v) = (n as u64, u as u64, v as u64);
    u * n - u * (u + 1) / 2 + (v - u - 1)
}

/// Inverse of [`encode_edge`].
pub fn decode_edge(n: u32, id: u64) -> (Vertex, Vertex) {
    let nn = n as u64;
    let mut u = 0u64;
    let mut base = 0u64;
    // row u covers ids [base, base + (n-1-u))
    while base + (nn - 1 - u) <= id {
        base += nn - 1 - u;
        u += 1;
    }
    let v = u + 1 + (id - base);
    (u as Vertex, v as Vertex)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeleteStatus {
    Removed,
    Absent,
}

/// Simple or multi-graph over `0..n` with adjacency bitsets.
///
/// In multi mode, parallel-edge multiplicities are tracked in a sorted map;
/// the bitset always describes the simple support.
#[derive(Debug, Clone)]
pub struct Graph {
    n: u32,
    words_per_row: usize,
    adj: Vec<u64>,
    m: u64,
    multi: bool,
    multiplicity: BTreeMap<(Vertex, Vertex), u32>,
}

impl Graph {
    pub fn new(n: u32) -> Self {
        let words_per_row = (n as usize).div_ceil(64).max(1);
        Graph {
            n,
            words_per_row,
            adj: vec![0; words_per_row * n as usize],
            m: 0,
            multi: false,
            multiplicity: BTreeMap::new(),
        }
    }

    pub fn new_multi(n: u32) -> Self {
        let mut g = Graph::new(n);
        g.multi = true;
        g
    }

    pub fn from_edges(n: u32, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self> {
        let mut g = Graph::new(n);
        for (u, v) in edges {
            g.insert_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Edge count; counts multiplicities in multi mode.
    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn is_multi(&self) -> bool {
        self.multi
    }

    /// Number of distinct edges (the simple support size).
    pub fn support_size(&self) -> u64 {
        if self.multi {
            self.multiplicity.len() as u64
        } else {
            self.m
        }
    }

    fn check_pair(&self, u: Vertex, v: Vertex) -> Result<()> {
        if u >= self.n {
            return Err(Error::VertexOutOfRange { vertex: u, n: self.n });
        }
        if v >= self.n {
            return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
        }
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        Ok(())
    }

    #[inline]
    fn set_bit(&mut self, u: Vertex, v: Vertex) {
        let idx = u as usize * self.words_per_row + (v as usize) / 64;
        self.adj[idx] |= 1u64 << (v % 64);
    }

    #[inline]
    fn clear_bit(&mut self, u: Vertex, v: Vertex) {
        let idx = u as usize * self.words_per_row + (v as usize) / 64;
        self.adj[idx] &= !(1u64 << (v % 64));
    }

    /// Insert an edge. Returns `true` if `m` grew (always, in multi mode;
    /// only when newly present in simple mode).
    pub fn insert_edge(&mut self, u: Vertex, v: Vertex) -> Result<bool> {
        self.check_pair(u, v)?;
        let present = self.adjacency_query(u, v);
        if self.multi {
            let key = if u < v { (u, v) } else { (v, u) };
            *self.multiplicity.entry(key).or_insert(0) += 1;
            if !present {
                self.set_bit(u, v);
                self.set_bit(v, u);
            }
            self.m += 1;
            Ok(true)
        } else if present {
            Ok(false)
        } else {
            self.set_bit(u, v);
            self.set_bit(v, u);
            self.m += 1;
            Ok(true)
        }
    }

    /// Remove one occurrence of the edge if present.
    pub fn delete_edge(&mut self, u: Vertex, v: Vertex) -> Result<DeleteStatus> {
        self.check_pair(u, v)?;
        if !self.adjacency_query(u, v) {
            return Ok(DeleteStatus::Absent);
        }
        if self.multi {
            let key = if u < v { (u, v) } else { (v, u) };
            let count = self.multiplicity.get_mut(&key).expect("bitset/map agree");
            *count -= 1;
            if *count == 0 {
                self.multiplicity.remove(&key);
                self.clear_bit(u, v);
                self.clear_bit(v, u);
            }
        } else {
            self.clear_bit(u, v);
            self.clear_bit(v, u);
        }
        self.m -= 1;
        Ok(DeleteStatus::Removed)
    }

    /// Adjacency-matrix query. This is the sole access path the regularity
    /// module uses.
    #[inline]
    pub fn adjacency_query(&self, u: Vertex, v: Vertex) -> bool {
        debug_assert!(u < self.n && v < self.n);
        if u == v {
            return false;
        }
        let idx = u as usize * self.words_per_row + (v as usize) / 64;
        self.adj[idx] >> (v % 64) & 1 == 1
    }

    /// Bitset row of neighbors of `u`.
    #[inline]
    pub fn row(&self, u: Vertex) -> &[u64] {
        let w = self.words_per_row;
        &self.adj[u as usize * w..(u as usize + 1) * w]
    }

    pub fn words_per_row(&self) -> usize {
        self.words_per_row
    }

    pub fn degree(&self, u: Vertex) -> u32 {
        self.row(u).iter().map(|w| w.count_ones()).sum()
    }

    /// Distinct edges in canonical `(u, v)` order with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        (0..self.n).flat_map(move |u| {
            self.row(u)
                .iter()
                .enumerate()
                .flat_map(move |(wi, &word)| {
                    let base = wi as u32 * 64;
                    BitIter(word).map(move |b| base + b)
                })
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// Edges with multiplicity, canonical order. For simple graphs every
    /// multiplicity is one.
    pub fn edges_with_multiplicity(&self) -> Vec<(Vertex, Vertex, u32)> {
        if self.multi {
            self.multiplicity.iter().map(|(&(u, v), &c)| (u, v, c)).collect()
        } else {
            self.edges().map(|(u, v)| (u, v, 1)).collect()
        }
    }

    pub fn multiplicity(&self, u: Vertex, v: Vertex) -> u32 {
        if !self.adjacency_query(u, v) {
            0
        } else if self.multi {
            let key = if u < v { (u, v) } else { (v, u) };
            self.multiplicity[&key]
        } else {
            1
        }
    }

    /// Simple graph with the same support.
    pub fn support(&self) -> Graph {
        let mut g = Graph::new(self.n);
        for (u, v) in self.edges() {
            g.insert_edge(u, v).expect("support edges valid");
        }
        g
    }

    /// Number of edges between disjoint vertex sets, via bitset rows.
    pub fn edges_between(&self, a: &VertexSet, b: &VertexSet) -> u64 {
        let mask_b = b.mask(self.n);
        let mut count = 0u64;
        for &u in a.members() {
            count += self
                .row(u)
                .iter()
                .zip(&mask_b)
                .map(|(r, m)| (r & m).count_ones() as u64)
                .sum::<u64>();
        }
        count
    }

    /// Edges with one endpoint in each set, canonical order.
    pub fn edges_between_list(&self, a: &VertexSet, b: &VertexSet) -> Vec<(Vertex, Vertex)> {
        let mask_b = b.mask(self.n);
        let mut out = Vec::new();
        for &u in a.members() {
            for (wi, (r, m)) in self.row(u).iter().zip(&mask_b).enumerate() {
                let mut word = r & m;
                while word != 0 {
                    let v = wi as u32 * 64 + word.trailing_zeros();
                    word &= word - 1;
                    if u < v || !a.contains(v) || !b.contains(u) {
                        out.push(if u < v { (u, v) } else { (v, u) });
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Edges with both endpoints inside the set, canonical order.
    pub fn edges_within(&self, a: &VertexSet) -> Vec<(Vertex, Vertex)> {
        let mask = a.mask(self.n);
        let mut out = Vec::new();
        for &u in a.members() {
            for (wi, (r, m)) in self.row(u).iter().zip(&mask).enumerate() {
                let mut word = r & m;
                while word != 0 {
                    let v = wi as u32 * 64 + word.trailing_zeros();
                    word &= word - 1;
                    if v > u {
                        out.push((u, v));
                    }
                }
            }
        }
        out
    }

    /// Bipartite double cover: vertices `0..n` and `n..2n`, with `(u, n+v)`
    /// and `(v, n+u)` for every edge `(u, v)`.
    pub fn double_cover(&self) -> Graph {
        let mut g = Graph::new(2 * self.n);
        for (u, v) in self.edges() {
            g.insert_edge(u, self.n + v).expect("in range");
            g.insert_edge(v, self.n + u).expect("in range");
        }
        g
    }
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = u32;
    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            None
        } else {
            let b = self.0.trailing_zeros();
            self.0 &= self.0 - 1;
            Some(b)
        }
    }
}

/// A subset of `0..n`, kept sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet {
    members: Vec<Vertex>,
}

impl VertexSet {
    pub fn new(mut members: Vec<Vertex>) -> Self {
        members.sort_unstable();
        members.dedup();
        VertexSet { members }
    }

    pub fn empty() -> Self {
        VertexSet { members: Vec::new() }
    }

    pub fn full(n: u32) -> Self {
        VertexSet { members: (0..n).collect() }
    }

    pub fn members(&self) -> &[Vertex] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.members.iter().all(|&v| !other.contains(v))
    }

    pub fn mask(&self, n: u32) -> Vec<u64> {
        let mut mask = vec![0u64; (n as usize).div_ceil(64).max(1)];
        for &v in &self.members {
            mask[v as usize / 64] |= 1u64 << (v % 64);
        }
        mask
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.members.iter().copied()
    }
}

impl FromIterator<Vertex> for VertexSet {
    fn from_iter<T: IntoIterator<Item = Vertex>>(iter: T) -> Self {
        VertexSet::new(iter.into_iter().collect())
    }
}

/// Generator families for the test corpus. All are deterministic given the
/// seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphKind {
    /// G(n, p): each pair independently with probability `p`.
    Gnp { p: f64 },
    /// Complete bipartite between `0..a` and `a..n`.
    CompleteBipartite { a: u32 },
    /// Edges `(2i, 2i+1)`; requires even `n`.
    PerfectMatching,
    /// `t` induced matchings of size `r` sharing a common left block:
    /// matching `i` joins `j` to `r + i*r + j`. Requires `n = r*(t+1)`.
    RsLayered { r: u32, t: u32 },
    /// Path `0-1-...-(n-1)`.
    Path,
}

pub fn gen_graph(kind: GraphKind, n: u32, seed: u64) -> Result<Graph> {
    match kind {
        GraphKind::Gnp { p } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParam(format!("gnp probability {p} outside [0,1]")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut g = Graph::new(n);
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.random::<f64>() < p {
                        g.insert_edge(u, v)?;
                    }
                }
            }
            Ok(g)
        }
        GraphKind::CompleteBipartite { a } => {
            if a == 0 || a >= n {
                return Err(Error::InvalidParam(format!(
                    "complete-bipartite split {a} outside 1..{n}"
                )));
            }
            let mut g = Graph::new(n);
            for u in 0..a {
                for v in a..n {
                    g.insert_edge(u, v)?;
                }
            }
            Ok(g)
        }
        GraphKind::PerfectMatching => {
            if n % 2 != 0 {
                return Err(Error::InvalidParam(format!("perfect matching needs even n, got {n}")));
            }
            let mut g = Graph::new(n);
            for i in 0..n / 2 {
                g.insert_edge(2 * i, 2 * i + 1)?;
            }
            Ok(g)
        }
        GraphKind::RsLayered { r, t } => {
            if r == 0 || t == 0 || n != r * (t + 1) {
                return Err(Error::InvalidParam(format!(
                    "rs-layered needs n = r*(t+1); got n={n}, r={r}, t={t}"
                )));
            }
            let mut g = Graph::new(n);
            for i in 0..t {
                for j in 0..r {
                    g.insert_edge(j, r + i * r + j)?;
                }
            }
            Ok(g)
        }
        GraphKind::Path => {
            let mut g = Graph::new(n);
            for u in 1..n {
                g.insert_edge(u - 1, u)?;
            }
            Ok(g)
        }
    }
}

/// The `t` layer matchings of [`GraphKind::RsLayered`], for verification.
pub fn rs_layered_matchings(r: u32, t: u32) -> Vec<Vec<(Vertex, Vertex)>> {
    (0..t)
        .map(|i| (0..r).map(|j| (j, r + i * r + j)).collect())
        .collect()
}

/// Serialize as an edge-list file: header `n m [multi]`, then one `u v` line
/// per edge occurrence, 0-indexed, LF newlines.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    if g.is_multi() {
        let _ = writeln!(out, "{} {} multi", g.n(), g.m());
        for (u, v, c) in g.edges_with_multiplicity() {
            for _ in 0..c {
                let _ = writeln!(out, "{u} {v}");
            }
        }
    } else {
        let _ = writeln!(out, "{} {}", g.n(), g.m());
        for (u, v) in g.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
    }
    out
}

/// Parse an edge-list file.
pub fn read_edge_list(text: &str) -> Result<Graph> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, msg: "empty file".into() })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() < 2 || fields.len() > 3 {
        return Err(Error::Parse { line: 1, msg: format!("bad header `{header}`") });
    }
    let n: u32 = fields[0]
        .parse()
        .map_err(|_| Error::Parse { line: 1, msg: format!("bad vertex count `{}`", fields[0]) })?;
    let m: u64 = fields[1]
        .parse()
        .map_err(|_| Error::Parse { line: 1, msg: format!("bad edge count `{}`", fields[1]) })?;
    let multi = match fields.get(2) {
        Some(&"multi") => true,
        Some(other) => {
            return Err(Error::Parse { line: 1, msg: format!("bad header flag `{other}`") })
        }
        None => false,
    };
    let mut g = if multi { Graph::new_multi(n) } else { Graph::new(n) };
    for (idx, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<u32> {
            tok.ok_or_else(|| Error::Parse { line: idx + 1, msg: "missing vertex".into() })?
                .parse()
                .map_err(|_| Error::Parse { line: idx + 1, msg: format!("bad line `{line}`") })
        };
        let u = parse(it.next())?;
        let v = parse(it.next())?;
        if it.next().is_some() {
            return Err(Error::Parse { line: idx + 1, msg: format!("trailing tokens in `{line}`") });
        }
        g.insert_edge(u, v).map_err(|e| Error::Parse { line: idx + 1, msg: e.to_string() })?;
    }
    if g.m() != m {
        return Err(Error::Parse {
            line: 1,
            msg: format!("header claims m={m} but file has {} edges", g.m()),
        });
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_decode_roundtrip() {
        for n in [2u32, 3, 7, 64, 65] {
            let mut seen = std::collections::HashSet::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    let id = encode_edge(n, u, v);
                    assert!(id < pair_universe(n));
                    assert!(seen.insert(id), "encoding not injective");
                    assert_eq!(decode_edge(n, id), (u, v));
                    assert_eq!(encode_edge(n, v, u), id);
                }
            }
            assert_eq!(seen.len() as u64, pair_universe(n));
        }
    }

    #[test]
    fn insert_semantics() {
        let mut g = Graph::new(4);
        assert!(g.insert_edge(0, 1).unwrap());
        assert_eq!(g.m(), 1);
        assert!(!g.insert_edge(0, 1).unwrap());
        assert_eq!(g.m(), 1, "set semantics in simple mode");

        let mut mg = Graph::new_multi(4);
        mg.insert_edge(0, 1).unwrap();
        mg.insert_edge(0, 1).unwrap();
        assert_eq!(mg.m(), 2, "multiset semantics in multi mode");
        assert_eq!(mg.multiplicity(0, 1), 2);
    }

    #[test]
    fn insert_rejects_bad_pairs() {
        let mut g = Graph::new(4);
        assert!(matches!(g.insert_edge(1, 1), Err(Error::SelfLoop(1))));
        assert!(matches!(g.insert_edge(0, 4), Err(Error::VertexOutOfRange { .. })));
    }

    #[test]
    fn delete_semantics() {
        let mut g = Graph::new(4);
        g.insert_edge(0, 1).unwrap();
        assert_eq!(g.delete_edge(0, 1).unwrap(), DeleteStatus::Removed);
        assert_eq!(g.m(), 0);
        assert_eq!(g.delete_edge(2, 3).unwrap(), DeleteStatus::Absent);
        assert_eq!(g.m(), 0);

        let mut mg = Graph::new_multi(4);
        mg.insert_edge(0, 1).unwrap();
        mg.insert_edge(0, 1).unwrap();
        assert_eq!(mg.delete_edge(0, 1).unwrap(), DeleteStatus::Removed);
        assert_eq!(mg.m(), 1);
        assert!(mg.adjacency_query(0, 1));
    }

    #[test]
    fn adjacency_queries() {
        let g = gen_graph(GraphKind::Gnp { p: 1.0 }, 3, 0).unwrap();
        assert!(g.adjacency_query(0, 1));
        let empty = Graph::new(3);
        assert!(!empty.adjacency_query(0, 1));
        let mut g2 = Graph::new(3);
        g2.insert_edge(0, 1).unwrap();
        g2.delete_edge(0, 1).unwrap();
        assert!(!g2.adjacency_query(0, 1));
    }

    #[test]
    fn double_cover_single_edge() {
        let mut g = Graph::new(2);
        g.insert_edge(0, 1).unwrap();
        let dc = g.double_cover();
        assert_eq!(dc.n(), 4);
        let edges: Vec<_> = dc.edges().collect();
        assert_eq!(edges, vec![(0, 3), (1, 2)]);
    }

    #[test]
    fn double_cover_triangle_is_c6() {
        // enumerate by definition: K3 lifts to a 6-cycle
        let g = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let dc = g.double_cover();
        assert_eq!(dc.m(), 6);
        for v in 0..6 {
            assert_eq!(dc.degree(v), 2);
        }
        // connected 2-regular on 6 vertices = C6
        let mut seen = vec![false; 6];
        let mut stack = vec![0u32];
        seen[0] = true;
        let mut visited = 1;
        while let Some(u) = stack.pop() {
            for v in 0..6u32 {
                if dc.adjacency_query(u, v) && !seen[v as usize] {
                    seen[v as usize] = true;
                    visited += 1;
                    stack.push(v);
                }
            }
        }
        assert_eq!(visited, 6);
    }

    #[test]
    fn double_cover_empty() {
        let g = Graph::new(5);
        let dc = g.double_cover();
        assert_eq!(dc.n(), 10);
        assert_eq!(dc.m(), 0);
    }

    #[test]
    fn generators() {
        assert_eq!(gen_graph(GraphKind::Gnp { p: 0.0 }, 10, 1).unwrap().m(), 0);
        assert_eq!(gen_graph(GraphKind::Gnp { p: 1.0 }, 10, 1).unwrap().m(), 45);
        let pm = gen_graph(GraphKind::PerfectMatching, 8, 0).unwrap();
        assert_eq!(pm.m(), 4);
        let path = gen_graph(GraphKind::Path, 4, 0).unwrap();
        assert_eq!(path.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2), (2, 3)]);
        assert!(gen_graph(GraphKind::PerfectMatching, 7, 0).is_err());
        assert!(gen_graph(GraphKind::Gnp { p: 1.5 }, 4, 0).is_err());
        let rs = gen_graph(GraphKind::RsLayered { r: 4, t: 3 }, 16, 0).unwrap();
        assert_eq!(rs.m(), 12);
    }

    #[test]
    fn gnp_deterministic_per_seed() {
        let a = gen_graph(GraphKind::Gnp { p: 0.4 }, 30, 7).unwrap();
        let b = gen_graph(GraphKind::Gnp { p: 0.4 }, 30, 7).unwrap();
        let c = gen_graph(GraphKind::Gnp { p: 0.4 }, 30, 8).unwrap();
        assert_eq!(a.edges().collect::<Vec<_>>(), b.edges().collect::<Vec<_>>());
        assert_ne!(a.edges().collect::<Vec<_>>(), c.edges().collect::<Vec<_>>());
    }

    #[test]
    fn edge_list_roundtrip() {
        let g = gen_graph(GraphKind::Gnp { p: 0.3, }, 12, 5).unwrap();
        let text = write_edge_list(&g);
        assert!(text.starts_with(&format!("12 {}", g.m())));
        let h = read_edge_list(&text).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), h.edges().collect::<Vec<_>>());

        let mut mg = Graph::new_multi(4);
        mg.insert_edge(0, 1).unwrap();
        mg.insert_edge(0, 1).unwrap();
        mg.insert_edge(2, 3).unwrap();
        let text = write_edge_list(&mg);
        let h = read_edge_list(&text).unwrap();
        assert!(h.is_multi());
        assert_eq!(h.m(), 3);
        assert_eq!(h.multiplicity(0, 1), 2);
    }

    #[test]
    fn edge_list_parse_errors_carry_lines() {
        assert!(matches!(read_edge_list(""), Err(Error::Parse { line: 1, .. })));
        let bad = "4 2\n0 1\n0 x\n";
        assert!(matches!(read_edge_list(bad), Err(Error::Parse { line: 3, .. })));
        let mismatch = "4 5\n0 1\n";
        assert!(matches!(read_edge_list(mismatch), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn edges_between_counts() {
        let g = gen_graph(GraphKind::CompleteBipartite { a: 3 }, 7, 0).unwrap();
        let a = VertexSet::new(vec![0, 1, 2]);
        let b = VertexSet::new(vec![3, 4, 5, 6]);
        assert_eq!(g.edges_between(&a, &b), 12);
        assert_eq!(g.edges_between_list(&a, &b).len(), 12);
        assert!(g.edges_within(&a).is_empty());
    }
}
