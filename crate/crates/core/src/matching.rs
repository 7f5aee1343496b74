//! Matching engines: exact bipartite (Hopcroft-Karp), exact general
//! (augmenting paths with blossom contraction), the greedy streaming
//! baseline, and Hall deficiency.
//!
//! All engines are pure functions over immutable graph snapshots and break
//! ties by vertex index, so results are deterministic.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex, VertexSet};

pub const UNMATCHED: u32 = u32::MAX;

/// A set of vertex-disjoint edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    edges: Vec<(Vertex, Vertex)>,
}

impl Matching {
    pub fn new(mut edges: Vec<(Vertex, Vertex)>) -> Self {
        for e in &mut edges {
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
        }
        edges.sort_unstable();
        Matching { edges }
    }

    pub fn empty() -> Self {
        Matching { edges: Vec::new() }
    }

    pub fn size(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    /// Endpoint-disjoint and every edge present in `g`.
    pub fn is_valid_in(&self, g: &Graph) -> bool {
        let mut used = vec![false; g.n() as usize];
        for &(u, v) in &self.edges {
            if u >= g.n() || v >= g.n() || !g.adjacency_query(u, v) {
                return false;
            }
            if used[u as usize] || used[v as usize] {
                return false;
            }
            used[u as usize] = true;
            used[v as usize] = true;
        }
        true
    }

    pub fn covered_vertices(&self) -> VertexSet {
        self.edges.iter().flat_map(|&(u, v)| [u, v]).collect()
    }

    /// Serialize with a `matching k` header followed by one edge per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("matching {}\n", self.size());
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Parse { line: 1, msg: "empty matching file".into() })?;
        let k: usize = header
            .strip_prefix("matching ")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Parse { line: 1, msg: format!("bad header `{header}`") })?;
        let mut edges = Vec::new();
        for (idx, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let bad = || Error::Parse { line: idx + 1, msg: format!("bad line `{line}`") };
            let u: u32 = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let v: u32 = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            edges.push((u, v));
        }
        if edges.len() != k {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header claims {k} edges, file has {}", edges.len()),
            });
        }
        Ok(Matching::new(edges))
    }
}

/// `mate` array to matching, counting each edge once.
pub fn mate_to_matching(mate: &[u32]) -> Matching {
    let edges = mate
        .iter()
        .enumerate()
        .filter(|&(u, &v)| v != UNMATCHED && (u as u32) < v)
        .map(|(u, &v)| (u as u32, v))
        .collect();
    Matching::new(edges)
}

/// Maximum matching of the bipartite subgraph `g[left, right]` via
/// Hopcroft-Karp. Only edges with one endpoint on each side are considered.
pub fn max_matching_bipartite(g: &Graph, left: &VertexSet, right: &VertexSet) -> Result<Matching> {
    hopcroft_karp(g, left, right, usize::MAX)
}

/// Hopcroft-Karp truncated after `max_phases` phases. With `p` completed
/// phases every augmenting path of length `< 2p+1` is exhausted, so the
/// result is a `(1 - 1/(p+1))`-approximation; run to exhaustion it is exact.
pub fn hopcroft_karp(
    g: &Graph,
    left: &VertexSet,
    right: &VertexSet,
    max_phases: usize,
) -> Result<Matching> {
    if let Some(&v) = left.members().iter().find(|&&v| right.contains(v)) {
        return Err(Error::SidesOverlap(v));
    }
    let ls: Vec<Vertex> = left.members().to_vec();
    let right_mask = right.mask(g.n());
    // dense local indices
    let mut lidx = vec![UNMATCHED; g.n() as usize];
    for (i, &v) in ls.iter().enumerate() {
        lidx[v as usize] = i as u32;
    }
    // adjacency restricted to the sides, neighbor lists ascending
    let adj: Vec<Vec<Vertex>> = ls
        .iter()
        .map(|&u| {
            let mut nbrs = Vec::new();
            for (wi, (r, m)) in g.row(u).iter().zip(&right_mask).enumerate() {
                let mut word = r & m;
                while word != 0 {
                    nbrs.push(wi as u32 * 64 + word.trailing_zeros());
                    word &= word - 1;
                }
            }
            nbrs
        })
        .collect();

    let mut mate_l = vec![UNMATCHED; ls.len()]; // left slot -> right vertex
    let mut mate_r = vec![UNMATCHED; g.n() as usize]; // right vertex -> left slot
    let mut dist = vec![u32::MAX; ls.len()];
    let mut phases = 0usize;

    while phases < max_phases {
        // BFS layering from free left vertices, ascending index order
        let mut queue = VecDeque::new();
        for (i, &m) in mate_l.iter().enumerate() {
            if m == UNMATCHED {
                dist[i] = 0;
                queue.push_back(i as u32);
            } else {
                dist[i] = u32::MAX;
            }
        }
        let mut found = false;
        while let Some(i) = queue.pop_front() {
            for &v in &adj[i as usize] {
                let j = mate_r[v as usize];
                if j == UNMATCHED {
                    found = true;
                } else if dist[j as usize] == u32::MAX {
                    dist[j as usize] = dist[i as usize] + 1;
                    queue.push_back(j);
                }
            }
        }
        if !found {
            break;
        }
        // layered DFS, neighbors ascending
        fn try_augment(
            i: usize,
            adj: &[Vec<Vertex>],
            mate_l: &mut [u32],
            mate_r: &mut [u32],
            dist: &mut [u32],
        ) -> bool {
            let d = std::mem::replace(&mut dist[i], u32::MAX);
            for &v in &adj[i] {
                let j = mate_r[v as usize];
                if j == UNMATCHED
                    || (dist[j as usize] == d + 1
                        && try_augment(j as usize, adj, mate_l, mate_r, dist))
                {
                    mate_l[i] = v;
                    mate_r[v as usize] = i as u32;
                    return true;
                }
            }
            false
        }
        for i in 0..ls.len() {
            if mate_l[i] == UNMATCHED && dist[i] == 0 {
                try_augment(i, &adj, &mut mate_l, &mut mate_r, &mut dist);
            }
        }
        phases += 1;
    }

    let edges = mate_l
        .iter()
        .enumerate()
        .filter(|&(_, &v)| v != UNMATCHED)
        .map(|(i, &v)| (ls[i], v))
        .collect();
    Ok(Matching::new(edges))
}

/// Greedy pass: match each vertex to its first free neighbor.
pub fn greedy_matching_mate(g: &Graph) -> Vec<u32> {
    let n = g.n() as usize;
    let mut mate = vec![UNMATCHED; n];
    for u in 0..n as u32 {
        if mate[u as usize] != UNMATCHED {
            continue;
        }
        for (wi, &word) in g.row(u).iter().enumerate() {
            let mut word = word;
            let mut done = false;
            while word != 0 {
                let v = wi as u32 * 64 + word.trailing_zeros();
                word &= word - 1;
                if mate[v as usize] == UNMATCHED && v != u {
                    mate[u as usize] = v;
                    mate[v as usize] = u;
                    done = true;
                    break;
                }
            }
            if done {
                break;
            }
        }
    }
    mate
}

/// One augmenting-path search from `root` with blossom contraction.
/// Augments `mate` in place and reports whether a path was found.
pub fn augment_from(g: &Graph, mate: &mut [u32], root: Vertex) -> bool {
    let n = g.n() as usize;
    if mate[root as usize] != UNMATCHED {
        return false;
    }
    let mut used = vec![false; n];
    let mut parent = vec![UNMATCHED; n];
    let mut base: Vec<u32> = (0..n as u32).collect();
    let mut queue = VecDeque::new();
    used[root as usize] = true;
    queue.push_back(root);

    let lca = |base: &[u32], parent: &[u32], mate: &[u32], a: u32, b: u32| -> u32 {
        let mut on_path = vec![false; n];
        let mut x = a;
        loop {
            x = base[x as usize];
            on_path[x as usize] = true;
            if mate[x as usize] == UNMATCHED {
                break;
            }
            x = parent[mate[x as usize] as usize];
        }
        let mut y = b;
        loop {
            y = base[y as usize];
            if on_path[y as usize] {
                return y;
            }
            y = parent[mate[y as usize] as usize];
        }
    };

    #[allow(clippy::too_many_arguments)]
    fn mark_path(
        mate: &[u32],
        base: &[u32],
        parent: &mut [u32],
        in_blossom: &mut [bool],
        mut v: u32,
        b: u32,
        mut child: u32,
    ) {
        while base[v as usize] != b {
            in_blossom[base[v as usize] as usize] = true;
            in_blossom[base[mate[v as usize] as usize] as usize] = true;
            parent[v as usize] = child;
            child = mate[v as usize];
            v = parent[mate[v as usize] as usize];
        }
    }

    while let Some(v) = queue.pop_front() {
        let row: Vec<u32> = {
            let mut nbrs = Vec::new();
            for (wi, &word) in g.row(v).iter().enumerate() {
                let mut word = word;
                while word != 0 {
                    nbrs.push(wi as u32 * 64 + word.trailing_zeros());
                    word &= word - 1;
                }
            }
            nbrs
        };
        for to in row {
            if base[v as usize] == base[to as usize] || mate[v as usize] == to {
                continue;
            }
            if to == root || (mate[to as usize] != UNMATCHED && parent[mate[to as usize] as usize] != UNMATCHED)
            {
                // odd cycle: contract the blossom
                let cur_base = lca(&base, &parent, mate, v, to);
                let mut in_blossom = vec![false; n];
                mark_path(mate, &base, &mut parent, &mut in_blossom, v, cur_base, to);
                mark_path(mate, &base, &mut parent, &mut in_blossom, to, cur_base, v);
                for i in 0..n {
                    if in_blossom[base[i] as usize] {
                        base[i] = cur_base;
                        if !used[i] {
                            used[i] = true;
                            queue.push_back(i as u32);
                        }
                    }
                }
            } else if parent[to as usize] == UNMATCHED {
                parent[to as usize] = v;
                if mate[to as usize] == UNMATCHED {
                    // augment along the alternating path back to the root
                    let mut u = to;
                    while u != UNMATCHED {
                        let pv = parent[u as usize];
                        let next = mate[pv as usize];
                        mate[u as usize] = pv;
                        mate[pv as usize] = u;
                        u = next;
                    }
                    return true;
                } else {
                    let w = mate[to as usize];
                    if !used[w as usize] {
                        used[w as usize] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
    }
    false
}

/// Maximum matching of a general (not necessarily bipartite) simple graph.
pub fn max_matching_general(g: &Graph) -> Matching {
    let mut mate = greedy_matching_mate(g);
    for v in 0..g.n() {
        if mate[v as usize] == UNMATCHED {
            augment_from(g, &mut mate, v);
        }
    }
    mate_to_matching(&mate)
}

/// Maximal matching with respect to arrival order: take every edge whose
/// endpoints are both free.
pub fn greedy_stream_matching(n: u32, stream: impl IntoIterator<Item = (Vertex, Vertex)>) -> Matching {
    let mut used = vec![false; n as usize];
    let mut edges = Vec::new();
    for (u, v) in stream {
        if u != v && !used[u as usize] && !used[v as usize] {
            used[u as usize] = true;
            used[v as usize] = true;
            edges.push((u, v));
        }
    }
    Matching::new(edges)
}

/// Hall deficiency of `g[left, right]` after padding both sides to the
/// common size `n' = max(|left|, |right|)`: returns `n' - mu(g[left, right])`.
pub fn hall_deficiency(g: &Graph, left: &VertexSet, right: &VertexSet) -> Result<usize> {
    let mu = max_matching_bipartite(g, left, right)?.size();
    Ok(left.len().max(right.len()) - mu)
}
