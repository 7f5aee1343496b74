//! Update scripts: ordered insert/delete/query sequences driving the
//! dynamic engine, with seeded generators and an adaptive-adversary hook.
//!
//! File format: one op per line, `+ u v`, `- u v`, or `?` to request a
//! matching-size report.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dynamic::EngineView;
use crate::error::{Error, Result};
use crate::graph::{gen_graph, GraphKind, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScriptOp {
    Insert(Vertex, Vertex),
    Delete(Vertex, Vertex),
    Query,
}

#[derive(Debug, Clone, Default)]
pub struct UpdateScript {
    pub ops: Vec<ScriptOp>,
}

impl UpdateScript {
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for op in &self.ops {
            match op {
                ScriptOp::Insert(u, v) => out.push_str(&format!("+ {u} {v}\n")),
                ScriptOp::Delete(u, v) => out.push_str(&format!("- {u} {v}\n")),
                ScriptOp::Query => out.push_str("?\n"),
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut ops = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line == "?" || line.starts_with("? ") {
                ops.push(ScriptOp::Query);
                continue;
            }
            let bad = |msg: &str| Error::Parse { line: idx + 1, msg: msg.to_string() };
            let mut parts = line.split_whitespace();
            let sign = parts.next().ok_or_else(|| bad("empty line"))?;
            let u: Vertex = parts
                .next()
                .ok_or_else(|| bad("missing endpoint"))?
                .parse()
                .map_err(|_| bad("bad endpoint"))?;
            let v: Vertex = parts
                .next()
                .ok_or_else(|| bad("missing endpoint"))?
                .parse()
                .map_err(|_| bad("bad endpoint"))?;
            if parts.next().is_some() {
                return Err(bad("trailing tokens"));
            }
            match sign {
                "+" => ops.push(ScriptOp::Insert(u, v)),
                "-" => ops.push(ScriptOp::Delete(u, v)),
                other => return Err(bad(&format!("unknown op `{other}`"))),
            }
        }
        Ok(UpdateScript { ops })
    }
}

/// Script generator families; all deterministic given the seed.
#[derive(Debug, Clone)]
pub enum ScriptKind {
    /// Insert the edges of a seeded G(n,p), shuffled.
    InsertOnly { n: u32, p: f64 },
    /// Insert all edges of a seeded G(n,p), then delete them all.
    InsertThenDelete { n: u32, p: f64 },
    /// Insert a G(n,p), then delete a `ratio` fraction with queries
    /// sprinkled in.
    DeleteHeavy { n: u32, p: f64, ratio: f64 },
    /// Build up to `high` edges, then oscillate between `low` and `high`
    /// for `cycles` rounds (both inside the caller's hysteresis band to
    /// exercise that no rebuild triggers).
    Oscillate { n: u32, low: u64, high: u64, cycles: u32 },
}

pub fn gen_script(kind: &ScriptKind, seed: u64) -> Result<UpdateScript> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ops = Vec::new();
    match *kind {
        ScriptKind::InsertOnly { n, p } => {
            let g = gen_graph(GraphKind::Gnp { p }, n, seed)?;
            let mut edges: Vec<_> = g.edges().collect();
            edges.shuffle(&mut rng);
            ops.extend(edges.into_iter().map(|(u, v)| ScriptOp::Insert(u, v)));
        }
        ScriptKind::InsertThenDelete { n, p } => {
            let g = gen_graph(GraphKind::Gnp { p }, n, seed)?;
            let mut edges: Vec<_> = g.edges().collect();
            edges.shuffle(&mut rng);
            ops.extend(edges.iter().map(|&(u, v)| ScriptOp::Insert(u, v)));
            edges.shuffle(&mut rng);
            ops.extend(edges.iter().map(|&(u, v)| ScriptOp::Delete(u, v)));
        }
        ScriptKind::DeleteHeavy { n, p, ratio } => {
            let g = gen_graph(GraphKind::Gnp { p }, n, seed)?;
            let mut edges: Vec<_> = g.edges().collect();
            edges.shuffle(&mut rng);
            ops.extend(edges.iter().map(|&(u, v)| ScriptOp::Insert(u, v)));
            let deletions = ((edges.len() as f64) * ratio) as usize;
            edges.shuffle(&mut rng);
            for (i, &(u, v)) in edges.iter().take(deletions).enumerate() {
                ops.push(ScriptOp::Delete(u, v));
                if i % 4 == 3 {
                    ops.push(ScriptOp::Query);
                }
            }
        }
        ScriptKind::Oscillate { n, low, high, cycles } => {
            let g = gen_graph(GraphKind::Gnp { p: 1.0 }, n, seed)?;
            let mut pool: Vec<_> = g.edges().collect();
            pool.shuffle(&mut rng);
            if (high as usize) > pool.len() || low >= high {
                return Err(Error::InvalidParam(format!(
                    "oscillation band {low}..{high} infeasible on {n} vertices"
                )));
            }
            let mut present = 0u64;
            let mut stack: Vec<(Vertex, Vertex)> = Vec::new();
            let mut spare: std::collections::VecDeque<(Vertex, Vertex)> = Default::default();
            let mut pool_iter = pool.into_iter();
            while present < high {
                let (u, v) = pool_iter.next().expect("pool large enough");
                stack.push((u, v));
                ops.push(ScriptOp::Insert(u, v));
                present += 1;
            }
            for _ in 0..cycles {
                while present > low {
                    let (u, v) = stack.pop().expect("stack tracks present edges");
                    ops.push(ScriptOp::Delete(u, v));
                    spare.push_back((u, v));
                    present -= 1;
                }
                while present < high {
                    let (u, v) = spare.pop_front().expect("spare refills");
                    stack.push((u, v));
                    ops.push(ScriptOp::Insert(u, v));
                    present += 1;
                }
            }
        }
    }
    Ok(UpdateScript { ops })
}

/// An update source that sees the full engine state (graph, cover, current
/// matching) before choosing each update.
pub trait Adversary {
    fn next_op(&mut self, view: &EngineView<'_>) -> Option<ScriptOp>;
}

/// Replays a fixed script, ignoring the state.
pub struct ScriptedAdversary {
    ops: std::vec::IntoIter<ScriptOp>,
}

impl ScriptedAdversary {
    pub fn new(script: UpdateScript) -> Self {
        ScriptedAdversary { ops: script.ops.into_iter() }
    }
}

impl Adversary for ScriptedAdversary {
    fn next_op(&mut self, _view: &EngineView<'_>) -> Option<ScriptOp> {
        self.ops.next()
    }
}

/// Builds a dense graph, then attacks the cover: deletes the surviving
/// sampled good-pair edges (`F3`) of the engine's current cover, read
/// straight from the engine state before each update.
pub struct CoverAttackAdversary {
    build: std::vec::IntoIter<(Vertex, Vertex)>,
    attacks_left: u64,
    rng: ChaCha8Rng,
}

impl CoverAttackAdversary {
    pub fn new(n: u32, p: f64, attacks: u64, seed: u64) -> Result<Self> {
        let g = gen_graph(GraphKind::Gnp { p }, n, seed)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let mut edges: Vec<_> = g.edges().collect();
        edges.shuffle(&mut rng);
        Ok(CoverAttackAdversary { build: edges.into_iter(), attacks_left: attacks, rng })
    }
}

impl Adversary for CoverAttackAdversary {
    fn next_op(&mut self, view: &EngineView<'_>) -> Option<ScriptOp> {
        if let Some((u, v)) = self.build.next() {
            return Some(ScriptOp::Insert(u, v));
        }
        if self.attacks_left == 0 {
            return None;
        }
        self.attacks_left -= 1;
        // delete a surviving F3 edge of the engine's own cover
        if let Some(f3) = view.cover_f3 {
            if let Some(&(u, v)) = f3.iter().find(|&&(u, v)| view.g.adjacency_query(u, v)) {
                return Some(ScriptOp::Delete(u, v));
            }
        }
        // cover exhausted: delete a matched edge if any, else a random one
        if let Some(&(u, v)) = view.matching.edges().first() {
            return Some(ScriptOp::Delete(u, v));
        }
        let edges: Vec<_> = view.g.edges().collect();
        if edges.is_empty() {
            None
        } else {
            let idx = self.rng.random_range(0..edges.len());
            Some(ScriptOp::Delete(edges[idx].0, edges[idx].1))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn script_text_roundtrip() {
        let script = UpdateScript {
            ops: vec![ScriptOp::Insert(0, 1), ScriptOp::Query, ScriptOp::Delete(0, 1)],
        };
        let text = script.to_text();
        assert_eq!(text, "+ 0 1\n?\n- 0 1\n");
        let parsed = UpdateScript::parse(&text).unwrap();
        assert_eq!(parsed.ops, script.ops);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = "+ 0 1\n* 2 3\n";
        assert!(matches!(UpdateScript::parse(bad), Err(Error::Parse { line: 2, .. })));
        let bad = "+ 0\n";
        assert!(matches!(UpdateScript::parse(bad), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn insert_then_delete_balances() {
        let script = gen_script(&ScriptKind::InsertThenDelete { n: 20, p: 0.3 }, 4).unwrap();
        let inserts = script.ops.iter().filter(|o| matches!(o, ScriptOp::Insert(..))).count();
        let deletes = script.ops.iter().filter(|o| matches!(o, ScriptOp::Delete(..))).count();
        assert_eq!(inserts, deletes);
        assert_eq!(script.len(), 2 * inserts);
    }

    #[test]
    fn oscillation_stays_in_band() {
        let script =
            gen_script(&ScriptKind::Oscillate { n: 16, low: 20, high: 30, cycles: 3 }, 9).unwrap();
        let mut m = 0i64;
        let mut peak = 0i64;
        let mut post_build_min = i64::MAX;
        let mut built = false;
        for op in &script.ops {
            match op {
                ScriptOp::Insert(..) => m += 1,
                ScriptOp::Delete(..) => m -= 1,
                ScriptOp::Query => {}
            }
            peak = peak.max(m);
            if built {
                post_build_min = post_build_min.min(m);
            }
            if m == 30 {
                built = true;
            }
        }
        assert_eq!(peak, 30);
        assert_eq!(post_build_min, 20);
    }

    #[test]
    fn scripts_deterministic_per_seed() {
        let a = gen_script(&ScriptKind::DeleteHeavy { n: 24, p: 0.4, ratio: 0.8 }, 7).unwrap();
        let b = gen_script(&ScriptKind::DeleteHeavy { n: 24, p: 0.4, ratio: 0.8 }, 7).unwrap();
        assert_eq!(a.ops, b.ops);
    }
}
