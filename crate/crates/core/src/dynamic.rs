//! Fully dynamic `(1 - o(1))`-approximate matching with sparse and dense
//! regimes.
//!
//! Sparse regime: a lazy matcher over the whole graph. Dense regime (edge
//! count above `n^2/tau`, with hysteresis at half that): the matcher runs
//! over a matching cover `F` rebuilt every `period` updates; insertions
//! always enter `F`, deletions outside `F` are ignored.
//!
//! [`DynamicEngine`] performs the heavy work (cover rebuild, matcher
//! re-initialization) synchronously; [`DeamortizedEngine`] spreads the same
//! work over updates with a per-update unit budget, rotating three shadow
//! structures through build / init / catch-up phases and answering from the
//! newest up-to-date structure.
//!
//! Work units are charged by a shared size-based model: one unit per edge
//! move, `deg+1` per greedy vertex, `m+n` per augmenting search, and the
//! partition module's per-step charges. Both engines charge identically for
//! identical work, so their per-update counts are comparable.

use std::collections::{BTreeSet, VecDeque};

use crate::cover::{CoverBuild, CoverParams, CoverReport};
use crate::error::{Error, Result};
use crate::graph::{DeleteStatus, Graph, Vertex};
use crate::matching::{augment_from, mate_to_matching, Matching, UNMATCHED};
use crate::script::ScriptOp;

/// Default recompute period: `ceil(n^1.4 * ln(n)^2)`.
pub fn default_period(n: u32) -> u64 {
    let nf = (n.max(2)) as f64;
    (nf.powf(1.4) * nf.ln().powi(2)).ceil() as u64
}

#[derive(Debug, Clone)]
pub struct DynConfig {
    pub epsilon: f64,
    /// Threshold divisor: dense above `n^2/tau`, sparse below `n^2/(2 tau)`.
    pub tau: f64,
    /// Dense-regime cover recompute interval, in updates.
    pub period: u64,
    pub cover: CoverParams,
}

impl DynConfig {
    pub fn defaults(n: u32, seed: u64) -> Self {
        DynConfig {
            epsilon: 0.1,
            tau: 4.0,
            period: default_period(n),
            cover: CoverParams::defaults(n, seed),
        }
    }

    pub fn dense_on(&self, n: u32) -> u64 {
        ((n as f64) * (n as f64) / self.tau).floor() as u64
    }

    pub fn dense_off(&self, n: u32) -> u64 {
        ((n as f64) * (n as f64) / (2.0 * self.tau)).floor() as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Sparse,
    Dense,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateStatus {
    Applied,
    AlreadyPresent,
    Absent,
}

#[derive(Debug, Clone)]
pub struct UpdateOutcome {
    pub status: UpdateStatus,
    pub regime: Regime,
    pub matching_size: usize,
    pub work_units: u64,
    pub m: u64,
}

/// Engine state handed to adaptive adversaries before each update.
pub struct EngineView<'a> {
    pub g: &'a Graph,
    pub regime: Regime,
    pub matching: Matching,
    pub cover_f3: Option<&'a [(Vertex, Vertex)]>,
    pub f: Option<&'a Graph>,
    pub update_count: u64,
}

// ---------------------------------------------------------------------------
// resumable exact matcher

enum TaskPhase {
    Greedy(u32),
    Augment(u32),
}

/// Exact matching recomputation over a live host graph, resumable in
/// budgeted chunks: a greedy pass, then one augmenting search per free
/// vertex. Host deletions during the run are forwarded via
/// [`RematchTask::on_host_delete`]; host drift is accounted as staleness by
/// the owner.
struct RematchTask {
    mate: Vec<u32>,
    phase: TaskPhase,
}

impl RematchTask {
    fn new(n: u32) -> Self {
        RematchTask { mate: vec![UNMATCHED; n as usize], phase: TaskPhase::Greedy(0) }
    }

    fn on_host_delete(&mut self, u: Vertex, v: Vertex) {
        if self.mate[u as usize] == v {
            self.mate[u as usize] = UNMATCHED;
            self.mate[v as usize] = UNMATCHED;
        }
    }

    /// Advance within `budget` units; returns `(spent, done)`. Makes no
    /// progress when the budget cannot pay for the next sub-step.
    fn step(&mut self, host: &Graph, budget: u64) -> (u64, bool) {
        let n = host.n();
        let m = host.m();
        let mut spent = 0u64;
        loop {
            match self.phase {
                TaskPhase::Greedy(v) => {
                    if v >= n {
                        self.phase = TaskPhase::Augment(0);
                        continue;
                    }
                    let cost = host.degree(v) as u64 + 1;
                    if spent + cost > budget {
                        return (spent, false);
                    }
                    if self.mate[v as usize] == UNMATCHED {
                        let row = host.row(v);
                        'scan: for (wi, &word) in row.iter().enumerate() {
                            let mut word = word;
                            while word != 0 {
                                let w = wi as u32 * 64 + word.trailing_zeros();
                                word &= word - 1;
                                if w != v && self.mate[w as usize] == UNMATCHED {
                                    self.mate[v as usize] = w;
                                    self.mate[w as usize] = v;
                                    break 'scan;
                                }
                            }
                        }
                    }
                    spent += cost;
                    self.phase = TaskPhase::Greedy(v + 1);
                }
                TaskPhase::Augment(v) => {
                    if v >= n {
                        return (spent, true);
                    }
                    let free = self.mate[v as usize] == UNMATCHED;
                    let isolated = host.degree(v) == 0;
                    let cost = if free && !isolated { m + n as u64 } else { 1 };
                    if spent + cost > budget {
                        return (spent, false);
                    }
                    if free && !isolated {
                        augment_from(host, &mut self.mate, v);
                    }
                    spent += cost;
                    self.phase = TaskPhase::Augment(v + 1);
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// lazy matcher with optional spreading

/// Lazy matcher: keeps a matching valid under host edits (matched deletions
/// drop out immediately) and recomputes an exact matching of the host when
/// enough staleness accumulates. In sync mode the recompute runs in place;
/// in spread mode it advances as a budgeted task.
struct LazySpread {
    host: Graph,
    mate: Vec<u32>,
    msize: usize,
    epsilon: f64,
    stale: u64,
    matched_dels: u64,
    task: Option<RematchTask>,
    stale_at_task_start: u64,
    sync: bool,
    rematches: u64,
}

impl LazySpread {
    fn new(n: u32, epsilon: f64, sync: bool) -> Self {
        LazySpread {
            host: Graph::new(n),
            mate: vec![UNMATCHED; n as usize],
            msize: 0,
            epsilon,
            stale: 0,
            matched_dels: 0,
            task: None,
            stale_at_task_start: 0,
            sync,
            rematches: 0,
        }
    }

    fn from_edges(
        n: u32,
        edges: impl IntoIterator<Item = (Vertex, Vertex)>,
        epsilon: f64,
        sync: bool,
    ) -> Result<(Self, u64)> {
        let mut lazy = LazySpread::new(n, epsilon, sync);
        let mut units = 0u64;
        for (u, v) in edges {
            lazy.host.insert_edge(u, v)?;
            units += 1;
        }
        units += lazy.recompute_now();
        Ok((lazy, units))
    }

    /// Full recompute window in updates: `(eps/2) * |M|`, at least one.
    fn window(&self) -> u64 {
        ((self.epsilon / 2.0 * self.msize as f64).floor() as u64).max(1)
    }

    fn stale_trigger(&self) -> bool {
        if self.sync {
            self.stale >= self.window() || self.matched_dels >= self.window().div_ceil(2)
        } else {
            // start early so the spread task lands inside the full window
            self.stale >= self.window().div_ceil(2).max(1)
                || self.matched_dels >= self.window().div_ceil(4).max(1)
        }
    }

    fn insert(&mut self, u: Vertex, v: Vertex) -> Result<u64> {
        self.host.insert_edge(u, v)?;
        self.stale += 1;
        Ok(1 + self.maybe_recompute())
    }

    fn delete(&mut self, u: Vertex, v: Vertex) -> Result<u64> {
        let mut units = 1;
        if self.host.delete_edge(u, v)? == DeleteStatus::Removed {
            if self.mate[u as usize] == v {
                self.mate[u as usize] = UNMATCHED;
                self.mate[v as usize] = UNMATCHED;
                self.msize -= 1;
                self.matched_dels += 1;
                units += 1;
            }
            if let Some(task) = &mut self.task {
                task.on_host_delete(u, v);
            }
            self.stale += 1;
        }
        Ok(units + self.maybe_recompute())
    }

    fn maybe_recompute(&mut self) -> u64 {
        if self.sync {
            if self.stale_trigger() {
                return self.recompute_now();
            }
        } else if self.task.is_none() && self.stale_trigger() {
            self.task = Some(RematchTask::new(self.host.n()));
            self.stale_at_task_start = self.stale;
        }
        0
    }

    fn recompute_now(&mut self) -> u64 {
        let mut task = RematchTask::new(self.host.n());
        let mut units = 0;
        loop {
            let (spent, done) = task.step(&self.host, u64::MAX);
            units += spent;
            if done {
                break;
            }
        }
        self.adopt(task.mate, 0);
        units
    }

    fn adopt(&mut self, mate: Vec<u32>, residual_stale: u64) {
        self.mate = mate;
        self.msize = self.mate.iter().filter(|&&m| m != UNMATCHED).count() / 2;
        self.stale = residual_stale;
        self.matched_dels = 0;
        self.rematches += 1;
    }

    /// Spread-mode progress; returns units spent (at most `budget`).
    fn advance(&mut self, budget: u64) -> u64 {
        debug_assert!(!self.sync);
        let Some(mut task) = self.task.take() else { return 0 };
        let (spent, done) = task.step(&self.host, budget);
        if done {
            let drift = self.stale - self.stale_at_task_start;
            self.adopt(task.mate, drift);
        } else {
            self.task = Some(task);
        }
        spent
    }

    fn has_task(&self) -> bool {
        self.task.is_some()
    }

    fn matching(&self) -> Matching {
        mate_to_matching(&self.mate)
    }
}

// ---------------------------------------------------------------------------
// synchronous two-regime engine

pub struct DynamicEngine {
    n: u32,
    cfg: DynConfig,
    g: Graph,
    regime: Regime,
    lazy: LazySpread,
    last_cover: Option<CoverReport>,
    update_count: u64,
    dense_updates: u64,
    rebuilds: u64,
    total_units: u64,
}

impl DynamicEngine {
    pub fn new(n: u32, cfg: DynConfig) -> Self {
        let epsilon = cfg.epsilon;
        DynamicEngine {
            n,
            cfg,
            g: Graph::new(n),
            regime: Regime::Sparse,
            lazy: LazySpread::new(n, epsilon, true),
            last_cover: None,
            update_count: 0,
            dense_updates: 0,
            rebuilds: 0,
            total_units: 0,
        }
    }

    pub fn g(&self) -> &Graph {
        &self.g
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn matching(&self) -> Matching {
        self.lazy.matching()
    }

    /// Cover edge set `F` in dense regime (the lazy matcher's host).
    pub fn f(&self) -> Option<&Graph> {
        matches!(self.regime, Regime::Dense).then_some(&self.lazy.host)
    }

    pub fn last_cover(&self) -> Option<&CoverReport> {
        self.last_cover.as_ref()
    }

    /// Cover rebuilds plus full sparse re-initializations.
    pub fn rebuild_count(&self) -> u64 {
        self.rebuilds
    }

    pub fn total_units(&self) -> u64 {
        self.total_units
    }

    pub fn update_count(&self) -> u64 {
        self.update_count
    }

    pub fn view(&self) -> EngineView<'_> {
        EngineView {
            g: &self.g,
            regime: self.regime,
            matching: self.matching(),
            cover_f3: self.last_cover.as_ref().map(|c| c.f3.as_slice()),
            f: self.f(),
            update_count: self.update_count,
        }
    }

    /// Build the dense structure: the cover of the current graph, or the
    /// whole edge set when the graph is too small to partition.
    fn rebuild_dense(&mut self) -> Result<u64> {
        let mut units = 0u64;
        let feasible = (self.n as f64) >= self.cfg.cover.t as f64 / self.cfg.cover.gamma;
        let f_edges: Vec<(Vertex, Vertex)> = if feasible {
            let mut params = self.cfg.cover.clone();
            params.seed = params.seed.wrapping_add(self.update_count);
            let mut build = CoverBuild::new(&self.g, params)?;
            while !build.is_done() {
                units += build.step(&self.g)?;
            }
            let report = build.into_report();
            let f = report.f();
            self.last_cover = Some(report);
            f
        } else {
            self.last_cover = None;
            self.g.edges().collect()
        };
        let (lazy, init_units) =
            LazySpread::from_edges(self.n, f_edges, self.cfg.epsilon, true)?;
        self.lazy = lazy;
        self.rebuilds += 1;
        self.dense_updates = 0;
        Ok(units + init_units)
    }

    fn rebuild_sparse(&mut self) -> Result<u64> {
        let (lazy, units) =
            LazySpread::from_edges(self.n, self.g.edges(), self.cfg.epsilon, true)?;
        self.lazy = lazy;
        self.rebuilds += 1;
        Ok(units)
    }

    pub fn update(&mut self, op: ScriptOp) -> Result<UpdateOutcome> {
        let mut units = 1u64;
        let status = match op {
            ScriptOp::Query => UpdateStatus::Applied,
            ScriptOp::Insert(u, v) => {
                if self.g.insert_edge(u, v)? {
                    units += match self.regime {
                        Regime::Sparse => self.lazy.insert(u, v)?,
                        // every insertion enters F
                        Regime::Dense => self.lazy.insert(u, v)?,
                    };
                    UpdateStatus::Applied
                } else {
                    UpdateStatus::AlreadyPresent
                }
            }
            ScriptOp::Delete(u, v) => {
                if self.g.delete_edge(u, v)? == DeleteStatus::Removed {
                    match self.regime {
                        Regime::Sparse => units += self.lazy.delete(u, v)?,
                        Regime::Dense => {
                            if self.lazy.host.adjacency_query(u, v) {
                                units += self.lazy.delete(u, v)?;
                            }
                            // deletions outside F are ignored
                        }
                    }
                    UpdateStatus::Applied
                } else {
                    UpdateStatus::Absent
                }
            }
        };

        if status == UpdateStatus::Applied && !matches!(op, ScriptOp::Query) {
            self.update_count += 1;
            match self.regime {
                Regime::Sparse => {
                    if self.g.m() > self.cfg.dense_on(self.n) {
                        self.regime = Regime::Dense;
                        units += self.rebuild_dense()?;
                    }
                }
                Regime::Dense => {
                    if self.g.m() < self.cfg.dense_off(self.n) {
                        self.regime = Regime::Sparse;
                        units += self.rebuild_sparse()?;
                    } else {
                        self.dense_updates += 1;
                        if self.dense_updates >= self.cfg.period {
                            units += self.rebuild_dense()?;
                        }
                    }
                }
            }
        }
        self.total_units += units;
        Ok(UpdateOutcome {
            status,
            regime: self.regime,
            matching_size: self.lazy.msize,
            work_units: units,
            m: self.g.m(),
        })
    }
}

// ---------------------------------------------------------------------------
// deamortized engine

enum ShadowPhase {
    Build(Box<CoverBuild>),
    Init { f_edges: Vec<(Vertex, Vertex)>, cursor: usize, lazy: LazySpread },
    CatchUp { lazy: LazySpread },
}

struct Shadow {
    started_at: u64,
    pending: VecDeque<(bool, Vertex, Vertex)>,
    phase: ShadowPhase,
    drained_this_step: bool,
}

impl Shadow {
    fn phase_name(&self) -> &'static str {
        match self.phase {
            ShadowPhase::Build(_) => "building partition",
            ShadowPhase::Init { .. } => "initializing over F",
            ShadowPhase::CatchUp { .. } => "catching up",
        }
    }

    fn deadline(&self, period: u64) -> u64 {
        let phases_done = match self.phase {
            ShadowPhase::Build(_) => 1,
            ShadowPhase::Init { .. } => 2,
            ShadowPhase::CatchUp { .. } => 3,
        };
        self.started_at + phases_done * period
    }
}

struct SparseBg {
    lazy: LazySpread,
    overflow: BTreeSet<(Vertex, Vertex)>,
    cap: u64,
}

impl SparseBg {
    fn insert(&mut self, u: Vertex, v: Vertex) -> Result<u64> {
        let key = if u < v { (u, v) } else { (v, u) };
        if self.lazy.host.m() >= self.cap {
            self.overflow.insert(key);
            Ok(1)
        } else {
            self.lazy.insert(u, v)
        }
    }

    fn delete(&mut self, u: Vertex, v: Vertex) -> Result<u64> {
        let key = if u < v { (u, v) } else { (v, u) };
        let mut units = 0;
        if self.lazy.host.adjacency_query(u, v) {
            units += self.lazy.delete(u, v)?;
            // refill from the overflow list
            if self.lazy.host.m() < self.cap {
                if let Some(&(a, b)) = self.overflow.iter().next() {
                    self.overflow.remove(&(a, b));
                    units += self.lazy.insert(a, b)?;
                }
            }
        } else {
            self.overflow.remove(&key);
            units += 1;
        }
        Ok(units)
    }
}

/// Worst-case variant of [`DynamicEngine`]: identical externally visible
/// guarantee, heavy work spread over updates under a per-update unit budget.
pub struct DeamortizedEngine {
    n: u32,
    cfg: DynConfig,
    g: Graph,
    regime: Regime,
    clock: u64,
    update_count: u64,
    sparse_bg: SparseBg,
    active_dense: Option<LazySpread>,
    shadows: VecDeque<Shadow>,
    last_shadow_start: u64,
    total_units: u64,
}

/// Minimum budget for the fixed per-update bookkeeping.
pub const MIN_STEP_QUANTUM: u64 = 64;

impl DeamortizedEngine {
    pub fn new(n: u32, cfg: DynConfig) -> Self {
        let cap = cfg.dense_on(n).max(1);
        let epsilon = cfg.epsilon;
        DeamortizedEngine {
            n,
            cfg,
            g: Graph::new(n),
            regime: Regime::Sparse,
            clock: 0,
            update_count: 0,
            sparse_bg: SparseBg {
                lazy: LazySpread::new(n, epsilon, false),
                overflow: BTreeSet::new(),
                cap,
            },
            active_dense: None,
            shadows: VecDeque::new(),
            last_shadow_start: 0,
            total_units: 0,
        }
    }

    pub fn g(&self) -> &Graph {
        &self.g
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn total_units(&self) -> u64 {
        self.total_units
    }

    fn answering(&self) -> &LazySpread {
        match (self.regime, &self.active_dense) {
            (Regime::Dense, Some(dense)) => dense,
            _ => &self.sparse_bg.lazy,
        }
    }

    pub fn matching(&self) -> Matching {
        self.answering().matching()
    }

    pub fn matching_size(&self) -> usize {
        self.answering().msize
    }

    fn start_shadow(&mut self) -> Result<()> {
        let feasible = (self.n as f64) >= self.cfg.cover.t as f64 / self.cfg.cover.gamma;
        let phase = if feasible {
            let mut params = self.cfg.cover.clone();
            params.seed = params.seed.wrapping_add(self.clock);
            ShadowPhase::Build(Box::new(CoverBuild::new(&self.g, params)?))
        } else {
            ShadowPhase::Init {
                f_edges: self.g.edges().collect(),
                cursor: 0,
                lazy: LazySpread::new(self.n, self.cfg.epsilon, false),
            }
        };
        self.shadows.push_back(Shadow {
            started_at: self.clock,
            pending: VecDeque::new(),
            phase,
            drained_this_step: false,
        });
        self.last_shadow_start = self.clock;
        Ok(())
    }

    /// Advance one shadow within `budget`; returns `(spent, became_ready)`.
    fn advance_shadow(
        g: &Graph,
        n: u32,
        epsilon: f64,
        shadow: &mut Shadow,
        budget: u64,
    ) -> Result<(u64, bool)> {
        let mut spent = 0u64;
        loop {
            match &mut shadow.phase {
                ShadowPhase::Build(build) => {
                    if build.is_done() {
                        let ShadowPhase::Build(build) = std::mem::replace(
                            &mut shadow.phase,
                            ShadowPhase::CatchUp { lazy: LazySpread::new(n, epsilon, false) },
                        ) else {
                            unreachable!()
                        };
                        shadow.phase = ShadowPhase::Init {
                            f_edges: build.into_report().f(),
                            cursor: 0,
                            lazy: LazySpread::new(n, epsilon, false),
                        };
                        continue;
                    }
                    if spent + build.max_step_units(n) > budget {
                        return Ok((spent, false));
                    }
                    spent += build.step(g)?;
                }
                ShadowPhase::Init { f_edges, cursor, lazy } => {
                    while *cursor < f_edges.len() && spent < budget {
                        let (u, v) = f_edges[*cursor];
                        // stale edges may have been deleted since assembly;
                        // the queued delete will be replayed anyway
                        lazy.host.insert_edge(u, v)?;
                        *cursor += 1;
                        spent += 1;
                    }
                    if *cursor < f_edges.len() {
                        return Ok((spent, false));
                    }
                    if lazy.task.is_none() && lazy.rematches == 0 {
                        lazy.task = Some(RematchTask::new(n));
                        lazy.stale_at_task_start = 0;
                    }
                    if lazy.has_task() {
                        spent += lazy.advance(budget.saturating_sub(spent));
                    }
                    if lazy.has_task() {
                        return Ok((spent, false));
                    }
                    let ShadowPhase::Init { lazy, .. } = std::mem::replace(
                        &mut shadow.phase,
                        ShadowPhase::CatchUp { lazy: LazySpread::new(n, epsilon, false) },
                    ) else {
                        unreachable!()
                    };
                    shadow.phase = ShadowPhase::CatchUp { lazy };
                }
                ShadowPhase::CatchUp { lazy } => {
                    // replay at three queued updates per live update
                    if !shadow.drained_this_step {
                        shadow.drained_this_step = true;
                        for _ in 0..3 {
                            let Some((is_insert, u, v)) = shadow.pending.pop_front() else {
                                break;
                            };
                            if spent + 4 > budget {
                                shadow.pending.push_front((is_insert, u, v));
                                return Ok((spent, false));
                            }
                            spent += if is_insert {
                                lazy.insert(u, v)?
                            } else if lazy.host.adjacency_query(u, v) {
                                lazy.delete(u, v)?
                            } else {
                                1
                            };
                        }
                    }
                    if lazy.has_task() {
                        spent += lazy.advance(budget.saturating_sub(spent));
                    }
                    return Ok((spent, shadow.pending.is_empty()));
                }
            }
        }
    }

    pub fn step(&mut self, op: ScriptOp, step_budget: u64) -> Result<UpdateOutcome> {
        if step_budget < MIN_STEP_QUANTUM {
            return Err(Error::InvalidParam(format!(
                "step budget {step_budget} below the per-update quantum {MIN_STEP_QUANTUM}"
            )));
        }
        self.clock += 1;
        let mut units = 1u64;

        // apply to ground truth and propagate to always-on structures
        let status = match op {
            ScriptOp::Query => UpdateStatus::Applied,
            ScriptOp::Insert(u, v) => {
                if self.g.insert_edge(u, v)? {
                    self.update_count += 1;
                    units += self.sparse_bg.insert(u, v)?;
                    if let Some(dense) = &mut self.active_dense {
                        units += dense.insert(u, v)?;
                    }
                    for shadow in &mut self.shadows {
                        shadow.pending.push_back((true, u, v));
                        units += 1;
                    }
                    UpdateStatus::Applied
                } else {
                    UpdateStatus::AlreadyPresent
                }
            }
            ScriptOp::Delete(u, v) => {
                if self.g.delete_edge(u, v)? == DeleteStatus::Removed {
                    self.update_count += 1;
                    units += self.sparse_bg.delete(u, v)?;
                    if let Some(dense) = &mut self.active_dense {
                        if dense.host.adjacency_query(u, v) {
                            units += dense.delete(u, v)?;
                        }
                    }
                    for shadow in &mut self.shadows {
                        shadow.pending.push_back((false, u, v));
                        units += 1;
                    }
                    UpdateStatus::Applied
                } else {
                    UpdateStatus::Absent
                }
            }
        };

        // pipeline management: a shadow starts immediately and then every
        // `period` updates
        if self.shadows.is_empty() && self.active_dense.is_none()
            || self.clock - self.last_shadow_start >= self.cfg.period
        {
            if self.shadows.len() < 3 {
                self.start_shadow()?;
                units += 1;
            }
        }

        // spend the remaining budget: refresh tasks first (their windows
        // are the tightest), then shadows oldest-first
        let mut remaining = step_budget.saturating_sub(units);
        let spent = self.sparse_bg.lazy.advance(remaining);
        units += spent;
        remaining -= spent;
        if let Some(dense) = &mut self.active_dense {
            let spent = dense.advance(remaining);
            units += spent;
            remaining -= spent;
        }
        let mut ready_idx = None;
        for idx in 0..self.shadows.len() {
            let shadow = &mut self.shadows[idx];
            shadow.drained_this_step = false;
            let (spent, ready) =
                Self::advance_shadow(&self.g, self.n, self.cfg.epsilon, shadow, remaining)?;
            units += spent;
            remaining = remaining.saturating_sub(spent);
            if ready {
                ready_idx = Some(idx);
                continue;
            }
            // each phase must finish within its one-period window
            if self.clock >= shadow.deadline(self.cfg.period) {
                return Err(Error::PhaseBudgetExceeded {
                    phase: shadow.phase_name(),
                    budget: step_budget,
                });
            }
        }

        // adopt the newest up-to-date structure; everything older (the
        // adopted shadow's predecessors and the previous active) is
        // discarded
        if let Some(idx) = ready_idx {
            let shadow = self.shadows.remove(idx).expect("index valid");
            for _ in 0..idx {
                self.shadows.pop_front();
            }
            let ShadowPhase::CatchUp { lazy } = shadow.phase else { unreachable!() };
            self.active_dense = Some(lazy);
        }

        // regime transitions: hysteresis band, no rebuilds needed since all
        // structures are always on
        if status == UpdateStatus::Applied && !matches!(op, ScriptOp::Query) {
            match self.regime {
                Regime::Sparse if self.g.m() > self.cfg.dense_on(self.n) => {
                    self.regime = Regime::Dense;
                }
                Regime::Dense if self.g.m() < self.cfg.dense_off(self.n) => {
                    self.regime = Regime::Sparse;
                }
                _ => {}
            }
        }

        debug_assert!(units <= step_budget, "budget overrun: {units} > {step_budget}");
        self.total_units += units;
        Ok(UpdateOutcome {
            status,
            regime: self.regime,
            matching_size: self.matching_size(),
            work_units: units,
            m: self.g.m(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_graph, GraphKind};
    use crate::matching::max_matching_general;
    use crate::script::{gen_script, ScriptKind};

    fn small_cfg(n: u32, period: u64) -> DynConfig {
        let mut cfg = DynConfig::defaults(n, 7);
        cfg.period = period;
        cfg
    }

    #[test]
    fn init_is_sparse_and_empty() {
        let engine = DynamicEngine::new(8, small_cfg(8, 50));
        assert_eq!(engine.regime(), Regime::Sparse);
        assert_eq!(engine.matching().size(), 0);
        let cfg = small_cfg(8, 50);
        assert_eq!(cfg.dense_on(8), 16, "n^2/tau with tau=4");
        let mut cfg2 = cfg.clone();
        cfg2.tau = 2.0;
        assert_eq!(cfg2.dense_on(8), 32);
    }

    #[test]
    fn perfect_matching_inserts_stay_maximum() {
        let mut engine = DynamicEngine::new(8, small_cfg(8, 50));
        let pm = gen_graph(GraphKind::PerfectMatching, 8, 0).unwrap();
        for (i, (u, v)) in pm.edges().enumerate() {
            let out = engine.update(ScriptOp::Insert(u, v)).unwrap();
            assert_eq!(out.matching_size, i + 1, "disjoint edges are all matched");
            assert!(engine.matching().is_valid_in(engine.g()));
        }
    }

    #[test]
    fn deleting_matched_edge_removes_it() {
        let mut engine = DynamicEngine::new(6, small_cfg(6, 50));
        engine.update(ScriptOp::Insert(0, 1)).unwrap();
        let m = engine.matching();
        assert_eq!(m.edges(), &[(0, 1)]);
        let out = engine.update(ScriptOp::Delete(0, 1)).unwrap();
        assert_eq!(out.matching_size, 0);
        assert!(!engine
            .matching()
            .edges()
            .contains(&(0, 1)));
    }

    #[test]
    fn idempotent_updates_signal_status() {
        let mut engine = DynamicEngine::new(6, small_cfg(6, 50));
        engine.update(ScriptOp::Insert(0, 1)).unwrap();
        let out = engine.update(ScriptOp::Insert(0, 1)).unwrap();
        assert_eq!(out.status, UpdateStatus::AlreadyPresent);
        let out = engine.update(ScriptOp::Delete(2, 3)).unwrap();
        assert_eq!(out.status, UpdateStatus::Absent);
    }

    #[test]
    fn approximation_holds_per_step_insert_only() {
        let n = 24;
        let mut engine = DynamicEngine::new(n, small_cfg(n, 40));
        let script = gen_script(&ScriptKind::InsertOnly { n, p: 0.5 }, 3).unwrap();
        for op in script.ops {
            engine.update(op).unwrap();
            let m = engine.matching();
            assert!(m.is_valid_in(engine.g()));
            let mu = max_matching_general(engine.g()).size();
            let eps_total = engine.cfg.epsilon
                + engine.cfg.cover.default_alpha() * n as f64 / mu.max(1) as f64;
            if mu > 0 && engine.regime() == Regime::Sparse {
                assert!(
                    m.size() as f64 >= (1.0 - engine.cfg.epsilon) * mu as f64 - 1e-9,
                    "sparse-regime slack violated: {} vs mu {mu}",
                    m.size()
                );
            } else if mu > 0 {
                assert!(m.size() as f64 >= (1.0 - eps_total) * mu as f64 - 1e-9);
            }
        }
    }

    #[test]
    fn regimes_flip_with_hysteresis() {
        let n = 12u32;
        let mut cfg = small_cfg(n, 500);
        cfg.tau = 4.0; // dense above 36, sparse below 18
        let mut engine = DynamicEngine::new(n, cfg);
        let complete = gen_graph(GraphKind::Gnp { p: 1.0 }, n, 0).unwrap();
        let edges: Vec<_> = complete.edges().collect();
        for &(u, v) in edges.iter().take(37) {
            engine.update(ScriptOp::Insert(u, v)).unwrap();
        }
        assert_eq!(engine.regime(), Regime::Dense);
        let rebuilds_at_dense = engine.rebuild_count();
        assert!(rebuilds_at_dense >= 1);
        // oscillate inside the band: no further rebuilds
        for &(u, v) in edges.iter().take(10) {
            engine.update(ScriptOp::Delete(u, v)).unwrap();
            engine.update(ScriptOp::Insert(u, v)).unwrap();
        }
        assert_eq!(engine.rebuild_count(), rebuilds_at_dense, "band oscillation rebuilt");
        assert_eq!(engine.regime(), Regime::Dense);
        // crossing the bottom flips to sparse
        for &(u, v) in edges.iter().take(20) {
            engine.update(ScriptOp::Delete(u, v)).unwrap();
        }
        assert_eq!(engine.regime(), Regime::Sparse);
    }

    #[test]
    fn dense_regime_ignores_deletions_outside_f() {
        let n = 10u32;
        let mut cfg = small_cfg(n, 1000);
        cfg.tau = 4.0; // dense above 25
        // tiny n: the cover falls back to all edges, so force a proper F by
        // checking the ignore path through the engine bookkeeping instead
        let mut engine = DynamicEngine::new(n, cfg);
        let complete = gen_graph(GraphKind::Gnp { p: 1.0 }, n, 0).unwrap();
        for (u, v) in complete.edges() {
            engine.update(ScriptOp::Insert(u, v)).unwrap();
        }
        assert_eq!(engine.regime(), Regime::Dense);
        // F currently equals E; delete one edge (it is in F), then delete it
        // again: the second is Absent in g
        let out = engine.update(ScriptOp::Delete(0, 1)).unwrap();
        assert_eq!(out.status, UpdateStatus::Applied);
        let out = engine.update(ScriptOp::Delete(0, 1)).unwrap();
        assert_eq!(out.status, UpdateStatus::Absent);
        assert!(engine.matching().is_valid_in(engine.g()));
    }

    #[test]
    fn periodic_recompute_fires() {
        let n = 10u32;
        let mut cfg = small_cfg(n, 5);
        cfg.tau = 4.0;
        let mut engine = DynamicEngine::new(n, cfg);
        let complete = gen_graph(GraphKind::Gnp { p: 1.0 }, n, 0).unwrap();
        for (u, v) in complete.edges() {
            engine.update(ScriptOp::Insert(u, v)).unwrap();
        }
        assert_eq!(engine.regime(), Regime::Dense);
        let before = engine.rebuild_count();
        // period=5 dense updates trigger a rebuild (delete+insert pairs stay
        // inside the band)
        for round in 0..5 {
            let _ = round;
            engine.update(ScriptOp::Delete(0, 1)).unwrap();
            engine.update(ScriptOp::Insert(0, 1)).unwrap();
        }
        assert!(engine.rebuild_count() > before, "periodic rebuild missed");
    }

    #[test]
    fn deamortized_matches_sync_guarantee() {
        let n = 16u32;
        let script = gen_script(&ScriptKind::InsertThenDelete { n, p: 0.4 }, 11).unwrap();
        let mut sync = DynamicEngine::new(n, small_cfg(n, 30));
        let mut deam = DeamortizedEngine::new(n, small_cfg(n, 30));
        let mut host = Graph::new(n);
        for op in script.ops {
            sync.update(op).unwrap();
            deam.step(op, 1 << 20).unwrap();
            match op {
                ScriptOp::Insert(u, v) => {
                    host.insert_edge(u, v).ok();
                }
                ScriptOp::Delete(u, v) => {
                    host.delete_edge(u, v).ok();
                }
                ScriptOp::Query => {}
            }
            let mu = max_matching_general(&host).size();
            let dm = deam.matching();
            assert!(dm.is_valid_in(&host), "deamortized matching invalid");
            if mu > 0 {
                assert!(
                    dm.size() as f64 >= (1.0 - 0.1) * mu as f64 - 1.0 - 1e-9,
                    "deamortized slack violated: {} vs mu {mu}",
                    dm.size()
                );
            }
        }
    }

    #[test]
    fn deamortized_budget_respected() {
        let n = 16u32;
        let script = gen_script(&ScriptKind::InsertOnly { n, p: 0.5 }, 5).unwrap();
        let budget = 3000u64;
        let mut deam = DeamortizedEngine::new(n, small_cfg(n, 20));
        for op in script.ops {
            let out = deam.step(op, budget).unwrap();
            assert!(out.work_units <= budget, "{} > {budget}", out.work_units);
        }
    }

    #[test]
    fn deamortized_zero_updates_do_no_background_work() {
        let deam = DeamortizedEngine::new(16, small_cfg(16, 20));
        assert_eq!(deam.total_units(), 0);
    }

    #[test]
    fn deamortized_rejects_tiny_budget() {
        let mut deam = DeamortizedEngine::new(16, small_cfg(16, 20));
        assert!(deam.step(ScriptOp::Insert(0, 1), 1).is_err());
    }
}
