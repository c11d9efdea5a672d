//! Cyclic coordinate descent over the blocks of a quotient graph.
//!
//! Each block is one coordinate; its value is the cluster it sits in. A sweep
//! visits every movable block once and moves it to the candidate cluster with
//! the largest modularity gain, provided the gain exceeds `epsilon`. Gains
//! are computed from cached per-cluster side-degree sums in
//! `O(degree(block))`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::objective::{q_aggregated, ModularityValue};
use crate::error::{Error, Result};
use crate::graph::{aggregate, coarsening_violation, AggregatedGraph, BipartiteGraph, Partition};
use crate::scalar::Scalar;

/// Iteration schedule for [`cluster`](super::cluster).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    /// `P_n = T_{P_{n-1}} P_{n-1}`.
    Louvain,
    /// `P_n = T_{P_0} T_{P_{n-1}} P_{n-1}`.
    #[default]
    Interleaved,
}

impl std::str::FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "louvain" => Ok(Schedule::Louvain),
            "interleaved" => Ok(Schedule::Interleaved),
            other => Err(Error::Config(format!("unknown schedule `{other}`"))),
        }
    }
}

impl std::fmt::Display for Schedule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Schedule::Louvain => "louvain",
            Schedule::Interleaved => "interleaved",
        })
    }
}

/// Order in which redistribution places vertices outside the anchors.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AstrayOrder {
    /// Highest degree first, ties by vertex id.
    #[default]
    Degree,
    /// Vertex id order.
    Index,
}

impl std::str::FromStr for AstrayOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "degree" => Ok(AstrayOrder::Degree),
            "index" => Ok(AstrayOrder::Index),
            other => Err(Error::Config(format!("unknown astray order `{other}`"))),
        }
    }
}

impl std::fmt::Display for AstrayOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AstrayOrder::Degree => "degree",
            AstrayOrder::Index => "index",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescentConfig<S> {
    /// Resolution; larger values favour finer partitions.
    pub lambda: S,
    /// Minimum gain for a move, and minimum round-over-round improvement.
    pub epsilon: S,
    /// Cap on sweeps per descent; `None` runs to a fixed point.
    pub max_sweeps: Option<usize>,
    /// `0` keeps natural block order, anything else shuffles each sweep.
    pub seed: u64,
    pub schedule: Schedule,
    pub astray_order: AstrayOrder,
}

impl<S: Scalar> DescentConfig<S> {
    pub fn new(lambda: S) -> Self {
        Self {
            lambda,
            epsilon: S::default_epsilon(),
            max_sweeps: None,
            seed: 0,
            schedule: Schedule::default(),
            astray_order: AstrayOrder::default(),
        }
    }

    pub fn with_astray_order(mut self, order: AstrayOrder) -> Self {
        self.astray_order = order;
        self
    }

    pub fn with_schedule(mut self, schedule: Schedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_epsilon(mut self, epsilon: S) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_max_sweeps(mut self, max_sweeps: usize) -> Self {
        self.max_sweeps = Some(max_sweeps);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > S::zero()) {
            return Err(Error::Config(format!(
                "lambda must be > 0, got {:?}",
                self.lambda
            )));
        }
        if !(self.epsilon >= S::zero()) {
            return Err(Error::Config(format!(
                "epsilon must be >= 0, got {:?}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

impl<S: Scalar> Default for DescentConfig<S> {
    fn default() -> Self {
        Self::new(S::one())
    }
}

/// Destination of a block move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Cluster(usize),
    /// A currently empty cluster, i.e. isolate the block.
    Fresh,
}

/// Mutable descent state over one quotient graph.
///
/// Cluster ids are slots in `0..n_blocks`; a slot is live while it holds at
/// least one block.
#[derive(Debug, Clone)]
pub struct DescentState<'g, S> {
    graph: &'g AggregatedGraph,
    inv_edges: S,
    null_scale: S,
    lambda: S,
    assign: Vec<usize>,
    doc_mass: Vec<i64>,
    feature_mass: Vec<i64>,
    members: Vec<usize>,
    free: Vec<usize>,
    frozen: Vec<bool>,
    anchors: Option<Vec<usize>>,
    quality: S,
    weight_to: Vec<i64>,
    touched: Vec<usize>,
    moves: usize,
}

impl<'g, S: Scalar> DescentState<'g, S> {
    /// `start[b]` is the initial cluster slot of block `b`; slots must be
    /// below `n_blocks`.
    pub fn new(graph: &'g AggregatedGraph, start: &[usize], lambda: S) -> Result<Self> {
        let n = graph.n_blocks();
        if start.len() != n {
            return Err(Error::VertexCountMismatch {
                expected: n,
                got: start.len(),
            });
        }
        if graph.total_edges() == 0 {
            return Err(Error::EmptyGraph);
        }
        if let Some(&bad) = start.iter().find(|&&c| c >= n) {
            return Err(Error::UnknownCluster(bad));
        }
        let mut doc_mass = vec![0i64; n];
        let mut feature_mass = vec![0i64; n];
        let mut members = vec![0usize; n];
        for (b, &c) in start.iter().enumerate() {
            doc_mass[c] += graph.doc_degree(b) as i64;
            feature_mass[c] += graph.feature_degree(b) as i64;
            members[c] += 1;
        }
        let free = (0..n).rev().filter(|&c| members[c] == 0).collect();
        let l = S::from_count(graph.total_edges() as i128);
        let mut state = Self {
            graph,
            inv_edges: S::one() / l.clone(),
            null_scale: lambda.clone() / (l.clone() * l),
            lambda,
            assign: start.to_vec(),
            doc_mass,
            feature_mass,
            members,
            free,
            frozen: vec![false; n],
            anchors: None,
            quality: S::zero(),
            weight_to: vec![0; n],
            touched: Vec::new(),
            moves: 0,
        };
        state.quality = state.quality_from_scratch().total;
        Ok(state)
    }

    /// Restricts every move to the given slots and disables fresh clusters.
    pub(crate) fn restrict_targets(&mut self, anchors: Vec<usize>) {
        self.anchors = Some(anchors);
    }

    pub(crate) fn freeze(&mut self, block: usize) {
        self.frozen[block] = true;
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assign
    }

    pub fn cluster_of(&self, block: usize) -> usize {
        self.assign[block]
    }

    /// Cached modularity, updated incrementally after every move.
    pub fn quality(&self) -> &S {
        &self.quality
    }

    pub fn quality_from_scratch(&self) -> ModularityValue<S> {
        q_aggregated(self.graph, &self.assign, &self.lambda)
            .expect("state is consistent with its graph")
    }

    pub fn moves(&self) -> usize {
        self.moves
    }

    pub fn doc_mass(&self, cluster: usize) -> i64 {
        self.doc_mass[cluster]
    }

    fn is_live(&self, c: usize) -> bool {
        c < self.members.len() && self.members[c] > 0
    }

    /// Value of inserting a block with side degrees `(d1, d2)` and `w` edges
    /// into cluster `c`, relative to leaving it alone. The block must not be
    /// counted in `c`'s masses.
    fn insertion(&self, w: i64, d1: i64, d2: i64, c_doc: i64, c_feat: i64) -> S {
        S::from_count(w as i128) * self.inv_edges.clone()
            - self.null_scale.clone()
                * S::from_count(d1 as i128 * c_feat as i128 + d2 as i128 * c_doc as i128)
    }

    fn block_degrees(&self, b: usize) -> (i64, i64) {
        (
            self.graph.doc_degree(b) as i64,
            self.graph.feature_degree(b) as i64,
        )
    }

    /// Modularity change of moving `block` to `target`, without applying it.
    pub fn move_gain(&self, block: usize, target: Target) -> Result<S> {
        if block >= self.assign.len() {
            return Err(Error::UnknownBlock(block));
        }
        let current = self.assign[block];
        let target = match target {
            Target::Cluster(t) if !self.is_live(t) => return Err(Error::UnknownCluster(t)),
            Target::Cluster(t) if t == current => return Ok(S::zero()),
            Target::Cluster(t) => Some(t),
            Target::Fresh => None,
        };
        let (mut w_cur, mut w_tgt) = (0i64, 0i64);
        for (nb, w) in self.graph.neighbors(block) {
            let c = self.assign[nb];
            if c == current {
                w_cur += w as i64;
            } else if Some(c) == target {
                w_tgt += w as i64;
            }
        }
        let (d1, d2) = self.block_degrees(block);
        let stay = self.insertion(
            w_cur,
            d1,
            d2,
            self.doc_mass[current] - d1,
            self.feature_mass[current] - d2,
        );
        let go = match target {
            Some(t) => self.insertion(w_tgt, d1, d2, self.doc_mass[t], self.feature_mass[t]),
            None => S::zero(),
        };
        Ok(go - stay)
    }

    /// Applies a move unconditionally and returns its gain.
    pub fn apply_move(&mut self, block: usize, target: Target) -> Result<S> {
        let gain = self.move_gain(block, target)?;
        let current = self.assign[block];
        let dest = match target {
            Target::Cluster(t) => t,
            // a lone block is already isolated
            Target::Fresh if self.members[current] == 1 => return Ok(S::zero()),
            Target::Fresh => *self
                .free
                .last()
                .expect("a non-singleton cluster leaves a free slot"),
        };
        if dest != current {
            self.relocate(block, current, dest);
            self.quality = self.quality.clone() + gain.clone();
            self.moves += 1;
        }
        Ok(gain)
    }

    fn relocate(&mut self, block: usize, from: usize, to: usize) {
        let (d1, d2) = self.block_degrees(block);
        if self.members[to] == 0 {
            let pos = self
                .free
                .iter()
                .rposition(|&c| c == to)
                .expect("empty slot is free");
            self.free.remove(pos);
        }
        self.doc_mass[from] -= d1;
        self.feature_mass[from] -= d2;
        self.members[from] -= 1;
        self.doc_mass[to] += d1;
        self.feature_mass[to] += d2;
        self.members[to] += 1;
        self.assign[block] = to;
        if self.members[from] == 0 {
            self.free.push(from);
        }
    }

    fn gather_neighbor_weights(&mut self, block: usize) {
        for (nb, w) in self.graph.neighbors(block) {
            let c = self.assign[nb];
            if self.weight_to[c] == 0 {
                self.touched.push(c);
            }
            self.weight_to[c] += w as i64;
        }
    }

    fn clear_neighbor_weights(&mut self) {
        for &c in &self.touched {
            self.weight_to[c] = 0;
        }
        self.touched.clear();
    }

    /// Best destination for `block` other than its current cluster, with
    /// the insertion value there. Ties go to the lowest slot id.
    fn best_alternative(&self, block: usize, current: usize) -> Option<(usize, S)> {
        let (d1, d2) = self.block_degrees(block);
        let mut best: Option<(usize, S)> = None;
        let mut consider = |t: usize, val: S| match &best {
            Some((bt, bv)) if val < *bv || (val == *bv && t > *bt) => {}
            _ => best = Some((t, val)),
        };
        match &self.anchors {
            Some(anchors) => {
                for &t in anchors {
                    if t != current {
                        let v = self.insertion(
                            self.weight_to[t],
                            d1,
                            d2,
                            self.doc_mass[t],
                            self.feature_mass[t],
                        );
                        consider(t, v);
                    }
                }
            }
            None => {
                for &t in &self.touched {
                    if t != current {
                        let v = self.insertion(
                            self.weight_to[t],
                            d1,
                            d2,
                            self.doc_mass[t],
                            self.feature_mass[t],
                        );
                        consider(t, v);
                    }
                }
                // isolating is only a real alternative if the block has company
                if self.members[current] > 1 {
                    if let Some(&slot) = self.free.last() {
                        consider(slot, S::zero());
                    }
                }
            }
        }
        best
    }

    /// Visits `block` once; moves it if some candidate beats staying by more
    /// than `epsilon`. Returns whether it moved.
    fn visit(&mut self, block: usize, epsilon: &S) -> bool {
        if self.frozen[block] {
            return false;
        }
        let current = self.assign[block];
        self.gather_neighbor_weights(block);
        let (d1, d2) = self.block_degrees(block);
        let stay = self.insertion(
            self.weight_to[current],
            d1,
            d2,
            self.doc_mass[current] - d1,
            self.feature_mass[current] - d2,
        );
        let choice = self.best_alternative(block, current);
        self.clear_neighbor_weights();
        match choice {
            Some((dest, val)) if val.clone() - stay.clone() > *epsilon => {
                self.relocate(block, current, dest);
                self.quality = self.quality.clone() + (val - stay);
                self.moves += 1;
                true
            }
            _ => false,
        }
    }

    /// Moves `block` to its best allowed destination even if that lowers
    /// modularity. Used to seed redistribution.
    pub(crate) fn place_best(&mut self, block: usize) {
        let current = self.assign[block];
        self.gather_neighbor_weights(block);
        let (d1, d2) = self.block_degrees(block);
        let stay = self.insertion(
            self.weight_to[current],
            d1,
            d2,
            self.doc_mass[current] - d1,
            self.feature_mass[current] - d2,
        );
        let choice = self.best_alternative(block, current);
        self.clear_neighbor_weights();
        if let Some((dest, val)) = choice {
            self.relocate(block, current, dest);
            self.quality = self.quality.clone() + (val - stay);
            self.moves += 1;
        }
    }

    /// Puts a zero-degree block into `dest` without touching the objective.
    pub(crate) fn park(&mut self, block: usize, dest: usize) {
        let current = self.assign[block];
        if current != dest {
            self.relocate(block, current, dest);
        }
    }

    /// Cyclic sweeps over `order` until a sweep makes no move (or the sweep
    /// cap is hit). `on_move` runs after every accepted move. The cached
    /// objective is checked against a full recount after each sweep.
    pub fn run<F>(
        &mut self,
        order: &[usize],
        cfg: &DescentConfig<S>,
        mut on_move: F,
    ) -> Result<usize>
    where
        F: FnMut(&Self),
    {
        let mut order = order.to_vec();
        let mut rng = (cfg.seed != 0).then(|| ChaCha8Rng::seed_from_u64(cfg.seed));
        let mut sweeps = 0;
        loop {
            if cfg.max_sweeps.is_some_and(|cap| sweeps >= cap) {
                break;
            }
            if let Some(rng) = rng.as_mut() {
                order.shuffle(rng);
            }
            let mut moved = 0usize;
            for &b in &order {
                if self.visit(b, &cfg.epsilon) {
                    moved += 1;
                    on_move(self);
                }
            }
            sweeps += 1;
            self.check_drift()?;
            if moved == 0 {
                break;
            }
        }
        Ok(sweeps)
    }

    fn check_drift(&mut self) -> Result<()> {
        let fresh = self.quality_from_scratch().total;
        let drift = (fresh.to_real() - self.quality.to_real()).abs();
        let tol = S::default_epsilon().to_real() * 1e4;
        if drift > tol {
            return Err(Error::Invariant(format!(
                "cached modularity drifted by {drift:e} (tolerance {tol:e})"
            )));
        }
        self.quality = fresh;
        Ok(())
    }
}

/// Runs descent on a prepared quotient graph from `start` and returns the
/// final slot per block.
pub(crate) fn descend_level<S: Scalar>(
    level: &AggregatedGraph,
    start: &[usize],
    cfg: &DescentConfig<S>,
) -> Result<Vec<usize>> {
    let mut state = DescentState::new(level, start, cfg.lambda.clone())?;
    let order: Vec<usize> = (0..level.n_blocks()).collect();
    state.run(&order, cfg, |_| {})?;
    Ok(state.assign)
}

/// `T_base` applied to `start`: cyclic coordinate descent whose coordinates
/// are the blocks of `base`. `start` must be a coarsening of `base`.
pub fn local_descent<S: Scalar>(
    g: &BipartiteGraph,
    base: &Partition,
    start: &Partition,
    cfg: &DescentConfig<S>,
) -> Result<Partition> {
    cfg.validate()?;
    for p in [base, start] {
        if p.n_vertices() != g.n_vertices() {
            return Err(Error::VertexCountMismatch {
                expected: g.n_vertices(),
                got: p.n_vertices(),
            });
        }
    }
    if let Some(vertex) = coarsening_violation(base.assignment(), start.assignment()) {
        return Err(Error::NotCoarsening { vertex });
    }
    let level = aggregate(g, base)?;
    let block_start = lift(base, start);
    let blocks = descend_level(&level, &block_start, cfg)?;
    project(g, &level, &blocks)
}

/// Start cluster per block of `base`.
pub(crate) fn lift(base: &Partition, start: &Partition) -> Vec<usize> {
    let mut out = vec![0; base.n_clusters()];
    for (v, &b) in base.assignment().iter().enumerate() {
        out[b] = start.cluster_of(v);
    }
    out
}

/// Partition of base vertices induced by a block assignment.
pub(crate) fn project(
    g: &BipartiteGraph,
    level: &AggregatedGraph,
    blocks: &[usize],
) -> Result<Partition> {
    let assign: Vec<usize> = level.block_of().iter().map(|&b| blocks[b]).collect();
    Partition::new(g, &assign)
}
