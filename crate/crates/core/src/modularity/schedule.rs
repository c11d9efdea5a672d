use super::descent::{descend_level, project, DescentConfig, Schedule};
use super::objective::{q_bipartite, ModularityValue};
use crate::error::{Error, Result};
use crate::graph::{aggregate, BipartiteGraph, Partition};
use crate::scalar::Scalar;

/// Outcome of [`cluster`].
#[derive(Debug, Clone)]
pub struct Clustering<S> {
    pub partition: Partition,
    pub modularity: ModularityValue<S>,
    /// Outer rounds executed.
    pub rounds: usize,
}

/// Maximizes parametric bipartite modularity from the all-singletons
/// partition using the configured schedule.
///
/// Both schedules stop once a round improves modularity by no more than
/// `epsilon`. The interleaved schedule ends every round with a
/// vertex-granularity pass, so its output is a single-vertex local optimum.
pub fn cluster<S: Scalar>(g: &BipartiteGraph, cfg: &DescentConfig<S>) -> Result<Clustering<S>> {
    cfg.validate()?;
    if g.n_vertices() == 0 {
        return Err(Error::Graph("graph has no vertices".into()));
    }
    if g.n_edges() == 0 {
        return Err(Error::EmptyGraph);
    }
    match cfg.schedule {
        Schedule::Louvain => louvain(g, cfg),
        Schedule::Interleaved => interleaved(g, cfg),
    }
}

fn coarse_step<S: Scalar>(
    g: &BipartiteGraph,
    p: &Partition,
    cfg: &DescentConfig<S>,
) -> Result<Partition> {
    let level = aggregate(g, p)?;
    let identity: Vec<usize> = (0..level.n_blocks()).collect();
    let blocks = descend_level(&level, &identity, cfg)?;
    project(g, &level, &blocks)
}

fn louvain<S: Scalar>(g: &BipartiteGraph, cfg: &DescentConfig<S>) -> Result<Clustering<S>> {
    let mut p = Partition::singletons(g);
    let mut q = q_bipartite(g, &p, &cfg.lambda)?;
    let mut rounds = 0;
    loop {
        let next = coarse_step(g, &p, cfg)?;
        let q_next = q_bipartite(g, &next, &cfg.lambda)?;
        rounds += 1;
        let gain = q_next.total.clone() - q.total.clone();
        p = next;
        q = q_next;
        if gain <= cfg.epsilon {
            break;
        }
    }
    Ok(Clustering {
        partition: p,
        modularity: q,
        rounds,
    })
}

fn interleaved<S: Scalar>(g: &BipartiteGraph, cfg: &DescentConfig<S>) -> Result<Clustering<S>> {
    let vertex_level = aggregate(g, &Partition::singletons(g))?;
    let refine = |start: &Partition| -> Result<Partition> {
        let blocks = descend_level(&vertex_level, start.assignment(), cfg)?;
        project(g, &vertex_level, &blocks)
    };

    let mut p = refine(&Partition::singletons(g))?;
    let mut q = q_bipartite(g, &p, &cfg.lambda)?;
    let mut rounds = 1;
    loop {
        let coarse = coarse_step(g, &p, cfg)?;
        let next = refine(&coarse)?;
        let q_next = q_bipartite(g, &next, &cfg.lambda)?;
        rounds += 1;
        let gain = q_next.total.clone() - q.total.clone();
        if gain < S::zero() {
            return Err(Error::Invariant(format!(
                "interleaved round lowered modularity by {:e}",
                -gain.to_real()
            )));
        }
        p = next;
        q = q_next;
        if gain <= cfg.epsilon {
            break;
        }
    }
    Ok(Clustering {
        partition: p,
        modularity: q,
        rounds,
    })
}
