//! Tail redistribution: keep `n` anchor clusters, dissolve the rest, and
//! reassign every astray vertex to an anchor.

use super::descent::{local_descent, AstrayOrder, DescentConfig, DescentState};
use crate::error::{Error, Result};
use crate::graph::{aggregate, BipartiteGraph, Partition};
use crate::scalar::Scalar;

/// Vertex-level result of a redistribution, before canonical renumbering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnchorAssignment {
    /// Anchor clusters of the input partition, in anchor order.
    pub anchors: Vec<usize>,
    /// Anchor index (`0..n`) for every vertex.
    pub labels: Vec<usize>,
    /// Astray vertices of degree zero. They carry no modularity and are
    /// placed in the anchor with the largest document-side degree mass.
    pub isolated: Vec<usize>,
}

/// The `n` largest clusters of `p` by vertex count, ties by lower id.
pub fn largest_clusters(p: &Partition, n: usize) -> Vec<usize> {
    let mut ids: Vec<usize> = (0..p.n_clusters()).collect();
    ids.sort_by(|&a, &b| p.sizes()[b].cmp(&p.sizes()[a]).then(a.cmp(&b)));
    ids.truncate(n);
    ids
}

pub(crate) fn redistribute_to_anchors<S: Scalar>(
    g: &BipartiteGraph,
    p: &Partition,
    n: usize,
    anchors: Option<&[usize]>,
    cfg: &DescentConfig<S>,
) -> Result<AnchorAssignment> {
    cfg.validate()?;
    if p.n_vertices() != g.n_vertices() {
        return Err(Error::VertexCountMismatch {
            expected: g.n_vertices(),
            got: p.n_vertices(),
        });
    }
    if n < 1 {
        return Err(Error::Config(
            "number of anchor clusters must be at least 1".into(),
        ));
    }
    let anchors = match anchors {
        Some(list) => {
            if list.len() != n {
                return Err(Error::Config(format!(
                    "expected {n} anchors, got {}",
                    list.len()
                )));
            }
            let mut seen = vec![false; p.n_clusters()];
            for &a in list {
                if a >= p.n_clusters() {
                    return Err(Error::UnknownCluster(a));
                }
                if std::mem::replace(&mut seen[a], true) {
                    return Err(Error::Config(format!("anchor {a} listed twice")));
                }
            }
            list.to_vec()
        }
        None => {
            if n >= p.n_clusters() {
                return Err(Error::Projection {
                    clusters: p.n_clusters(),
                    target: n,
                });
            }
            largest_clusters(p, n)
        }
    };

    let mut anchor_index = vec![usize::MAX; p.n_clusters()];
    for (i, &a) in anchors.iter().enumerate() {
        anchor_index[a] = i;
    }
    // anchors occupy slots 0..n, each astray vertex starts in its own slot
    let mut start = Vec::with_capacity(g.n_vertices());
    let mut astray = Vec::new();
    for v in 0..g.n_vertices() {
        match anchor_index[p.cluster_of(v)] {
            usize::MAX => {
                start.push(n + astray.len());
                astray.push(v);
            }
            i => start.push(i),
        }
    }

    let level = aggregate(g, &Partition::singletons(g))?;
    let mut state = DescentState::new(&level, &start, cfg.lambda.clone())?;
    state.restrict_targets((0..n).collect());
    for v in 0..g.n_vertices() {
        if start[v] < n {
            state.freeze(v);
        }
    }

    let (mut order, isolated): (Vec<usize>, Vec<usize>) =
        astray.into_iter().partition(|&v| g.degree(v) > 0);
    if cfg.astray_order == AstrayOrder::Degree {
        order.sort_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then(a.cmp(&b)));
    }

    for &v in &order {
        state.place_best(v);
    }
    state.run(&order, cfg, |_| {})?;

    if !isolated.is_empty() {
        let heaviest = (0..n)
            .max_by(|&a, &b| state.doc_mass(a).cmp(&state.doc_mass(b)).then(b.cmp(&a)))
            .expect("n >= 1");
        for &v in &isolated {
            state.park(v, heaviest);
        }
    }

    Ok(AnchorAssignment {
        anchors,
        labels: state.assignment().to_vec(),
        isolated,
    })
}

/// Redistributes every vertex outside the `n` anchor clusters of `p` among
/// the anchors. Anchors default to the `n` largest clusters; classification
/// passes them explicitly. Anchor members never move and the result has
/// exactly `n` clusters.
pub fn redistribute<S: Scalar>(
    g: &BipartiteGraph,
    p: &Partition,
    n: usize,
    anchors: Option<&[usize]>,
    cfg: &DescentConfig<S>,
) -> Result<Partition> {
    let out = redistribute_to_anchors(g, p, n, anchors, cfg)?;
    Partition::new(g, &out.labels)
}

/// Projects `p` onto `n` clusters and polishes the result at vertex
/// granularity: `T_{P0}` applied after redistribution.
pub fn finalize<S: Scalar>(
    g: &BipartiteGraph,
    p: &Partition,
    n: usize,
    cfg: &DescentConfig<S>,
) -> Result<Partition> {
    let projected = redistribute(g, p, n, None, cfg)?;
    local_descent(g, &Partition::singletons(g), &projected, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modularity::q_bipartite;
    use crate::scalar::Exact;
    use crate::test_fixtures::{two_bicliques, two_bicliques_with_w5};
    use num_traits::One;

    #[test]
    fn stray_word_joins_its_document() {
        let g = two_bicliques_with_w5();
        // d1..d4, w1..w4, w5
        let p = Partition::new(&g, &[0, 0, 1, 1, 0, 0, 1, 1, 2]).unwrap();
        let cfg = DescentConfig::new(Exact::one());
        let out = redistribute(&g, &p, 2, None, &cfg).unwrap();
        assert_eq!(out.assignment(), &[0, 0, 1, 1, 0, 0, 1, 1, 0]);
        let fin = finalize(&g, &p, 2, &cfg).unwrap();
        assert_eq!(fin, out);
        assert_eq!(
            q_bipartite(&g, &fin, &Exact::one()).unwrap(),
            q_bipartite(&g, &out, &Exact::one()).unwrap()
        );
    }

    #[test]
    fn all_anchors_is_identity() {
        let g = two_bicliques();
        let p = Partition::new(&g, &[0, 0, 1, 1, 0, 0, 1, 1]).unwrap();
        let out = redistribute(&g, &p, 2, Some(&[0, 1]), &DescentConfig::new(1.0)).unwrap();
        assert_eq!(out, p);
    }

    #[test]
    fn projection_bounds() {
        let g = two_bicliques();
        let p = Partition::new(&g, &[0, 0, 1, 1, 0, 0, 1, 1]).unwrap();
        let cfg = DescentConfig::new(1.0);
        assert!(matches!(
            redistribute(&g, &p, 2, None, &cfg),
            Err(Error::Projection { .. })
        ));
        assert!(redistribute(&g, &p, 0, None, &cfg).is_err());
        assert!(redistribute(&g, &p, 1, Some(&[5]), &cfg).is_err());
    }

    #[test]
    fn largest_ties_break_low() {
        let g = two_bicliques();
        let p = Partition::new(&g, &[0, 1, 2, 2, 0, 1, 3, 3]).unwrap();
        // sizes [2, 2, 2, 2]
        assert_eq!(largest_clusters(&p, 2), vec![0, 1]);
    }

    #[test]
    fn isolated_vertex_goes_to_heaviest_anchor() {
        let docs = ["d1", "d2", "d3", "d4", "d5"].map(String::from).to_vec();
        let words = ["w1", "w2", "w3", "w4"].map(String::from).to_vec();
        let edges = [
            (0, 0),
            (0, 1),
            (1, 0),
            (1, 1),
            (2, 2),
            (2, 3),
            (3, 2),
            (3, 3),
            (2, 0),
        ];
        let g = BipartiteGraph::from_edges(docs, words, &edges).unwrap();
        let p = Partition::new(&g, &[0, 0, 1, 1, 2, 0, 0, 1, 1]).unwrap();
        let out =
            redistribute_to_anchors(&g, &p, 2, Some(&[0, 1]), &DescentConfig::new(1.0)).unwrap();
        assert_eq!(out.isolated, vec![4]);
        // anchor 1 holds d3 (degree 3) and d4: doc mass 5 against 4
        assert_eq!(out.labels[4], 1);
    }
}
