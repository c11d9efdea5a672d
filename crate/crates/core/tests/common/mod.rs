//! Brute-force reference implementations. Nothing here calls into the
//! optimized code paths: every quantity is recounted from the edge list and
//! a plain label array.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use bimod::BipartiteGraph;

/// Bipartite modularity recounted from scratch.
pub fn naive_q_bipartite(g: &BipartiteGraph, labels: &[usize], lambda: f64) -> f64 {
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let l = edges.len() as f64;
    let clusters: BTreeSet<usize> = labels.iter().copied().collect();
    let mut q = 0.0;
    for c in clusters {
        let inside = edges
            .iter()
            .filter(|&&(d, f)| labels[d] == c && labels[f] == c)
            .count() as f64;
        let d1 = edges.iter().filter(|&&(d, _)| labels[d] == c).count() as f64;
        let d2 = edges.iter().filter(|&&(_, f)| labels[f] == c).count() as f64;
        q += inside / l - lambda * d1 * d2 / (l * l);
    }
    q
}

/// Ordinary modularity of a weighted edge list, recounted from scratch.
pub fn naive_q_simple(edges: &[(usize, usize, u64)], labels: &[usize], lambda: f64) -> f64 {
    let l: f64 = edges.iter().map(|e| e.2 as f64).sum();
    let clusters: BTreeSet<usize> = labels.iter().copied().collect();
    let mut q = 0.0;
    for c in clusters {
        let mut inside = 0.0;
        let mut degree = 0.0;
        for &(u, v, w) in edges {
            let w = w as f64;
            if labels[u] == c && labels[v] == c {
                inside += w;
            }
            if labels[u] == c {
                degree += w;
            }
            if labels[v] == c {
                degree += w;
            }
        }
        q += inside / l - lambda * degree * degree / (4.0 * l * l);
    }
    q
}

/// Largest gain of moving one vertex to any existing cluster or to a new
/// one, each candidate evaluated by full recount. Returns
/// `(gain, vertex, target)`; target `usize::MAX` means a new cluster.
pub fn best_single_move(g: &BipartiteGraph, labels: &[usize], lambda: f64) -> (f64, usize, usize) {
    let base = naive_q_bipartite(g, labels, lambda);
    let clusters: BTreeSet<usize> = labels.iter().copied().collect();
    let fresh = clusters.iter().max().map_or(0, |m| m + 1);
    let mut best = (f64::NEG_INFINITY, 0, 0);
    let mut trial = labels.to_vec();
    for v in 0..labels.len() {
        let own = labels[v];
        for &t in clusters.iter().chain(std::iter::once(&fresh)) {
            if t == own {
                continue;
            }
            trial[v] = t;
            let gain = naive_q_bipartite(g, &trial, lambda) - base;
            if gain > best.0 {
                best = (gain, v, if t == fresh { usize::MAX } else { t });
            }
        }
        trial[v] = own;
    }
    best
}

/// Every set partition of `0..n` as restricted-growth strings.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(i: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for c in 0..=k {
            cur.push(c);
            rec(i + 1, n, k.max(c + 1), cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, 0, &mut Vec::new(), &mut out);
    out
}

fn counts<T: Ord + Clone>(xs: &[T]) -> BTreeMap<T, f64> {
    let mut m = BTreeMap::new();
    for x in xs {
        *m.entry(x.clone()).or_insert(0.0) += 1.0;
    }
    m
}

/// NMI straight from its defining double sum.
pub fn naive_nmi<A: Ord + Clone, B: Ord + Clone>(pred: &[A], gold: &[B]) -> f64 {
    let n = pred.len() as f64;
    let nm = counts(pred);
    let nl = counts(gold);
    if nm.len() < 2 || nl.len() < 2 {
        return 0.0;
    }
    let pairs: Vec<(B, A)> = gold.iter().cloned().zip(pred.iter().cloned()).collect();
    let nlm = counts(&pairs);
    let mut num = 0.0;
    for ((l, m), c) in &nlm {
        num += c * (n * c / (nl[l] * nm[m])).ln();
    }
    let hm: f64 = nm.values().map(|c| c * (c / n).ln()).sum();
    let hl: f64 = nl.values().map(|c| c * (c / n).ln()).sum();
    num / (hm * hl).sqrt()
}

pub fn naive_purity<A: Ord + Clone, B: Ord + Clone>(pred: &[A], gold: &[B]) -> f64 {
    let mut per: BTreeMap<A, BTreeMap<B, usize>> = BTreeMap::new();
    for (p, g) in pred.iter().zip(gold) {
        *per.entry(p.clone())
            .or_default()
            .entry(g.clone())
            .or_default() += 1;
    }
    let hits: usize = per.values().map(|m| *m.values().max().unwrap()).sum();
    hits as f64 / pred.len() as f64
}

/// `(micro, macro)` in percent over the classes present in `gold`.
pub fn naive_f1(pred: &[String], gold: &[String]) -> (f64, f64) {
    let classes: BTreeSet<&String> = gold.iter().collect();
    let mut correct = 0usize;
    let mut macro_sum = 0.0;
    for c in &classes {
        let tp = pred
            .iter()
            .zip(gold)
            .filter(|(p, g)| p == c && g == c)
            .count() as f64;
        let n1 = gold.iter().filter(|g| g == c).count() as f64;
        let n2 = pred.iter().filter(|p| p == c).count() as f64;
        correct += tp as usize;
        let r = if n1 > 0.0 { tp / n1 } else { 0.0 };
        let p = if n2 > 0.0 { tp / n2 } else { 0.0 };
        macro_sum += if r + p > 0.0 {
            2.0 * r * p / (r + p)
        } else {
            0.0
        };
    }
    (
        100.0 * correct as f64 / pred.len() as f64,
        100.0 * macro_sum / classes.len() as f64,
    )
}

/// Accuracy by direct count.
pub fn accuracy(pred: &[String], gold: &[String]) -> f64 {
    100.0 * pred.iter().zip(gold).filter(|(p, g)| p == g).count() as f64 / pred.len() as f64
}

/// Small deterministic PRNG so fixtures do not depend on the library's RNG.
pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next() % n as u64) as usize
    }
}

/// Random bipartite graph with at least one edge, at most `max_vertices`.
pub fn random_bipartite(rng: &mut SplitMix, max_vertices: usize) -> BipartiteGraph {
    let n_docs = 1 + rng.below(max_vertices / 2);
    let n_feats = 1 + rng.below(max_vertices - n_docs);
    let n_edges = 1 + rng.below(n_docs * n_feats);
    let edges: Vec<(usize, usize)> = (0..n_edges)
        .map(|_| (rng.below(n_docs), rng.below(n_feats)))
        .collect();
    let docs = (0..n_docs).map(|i| format!("d{i}")).collect();
    let feats = (0..n_feats).map(|i| format!("f{i}")).collect();
    BipartiteGraph::from_edges(docs, feats, &edges).unwrap()
}

pub fn random_labels(rng: &mut SplitMix, n: usize) -> Vec<usize> {
    let k = 1 + rng.below(n);
    (0..n).map(|_| rng.below(k)).collect()
}

pub fn two_bicliques() -> BipartiteGraph {
    let docs = ["d1", "d2", "d3", "d4"].map(String::from).to_vec();
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
    ];
    BipartiteGraph::from_edges(docs, words, &edges).unwrap()
}

pub fn two_bicliques_with_w5() -> BipartiteGraph {
    let docs = ["d1", "d2", "d3", "d4"].map(String::from).to_vec();
    let words = ["w1", "w2", "w3", "w4", "w5"].map(String::from).to_vec();
    let edges = [
        (0, 0),
        (0, 1),
        (1, 0),
        (1, 1),
        (2, 2),
        (2, 3),
        (3, 2),
        (3, 3),
        (0, 4),
    ];
    BipartiteGraph::from_edges(docs, words, &edges).unwrap()
}

/// Groups `labels` into classes for readable assertions.
pub fn groups(labels: &[usize]) -> Vec<Vec<usize>> {
    let mut m: HashMap<usize, Vec<usize>> = HashMap::new();
    for (v, &c) in labels.iter().enumerate() {
        m.entry(c).or_default().push(v);
    }
    let mut out: Vec<Vec<usize>> = m.into_values().collect();
    out.sort();
    out
}
