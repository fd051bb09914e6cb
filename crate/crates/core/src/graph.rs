//! Network post-processing: components, centralities, benchmark metrics.

use crate::error::{Error, Result};
use crate::sim::Adjacency;
use std::collections::VecDeque;

/// Weakly connected components (directions ignored), sorted by size
/// descending, ties by smallest member; nodes sorted within each component.
#[allow(clippy::needless_range_loop)]
pub fn weakly_connected_components(adj: &Adjacency) -> Vec<Vec<usize>> {
    let n = adj.n();
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut comp = Vec::new();
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(u) = queue.pop_front() {
            comp.push(u);
            for v in 0..n {
                if !seen[v] && (adj.has_edge(u, v) || adj.has_edge(v, u)) {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        comp.sort_unstable();
        components.push(comp);
    }
    components.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    components
}

/// Out-degree per node: row sums of the directed adjacency.
pub fn out_degree(adj: &Adjacency) -> Vec<usize> {
    let n = adj.n();
    (0..n)
        .map(|i| (0..n).filter(|&j| adj.has_edge(i, j)).count())
        .collect()
}

/// Exact directed, unweighted shortest-path betweenness (Brandes
/// accumulation), unnormalized, endpoints excluded.
pub fn betweenness(adj: &Adjacency) -> Vec<f64> {
    let n = adj.n();
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| adj.has_edge(i, j)).collect())
        .collect();
    let mut centrality = vec![0.0; n];
    for s in 0..n {
        // BFS from s: path counts sigma and predecessor lists
        let mut sigma = vec![0.0f64; n];
        let mut dist = vec![usize::MAX; n];
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut stack = Vec::new();
        let mut queue = VecDeque::new();
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            stack.push(u);
            for &v in &succ[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
                if dist[v] == dist[u] + 1 {
                    sigma[v] += sigma[u];
                    preds[v].push(u);
                }
            }
        }
        // dependency accumulation in reverse BFS order
        let mut delta = vec![0.0f64; n];
        while let Some(w) = stack.pop() {
            for &u in &preds[w] {
                delta[u] += sigma[u] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                centrality[w] += delta[w];
            }
        }
    }
    centrality
}

/// Eigenvector centrality on the largest weakly connected component.
///
/// The iteration is `v_i <- sum over out-neighbors j of v_j`, so score
/// accrues to nodes that drive many high-scoring nodes; out-influence is the
/// reading under which hub drivers rank first. Scores are normalized to
/// max 1; nodes outside the LWCC score 0.
///
/// Errors: a graph whose LWCC contains no edges rejects the operation; no
/// convergence within 100_000 iterations is an error. If an iterate maps to
/// the exact zero vector the previous iterate is already a 0-eigenvector and
/// is returned.
pub fn eigenvector_centrality(adj: &Adjacency) -> Result<Vec<f64>> {
    const MAX_ITER: usize = 100_000;
    const TOL: f64 = 1e-10;

    let lwcc = weakly_connected_components(adj)
        .into_iter()
        .next()
        .unwrap_or_default();
    let has_edge_inside = lwcc
        .iter()
        .any(|&i| lwcc.iter().any(|&j| adj.has_edge(i, j)));
    if lwcc.is_empty() || !has_edge_inside {
        return Err(Error::EmptyLwcc);
    }

    let k = lwcc.len();
    let pos: std::collections::HashMap<usize, usize> = lwcc
        .iter()
        .enumerate()
        .map(|(p, &node)| (node, p))
        .collect();
    let succ: Vec<Vec<usize>> = lwcc
        .iter()
        .map(|&i| {
            lwcc.iter()
                .filter(|&&j| adj.has_edge(i, j))
                .map(|&j| pos[&j])
                .collect()
        })
        .collect();

    let mut v = vec![1.0f64; k];
    let mut prev: Vec<f64> = Vec::new();
    let mut converged = false;
    for _ in 0..MAX_ITER {
        let w: Vec<f64> = succ
            .iter()
            .map(|out| out.iter().map(|&j| v[j]).sum())
            .collect();
        let lambda = w.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        if lambda == 0.0 {
            // v is in the kernel: an exact eigenvector for eigenvalue 0
            converged = true;
            break;
        }
        let w: Vec<f64> = w.iter().map(|&x| x / lambda).collect();
        let diff = w
            .iter()
            .zip(&v)
            .fold(0.0f64, |m, (&a, &b)| m.max((a - b).abs()));
        if diff <= TOL {
            v = w;
            converged = true;
            break;
        }
        // bipartite components (+-lambda eigenvalue pair) cycle with period
        // 2; combining consecutive iterates, weighted by the alternating
        // step norms, cancels the -lambda component exactly
        let cycle = !prev.is_empty()
            && w.iter()
                .zip(&prev)
                .fold(0.0f64, |m, (&a, &b)| m.max((a - b).abs()))
                <= TOL;
        if cycle {
            let mw: Vec<f64> = succ
                .iter()
                .map(|out| out.iter().map(|&j| w[j]).sum::<f64>())
                .collect();
            let lambda2 = mw.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
            if lambda2 == 0.0 {
                v = w;
            } else {
                let weight = (lambda / lambda2).sqrt();
                v = v.iter().zip(&w).map(|(&a, &b)| a + weight * b).collect();
            }
            converged = true;
            break;
        }
        prev = v;
        v = w;
    }
    if !converged {
        return Err(Error::NoConvergence(MAX_ITER));
    }
    let peak = v.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    let mut full = vec![0.0; adj.n()];
    for (p, &node) in lwcc.iter().enumerate() {
        full[node] = if peak > 0.0 { v[p] / peak } else { 0.0 };
    }
    Ok(full)
}

/// TPR and FPR of an estimated network against the truth, both divided by
/// the true edge count (so FPR may exceed 1).
///
/// An undirected truth is matched against the estimate's unordered pairs (an
/// edge found in either direction counts once); a directed truth is matched
/// directed. An empty true edge set is an error.
pub fn tpr_fpr(true_adj: &Adjacency, est_adj: &Adjacency) -> Result<(f64, f64)> {
    if true_adj.n() != est_adj.n() {
        return Err(Error::SizeMismatch(true_adj.n(), est_adj.n()));
    }
    let (truth, estimate) = if true_adj.is_directed() {
        (true_adj.edges(), est_adj.edges())
    } else {
        (true_adj.undirected_pairs(), est_adj.undirected_pairs())
    };
    if truth.is_empty() {
        return Err(Error::EmptyTrueEdgeSet);
    }
    let truth_set: std::collections::HashSet<_> = truth.iter().copied().collect();
    let hits = estimate.iter().filter(|e| truth_set.contains(e)).count();
    let spurious = estimate.len() - hits;
    let e = truth.len() as f64;
    Ok((hits as f64 / e, spurious as f64 / e))
}

/// Per-node centrality summary. Eigenvector scores are absent when the LWCC
/// has no edges.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralityReport {
    pub out_degree: Vec<usize>,
    pub betweenness: Vec<f64>,
    pub eigenvector: Option<Vec<f64>>,
}

impl CentralityReport {
    /// Eigenvector scores are dropped (not fatal) when the LWCC has no edges
    /// or the iteration fails to converge; batch runs must not abort on a
    /// degenerate component.
    pub fn compute(adj: &Adjacency) -> Result<Self> {
        let eigenvector = match eigenvector_centrality(adj) {
            Ok(v) => Some(v),
            Err(Error::EmptyLwcc) | Err(Error::NoConvergence(_)) => None,
            Err(e) => return Err(e),
        };
        Ok(Self {
            out_degree: out_degree(adj),
            betweenness: betweenness(adj),
            eigenvector,
        })
    }

    /// Node indices ranked by a measure, descending, ties by index.
    pub fn ranking(values: &[f64]) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..values.len()).collect();
        idx.sort_by(|&a, &b| {
            values[b]
                .partial_cmp(&values[a])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        idx
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn directed(n: usize, edges: &[(usize, usize)]) -> Adjacency {
        let mut a = Adjacency::directed(n);
        for &(i, j) in edges {
            a.add_edge(i, j).unwrap();
        }
        a
    }

    fn undirected(n: usize, edges: &[(usize, usize)]) -> Adjacency {
        let mut a = Adjacency::undirected(n);
        for &(i, j) in edges {
            a.add_edge(i, j).unwrap();
        }
        a
    }

    #[test]
    fn components_basics() {
        let empty = Adjacency::directed(3);
        let comps = weakly_connected_components(&empty);
        assert_eq!(comps.len(), 3);
        assert!(comps.iter().all(|c| c.len() == 1));

        let path = directed(3, &[(0, 1), (1, 2)]);
        assert_eq!(weakly_connected_components(&path), vec![vec![0, 1, 2]]);

        let two = directed(4, &[(0, 1), (3, 2)]);
        let comps = weakly_connected_components(&two);
        assert_eq!(comps, vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn components_partition_nodes() {
        let adj = directed(7, &[(0, 3), (3, 5), (1, 2), (6, 1)]);
        let comps = weakly_connected_components(&adj);
        let mut all: Vec<usize> = comps.into_iter().flatten().collect();
        all.sort_unstable();
        assert_eq!(all, (0..7).collect::<Vec<_>>());
    }

    #[test]
    fn out_degree_examples() {
        let star = directed(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        assert_eq!(out_degree(&star), vec![4, 0, 0, 0, 0]);
        assert_eq!(out_degree(&Adjacency::directed(3)), vec![0, 0, 0]);
        let complete = directed(
            4,
            &[
                (0, 1),
                (0, 2),
                (0, 3),
                (1, 0),
                (1, 2),
                (1, 3),
                (2, 0),
                (2, 1),
                (2, 3),
                (3, 0),
                (3, 1),
                (3, 2),
            ],
        );
        assert_eq!(out_degree(&complete), vec![3, 3, 3, 3]);
    }

    #[test]
    fn betweenness_examples() {
        let path = directed(3, &[(0, 1), (1, 2)]);
        let b = betweenness(&path);
        assert_abs_diff_eq!(b[1], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b[2], 0.0, epsilon = 1e-12);

        assert!(betweenness(&Adjacency::directed(4))
            .iter()
            .all(|&x| x == 0.0));

        let star = directed(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        assert!(
            betweenness(&star).iter().all(|&x| x == 0.0),
            "no through-paths in a star"
        );
    }

    #[test]
    fn eigenvector_directed_cycle_uniform() {
        let cycle = directed(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let v = eigenvector_centrality(&cycle).unwrap();
        for &x in &v {
            assert_abs_diff_eq!(x, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn eigenvector_rejects_empty_graph() {
        assert!(matches!(
            eigenvector_centrality(&Adjacency::directed(3)),
            Err(Error::EmptyLwcc)
        ));
    }

    #[test]
    fn eigenvector_out_hub_is_maximal() {
        let fan = directed(3, &[(0, 1), (0, 2)]);
        let v = eigenvector_centrality(&fan).unwrap();
        assert_eq!(v[0], 1.0);
        assert!(v[0] > v[1] && v[0] > v[2], "driver must rank first: {v:?}");
    }

    #[test]
    fn eigenvector_handles_bipartite_component() {
        // symmetric path: spectrum +-sqrt(2), 0; plain iteration oscillates
        let path = directed(3, &[(0, 1), (1, 0), (1, 2), (2, 1)]);
        let v = eigenvector_centrality(&path).unwrap();
        assert_eq!(v[1], 1.0);
        assert_abs_diff_eq!(v[0], 1.0 / 2.0f64.sqrt(), epsilon = 1e-8);
        assert_abs_diff_eq!(v[2], 1.0 / 2.0f64.sqrt(), epsilon = 1e-8);
    }

    #[test]
    fn eigenvector_outside_lwcc_is_zero() {
        // component {0,1,2} strongly cyclic, node 3 isolated
        let adj = directed(4, &[(0, 1), (1, 2), (2, 0)]);
        let v = eigenvector_centrality(&adj).unwrap();
        assert_eq!(v[3], 0.0);
        assert!(v[..3].iter().all(|&x| x > 0.0));
    }

    #[test]
    fn eigenvector_residual_small() {
        let adj = directed(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 0), (1, 4), (4, 2)]);
        let v = eigenvector_centrality(&adj).unwrap();
        // residual of the iteration operator: M v = lambda v with
        // (M v)_i = sum over out-neighbors
        let mv: Vec<f64> = (0..5)
            .map(|i| (0..5).filter(|&j| adj.has_edge(i, j)).map(|j| v[j]).sum())
            .collect();
        // Rayleigh estimate of lambda
        let num: f64 = mv.iter().zip(&v).map(|(a, b)| a * b).sum();
        let den: f64 = v.iter().map(|x| x * x).sum();
        let lambda = num / den;
        for i in 0..5 {
            assert!((mv[i] - lambda * v[i]).abs() <= 1e-8, "residual at {i}");
        }
    }

    #[test]
    fn tpr_fpr_examples() {
        let truth = undirected(5, &[(0, 1), (2, 3)]);
        let perfect = undirected(5, &[(0, 1), (2, 3)]);
        assert_eq!(tpr_fpr(&truth, &perfect).unwrap(), (1.0, 0.0));

        let nothing = Adjacency::directed(5);
        assert_eq!(tpr_fpr(&truth, &nothing).unwrap(), (0.0, 0.0));

        // 2 true edges found plus 6 spurious: (1, 3)
        let mut est = Adjacency::directed(6);
        for (i, j) in [(0, 1), (2, 3)] {
            est.add_edge(i, j).unwrap();
        }
        for (i, j) in [(0, 2), (0, 3), (1, 4), (1, 5), (2, 4), (3, 5)] {
            est.add_edge(i, j).unwrap();
        }
        let truth6 = undirected(6, &[(0, 1), (2, 3)]);
        assert_eq!(tpr_fpr(&truth6, &est).unwrap(), (1.0, 3.0));
    }

    #[test]
    fn tpr_fpr_undirected_truth_accepts_either_direction() {
        let truth = undirected(3, &[(0, 1)]);
        let mut est = Adjacency::directed(3);
        est.add_edge(1, 0).unwrap();
        assert_eq!(tpr_fpr(&truth, &est).unwrap(), (1.0, 0.0));
        // both directions of the same pair count once
        est.add_edge(0, 1).unwrap();
        assert_eq!(tpr_fpr(&truth, &est).unwrap(), (1.0, 0.0));
    }

    #[test]
    fn tpr_fpr_empty_truth_rejected() {
        let truth = Adjacency::undirected(4);
        let est = Adjacency::directed(4);
        assert!(matches!(
            tpr_fpr(&truth, &est),
            Err(Error::EmptyTrueEdgeSet)
        ));
    }

    #[test]
    fn report_ranking_orders_descending() {
        let r = CentralityReport::ranking(&[0.2, 0.9, 0.9, 0.1]);
        assert_eq!(r, vec![1, 2, 0, 3]);
    }
}
