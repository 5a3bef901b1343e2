use serde::Serialize;

/// Outcome of a power iteration run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PageRankReport {
    pub iterations: usize,
    /// L1 change of the last step.
    pub residual: f64,
    /// False when `max_iter` was exhausted before the L1 change fell below `tol`.
    pub converged: bool,
}

/// Weighted PageRank by power iteration.
///
/// `out_edges[s]` lists `(target, weight)` pairs. Row `s` spreads its mass in
/// proportion to the weights; rows with no out-edges spread uniformly over all
/// nodes. With probability `alpha` the walk teleports to a uniform node.
pub fn weighted_pagerank(
    out_edges: &[Vec<(usize, f64)>],
    alpha: f64,
    tol: f64,
    max_iter: usize,
) -> (Vec<f64>, PageRankReport) {
    let n = out_edges.len();
    if n == 0 {
        return (
            Vec::new(),
            PageRankReport {
                iterations: 0,
                residual: 0.0,
                converged: true,
            },
        );
    }
    let nf = n as f64;
    let out_weight: Vec<f64> = out_edges
        .iter()
        .map(|edges| edges.iter().map(|&(_, w)| w).sum())
        .collect();

    let mut rank = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    let mut report = PageRankReport {
        iterations: 0,
        residual: f64::INFINITY,
        converged: false,
    };

    for iter in 1..=max_iter {
        let sink_mass: f64 = (0..n)
            .filter(|&s| out_weight[s] <= 0.0)
            .map(|s| rank[s])
            .sum();
        let base = alpha / nf + (1.0 - alpha) * sink_mass / nf;
        next.iter_mut().for_each(|x| *x = base);
        for (s, edges) in out_edges.iter().enumerate() {
            if out_weight[s] <= 0.0 {
                continue;
            }
            let share = (1.0 - alpha) * rank[s] / out_weight[s];
            for &(d, w) in edges {
                next[d] += share * w;
            }
        }
        let residual: f64 = rank.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut rank, &mut next);
        report.iterations = iter;
        report.residual = residual;
        if residual < tol {
            report.converged = true;
            break;
        }
    }

    let total: f64 = rank.iter().sum();
    rank.iter_mut().for_each(|x| *x /= total);
    (rank, report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_graph() {
        let (rank, report) = weighted_pagerank(&[], 0.15, 1e-10, 10);
        assert!(rank.is_empty());
        assert!(report.converged);
    }

    #[test]
    fn max_iter_exhaustion_is_flagged() {
        let edges = vec![vec![(1, 1.0)], vec![], vec![(0, 3.0), (1, 1.0)]];
        let (rank, report) = weighted_pagerank(&edges, 0.15, 0.0, 3);
        assert!(!report.converged);
        assert_eq!(report.iterations, 3);
        assert!((rank.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn weights_shift_mass() {
        // 0 sends 9x more volume to 1 than to 2.
        let edges = vec![vec![(1, 9.0), (2, 1.0)], vec![(0, 1.0)], vec![(0, 1.0)]];
        let (rank, _) = weighted_pagerank(&edges, 0.15, 1e-12, 500);
        assert!(rank[1] > rank[2]);
    }
}
