use std::collections::VecDeque;

use super::graph::DirectedGraph;
use super::MetricsError;

/// Fraction of the other nodes reachable from each node.
pub fn local_reaching_centrality(graph: &DirectedGraph) -> Vec<f64> {
    let n = graph.node_count();
    let succ = graph.successors();
    let denom = (n.max(2) - 1) as f64;
    let mut seen = vec![usize::MAX; n];
    (0..n)
        .map(|start| {
            let mut count = 0usize;
            let mut queue = VecDeque::from([start]);
            seen[start] = start;
            while let Some(u) = queue.pop_front() {
                for &v in &succ[u] {
                    if seen[v] != start {
                        seen[v] = start;
                        count += 1;
                        queue.push_back(v);
                    }
                }
            }
            count as f64 / denom
        })
        .collect()
}

/// Global reaching centrality of the edge-reversed graph, with reaching
/// centrality counted purely by reachable nodes.
pub fn grc_hierarchy(graph: &DirectedGraph) -> Result<f64, MetricsError> {
    let n = graph.node_count();
    if n < 2 {
        return Err(MetricsError::TooSmall(n));
    }
    let lrc = local_reaching_centrality(&graph.reversed());
    let max = lrc.iter().copied().fold(0.0, f64::max);
    Ok(lrc.iter().map(|c| max - c).sum::<f64>() / (n - 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> DirectedGraph {
        DirectedGraph::new(n, (1..n).map(|i| (i - 1, i)).collect()).unwrap()
    }

    #[test]
    fn edgeless_is_flat() {
        let g = DirectedGraph::new(5, vec![]).unwrap();
        assert_eq!(grc_hierarchy(&g).unwrap(), 0.0);
    }

    #[test]
    fn chain_closed_form() {
        assert_eq!(grc_hierarchy(&chain(3)).unwrap(), 0.75);
        for n in 2..=10 {
            let expect = n as f64 / (2.0 * (n - 1) as f64);
            assert!((grc_hierarchy(&chain(n)).unwrap() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn out_star() {
        // root 0 -> leaves; reversed, every leaf reaches the root only.
        for n in 3..8 {
            let g = DirectedGraph::new(n, (1..n).map(|i| (0, i)).collect()).unwrap();
            let per_leaf = 1.0 / (n - 1) as f64;
            // the root's shortfall is per_leaf, leaves have none
            let expect = per_leaf / (n - 1) as f64;
            assert!((grc_hierarchy(&g).unwrap() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn too_small() {
        let g = DirectedGraph::new(1, vec![]).unwrap();
        assert_eq!(grc_hierarchy(&g), Err(MetricsError::TooSmall(1)));
    }
}
