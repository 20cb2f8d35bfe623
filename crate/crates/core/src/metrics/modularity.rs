//! Directed modularity (Leicht–Newman form) and its maximization by
//! recursive spectral bisection.
//!
//! With `A_ij = 1` for an edge j → i, the modularity matrix is
//! `B_ij = A_ij − k_i^in·k_j^out / m` and
//! `Q = (1/m) Σ_ij B_ij δ(c_i, c_j)`.

use std::collections::VecDeque;

use super::graph::{DirectedGraph, Partition};
use super::MetricsError;

/// Largest graph accepted by [`brute_force_partition`].
pub const BRUTE_FORCE_MAX_NODES: usize = 12;

const POWER_TOLERANCE: f64 = 1e-10;
const POWER_MAX_ITERATIONS: usize = 10_000;
const GAIN_EPSILON: f64 = 1e-12;

pub fn modularity_q(graph: &DirectedGraph, partition: &Partition) -> Result<f64, MetricsError> {
    let m = graph.edge_count();
    if m == 0 {
        return Err(MetricsError::EmptyGraph);
    }
    if partition.len() != graph.node_count() {
        return Err(MetricsError::PartitionSize {
            partition: partition.len(),
            nodes: graph.node_count(),
        });
    }
    Ok(q_unchecked(
        graph,
        partition.assignment(),
        partition.module_count(),
    ))
}

/// Q as Σ_c [e_c/m − K_in(c)·K_out(c)/m²].
fn q_unchecked(graph: &DirectedGraph, labels: &[usize], modules: usize) -> f64 {
    let m = graph.edge_count() as f64;
    let mut inside = vec![0usize; modules];
    let mut k_in = vec![0usize; modules];
    let mut k_out = vec![0usize; modules];
    for &(u, v) in graph.edges() {
        if labels[u] == labels[v] {
            inside[labels[u]] += 1;
        }
    }
    for (i, &c) in labels.iter().enumerate() {
        k_in[c] += graph.in_degree()[i];
        k_out[c] += graph.out_degree()[i];
    }
    (0..modules)
        .map(|c| inside[c] as f64 / m - (k_in[c] * k_out[c]) as f64 / (m * m))
        .sum()
}

/// Dense modularity matrix, row-major, `b[i * n + j] = B_ij`.
fn modularity_matrix(graph: &DirectedGraph) -> Vec<f64> {
    let n = graph.node_count();
    let m = graph.edge_count() as f64;
    let mut b = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            b[i * n + j] = -((graph.in_degree()[i] * graph.out_degree()[j]) as f64) / m;
        }
    }
    for &(u, v) in graph.edges() {
        // edge u -> v sets A_vu
        b[v * n + u] += 1.0;
    }
    b
}

/// Symmetric generalized matrix `B^(g) + B^(g)ᵀ` for the nodes of `group`.
fn group_matrix(b: &[f64], n: usize, group: &[usize]) -> Vec<f64> {
    let ng = group.len();
    let mut out = vec![0.0; ng * ng];
    for (a, &i) in group.iter().enumerate() {
        let row_sum: f64 = group.iter().map(|&k| b[i * n + k]).sum();
        for (c, &j) in group.iter().enumerate() {
            out[a * ng + c] = b[i * n + j] + b[j * n + i];
        }
        out[a * ng + a] -= 2.0 * row_sum;
    }
    out
}

/// Leading eigenpair of a symmetric matrix by power iteration on `M + σI`,
/// with σ = ‖M‖₁ so that the most positive eigenvalue dominates.
fn leading_eigenvector(mat: &[f64], n: usize) -> (f64, Vec<f64>) {
    let shift = (0..n)
        .map(|j| (0..n).map(|i| mat[i * n + j].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut v: Vec<f64> = (0..n).map(start_component).collect();
    normalize(&mut v);
    let mut next = vec![0.0; n];
    for _ in 0..POWER_MAX_ITERATIONS {
        for i in 0..n {
            let row = &mat[i * n..(i + 1) * n];
            next[i] = row.iter().zip(&v).map(|(a, x)| a * x).sum::<f64>() + shift * v[i];
        }
        if normalize(&mut next) == 0.0 {
            break;
        }
        let delta = next
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut v, &mut next);
        if delta < POWER_TOLERANCE {
            break;
        }
    }
    let lambda = (0..n)
        .map(|i| {
            let row = &mat[i * n..(i + 1) * n];
            v[i] * row.iter().zip(&v).map(|(a, x)| a * x).sum::<f64>()
        })
        .sum();
    (lambda, v)
}

/// Deterministic pseudo-random entry in [0.5, 1.5). Low-discrepancy
/// sequences are avoided: they can be exactly orthogonal to the leading
/// eigenvector of small symmetric graphs.
fn start_component(i: usize) -> f64 {
    let mut z = (i as u64)
        .wrapping_add(1)
        .wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    0.5 + (z >> 11) as f64 / (1u64 << 53) as f64
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

/// Tries to bisect `group`. Returns the two halves when the split raises Q.
fn bisect(b: &[f64], n: usize, m: f64, group: &[usize]) -> Option<(Vec<usize>, Vec<usize>)> {
    let ng = group.len();
    if ng < 2 {
        return None;
    }
    let mat = group_matrix(b, n, group);
    let (lambda, vec) = leading_eigenvector(&mat, ng);
    if lambda <= POWER_TOLERANCE {
        return None;
    }
    let mut s: Vec<f64> = vec
        .iter()
        .map(|&x| if x >= 0.0 { 1.0 } else { -1.0 })
        .collect();

    // Single-node moves: flip the node with the largest gain while any gain is positive.
    let mut ms: Vec<f64> = (0..ng)
        .map(|i| (0..ng).map(|j| mat[i * ng + j] * s[j]).sum())
        .collect();
    for _ in 0..ng * ng {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..ng {
            let gain = -4.0 * s[i] * (ms[i] - mat[i * ng + i] * s[i]);
            if gain > GAIN_EPSILON && best.is_none_or(|(_, g)| gain > g) {
                best = Some((i, gain));
            }
        }
        let Some((k, _)) = best else { break };
        let old = s[k];
        s[k] = -old;
        for (j, msj) in ms.iter_mut().enumerate() {
            *msj += mat[j * ng + k] * (-2.0 * old);
        }
    }

    let quad: f64 = (0..ng).map(|i| s[i] * ms[i]).sum();
    let delta_q = quad / (4.0 * m);
    let pos: Vec<usize> = (0..ng).filter(|&i| s[i] > 0.0).map(|i| group[i]).collect();
    let neg: Vec<usize> = (0..ng).filter(|&i| s[i] < 0.0).map(|i| group[i]).collect();
    if delta_q <= GAIN_EPSILON || pos.is_empty() || neg.is_empty() {
        return None;
    }
    Some((pos, neg))
}

/// Approximates the modularity-maximizing partition by recursive spectral
/// bisection with single-node fine-tuning after every split, then a
/// whole-partition refinement.
pub fn optimal_partition(graph: &DirectedGraph) -> Result<(Partition, f64), MetricsError> {
    let m = graph.edge_count();
    if m == 0 {
        return Err(MetricsError::EmptyGraph);
    }
    let n = graph.node_count();
    let b = modularity_matrix(graph);
    let mut done: Vec<Vec<usize>> = Vec::new();
    let mut queue: VecDeque<Vec<usize>> = VecDeque::from([(0..n).collect()]);
    while let Some(group) = queue.pop_front() {
        match bisect(&b, n, m as f64, &group) {
            Some((a, c)) => {
                queue.push_back(a);
                queue.push_back(c);
            }
            None => done.push(group),
        }
    }
    done.sort();
    let mut labels = vec![0; n];
    for (k, group) in done.iter().enumerate() {
        for &i in group {
            labels[i] = k;
        }
    }
    refine(graph, &mut labels);
    // a second refinement from singletons catches splits that need two
    // coordinated moves away from the spectral result
    let mut alt: Vec<usize> = (0..n).collect();
    refine(graph, &mut alt);
    if q_unchecked(graph, &alt, n) > q_unchecked(graph, &labels, n) + GAIN_EPSILON {
        labels = alt;
    }
    let partition = Partition::new(&labels);
    let q = q_unchecked(graph, partition.assignment(), partition.module_count());
    if q < 0.0 {
        return Ok((Partition::single(n), 0.0));
    }
    Ok((partition, q))
}

/// Module totals for O(1) evaluation of single-node moves.
struct MoveState<'a> {
    graph: &'a DirectedGraph,
    neighbours: Vec<Vec<usize>>,
    labels: Vec<usize>,
    k_in: Vec<f64>,
    k_out: Vec<f64>,
    m: f64,
}

impl<'a> MoveState<'a> {
    fn new(graph: &'a DirectedGraph, labels: Vec<usize>) -> Self {
        let n = graph.node_count();
        let mut neighbours = vec![Vec::new(); n];
        for &(u, v) in graph.edges() {
            neighbours[u].push(v);
            neighbours[v].push(u);
        }
        let mut state = Self {
            graph,
            neighbours,
            labels,
            k_in: vec![0.0; n + 1],
            k_out: vec![0.0; n + 1],
            m: graph.edge_count() as f64,
        };
        for i in 0..n {
            let c = state.labels[i];
            state.k_in[c] += graph.in_degree()[i] as f64;
            state.k_out[c] += graph.out_degree()[i] as f64;
        }
        state
    }

    /// Edge counts between node `i` and each module.
    fn links(&self, i: usize, buf: &mut [f64]) {
        buf.iter_mut().for_each(|x| *x = 0.0);
        for &j in &self.neighbours[i] {
            buf[self.labels[j]] += 1.0;
        }
    }

    fn gain(&self, i: usize, target: usize, links: &[f64]) -> f64 {
        let home = self.labels[i];
        let ki = self.graph.in_degree()[i] as f64;
        let ko = self.graph.out_degree()[i] as f64;
        let (ia, oa) = (self.k_in[home], self.k_out[home]);
        let (ib, ob) = (self.k_in[target], self.k_out[target]);
        let expected = (ia - ki) * (oa - ko) + (ib + ki) * (ob + ko) - ia * oa - ib * ob;
        (links[target] - links[home]) / self.m - expected / (self.m * self.m)
    }

    fn apply(&mut self, i: usize, target: usize) {
        let home = self.labels[i];
        let ki = self.graph.in_degree()[i] as f64;
        let ko = self.graph.out_degree()[i] as f64;
        self.k_in[home] -= ki;
        self.k_out[home] -= ko;
        self.k_in[target] += ki;
        self.k_out[target] += ko;
        self.labels[i] = target;
    }

    /// A module id with no members, if any.
    fn empty_module(&self) -> Option<usize> {
        let mut used = vec![false; self.k_in.len()];
        self.labels.iter().for_each(|&c| used[c] = true);
        used.iter().position(|u| !u)
    }
}

/// Kernighan–Lin style passes over the whole partition: every node moves
/// once per pass to its best module (or an empty one), even when that lowers
/// Q, and the best state seen is kept. Module merges are tried between
/// passes. Stops when a pass brings no gain.
fn refine(graph: &DirectedGraph, labels: &mut [usize]) {
    let n = labels.len();
    let mut best_q = q_unchecked(graph, labels, n);
    let mut links = vec![0.0; n + 1];
    loop {
        let start_q = best_q;
        let mut state = MoveState::new(graph, labels.to_vec());
        let mut q = best_q;
        let mut moved = vec![false; n];
        for _ in 0..n {
            let empty = state.empty_module();
            let mut pick: Option<(usize, usize, f64)> = None;
            for i in (0..n).filter(|&i| !moved[i]) {
                state.links(i, &mut links);
                let home = state.labels[i];
                let mut targets: Vec<usize> = state.neighbours[i]
                    .iter()
                    .map(|&j| state.labels[j])
                    .filter(|&c| c != home)
                    .collect();
                targets.extend(empty);
                for t in targets {
                    let g = state.gain(i, t, &links);
                    if pick.is_none_or(|(_, _, p)| g > p + GAIN_EPSILON) {
                        pick = Some((i, t, g));
                    }
                }
            }
            let Some((i, t, g)) = pick else { break };
            state.apply(i, t);
            moved[i] = true;
            q += g;
            if q > best_q + GAIN_EPSILON {
                best_q = q;
                labels.copy_from_slice(&state.labels);
            }
        }
        let mut k = compact(labels);
        best_q = q_unchecked(graph, labels, k);
        loop {
            let mut merge: Option<(usize, usize, f64)> = None;
            for a in 0..k {
                for b in a + 1..k {
                    let trial: Vec<usize> =
                        labels.iter().map(|&c| if c == b { a } else { c }).collect();
                    let q = q_unchecked(graph, &trial, k);
                    if q > best_q + GAIN_EPSILON && merge.is_none_or(|(_, _, m)| q > m) {
                        merge = Some((a, b, q));
                    }
                }
            }
            let Some((a, b, q)) = merge else { break };
            labels.iter_mut().filter(|c| **c == b).for_each(|c| *c = a);
            best_q = q;
            k = compact(labels);
        }
        if best_q <= start_q + GAIN_EPSILON {
            break;
        }
    }
}

/// Renumbers labels densely; returns the module count.
fn compact(labels: &mut [usize]) -> usize {
    let p = Partition::new(labels);
    labels.copy_from_slice(p.assignment());
    p.module_count()
}

/// Exhaustive maximization over all set partitions (restricted growth
/// strings). Ties keep the earliest partition, so all-in-one wins on a tie.
pub fn brute_force_partition(graph: &DirectedGraph) -> Result<(Partition, f64), MetricsError> {
    let n = graph.node_count();
    if n > BRUTE_FORCE_MAX_NODES {
        return Err(MetricsError::TooLarge(n));
    }
    if graph.edge_count() == 0 {
        return Err(MetricsError::EmptyGraph);
    }
    if n == 0 {
        return Ok((Partition::single(0), 0.0));
    }
    let mut labels = vec![0usize; n];
    // max label among labels[..=i]
    let mut prefix_max = vec![0usize; n];
    let mut best = (labels.clone(), q_unchecked(graph, &labels, 1));
    loop {
        // advance to the next restricted growth string
        let mut i = n - 1;
        loop {
            if i == 0 {
                return Ok((Partition::new(&best.0), best.1));
            }
            let limit = prefix_max[i - 1] + 1;
            if labels[i] < limit {
                labels[i] += 1;
                prefix_max[i] = prefix_max[i - 1].max(labels[i]);
                break;
            }
            i -= 1;
        }
        for j in i + 1..n {
            labels[j] = 0;
            prefix_max[j] = prefix_max[j - 1];
        }
        let modules = prefix_max[n - 1] + 1;
        let q = q_unchecked(graph, &labels, modules);
        if q > best.1 {
            best = (labels.clone(), q);
        }
    }
}
