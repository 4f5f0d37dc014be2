//! Serial task orderings.
//!
//! The schedule is a single linear sequence: one task runs at a time and
//! every task starts only after all of its parents finished. Sequencing
//! therefore reduces to list scheduling with a per-task weight; ready tasks
//! compete on weight, larger first, ties broken by ascending id so reruns
//! are reproducible.

use crate::error::{Error, Result};
use crate::graph::TaskGraph;

/// Which per-task statistic seeds the very first sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightMode {
    MeanCurrent,
    MeanEnergy,
}

/// Greedy list scheduling: repeatedly emit the ready task with the largest
/// weight. `weights` is indexed by task index; the result is a permutation
/// of task indices in execution order.
pub fn list_schedule(graph: &TaskGraph, weights: &[f64]) -> Result<Vec<usize>> {
    let n = graph.task_count();
    if weights.len() != n {
        return Err(Error::InvalidArgument(format!(
            "expected {n} weights, got {}",
            weights.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite()) {
        return Err(Error::InvalidArgument(format!("weights must be finite, got {w}")));
    }
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let next = (0..n)
            .filter(|&i| !placed[i] && graph.parents(i).iter().all(|&p| placed[p]))
            .max_by(|&a, &b| {
                weights[a]
                    .partial_cmp(&weights[b])
                    .unwrap()
                    .then_with(|| graph.task(b).id.cmp(&graph.task(a).id))
            })
            .ok_or_else(|| Error::Internal("no ready task; graph validation missed a cycle".into()))?;
        placed[next] = true;
        order.push(next);
    }
    Ok(order)
}

/// Initial sequence: weight each task by its own mean current (or mean
/// energy), so the draining tasks run early while the battery still recovers
/// behind them.
pub fn sequence_dec_energy(graph: &TaskGraph, mode: WeightMode) -> Result<Vec<usize>> {
    let weights: Vec<f64> = (0..graph.task_count())
        .map(|i| match mode {
            WeightMode::MeanCurrent => graph.mean_current(i),
            WeightMode::MeanEnergy => graph.mean_energy(i),
        })
        .collect();
    list_schedule(graph, &weights)
}

/// Resequencing step: once every task has a chosen operating point, weight
/// each task by the summed chosen currents over its descendants (itself
/// included). A task pulling a heavy subtree behind it moves forward.
/// `chosen` holds 1-based columns indexed by task index.
pub fn weighted_sequence(graph: &TaskGraph, chosen: &[usize]) -> Result<Vec<usize>> {
    check_chosen(graph, chosen)?;
    let weights: Vec<f64> = (0..graph.task_count())
        .map(|i| {
            graph
                .descendants(i)
                .iter()
                .map(|&d| graph.current(d, chosen[d]))
                .sum()
        })
        .collect();
    list_schedule(graph, &weights)
}

/// Reference sequencing used by the two-phase baseline: weight each task by
/// the larger of its own chosen current and the mean chosen current over its
/// descendants (itself included).
pub fn baseline_sequence(graph: &TaskGraph, chosen: &[usize]) -> Result<Vec<usize>> {
    check_chosen(graph, chosen)?;
    let weights: Vec<f64> = (0..graph.task_count())
        .map(|i| {
            let ds = graph.descendants(i);
            let mean = ds.iter().map(|&d| graph.current(d, chosen[d])).sum::<f64>() / ds.len() as f64;
            graph.current(i, chosen[i]).max(mean)
        })
        .collect();
    list_schedule(graph, &weights)
}

fn check_chosen(graph: &TaskGraph, chosen: &[usize]) -> Result<()> {
    let n = graph.task_count();
    let m = graph.columns();
    if chosen.len() != n {
        return Err(Error::InvalidArgument(format!(
            "expected {n} chosen columns, got {}",
            chosen.len()
        )));
    }
    if let Some(&c) = chosen.iter().find(|&&c| c < 1 || c > m) {
        return Err(Error::InvalidArgument(format!("chosen column {c} outside 1..={m}")));
    }
    Ok(())
}

/// True when `order` is a permutation respecting every precedence edge.
pub fn is_topological(graph: &TaskGraph, order: &[usize]) -> bool {
    let n = graph.task_count();
    if order.len() != n {
        return false;
    }
    let mut pos = vec![usize::MAX; n];
    for (k, &v) in order.iter().enumerate() {
        if v >= n || pos[v] != usize::MAX {
            return false;
        }
        pos[v] = k;
    }
    graph.edges().iter().all(|&(p, c)| pos[p] < pos[c])
}
