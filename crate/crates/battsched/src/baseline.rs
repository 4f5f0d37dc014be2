//! Reference two-phase method and a brute-force oracle.
//!
//! The reference method decouples the two decisions the iterative loop
//! makes jointly: first a multiple-choice knapsack picks the minimum-energy
//! column per task subject to the deadline, then a greedy list schedule
//! orders the tasks. It ignores the battery's nonlinearity, which is the
//! gap the iterative method exploits.
//!
//! The oracle enumerates every (topological order, column vector) pair on
//! tiny instances and brackets any heuristic between the best and worst
//! feasible costs.

use std::collections::BTreeMap;

use crate::battery::BatteryParams;
use crate::driver::calculate_battery_cost;
use crate::error::{Error, Result};
use crate::graph::TaskGraph;
use crate::sequence::baseline_sequence;

/// Durations are accepted on a 0.1-minute grid and scaled by this factor to
/// integers for the knapsack table.
const TIME_SCALE: f64 = 10.0;

#[derive(Debug, Clone)]
pub struct BaselineResult {
    pub chosen: BTreeMap<String, usize>,
    pub sequence: Vec<String>,
    pub sigma: f64,
    pub delta: f64,
    /// Σ current * duration over the chosen columns, mA·minutes.
    pub total_energy: f64,
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub best_sigma: f64,
    pub worst_sigma: f64,
    pub best_sequence: Vec<String>,
    pub best_chosen: BTreeMap<String, usize>,
    /// Feasible configurations evaluated.
    pub enumerated: u64,
}

/// Exact minimizer of total energy subject to the summed durations meeting
/// the deadline; returns a 1-based column per task index. Time is scaled to
/// integer tenths of a minute, so durations must sit on the 0.1 grid.
/// Among equal-energy optima the lexicographically largest column vector in
/// task-id order wins (prefer the low-power column).
pub fn min_energy_allocation(graph: &TaskGraph, deadline_min: f64) -> Result<Vec<usize>> {
    if !(deadline_min.is_finite() && deadline_min > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "deadline must be positive and finite, got {deadline_min}"
        )));
    }
    let n = graph.task_count();
    let m = graph.columns();

    // Tasks in ascending id order; the tie-break is defined over this order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| graph.task(a).id.cmp(&graph.task(b).id));

    let mut ticks = vec![vec![0usize; m]; n];
    for &t in &order {
        for j in 1..=m {
            let scaled = graph.duration(t, j) * TIME_SCALE;
            let rounded = scaled.round();
            if (scaled - rounded).abs() > 1e-6 {
                return Err(Error::InvalidArgument(format!(
                    "task {}: duration {} is not on the 0.1-minute grid",
                    graph.task(t).id,
                    graph.duration(t, j)
                )));
            }
            ticks[t][j - 1] = rounded as usize;
        }
    }
    let budget = ((deadline_min * TIME_SCALE) + 1e-9).floor() as usize;

    // g[idx][w]: minimum energy for the tasks from position idx (in id
    // order) onward, with w ticks of deadline left.
    let mut g = vec![vec![f64::INFINITY; budget + 1]; n + 1];
    g[n] = vec![0.0; budget + 1];
    for idx in (0..n).rev() {
        let t = order[idx];
        for w in 0..=budget {
            let mut best = f64::INFINITY;
            for j in 1..=m {
                let dw = ticks[t][j - 1];
                if dw <= w {
                    let e = graph.current(t, j) * graph.duration(t, j) + g[idx + 1][w - dw];
                    if e < best {
                        best = e;
                    }
                }
            }
            g[idx][w] = best;
        }
    }
    if g[0][budget].is_infinite() {
        return Err(Error::DeadlineInfeasible);
    }

    // Forward reconstruction, largest column first: the candidate sum is
    // recomputed from the same two values the table minimum came from, so
    // exact equality identifies the winning columns.
    let mut chosen = vec![0usize; n];
    let mut w = budget;
    for idx in 0..n {
        let t = order[idx];
        let mut picked = None;
        for j in (1..=m).rev() {
            let dw = ticks[t][j - 1];
            if dw <= w {
                let e = graph.current(t, j) * graph.duration(t, j) + g[idx + 1][w - dw];
                if e == g[idx][w] {
                    picked = Some(j);
                    break;
                }
            }
        }
        let j = picked.expect("finite table entry has a witness column");
        chosen[t] = j;
        w -= ticks[t][j - 1];
    }
    Ok(chosen)
}

/// Full reference run against the graph's deadline: knapsack allocation,
/// then the max-of-own-and-descendant-mean-current list schedule, then the
/// battery cost of the result.
pub fn baseline_schedule(graph: &TaskGraph, params: &BatteryParams) -> Result<BaselineResult> {
    let alloc = min_energy_allocation(graph, graph.deadline_min())?;
    let seq = baseline_sequence(graph, &alloc)?;
    let cols: Vec<usize> = seq.iter().map(|&t| alloc[t]).collect();
    let (sigma, delta) = calculate_battery_cost(graph, &seq, &cols, params)?;
    let total_energy = (0..graph.task_count())
        .map(|t| graph.current(t, alloc[t]) * graph.duration(t, alloc[t]))
        .sum();
    Ok(BaselineResult {
        chosen: (0..graph.task_count())
            .map(|t| (graph.task(t).id.clone(), alloc[t]))
            .collect(),
        sequence: seq.iter().map(|&t| graph.task(t).id.clone()).collect(),
        sigma,
        delta,
        total_energy,
    })
}

/// Enumerates every topological order and column vector that meets the
/// graph's deadline and records the cheapest and costliest. The instance
/// size is gated up front: (topological orders) * m^n must stay within
/// `budget` (default 10^6 via `DEFAULT_ORACLE_BUDGET`). Orders are
/// generated with ready tasks in ascending id order and columns as an
/// ascending odometer, so the first optimum found is deterministic.
pub fn exhaustive_oracle(
    graph: &TaskGraph,
    params: &BatteryParams,
    budget: u64,
) -> Result<OracleResult> {
    let n = graph.task_count();
    let m = graph.columns();
    let over_budget = || {
        Error::BudgetExceeded(format!(
            "orders × {m}^{n} evaluations exceed the budget of {budget}; \
             use a smaller graph or raise the budget"
        ))
    };
    let assignments = (m as u64)
        .checked_pow(n as u32)
        .filter(|&a| a <= budget)
        .ok_or_else(over_budget)?;
    // The order count only needs to be resolved up to the point where the
    // product crosses the budget.
    let cap = budget / assignments + 1;
    let orders = count_topological_orders(graph, cap);
    if orders.checked_mul(assignments).is_none_or(|t| t > budget) {
        return Err(over_budget());
    }

    let mut orders_buf = Vec::new();
    let mut current = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    collect_orders(graph, &mut current, &mut placed, &mut orders_buf);

    let deadline = graph.deadline_min();
    let mut best: Option<(f64, Vec<usize>, Vec<usize>)> = None;
    let mut worst = f64::NEG_INFINITY;
    let mut enumerated = 0u64;
    let mut cols = vec![1usize; n];
    for seq in &orders_buf {
        loop {
            let by_pos: Vec<usize> = seq.iter().map(|&t| cols[t]).collect();
            let delta: f64 = seq
                .iter()
                .zip(&by_pos)
                .map(|(&t, &c)| graph.duration(t, c))
                .sum();
            if delta <= deadline {
                let (sigma, _) = calculate_battery_cost(graph, seq, &by_pos, params)?;
                enumerated += 1;
                if best.as_ref().is_none_or(|b| sigma < b.0) {
                    best = Some((sigma, seq.clone(), by_pos));
                }
                if sigma > worst {
                    worst = sigma;
                }
            }
            // Odometer over task-indexed columns, least significant first.
            let mut k = 0;
            loop {
                if k == n {
                    break;
                }
                if cols[k] < m {
                    cols[k] += 1;
                    break;
                }
                cols[k] = 1;
                k += 1;
            }
            if k == n {
                break;
            }
        }
    }

    let Some((best_sigma, best_seq, best_by_pos)) = best else {
        return Err(Error::DeadlineInfeasible);
    };
    Ok(OracleResult {
        best_sigma,
        worst_sigma: worst,
        best_sequence: best_seq.iter().map(|&t| graph.task(t).id.clone()).collect(),
        best_chosen: best_seq
            .iter()
            .zip(&best_by_pos)
            .map(|(&t, &c)| (graph.task(t).id.clone(), c))
            .collect(),
        enumerated,
    })
}

pub const DEFAULT_ORACLE_BUDGET: u64 = 1_000_000;

/// Counts topological orders, stopping early once the count reaches `cap`.
fn count_topological_orders(graph: &TaskGraph, cap: u64) -> u64 {
    fn rec(graph: &TaskGraph, placed: &mut Vec<bool>, left: usize, cap: u64) -> u64 {
        if left == 0 {
            return 1;
        }
        let mut count = 0u64;
        for t in 0..graph.task_count() {
            if !placed[t] && graph.parents(t).iter().all(|&p| placed[p]) {
                placed[t] = true;
                count = count.saturating_add(rec(graph, placed, left - 1, cap));
                placed[t] = false;
                if count >= cap {
                    return count;
                }
            }
        }
        count
    }
    let mut placed = vec![false; graph.task_count()];
    rec(graph, &mut placed, graph.task_count(), cap)
}

fn collect_orders(
    graph: &TaskGraph,
    current: &mut Vec<usize>,
    placed: &mut Vec<bool>,
    out: &mut Vec<Vec<usize>>,
) {
    let n = graph.task_count();
    if current.len() == n {
        out.push(current.clone());
        return;
    }
    // Ready tasks in ascending id order keep the enumeration deterministic.
    let mut ready: Vec<usize> = (0..n)
        .filter(|&t| !placed[t] && graph.parents(t).iter().all(|&p| placed[p]))
        .collect();
    ready.sort_by(|&a, &b| graph.task(a).id.cmp(&graph.task(b).id));
    for t in ready {
        placed[t] = true;
        current.push(t);
        collect_orders(graph, current, placed, out);
        current.pop();
        placed[t] = false;
    }
}
