//! Operating-point assignment for a fixed sequence.
//!
//! Columns are restricted to a window [ws, m]: no task may run faster than
//! column ws. The assignment walks the sequence backwards; at each position
//! it scores every admissible column with
//!
//! ```text
//! B = SR + CR + ENR + CIF + DPF
//! ```
//!
//! and keeps the minimum. The five terms, for candidate column j at the
//! tagged position i (positions after i already fixed, positions before i
//! still free):
//!
//! * SR, slack ratio: (d - (Tsum + D(i,j))) / d, where Tsum sums the fixed
//!   durations only. Low slack means the candidate crowds the deadline.
//! * CR, current ratio: (I(i,j) - Imin) / (Imax - Imin) over the whole
//!   graph's current range. 0 when the range is degenerate.
//! * ENR, energy ratio: (E - Emin) / (Emax - Emin), E summed over all rows
//!   of the post-bump working assignment, clamped to [0, 1]; the anchors are
//!   the all-column-m and all-column-1 totals. 0 when degenerate.
//! * CIF, current increase fraction: fraction of adjacent pairs, in sequence
//!   order of the post-bump working assignment, whose current strictly
//!   rises. Rising steps waste recovery that the battery model rewards.
//! * DPF, design-point factor: sum over columns k of (m - k) * f * F_k with
//!   f = 1/(m - 1), where F_k is the fraction of free rows sitting at column
//!   k in the working assignment. High values mean the free tasks still sit
//!   near fast columns, i.e. the candidate leaves them little room to slow
//!   down. With no free rows (or m = 1) the normalized leftover slack
//!   (d - Tc) / d stands in.
//!
//! Before the factors are read, a working copy of the assignment is bumped
//! toward feasibility: while its completion time Tc exceeds d, the cheapest
//! task by mean energy that is neither fixed nor exhausted moves one column
//! down (faster). A task reaching the window floor ws is exhausted and the
//! walk moves on. If every task exhausts with Tc still above d, the
//! candidate is unattainable and DPF becomes +inf, which eliminates it
//! unless every column of the position is unattainable, in which case the
//! whole window is infeasible.

use crate::battery::BatteryParams;
use crate::driver::calculate_battery_cost;
use crate::error::{Error, Result};
use crate::graph::TaskGraph;

/// The five scoring terms for one candidate column. `dpf` is +inf when the
/// bump loop exhausted without reaching the deadline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreBreakdown {
    pub sr: f64,
    pub cr: f64,
    pub enr: f64,
    pub cif: f64,
    pub dpf: f64,
}

impl ScoreBreakdown {
    pub fn total(&self) -> f64 {
        self.sr + self.cr + self.enr + self.cif + self.dpf
    }
}

/// Factors read from the bumped working assignment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpfEvaluation {
    pub enr: f64,
    pub cif: f64,
    /// +inf when the bump loop exhausted every task.
    pub dpf: f64,
    /// Completion time of the working assignment after bumping, minutes.
    pub completion_min: f64,
}

/// One window's outcome inside `evaluate_windows`. `sigma`/`delta` are None
/// when the window was infeasible.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowLog {
    pub window_start: usize,
    pub sigma: Option<f64>,
    pub delta: Option<f64>,
}

/// Best feasible window found by `evaluate_windows`.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowChoice {
    pub window_start: usize,
    /// 1-based column per sequence position.
    pub columns: Vec<usize>,
    pub sigma: f64,
    pub delta: f64,
}

/// Slack left after placing a candidate of duration `candidate_min` on top
/// of the already fixed durations, as a fraction of the deadline.
pub fn slack_ratio(deadline_min: f64, fixed_min: f64, candidate_min: f64) -> f64 {
    (deadline_min - (fixed_min + candidate_min)) / deadline_min
}

/// Position of `current` in the graph-wide current range; 0 when the range
/// is degenerate.
pub fn current_ratio(current_ma: f64, min_ma: f64, max_ma: f64) -> f64 {
    if max_ma > min_ma {
        (current_ma - min_ma) / (max_ma - min_ma)
    } else {
        0.0
    }
}

/// Position of `energy` between the all-slow and all-fast totals, clamped
/// to [0, 1]; 0 when the range is degenerate.
pub fn energy_ratio(energy: f64, min_energy: f64, max_energy: f64) -> f64 {
    if max_energy > min_energy {
        ((energy - min_energy) / (max_energy - min_energy)).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

/// Fraction of adjacent pairs whose current strictly rises; 0 for fewer
/// than two entries.
pub fn cif(currents: &[f64]) -> f64 {
    if currents.len() < 2 {
        return 0.0;
    }
    let rises = currents.windows(2).filter(|w| w[0] < w[1]).count();
    rises as f64 / (currents.len() - 1) as f64
}

/// The design-point factor over the free rows only: columns is m,
/// `free_columns` holds each free row's 1-based column. Callers handle the
/// no-free-rows and m = 1 cases (the slack rule) before calling; here those
/// inputs yield 0.
pub fn dpf_formula(columns: usize, free_columns: &[usize]) -> f64 {
    if columns < 2 || free_columns.is_empty() {
        return 0.0;
    }
    let x = free_columns.len();
    let f = 1.0 / (columns - 1) as f64;
    let mut counts = vec![0usize; columns + 1];
    for &c in free_columns {
        assert!((1..=columns).contains(&c), "free column {c} outside 1..={columns}");
        counts[c] += 1;
    }
    let mut dpf = 0.0;
    for (k, &count) in counts.iter().enumerate().skip(1) {
        dpf += (columns - k) as f64 * f * count as f64 / x as f64;
    }
    dpf
}

/// Bumps a working copy of `cols` toward the deadline and reads ENR, CIF
/// and DPF from it. `seq` maps position -> task index; `cols` holds the
/// candidate assignment (1-based, per position) with the tagged position at
/// its candidate column; positions after `tagged_pos` are fixed, positions
/// before it free.
pub fn calculate_dpf(
    graph: &TaskGraph,
    seq: &[usize],
    cols: &[usize],
    tagged_pos: usize,
    window_start: usize,
    deadline_min: f64,
) -> Result<DpfEvaluation> {
    check_inputs(graph, seq, cols, window_start, deadline_min)?;
    if tagged_pos >= seq.len() {
        return Err(Error::InvalidArgument(format!(
            "tagged position {tagged_pos} outside the sequence"
        )));
    }
    let e_positions = energy_positions(graph, seq);
    Ok(dpf_core(graph, seq, cols, tagged_pos, window_start, deadline_min, &e_positions))
}

/// Scores one candidate: `cols` as in `calculate_dpf`, `fixed_min` the
/// summed durations of the fixed positions at their chosen columns.
pub fn score_point(
    graph: &TaskGraph,
    seq: &[usize],
    cols: &[usize],
    tagged_pos: usize,
    window_start: usize,
    deadline_min: f64,
    fixed_min: f64,
) -> Result<ScoreBreakdown> {
    let eval = calculate_dpf(graph, seq, cols, tagged_pos, window_start, deadline_min)?;
    let (imin, imax) = graph.current_extremes();
    let task = seq[tagged_pos];
    let col = cols[tagged_pos];
    Ok(ScoreBreakdown {
        sr: slack_ratio(deadline_min, fixed_min, graph.duration(task, col)),
        cr: current_ratio(graph.current(task, col), imin, imax),
        enr: eval.enr,
        cif: eval.cif,
        dpf: eval.dpf,
    })
}

/// Assigns a 1-based column from [window_start, m] to every sequence
/// position. Returns Ok(None) when the window cannot meet the deadline.
/// The last task always runs at column m; the walk then proceeds from the
/// second-to-last position toward the front, scoring columns m down to
/// window_start and keeping the strict minimum of B, so a tie keeps the
/// larger (slower) column.
pub fn choose_design_points(
    graph: &TaskGraph,
    seq: &[usize],
    window_start: usize,
    deadline_min: f64,
) -> Result<Option<Vec<usize>>> {
    let m = graph.columns();
    let n = seq.len();
    let init = vec![m; n];
    check_inputs(graph, seq, &init, window_start, deadline_min)?;
    let (imin, imax) = graph.current_extremes();
    let e_positions = energy_positions(graph, seq);

    let mut cols = init;
    let mut fixed_min = graph.duration(seq[n - 1], m);
    for i in (0..n - 1).rev() {
        let task = seq[i];
        let mut best: Option<(f64, usize)> = None;
        for j in (window_start..=m).rev() {
            let mut cand = cols.clone();
            cand[i] = j;
            let eval = dpf_core(graph, seq, &cand, i, window_start, deadline_min, &e_positions);
            let sr = slack_ratio(deadline_min, fixed_min, graph.duration(task, j));
            let cr = current_ratio(graph.current(task, j), imin, imax);
            let b = sr + cr + eval.enr + eval.cif + eval.dpf;
            if best.is_none_or(|(prev, _)| b < prev) {
                best = Some((b, j));
            }
        }
        let (score, col) = best.expect("window has at least one column");
        if score.is_infinite() {
            return Ok(None);
        }
        cols[i] = col;
        fixed_min += graph.duration(task, col);
    }

    let total: f64 = (0..n).map(|p| graph.duration(seq[p], cols[p])).sum();
    if total > deadline_min {
        return Ok(None);
    }
    Ok(Some(cols))
}

/// Runs the assignment across every window start and keeps the lowest-cost
/// one. The scan begins at the widest window whose floor meets the deadline
/// (all tasks at column ws complete within d) and narrows to [1, m]. Ties
/// keep the larger window start. Every window is logged, infeasible ones
/// with empty cost fields. Errors with DeadlineInfeasible when even the
/// all-fastest assignment overshoots, or no window yields an assignment.
pub fn evaluate_windows(
    graph: &TaskGraph,
    seq: &[usize],
    deadline_min: f64,
    params: &BatteryParams,
) -> Result<(WindowChoice, Vec<WindowLog>)> {
    let m = graph.columns();
    let mut ws = if m > 1 { m - 1 } else { 1 };
    while deadline_min < graph.column_total_duration(ws) {
        if ws == 1 {
            return Err(Error::DeadlineInfeasible);
        }
        ws -= 1;
    }
    let mut best: Option<WindowChoice> = None;
    let mut log = Vec::with_capacity(ws);
    for w in (1..=ws).rev() {
        match choose_design_points(graph, seq, w, deadline_min)? {
            Some(columns) => {
                let (sigma, delta) = calculate_battery_cost(graph, seq, &columns, params)?;
                log.push(WindowLog { window_start: w, sigma: Some(sigma), delta: Some(delta) });
                if best.as_ref().is_none_or(|b| sigma < b.sigma) {
                    best = Some(WindowChoice { window_start: w, columns, sigma, delta });
                }
            }
            None => log.push(WindowLog { window_start: w, sigma: None, delta: None }),
        }
    }
    match best {
        Some(choice) => Ok((choice, log)),
        None => Err(Error::DeadlineInfeasible),
    }
}

/// Sequence positions in ascending mean-energy order: the order in which
/// the bump loop slows tasks down.
fn energy_positions(graph: &TaskGraph, seq: &[usize]) -> Vec<usize> {
    let mut pos_of = vec![0usize; graph.task_count()];
    for (p, &t) in seq.iter().enumerate() {
        pos_of[t] = p;
    }
    graph.energy_order().into_iter().map(|t| pos_of[t]).collect()
}

fn dpf_core(
    graph: &TaskGraph,
    seq: &[usize],
    cols: &[usize],
    tagged_pos: usize,
    window_start: usize,
    deadline_min: f64,
    e_positions: &[usize],
) -> DpfEvaluation {
    let n = seq.len();
    let m = graph.columns();
    let mut work = cols.to_vec();
    // Fixed in the working copy: the already assigned tail plus the tagged
    // position itself; tasks that hit the window floor join as the loop runs.
    let mut done: Vec<bool> = (0..n).map(|p| p >= tagged_pos).collect();
    let total = |w: &[usize]| -> f64 { (0..n).map(|p| graph.duration(seq[p], w[p])).sum() };
    let mut tc = total(&work);
    let mut exhausted = false;
    while tc > deadline_min {
        let Some(q) = e_positions.iter().copied().find(|&p| !done[p]) else {
            exhausted = true;
            break;
        };
        let p = work[q];
        if p == window_start {
            done[q] = true;
            continue;
        }
        if p == window_start + 1 {
            done[q] = true;
        }
        work[q] = p - 1;
        tc = total(&work);
    }

    let dpf = if exhausted {
        f64::INFINITY
    } else if tagged_pos == 0 || m == 1 {
        // No free rows left to spread, or a single column: fall back to the
        // normalized leftover slack.
        (deadline_min - tc) / deadline_min
    } else {
        let free: Vec<usize> = work[..tagged_pos].to_vec();
        dpf_formula(m, &free)
    };

    // ENR and CIF read the whole working assignment in sequence order.
    let currents: Vec<f64> = (0..n).map(|p| graph.current(seq[p], work[p])).collect();
    let energy: f64 = (0..n)
        .map(|p| graph.current(seq[p], work[p]) * graph.duration(seq[p], work[p]))
        .sum();
    let (emin, emax) = graph.energy_bounds();
    DpfEvaluation {
        enr: energy_ratio(energy, emin, emax),
        cif: cif(&currents),
        dpf,
        completion_min: tc,
    }
}

fn check_inputs(
    graph: &TaskGraph,
    seq: &[usize],
    cols: &[usize],
    window_start: usize,
    deadline_min: f64,
) -> Result<()> {
    let n = graph.task_count();
    let m = graph.columns();
    if seq.len() != n {
        return Err(Error::InvalidArgument(format!(
            "sequence covers {} of {n} tasks",
            seq.len()
        )));
    }
    let mut seen = vec![false; n];
    for &t in seq {
        if t >= n || seen[t] {
            return Err(Error::InvalidArgument("sequence is not a permutation of the tasks".into()));
        }
        seen[t] = true;
    }
    if cols.len() != seq.len() {
        return Err(Error::InvalidArgument(format!(
            "expected {} columns, got {}",
            seq.len(),
            cols.len()
        )));
    }
    if let Some(&c) = cols.iter().find(|&&c| c < 1 || c > m) {
        return Err(Error::InvalidArgument(format!("column {c} outside 1..={m}")));
    }
    if !(1..=m).contains(&window_start) {
        return Err(Error::InvalidArgument(format!(
            "window start {window_start} outside 1..={m}"
        )));
    }
    if !(deadline_min.is_finite() && deadline_min > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "deadline must be positive and finite, got {deadline_min}"
        )));
    }
    Ok(())
}
