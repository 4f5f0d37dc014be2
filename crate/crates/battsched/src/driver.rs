//! The iterative sequencing / assignment loop.
//!
//! Each iteration evaluates every window against the current sequence,
//! takes the cheapest assignment, re-sequences with the assignment's
//! currents as weights, and keeps the cheaper of the two configurations.
//! The loop stops the first time an iteration fails to improve on the
//! previous one (or at the safety cap); the best configuration ever seen is
//! returned, so a final non-improving pass cannot lose earlier progress.

use std::collections::BTreeMap;

use crate::allocation::{evaluate_windows, WindowLog};
use crate::battery::{sigma_at_completion, BatteryParams, DischargeProfile, Interval};
use crate::error::{Error, Result};
use crate::graph::TaskGraph;
use crate::sequence::{sequence_dec_energy, weighted_sequence, WeightMode};

#[derive(Debug, Clone, Copy)]
pub struct ScheduleOptions {
    /// Safety cap on loop passes; the natural exit is the first
    /// non-improving iteration.
    pub max_iterations: usize,
    /// Statistic weighting the initial sequence.
    pub weight_mode: WeightMode,
}

impl Default for ScheduleOptions {
    fn default() -> Self {
        Self { max_iterations: 50, weight_mode: WeightMode::MeanCurrent }
    }
}

/// One loop pass. `sequence` is the order the windows were evaluated
/// against; `best_sigma` and `delta` describe the configuration the
/// iteration settled on (the cheaper of window-best and re-sequenced).
#[derive(Debug, Clone)]
pub struct IterationLog {
    pub iteration: usize,
    pub sequence: Vec<String>,
    pub windows: Vec<WindowLog>,
    pub window_best_sigma: f64,
    pub resequenced_sigma: f64,
    pub best_sigma: f64,
    pub delta: f64,
}

/// Final schedule: task ids in execution order, a 1-based column per task,
/// and the battery cost of running the whole sequence back-to-back.
#[derive(Debug, Clone)]
pub struct ScheduleResult {
    pub sequence: Vec<String>,
    pub chosen: BTreeMap<String, usize>,
    pub sigma: f64,
    pub delta: f64,
    pub iterations: Vec<IterationLog>,
    pub converged: bool,
}

/// Battery cost of executing `seq` back-to-back from t = 0 with the given
/// 1-based column per sequence position: sigma evaluated at the completion
/// time, and the completion time itself.
pub fn calculate_battery_cost(
    graph: &TaskGraph,
    seq: &[usize],
    cols: &[usize],
    params: &BatteryParams,
) -> Result<(f64, f64)> {
    if cols.len() != seq.len() {
        return Err(Error::InvalidArgument(format!(
            "expected {} columns, got {}",
            seq.len(),
            cols.len()
        )));
    }
    let intervals: Vec<Interval> = seq
        .iter()
        .zip(cols)
        .map(|(&t, &c)| Interval {
            current_ma: graph.current(t, c),
            duration_min: graph.duration(t, c),
        })
        .collect();
    let profile = DischargeProfile::new(intervals)?;
    sigma_at_completion(&profile, params)
}

/// Runs the full loop against the graph's deadline. Errors with
/// DeadlineInfeasible when no window can meet it.
pub fn schedule(
    graph: &TaskGraph,
    params: &BatteryParams,
    options: &ScheduleOptions,
) -> Result<ScheduleResult> {
    if options.max_iterations == 0 {
        return Err(Error::InvalidArgument("max_iterations must be at least 1".into()));
    }
    let deadline = graph.deadline_min();
    let ids = |seq: &[usize]| -> Vec<String> {
        seq.iter().map(|&t| graph.task(t).id.clone()).collect()
    };

    let mut seq = sequence_dec_energy(graph, options.weight_mode)?;
    let mut prev = f64::INFINITY;
    let mut overall: Option<(f64, Vec<usize>, Vec<usize>, f64)> = None;
    let mut logs = Vec::new();
    let mut converged = false;

    for iteration in 1..=options.max_iterations {
        let (choice, windows) = evaluate_windows(graph, &seq, deadline, params)?;

        // Columns follow their tasks into the new order.
        let mut by_task = vec![0usize; graph.task_count()];
        for (p, &t) in seq.iter().enumerate() {
            by_task[t] = choice.columns[p];
        }
        let reseq = weighted_sequence(graph, &by_task)?;
        let reseq_cols: Vec<usize> = reseq.iter().map(|&t| by_task[t]).collect();
        let (reseq_sigma, reseq_delta) = calculate_battery_cost(graph, &reseq, &reseq_cols, params)?;

        let (best_sigma, best_seq, best_cols, best_delta) = if reseq_sigma < choice.sigma {
            (reseq_sigma, reseq.clone(), reseq_cols, reseq_delta)
        } else {
            (choice.sigma, seq.clone(), choice.columns.clone(), choice.delta)
        };
        if overall.as_ref().is_none_or(|o| best_sigma < o.0) {
            overall = Some((best_sigma, best_seq.clone(), best_cols, best_delta));
        }
        logs.push(IterationLog {
            iteration,
            sequence: ids(&seq),
            windows,
            window_best_sigma: choice.sigma,
            resequenced_sigma: reseq_sigma,
            best_sigma,
            delta: best_delta,
        });

        if best_sigma >= prev {
            converged = true;
            break;
        }
        prev = best_sigma;
        seq = reseq;
    }

    let (sigma, best_seq, best_cols, delta) =
        overall.expect("loop ran at least one iteration");
    let chosen = best_seq
        .iter()
        .zip(&best_cols)
        .map(|(&t, &c)| (graph.task(t).id.clone(), c))
        .collect();
    Ok(ScheduleResult {
        sequence: ids(&best_seq),
        chosen,
        sigma,
        delta,
        iterations: logs,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{g3, g3_params, g3_with_deadline};

    #[test]
    fn g3_full_run_matches_hand_iteration() {
        let g = g3();
        let result = schedule(&g, &g3_params(), &ScheduleOptions::default()).unwrap();
        assert!((result.sigma - 14309.15015051117).abs() < 1e-6);
        assert!((result.delta - 226.7).abs() < 1e-9);
        assert_eq!(result.iterations.len(), 3);
        assert!(result.converged);
        assert_eq!(
            result.sequence,
            ["T1", "T2", "T4", "T5", "T3", "T6", "T7", "T8", "T9", "T11", "T10", "T13", "T12", "T14", "T15"]
        );
        let mut expect = BTreeMap::new();
        for id in ["T1", "T3", "T4", "T5", "T6", "T7", "T8", "T10", "T12", "T13", "T14", "T15"] {
            expect.insert(id.to_string(), 5);
        }
        expect.insert("T2".to_string(), 1);
        expect.insert("T9".to_string(), 4);
        expect.insert("T11".to_string(), 3);
        assert_eq!(result.chosen, expect);
    }

    #[test]
    fn g3_iteration_trajectory() {
        let g = g3();
        let result = schedule(&g, &g3_params(), &ScheduleOptions::default()).unwrap();
        let logs = &result.iterations;
        assert!((logs[0].window_best_sigma - 16623.713681237066).abs() < 1e-6);
        assert!((logs[0].resequenced_sigma - 16604.444778277437).abs() < 1e-6);
        assert!((logs[1].window_best_sigma - 14657.150027534659).abs() < 1e-6);
        assert!((logs[1].resequenced_sigma - 14309.15015051117).abs() < 1e-6);
        assert!((logs[2].window_best_sigma - 15568.154840642474).abs() < 1e-6);
        assert!((logs[2].resequenced_sigma - 15498.822897611877).abs() < 1e-6);
        assert_eq!(logs[0].windows.len(), 4);
        for log in logs {
            assert!(log.best_sigma <= log.window_best_sigma);
            assert!(log.best_sigma <= log.resequenced_sigma);
            assert!(log.delta <= 230.0);
        }
        // Improving prefix; the terminating pass is the first non-improvement.
        assert!(logs[1].best_sigma < logs[0].best_sigma);
        assert!(logs[2].best_sigma >= logs[1].best_sigma);
    }

    #[test]
    fn iteration_cap_flags_non_convergence() {
        let g = g3();
        let opts = ScheduleOptions { max_iterations: 1, ..Default::default() };
        let result = schedule(&g, &g3_params(), &opts).unwrap();
        assert_eq!(result.iterations.len(), 1);
        assert!(!result.converged);
        assert!((result.sigma - 16604.444778277437).abs() < 1e-6);
    }

    #[test]
    fn tighter_deadlines_cost_more() {
        let sigmas: Vec<f64> = [100.0, 150.0, 230.0]
            .iter()
            .map(|&d| {
                let g = g3_with_deadline(d);
                schedule(&g, &g3_params(), &ScheduleOptions::default()).unwrap().sigma
            })
            .collect();
        assert!((sigmas[0] - 57428.6781430653).abs() < 1e-3);
        assert!((sigmas[1] - 41801.457245064834).abs() < 1e-3);
        assert!(sigmas[0] > sigmas[1] && sigmas[1] > sigmas[2]);
    }

    #[test]
    fn reported_sigma_is_recomputable() {
        let g = g3();
        let p = g3_params();
        let result = schedule(&g, &p, &ScheduleOptions::default()).unwrap();
        let seq: Vec<usize> = result.sequence.iter().map(|id| g.index_of(id).unwrap()).collect();
        let cols: Vec<usize> = result.sequence.iter().map(|id| result.chosen[id]).collect();
        let (sigma, delta) = calculate_battery_cost(&g, &seq, &cols, &p).unwrap();
        assert!((sigma - result.sigma).abs() <= 1e-9 * result.sigma);
        assert!((delta - result.delta).abs() < 1e-9);
    }

    #[test]
    fn infeasible_deadline_errors() {
        let g = g3_with_deadline(50.0);
        let err = schedule(&g, &g3_params(), &ScheduleOptions::default()).unwrap_err();
        assert!(matches!(err, Error::DeadlineInfeasible));
    }
}
