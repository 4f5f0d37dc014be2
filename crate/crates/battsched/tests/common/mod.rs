//! Shared instance generation for the integration tests. Each test target
//! compiles this module independently, so not every item is used everywhere.
#![allow(dead_code)]

use battsched::{DesignPoint, Task, TaskGraph};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random tasks and precedence edges for a graph small enough to enumerate
/// exhaustively. Integer durations and currents keep every energy sum exact
/// in floating point, so comparisons against brute-force references carry no
/// rounding ambiguity.
pub fn random_tasks(rng: &mut ChaCha8Rng) -> (Vec<Task>, Vec<(String, String)>, usize) {
    let n: usize = rng.gen_range(1..=5);
    let m: usize = rng.gen_range(1..=3);
    let mut tasks = Vec::new();
    for i in 0..n {
        let mut duration = rng.gen_range(1..=5) as f64;
        let mut current = rng.gen_range(300..=900) as f64;
        let mut points = Vec::new();
        for _ in 0..m {
            points.push(DesignPoint { current_ma: current, duration_min: duration });
            duration += rng.gen_range(1..=3) as f64;
            current -= rng.gen_range(25..=120) as f64;
        }
        tasks.push(Task { id: format!("N{i}"), label: None, design_points: points });
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.4) {
                edges.push((format!("N{i}"), format!("N{j}")));
            }
        }
    }
    (tasks, edges, m)
}

/// A deadline drawn from a range where the scheduler always finds a feasible
/// window, whatever sequence it tries: at least the all-fastest makespan plus
/// the largest single-task slowdown.
pub fn safe_deadline(tasks: &[Task], m: usize, rng: &mut ChaCha8Rng) -> f64 {
    let fastest: f64 = tasks.iter().map(|t| t.design_points[0].duration_min).sum();
    let slowest: f64 = tasks.iter().map(|t| t.design_points[m - 1].duration_min).sum();
    let spread = tasks
        .iter()
        .map(|t| t.design_points[m - 1].duration_min - t.design_points[0].duration_min)
        .fold(0.0, f64::max);
    let lo = fastest + spread;
    lo + rng.gen::<f64>() * (slowest * 1.25 + 1.0 - lo)
}

/// A random instance with a deadline the scheduler can always meet.
pub fn random_instance(rng: &mut ChaCha8Rng) -> TaskGraph {
    let (tasks, edges, m) = random_tasks(rng);
    let deadline = safe_deadline(&tasks, m, rng);
    TaskGraph::new(tasks, edges, deadline).expect("generated graph is valid")
}

/// Independent exact reference for the min-energy allocation: try every
/// assignment, keep the cheapest feasible one, and break energy ties toward
/// the lexicographically largest point vector in task-id order.
pub fn brute_force_min_energy(graph: &TaskGraph, deadline: f64) -> Option<Vec<usize>> {
    let n = graph.task_count();
    let m = graph.columns();
    let mut id_order: Vec<usize> = (0..n).collect();
    id_order.sort_by(|&a, &b| graph.task(a).id.cmp(&graph.task(b).id));
    let key = |cols: &[usize]| -> Vec<usize> { id_order.iter().map(|&i| cols[i]).collect() };

    let mut best: Option<(f64, Vec<usize>)> = None;
    for_each_assignment(n, m, |cols| {
        let total: f64 = (0..n).map(|i| graph.duration(i, cols[i])).sum();
        if total <= deadline {
            let energy: f64 =
                (0..n).map(|i| graph.current(i, cols[i]) * graph.duration(i, cols[i])).sum();
            let better = match &best {
                None => true,
                Some((e, v)) => energy < *e || (energy == *e && key(cols) > key(v)),
            };
            if better {
                best = Some((energy, cols.to_vec()));
            }
        }
    });
    best.map(|(_, v)| v)
}

/// Calls `visit` with every point-vector in {1..m}^n, odometer order.
pub fn for_each_assignment<F: FnMut(&[usize])>(n: usize, m: usize, mut visit: F) {
    let mut cols = vec![1usize; n];
    loop {
        visit(&cols);
        let mut pos = 0;
        while pos < n && cols[pos] == m {
            cols[pos] = 1;
            pos += 1;
        }
        if pos == n {
            break;
        }
        cols[pos] += 1;
    }
}
