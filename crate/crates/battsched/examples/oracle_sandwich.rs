//! Sandwich the heuristic between exhaustive bounds on small random graphs:
//! for every instance the scheduled cost must land between the best and the
//! worst cost over all orders and design-point assignments.
//!
//! Run with: cargo run --example oracle_sandwich

use battsched::{
    exhaustive_oracle, schedule, BatteryParams, DesignPoint, ScheduleOptions, Task, TaskGraph,
    DEFAULT_ORACLE_BUDGET,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> battsched::Result<()> {
    let params = BatteryParams::new(0.273);
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    println!(
        "{:>5} {:>6} {:>8} {:>12} {:>12} {:>12} {:>9}",
        "tasks", "points", "configs", "oracle best", "heuristic", "oracle worst", "gap"
    );
    for _ in 0..8 {
        let graph = random_graph(&mut rng)?;
        let oracle = exhaustive_oracle(&graph, &params, DEFAULT_ORACLE_BUDGET)?;
        let ours = schedule(&graph, &params, &ScheduleOptions::default())?;

        assert!(ours.sigma >= oracle.best_sigma - 1e-9, "heuristic beat the oracle");
        assert!(ours.sigma <= oracle.worst_sigma + 1e-9, "heuristic worse than worst");
        let span = oracle.worst_sigma - oracle.best_sigma;
        let gap = if span > 0.0 { (ours.sigma - oracle.best_sigma) / span * 100.0 } else { 0.0 };
        println!(
            "{:>5} {:>6} {:>8} {:>12.1} {:>12.1} {:>12.1} {:>8.1}%",
            graph.task_count(),
            graph.columns(),
            oracle.enumerated,
            oracle.best_sigma,
            ours.sigma,
            oracle.worst_sigma,
            gap
        );
    }
    println!("\ngap is the heuristic's position inside the bracket; 0% is optimal");
    Ok(())
}

// A random precedence graph small enough for exhaustive enumeration, with
// durations ascending and currents descending across each task's points.
fn random_graph(rng: &mut ChaCha8Rng) -> battsched::Result<TaskGraph> {
    let n: usize = rng.gen_range(3..=5);
    let m: usize = rng.gen_range(2..=3);
    let mut tasks = Vec::new();
    for i in 0..n {
        let mut duration = rng.gen_range(1..=4) as f64;
        let mut current = rng.gen_range(400..=900) as f64;
        let mut points = Vec::new();
        for _ in 0..m {
            points.push(DesignPoint { current_ma: current, duration_min: duration });
            duration += rng.gen_range(1..=3) as f64;
            current -= rng.gen_range(30..=150) as f64;
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
    // A deadline loose enough that every sequencing choice stays feasible.
    let fastest: f64 = tasks.iter().map(|t| t.design_points[0].duration_min).sum();
    let slowest: f64 = tasks.iter().map(|t| t.design_points[m - 1].duration_min).sum();
    let spread = tasks
        .iter()
        .map(|t| t.design_points[m - 1].duration_min - t.design_points[0].duration_min)
        .fold(0.0, f64::max);
    let lo = fastest + spread;
    let deadline = lo + rng.gen::<f64>() * (slowest * 1.25 + 1.0 - lo);
    TaskGraph::new(tasks, edges, deadline)
}
