//! Full scheduling run on the bundled 15-task graph: parse, schedule, and
//! print the iteration trace plus the final timeline.
//!
//! Run with: cargo run --example schedule_demo

use battsched::{parse_graph_file, schedule, ScheduleOptions};

const GRAPH: &str = include_str!("../data/g3.json");

fn main() -> battsched::Result<()> {
    let file = parse_graph_file(GRAPH)?;
    let graph = file.to_graph()?;
    let params = file.battery_params()?;

    let result = schedule(&graph, &params, &ScheduleOptions::default())?;

    println!("graph: {} tasks, deadline {} min\n", graph.task_count(), graph.deadline_min());
    for log in &result.iterations {
        println!("iteration {}: sequence {}", log.iteration, log.sequence.join(" "));
        for w in &log.windows {
            match (w.sigma, w.delta) {
                (Some(s), Some(d)) => {
                    println!("  window {}: sigma {:>10.1}  finish {:>6.1}", w.window_start, s, d)
                }
                _ => println!("  window {}: infeasible", w.window_start),
            }
        }
        println!(
            "  window best {:.1}, resequenced {:.1}, best so far {:.1}\n",
            log.window_best_sigma, log.resequenced_sigma, log.best_sigma
        );
    }

    println!(
        "final: sigma {:.1} mA*min, finishes at {:.1} of {:.1} min, {} iterations, converged: {}",
        result.sigma,
        result.delta,
        graph.deadline_min(),
        result.iterations.len(),
        result.converged
    );
    println!("\n{:<6} {:>6} {:>12} {:>12} {:>10}", "task", "point", "current_mA", "duration_min", "start_min");
    let mut start = 0.0;
    for id in &result.sequence {
        let task = graph.task(graph.index_of(id).unwrap());
        let col = result.chosen[id];
        println!(
            "{:<6} {:>6} {:>12} {:>12} {:>10.1}",
            task.id,
            col,
            task.design_points[col - 1].current_ma,
            task.design_points[col - 1].duration_min,
            start
        );
        start += task.design_points[col - 1].duration_min;
    }
    Ok(())
}
