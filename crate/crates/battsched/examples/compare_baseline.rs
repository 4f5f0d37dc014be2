//! Side-by-side runs of the battery-aware scheduler and the min-energy
//! baseline on the bundled graph, across a range of deadlines.
//!
//! Run with: cargo run --example compare_baseline

use battsched::{baseline_schedule, parse_graph_file, schedule, ScheduleOptions};

const GRAPH: &str = include_str!("../data/g3.json");

fn main() -> battsched::Result<()> {
    let file = parse_graph_file(GRAPH)?;
    let params = file.battery_params()?;

    println!(
        "{:>8}  {:>14}  {:>14}  {:>8}",
        "deadline", "battery-aware", "min-energy", "saved"
    );
    for deadline in [100.0, 150.0, 230.0, 300.0] {
        let mut relaxed = file.clone();
        relaxed.deadline_min = deadline;
        let graph = relaxed.to_graph()?;

        let ours = schedule(&graph, &params, &ScheduleOptions::default())?;
        let base = baseline_schedule(&graph, &params)?;
        let saved = (base.sigma - ours.sigma) / base.sigma * 100.0;
        println!(
            "{:>8.0}  {:>14.1}  {:>14.1}  {:>7.1}%",
            deadline, ours.sigma, base.sigma, saved
        );
    }

    println!();
    println!("Tight deadlines force fast, high-current design points on both");
    println!("schedulers, but ordering and recovery-aware point selection still");
    println!("recover a sizable share of the apparent charge.");
    Ok(())
}
