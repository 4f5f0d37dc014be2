//! Battery-aware sequencing and operating-point assignment for precedence
//! task graphs.
//!
//! Real batteries deliver less charge under heavy load and recover some
//! apparent charge during light stretches. For a portable device running a
//! DAG of tasks, each offering several (current, duration) operating
//! points, the order of execution and the point chosen per task together
//! decide how much charge the whole run costs. This crate models that cost
//! analytically ([`battery`]), searches for a cheap schedule under a
//! deadline with an iterative sequencing/assignment loop ([`driver`]), and
//! ships a classical energy-minimizing method ([`baseline`]) plus an
//! exhaustive oracle for brackets on tiny instances.
//!
//! The pipeline, bottom to top:
//!
//! * [`battery`]: sigma(T), the apparent charge drawn by time T, for
//!   piecewise-constant discharge profiles; lifetime estimation.
//! * [`graph`]: validated task DAG with per-task operating points.
//! * [`sequence`]: weighted list scheduling over the DAG.
//! * [`allocation`]: window-constrained operating-point assignment scored
//!   by B = SR + CR + ENR + CIF + DPF.
//! * [`driver`]: the iterative loop alternating assignment and
//!   re-sequencing; produces a [`driver::ScheduleResult`].
//! * [`baseline`]: min-energy knapsack + greedy sequencing, and the
//!   brute-force oracle.
//! * [`mod@format`]: the JSON graph file and CSV profile formats.
//!
//! ```
//! use battsched::format::parse_graph_file;
//! use battsched::driver::{schedule, ScheduleOptions};
//!
//! let file = parse_graph_file(include_str!("../data/g3.json")).unwrap();
//! let graph = file.to_graph().unwrap();
//! let params = file.battery_params().unwrap();
//! let result = schedule(&graph, &params, &ScheduleOptions::default()).unwrap();
//! assert!(result.delta <= graph.deadline_min());
//! assert!(result.converged);
//! ```

pub mod allocation;
pub mod baseline;
pub mod battery;
pub mod driver;
pub mod error;
pub mod format;
pub mod graph;
pub mod sequence;

pub use allocation::{
    calculate_dpf, choose_design_points, cif, current_ratio, dpf_formula, energy_ratio,
    evaluate_windows, score_point, slack_ratio, DpfEvaluation, ScoreBreakdown, WindowChoice,
    WindowLog,
};
pub use baseline::{
    baseline_schedule, exhaustive_oracle, min_energy_allocation, BaselineResult, OracleResult,
    DEFAULT_ORACLE_BUDGET,
};
pub use battery::{
    estimate_lifetime, sigma, sigma_at_completion, BatteryParams, DischargeProfile, Interval,
    Lifetime, DEFAULT_SERIES_TERMS,
};
pub use driver::{calculate_battery_cost, schedule, IterationLog, ScheduleOptions, ScheduleResult};
pub use error::{Error, Result};
pub use format::{parse_graph_file, read_graph_file, read_profile_csv, write_profile_csv, GraphFile};
pub use graph::{DesignPoint, Task, TaskGraph};
pub use sequence::{
    baseline_sequence, is_topological, list_schedule, sequence_dec_energy, weighted_sequence,
    WeightMode,
};

#[cfg(test)]
pub(crate) mod testutil;
