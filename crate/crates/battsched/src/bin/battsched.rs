//! Command-line front end: validate graph files, run the scheduler or the
//! reference method, compare them across deadlines, and export discharge
//! profiles and lifetime estimates.
//!
//! Exit codes: 0 success, 2 input error (parse/validation/arguments),
//! 3 infeasible deadline, 1 internal error.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use battsched::baseline::{baseline_schedule, exhaustive_oracle, DEFAULT_ORACLE_BUDGET};
use battsched::battery::{estimate_lifetime, BatteryParams, DischargeProfile, Interval, Lifetime};
use battsched::driver::{schedule, ScheduleOptions, ScheduleResult};
use battsched::error::Error;
use battsched::format::{read_graph_file, write_profile_csv, GraphFile};
use battsched::graph::TaskGraph;
use battsched::sequence::WeightMode;

#[derive(Parser)]
#[command(
    name = "battsched",
    about = "Battery-aware task sequencing and operating-point assignment",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a graph file and print "ok" or the violations.
    Validate { file: PathBuf },
    /// Run the iterative scheduler and report the chosen schedule.
    Schedule {
        file: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        /// Safety cap on loop passes.
        #[arg(long, default_value_t = 50)]
        max_iterations: usize,
        /// Statistic weighting the initial sequence.
        #[arg(long, value_enum, default_value_t = WeightModeArg::Current)]
        weight_mode: WeightModeArg,
        #[command(flatten)]
        output: Output,
    },
    /// Run the reference method (min-energy allocation + greedy sequence).
    Baseline {
        file: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        #[command(flatten)]
        output: Output,
    },
    /// Run both methods per deadline and tabulate the costs.
    Compare {
        file: PathBuf,
        /// Deadlines to evaluate (defaults to the file's deadline).
        #[arg(long, value_delimiter = ',')]
        deadlines: Vec<f64>,
        /// Override the file's battery beta.
        #[arg(long)]
        beta: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Emit the final schedule's discharge profile as CSV.
    Profile {
        file: PathBuf,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate battery lifetime under the final schedule's profile.
    Lifetime {
        file: PathBuf,
        /// Available charge in mA*min (falls back to the file's
        /// battery.alpha_mA_min).
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Exhaustively enumerate tiny instances and report best/worst costs.
    Oracle {
        file: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        /// Cap on orders x assignments to enumerate.
        #[arg(long, default_value_t = DEFAULT_ORACLE_BUDGET)]
        budget: u64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args)]
struct Overrides {
    /// Override the file's deadline, minutes.
    #[arg(long)]
    deadline: Option<f64>,
    /// Override the file's battery beta.
    #[arg(long)]
    beta: Option<f64>,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightModeArg {
    Current,
    Energy,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::DeadlineInfeasible => 3,
                Error::Internal(_) => 1,
                _ => 2,
            })
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Validate { file } => {
            let graph_file = read_graph_file(&file)?;
            let graph = graph_file.to_graph()?;
            graph_file.battery_params()?;
            for w in graph.warnings() {
                eprintln!("warning: {w}");
            }
            println!("ok");
            Ok(())
        }
        Command::Schedule { file, overrides, max_iterations, weight_mode, output } => {
            let (graph, params, graph_file) = load(&file, &overrides)?;
            let options = ScheduleOptions {
                max_iterations,
                weight_mode: match weight_mode {
                    WeightModeArg::Current => WeightMode::MeanCurrent,
                    WeightModeArg::Energy => WeightMode::MeanEnergy,
                },
            };
            let result = schedule(&graph, &params, &options)?;
            let text = match output.format {
                Format::Json => pretty(schedule_json(&graph_file.name, &graph, &params, &result)),
                Format::Table => schedule_table(&graph_file.name, &graph, &result),
            };
            emit(&output.out, &text)
        }
        Command::Baseline { file, overrides, output } => {
            let (graph, params, graph_file) = load(&file, &overrides)?;
            let result = baseline_schedule(&graph, &params)?;
            let value = json!({
                "name": graph_file.name,
                "deadline_min": graph.deadline_min(),
                "beta": params.beta,
                "sequence": result.sequence,
                "chosen": result.chosen,
                "sigma_mA_min": result.sigma,
                "delta_min": result.delta,
                "total_energy_mA_min": result.total_energy,
            });
            let text = match output.format {
                Format::Json => pretty(value),
                Format::Table => {
                    let mut t = String::new();
                    t += &format!(
                        "{}  deadline {} min  beta {}\n",
                        graph_file.name,
                        graph.deadline_min(),
                        params.beta
                    );
                    t += &format!("sequence: {}\n", result.sequence.join(" "));
                    t += "task  column\n";
                    for id in &result.sequence {
                        t += &format!("{:<5} {}\n", id, result.chosen[id]);
                    }
                    t += &format!(
                        "sigma {:.3} mA*min  delta {:.1} min  energy {:.1} mA*min\n",
                        result.sigma, result.delta, result.total_energy
                    );
                    t
                }
            };
            emit(&output.out, &text)
        }
        Command::Compare { file, deadlines, beta, output } => {
            let graph_file = read_graph_file(&file)?;
            let deadlines = if deadlines.is_empty() {
                vec![graph_file.deadline_min]
            } else {
                deadlines
            };
            let mut rows = Vec::new();
            let mut feasible = 0usize;
            for &d in &deadlines {
                let overrides = Overrides { deadline: Some(d), beta };
                let (graph, params, _) = load(&file, &overrides)?;
                let ours = schedule(&graph, &params, &ScheduleOptions::default());
                let reference = baseline_schedule(&graph, &params);
                match (ours, reference) {
                    (Ok(a), Ok(b)) => {
                        feasible += 1;
                        // How much more charge the reference method draws,
                        // relative to ours.
                        let pct = (b.sigma - a.sigma) / a.sigma * 100.0;
                        rows.push(json!({
                            "deadline_min": d,
                            "sigma_mA_min": a.sigma,
                            "baseline_sigma_mA_min": b.sigma,
                            "pct_diff": pct,
                        }));
                    }
                    (Err(Error::DeadlineInfeasible), _) | (_, Err(Error::DeadlineInfeasible)) => {
                        rows.push(json!({ "deadline_min": d, "infeasible": true }));
                    }
                    (Err(e), _) | (_, Err(e)) => return Err(e),
                }
            }
            if feasible == 0 {
                return Err(Error::DeadlineInfeasible);
            }
            let text = match output.format {
                Format::Json => pretty(json!({ "name": graph_file.name, "rows": rows })),
                Format::Table => {
                    let mut t = String::new();
                    t += "deadline_min  sigma_ours  sigma_baseline  pct_diff\n";
                    for row in &rows {
                        let d = row["deadline_min"].as_f64().unwrap();
                        if row.get("infeasible").is_some() {
                            t += &format!("{d:<13} infeasible\n");
                        } else {
                            t += &format!(
                                "{d:<13} {:<11.1} {:<15.1} {:.1}\n",
                                row["sigma_mA_min"].as_f64().unwrap(),
                                row["baseline_sigma_mA_min"].as_f64().unwrap(),
                                row["pct_diff"].as_f64().unwrap(),
                            );
                        }
                    }
                    t
                }
            };
            emit(&output.out, &text)
        }
        Command::Profile { file, out } => {
            let overrides = Overrides { deadline: None, beta: None };
            let (graph, params, _) = load(&file, &overrides)?;
            let result = schedule(&graph, &params, &ScheduleOptions::default())?;
            let profile = result_profile(&graph, &result)?;
            let mut buf = Vec::new();
            write_profile_csv(&mut buf, &profile)?;
            let text = String::from_utf8(buf).expect("csv output is utf-8");
            emit(&out, &text)
        }
        Command::Lifetime { file, alpha } => {
            let overrides = Overrides { deadline: None, beta: None };
            let (graph, mut params, _) = load(&file, &overrides)?;
            if let Some(a) = alpha {
                params.alpha_ma_min = Some(a);
            }
            if params.alpha_ma_min.is_none() {
                return Err(Error::InvalidArgument(
                    "no available charge given: pass --alpha or set battery.alpha_mA_min".into(),
                ));
            }
            let result = schedule(&graph, &params, &ScheduleOptions::default())?;
            let profile = result_profile(&graph, &result)?;
            match estimate_lifetime(&profile, &params)? {
                Lifetime::SurvivesProfile => println!("survives-profile"),
                Lifetime::Reached(t) => println!("lifetime_min: {t:.3}"),
            }
            Ok(())
        }
        Command::Oracle { file, overrides, budget, output } => {
            let (graph, params, graph_file) = load(&file, &overrides)?;
            let result = exhaustive_oracle(&graph, &params, budget)?;
            let value = json!({
                "name": graph_file.name,
                "deadline_min": graph.deadline_min(),
                "enumerated": result.enumerated,
                "best_sigma_mA_min": result.best_sigma,
                "worst_sigma_mA_min": result.worst_sigma,
                "best_sequence": result.best_sequence,
                "best_chosen": result.best_chosen,
            });
            let text = match output.format {
                Format::Json => pretty(value),
                Format::Table => format!(
                    "enumerated {} feasible configurations\nbest  sigma {:.3} mA*min  sequence {}\nworst sigma {:.3} mA*min\n",
                    result.enumerated,
                    result.best_sigma,
                    result.best_sequence.join(" "),
                    result.worst_sigma,
                ),
            };
            emit(&output.out, &text)
        }
    }
}

/// Loads a graph file and applies flag overrides; flags win over file
/// fields.
fn load(path: &std::path::Path, overrides: &Overrides) -> Result<(TaskGraph, BatteryParams, GraphFile), Error> {
    let mut file = read_graph_file(path)?;
    if let Some(d) = overrides.deadline {
        file.deadline_min = d;
    }
    if let Some(b) = overrides.beta {
        file.battery.beta = b;
    }
    let graph = file.to_graph()?;
    let params = file.battery_params()?;
    for w in graph.warnings() {
        eprintln!("warning: {w}");
    }
    Ok((graph, params, file))
}

fn result_profile(graph: &TaskGraph, result: &ScheduleResult) -> Result<DischargeProfile, Error> {
    let mut intervals = Vec::with_capacity(result.sequence.len());
    for id in &result.sequence {
        let t = graph.index_of(id)?;
        let c = result.chosen[id];
        intervals.push(Interval {
            current_ma: graph.current(t, c),
            duration_min: graph.duration(t, c),
        });
    }
    DischargeProfile::new(intervals)
}

fn schedule_json(
    name: &str,
    graph: &TaskGraph,
    params: &BatteryParams,
    result: &ScheduleResult,
) -> Value {
    let mut start = 0.0f64;
    let rows: Vec<Value> = result
        .sequence
        .iter()
        .map(|id| {
            let t = graph.index_of(id).expect("result ids come from the graph");
            let c = result.chosen[id];
            let row = json!({
                "id": id,
                "column": c,
                "current_mA": graph.current(t, c),
                "duration_min": graph.duration(t, c),
                "start_min": start,
            });
            start += graph.duration(t, c);
            row
        })
        .collect();
    let iterations: Vec<Value> = result
        .iterations
        .iter()
        .map(|it| {
            let windows: Vec<Value> = it
                .windows
                .iter()
                .map(|w| {
                    json!({
                        "window_start": w.window_start,
                        "sigma_mA_min": w.sigma,
                        "delta_min": w.delta,
                    })
                })
                .collect();
            json!({
                "iteration": it.iteration,
                "sequence": it.sequence,
                "windows": windows,
                "window_best_sigma": it.window_best_sigma,
                "resequenced_sigma": it.resequenced_sigma,
                "best_sigma": it.best_sigma,
                "delta_min": it.delta,
            })
        })
        .collect();
    json!({
        "name": name,
        "deadline_min": graph.deadline_min(),
        "beta": params.beta,
        "series_terms": params.series_terms,
        "sequence": result.sequence,
        "schedule": rows,
        "sigma_mA_min": result.sigma,
        "delta_min": result.delta,
        "iterations": iterations,
        "converged": result.converged,
    })
}

fn schedule_table(name: &str, graph: &TaskGraph, result: &ScheduleResult) -> String {
    let mut t = String::new();
    t += &format!("{name}  deadline {} min\n", graph.deadline_min());
    t += &format!("sequence: {}\n\n", result.sequence.join(" "));
    t += "task   column  current_mA  duration_min  start_min\n";
    let mut start = 0.0f64;
    for id in &result.sequence {
        let ti = graph.index_of(id).expect("result ids come from the graph");
        let c = result.chosen[id];
        t += &format!(
            "{:<6} {:<7} {:<11} {:<13} {:.1}\n",
            id,
            c,
            graph.current(ti, c),
            graph.duration(ti, c),
            start
        );
        start += graph.duration(ti, c);
    }
    t += "\niteration  window  sigma_mA_min  delta_min\n";
    let m = graph.columns();
    for it in &result.iterations {
        for w in &it.windows {
            match (w.sigma, w.delta) {
                (Some(s), Some(d)) => {
                    t += &format!(
                        "{:<10} {:<7} {:<13.1} {:.1}\n",
                        it.iteration,
                        format!("{}:{m}", w.window_start),
                        s,
                        d
                    );
                }
                _ => {
                    t += &format!(
                        "{:<10} {:<7} infeasible\n",
                        it.iteration,
                        format!("{}:{m}", w.window_start)
                    );
                }
            }
        }
        t += &format!(
            "{:<10} best {:.1} (windows {:.1}, resequenced {:.1})\n",
            it.iteration, it.best_sigma, it.window_best_sigma, it.resequenced_sigma
        );
    }
    t += &format!(
        "\nfinal: sigma {:.3} mA*min  delta {:.1} min  iterations {}  converged {}\n",
        result.sigma,
        result.delta,
        result.iterations.len(),
        if result.converged { "yes" } else { "no" }
    );
    t
}

fn pretty(value: Value) -> String {
    let mut s = serde_json::to_string_pretty(&value).expect("report serializes");
    s.push('\n');
    s
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(Error::from),
        None => {
            std::io::stdout().write_all(text.as_bytes()).map_err(Error::from)?;
            Ok(())
        }
    }
}
