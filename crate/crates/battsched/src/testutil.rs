//! Shared unit-test fixture: the bundled 15-task fork-join graph.

use crate::battery::BatteryParams;
use crate::format::{parse_graph_file, GraphFile};
use crate::graph::TaskGraph;

pub fn g3_file() -> GraphFile {
    parse_graph_file(include_str!("../data/g3.json")).expect("bundled dataset parses")
}

pub fn g3() -> TaskGraph {
    g3_file().to_graph().expect("bundled dataset validates")
}

pub fn g3_with_deadline(deadline_min: f64) -> TaskGraph {
    let mut file = g3_file();
    file.deadline_min = deadline_min;
    file.to_graph().expect("bundled dataset validates")
}

pub fn g3_params() -> BatteryParams {
    g3_file().battery_params().expect("bundled battery block validates")
}
