//! Task graph with per-task operating points.
//!
//! Each task offers m operating points ordered fastest-first: durations rise
//! strictly with the point index while currents fall strictly, so point 1 is
//! the fastest and hungriest and point m the slowest and most frugal. Columns
//! are 1-based everywhere in this crate, matching how the assignment tables
//! read.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

/// One operating point: average platform current while the task runs, and
/// how long it runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignPoint {
    pub current_ma: f64,
    pub duration_min: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Task {
    pub id: String,
    pub label: Option<String>,
    /// Index 1..m in reports; stored 0-based here.
    pub design_points: Vec<DesignPoint>,
}

/// Immutable, validated DAG. Construction runs the full validity check;
/// every query afterwards may assume the invariants hold.
#[derive(Debug, Clone)]
pub struct TaskGraph {
    tasks: Vec<Task>,
    edges: Vec<(usize, usize)>,
    deadline_min: f64,
    parents: Vec<Vec<usize>>,
    /// Reflexive-transitive reachability per task.
    descendant_sets: Vec<BTreeSet<usize>>,
    /// Non-fatal dataset notes (see `warnings`).
    warnings: Vec<String>,
}

impl TaskGraph {
    /// Validates and builds. Edge endpoints are task ids; violations are
    /// collected and reported together rather than failing on the first.
    pub fn new(tasks: Vec<Task>, edges: Vec<(String, String)>, deadline_min: f64) -> Result<Self> {
        let violations = validate_parts(&tasks, &edges, deadline_min);
        if !violations.is_empty() {
            return Err(Error::InvalidGraph(violations));
        }
        let index: BTreeMap<&str, usize> =
            tasks.iter().enumerate().map(|(i, t)| (t.id.as_str(), i)).collect();
        let n = tasks.len();
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        let mut edge_idx = Vec::with_capacity(edges.len());
        for (p, c) in &edges {
            let pi = index[p.as_str()];
            let ci = index[c.as_str()];
            parents[ci].push(pi);
            children[pi].push(ci);
            edge_idx.push((pi, ci));
        }

        let mut descendant_sets = vec![BTreeSet::new(); n];
        // Children before parents: process in reverse topological order.
        for &v in topo_order(n, &parents).iter().rev() {
            let mut set = BTreeSet::new();
            set.insert(v);
            for &c in &children[v] {
                set.extend(descendant_sets[c].iter().copied());
            }
            descendant_sets[v] = set;
        }

        // Dataset note: the energy-ratio normalization assumes each row's
        // current*duration product peaks at column 1 and bottoms at column m.
        // The two ordering invariants alone do not imply it, so flag rows
        // where it fails; the ratio is clamped downstream either way.
        let mut warnings = Vec::new();
        for t in &tasks {
            let energies: Vec<f64> =
                t.design_points.iter().map(|dp| dp.current_ma * dp.duration_min).collect();
            let first = energies[0];
            let last = energies[energies.len() - 1];
            if energies.iter().any(|&e| e > first || e < last) {
                warnings.push(format!(
                    "task {}: per-point energy is not bracketed by columns 1 and m; energy ratios will be clamped",
                    t.id
                ));
            }
        }

        Ok(Self { tasks, edges: edge_idx, deadline_min, parents, descendant_sets, warnings })
    }

    pub fn task_count(&self) -> usize {
        self.tasks.len()
    }

    /// Number of operating points per task (uniform across the graph).
    pub fn columns(&self) -> usize {
        self.tasks[0].design_points.len()
    }

    pub fn deadline_min(&self) -> f64 {
        self.deadline_min
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn task(&self, idx: usize) -> &Task {
        &self.tasks[idx]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.tasks
            .iter()
            .position(|t| t.id == id)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown task id {id:?}")))
    }

    pub fn parents(&self, idx: usize) -> &[usize] {
        &self.parents[idx]
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Current at a 1-based column.
    pub fn current(&self, task: usize, col: usize) -> f64 {
        self.tasks[task].design_points[col - 1].current_ma
    }

    /// Duration at a 1-based column.
    pub fn duration(&self, task: usize, col: usize) -> f64 {
        self.tasks[task].design_points[col - 1].duration_min
    }

    /// Arithmetic mean of the task's point currents.
    pub fn mean_current(&self, task: usize) -> f64 {
        let dps = &self.tasks[task].design_points;
        dps.iter().map(|dp| dp.current_ma).sum::<f64>() / dps.len() as f64
    }

    /// Arithmetic mean of the task's point energies (current * duration).
    pub fn mean_energy(&self, task: usize) -> f64 {
        let dps = &self.tasks[task].design_points;
        dps.iter().map(|dp| dp.current_ma * dp.duration_min).sum::<f64>() / dps.len() as f64
    }

    /// Task indices sorted by ascending mean energy, ties by id. This is the
    /// order in which tasks get slowed down when a tentative assignment
    /// overshoots the deadline: cheapest first, so the slowdown costs the
    /// least extra energy.
    pub fn energy_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.tasks.len()).collect();
        order.sort_by(|&a, &b| {
            self.mean_energy(a)
                .partial_cmp(&self.mean_energy(b))
                .unwrap()
                .then_with(|| self.tasks[a].id.cmp(&self.tasks[b].id))
        });
        order
    }

    /// All tasks reachable from `task`, itself included.
    pub fn descendants(&self, task: usize) -> &BTreeSet<usize> {
        &self.descendant_sets[task]
    }

    /// Id-based variant of `descendants` for callers working with names.
    pub fn descendants_of(&self, id: &str) -> Result<BTreeSet<String>> {
        let idx = self.index_of(id)?;
        Ok(self.descendant_sets[idx].iter().map(|&i| self.tasks[i].id.clone()).collect())
    }

    /// Smallest and largest current over every task and column.
    pub fn current_extremes(&self) -> (f64, f64) {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for t in &self.tasks {
            for dp in &t.design_points {
                min = min.min(dp.current_ma);
                max = max.max(dp.current_ma);
            }
        }
        (min, max)
    }

    /// Energy with every task at column m (lower bound) and at column 1
    /// (upper bound); the normalization anchors for energy ratios.
    pub fn energy_bounds(&self) -> (f64, f64) {
        let m = self.columns();
        let emin = self.tasks.iter().map(|t| {
            let dp = &t.design_points[m - 1];
            dp.current_ma * dp.duration_min
        }).sum();
        let emax = self.tasks.iter().map(|t| {
            let dp = &t.design_points[0];
            dp.current_ma * dp.duration_min
        }).sum();
        (emin, emax)
    }

    /// Completion time with every task at the given 1-based column; the
    /// schedule is serial, so it is a plain sum.
    pub fn column_total_duration(&self, col: usize) -> f64 {
        self.tasks.iter().map(|t| t.design_points[col - 1].duration_min).sum()
    }
}

/// Checks every construction invariant and lists what fails. An empty list
/// means the parts form a valid graph.
pub fn validate_parts(tasks: &[Task], edges: &[(String, String)], deadline_min: f64) -> Vec<String> {
    let mut v = Vec::new();
    if tasks.is_empty() {
        v.push("graph has no tasks".to_string());
        return v;
    }
    if !(deadline_min.is_finite() && deadline_min > 0.0) {
        v.push(format!("deadline must be positive and finite, got {deadline_min}"));
    }

    let mut seen = BTreeSet::new();
    for t in tasks {
        if !seen.insert(t.id.as_str()) {
            v.push(format!("duplicate task id {:?}", t.id));
        }
    }

    let m = tasks[0].design_points.len();
    for t in tasks {
        let dps = &t.design_points;
        if dps.is_empty() {
            v.push(format!("task {}: no design points", t.id));
            continue;
        }
        if dps.len() != m {
            v.push(format!(
                "task {}: {} design points, expected {m} (uniform across the graph)",
                t.id,
                dps.len()
            ));
        }
        for (j, dp) in dps.iter().enumerate() {
            if !(dp.current_ma.is_finite() && dp.current_ma > 0.0) {
                v.push(format!("task {}: point {}: current must be positive, got {}", t.id, j + 1, dp.current_ma));
            }
            if !(dp.duration_min.is_finite() && dp.duration_min > 0.0) {
                v.push(format!("task {}: point {}: duration must be positive, got {}", t.id, j + 1, dp.duration_min));
            }
        }
        for w in dps.windows(2) {
            // NaN must count as a violation, so compare for the good case.
            let rises = w[0].duration_min < w[1].duration_min;
            if !rises {
                v.push(format!("task {}: durations must rise strictly with the point index", t.id));
                break;
            }
        }
        for w in dps.windows(2) {
            let falls = w[0].current_ma > w[1].current_ma;
            if !falls {
                v.push(format!("task {}: currents must fall strictly with the point index", t.id));
                break;
            }
        }
    }

    let index: BTreeMap<&str, usize> =
        tasks.iter().enumerate().map(|(i, t)| (t.id.as_str(), i)).collect();
    let mut seen_edges = BTreeSet::new();
    let n = tasks.len();
    let mut parents = vec![Vec::new(); n];
    let mut edges_ok = true;
    for (p, c) in edges {
        let (pi, ci) = match (index.get(p.as_str()), index.get(c.as_str())) {
            (Some(&pi), Some(&ci)) => (pi, ci),
            _ => {
                v.push(format!("edge {p:?} -> {c:?} references a missing task"));
                edges_ok = false;
                continue;
            }
        };
        if pi == ci {
            v.push(format!("self-loop on task {p:?}"));
            edges_ok = false;
            continue;
        }
        if !seen_edges.insert((pi, ci)) {
            v.push(format!("duplicate edge {p:?} -> {c:?}"));
            continue;
        }
        parents[ci].push(pi);
    }

    if edges_ok {
        if let Some(cycle) = find_cycle(n, &parents) {
            let ids: Vec<&str> = cycle.iter().map(|&i| tasks[i].id.as_str()).collect();
            v.push(format!("cycle: {}", ids.join(" -> ")));
        }
    }
    v
}

/// Kahn's algorithm; assumes acyclicity (checked during validation).
fn topo_order(n: usize, parents: &[Vec<usize>]) -> Vec<usize> {
    let mut indeg: Vec<usize> = parents.iter().map(Vec::len).collect();
    let mut children = vec![Vec::new(); n];
    for (c, ps) in parents.iter().enumerate() {
        for &p in ps {
            children[p].push(c);
        }
    }
    let mut ready: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = ready.pop() {
        order.push(v);
        for &c in &children[v] {
            indeg[c] -= 1;
            if indeg[c] == 0 {
                ready.push(c);
            }
        }
    }
    order
}

/// Returns the members of one cycle if the parent relation has any.
fn find_cycle(n: usize, parents: &[Vec<usize>]) -> Option<Vec<usize>> {
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; n];
    let mut stack = Vec::new();
    fn dfs(v: usize, parents: &[Vec<usize>], state: &mut [u8], stack: &mut Vec<usize>) -> Option<Vec<usize>> {
        state[v] = 1;
        stack.push(v);
        for &p in &parents[v] {
            match state[p] {
                0 => {
                    if let Some(c) = dfs(p, parents, state, stack) {
                        return Some(c);
                    }
                }
                1 => {
                    let pos = stack.iter().position(|&x| x == p).unwrap();
                    return Some(stack[pos..].to_vec());
                }
                _ => {}
            }
        }
        stack.pop();
        state[v] = 2;
        None
    }
    for v in 0..n {
        if state[v] == 0 {
            if let Some(c) = dfs(v, parents, &mut state, &mut stack) {
                return Some(c);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::g3;

    #[test]
    fn g3_is_valid() {
        let g = g3();
        assert_eq!(g.task_count(), 15);
        assert_eq!(g.columns(), 5);
        assert!(g.warnings().is_empty());
    }

    #[test]
    fn cycle_is_reported_with_members() {
        let t = |id: &str| Task {
            id: id.into(),
            label: None,
            design_points: vec![DesignPoint { current_ma: 10.0, duration_min: 1.0 }],
        };
        let err = TaskGraph::new(
            vec![t("A"), t("B")],
            vec![("A".into(), "B".into()), ("B".into(), "A".into())],
            5.0,
        )
        .unwrap_err();
        match err {
            Error::InvalidGraph(v) => assert!(v.iter().any(|s| s.contains("cycle"))),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn duration_ordering_is_enforced() {
        let bad = Task {
            id: "A".into(),
            label: None,
            design_points: vec![
                DesignPoint { current_ma: 10.0, duration_min: 5.0 },
                DesignPoint { current_ma: 4.0, duration_min: 4.0 },
            ],
        };
        let v = validate_parts(&[bad], &[], 10.0);
        assert!(v.iter().any(|s| s.contains("durations must rise")));
    }

    #[test]
    fn g3_means() {
        let g = g3();
        let t4 = g.index_of("T4").unwrap();
        let t2 = g.index_of("T2").unwrap();
        let t5 = g.index_of("T5").unwrap();
        let t15 = g.index_of("T15").unwrap();
        assert!((g.mean_current(t4) - 393.4).abs() < 1e-9);
        assert!((g.mean_current(t2) - 217.8).abs() < 1e-9);
        assert!((g.mean_energy(t5) - 1893.2).abs() < 1e-9);
        assert!((g.mean_energy(t15) - 763.3).abs() < 1e-9);
    }

    #[test]
    fn g3_energy_order_starts_with_cheap_sinks() {
        let g = g3();
        let ids: Vec<&str> = g.energy_order().into_iter().map(|i| g.task(i).id.as_str()).collect();
        assert_eq!(
            ids,
            ["T15", "T14", "T12", "T13", "T9", "T5", "T8", "T11", "T3", "T6", "T10", "T4", "T7", "T2", "T1"]
        );
    }

    #[test]
    fn g3_descendants() {
        let g = g3();
        let d14 = g.descendants_of("T14").unwrap();
        assert_eq!(d14, ["T14", "T15"].iter().map(|s| s.to_string()).collect());
        let d8 = g.descendants_of("T8").unwrap();
        assert_eq!(d8.len(), 8);
        for id in ["T8", "T9", "T10", "T11", "T12", "T13", "T14", "T15"] {
            assert!(d8.contains(id));
        }
        let sink = g.descendants_of("T15").unwrap();
        assert_eq!(sink.len(), 1);
    }

    #[test]
    fn g3_extremes_and_bounds() {
        let g = g3();
        assert_eq!(g.current_extremes(), (14.0, 938.0));
        let (emin, emax) = g.energy_bounds();
        assert!((emin - 6044.0).abs() < 1e-9);
        assert!((emax - 55322.2).abs() < 1e-9);
    }

    #[test]
    fn g3_column_totals() {
        let g = g3();
        let expect = [85.2, 131.5, 175.5, 219.3, 258.0];
        for (k, &e) in expect.iter().enumerate() {
            assert!((g.column_total_duration(k + 1) - e).abs() < 1e-9);
        }
    }
}
