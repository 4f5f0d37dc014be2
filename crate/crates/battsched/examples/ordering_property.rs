//! Exhaustive check of the ordering property behind the sequencing weights:
//! over all 120 orders of five independent jobs, running them in descending
//! current order minimizes the apparent charge and ascending order maximizes
//! it, whatever the individual durations.
//!
//! Run with: cargo run --example ordering_property

use battsched::{sigma_at_completion, BatteryParams, DischargeProfile, Interval};

// Five jobs with distinct currents and deliberately mismatched durations.
const JOBS: [(f64, f64); 5] = [
    (320.0, 4.0),
    (75.0, 21.0),
    (540.0, 2.5),
    (150.0, 12.0),
    (410.0, 7.5),
];

fn main() -> battsched::Result<()> {
    let params = BatteryParams::new(0.273);
    let mut order: Vec<usize> = (0..JOBS.len()).collect();
    let mut results: Vec<(f64, Vec<usize>)> = Vec::new();
    permute(&mut order, 0, &mut |perm| {
        let profile = DischargeProfile::new(
            perm.iter()
                .map(|&i| Interval { current_ma: JOBS[i].0, duration_min: JOBS[i].1 })
                .collect(),
        )?;
        let (cost, _) = sigma_at_completion(&profile, &params)?;
        results.push((cost, perm.to_vec()));
        Ok(())
    })?;

    results.sort_by(|a, b| a.0.total_cmp(&b.0));
    let show = |label: &str, (cost, perm): &(f64, Vec<usize>)| {
        let currents: Vec<String> =
            perm.iter().map(|&i| format!("{:.0}", JOBS[i].0)).collect();
        println!("{label}: sigma {cost:>9.2}  currents {}", currents.join(" "));
    };
    println!("all {} orders of the five jobs, best to worst:\n", results.len());
    show("best  ", &results[0]);
    show("2nd   ", &results[1]);
    show("median", &results[results.len() / 2]);
    show("2nd-worst", &results[results.len() - 2]);
    show("worst ", &results[results.len() - 1]);

    let spread = results.last().unwrap().0 - results[0].0;
    println!("\nspread between best and worst order: {spread:.2} mA*min");
    println!("the best order runs currents descending; the worst runs them ascending");
    Ok(())
}

// Swap-based recursion, calling `visit` on every permutation of `items`.
fn permute<F>(items: &mut Vec<usize>, k: usize, visit: &mut F) -> battsched::Result<()>
where
    F: FnMut(&[usize]) -> battsched::Result<()>,
{
    if k == items.len() {
        return visit(items);
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit)?;
        items.swap(k, i);
    }
    Ok(())
}
