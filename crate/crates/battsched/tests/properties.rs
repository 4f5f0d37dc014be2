//! Randomized invariants of the charge model, the sequencer, and the two
//! allocators, checked over many generated inputs.

mod common;

use battsched::{
    list_schedule, min_energy_allocation, schedule, sigma, sigma_at_completion, BatteryParams,
    DischargeProfile, Error, Interval, ScheduleOptions, TaskGraph,
};
use common::{for_each_assignment, random_tasks};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn interval() -> impl Strategy<Value = Interval> {
    (0.0f64..400.0, 0.1f64..40.0)
        .prop_map(|(current_ma, duration_min)| Interval { current_ma, duration_min })
}

fn profile() -> impl Strategy<Value = DischargeProfile> {
    proptest::collection::vec(interval(), 1..6)
        .prop_map(|intervals| DischargeProfile::new(intervals).expect("generated profile is valid"))
}

fn direct_charge(profile: &DischargeProfile) -> f64 {
    profile.intervals().iter().map(|iv| iv.current_ma * iv.duration_min).sum()
}

proptest! {
    // The apparent charge is bounded below by plain coulomb counting.
    #[test]
    fn sigma_never_beats_coulomb_counting(profile in profile()) {
        let params = BatteryParams::new(0.273);
        let direct = direct_charge(&profile);
        let (cost, _) = sigma_at_completion(&profile, &params).unwrap();
        prop_assert!(cost >= direct - 1e-9 * direct.max(1.0));
    }

    // Scaling every current scales the cost by the same factor.
    #[test]
    fn sigma_is_linear_in_the_currents(profile in profile(), scale in 0.05f64..8.0) {
        let params = BatteryParams::new(0.273);
        let t = profile.total_duration();
        let base = sigma(&profile, &params, t).unwrap();
        let scaled_profile = DischargeProfile::new(
            profile
                .intervals()
                .iter()
                .map(|iv| Interval { current_ma: iv.current_ma * scale, duration_min: iv.duration_min })
                .collect(),
        )
        .unwrap();
        let scaled = sigma(&scaled_profile, &params, t).unwrap();
        let want = scale * base;
        prop_assert!(
            (scaled - want).abs() <= 1e-12 * want.abs().max(1e-9),
            "sigma({scale} * I) = {scaled}, {scale} * sigma(I) = {want}"
        );
    }

    // Each interval contributes independently: evaluating the whole profile
    // equals summing per-interval profiles padded with idle time.
    #[test]
    fn sigma_decomposes_over_intervals(profile in profile(), extra in 0.0f64..50.0) {
        let params = BatteryParams::new(0.273);
        let t = profile.total_duration() + extra;
        let whole = sigma(&profile, &params, t).unwrap();

        let mut start = 0.0;
        let mut parts = 0.0;
        for iv in profile.intervals() {
            let mut padded = Vec::new();
            if start > 0.0 {
                padded.push(Interval { current_ma: 0.0, duration_min: start });
            }
            padded.push(*iv);
            let single = DischargeProfile::new(padded).unwrap();
            parts += sigma(&single, &params, t).unwrap();
            start += iv.duration_min;
        }
        prop_assert!(
            (whole - parts).abs() <= 1e-9 * whole.abs().max(1.0),
            "whole {whole} vs sum of parts {parts}"
        );
    }

    // Idle time after the load only ever lowers the apparent charge.
    #[test]
    fn recovery_never_increases_the_cost(profile in profile(), gap in 0.0f64..60.0, rest in 0.0f64..60.0) {
        let params = BatteryParams::new(0.273);
        let t1 = profile.total_duration() + gap;
        let t2 = t1 + rest;
        let early = sigma(&profile, &params, t1).unwrap();
        let late = sigma(&profile, &params, t2).unwrap();
        prop_assert!(late <= early + 1e-9 * early.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // List scheduling always yields a precedence-respecting order, the same
    // one on every call, and doubling all weights changes nothing.
    #[test]
    fn list_schedule_is_topological_and_scale_invariant(seed in any::<u64>(), shift in 0u32..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (tasks, edges, m) = random_tasks(&mut rng);
        let deadline = common::safe_deadline(&tasks, m, &mut rng);
        let graph = TaskGraph::new(tasks, edges, deadline).unwrap();
        let weights: Vec<f64> =
            (0..graph.task_count()).map(|_| rng.gen_range(0..1000) as f64).collect();

        let order = list_schedule(&graph, &weights).unwrap();
        prop_assert!(battsched::is_topological(&graph, &order));
        prop_assert_eq!(&order, &list_schedule(&graph, &weights).unwrap());

        // Powers of two scale exactly, so even ties are preserved.
        let factor = f64::powi(2.0, shift as i32 - 3);
        let scaled: Vec<f64> = weights.iter().map(|w| w * factor).collect();
        prop_assert_eq!(&order, &list_schedule(&graph, &scaled).unwrap());
    }

    // The reference allocation really is a minimum over every feasible
    // assignment, not merely cheap.
    #[test]
    fn dp_allocation_is_minimal_over_all_assignments(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let graph = common::random_instance(&mut rng);
        let deadline = graph.deadline_min();
        let n = graph.task_count();

        let chosen = min_energy_allocation(&graph, deadline).unwrap();
        let energy_of = |cols: &[usize]| -> f64 {
            (0..n).map(|i| graph.current(i, cols[i]) * graph.duration(i, cols[i])).sum()
        };
        let dp_energy = energy_of(&chosen);
        let mut violated = None;
        for_each_assignment(n, graph.columns(), |cols| {
            let total: f64 = (0..n).map(|i| graph.duration(i, cols[i])).sum();
            if total <= deadline && energy_of(cols) < dp_energy && violated.is_none() {
                violated = Some(cols.to_vec());
            }
        });
        prop_assert!(violated.is_none(), "cheaper assignment exists: {violated:?}");
    }

    // Whatever the deadline, the scheduler either meets it or says so, and
    // the cost it reports is reproducible from the schedule it returns.
    #[test]
    fn scheduler_meets_any_deadline_it_accepts(seed in any::<u64>(), tightness in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (tasks, edges, m) = random_tasks(&mut rng);
        let fastest: f64 = tasks.iter().map(|t| t.design_points[0].duration_min).sum();
        let slowest: f64 = tasks.iter().map(|t| t.design_points[m - 1].duration_min).sum();
        let deadline = 0.7 * fastest + tightness * (1.3 * slowest - 0.7 * fastest);
        let graph = TaskGraph::new(tasks, edges, deadline).unwrap();
        let params = BatteryParams::new(0.273);

        match schedule(&graph, &params, &ScheduleOptions::default()) {
            Ok(result) => {
                prop_assert!(result.delta <= deadline + 1e-9);
                let rebuilt = DischargeProfile::new(
                    result
                        .sequence
                        .iter()
                        .map(|id| {
                            let t = graph.index_of(id).unwrap();
                            let c = result.chosen[id];
                            Interval {
                                current_ma: graph.current(t, c),
                                duration_min: graph.duration(t, c),
                            }
                        })
                        .collect(),
                )
                .unwrap();
                let (recomputed, delta) = sigma_at_completion(&rebuilt, &params).unwrap();
                prop_assert!((recomputed - result.sigma).abs() <= 1e-9 * result.sigma.max(1.0));
                prop_assert!((delta - result.delta).abs() <= 1e-9);
            }
            Err(Error::DeadlineInfeasible) => {}
            Err(e) => prop_assert!(false, "unexpected error: {e}"),
        }
    }
}
