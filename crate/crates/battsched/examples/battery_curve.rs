//! The charge model on a hand-built load profile: rate capacity, recovery
//! during a rest, and a lifetime estimate.
//!
//! Run with: cargo run --example battery_curve

use battsched::{
    estimate_lifetime, sigma, sigma_at_completion, BatteryParams, DischargeProfile, Interval,
    Lifetime,
};

fn main() -> battsched::Result<()> {
    // A heavy burst, a rest, then a light tail.
    let profile = DischargeProfile::new(vec![
        Interval { current_ma: 500.0, duration_min: 10.0 },
        Interval { current_ma: 0.0, duration_min: 5.0 },
        Interval { current_ma: 120.0, duration_min: 20.0 },
    ])?;
    let params = BatteryParams::new(0.273);

    let direct: f64 = profile
        .intervals()
        .iter()
        .map(|iv| iv.current_ma * iv.duration_min)
        .sum();
    let (cost, delta) = sigma_at_completion(&profile, &params)?;
    println!("profile: 500 mA x 10 min, rest 5 min, 120 mA x 20 min");
    println!("direct charge (sum I*D):     {direct:.1} mA*min");
    println!("apparent charge at t={delta}: {cost:.1} mA*min");
    println!("nonlinearity overhead:       {:.1} mA*min\n", cost - direct);

    // Once the load ends the transient decays and sigma falls back toward
    // the direct charge: the battery recovers.
    println!("recovery after the profile ends:");
    for t in [35.0, 40.0, 50.0, 80.0] {
        let s = sigma(&profile, &params, t)?;
        println!("  sigma({t:>4}) = {s:.1} mA*min");
    }

    // A near-ideal cell (large beta) shows no overhead at all.
    let ideal = BatteryParams::new(50.0);
    let (ideal_cost, _) = sigma_at_completion(&profile, &ideal)?;
    println!("\nsame profile, beta = 50: sigma = {ideal_cost:.1} mA*min (over {direct:.1} direct)");

    // Lifetime: when does the apparent charge hit the available capacity?
    let mut limited = params;
    limited.alpha_ma_min = Some(6000.0);
    match estimate_lifetime(&profile, &limited)? {
        Lifetime::Reached(t) => println!("\nwith alpha = 6000 mA*min the battery dies {t:.3} min in"),
        Lifetime::SurvivesProfile => println!("\nalpha = 6000 mA*min outlasts the profile"),
    }
    Ok(())
}
