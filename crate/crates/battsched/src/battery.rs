//! Analytical battery discharge model for piecewise-constant load profiles.
//!
//! The model tracks the apparent charge sigma(T) drawn from the cell by time
//! T. A constant load I over [t, t + D] contributes its direct charge I * D
//! plus a transient term that decays once the interval ends, which is how the
//! model captures charge recovery during lighter loads or idle stretches:
//!
//! ```text
//! sigma(T) = sum over intervals k of
//!     I_k * ( D_k + 2 * sum_{j=1..terms} (e^(-b^2 j^2 (T - t_k - D_k)) - e^(-b^2 j^2 (T - t_k))) / (b^2 j^2) )
//! ```
//!
//! `b` (beta) is the cell's diffusion parameter; larger values mean faster
//! recovery and as b grows the series vanishes, leaving plain coulomb
//! counting. The battery is exhausted when sigma reaches the available
//! charge alpha.

use crate::error::{Error, Result};

/// One constant-current stretch of a discharge profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub current_ma: f64,
    pub duration_min: f64,
}

/// Ordered back-to-back intervals; interval k occupies
/// [t_k, t_k + D_k) with t_0 = 0 and t_{k+1} = t_k + D_k.
/// A rest is expressed as an explicit 0 mA interval.
#[derive(Debug, Clone, PartialEq)]
pub struct DischargeProfile {
    intervals: Vec<Interval>,
}

impl DischargeProfile {
    /// Builds a profile, rejecting non-positive durations and negative or
    /// non-finite currents.
    pub fn new(intervals: Vec<Interval>) -> Result<Self> {
        for (k, iv) in intervals.iter().enumerate() {
            if !iv.duration_min.is_finite() || iv.duration_min <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "interval {k}: duration must be positive and finite, got {}",
                    iv.duration_min
                )));
            }
            if !iv.current_ma.is_finite() || iv.current_ma < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "interval {k}: current must be non-negative and finite, got {}",
                    iv.current_ma
                )));
            }
        }
        Ok(Self { intervals })
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn total_duration(&self) -> f64 {
        self.intervals.iter().map(|iv| iv.duration_min).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

/// Model constants. `series_terms` is the truncation point of the transient
/// series; ten terms are enough for the profiles this crate deals with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatteryParams {
    pub beta: f64,
    /// Total available charge in mA*min, if known. Only `estimate_lifetime`
    /// needs it.
    pub alpha_ma_min: Option<f64>,
    pub series_terms: u32,
}

pub const DEFAULT_SERIES_TERMS: u32 = 10;

impl BatteryParams {
    pub fn new(beta: f64) -> Self {
        Self { beta, alpha_ma_min: None, series_terms: DEFAULT_SERIES_TERMS }
    }

    /// Rejects non-positive beta or alpha and a zero-term series. Called by
    /// every evaluation; exposed so file ingestion can fail fast.
    pub fn validate(&self) -> Result<()> {
        if !self.beta.is_finite() || self.beta <= 0.0 {
            return Err(Error::InvalidArgument(format!("beta must be positive, got {}", self.beta)));
        }
        if self.series_terms == 0 {
            return Err(Error::InvalidArgument("series_terms must be at least 1".into()));
        }
        if let Some(a) = self.alpha_ma_min {
            if !a.is_finite() || a <= 0.0 {
                return Err(Error::InvalidArgument(format!("alpha must be positive, got {a}")));
            }
        }
        Ok(())
    }
}

/// Apparent charge drawn by time `t_eval`.
///
/// Intervals starting at or after `t_eval` are dropped and an interval
/// straddling it is clipped, so the profile seen by the model always ends by
/// `t_eval`. Exponent arguments are non-negative by construction; they are
/// clamped at zero anyway to absorb rounding.
pub fn sigma(profile: &DischargeProfile, params: &BatteryParams, t_eval: f64) -> Result<f64> {
    params.validate()?;
    if !t_eval.is_finite() || t_eval < 0.0 {
        return Err(Error::InvalidArgument(format!("evaluation time must be non-negative, got {t_eval}")));
    }
    let b2 = params.beta * params.beta;
    let mut total = 0.0;
    let mut start = 0.0;
    for iv in &profile.intervals {
        if start >= t_eval {
            break;
        }
        let end = (start + iv.duration_min).min(t_eval);
        let dur = end - start;
        let mut acc = dur;
        for j in 1..=params.series_terms {
            let a = b2 * (j as f64) * (j as f64);
            let after_end = (t_eval - end).max(0.0);
            let after_start = (t_eval - start).max(0.0);
            acc += 2.0 * ((-a * after_end).exp() - (-a * after_start).exp()) / a;
        }
        total += iv.current_ma * acc;
        start += iv.duration_min;
    }
    Ok(total)
}

/// Charge drawn by the moment the profile finishes, paired with that finish
/// time. This is the cost a schedule is judged by: the final interval's
/// transient has had no time to decay.
pub fn sigma_at_completion(profile: &DischargeProfile, params: &BatteryParams) -> Result<(f64, f64)> {
    if profile.is_empty() {
        return Err(Error::InvalidArgument("profile has no intervals".into()));
    }
    let total = profile.total_duration();
    Ok((sigma(profile, params, total)?, total))
}

/// Outcome of a lifetime estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lifetime {
    /// The battery hits its charge limit this many minutes in.
    Reached(f64),
    /// sigma never reaches alpha before the profile ends.
    SurvivesProfile,
}

/// First time sigma crosses alpha, located by a coarse forward scan followed
/// by bisection down to 1e-3 minutes. Requires `alpha_ma_min`.
pub fn estimate_lifetime(profile: &DischargeProfile, params: &BatteryParams) -> Result<Lifetime> {
    params.validate()?;
    let alpha = params
        .alpha_ma_min
        .ok_or_else(|| Error::InvalidArgument("alpha (available charge) is required".into()))?;
    if profile.is_empty() {
        return Err(Error::InvalidArgument("profile has no intervals".into()));
    }
    let total = profile.total_duration();
    if sigma(profile, params, total)? < alpha {
        return Ok(Lifetime::SurvivesProfile);
    }
    const SCAN_STEPS: u32 = 1000;
    let step = total / f64::from(SCAN_STEPS);
    let mut lo = 0.0;
    let mut hi = total;
    for k in 1..=SCAN_STEPS {
        let t = if k == SCAN_STEPS { total } else { f64::from(k) * step };
        if sigma(profile, params, t)? >= alpha {
            hi = t;
            break;
        }
        lo = t;
    }
    while hi - lo > 1e-3 {
        let mid = 0.5 * (lo + hi);
        if sigma(profile, params, mid)? >= alpha {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Lifetime::Reached(hi))
}
