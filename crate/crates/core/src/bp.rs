//! Age-dependent branching process with offspring `B` and life-lengths `X`,
//! used as a finite probe of explosiveness.
//!
//! Every individual lives for an i.i.d. time drawn from the excess-weight
//! law and, at death, produces an i.i.d. number of children. Explosion is
//! observed through its finite proxy: the total number of births exceeding
//! a cap before the horizon.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::io::Write;

use rand::Rng;
use serde::Serialize;

use crate::distributions::{ExcessWeightLaw, SizeBiasedLaw};
use crate::error::{Error, Result};
use crate::rng::{replication_seed, stream, stream_rng};
use crate::Real;
use crate::CSV_VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum BpOutcome<T> {
    /// More than `cap` individuals were born by this time.
    CapHit { time: T },
    /// The process died out or stayed below the cap up to the horizon.
    ExtinctOrQuiet,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchingRun<T> {
    pub horizon: T,
    pub cap: u64,
    pub outcome: BpOutcome<T>,
    /// Individuals born, the root included.
    pub births: u64,
}

impl<T: Real> BranchingRun<T> {
    pub fn cap_hit_time(&self) -> Option<T> {
        match self.outcome {
            BpOutcome::CapHit { time } => Some(time),
            BpOutcome::ExtinctOrQuiet => None,
        }
    }
}

/// Death time in a min-heap; times are never NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Time<T>(T);

impl<T: Real> Eq for Time<T> {}

impl<T: Real> PartialOrd for Time<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Real> Ord for Time<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.partial_cmp(&other.0).unwrap_or(Ordering::Equal)
    }
}

fn check_args<T: Real>(horizon: T, cap: u64) -> Result<()> {
    if !(horizon > T::zero()) {
        return Err(Error::param(format!("horizon {horizon} must be positive")));
    }
    if cap == 0 {
        return Err(Error::param("cap must be at least 1"));
    }
    Ok(())
}

pub fn simulate_bp<T: Real>(
    offspring: &SizeBiasedLaw<T>,
    lifetime: &ExcessWeightLaw<T>,
    horizon: T,
    cap: u64,
    seed: u64,
) -> Result<BranchingRun<T>> {
    check_args(horizon, cap)?;
    let mut rng = stream_rng(seed, stream::BRANCHING);
    Ok(run(offspring, lifetime, horizon, cap, &mut rng))
}

fn run<T: Real, R: Rng + ?Sized>(
    offspring: &SizeBiasedLaw<T>,
    lifetime: &ExcessWeightLaw<T>,
    horizon: T,
    cap: u64,
    rng: &mut R,
) -> BranchingRun<T> {
    let mut births: u64 = 1;
    let mut pending = BinaryHeap::new();
    let first = lifetime.sample(rng);
    if first <= horizon {
        pending.push(Reverse(Time(first)));
    }
    let outcome = loop {
        let Some(Reverse(Time(t))) = pending.pop() else {
            break BpOutcome::ExtinctOrQuiet;
        };
        let children = offspring.sample(rng);
        births = births.saturating_add(children);
        if births > cap {
            break BpOutcome::CapHit { time: t };
        }
        for _ in 0..children {
            // children dying after the horizon cannot reproduce in time
            let death = t + lifetime.sample(rng);
            if death <= horizon {
                pending.push(Reverse(Time(death)));
            }
        }
    };
    BranchingRun {
        horizon,
        cap,
        outcome,
        births,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeRow<T> {
    pub horizon: T,
    pub reps: usize,
    pub cap: u64,
    pub cap_hit_frequency: T,
}

/// Cap-hit frequency at each horizon. Each replication is simulated once to
/// the largest horizon; its cap-hit time then decides every smaller one,
/// which makes the frequencies nondecreasing in the horizon. Replication
/// seeds do not depend on the cap, so frequencies are also nonincreasing in
/// the cap for a fixed seed.
pub fn explosion_probe<T: Real>(
    offspring: &SizeBiasedLaw<T>,
    lifetime: &ExcessWeightLaw<T>,
    horizons: &[T],
    cap: u64,
    reps: usize,
    seed: u64,
) -> Result<Vec<ProbeRow<T>>> {
    let Some(max_h) = horizons.iter().copied().reduce(T::max) else {
        return Err(Error::EmptyInput);
    };
    check_args(max_h, cap)?;
    if reps == 0 {
        return Err(Error::param("reps must be at least 1"));
    }
    let times: Vec<Option<T>> = (0..reps)
        .map(|i| {
            // the seed ignores the cap, so runs at different caps share paths
            let mut rng = stream_rng(replication_seed(seed, 0, i as u64), stream::BRANCHING);
            run(offspring, lifetime, max_h, cap, &mut rng).cap_hit_time()
        })
        .collect();
    let rows: Vec<ProbeRow<T>> = horizons
        .iter()
        .map(|&h| {
            let hits = times.iter().filter(|t| t.is_some_and(|t| t <= h)).count();
            ProbeRow {
                horizon: h,
                reps,
                cap,
                cap_hit_frequency: T::from_count(hits) / T::from_count(reps),
            }
        })
        .collect();
    let mut sorted: Vec<&ProbeRow<T>> = rows.iter().collect();
    sorted.sort_by(|a, b| a.horizon.partial_cmp(&b.horizon).unwrap_or(Ordering::Equal));
    if sorted
        .windows(2)
        .any(|w| w[1].cap_hit_frequency < w[0].cap_hit_frequency)
    {
        return Err(Error::Invariant("cap-hit frequency decreases in the horizon".into()));
    }
    Ok(rows)
}

/// Versioned CSV with header `horizon,reps,cap,cap_hit_frequency`.
pub fn write_probe_csv<T: Real, W: Write>(rows: &[ProbeRow<T>], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_VERSION}")?;
    writeln!(out, "horizon,reps,cap,cap_hit_frequency")?;
    for r in rows {
        writeln!(out, "{},{},{},{}", r.horizon, r.reps, r.cap, r.cap_hit_frequency)?;
    }
    Ok(())
}
