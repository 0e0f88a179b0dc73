//! Independent estimate of the minimum energy as a discretized convex
//! program.
//!
//! The horizon is cut into slots whose boundaries include every release
//! time and deadline. Each job spreads its workload over the slots inside
//! its window; a slot of length `l` carrying load `L` costs
//! `(L / l)^alpha * l`. The program is solved by block-coordinate descent:
//! one block per job, each block minimized exactly by water-filling.

use crate::error::{Error, Result};
use crate::model::{check_feasible, Job, StrategyProfile};

#[derive(Clone, Copy, Debug)]
pub struct OracleOptions {
    pub max_sweeps: usize,
    /// Stop once a sweep improves the objective by less than this fraction.
    pub rel_improvement: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            max_sweeps: 10_000,
            rel_improvement: 1e-12,
        }
    }
}

/// Discretized minimum energy with roughly `grid_n` slots.
pub fn oracle_energy(
    jobs: &[Job],
    profile: &StrategyProfile,
    alpha: f64,
    grid_n: usize,
) -> Result<f64> {
    oracle_energy_with(jobs, profile, alpha, grid_n, OracleOptions::default())
}

pub fn oracle_energy_with(
    jobs: &[Job],
    profile: &StrategyProfile,
    alpha: f64,
    grid_n: usize,
    opts: OracleOptions,
) -> Result<f64> {
    check_feasible(jobs, profile)?;
    if jobs.is_empty() {
        return Ok(0.0);
    }
    let slots = build_slots(jobs, profile, grid_n)?;
    let lens: Vec<f64> = slots.windows(2).map(|w| w[1] - w[0]).collect();

    // Slot index range of each job's window.
    let windows: Vec<(usize, usize)> = jobs
        .iter()
        .map(|j| {
            let lo = slots.partition_point(|&t| t < j.release);
            let hi = slots.partition_point(|&t| t < profile.deadlines[j.id]);
            (lo, hi)
        })
        .collect();

    // alloc[k][s]: work of job k in slot windows[k].0 + s; start uniform.
    let mut alloc: Vec<Vec<f64>> = jobs
        .iter()
        .zip(&windows)
        .map(|(j, &(lo, hi))| {
            let span: f64 = lens[lo..hi].iter().sum();
            lens[lo..hi].iter().map(|l| j.workload * l / span).collect()
        })
        .collect();
    let mut load = vec![0.0; lens.len()];
    for (k, &(lo, _)) in windows.iter().enumerate() {
        for (s, x) in alloc[k].iter().enumerate() {
            load[lo + s] += x;
        }
    }

    let objective = |load: &[f64]| -> f64 {
        load.iter()
            .zip(&lens)
            .map(|(&x, &l)| (x / l).powf(alpha) * l)
            .sum()
    };
    let mut value = objective(&load);
    let mut scratch = Vec::new();
    for _ in 0..opts.max_sweeps {
        for (k, job) in jobs.iter().enumerate() {
            let (lo, hi) = windows[k];
            for (s, x) in alloc[k].iter().enumerate() {
                load[lo + s] -= x;
            }
            water_fill(
                &load[lo..hi],
                &lens[lo..hi],
                job.workload,
                &mut alloc[k],
                &mut scratch,
            );
            for (s, x) in alloc[k].iter().enumerate() {
                load[lo + s] += x;
            }
        }
        let next = objective(&load);
        let improved = value - next;
        value = next;
        if improved <= opts.rel_improvement * value.abs() {
            break;
        }
    }
    Ok(value)
}

/// Slot boundaries: every event time, with each elementary interval split
/// into a number of equal slots proportional to its length.
fn build_slots(jobs: &[Job], profile: &StrategyProfile, grid_n: usize) -> Result<Vec<f64>> {
    let mut events: Vec<f64> = jobs
        .iter()
        .flat_map(|j| [j.release, profile.deadlines[j.id]])
        .collect();
    events.sort_by(f64::total_cmp);
    events.dedup();
    if grid_n < events.len() {
        return Err(Error::Precondition(format!(
            "grid_n = {grid_n} is smaller than the {} distinct event times",
            events.len()
        )));
    }
    let span = events[events.len() - 1] - events[0];
    let mut slots = vec![events[0]];
    for w in events.windows(2) {
        let pieces = ((grid_n as f64 * (w[1] - w[0]) / span).round() as usize).max(1);
        let step = (w[1] - w[0]) / pieces as f64;
        for p in 1..pieces {
            slots.push(w[0] + step * p as f64);
        }
        slots.push(w[1]);
    }
    Ok(slots)
}

/// Distributes `work` over slots with existing loads `base` so that every
/// slot receiving work ends at a common speed level, the exact minimizer of
/// the separable convex cost for this block.
fn water_fill(
    base: &[f64],
    lens: &[f64],
    work: f64,
    out: &mut [f64],
    order: &mut Vec<(f64, usize)>,
) {
    order.clear();
    order.extend(
        base.iter()
            .zip(lens)
            .enumerate()
            .map(|(i, (&b, &l))| (b / l, i)),
    );
    order.sort_by(|a, b| a.0.total_cmp(&b.0));

    // Raise the level across the k lowest slots until the work is placed.
    let mut active_len = 0.0;
    let mut active_base = 0.0;
    let mut level = order[0].0;
    for (k, &(speed, i)) in order.iter().enumerate() {
        active_len += lens[i];
        active_base += base[i];
        let candidate = (work + active_base) / active_len;
        let next = order.get(k + 1).map_or(f64::INFINITY, |o| o.0);
        if candidate <= next {
            level = candidate.max(speed);
            break;
        }
    }
    for (i, x) in out.iter_mut().enumerate() {
        *x = (level * lens[i] - base[i]).max(0.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_job_is_exact_on_any_grid() {
        let jobs = [Job::new(0, 1.0, 0.0, 1.0)];
        let p = StrategyProfile::new(vec![1.0]);
        for grid in [2, 10, 1000] {
            let e = oracle_energy(&jobs, &p, 2.0, grid).unwrap();
            assert!((e - 1.0).abs() < 1e-12, "grid {grid}: {e}");
        }
    }

    #[test]
    fn two_job_example() {
        let jobs = [Job::new(0, 2.0, 0.0, 1.0), Job::new(1, 1.0, 0.0, 1.0)];
        let p = StrategyProfile::new(vec![1.0, 2.0]);
        let e = oracle_energy(&jobs, &p, 2.0, 2000).unwrap();
        assert!((e - 5.0).abs() < 1e-3, "{e}");
    }

    #[test]
    fn water_fill_levels() {
        let mut out = vec![0.0; 3];
        let mut scratch = Vec::new();
        water_fill(
            &[0.0, 1.0, 3.0],
            &[1.0, 1.0, 1.0],
            2.0,
            &mut out,
            &mut scratch,
        );
        // Level 1.5 fills the first two slots.
        assert_eq!(out, vec![1.5, 0.5, 0.0]);
    }

    #[test]
    fn rejects_coarse_grid_and_infeasible_profiles() {
        let jobs = [Job::new(0, 1.0, 0.0, 1.0), Job::new(1, 1.0, 2.0, 1.0)];
        let p = StrategyProfile::new(vec![1.0, 3.0]);
        assert!(oracle_energy(&jobs, &p, 2.0, 2).is_err());
        let bad = StrategyProfile::new(vec![1.0, 2.0]);
        assert!(oracle_energy(&jobs, &bad, 2.0, 100).is_err());
    }
}
