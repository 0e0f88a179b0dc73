//! Minimum-energy scheduling by repeated extraction of the maximum-density
//! interval.
//!
//! Starting from an empty support `P`, every round considers all intervals
//! `[t, t')` whose endpoints are release times or deadlines of unscheduled
//! jobs. Its domain is `[t, t') \ P`, its included jobs are those whose whole
//! window `[r_j, d_j)` lies inside `[t, t')`, and its density is their total
//! workload divided by the domain length. The densest interval is committed:
//! its jobs run in EDF order over the domain at speed equal to the density,
//! and the domain joins `P`. Every job therefore runs at one constant speed.
//!
//! Equal densities resolve toward the smaller start, then the smaller end.

use crate::error::Result;
use crate::model::{check_feasible, Job, StrategyProfile};
use crate::real::{c, Real};
use crate::schedule::{Segment, SpeedSchedule};

/// An interval committed by the procedure.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityInterval<T = f64> {
    pub start: T,
    pub end: T,
    /// Length of `[start, end)` minus the support committed earlier.
    pub domain_length: T,
    pub included_jobs: Vec<usize>,
    pub density: T,
}

/// Minimum-energy schedule together with the committed intervals, in the
/// order they were selected.
#[derive(Clone, Debug)]
pub struct YdsRun<T = f64> {
    pub schedule: SpeedSchedule<T>,
    pub intervals: Vec<DensityInterval<T>>,
}

/// Sorted disjoint half-open intervals.
#[derive(Clone, Debug, Default)]
struct Support<T> {
    parts: Vec<(T, T)>,
}

impl<T: Real> Support<T> {
    /// Pieces of `[a, b)` not covered by the support, dropping slivers no
    /// longer than `tiny`.
    fn complement_within(&self, a: T, b: T, tiny: T) -> Vec<(T, T)> {
        let mut out = Vec::new();
        let mut cursor = a;
        for &(s, e) in &self.parts {
            if e <= cursor {
                continue;
            }
            if s >= b {
                break;
            }
            if s > cursor && s - cursor > tiny {
                out.push((cursor, s.min(b)));
            }
            cursor = cursor.max(e);
            if cursor >= b {
                break;
            }
        }
        if b > cursor && b - cursor > tiny {
            out.push((cursor, b));
        }
        out
    }

    fn insert(&mut self, pieces: &[(T, T)]) {
        self.parts.extend_from_slice(pieces);
        self.parts
            .sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite support bounds"));
        let mut merged: Vec<(T, T)> = Vec::with_capacity(self.parts.len());
        for &(s, e) in &self.parts {
            match merged.last_mut() {
                Some(last) if s <= last.1 => last.1 = last.1.max(e),
                _ => merged.push((s, e)),
            }
        }
        self.parts = merged;
    }
}

/// Energy-minimizing feasible schedule for `jobs` under `profile`.
///
/// `profile` is indexed by job id; `jobs` may be any subset of a game's
/// players (e.g. with one player removed).
pub fn yds_schedule<T: Real>(
    jobs: &[Job<T>],
    profile: &StrategyProfile<T>,
) -> Result<SpeedSchedule<T>> {
    yds_run(jobs, profile).map(|run| run.schedule)
}

/// `E(OPT(d))`; zero for an empty job set.
pub fn optimal_energy<T: Real>(
    jobs: &[Job<T>],
    profile: &StrategyProfile<T>,
    alpha: T,
) -> Result<T> {
    Ok(yds_schedule(jobs, profile)?.energy(alpha))
}

pub fn yds_run<T: Real>(jobs: &[Job<T>], profile: &StrategyProfile<T>) -> Result<YdsRun<T>> {
    check_feasible(jobs, profile)?;
    let deadline = |j: &Job<T>| profile.deadlines[j.id];

    let scale = jobs
        .iter()
        .map(|j| deadline(j).abs())
        .fold(T::one(), T::max);
    let tiny = c::<T>(64.0) * T::epsilon() * scale;

    let mut pending: Vec<&Job<T>> = jobs.iter().collect();
    let mut support = Support::default();
    let mut segments = Vec::new();
    let mut intervals = Vec::new();
    let mut events: Vec<T> = Vec::with_capacity(2 * jobs.len());

    while !pending.is_empty() {
        events.clear();
        for j in &pending {
            events.push(j.release);
            events.push(deadline(j));
        }
        events.sort_by(|a, b| a.partial_cmp(b).expect("finite event times"));
        events.dedup();

        // (density, start, end, domain pieces)
        let mut best: Option<(T, T, T, Vec<(T, T)>)> = None;
        for (a, &t) in events.iter().enumerate() {
            for &t_end in &events[a + 1..] {
                let work = pending
                    .iter()
                    .filter(|j| j.release >= t && deadline(j) <= t_end)
                    .fold(T::zero(), |acc, j| acc + j.workload);
                if !(work > T::zero()) {
                    continue;
                }
                let domain = support.complement_within(t, t_end, tiny);
                let length = domain.iter().fold(T::zero(), |acc, &(s, e)| acc + (e - s));
                if !(length > T::zero()) {
                    continue;
                }
                let density = work / length;
                if best.as_ref().is_none_or(|b| density > b.0) {
                    best = Some((density, t, t_end, domain));
                }
            }
        }

        let (density, t, t_end, domain) =
            best.expect("some interval has positive work and a non-empty domain");
        let (mut chosen, rest): (Vec<&Job<T>>, Vec<&Job<T>>) = pending
            .into_iter()
            .partition(|j| j.release >= t && deadline(j) <= t_end);
        pending = rest;
        chosen.sort_by(|x, y| {
            deadline(x)
                .partial_cmp(&deadline(y))
                .expect("finite deadlines")
                .then(x.id.cmp(&y.id))
        });

        edf_fill(&chosen, &domain, density, tiny, &mut segments);
        support.insert(&domain);
        let domain_length = domain.iter().fold(T::zero(), |acc, &(s, e)| acc + (e - s));
        intervals.push(DensityInterval {
            start: t,
            end: t_end,
            domain_length,
            included_jobs: chosen.iter().map(|j| j.id).collect(),
            density,
        });
    }

    segments.sort_by(|a: &Segment<T>, b| a.start.partial_cmp(&b.start).expect("finite"));
    Ok(YdsRun {
        schedule: SpeedSchedule::new(merge_contiguous(segments)),
        intervals,
    })
}

/// Preemptive EDF of `jobs` (pre-sorted by `(deadline, id)`) over the
/// domain pieces at constant `speed`.
fn edf_fill<T: Real>(
    jobs: &[&Job<T>],
    domain: &[(T, T)],
    speed: T,
    tiny: T,
    out: &mut Vec<Segment<T>>,
) {
    let mut remaining: Vec<T> = jobs.iter().map(|j| j.workload).collect();
    let done_tol: Vec<T> = jobs
        .iter()
        .map(|j| c::<T>(64.0) * T::epsilon() * j.workload)
        .collect();
    let is_done = |k: usize, rem: &[T]| rem[k] <= done_tol[k];

    for &(piece_start, piece_end) in domain {
        let mut now = piece_start;
        while now < piece_end {
            let next_release = jobs
                .iter()
                .enumerate()
                .filter(|&(k, j)| !is_done(k, &remaining) && j.release > now)
                .map(|(_, j)| j.release)
                .fold(None, |m: Option<T>, r| Some(m.map_or(r, |m| m.min(r))));
            // First pending job in EDF order that has been released.
            let current =
                (0..jobs.len()).find(|&k| !is_done(k, &remaining) && jobs[k].release <= now);
            let Some(k) = current else {
                match next_release {
                    Some(r) if r < piece_end => {
                        now = r;
                        continue;
                    }
                    _ => break,
                }
            };
            let finish = now + remaining[k] / speed;
            let mut end = piece_end.min(finish);
            if let Some(r) = next_release {
                end = end.min(r);
            }
            if end - now > tiny {
                out.push(Segment::new(now, end, speed, Some(jobs[k].id)));
            }
            if end >= finish {
                remaining[k] = T::zero();
            } else {
                remaining[k] -= speed * (end - now);
            }
            now = end;
        }
    }
}

fn merge_contiguous<T: Real>(segments: Vec<Segment<T>>) -> Vec<Segment<T>> {
    let mut out: Vec<Segment<T>> = Vec::with_capacity(segments.len());
    for s in segments {
        match out.last_mut() {
            Some(last) if last.job == s.job && last.end == s.start && last.speed == s.speed => {
                last.end = s.end;
            }
            _ => out.push(s),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::schedule::validate_schedule;

    fn jobs(spec: &[(f64, f64)]) -> Vec<Job> {
        spec.iter()
            .enumerate()
            .map(|(i, &(w, r))| Job::new(i, w, r, 1.0))
            .collect()
    }

    #[test]
    fn single_job_runs_at_unit_speed() {
        let js = jobs(&[(1.0, 0.0)]);
        let p = StrategyProfile::new(vec![1.0]);
        let s = yds_schedule(&js, &p).unwrap();
        assert_eq!(s.segments, vec![Segment::new(0.0, 1.0, 1.0, Some(0))]);
        for alpha in [2.0, 2.5, 3.0] {
            assert_eq!(s.energy(alpha), 1.0);
        }
    }

    #[test]
    fn dense_job_first_then_slack_job() {
        let js = jobs(&[(2.0, 0.0), (1.0, 0.0)]);
        let p = StrategyProfile::new(vec![1.0, 2.0]);
        let run = yds_run(&js, &p).unwrap();
        assert_eq!(
            run.schedule.segments,
            vec![
                Segment::new(0.0, 1.0, 2.0, Some(0)),
                Segment::new(1.0, 2.0, 1.0, Some(1))
            ]
        );
        assert_eq!(run.schedule.energy(2.0), 5.0);
        assert_eq!(run.intervals[0].density, 2.0);
        assert_eq!(run.intervals[0].included_jobs, vec![0]);
        assert_eq!(run.intervals[1].domain_length, 1.0);
    }

    #[test]
    fn equal_density_tie_gives_uniform_speed() {
        let js = jobs(&[(1.0, 0.0), (1.0, 0.0)]);
        let p = StrategyProfile::new(vec![1.0, 2.0]);
        let run = yds_run(&js, &p).unwrap();
        // [0,1) and [0,2) both have density 1; the smaller end wins.
        assert_eq!((run.intervals[0].start, run.intervals[0].end), (0.0, 1.0));
        assert!(run.schedule.segments.iter().all(|s| s.speed == 1.0));
        assert_eq!(run.schedule.energy(2.0), 2.0);
    }

    #[test]
    fn optimal_energy_examples() {
        let one = jobs(&[(1.0, 0.0)]);
        let e = optimal_energy(&one, &StrategyProfile::new(vec![2.0]), 3.0).unwrap();
        assert!((e - 0.25).abs() < 1e-15);
        assert_eq!(
            optimal_energy::<f64>(&[], &StrategyProfile::new(vec![]), 3.0).unwrap(),
            0.0
        );
        let twins = jobs(&[(1.0, 0.0), (1.0, 0.0)]);
        let e = optimal_energy(&twins, &StrategyProfile::new(vec![1.0, 1.0]), 2.0).unwrap();
        assert_eq!(e, 4.0);
    }

    #[test]
    fn rejects_infeasible_profile() {
        let js = jobs(&[(1.0, 1.0)]);
        let err = yds_schedule(&js, &StrategyProfile::new(vec![1.0])).unwrap_err();
        assert!(matches!(err, Error::InfeasibleDeadline { job: 0, .. }));
    }

    #[test]
    fn support_holes_are_skipped() {
        // Job 1 is dense inside [1,2); job 0 spans [0,3) around it.
        let js = jobs(&[(1.0, 0.0), (3.0, 1.0)]);
        let p = StrategyProfile::new(vec![3.0, 2.0]);
        let s = yds_schedule(&js, &p).unwrap();
        assert!(validate_schedule(&s, &js, &p).is_empty(), "{s:?}");
        assert_eq!(s.job_speed(1), Some(3.0));
        assert_eq!(s.job_speed(0), Some(0.5));
        assert_eq!(s.segments.len(), 3);
    }

    #[test]
    fn idle_gap_between_disjoint_windows() {
        let js = jobs(&[(1.0, 0.0), (1.0, 5.0)]);
        let p = StrategyProfile::new(vec![1.0, 7.0]);
        let s = yds_schedule(&js, &p).unwrap();
        assert!(validate_schedule(&s, &js, &p).is_empty());
        assert_eq!(s.speed_at(3.0), 0.0);
        assert_eq!(s.job_speed(1), Some(0.5));
    }

    #[test]
    fn preemption_at_release() {
        // Job 1 arrives at 1 with an earlier deadline and preempts job 0.
        let js = jobs(&[(2.0, 0.0), (1.0, 1.0)]);
        let p = StrategyProfile::new(vec![3.0, 2.0]);
        let s = yds_schedule(&js, &p).unwrap();
        assert!(validate_schedule(&s, &js, &p).is_empty(), "{s:?}");
        assert_eq!(s.energy(2.0), 3.0);
        assert_eq!(s.segments.len(), 3);
    }
}
