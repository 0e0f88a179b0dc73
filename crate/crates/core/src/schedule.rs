//! Piecewise-constant speed schedules and their validation.

use std::collections::BTreeMap;
use std::fmt;

use crate::model::{Job, StrategyProfile};
use crate::real::{c, Real};

/// One constant-speed piece `[start, end)`. `job == None` is idle time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment<T = f64> {
    pub start: T,
    pub end: T,
    pub speed: T,
    pub job: Option<usize>,
}

impl<T: Real> Segment<T> {
    pub fn new(start: T, end: T, speed: T, job: Option<usize>) -> Self {
        Segment {
            start,
            end,
            speed,
            job,
        }
    }

    pub fn len(&self) -> T {
        self.end - self.start
    }

    pub fn work(&self) -> T {
        self.speed * self.len()
    }

    pub fn energy(&self, alpha: T) -> T {
        self.speed.powf(alpha) * self.len()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SpeedSchedule<T = f64> {
    pub segments: Vec<Segment<T>>,
}

impl<T: Real> SpeedSchedule<T> {
    pub fn new(segments: Vec<Segment<T>>) -> Self {
        SpeedSchedule { segments }
    }

    /// `sum speed^alpha * (end - start)` over all segments.
    pub fn energy(&self, alpha: T) -> T {
        self.segments
            .iter()
            .fold(T::zero(), |acc, s| acc + s.energy(alpha))
    }

    /// Energy spent while `job` executes.
    pub fn job_energy(&self, job: usize, alpha: T) -> T {
        self.segments
            .iter()
            .filter(|s| s.job == Some(job))
            .fold(T::zero(), |acc, s| acc + s.energy(alpha))
    }

    pub fn per_job_energy(&self, alpha: T) -> BTreeMap<usize, T> {
        let mut out = BTreeMap::new();
        for s in &self.segments {
            if let Some(j) = s.job {
                *out.entry(j).or_insert_with(T::zero) += s.energy(alpha);
            }
        }
        out
    }

    pub fn job_work(&self, job: usize) -> T {
        self.segments
            .iter()
            .filter(|s| s.job == Some(job))
            .fold(T::zero(), |acc, s| acc + s.work())
    }

    /// Speed of `job`, if it runs at a single speed (the first one seen).
    pub fn job_speed(&self, job: usize) -> Option<T> {
        self.segments
            .iter()
            .find(|s| s.job == Some(job))
            .map(|s| s.speed)
    }

    /// Speed at time `t` (0 when idle).
    pub fn speed_at(&self, t: T) -> T {
        self.segments
            .iter()
            .find(|s| s.start <= t && t < s.end)
            .map_or(T::zero(), |s| s.speed)
    }

    /// Completion time of `job`, i.e. the end of its last segment.
    pub fn completion(&self, job: usize) -> Option<T> {
        self.segments
            .iter()
            .filter(|s| s.job == Some(job))
            .map(|s| s.end)
            .fold(None, |m: Option<T>, e| Some(m.map_or(e, |m| m.max(e))))
    }

    pub fn scaled_speeds(&self, factor: T) -> Self {
        SpeedSchedule::new(
            self.segments
                .iter()
                .map(|s| Segment::new(s.start, s.end, s.speed * factor, s.job))
                .collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    EmptySegment {
        index: usize,
    },
    NegativeSpeed {
        index: usize,
    },
    Overlap {
        index: usize,
    },
    UnknownJob {
        index: usize,
        job: usize,
    },
    BeforeRelease {
        job: usize,
        start: f64,
        release: f64,
    },
    AfterDeadline {
        job: usize,
        end: f64,
        deadline: f64,
    },
    WorkloadMismatch {
        job: usize,
        executed: f64,
        workload: f64,
    },
    EdfOrder {
        index: usize,
        running: usize,
        preferred: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptySegment { index } => {
                write!(f, "segment {index}: start must precede end")
            }
            Violation::NegativeSpeed { index } => write!(f, "segment {index}: negative speed"),
            Violation::Overlap { index } => {
                write!(f, "segment {index}: overlaps or precedes its predecessor")
            }
            Violation::UnknownJob { index, job } => {
                write!(f, "segment {index}: unknown job {job}")
            }
            Violation::BeforeRelease {
                job,
                start,
                release,
            } => write!(
                f,
                "job {job} runs before release (starts {start}, released {release})"
            ),
            Violation::AfterDeadline { job, end, deadline } => write!(
                f,
                "job {job} runs after deadline (ends {end}, deadline {deadline})"
            ),
            Violation::WorkloadMismatch {
                job,
                executed,
                workload,
            } => write!(
                f,
                "job {job}: workload mismatch (executed {executed}, workload {workload})"
            ),
            Violation::EdfOrder {
                index,
                running,
                preferred,
            } => write!(
                f,
                "segment {index}: EDF order violated, job {running} runs while job {preferred} is pending"
            ),
        }
    }
}

/// Relative tolerance for workload conservation and time comparisons.
pub const VALIDATION_TOLERANCE: f64 = 1e-9;

/// Checks every schedule invariant and returns all violations found.
///
/// An empty vector means the schedule is non-overlapping and sorted,
/// executes each job's full workload, respects releases and deadlines, and
/// always runs the released unfinished job with the smallest
/// `(deadline, id)`.
pub fn validate_schedule<T: Real>(
    schedule: &SpeedSchedule<T>,
    jobs: &[Job<T>],
    profile: &StrategyProfile<T>,
) -> Vec<Violation> {
    let mut out = Vec::new();
    let rel: T = c(VALIDATION_TOLERANCE);
    let horizon = schedule
        .segments
        .iter()
        .map(|s| s.end.abs())
        .chain(jobs.iter().map(|j| j.release.abs()))
        .chain(profile.deadlines.iter().map(|d| d.abs()))
        .fold(T::one(), T::max);
    let time_tol = rel * horizon;
    let by_id = |id: usize| jobs.iter().find(|j| j.id == id);

    for (index, s) in schedule.segments.iter().enumerate() {
        if !(s.start < s.end) {
            out.push(Violation::EmptySegment { index });
        }
        if s.speed < T::zero() {
            out.push(Violation::NegativeSpeed { index });
        }
        if index > 0 && s.start < schedule.segments[index - 1].end - time_tol {
            out.push(Violation::Overlap { index });
        }
        let Some(id) = s.job else { continue };
        let Some(job) = by_id(id) else {
            out.push(Violation::UnknownJob { index, job: id });
            continue;
        };
        if s.start < job.release - time_tol {
            out.push(Violation::BeforeRelease {
                job: id,
                start: s.start.to_f64(),
                release: job.release.to_f64(),
            });
        }
        let deadline = profile.deadlines.get(id).copied();
        if let Some(d) = deadline {
            if s.end > d + time_tol {
                out.push(Violation::AfterDeadline {
                    job: id,
                    end: s.end.to_f64(),
                    deadline: d.to_f64(),
                });
            }
        }
    }

    for job in jobs {
        let executed = schedule.job_work(job.id);
        if (executed - job.workload).abs() > rel * job.workload {
            out.push(Violation::WorkloadMismatch {
                job: job.id,
                executed: executed.to_f64(),
                workload: job.workload.to_f64(),
            });
        }
    }

    // EDF: whenever a job runs, no other released, unfinished job may have a
    // smaller (deadline, id) key.
    let key = |id: usize| (profile.deadlines.get(id).copied(), id);
    let completions: Vec<(usize, Option<T>)> = jobs
        .iter()
        .map(|j| (j.id, schedule.completion(j.id)))
        .collect();
    for (index, s) in schedule.segments.iter().enumerate() {
        let Some(running) = s.job else { continue };
        let (Some(d_run), _) = key(running) else {
            continue;
        };
        for &(other, done) in &completions {
            if other == running {
                continue;
            }
            let Some(job) = by_id(other) else { continue };
            let released = job.release <= s.start + time_tol;
            let pending = done.is_some_and(|end| end > s.start + time_tol);
            if !(released && pending) {
                continue;
            }
            let Some(d_other) = profile.deadlines.get(other).copied() else {
                continue;
            };
            let preferred = d_other < d_run - time_tol
                || ((d_other - d_run).abs() <= time_tol && other < running);
            if preferred {
                out.push(Violation::EdfOrder {
                    index,
                    running,
                    preferred: other,
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(a: f64, b: f64, s: f64, j: usize) -> Segment {
        Segment::new(a, b, s, Some(j))
    }

    #[test]
    fn energy_examples() {
        let one = SpeedSchedule::new(vec![seg(0.0, 1.0, 1.0, 0)]);
        assert_eq!(one.energy(3.0), 1.0);
        let fast = SpeedSchedule::new(vec![seg(0.0, 1.0, 2.0, 0)]);
        assert_eq!(fast.energy(2.0), 4.0);
        let two = SpeedSchedule::new(vec![seg(0.0, 1.0, 2.0, 0), seg(1.0, 2.0, 1.0, 1)]);
        assert_eq!(two.energy(2.0), 5.0);
        assert_eq!(two.job_energy(0, 2.0), 4.0);
        assert_eq!(two.per_job_energy(2.0).get(&1), Some(&1.0));
    }

    #[test]
    fn idle_segments_cost_nothing() {
        let s = SpeedSchedule::new(vec![Segment::new(0.0, 3.0, 0.0, None)]);
        assert_eq!(s.energy(2.0), 0.0);
    }

    #[test]
    fn valid_single_job() {
        let jobs = [Job::new(0, 1.0, 0.0, 1.0)];
        let profile = StrategyProfile::new(vec![1.0]);
        let s = SpeedSchedule::new(vec![seg(0.0, 1.0, 1.0, 0)]);
        assert!(validate_schedule(&s, &jobs, &profile).is_empty());
    }

    #[test]
    fn detects_run_before_release() {
        let jobs = [Job::new(0, 1.0, 0.5, 1.0)];
        let profile = StrategyProfile::new(vec![1.5]);
        let s = SpeedSchedule::new(vec![seg(0.0, 1.0, 1.0, 0)]);
        let v = validate_schedule(&s, &jobs, &profile);
        assert!(v
            .iter()
            .any(|v| v.to_string().contains("runs before release")));
    }

    #[test]
    fn detects_run_after_deadline() {
        let jobs = [Job::new(0, 1.0, 0.0, 1.0)];
        let profile = StrategyProfile::new(vec![0.5]);
        let s = SpeedSchedule::new(vec![seg(0.0, 1.0, 1.0, 0)]);
        let v = validate_schedule(&s, &jobs, &profile);
        assert!(matches!(v[..], [Violation::AfterDeadline { job: 0, .. }]));
    }

    #[test]
    fn detects_workload_shortfall() {
        let jobs = [Job::new(0, 1.0, 0.0, 1.0), Job::new(1, 1.0, 0.0, 1.0)];
        let profile = StrategyProfile::new(vec![1.0, 2.0]);
        let s = SpeedSchedule::new(vec![seg(0.0, 1.0, 1.0, 0), seg(1.0, 1.5, 1.0, 1)]);
        let v = validate_schedule(&s, &jobs, &profile);
        assert_eq!(v.len(), 1);
        assert!(v[0].to_string().contains("workload mismatch"));
        assert!(matches!(v[0], Violation::WorkloadMismatch { job: 1, .. }));
    }

    #[test]
    fn detects_overlap() {
        let jobs = [Job::new(0, 1.0, 0.0, 1.0), Job::new(1, 1.0, 0.0, 1.0)];
        let profile = StrategyProfile::new(vec![2.0, 2.0]);
        let s = SpeedSchedule::new(vec![seg(0.0, 1.0, 1.0, 0), seg(0.5, 1.5, 1.0, 1)]);
        let v = validate_schedule(&s, &jobs, &profile);
        assert!(v
            .iter()
            .any(|v| matches!(v, Violation::Overlap { index: 1 })));
    }

    #[test]
    fn detects_edf_violation() {
        // Job 1 has the earlier deadline but job 0 runs first.
        let jobs = [Job::new(0, 1.0, 0.0, 1.0), Job::new(1, 1.0, 0.0, 1.0)];
        let profile = StrategyProfile::new(vec![2.0, 1.0]);
        let s = SpeedSchedule::new(vec![seg(0.0, 0.5, 2.0, 0), seg(0.5, 1.0, 2.0, 1)]);
        let v = validate_schedule(&s, &jobs, &profile);
        assert!(v.iter().any(|v| matches!(
            v,
            Violation::EdfOrder {
                running: 0,
                preferred: 1,
                ..
            }
        )));
    }

    #[test]
    fn edf_ties_go_to_smaller_id() {
        let jobs = [Job::new(0, 1.0, 0.0, 1.0), Job::new(1, 1.0, 0.0, 1.0)];
        let profile = StrategyProfile::new(vec![1.0, 1.0]);
        let good = SpeedSchedule::new(vec![seg(0.0, 0.5, 2.0, 0), seg(0.5, 1.0, 2.0, 1)]);
        assert!(validate_schedule(&good, &jobs, &profile).is_empty());
        let bad = SpeedSchedule::new(vec![seg(0.0, 0.5, 2.0, 1), seg(0.5, 1.0, 2.0, 0)]);
        assert!(!validate_schedule(&bad, &jobs, &profile).is_empty());
    }
}
