//! Jobs, game configuration and strategy profiles.

use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::real::{c, Real};

/// One player's job.
///
/// `workload` and `release` are public; `priority` is the private weight
/// charged per unit of waiting time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Job<T = f64> {
    pub id: usize,
    pub workload: T,
    pub release: T,
    pub priority: T,
}

impl<T: Real> Job<T> {
    pub fn new(id: usize, workload: T, release: T, priority: T) -> Self {
        Job {
            id,
            workload,
            release,
            priority,
        }
    }

    /// Unit job: workload 1, release 0, priority 1.
    pub fn unit(id: usize) -> Self {
        Job::new(id, T::one(), T::zero(), T::one())
    }

    fn validate(&self) -> Result<()> {
        let ok = self.workload > T::zero()
            && self.priority > T::zero()
            && self.release >= T::zero()
            && self.workload.is_finite()
            && self.priority.is_finite()
            && self.release.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInstance(format!(
                "job {}: need workload > 0, priority > 0, release >= 0 (got w = {}, r = {}, p = {})",
                self.id, self.workload, self.release, self.priority
            )))
        }
    }
}

/// How the waiting part of a penalty is measured.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum WaitingCostMode {
    /// `p_i * d_i`
    #[default]
    Absolute,
    /// `p_i * (d_i - r_i)`
    Relative,
}

impl WaitingCostMode {
    pub fn as_str(self) -> &'static str {
        match self {
            WaitingCostMode::Absolute => "absolute",
            WaitingCostMode::Relative => "relative",
        }
    }
}

impl fmt::Display for WaitingCostMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WaitingCostMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "absolute" => Ok(WaitingCostMode::Absolute),
            "relative" => Ok(WaitingCostMode::Relative),
            other => Err(Error::InvalidConfig(format!(
                "unknown waiting-cost mode {other:?} (expected absolute|relative)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GameConfig<T = f64> {
    /// Energy exponent: running at speed `s` for time `t` costs `s^alpha * t`.
    pub alpha: T,
    pub waiting_cost_mode: WaitingCostMode,
    /// Improvement threshold for best-response moves and epsilon-equilibria.
    pub epsilon: T,
    /// Smallest admissible `d_i - r_i` seen by search procedures.
    pub min_gap: T,
}

impl<T: Real> GameConfig<T> {
    pub const DEFAULT_EPSILON: f64 = 1e-9;
    pub const DEFAULT_MIN_GAP: f64 = 1e-9;

    pub fn new(alpha: T) -> Self {
        GameConfig {
            alpha,
            waiting_cost_mode: WaitingCostMode::Absolute,
            epsilon: c(Self::DEFAULT_EPSILON),
            min_gap: c(Self::DEFAULT_MIN_GAP),
        }
    }

    pub fn with_mode(mut self, mode: WaitingCostMode) -> Self {
        self.waiting_cost_mode = mode;
        self
    }

    pub fn with_epsilon(mut self, epsilon: T) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_min_gap(mut self, min_gap: T) -> Self {
        self.min_gap = min_gap;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= c(2.0)) || !self.alpha.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "alpha must be >= 2, got {}",
                self.alpha
            )));
        }
        if !(self.epsilon > T::zero()) {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !(self.min_gap > T::zero()) {
            return Err(Error::InvalidConfig(format!(
                "min_gap must be positive, got {}",
                self.min_gap
            )));
        }
        Ok(())
    }

    /// Physical processors have alpha in [2, 3]; larger values are accepted
    /// but flagged.
    pub fn alpha_warning(&self) -> Option<String> {
        (self.alpha > c(3.0)).then(|| {
            format!(
                "alpha = {} lies outside the physical range [2, 3]",
                self.alpha
            )
        })
    }
}

/// A game instance: the players' jobs plus the global configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct Game<T = f64> {
    jobs: Vec<Job<T>>,
    config: GameConfig<T>,
}

impl<T: Real> Game<T> {
    /// Job ids must be exactly `0..n` in order.
    pub fn new(jobs: Vec<Job<T>>, config: GameConfig<T>) -> Result<Self> {
        config.validate()?;
        for (i, job) in jobs.iter().enumerate() {
            if job.id != i {
                return Err(Error::InvalidInstance(format!(
                    "job ids must be dense 0..n in order; position {i} holds id {}",
                    job.id
                )));
            }
            job.validate()?;
        }
        if let Some(w) = config.alpha_warning() {
            log::warn!("{w}");
        }
        Ok(Game { jobs, config })
    }

    /// `n` unit players (w = 1, r = 0, p = 1).
    pub fn symmetric_unit(n: usize, alpha: T) -> Result<Self> {
        Game::new((0..n).map(Job::unit).collect(), GameConfig::new(alpha))
    }

    pub fn jobs(&self) -> &[Job<T>] {
        &self.jobs
    }

    pub fn job(&self, id: usize) -> &Job<T> {
        &self.jobs[id]
    }

    pub fn config(&self) -> &GameConfig<T> {
        &self.config
    }

    pub fn alpha(&self) -> T {
        self.config.alpha
    }

    pub fn n_players(&self) -> usize {
        self.jobs.len()
    }

    pub fn with_config(mut self, config: GameConfig<T>) -> Result<Self> {
        config.validate()?;
        self.config = config;
        Ok(self)
    }

    /// Waiting part of player `i`'s penalty at deadline `deadline`.
    pub fn waiting_cost(&self, i: usize, deadline: T) -> T {
        let job = &self.jobs[i];
        match self.config.waiting_cost_mode {
            WaitingCostMode::Absolute => job.priority * deadline,
            WaitingCostMode::Relative => job.priority * (deadline - job.release),
        }
    }

    /// Checks that `profile` has one deadline per player, each strictly
    /// after its release.
    pub fn check_profile(&self, profile: &StrategyProfile<T>) -> Result<()> {
        if profile.len() != self.jobs.len() {
            return Err(Error::InvalidInstance(format!(
                "profile has {} deadlines for {} players",
                profile.len(),
                self.jobs.len()
            )));
        }
        check_feasible(&self.jobs, profile)
    }
}

/// Every job in `jobs` must have `d > r` in `profile`.
pub(crate) fn check_feasible<T: Real>(jobs: &[Job<T>], profile: &StrategyProfile<T>) -> Result<()> {
    for job in jobs {
        let d = profile.deadlines.get(job.id).copied().ok_or_else(|| {
            Error::InvalidInstance(format!("no deadline declared for job {}", job.id))
        })?;
        if !(d > job.release) || !d.is_finite() {
            return Err(Error::InfeasibleDeadline {
                job: job.id,
                release: job.release.to_f64(),
                deadline: d.to_f64(),
            });
        }
    }
    Ok(())
}

/// Declared deadlines, indexed by job id.
#[derive(Clone, Debug, PartialEq)]
pub struct StrategyProfile<T = f64> {
    pub deadlines: Vec<T>,
}

impl<T: Real> StrategyProfile<T> {
    pub fn new(deadlines: Vec<T>) -> Self {
        StrategyProfile { deadlines }
    }

    pub fn len(&self) -> usize {
        self.deadlines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deadlines.is_empty()
    }

    /// Copy of this profile with player `i` deviating to `deadline`.
    pub fn with_deadline(&self, i: usize, deadline: T) -> Self {
        let mut p = self.clone();
        p.deadlines[i] = deadline;
        p
    }

    /// Sup-norm distance; `None` if the lengths differ.
    pub fn sup_distance(&self, other: &Self) -> Option<T> {
        (self.len() == other.len()).then(|| {
            self.deadlines
                .iter()
                .zip(&other.deadlines)
                .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
        })
    }

    pub fn euclidean_distance(&self, other: &Self) -> Option<T> {
        (self.len() == other.len()).then(|| {
            self.deadlines
                .iter()
                .zip(&other.deadlines)
                .fold(T::zero(), |s, (&a, &b)| s + (a - b) * (a - b))
                .sqrt()
        })
    }
}

impl<T> Index<usize> for StrategyProfile<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        &self.deadlines[i]
    }
}

impl<T> IndexMut<usize> for StrategyProfile<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.deadlines[i]
    }
}

impl<T: Real> From<Vec<T>> for StrategyProfile<T> {
    fn from(deadlines: Vec<T>) -> Self {
        StrategyProfile::new(deadlines)
    }
}
