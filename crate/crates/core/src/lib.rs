//! Speed-scaling scheduling games.
//!
//! Players submit jobs (workload, release time, private priority) with a
//! self-chosen deadline to a single variable-speed processor. The processor
//! runs the minimum-energy feasible schedule and bills the energy back to
//! the players through a cost-sharing mechanism; each player's penalty is
//! its bill plus its priority-weighted deadline.
//!
//! The crate computes minimum-energy schedules ([`yds`]), proportional and
//! marginal cost shares ([`mechanisms`]), numeric and closed-form best
//! responses ([`bestresp`]), best-response dynamics with cycle detection
//! ([`dynamics`]) and two-player equilibrium analysis ([`equilibria`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bestresp;
pub mod cli;
pub mod dynamics;
pub mod equilibria;
pub mod error;
pub mod figures;
pub mod formats;
pub mod mechanisms;
pub mod model;
pub mod oracle;
pub mod real;
pub mod schedule;
pub mod yds;

pub use error::{Error, Result};
pub use mechanisms::{CostReport, Mechanism, PlayerCost};
pub use model::{Game, GameConfig, Job, StrategyProfile, WaitingCostMode};
pub use real::Real;
pub use schedule::{validate_schedule, Segment, SpeedSchedule, Violation};
