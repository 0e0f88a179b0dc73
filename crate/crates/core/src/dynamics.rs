//! Best-response dynamics.
//!
//! Players take turns replacing their deadline with a best response. A move
//! is only made when it lowers the mover's penalty by more than the game's
//! epsilon. The run ends at an epsilon-equilibrium (nobody can improve), at
//! a revisited state, or when the step budget runs out.

use std::fmt;
use std::str::FromStr;

use crate::bestresp::closed_form::{solo_deadline, spiral_unit};
use crate::bestresp::{numeric_best_response_with, BestResponse, BestResponseOptions};
use crate::error::{Error, Result};
use crate::mechanisms::Mechanism;
use crate::model::{Game, StrategyProfile};
use crate::real::{c, Real};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MoveOrder {
    /// Players 0, 1, ..., n-1, 0, ... each get a turn.
    #[default]
    RoundRobin,
    /// The player with the largest available improvement moves.
    MaxGain,
}

impl MoveOrder {
    pub fn as_str(self) -> &'static str {
        match self {
            MoveOrder::RoundRobin => "round_robin",
            MoveOrder::MaxGain => "max_gain",
        }
    }
}

impl fmt::Display for MoveOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MoveOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "round_robin" | "round-robin" => Ok(MoveOrder::RoundRobin),
            "max_gain" | "max-gain" => Ok(MoveOrder::MaxGain),
            other => Err(Error::InvalidConfig(format!(
                "unknown move order {other:?} (expected round_robin|max_gain)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct DynamicsOptions<T = f64> {
    /// Budget of improving moves.
    pub max_steps: usize,
    pub order: MoveOrder,
    /// Sup-norm distance under which two profiles count as the same state.
    pub cycle_tol: T,
    /// End the run as soon as a state repeats.
    pub stop_on_cycle: bool,
    /// Round-robin player to move first.
    pub first_player: usize,
    pub best_response: BestResponseOptions<T>,
}

impl<T: Real> Default for DynamicsOptions<T> {
    fn default() -> Self {
        DynamicsOptions {
            max_steps: 1000,
            order: MoveOrder::RoundRobin,
            cycle_tol: c(1e-7),
            stop_on_cycle: true,
            first_player: 0,
            best_response: BestResponseOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceStep<T = f64> {
    /// 1-based index of the move.
    pub step: usize,
    pub player: usize,
    pub d_old: T,
    pub d_new: T,
    pub penalty_old: T,
    pub penalty_new: T,
    pub phi_before: T,
    pub phi_after: T,
    /// Round-robin cursor after the move; 0 under max-gain order.
    pub next_turn: usize,
}

impl<T: Real> TraceStep<T> {
    pub fn gain(&self) -> T {
        self.penalty_old - self.penalty_new
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// No player can improve by more than epsilon.
    Equilibrium,
    /// The state after move `start + period` equals the state after move
    /// `start` (move 0 is the starting state).
    Cycle {
        start: usize,
        period: usize,
    },
    BudgetExhausted,
    /// A player reported an improving response that leaves its deadline
    /// unchanged to machine precision.
    Stalled,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Equilibrium => f.write_str("equilibrium"),
            Verdict::Cycle { start, period } => write!(f, "cycle(start={start},period={period})"),
            Verdict::BudgetExhausted => f.write_str("budget_exhausted"),
            Verdict::Stalled => f.write_str("stalled"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DynamicsTrace<T = f64> {
    pub start: StrategyProfile<T>,
    /// Cursor before the first move.
    pub start_turn: usize,
    pub steps: Vec<TraceStep<T>>,
    pub verdict: Verdict,
    pub final_profile: StrategyProfile<T>,
    pub mechanism: Mechanism,
    pub order: MoveOrder,
    pub cycle_tol: T,
}

impl<T: Real> DynamicsTrace<T> {
    /// States visited: the start plus the state after every move.
    pub fn states(&self) -> Vec<(StrategyProfile<T>, usize)> {
        let mut profile = self.start.clone();
        let mut out = vec![(profile.clone(), self.start_turn)];
        for s in &self.steps {
            profile[s.player] = s.d_new;
            out.push((profile.clone(), s.next_turn));
        }
        out
    }
}

pub fn run_dynamics<T: Real>(
    game: &Game<T>,
    start: &StrategyProfile<T>,
    mechanism: Mechanism,
    opts: &DynamicsOptions<T>,
) -> Result<DynamicsTrace<T>> {
    game.check_profile(start)?;
    let n = game.n_players();
    if opts.max_steps == 0 {
        return Err(Error::InvalidConfig("max_steps must be at least 1".into()));
    }
    if n == 0 {
        return Err(Error::InvalidInstance("game has no players".into()));
    }
    let eps = game.config().epsilon;
    let start_turn = match opts.order {
        MoveOrder::RoundRobin => opts.first_player % n,
        MoveOrder::MaxGain => 0,
    };
    let mut trace = DynamicsTrace {
        start: start.clone(),
        start_turn,
        steps: Vec::new(),
        verdict: Verdict::BudgetExhausted,
        final_profile: start.clone(),
        mechanism,
        order: opts.order,
        cycle_tol: opts.cycle_tol,
    };
    let mut profile = start.clone();
    let mut phi = game.potential(&profile)?;
    let mut turn = start_turn;
    let mut states = vec![(profile.clone(), turn)];
    let mut cycle_seen = false;

    let respond =
        |profile: &StrategyProfile<T>, i: usize, step: usize| -> Result<(T, BestResponse<T>)> {
            let wrap = |e| Error::Dynamics {
                step,
                source: Box::new(e),
            };
            let current = game.player_penalty(profile, i, mechanism).map_err(wrap)?;
            let br = numeric_best_response_with(game, profile, i, mechanism, &opts.best_response)
                .map_err(wrap)?;
            Ok((current, br))
        };

    while trace.steps.len() < opts.max_steps {
        let step = trace.steps.len() + 1;
        // Pick the mover, or conclude that nobody can improve.
        let chosen = match opts.order {
            MoveOrder::RoundRobin => {
                let mut found = None;
                for k in 0..n {
                    let i = (turn + k) % n;
                    let (current, br) = respond(&profile, i, step)?;
                    if current - br.penalty > eps {
                        found = Some((i, current, br));
                        break;
                    }
                }
                found
            }
            MoveOrder::MaxGain => {
                let mut found: Option<(usize, T, BestResponse<T>)> = None;
                for i in 0..n {
                    let (current, br) = respond(&profile, i, step)?;
                    let gain = current - br.penalty;
                    if gain > eps && found.as_ref().is_none_or(|f| gain > f.1 - f.2.penalty) {
                        found = Some((i, current, br));
                    }
                }
                found
            }
        };
        let Some((i, current, br)) = chosen else {
            trace.verdict = Verdict::Equilibrium;
            break;
        };

        let d_old = profile[i];
        let tiny = c::<T>(16.0) * T::epsilon() * (T::one() + d_old.abs());
        if (br.deadline - d_old).abs() <= tiny {
            trace.verdict = Verdict::Stalled;
            break;
        }
        profile[i] = br.deadline;
        let phi_after = game.potential(&profile)?;
        turn = match opts.order {
            MoveOrder::RoundRobin => (i + 1) % n,
            MoveOrder::MaxGain => 0,
        };
        trace.steps.push(TraceStep {
            step,
            player: i,
            d_old,
            d_new: br.deadline,
            penalty_old: current,
            penalty_new: br.penalty,
            phi_before: phi,
            phi_after,
            next_turn: turn,
        });
        phi = phi_after;

        if !cycle_seen {
            if let Some(start) = find_match(&states, &profile, turn, opts.cycle_tol) {
                cycle_seen = true;
                trace.verdict = Verdict::Cycle {
                    start,
                    period: states.len() - start,
                };
                if opts.stop_on_cycle {
                    break;
                }
            }
            states.push((profile.clone(), turn));
        }
    }
    trace.final_profile = profile;
    log::debug!(
        "dynamics ({mechanism}, {}): {} after {} moves",
        opts.order,
        trace.verdict,
        trace.steps.len()
    );
    Ok(trace)
}

fn find_match<T: Real>(
    states: &[(StrategyProfile<T>, usize)],
    profile: &StrategyProfile<T>,
    turn: usize,
    tol: T,
) -> Option<usize> {
    states
        .iter()
        .position(|(p, t)| *t == turn && p.sup_distance(profile).is_some_and(|d| d <= tol))
}

/// First repeated state of a trace as `(start, period)`, comparing
/// profiles in sup-norm with the trace's cycle tolerance.
pub fn detect_cycle<T: Real>(trace: &DynamicsTrace<T>) -> Option<(usize, usize)> {
    let states = trace.states();
    for k in 1..states.len() {
        let (p, t) = &states[k];
        if let Some(start) = find_match(&states[..k], p, *t, trace.cycle_tol) {
            return Some((start, k - start));
        }
    }
    None
}

/// `delta_k = d_1 / ((alpha-1)/2)^(1/alpha)` after each move of player 0 in
/// the symmetric two-player marginal game.
///
/// Fails when a move leaves the regime `1 < delta < 2^(1/alpha)` or when
/// player 1 does not answer by stacking its job right after player 0's.
pub fn delta_sequence<T: Real>(trace: &DynamicsTrace<T>, alpha: T) -> Result<Vec<T>> {
    if trace.start.len() != 2 {
        return Err(Error::OutOfRegime(format!(
            "expected a two-player trace, got {} players",
            trace.start.len()
        )));
    }
    let unit = spiral_unit(alpha);
    let cap = c::<T>(2.0).powf(alpha.recip());
    let stack = solo_deadline(alpha);
    let mut out = Vec::new();
    let mut d1 = trace.start[0];
    for s in &trace.steps {
        match s.player {
            0 => {
                let delta = s.d_new / unit;
                if !(delta > T::one() && delta < cap) {
                    return Err(Error::OutOfRegime(format!(
                        "step {}: delta = {delta} outside (1, {cap})",
                        s.step
                    )));
                }
                d1 = s.d_new;
                out.push(delta);
            }
            _ => {
                let expect = d1 + stack;
                let tol = c::<T>(1e-6) * (T::one() + expect.abs());
                if (s.d_new - expect).abs() > tol {
                    return Err(Error::OutOfRegime(format!(
                        "step {}: player 1 moved to {} instead of stacking at {expect}",
                        s.step, s.d_new
                    )));
                }
            }
        }
    }
    Ok(out)
}
