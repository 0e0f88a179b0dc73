//! Best responses: a player's penalty-minimizing deadline with everybody
//! else's deadline held fixed.
//!
//! [`numeric_best_response`] works for any instance. The penalty is smooth
//! in the player's deadline except where the structure of the minimum-energy
//! schedule changes, which can only happen near event times of the other
//! jobs. The search places breakpoints there and minimizes piece by piece.
//! [`closed_form`] holds the exact two-player responses used to check it.

pub mod closed_form;
pub mod minimize;

use crate::error::{Error, Result};
use crate::mechanisms::{energy_without, Mechanism};
use crate::model::{Game, StrategyProfile};
use crate::real::{c, Real};
use crate::yds::{optimal_energy, yds_schedule};

pub use closed_form::{closed_form_response_marg, closed_form_response_prop, Responder};
pub use minimize::{MinimizerOptions, PiecewiseMinSpec};

#[derive(Clone, Debug, PartialEq)]
pub struct BestResponse<T = f64> {
    pub player: usize,
    pub deadline: T,
    pub penalty: T,
    /// Branch label (`f1`..`f4`, `h1`..`h4`) for the symmetric two-player
    /// game.
    pub regime: Option<&'static str>,
}

#[derive(Clone, Copy, Debug)]
pub struct BestResponseOptions<T = f64> {
    pub minimizer: MinimizerOptions<T>,
    /// How often the upper search bound may double before giving up.
    pub max_doublings: u32,
}

impl<T: Real> Default for BestResponseOptions<T> {
    fn default() -> Self {
        BestResponseOptions {
            minimizer: MinimizerOptions::default(),
            max_doublings: 60,
        }
    }
}

pub fn numeric_best_response<T: Real>(
    game: &Game<T>,
    profile: &StrategyProfile<T>,
    player: usize,
    mechanism: Mechanism,
) -> Result<BestResponse<T>> {
    numeric_best_response_with(
        game,
        profile,
        player,
        mechanism,
        &BestResponseOptions::default(),
    )
}

pub fn numeric_best_response_with<T: Real>(
    game: &Game<T>,
    profile: &StrategyProfile<T>,
    player: usize,
    mechanism: Mechanism,
    opts: &BestResponseOptions<T>,
) -> Result<BestResponse<T>> {
    game.check_profile(profile)?;
    if player >= game.n_players() {
        return Err(Error::Precondition(format!(
            "player {player} out of range for {} players",
            game.n_players()
        )));
    }
    let mut penalty = PenaltyFn::new(game, profile, player, mechanism)?;
    let lower = game.job(player).release + game.config().min_gap;
    let upper = search_upper(game, profile, player, lower, opts.max_doublings, |x| {
        penalty.eval(x)
    })?;
    let spec = PiecewiseMinSpec::new(lower, upper, breakpoints(game, profile, player))?;
    let current = [profile[player]];
    let best = minimize::minimize_piecewise(|x| penalty.eval(x), &spec, &current, &opts.minimizer)?;
    Ok(BestResponse {
        player,
        deadline: best.x,
        penalty: best.value,
        regime: symmetric_pair_label(game, profile, player, mechanism, best.x),
    })
}

/// Candidate non-smooth points of player `i`'s penalty: other deadlines and
/// releases, their reflections through `r_i`, and midpoints of consecutive
/// event times.
pub fn breakpoints<T: Real>(game: &Game<T>, profile: &StrategyProfile<T>, i: usize) -> Vec<T> {
    let r = game.job(i).release;
    let two = c::<T>(2.0);
    let mut events = Vec::new();
    let mut out = Vec::new();
    for job in game.jobs().iter().filter(|j| j.id != i) {
        let d = profile[job.id];
        events.push(job.release);
        events.push(d);
        out.push((d + r) / two);
        out.push(two * d - r);
        out.push((job.release + r) / two);
        out.push(two * job.release - r);
    }
    events.push(r);
    events.sort_by(|a, b| a.partial_cmp(b).expect("finite event times"));
    events.dedup();
    for w in events.windows(2) {
        out.push((w[0] + w[1]) / two);
    }
    out.extend(events);
    out
}

/// Evaluates one player's penalty as a function of its own deadline.
struct PenaltyFn<'a, T: Real> {
    game: &'a Game<T>,
    trial: StrategyProfile<T>,
    player: usize,
    mechanism: Mechanism,
    /// `E(OPT(d_{-i}))`, independent of the player's own deadline.
    without: T,
}

impl<'a, T: Real> PenaltyFn<'a, T> {
    fn new(
        game: &'a Game<T>,
        profile: &StrategyProfile<T>,
        player: usize,
        mechanism: Mechanism,
    ) -> Result<Self> {
        let without = match mechanism {
            Mechanism::Marginal => energy_without(game.jobs(), profile, game.alpha(), player)?,
            Mechanism::Proportional => T::zero(),
        };
        Ok(PenaltyFn {
            game,
            trial: profile.clone(),
            player,
            mechanism,
            without,
        })
    }

    fn eval(&mut self, x: T) -> Result<T> {
        self.trial[self.player] = x;
        let (jobs, alpha) = (self.game.jobs(), self.game.alpha());
        let share = match self.mechanism {
            Mechanism::Proportional => {
                yds_schedule(jobs, &self.trial)?.job_energy(self.player, alpha)
            }
            Mechanism::Marginal => optimal_energy(jobs, &self.trial, alpha)? - self.without,
        };
        Ok(share + self.game.waiting_cost(self.player, x))
    }
}

/// Past every event time the energy share keeps falling while waiting cost
/// rises linearly, so some bound has a positive slope. Start from the lone
/// player optimum beyond the last event and double the distance to `r_i`
/// until the slope turns positive.
fn search_upper<T: Real>(
    game: &Game<T>,
    profile: &StrategyProfile<T>,
    player: usize,
    lower: T,
    max_doublings: u32,
    mut penalty: impl FnMut(T) -> Result<T>,
) -> Result<T> {
    let alpha = game.alpha();
    let jobs = game.jobs();
    let last_event = jobs
        .iter()
        .filter(|j| j.id != player)
        .fold(jobs[player].release, |m, j| {
            m.max(j.release).max(profile[j.id])
        });
    let total_work = jobs.iter().fold(T::zero(), |s, j| s + j.workload);
    let min_priority = jobs.iter().fold(jobs[0].priority, |m, j| m.min(j.priority));
    let reach = closed_form::solo_deadline(alpha) * total_work / min_priority.powf(alpha.recip());
    let r = jobs[player].release;
    let mut upper = last_event.max(lower) + reach;
    let mut slope = T::zero();
    for doublings in 0..=max_doublings {
        let h = T::epsilon().powf(c(1.0 / 3.0)) * (T::one() + upper.abs());
        slope = (penalty(upper)? - penalty(upper - h)?) / h;
        if slope > T::zero() {
            return Ok(upper);
        }
        if doublings < max_doublings {
            upper = r + c::<T>(2.0) * (upper - r);
        }
    }
    Err(Error::UnboundedWindow {
        player,
        upper: upper.to_f64(),
        slope: slope.to_f64(),
        doublings: max_doublings,
    })
}

/// Branch label when the game is the symmetric unit two-player game.
fn symmetric_pair_label<T: Real>(
    game: &Game<T>,
    profile: &StrategyProfile<T>,
    player: usize,
    mechanism: Mechanism,
    x: T,
) -> Option<&'static str> {
    // With zero releases both waiting-cost modes coincide.
    let unit = game.n_players() == 2
        && game
            .jobs()
            .iter()
            .all(|j| j.workload == T::one() && j.release == T::zero() && j.priority == T::one());
    if !unit {
        return None;
    }
    let k = closed_form::branch(x, profile[1 - player]);
    Some(match mechanism {
        Mechanism::Proportional => closed_form::prop_label(k),
        Mechanism::Marginal => closed_form::marg_label(k),
    })
}
