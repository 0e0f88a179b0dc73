//! Cost-sharing mechanisms and the resulting penalties.
//!
//! * Proportional: each player pays the energy burnt while its own job runs
//!   in the minimum-energy schedule. Shares add up to `E(OPT(d))`.
//! * Marginal: each player pays `E(OPT(d)) - E(OPT(d_{-i}))`, the energy its
//!   presence adds. This makes `Phi(d) = sum waiting_i + E(OPT(d))` an exact
//!   potential: a unilateral change of a player's penalty changes `Phi` by
//!   the same amount.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{Game, Job, StrategyProfile};
use crate::real::Real;
use crate::yds::{optimal_energy, yds_schedule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mechanism {
    Proportional,
    Marginal,
}

impl Mechanism {
    pub fn as_str(self) -> &'static str {
        match self {
            Mechanism::Proportional => "proportional",
            Mechanism::Marginal => "marginal",
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mechanism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "proportional" => Ok(Mechanism::Proportional),
            "marginal" => Ok(Mechanism::Marginal),
            other => Err(Error::InvalidConfig(format!(
                "unknown mechanism {other:?} (expected proportional|marginal)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlayerCost<T = f64> {
    pub id: usize,
    pub cost_share: T,
    pub waiting_cost: T,
    /// `cost_share + waiting_cost`
    pub penalty: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CostReport<T = f64> {
    pub mechanism: Mechanism,
    pub players: Vec<PlayerCost<T>>,
    pub total_cost_share: T,
    pub total_waiting_cost: T,
    pub optimal_energy: T,
    /// Sum of all penalties.
    pub utilitarian_social_cost: T,
    /// Sum of waiting costs plus `E(OPT(d))`; the potential `Phi(d)`.
    pub effective_social_cost: T,
}

/// Per-job energy in the minimum-energy schedule.
pub fn proportional_shares<T: Real>(
    jobs: &[Job<T>],
    profile: &StrategyProfile<T>,
    alpha: T,
) -> Result<Vec<T>> {
    let schedule = yds_schedule(jobs, profile)?;
    Ok(jobs
        .iter()
        .map(|j| schedule.job_energy(j.id, alpha))
        .collect())
}

/// `E(OPT(d)) - E(OPT(d_{-i}))` for every player, from `n + 1` schedules.
pub fn marginal_shares<T: Real>(
    jobs: &[Job<T>],
    profile: &StrategyProfile<T>,
    alpha: T,
) -> Result<Vec<T>> {
    let total = optimal_energy(jobs, profile, alpha)?;
    (0..jobs.len())
        .map(|i| Ok(total - energy_without(jobs, profile, alpha, i)?))
        .collect()
}

/// `E(OPT(d_{-i}))` where `i` is a position in `jobs`.
pub(crate) fn energy_without<T: Real>(
    jobs: &[Job<T>],
    profile: &StrategyProfile<T>,
    alpha: T,
    i: usize,
) -> Result<T> {
    let rest: Vec<Job<T>> = jobs
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != i)
        .map(|(_, j)| *j)
        .collect();
    optimal_energy(&rest, profile, alpha)
}

impl<T: Real> Game<T> {
    pub fn shares(&self, profile: &StrategyProfile<T>, mechanism: Mechanism) -> Result<Vec<T>> {
        self.check_profile(profile)?;
        match mechanism {
            Mechanism::Proportional => proportional_shares(self.jobs(), profile, self.alpha()),
            Mechanism::Marginal => marginal_shares(self.jobs(), profile, self.alpha()),
        }
    }

    pub fn penalties(
        &self,
        profile: &StrategyProfile<T>,
        mechanism: Mechanism,
    ) -> Result<CostReport<T>> {
        let shares = self.shares(profile, mechanism)?;
        let optimal = optimal_energy(self.jobs(), profile, self.alpha())?;
        let players: Vec<PlayerCost<T>> = shares
            .into_iter()
            .enumerate()
            .map(|(id, share)| {
                let waiting = self.waiting_cost(id, profile[id]);
                PlayerCost {
                    id,
                    cost_share: share,
                    waiting_cost: waiting,
                    penalty: share + waiting,
                }
            })
            .collect();
        let total_cost_share = players.iter().fold(T::zero(), |a, p| a + p.cost_share);
        let total_waiting_cost = players.iter().fold(T::zero(), |a, p| a + p.waiting_cost);
        Ok(CostReport {
            mechanism,
            total_cost_share,
            total_waiting_cost,
            optimal_energy: optimal,
            utilitarian_social_cost: total_cost_share + total_waiting_cost,
            effective_social_cost: total_waiting_cost + optimal,
            players,
        })
    }

    /// Penalty of a single player, without computing the others'.
    pub fn player_penalty(
        &self,
        profile: &StrategyProfile<T>,
        player: usize,
        mechanism: Mechanism,
    ) -> Result<T> {
        self.check_profile(profile)?;
        let share = match mechanism {
            Mechanism::Proportional => {
                yds_schedule(self.jobs(), profile)?.job_energy(player, self.alpha())
            }
            Mechanism::Marginal => {
                optimal_energy(self.jobs(), profile, self.alpha())?
                    - energy_without(self.jobs(), profile, self.alpha(), player)?
            }
        };
        Ok(share + self.waiting_cost(player, profile[player]))
    }

    /// Effective social cost `Phi(d) = sum waiting_i + E(OPT(d))`.
    pub fn potential(&self, profile: &StrategyProfile<T>) -> Result<T> {
        self.check_profile(profile)?;
        let waiting =
            (0..self.n_players()).fold(T::zero(), |a, i| a + self.waiting_cost(i, profile[i]));
        Ok(waiting + optimal_energy(self.jobs(), profile, self.alpha())?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{GameConfig, WaitingCostMode};

    fn game(spec: &[(f64, f64, f64)], alpha: f64) -> Game {
        let jobs = spec
            .iter()
            .enumerate()
            .map(|(i, &(w, r, p))| Job::new(i, w, r, p))
            .collect();
        Game::new(jobs, GameConfig::new(alpha)).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn proportional_examples() {
        let g = game(&[(2.0, 0.0, 1.0), (1.0, 0.0, 1.0)], 2.0);
        let s = g
            .shares(&vec![1.0, 2.0].into(), Mechanism::Proportional)
            .unwrap();
        assert_eq!(s, vec![4.0, 1.0]);

        let g = game(&[(1.0, 0.0, 1.0)], 2.0);
        assert_eq!(
            g.shares(&vec![1.0].into(), Mechanism::Proportional)
                .unwrap(),
            vec![1.0]
        );

        let g = game(&[(1.0, 0.0, 1.0), (1.0, 0.0, 1.0)], 2.0);
        let s = g
            .shares(&vec![1.0, 1.0].into(), Mechanism::Proportional)
            .unwrap();
        assert_eq!(s, vec![2.0, 2.0]);
    }

    #[test]
    fn marginal_examples() {
        let g = game(&[(2.0, 0.0, 1.0), (1.0, 0.0, 1.0)], 2.0);
        let s = g
            .shares(&vec![1.0, 2.0].into(), Mechanism::Marginal)
            .unwrap();
        assert!(close(s[0], 4.5, 1e-12) && close(s[1], 1.0, 1e-12), "{s:?}");

        let g = game(&[(1.3, 0.2, 1.0)], 2.5);
        let p = vec![1.7].into();
        let m = g.shares(&p, Mechanism::Marginal).unwrap();
        let q = g.shares(&p, Mechanism::Proportional).unwrap();
        assert!(close(m[0], q[0], 1e-12));
    }

    #[test]
    fn tight_example_shares() {
        let n = 4;
        let g = game(&vec![(1.0 / n as f64, 0.0, 1.0); n], 2.0);
        let s = g.shares(&vec![1.0; n].into(), Mechanism::Marginal).unwrap();
        for x in s {
            assert!(close(x, 0.4375, 1e-12), "{x}");
        }
    }

    #[test]
    fn single_player_penalty_at_optimum() {
        // d = (alpha - 1)^(1/alpha), alpha = 3: penalty 3 * 2^(-2/3).
        let alpha = 3.0_f64;
        let d = (alpha - 1.0).powf(1.0 / alpha);
        let expected = 3.0 * 2f64.powf(-2.0 / 3.0);
        assert!(close(expected, 1.889881574842, 1e-12));
        for mech in [Mechanism::Proportional, Mechanism::Marginal] {
            let g = game(&[(1.0, 0.0, 1.0)], alpha);
            let r = g.penalties(&vec![d].into(), mech).unwrap();
            assert!(close(r.players[0].penalty, expected, 1e-12));

            // Relative mode is invariant under shifting the release.
            let shifted = Game::new(
                vec![Job::new(0, 1.0, 5.0, 1.0)],
                GameConfig::new(alpha).with_mode(WaitingCostMode::Relative),
            )
            .unwrap();
            let r = shifted.penalties(&vec![5.0 + d].into(), mech).unwrap();
            assert!(close(r.players[0].penalty, expected, 1e-12));
        }
    }

    #[test]
    fn two_unit_players_swapped_roles() {
        let g = game(&[(1.0, 0.0, 1.0), (1.0, 0.0, 1.0)], 3.0);
        let r = g
            .penalties(&vec![2.0, 1.0].into(), Mechanism::Proportional)
            .unwrap();
        assert!(close(r.players[0].penalty, 3.0, 1e-12));
        assert!(close(r.players[1].penalty, 2.0, 1e-12));
    }

    #[test]
    fn report_aggregates_are_consistent() {
        let g = game(&[(1.0, 0.0, 2.0), (0.5, 0.3, 1.0), (2.0, 0.1, 0.5)], 2.5);
        let p: StrategyProfile = vec![1.1, 0.9, 3.0].into();
        for mech in [Mechanism::Proportional, Mechanism::Marginal] {
            let r = g.penalties(&p, mech).unwrap();
            let sum: f64 = r.players.iter().map(|p| p.penalty).sum();
            assert!(close(r.utilitarian_social_cost, sum, 1e-12));
            assert!(close(
                r.effective_social_cost,
                g.potential(&p).unwrap(),
                1e-12
            ));
            for (i, pc) in r.players.iter().enumerate() {
                assert!(close(pc.penalty, pc.cost_share + pc.waiting_cost, 1e-15));
                assert!(close(
                    pc.penalty,
                    g.player_penalty(&p, i, mech).unwrap(),
                    1e-12
                ));
            }
        }
        let r = g.penalties(&p, Mechanism::Proportional).unwrap();
        assert!(close(r.total_cost_share, r.optimal_energy, 1e-12));
    }

    #[test]
    fn potential_examples() {
        let g = game(&[(1.0, 0.0, 1.0)], 2.0);
        assert_eq!(g.potential(&vec![1.0].into()).unwrap(), 2.0);

        // Unit pair at S21, alpha = 3: d = (1 + 2^(1/3), 1).
        let c = 2f64.powf(1.0 / 3.0);
        let g = game(&[(1.0, 0.0, 1.0), (1.0, 0.0, 1.0)], 3.0);
        let phi = g.potential(&vec![1.0 + c, 1.0].into()).unwrap();
        // waiting (2 + c) plus energy 1 + c^(-2)
        assert!(close(phi, 3.0 + c + c.powi(-2), 1e-12), "{phi}");
    }

    #[test]
    fn infeasible_profile_is_rejected() {
        let g = game(&[(1.0, 1.0, 1.0)], 2.0);
        for mech in [Mechanism::Proportional, Mechanism::Marginal] {
            assert!(g.penalties(&vec![0.5].into(), mech).is_err());
        }
    }

    #[test]
    fn parses_mechanism_names() {
        assert_eq!(
            "marginal".parse::<Mechanism>().unwrap(),
            Mechanism::Marginal
        );
        assert!("shapley".parse::<Mechanism>().is_err());
    }
}
