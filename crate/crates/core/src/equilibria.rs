//! Equilibrium checks and the two-player candidate equilibria.
//!
//! With two jobs released at time 0, an equilibrium runs the jobs back to
//! back. `S21` runs player 2 first, `S12` player 1 first. Player 1 is
//! normalised to `w_1 = p_1 = 1`; player 2 has workload `w_2` and
//! priority `p_2`.

use std::fmt;

use crate::bestresp::closed_form::solo_deadline;
use crate::bestresp::{numeric_best_response, BestResponse};
use crate::error::Result;
use crate::mechanisms::Mechanism;
use crate::model::{Game, GameConfig, Job, StrategyProfile};
use crate::real::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct NashCheck<T = f64> {
    pub is_nash: bool,
    /// Player with the largest available improvement.
    pub worst_player: usize,
    pub max_gain: T,
    pub epsilon: T,
    pub penalties: Vec<T>,
    pub responses: Vec<BestResponse<T>>,
}

impl<T: Real> NashCheck<T> {
    pub fn gain(&self, player: usize) -> T {
        self.penalties[player] - self.responses[player].penalty
    }
}

/// Epsilon-equilibrium check with the game's epsilon.
pub fn verify_equilibrium<T: Real>(
    game: &Game<T>,
    profile: &StrategyProfile<T>,
    mechanism: Mechanism,
) -> Result<NashCheck<T>> {
    verify_equilibrium_with(game, profile, mechanism, game.config().epsilon)
}

pub fn verify_equilibrium_with<T: Real>(
    game: &Game<T>,
    profile: &StrategyProfile<T>,
    mechanism: Mechanism,
    epsilon: T,
) -> Result<NashCheck<T>> {
    let report = game.penalties(profile, mechanism)?;
    let penalties: Vec<T> = report.players.iter().map(|p| p.penalty).collect();
    let mut responses = Vec::with_capacity(penalties.len());
    let mut worst = (0, T::zero());
    for i in 0..game.n_players() {
        let br = numeric_best_response(game, profile, i, mechanism)?;
        let gain = penalties[i] - br.penalty;
        if i == 0 || gain > worst.1 {
            worst = (i, gain);
        }
        responses.push(br);
    }
    Ok(NashCheck {
        is_nash: worst.1 <= epsilon,
        worst_player: worst.0,
        max_gain: worst.1,
        epsilon,
        penalties,
        responses,
    })
}

/// `rel * (1 + max |penalty|)`, the scale-aware tolerance used by the scan.
pub fn relative_epsilon<T: Real>(
    game: &Game<T>,
    profile: &StrategyProfile<T>,
    mechanism: Mechanism,
    rel: T,
) -> Result<T> {
    let report = game.penalties(profile, mechanism)?;
    let scale = report
        .players
        .iter()
        .fold(T::zero(), |m, p| m.max(p.penalty.abs()));
    Ok(rel * (T::one() + scale))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CandidateLabel {
    /// Player 2's job runs first.
    S21,
    /// Player 1's job runs first.
    S12,
}

impl fmt::Display for CandidateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CandidateLabel::S21 => "S21",
            CandidateLabel::S12 => "S12",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CandidateProfile<T = f64> {
    pub label: CandidateLabel,
    /// Execution lengths of player 1's and player 2's jobs.
    pub lengths: [T; 2],
    pub profile: StrategyProfile<T>,
}

/// The two-player game with `w_1 = p_1 = 1` and zero releases.
pub fn pair_game<T: Real>(w2: T, p2: T, alpha: T) -> Result<Game<T>> {
    Game::new(
        vec![
            Job::new(0, T::one(), T::zero(), T::one()),
            Job::new(1, w2, T::zero(), p2),
        ],
        GameConfig::new(alpha),
    )
}

/// Both back-to-back candidates. The job running first is charged for the
/// waiting of both players, so its length uses `p_1 + p_2`.
pub fn candidate_profiles<T: Real>(
    w2: T,
    p2: T,
    alpha: T,
) -> (CandidateProfile<T>, CandidateProfile<T>) {
    let root = solo_deadline(alpha);
    let inv = alpha.recip();
    let both = (T::one() + p2).powf(inv);

    let l2_star = w2 * root / both;
    let l1_star = root;
    let s21 = CandidateProfile {
        label: CandidateLabel::S21,
        lengths: [l1_star, l2_star],
        profile: StrategyProfile::new(vec![l2_star + l1_star, l2_star]),
    };

    let l1 = root / both;
    let l2 = w2 * root / p2.powf(inv);
    let s12 = CandidateProfile {
        label: CandidateLabel::S12,
        lengths: [l1, l2],
        profile: StrategyProfile::new(vec![l1, l1 + l2]),
    };
    (s21, s12)
}

/// Largest `w_2` for which `S21` has the smaller effective social cost.
pub fn dominance_bound<T: Real>(p2: T, alpha: T) -> T {
    let k = (alpha - T::one()) / alpha;
    let top = (T::one() + p2).powf(k);
    (top - T::one()) / (top - p2.powf(k))
}

pub fn dominance_condition<T: Real>(w2: T, p2: T, alpha: T) -> bool {
    w2 <= dominance_bound(p2, alpha)
}

#[derive(Clone, Debug)]
pub struct ScanConfig {
    pub p2_range: (f64, f64),
    pub w2_range: (f64, f64),
    /// Grid points along `p_2` and `w_2`, endpoints included.
    pub grid: (usize, usize),
    pub alpha: f64,
    pub mechanism: Mechanism,
    /// Relative tolerance for the epsilon-equilibrium flags.
    pub rel_epsilon: f64,
    pub bisection_iters: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            p2_range: (0.1, 5.0),
            w2_range: (0.1, 3.0),
            grid: (100, 100),
            alpha: 2.0,
            mechanism: Mechanism::Marginal,
            rel_epsilon: 1e-7,
            bisection_iters: 40,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanCell {
    pub p2: f64,
    pub w2: f64,
    /// `None` when the check failed; see `error`.
    pub s21_ne: Option<bool>,
    pub s12_ne: Option<bool>,
    pub dominance: bool,
    /// Each player's available improvement at `S12`, net of epsilon.
    pub s12_excess: Option<[f64; 2]>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ColumnThresholds {
    pub p2: f64,
    /// `w_2` where player 1 (resp. 2) stops wanting to leave `S12`; `None`
    /// when its incentive never changes sign on the column.
    pub t1: Option<f64>,
    pub t2: Option<f64>,
    pub upper_bound: f64,
    /// Whether the incentive changed sign at most once along the column.
    pub single_sign_change: [bool; 2],
}

#[derive(Clone, Debug)]
pub struct RegionScan {
    pub config: ScanConfig,
    /// Column-major: all `w_2` values for the first `p_2`, then the next.
    pub cells: Vec<ScanCell>,
    pub thresholds: Vec<ColumnThresholds>,
}

impl RegionScan {
    pub const DISCLAIMER: &'static str =
        "only the back-to-back candidates S21 and S12 are tested; \
         uniqueness among them does not prove global uniqueness";

    pub fn column(&self, k: usize) -> &[ScanCell] {
        let m = self.config.grid.1;
        &self.cells[k * m..(k + 1) * m]
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|k| {
                if k == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * k as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

struct CellEval {
    s21: NashCheck<f64>,
    s12: NashCheck<f64>,
}

fn eval_cell(cfg: &ScanConfig, p2: f64, w2: f64) -> Result<CellEval> {
    let game = pair_game(w2, p2, cfg.alpha)?;
    let (s21, s12) = candidate_profiles(w2, p2, cfg.alpha);
    let check = |cand: &CandidateProfile<f64>| -> Result<NashCheck<f64>> {
        let eps = relative_epsilon(&game, &cand.profile, cfg.mechanism, cfg.rel_epsilon)?;
        verify_equilibrium_with(&game, &cand.profile, cfg.mechanism, eps)
    };
    Ok(CellEval {
        s21: check(&s21)?,
        s12: check(&s12)?,
    })
}

fn s12_excess(cfg: &ScanConfig, p2: f64, w2: f64) -> Result<[f64; 2]> {
    let s12 = eval_cell(cfg, p2, w2)?.s12;
    Ok([s12.gain(0) - s12.epsilon, s12.gain(1) - s12.epsilon])
}

/// Flags both candidates on every grid cell, then locates each player's
/// deviation threshold on every `p_2` column by bisection in `w_2`.
pub fn uniqueness_scan(cfg: &ScanConfig) -> RegionScan {
    let p2s = linspace(cfg.p2_range.0, cfg.p2_range.1, cfg.grid.0);
    let w2s = linspace(cfg.w2_range.0, cfg.w2_range.1, cfg.grid.1);
    let mut cells = Vec::with_capacity(p2s.len() * w2s.len());
    let mut thresholds = Vec::with_capacity(p2s.len());

    for &p2 in &p2s {
        let first = cells.len();
        for &w2 in &w2s {
            let dominance = dominance_condition(w2, p2, cfg.alpha);
            let cell = match eval_cell(cfg, p2, w2) {
                Ok(e) => ScanCell {
                    p2,
                    w2,
                    s21_ne: Some(e.s21.is_nash),
                    s12_ne: Some(e.s12.is_nash),
                    dominance,
                    s12_excess: Some([
                        e.s12.gain(0) - e.s12.epsilon,
                        e.s12.gain(1) - e.s12.epsilon,
                    ]),
                    error: None,
                },
                Err(err) => {
                    log::warn!("scan cell p2={p2} w2={w2}: {err}");
                    ScanCell {
                        p2,
                        w2,
                        s21_ne: None,
                        s12_ne: None,
                        dominance,
                        s12_excess: None,
                        error: Some(err.to_string()),
                    }
                }
            };
            cells.push(cell);
        }
        let column = &cells[first..];
        let mut t = [None, None];
        let mut single = [true, true];
        for j in 0..2 {
            let signs: Vec<(f64, bool)> = column
                .iter()
                .filter_map(|cell| cell.s12_excess.map(|e| (cell.w2, e[j] > 0.0)))
                .collect();
            let changes: Vec<usize> = (1..signs.len())
                .filter(|&k| signs[k].1 != signs[k - 1].1)
                .collect();
            single[j] = changes.len() <= 1;
            if let Some(&k) = changes.first() {
                t[j] = bisect_threshold(cfg, p2, j, signs[k - 1], signs[k].0);
            }
        }
        thresholds.push(ColumnThresholds {
            p2,
            t1: t[0],
            t2: t[1],
            upper_bound: dominance_bound(p2, cfg.alpha),
            single_sign_change: single,
        });
    }
    RegionScan {
        config: cfg.clone(),
        cells,
        thresholds,
    }
}

/// Refines the first sign change of player `j`'s incentive between two
/// adjacent grid values of `w_2`.
fn bisect_threshold(
    cfg: &ScanConfig,
    p2: f64,
    j: usize,
    (w_lo, sign_lo): (f64, bool),
    w_hi: f64,
) -> Option<f64> {
    let (mut lo, mut hi) = (w_lo, w_hi);
    for _ in 0..cfg.bisection_iters {
        let mid = 0.5 * (lo + hi);
        match s12_excess(cfg, p2, mid) {
            Ok(e) if (e[j] > 0.0) == sign_lo => lo = mid,
            Ok(_) => hi = mid,
            Err(err) => {
                log::warn!("threshold bisection p2={p2} w2={mid}: {err}");
                return None;
            }
        }
    }
    Some(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    const C3: f64 = 1.2599210498948732;

    #[test]
    fn symmetric_candidates() {
        let (s21, s12) = candidate_profiles(1.0, 1.0, 3.0);
        assert!((s21.profile[1] - 1.0).abs() < 1e-15);
        assert!((s21.profile[0] - (1.0 + C3)).abs() < 1e-14);
        assert!((s12.profile[0] - s21.profile[1]).abs() < 1e-15);
        assert!((s12.profile[1] - s21.profile[0]).abs() < 1e-15);
    }

    #[test]
    fn s21_schedule_runs_job_two_first() {
        let (w2, p2, alpha) = (0.5, 2.0, 2.0);
        let (s21, _) = candidate_profiles(w2, p2, alpha);
        let s = crate::yds::yds_schedule(pair_game(w2, p2, alpha).unwrap().jobs(), &s21.profile)
            .unwrap();
        assert_eq!(s.segments.len(), 2);
        assert_eq!(s.segments[0].job, Some(1));
        assert!((s.segments[0].speed - w2 / s21.lengths[1]).abs() < 1e-12);
        assert!((s.segments[1].speed - 1.0 / s21.lengths[0]).abs() < 1e-12);
    }

    #[test]
    fn dominance_examples() {
        for alpha in [2.0, 2.5, 3.0] {
            assert!((dominance_bound(1.0, alpha) - 1.0).abs() < 1e-14);
        }
        let b = dominance_bound(3.0, 2.0);
        assert!((b - 1.0 / (2.0 - 3f64.sqrt())).abs() < 1e-12);
        assert!(dominance_condition(2.0, 3.0, 2.0));
        assert!(!dominance_condition(1.01, 1.0, 2.0));
    }

    #[test]
    fn symmetric_pair_has_both_equilibria() {
        let g = pair_game(1.0, 1.0, 3.0).unwrap();
        let (s21, s12) = candidate_profiles(1.0, 1.0, 3.0);
        for cand in [s21, s12] {
            let check = verify_equilibrium(&g, &cand.profile, Mechanism::Marginal).unwrap();
            assert!(check.is_nash, "{} max gain {}", cand.label, check.max_gain);
        }
    }

    #[test]
    fn far_profile_is_not_nash() {
        let g = Game::symmetric_unit(2, 3.0).unwrap();
        let check = verify_equilibrium(
            &g,
            &StrategyProfile::new(vec![4.0, 4.0]),
            Mechanism::Proportional,
        )
        .unwrap();
        assert!(!check.is_nash && check.max_gain > 0.0);
    }

    #[test]
    fn small_scan() {
        let cfg = ScanConfig {
            grid: (3, 5),
            bisection_iters: 10,
            ..Default::default()
        };
        let scan = uniqueness_scan(&cfg);
        assert_eq!(scan.cells.len(), 15);
        assert_eq!(scan.thresholds.len(), 3);
        assert!(scan.cells.iter().all(|c| c.error.is_none()));
        assert_eq!(scan.column(1)[0].p2, scan.thresholds[1].p2);
    }

    #[test]
    fn linspace_endpoints() {
        let xs = linspace(0.1, 5.0, 3);
        assert_eq!((xs[0], xs[2]), (0.1, 5.0));
        assert!((xs[1] - 2.55).abs() < 1e-15);
        assert_eq!(linspace(1.0, 2.0, 1), vec![1.0]);
    }
}
