use proptest::prelude::*;

use speedgame::dynamics::{run_dynamics, DynamicsOptions, Verdict};
use speedgame::equilibria::{
    candidate_profiles, dominance_condition, pair_game, relative_epsilon, verify_equilibrium_with,
};
use speedgame::formats::{parse_schedule_csv, schedule_csv};
use speedgame::yds::{optimal_energy, yds_schedule};
use speedgame::{validate_schedule, Game, GameConfig, Job, Mechanism, StrategyProfile};

fn instance() -> impl Strategy<Value = (Vec<Job>, StrategyProfile, f64)> {
    (
        prop::collection::vec((0.1..3.0f64, 0.0..4.0f64, 0.1..3.0f64, 0.05..4.0f64), 1..=6),
        2.0..4.0f64,
    )
        .prop_map(|(rows, alpha)| {
            let jobs = rows
                .iter()
                .enumerate()
                .map(|(i, &(w, r, p, _))| Job::new(i, w, r, p))
                .collect();
            let d = rows.iter().map(|&(_, r, _, len)| r + len).collect();
            (jobs, StrategyProfile::new(d), alpha)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn schedules_are_valid((jobs, profile, alpha) in instance()) {
        let s = yds_schedule(&jobs, &profile).unwrap();
        prop_assert!(validate_schedule(&s, &jobs, &profile).is_empty());
        let e = s.energy(alpha);
        let billed: f64 = jobs.iter().map(|j| s.job_energy(j.id, alpha)).sum();
        prop_assert!((e - billed).abs() <= 1e-9 * (1.0 + e));
    }

    #[test]
    fn later_deadlines_never_cost_more(
        (jobs, profile, alpha) in instance(),
        pick in any::<prop::sample::Index>(),
        extra in 0.0..2.0f64,
    ) {
        let i = pick.index(jobs.len());
        let relaxed = profile.with_deadline(i, profile[i] + extra);
        let before = optimal_energy(&jobs, &profile, alpha).unwrap();
        let after = optimal_energy(&jobs, &relaxed, alpha).unwrap();
        prop_assert!(after <= before * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn energy_scales_with_workload((jobs, profile, alpha) in instance(), k in 0.2..5.0f64) {
        let scaled: Vec<Job> = jobs
            .iter()
            .map(|j| Job::new(j.id, j.workload * k, j.release, j.priority))
            .collect();
        let e = optimal_energy(&jobs, &profile, alpha).unwrap();
        let ek = optimal_energy(&scaled, &profile, alpha).unwrap();
        prop_assert!((ek - k.powf(alpha) * e).abs() <= 1e-9 * (1.0 + ek));
    }

    #[test]
    fn potential_tracks_marginal_penalties(
        (jobs, profile, alpha) in instance(),
        pick in any::<prop::sample::Index>(),
        len in 0.05..4.0f64,
    ) {
        let i = pick.index(jobs.len());
        let d = jobs[i].release + len;
        let game = Game::new(jobs, GameConfig::new(alpha)).unwrap();
        let moved = profile.with_deadline(i, d);
        let dp = game.player_penalty(&moved, i, Mechanism::Marginal).unwrap()
            - game.player_penalty(&profile, i, Mechanism::Marginal).unwrap();
        let dphi = game.potential(&moved).unwrap() - game.potential(&profile).unwrap();
        prop_assert!((dp - dphi).abs() <= 1e-9 * (1.0 + dphi.abs()));
    }

    #[test]
    fn schedule_csv_round_trips((jobs, profile, alpha) in instance()) {
        let s = yds_schedule(&jobs, &profile).unwrap();
        let ids: Vec<u64> = (0..jobs.len() as u64).collect();
        let (back, energy) = parse_schedule_csv(&schedule_csv(&s, alpha, &ids)).unwrap();
        prop_assert_eq!(back.segments.len(), s.segments.len());
        let e = s.energy(alpha);
        prop_assert!((energy.unwrap() - e).abs() <= 1e-10 * (1.0 + e));
        prop_assert!((back.energy(alpha) - e).abs() <= 1e-9 * (1.0 + e));
    }

    #[test]
    fn symmetric_priorities_dominance(w2 in 0.05..3.0f64, alpha in 2.0..4.0f64) {
        prop_assert_eq!(dominance_condition(w2, 1.0, alpha), w2 <= 1.0);
    }

    #[test]
    fn s21_runs_back_to_back(p2 in 0.1..5.0f64, w2 in 0.1..3.0f64) {
        let alpha = 2.0;
        let (s21, _) = candidate_profiles(w2, p2, alpha);
        let game = pair_game(w2, p2, alpha).unwrap();
        let s = yds_schedule(game.jobs(), &s21.profile).unwrap();
        let busy: Vec<_> = s.segments.iter().filter(|seg| seg.job.is_some()).collect();
        prop_assert_eq!(busy.len(), 2);
        prop_assert_eq!(busy[0].job, Some(1));
        prop_assert_eq!(busy[1].job, Some(0));
        prop_assert!((busy[0].speed - w2 / s21.lengths[1]).abs() <= 1e-9 * busy[0].speed);
        prop_assert!((busy[1].speed - 1.0 / s21.lengths[0]).abs() <= 1e-9 * busy[1].speed);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn equilibrium_check_agrees_with_dynamics(p2 in 0.1..5.0f64, w2 in 0.1..3.0f64) {
        let alpha = 2.0;
        let (s21, _) = candidate_profiles(w2, p2, alpha);
        let base = pair_game(w2, p2, alpha).unwrap();
        let eps = relative_epsilon(&base, &s21.profile, Mechanism::Marginal, 1e-7).unwrap();
        let check = verify_equilibrium_with(&base, &s21.profile, Mechanism::Marginal, eps).unwrap();
        prop_assume!(check.is_nash);
        let game = base.with_config(GameConfig::new(alpha).with_epsilon(eps)).unwrap();
        let trace = run_dynamics(&game, &s21.profile, Mechanism::Marginal, &DynamicsOptions::default()).unwrap();
        prop_assert_eq!(trace.verdict, Verdict::Equilibrium);
        prop_assert!(trace.steps.is_empty());
    }
}
