//! Best-response dynamics under marginal sharing spiral into the
//! equilibrium without ever reaching it. Per-move gains shrink far below
//! double precision, so the run uses 256-bit floats.
//!
//!     cargo run --release --example marginal_spiral -- [steps]

use speedgame::bestresp::closed_form::{marginal_equilibrium, solo_deadline, spiral_unit};
use speedgame::bestresp::{BestResponseOptions, MinimizerOptions};
use speedgame::dynamics::{delta_sequence, run_dynamics, DynamicsOptions};
use speedgame::real::f256;
use speedgame::{Game, GameConfig, Mechanism, Real, StrategyProfile};

fn main() -> speedgame::Result<()> {
    let steps: usize = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("steps must be an integer"))
        .unwrap_or(100);
    let r = f256::from_f64;
    let alpha = r(3.0);
    let unit = spiral_unit(alpha);
    let solo = solo_deadline(alpha);

    let game = Game::symmetric_unit(2, alpha)?.with_config(
        GameConfig::new(alpha)
            .with_epsilon(r(1e-66))
            .with_min_gap(r(1e-30)),
    )?;
    let start = StrategyProfile::new(vec![r(1.2) * unit, r(1.2) * unit + solo]);
    let opts = DynamicsOptions {
        max_steps: steps,
        cycle_tol: r(1e-70),
        best_response: BestResponseOptions {
            minimizer: MinimizerOptions {
                arg_tol: r(1e-34),
                ..Default::default()
            },
            ..Default::default()
        },
        ..Default::default()
    };
    let trace = run_dynamics(&game, &start, Mechanism::Marginal, &opts)?;
    let deltas = delta_sequence(&trace, alpha)?;
    let (e1, e2) = marginal_equilibrium(alpha);
    let target = StrategyProfile::new(vec![e1, e2]);

    println!(
        "verdict: {} after {} moves",
        trace.verdict,
        trace.steps.len()
    );
    println!("move  delta-1                 distance to equilibrium");
    let mut profile = start.clone();
    let mut k = 0;
    for s in &trace.steps {
        profile[s.player] = s.d_new;
        if s.player == 0 {
            let dist = profile.euclidean_distance(&target).unwrap();
            if k < 5 || k % 10 == 0 || k + 1 == deltas.len() {
                println!("{:>4}  {:<22.3e}  {:.3e}", s.step, deltas[k] - r(1.0), dist);
            }
            k += 1;
        }
    }
    Ok(())
}
