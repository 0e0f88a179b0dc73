//! Numeric best responses in the symmetric two-player game, compared with
//! the piecewise closed form under proportional sharing.

use speedgame::bestresp::closed_form::{closed_form_response_prop, prop_thresholds};
use speedgame::bestresp::numeric_best_response;
use speedgame::{Game, GameConfig, Job, Mechanism, StrategyProfile};

fn main() -> speedgame::Result<()> {
    let alpha = 3.0;
    let t = prop_thresholds(alpha)?;
    println!(
        "regime thresholds at alpha {alpha}: d21 = {:.6}, d22 = {:.6}, d13 = {:.6}",
        t.d21, t.d22, t.d13
    );

    let game = Game::symmetric_unit(2, alpha)?;
    println!("\n   d2   numeric d1*   closed form   regime");
    for d2 in [0.3, 0.8, 1.0, 1.2, 1.4, 2.0, 3.0] {
        let br = numeric_best_response(
            &game,
            &StrategyProfile::new(vec![1.0, d2]),
            0,
            Mechanism::Proportional,
        )?;
        let cf = closed_form_response_prop(d2, alpha)?;
        println!(
            "{d2:>5.2}   {:>11.8}   {:>11.8}   {}",
            br.deadline,
            cf.deadline,
            br.regime.unwrap_or("-")
        );
    }

    // Any instance works numerically; here a heavy late job responds to two others.
    let jobs = vec![
        Job::new(0, 1.0, 0.0, 1.0),
        Job::new(1, 1.0, 0.5, 2.0),
        Job::new(2, 3.0, 0.2, 0.7),
    ];
    let game = Game::new(jobs, GameConfig::new(2.5))?;
    let profile = StrategyProfile::new(vec![1.0, 1.5, 6.0]);
    let before = game.player_penalty(&profile, 2, Mechanism::Marginal)?;
    let br = numeric_best_response(&game, &profile, 2, Mechanism::Marginal)?;
    println!(
        "\nplayer 2 under marginal sharing: deadline 6.0 -> {:.6}, penalty {before:.6} -> {:.6}",
        br.deadline, br.penalty
    );
    Ok(())
}
