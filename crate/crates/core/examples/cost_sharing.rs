//! Proportional and marginal cost shares side by side, the potential
//! identity under marginal sharing, and the twin effect that breaks
//! cross-monotonicity.

use speedgame::{Game, GameConfig, Job, Mechanism, StrategyProfile};

fn main() -> speedgame::Result<()> {
    let alpha = 3.0;
    let jobs = vec![
        Job::new(0, 1.0, 0.0, 1.0),
        Job::new(1, 2.0, 0.5, 0.5),
        Job::new(2, 0.5, 1.0, 2.0),
    ];
    let game = Game::new(jobs, GameConfig::new(alpha))?;
    let profile = StrategyProfile::new(vec![1.5, 3.0, 2.0]);

    let prop = game.penalties(&profile, Mechanism::Proportional)?;
    let marg = game.penalties(&profile, Mechanism::Marginal)?;
    println!("player  proportional  marginal   waiting");
    for (p, m) in prop.players.iter().zip(&marg.players) {
        println!(
            "{:>6}  {:>12.6}  {:>8.6}  {:>8.4}",
            p.id, p.cost_share, m.cost_share, p.waiting_cost
        );
    }
    println!(
        "energy {:.6}: proportional bills {:.6}, marginal bills {:.6}",
        prop.optimal_energy, prop.total_cost_share, marg.total_cost_share
    );

    // A unilateral move changes the mover's marginal penalty by exactly the
    // change in the potential.
    let moved = profile.with_deadline(1, 2.4);
    let d_pen = game.player_penalty(&moved, 1, Mechanism::Marginal)?
        - game.player_penalty(&profile, 1, Mechanism::Marginal)?;
    let d_phi = game.potential(&moved)? - game.potential(&profile)?;
    println!("\nplayer 1 moves 3.0 -> 2.4: d(penalty) = {d_pen:.9}, d(potential) = {d_phi:.9}");

    // Adding an identical twin raises a unit job's marginal share from 1 to 2^alpha - 1.
    for a in [2.0, 3.0] {
        let alone = Game::symmetric_unit(1, a)?
            .shares(&StrategyProfile::new(vec![1.0]), Mechanism::Marginal)?;
        let pair = Game::symmetric_unit(2, a)?
            .shares(&StrategyProfile::new(vec![1.0, 1.0]), Mechanism::Marginal)?;
        println!(
            "alpha {a}: share alone {:.6}, with twin {:.6}",
            alone[0], pair[0]
        );
    }
    Ok(())
}
