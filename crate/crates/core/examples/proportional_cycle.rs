//! Best-response dynamics under proportional sharing never settle: the
//! symmetric unit pair falls into a four-move cycle.

use speedgame::dynamics::{detect_cycle, run_dynamics, DynamicsOptions};
use speedgame::equilibria::verify_equilibrium;
use speedgame::{Game, Mechanism, StrategyProfile};

fn main() -> speedgame::Result<()> {
    let game = Game::symmetric_unit(2, 3.0)?;
    let start = StrategyProfile::new(vec![4.0, 4.0]);
    let check = verify_equilibrium(&game, &start, Mechanism::Proportional)?;
    println!(
        "start (4, 4): equilibrium? {}  (player {} gains {:.6})",
        check.is_nash, check.worst_player, check.max_gain
    );

    let opts = DynamicsOptions {
        max_steps: 12,
        stop_on_cycle: false,
        ..Default::default()
    };
    let trace = run_dynamics(&game, &start, Mechanism::Proportional, &opts)?;
    println!("\nstep  player  deadline      gain    potential");
    for s in &trace.steps {
        println!(
            "{:>4}  {:>6}  {:>8.5}  {:>8.5}  {:>10.5}",
            s.step,
            s.player,
            s.d_new,
            s.gain(),
            s.phi_after
        );
    }
    if let Some((start, period)) = detect_cycle(&trace) {
        println!("\nstate after move {start} recurs every {period} moves");
    }
    Ok(())
}
