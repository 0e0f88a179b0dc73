//! Which two-player instances have a unique equilibrium among the two
//! back-to-back candidates. Prints a coarse map over (p2, w2).
//!
//!     cargo run --release --example uniqueness_region -- [cols] [rows]

use speedgame::equilibria::{
    candidate_profiles, pair_game, uniqueness_scan, verify_equilibrium, RegionScan, ScanConfig,
};
use speedgame::Mechanism;

fn main() -> speedgame::Result<()> {
    let mut args = std::env::args()
        .skip(1)
        .map(|s| s.parse::<usize>().expect("grid size"));
    let cols = args.next().unwrap_or(25);
    let rows = args.next().unwrap_or(15);

    let game = pair_game(1.0, 1.0, 2.0)?;
    let (s21, s12) = candidate_profiles(1.0, 1.0, 2.0);
    for cand in [&s21, &s12] {
        let check = verify_equilibrium(&game, &cand.profile, Mechanism::Marginal)?;
        println!(
            "symmetric pair, {:?} = {:?}: equilibrium {}",
            cand.label, cand.profile.deadlines, check.is_nash
        );
    }

    let scan = uniqueness_scan(&ScanConfig {
        grid: (cols, rows),
        ..Default::default()
    });
    println!("\n'#' only S21, 'o' both, '2' only S12, '.' neither, '!' failed; w2 grows upward");
    for j in (0..rows).rev() {
        let line: String = (0..cols)
            .map(|k| {
                let cell = &scan.column(k)[j];
                match (cell.s21_ne, cell.s12_ne) {
                    (Some(true), Some(false)) => '#',
                    (Some(true), Some(true)) => 'o',
                    (Some(false), Some(true)) => '2',
                    (Some(false), Some(false)) => '.',
                    _ => '!',
                }
            })
            .collect();
        println!("{:>5.2} {line}", scan.column(0)[j].w2);
    }
    println!(
        "      p2 from {} to {}",
        scan.config.p2_range.0, scan.config.p2_range.1
    );

    println!("\n   p2      t1      t2   bound");
    let fmt = |t: Option<f64>| t.map_or("    -".to_string(), |v| format!("{v:>7.3}"));
    for th in scan.thresholds.iter().step_by((cols / 8).max(1)) {
        println!(
            "{:>5.2} {} {} {:>7.3}",
            th.p2,
            fmt(th.t1),
            fmt(th.t2),
            th.upper_bound
        );
    }
    println!("\n{}", RegionScan::DISCLAIMER);
    Ok(())
}
