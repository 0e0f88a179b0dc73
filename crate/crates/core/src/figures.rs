//! Data behind the best-response, convergence and uniqueness plots.

use std::fs;
use std::path::{Path, PathBuf};

use crate::bestresp::closed_form::{solo_deadline, spiral_unit};
use crate::bestresp::numeric_best_response;
use crate::equilibria::{linspace, uniqueness_scan, ScanConfig};
use crate::error::Result;
use crate::formats::{curve_row, region_csv, thresholds_csv, CURVE_HEADER};
use crate::mechanisms::Mechanism;
use crate::model::{Game, StrategyProfile};

#[derive(Clone, Debug)]
pub struct FigureConfig {
    /// Exponent for the four best-response curves.
    pub alpha: f64,
    /// Sample points per curve.
    pub samples: usize,
    /// The uniqueness scan, run at its own exponent.
    pub scan: ScanConfig,
}

impl Default for FigureConfig {
    fn default() -> Self {
        FigureConfig {
            alpha: 3.0,
            samples: 200,
            scan: ScanConfig::default(),
        }
    }
}

/// Best response of `player` in the symmetric unit pair as the other
/// player's deadline sweeps `others`.
pub fn response_curve(
    alpha: f64,
    mechanism: Mechanism,
    player: usize,
    others: &[f64],
) -> Result<String> {
    let game = Game::symmetric_unit(2, alpha)?;
    let mut out = String::from(CURVE_HEADER);
    for &y in others {
        let mut d = vec![y, y];
        d[player] = y + solo_deadline(alpha);
        let br = numeric_best_response(&game, &StrategyProfile::new(d), player, mechanism)?;
        out.push_str(&curve_row(y, &br));
    }
    Ok(out)
}

/// Open interval `(lo, hi)` sampled at `n` interior points.
fn interior(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n + 1) as f64;
    (1..=n).map(|k| lo + step * k as f64).collect()
}

/// Writes every figure's CSV into `dir` and returns the paths.
pub fn write_figures(dir: &Path, cfg: &FigureConfig) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let a = cfg.alpha;
    let n = cfg.samples;
    let solo = solo_deadline(a);
    let unit = spiral_unit(a);
    let cap = 2f64.powf(1.0 / a);
    let mut files: Vec<(&str, String)> = Vec::new();

    let d2s = linspace(0.02, 3.0 * solo, n);
    files.push((
        "bestResponse.csv",
        response_curve(a, Mechanism::Proportional, 0, &d2s)?,
    ));

    let mut both = String::from("# player=1 responds to d_other=d2\n");
    both.push_str(&response_curve(a, Mechanism::Proportional, 0, &d2s)?);
    both.push_str("# player=2 responds to d_other=d1\n");
    both.push_str(&response_curve(a, Mechanism::Proportional, 1, &d2s)?);
    files.push(("bestResponse12.csv", both));

    // Marginal sharing inside the spiral regime 1 < delta < 2^(1/alpha).
    let deltas = interior(1.0, cap, n);
    let d1s: Vec<f64> = deltas.iter().map(|d| d * unit).collect();
    files.push((
        "convergence.csv",
        response_curve(a, Mechanism::Marginal, 1, &d1s)?,
    ));
    let d2s: Vec<f64> = deltas
        .iter()
        .map(|d| solo * (1.0 + d * 2f64.powf(-1.0 / a)))
        .collect();
    files.push((
        "convergence1.csv",
        response_curve(a, Mechanism::Marginal, 0, &d2s)?,
    ));

    let scan = uniqueness_scan(&cfg.scan);
    files.push(("2playerUnique.csv", region_csv(&scan)));
    files.push(("2playerUnique_thresholds.csv", thresholds_csv(&scan)));

    let mut paths = Vec::with_capacity(files.len());
    for (name, body) in files {
        let path = dir.join(name);
        fs::write(&path, body)?;
        paths.push(path);
    }
    Ok(paths)
}
