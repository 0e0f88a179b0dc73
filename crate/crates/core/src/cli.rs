//! Command-line front end.
//!
//! Every subcommand writes its CSV artifact to `--out DIR` when given and
//! otherwise to standard output. A one-line summary goes to standard output
//! next to files, or to standard error next to CSV on standard output.
//! Settings resolve as: flag, then instance header, then built-in default.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::bestresp::numeric_best_response;
use crate::dynamics::{run_dynamics, DynamicsOptions, MoveOrder};
use crate::equilibria::{uniqueness_scan, verify_equilibrium, RegionScan, ScanConfig};
use crate::error::{Error, Result};
use crate::figures::{write_figures, FigureConfig};
use crate::formats::{
    cost_report_csv, curve_row, num, parse_instance, parse_profile, region_csv, schedule_csv,
    thresholds_csv, trace_csv, verdict_line, InstanceFile, CURVE_HEADER,
};
use crate::mechanisms::Mechanism;
use crate::model::{Game, GameConfig, StrategyProfile, WaitingCostMode};
use crate::yds::yds_schedule;

pub const DEFAULT_ALPHA: f64 = 2.0;
pub const FIGURE_ALPHA: f64 = 3.0;

#[derive(Debug, Parser)]
#[command(name = "speedgame", version, about = "Speed-scaling scheduling games")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Default, Args)]
pub struct Overrides {
    /// Energy exponent (>= 2).
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Improvement threshold for moves and equilibrium checks; relative
    /// tolerance for `scan`.
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// absolute | relative
    #[arg(long, global = true)]
    pub mode: Option<WaitingCostMode>,
    /// proportional | marginal [default: marginal]
    #[arg(long, global = true)]
    pub mechanism: Option<Mechanism>,
    /// Budget of improving moves for `dynamics` [default: 1000].
    #[arg(long, global = true)]
    pub max_steps: Option<usize>,
    /// Scan grid as `NxM` (p2 points x w2 points) [default: 100x100].
    #[arg(long, global = true, value_parser = parse_grid)]
    pub grid: Option<(usize, usize)>,
    /// Directory for CSV artifacts; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InstanceArgs {
    /// Instance file: header `alpha=.. mode=..`, then `id w r p [d]` lines.
    pub instance: PathBuf,
    /// Profile file of `id d` lines; defaults to the instance's deadline column.
    #[arg(long)]
    pub profile: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimum-energy schedule of a profile.
    Schedule(InstanceArgs),
    /// Cost shares, waiting costs and penalties.
    Shares(InstanceArgs),
    /// One player's best response to the others' deadlines.
    Bestresp {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Job id of the responding player.
        #[arg(long)]
        player: u64,
    },
    /// Best-response dynamics from a starting profile.
    Dynamics {
        #[command(flatten)]
        instance: InstanceArgs,
        /// round_robin | max_gain
        #[arg(long, default_value = "round_robin")]
        order: MoveOrder,
    },
    /// Epsilon-equilibrium check of a profile.
    Verify(InstanceArgs),
    /// Two-player uniqueness scan over (p2, w2) [default alpha: 2].
    Scan,
    /// Regenerate every figure's data (curves at --alpha, default 3; scan at alpha 2).
    Figures {
        /// Points per best-response curve.
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

fn parse_grid(s: &str) -> std::result::Result<(usize, usize), String> {
    let (n, m) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected NxM, got {s:?}"))?;
    let n: usize = n
        .trim()
        .parse()
        .map_err(|_| format!("bad grid rows in {s:?}"))?;
    let m: usize = m
        .trim()
        .parse()
        .map_err(|_| format!("bad grid columns in {s:?}"))?;
    if n == 0 || m == 0 {
        return Err("grid dimensions must be positive".into());
    }
    Ok((n, m))
}

/// Process exit status for each error family.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidConfig(_) | Error::UnsupportedAlpha { .. } => 2,
        Error::Parse { .. } | Error::InvalidInstance(_) => 3,
        Error::InfeasibleDeadline { .. } => 4,
        Error::UnboundedWindow { .. }
        | Error::Precondition(_)
        | Error::OutOfRegime(_)
        | Error::Dynamics { .. } => 5,
        Error::Io(_) => 6,
    }
}

/// Entry point used by the binary.
pub fn main_with_args<I, S>(args: I) -> ExitCode
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    match run(&cli, &mut stdout.lock(), &mut stderr.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

struct Sink<'a> {
    out_dir: Option<&'a Path>,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Sink<'_> {
    fn artifact(&mut self, name: &str, body: &str) -> Result<()> {
        match self.out_dir {
            Some(dir) => {
                fs::create_dir_all(dir)?;
                let path = dir.join(name);
                fs::write(&path, body)?;
                writeln!(self.stdout, "wrote {}", path.display())?;
            }
            None => self.stdout.write_all(body.as_bytes())?,
        }
        Ok(())
    }

    fn summary(&mut self, line: &str) -> Result<()> {
        match self.out_dir {
            Some(_) => writeln!(self.stdout, "{line}")?,
            None => writeln!(self.stderr, "{line}")?,
        }
        Ok(())
    }
}

pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let o = &cli.overrides;
    if let Some(e) = o.epsilon {
        if !(e > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be positive, got {e}"
            )));
        }
    }
    if o.max_steps == Some(0) {
        return Err(Error::InvalidConfig("max-steps must be at least 1".into()));
    }
    let mechanism = o.mechanism.unwrap_or(Mechanism::Marginal);
    let mut sink = Sink {
        out_dir: o.out.as_deref(),
        stdout,
        stderr,
    };

    match &cli.command {
        Command::Schedule(args) => {
            let (inst, game, profile) = load(args, o)?;
            let schedule = yds_schedule(game.jobs(), &profile)?;
            sink.artifact(
                "schedule.csv",
                &schedule_csv(&schedule, game.alpha(), &inst.ids),
            )?;
            sink.summary(&format!(
                "energy={} segments={}",
                num(schedule.energy(game.alpha())),
                schedule.segments.len()
            ))
        }
        Command::Shares(args) => {
            let (inst, game, profile) = load(args, o)?;
            let report = game.penalties(&profile, mechanism)?;
            sink.artifact("costs.csv", &cost_report_csv(&report, &inst.ids))?;
            sink.summary(&format!(
                "mechanism={mechanism} total_share={} optimal_energy={} effective_social_cost={}",
                num(report.total_cost_share),
                num(report.optimal_energy),
                num(report.effective_social_cost)
            ))
        }
        Command::Bestresp { instance, player } => {
            let (inst, game, profile) = load(instance, o)?;
            let i = inst.index_of(*player).ok_or_else(|| {
                Error::InvalidConfig(format!("no job with id {player} in the instance"))
            })?;
            let current = game.player_penalty(&profile, i, mechanism)?;
            let br = numeric_best_response(&game, &profile, i, mechanism)?;
            let d_other = if game.n_players() == 2 {
                profile[1 - i]
            } else {
                f64::NAN
            };
            let mut body = String::from(CURVE_HEADER);
            body.push_str(&curve_row(d_other, &br).replace("NaN", "NA"));
            sink.artifact("bestresp.csv", &body)?;
            sink.summary(&format!(
                "player={player} d_star={} penalty={} current_penalty={} gain={} regime={}",
                num(br.deadline),
                num(br.penalty),
                num(current),
                num(current - br.penalty),
                br.regime.unwrap_or("NA")
            ))
        }
        Command::Dynamics { instance, order } => {
            let (inst, game, profile) = load(instance, o)?;
            let opts = DynamicsOptions {
                max_steps: o.max_steps.unwrap_or(1000),
                order: *order,
                ..Default::default()
            };
            let trace = run_dynamics(&game, &profile, mechanism, &opts)?;
            sink.artifact("trace.csv", &trace_csv(&trace, &inst.ids))?;
            sink.summary(verdict_line(&trace).trim_start_matches("# "))
        }
        Command::Verify(args) => {
            let (inst, game, profile) = load(args, o)?;
            let check = verify_equilibrium(&game, &profile, mechanism)?;
            let mut body = String::from("id,penalty,best_deadline,best_penalty,gain\n");
            for (k, br) in check.responses.iter().enumerate() {
                body.push_str(&format!(
                    "{},{},{},{},{}\n",
                    inst.ids[k],
                    num(check.penalties[k]),
                    num(br.deadline),
                    num(br.penalty),
                    num(check.gain(k))
                ));
            }
            sink.artifact("verify.csv", &body)?;
            sink.summary(&format!(
                "is_nash={} worst_player={} max_gain={} epsilon={} mechanism={mechanism}",
                check.is_nash,
                inst.ids[check.worst_player],
                num(check.max_gain),
                num(check.epsilon)
            ))
        }
        Command::Scan => {
            let cfg = scan_config(o, mechanism)?;
            let scan = uniqueness_scan(&cfg);
            sink.artifact("region.csv", &region_csv(&scan))?;
            sink.artifact("thresholds.csv", &thresholds_csv(&scan))?;
            sink.summary(&scan_summary(&scan))
        }
        Command::Figures { samples } => {
            let dir = o.out.clone().unwrap_or_else(|| PathBuf::from("."));
            let alpha = o.alpha.unwrap_or(FIGURE_ALPHA);
            GameConfig::new(alpha).validate()?;
            let mut scan = ScanConfig::default();
            if let Some(g) = o.grid {
                scan.grid = g;
            }
            if let Some(e) = o.epsilon {
                scan.rel_epsilon = e;
            }
            let cfg = FigureConfig {
                alpha,
                samples: *samples,
                scan,
            };
            let paths = write_figures(&dir, &cfg)?;
            for p in &paths {
                writeln!(sink.stdout, "wrote {}", p.display())?;
            }
            writeln!(sink.stdout, "{}", RegionScan::DISCLAIMER)?;
            Ok(())
        }
    }
}

fn scan_config(o: &Overrides, mechanism: Mechanism) -> Result<ScanConfig> {
    let mut cfg = ScanConfig {
        mechanism,
        ..Default::default()
    };
    if let Some(a) = o.alpha {
        GameConfig::new(a).validate()?;
        cfg.alpha = a;
    }
    if let Some(g) = o.grid {
        cfg.grid = g;
    }
    if let Some(e) = o.epsilon {
        cfg.rel_epsilon = e;
    }
    Ok(cfg)
}

fn scan_summary(scan: &RegionScan) -> String {
    let count = |f: &dyn Fn(&crate::equilibria::ScanCell) -> bool| {
        scan.cells.iter().filter(|c| f(c)).count()
    };
    format!(
        "cells={} s21_ne={} s12_ne={} s21_only={} failed={} alpha={} mechanism={}\n{}",
        scan.cells.len(),
        count(&|c| c.s21_ne == Some(true)),
        count(&|c| c.s12_ne == Some(true)),
        count(&|c| c.s21_ne == Some(true) && c.s12_ne == Some(false)),
        count(&|c| c.error.is_some()),
        num(scan.config.alpha),
        scan.config.mechanism,
        RegionScan::DISCLAIMER
    )
}

fn load(args: &InstanceArgs, o: &Overrides) -> Result<(InstanceFile, Game, StrategyProfile)> {
    let text = fs::read_to_string(&args.instance)?;
    let inst = parse_instance(&text)?;
    let mut config = GameConfig::new(o.alpha.or(inst.alpha).unwrap_or(DEFAULT_ALPHA));
    if let Some(mode) = o.mode.or(inst.mode) {
        config = config.with_mode(mode);
    }
    if let Some(e) = o.epsilon.or(inst.epsilon) {
        config = config.with_epsilon(e);
    }
    let game = Game::new(inst.jobs.clone(), config)?;
    let profile = match &args.profile {
        Some(path) => parse_profile(&fs::read_to_string(path)?, &inst)?,
        None => inst.profile.clone().ok_or_else(|| {
            Error::InvalidConfig(
                "no profile: pass --profile or add a deadline column to the instance".into(),
            )
        })?,
    };
    game.check_profile(&profile)?;
    Ok((inst, game, profile))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("100x100"), Ok((100, 100)));
        assert_eq!(parse_grid("3X5"), Ok((3, 5)));
        assert!(parse_grid("0x5").is_err());
        assert!(parse_grid("10").is_err());
    }

    #[test]
    fn exit_codes_are_distinct() {
        let codes = [
            exit_code(&Error::parse(1, 1, "x")),
            exit_code(&Error::InfeasibleDeadline {
                job: 0,
                release: 0.0,
                deadline: 0.0,
            }),
            exit_code(&Error::Precondition("x".into())),
            exit_code(&Error::Io(std::io::Error::other("x"))),
            exit_code(&Error::InvalidConfig("x".into())),
        ];
        let mut sorted = codes.to_vec();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), codes.len());
        assert!(codes.iter().all(|&c| c != 0 && c != 1));
    }
}
