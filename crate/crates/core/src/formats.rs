//! Text formats: instance and profile files in, CSV artifacts out.
//!
//! Instance files start with a header line such as `alpha=3 mode=absolute`
//! followed by one `id w r p` line per job. A fifth column, when present,
//! is the job's declared deadline and forms a default profile. Profile
//! files hold `id d` lines. Blank lines and `#` comments are ignored.
//!
//! Numbers in CSV output carry 12 significant digits so that artifacts diff
//! cleanly across runs.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::bestresp::BestResponse;
use crate::dynamics::{DynamicsTrace, Verdict};
use crate::equilibria::RegionScan;
use crate::error::{Error, Result};
use crate::mechanisms::CostReport;
use crate::model::{Job, StrategyProfile, WaitingCostMode};
use crate::schedule::{Segment, SpeedSchedule};

/// `%.12g`: 12 significant digits, trailing zeros trimmed, scientific
/// notation outside `[1e-5, 1e12)`.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// A parsed instance file.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceFile {
    pub alpha: Option<f64>,
    pub mode: Option<WaitingCostMode>,
    pub epsilon: Option<f64>,
    /// Jobs re-indexed `0..n` in ascending order of their file ids.
    pub jobs: Vec<Job>,
    /// File id of each job, by internal index.
    pub ids: Vec<u64>,
    pub profile: Option<StrategyProfile>,
}

impl InstanceFile {
    pub fn index_of(&self, id: u64) -> Option<usize> {
        self.ids.iter().position(|&x| x == id)
    }
}

/// Whitespace-separated fields with their 1-based column numbers.
fn fields(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(head, _)| head)
}

fn real(line: usize, col: usize, tok: &str, what: &str) -> Result<f64> {
    tok.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| {
            Error::parse(
                line,
                col,
                format!("expected a number for {what}, got {tok:?}"),
            )
        })
}

fn ident(line: usize, col: usize, tok: &str) -> Result<u64> {
    tok.parse::<u64>().map_err(|_| {
        Error::parse(
            line,
            col,
            format!("expected a non-negative integer id, got {tok:?}"),
        )
    })
}

pub fn parse_instance(text: &str) -> Result<InstanceFile> {
    let mut alpha = None;
    let mut mode = None;
    let mut epsilon = None;
    let mut header_seen = false;
    // file id -> (line, workload, release, priority, deadline)
    let mut rows: BTreeMap<u64, (usize, f64, f64, f64, Option<f64>)> = BTreeMap::new();

    for (k, raw) in text.lines().enumerate() {
        let ln = k + 1;
        let toks = fields(strip_comment(raw));
        if toks.is_empty() {
            continue;
        }
        if toks[0].1.contains('=') {
            if header_seen || !rows.is_empty() {
                return Err(Error::parse(
                    ln,
                    toks[0].0,
                    "header must be the first non-comment line",
                ));
            }
            header_seen = true;
            for &(col, tok) in &toks {
                let (key, value) = tok.split_once('=').ok_or_else(|| {
                    Error::parse(ln, col, format!("expected key=value, got {tok:?}"))
                })?;
                let vcol = col + key.len() + 1;
                match key {
                    "alpha" => alpha = Some(real(ln, vcol, value, "alpha")?),
                    "epsilon" => epsilon = Some(real(ln, vcol, value, "epsilon")?),
                    "mode" => {
                        mode = Some(value.parse().map_err(|_| {
                            Error::parse(
                                ln,
                                vcol,
                                format!("mode must be absolute or relative, got {value:?}"),
                            )
                        })?)
                    }
                    other => {
                        return Err(Error::parse(
                            ln,
                            col,
                            format!("unknown header key {other:?}"),
                        ))
                    }
                }
            }
            continue;
        }
        if !(toks.len() == 4 || toks.len() == 5) {
            return Err(Error::parse(
                ln,
                toks[0].0,
                format!("expected `id w r p [d]`, found {} fields", toks.len()),
            ));
        }
        let id = ident(ln, toks[0].0, toks[0].1)?;
        let w = real(ln, toks[1].0, toks[1].1, "workload")?;
        let r = real(ln, toks[2].0, toks[2].1, "release")?;
        let p = real(ln, toks[3].0, toks[3].1, "priority")?;
        if !(w > 0.0) {
            return Err(Error::parse(ln, toks[1].0, "workload must be positive"));
        }
        if !(r >= 0.0) {
            return Err(Error::parse(ln, toks[2].0, "release must be non-negative"));
        }
        if !(p > 0.0) {
            return Err(Error::parse(ln, toks[3].0, "priority must be positive"));
        }
        let d = toks
            .get(4)
            .map(|&(c, t)| real(ln, c, t, "deadline"))
            .transpose()?;
        if let Some((first, ..)) = rows.insert(id, (ln, w, r, p, d)) {
            return Err(Error::parse(
                ln,
                toks[0].0,
                format!("job id {id} already defined on line {first}"),
            ));
        }
    }
    if rows.is_empty() {
        return Err(Error::parse(
            text.lines().count().max(1),
            1,
            "instance has no jobs",
        ));
    }
    let with_deadline = rows.values().filter(|row| row.4.is_some()).count();
    if with_deadline != 0 && with_deadline != rows.len() {
        let (ln, ..) = rows
            .values()
            .find(|row| row.4.is_none())
            .expect("row without deadline");
        return Err(Error::parse(
            *ln,
            1,
            "either every job line or none carries a deadline",
        ));
    }
    let ids: Vec<u64> = rows.keys().copied().collect();
    let jobs = rows
        .values()
        .enumerate()
        .map(|(i, &(_, w, r, p, _))| Job::new(i, w, r, p))
        .collect();
    let profile = (with_deadline > 0)
        .then(|| StrategyProfile::new(rows.values().map(|row| row.4.expect("deadline")).collect()));
    Ok(InstanceFile {
        alpha,
        mode,
        epsilon,
        jobs,
        ids,
        profile,
    })
}

/// Reads `id d` lines against an instance's ids.
pub fn parse_profile(text: &str, instance: &InstanceFile) -> Result<StrategyProfile> {
    let mut deadlines: Vec<Option<f64>> = vec![None; instance.ids.len()];
    let mut last_line = 1;
    for (k, raw) in text.lines().enumerate() {
        let ln = k + 1;
        last_line = ln;
        let toks = fields(strip_comment(raw));
        if toks.is_empty() {
            continue;
        }
        if toks.len() != 2 {
            return Err(Error::parse(
                ln,
                toks[0].0,
                format!("expected `id d`, found {} fields", toks.len()),
            ));
        }
        let id = ident(ln, toks[0].0, toks[0].1)?;
        let d = real(ln, toks[1].0, toks[1].1, "deadline")?;
        let i = instance.index_of(id).ok_or_else(|| {
            Error::parse(
                ln,
                toks[0].0,
                format!("no job with id {id} in the instance"),
            )
        })?;
        if deadlines[i].replace(d).is_some() {
            return Err(Error::parse(
                ln,
                toks[0].0,
                format!("deadline for job {id} given twice"),
            ));
        }
    }
    let missing: Vec<String> = deadlines
        .iter()
        .zip(&instance.ids)
        .filter(|(d, _)| d.is_none())
        .map(|(_, id)| id.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::parse(
            last_line,
            1,
            format!("missing deadlines for jobs {}", missing.join(", ")),
        ));
    }
    Ok(StrategyProfile::new(
        deadlines.into_iter().map(|d| d.expect("checked")).collect(),
    ))
}

fn label(ids: &[u64], i: usize) -> String {
    ids.get(i)
        .map_or_else(|| i.to_string(), |id| id.to_string())
}

/// `start,end,speed,job_id` rows, then `# energy=<E>`.
pub fn schedule_csv(schedule: &SpeedSchedule, alpha: f64, ids: &[u64]) -> String {
    let mut out = String::from("start,end,speed,job_id\n");
    for s in &schedule.segments {
        let job = s.job.map_or_else(|| "idle".to_string(), |j| label(ids, j));
        let _ = writeln!(
            out,
            "{},{},{},{job}",
            num(s.start),
            num(s.end),
            num(s.speed)
        );
    }
    let _ = writeln!(out, "# energy={}", num(schedule.energy(alpha)));
    out
}

/// Inverse of [`schedule_csv`]; job ids are returned as written.
pub fn parse_schedule_csv(text: &str) -> Result<(SpeedSchedule, Option<f64>)> {
    let mut segments = Vec::new();
    let mut energy = None;
    let mut header = false;
    for (k, line) in text.lines().enumerate() {
        let ln = k + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(v) = rest.trim().strip_prefix("energy=") {
                energy = Some(real(ln, line.len() - v.len() + 1, v, "energy")?);
            }
            continue;
        }
        if !header {
            if line != "start,end,speed,job_id" {
                return Err(Error::parse(
                    ln,
                    1,
                    "expected header start,end,speed,job_id",
                ));
            }
            header = true;
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 4 {
            return Err(Error::parse(
                ln,
                1,
                format!("expected 4 columns, found {}", cols.len()),
            ));
        }
        let col_of = |n: usize| cols[..n].iter().map(|c| c.len() + 1).sum::<usize>() + 1;
        let start = real(ln, col_of(0), cols[0], "start")?;
        let end = real(ln, col_of(1), cols[1], "end")?;
        let speed = real(ln, col_of(2), cols[2], "speed")?;
        let job = match cols[3] {
            "idle" => None,
            t => Some(ident(ln, col_of(3), t)? as usize),
        };
        segments.push(Segment::new(start, end, speed, job));
    }
    if !header {
        return Err(Error::parse(1, 1, "missing header start,end,speed,job_id"));
    }
    Ok((SpeedSchedule::new(segments), energy))
}

/// `id,share,waiting,penalty` per player, a `total` row, then aggregates.
pub fn cost_report_csv(report: &CostReport, ids: &[u64]) -> String {
    let mut out = String::from("id,share,waiting,penalty\n");
    for p in &report.players {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            label(ids, p.id),
            num(p.cost_share),
            num(p.waiting_cost),
            num(p.penalty)
        );
    }
    let _ = writeln!(
        out,
        "total,{},{},{}",
        num(report.total_cost_share),
        num(report.total_waiting_cost),
        num(report.utilitarian_social_cost)
    );
    let _ = writeln!(
        out,
        "# mechanism={} optimal_energy={} effective_social_cost={}",
        report.mechanism,
        num(report.optimal_energy),
        num(report.effective_social_cost)
    );
    out
}

/// `step,player,d_old,d_new,penalty_old,penalty_new,phi` with `phi` after
/// the move, then a `# verdict=...` summary line.
pub fn trace_csv(trace: &DynamicsTrace, ids: &[u64]) -> String {
    let mut out = String::from("step,player,d_old,d_new,penalty_old,penalty_new,phi\n");
    for s in &trace.steps {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            s.step,
            label(ids, s.player),
            num(s.d_old),
            num(s.d_new),
            num(s.penalty_old),
            num(s.penalty_new),
            num(s.phi_after)
        );
    }
    out.push_str(&verdict_line(trace));
    out.push('\n');
    out
}

pub fn verdict_line(trace: &DynamicsTrace) -> String {
    let verdict = match trace.verdict {
        Verdict::Cycle { start, period } => format!("cycle cycle_start={start} period={period}"),
        v => v.to_string(),
    };
    let finals: Vec<String> = trace
        .final_profile
        .deadlines
        .iter()
        .map(|&d| num(d))
        .collect();
    format!(
        "# verdict={verdict} steps={} mechanism={} order={} final=[{}]",
        trace.steps.len(),
        trace.mechanism,
        trace.order,
        finals.join(";")
    )
}

pub const CURVE_HEADER: &str = "d_other,d_star,value,regime\n";

pub fn curve_row(d_other: f64, br: &BestResponse) -> String {
    format!(
        "{},{},{},{}\n",
        num(d_other),
        num(br.deadline),
        num(br.penalty),
        br.regime.unwrap_or("NA")
    )
}

fn flag(b: Option<bool>) -> &'static str {
    match b {
        Some(true) => "1",
        Some(false) => "0",
        None => "NA",
    }
}

fn opt_num(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".into(), num)
}

/// Per-cell flags `p2,w2,s21_ne,s12_ne,dominance`.
pub fn region_csv(scan: &RegionScan) -> String {
    let mut out = format!(
        "# alpha={} mechanism={} p1=1 w1=1\n# {}\np2,w2,s21_ne,s12_ne,dominance\n",
        num(scan.config.alpha),
        scan.config.mechanism,
        RegionScan::DISCLAIMER
    );
    for c in &scan.cells {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            num(c.p2),
            num(c.w2),
            flag(c.s21_ne),
            flag(c.s12_ne),
            flag(Some(c.dominance))
        );
    }
    out
}

/// Per-column thresholds `p2,t1,t2,upper_bound`.
pub fn thresholds_csv(scan: &RegionScan) -> String {
    let mut out = format!(
        "# alpha={} mechanism={}\np2,t1,t2,upper_bound\n",
        num(scan.config.alpha),
        scan.config.mechanism
    );
    for t in &scan.thresholds {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            num(t.p2),
            opt_num(t.t1),
            opt_num(t.t2),
            num(t.upper_bound)
        );
    }
    let multi: Vec<String> = scan
        .thresholds
        .iter()
        .filter(|t| !(t.single_sign_change[0] && t.single_sign_change[1]))
        .map(|t| num(t.p2))
        .collect();
    if !multi.is_empty() {
        let _ = writeln!(out, "# several sign changes at p2 in [{}]", multi.join(";"));
    }
    out
}
