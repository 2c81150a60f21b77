//! Library side of the `kbcp` binary: solving, generating, oracle queries and
//! independent checking of solve reports.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::time::Instant;

use kbcp::basic::scale_costs;
use kbcp::bounds::within;
use kbcp::oracle::{self, OracleLimits};
use kbcp::ratio_cycle::SearchOptions;
use kbcp::{
    advertised_bound, format_rational, improve, parse_beta, parse_instance, parse_rational,
    ratio, run_basic, write_instance, CostMode, CycleLogEntry, Direction, GenConfig,
    ImproveConfig, Instance, Rational, Side,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const SCHEMA: &str = "v1";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{0}")]
    Infeasible(String),
    #[error("check failed: {invariant}: {detail}")]
    CheckFailed { invariant: &'static str, detail: String },
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::CheckFailed { .. } => 1,
            CliError::Usage(_) | CliError::Parse { .. } | CliError::Io(_) => 2,
            CliError::Infeasible(_) => 3,
        }
    }
}

fn failed(invariant: &'static str, detail: impl Into<String>) -> CliError {
    CliError::CheckFailed { invariant, detail: detail.into() }
}

/// Hex SHA-256 of the canonical text of `inst`.
pub fn instance_digest(inst: &Instance) -> String {
    hex::encode(Sha256::digest(write_instance(inst).as_bytes()))
}

pub fn read_instance(path: &Path) -> Result<Instance, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_instance(&text)
        .map_err(|e| CliError::Parse { path: path.display().to_string(), message: e.to_string() })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundPair {
    pub delay_factor: String,
    pub cost_factor: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveReport {
    pub schema: String,
    pub instance_digest: String,
    pub k: usize,
    pub beta: String,
    pub direction: String,
    pub improved: Option<String>,
    pub paths: Vec<Vec<u32>>,
    pub cost_sum: i64,
    pub delay_sum: i64,
    pub cost_ratio: String,
    pub delay_ratio: String,
    pub advertised_bound: BoundPair,
    pub h: usize,
    pub termination: String,
    pub cycle_log: Vec<CycleLogEntry>,
    pub scale: Option<String>,
    pub epsilon_mode: bool,
    pub wall_time_ms: Option<u64>,
}

impl SolveReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOptions {
    pub beta: Rational,
    pub direction: Direction,
    pub scale: Option<Rational>,
    pub epsilon_mode: bool,
    pub threads: usize,
    pub k: Option<usize>,
    pub timing: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            beta: ratio(1, 1),
            direction: Direction::Delay,
            scale: None,
            epsilon_mode: false,
            threads: 1,
            k: None,
            timing: false,
        }
    }
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::Delay => "delay",
        Side::Cost => "cost",
    }
}

/// Mixed-weight solution with `beta = 1`, then cycle cancellation with the
/// configured `beta`. The digest is taken before any `k` override.
pub fn solve(file_inst: &Instance, opts: &SolveOptions) -> Result<SolveReport, CliError> {
    let started = Instant::now();
    let inst = match opts.k {
        Some(k) => file_inst.with_k(k).map_err(|e| CliError::Usage(e.to_string()))?,
        None => file_inst.clone(),
    };
    let available = inst.max_disjoint_paths();
    if available < inst.k() {
        return Err(CliError::Infeasible(format!(
            "only {available} arc-disjoint s-t paths exist, {} required",
            inst.k()
        )));
    }
    let working = match &opts.scale {
        Some(eps) => scale_costs(&inst, eps).map_err(|e| CliError::Usage(e.to_string()))?.instance,
        None => inst.clone(),
    };
    let (start, _) =
        run_basic(&working, &ratio(1, 1)).map_err(|e| CliError::Infeasible(e.to_string()))?;
    let cfg = ImproveConfig {
        cost_mode: if opts.epsilon_mode { CostMode::Epsilon } else { CostMode::Zero },
        search: SearchOptions { threads: opts.threads.max(1), ..Default::default() },
        ..ImproveConfig::new(opts.beta.clone(), opts.direction)
    };
    let (sol, trace) = improve(&working, &start, &cfg);

    // everything below is in original units
    let (cost_sum, delay_sum) = kbcp::solution::metrics(&inst, sol.arc_ids.iter().copied());
    let (delay_factor, cost_factor) =
        advertised_bound(&inst, &opts.beta, opts.direction, trace.improved);
    Ok(SolveReport {
        schema: SCHEMA.to_string(),
        instance_digest: instance_digest(file_inst),
        k: inst.k(),
        beta: format_rational(&opts.beta),
        direction: opts.direction.to_string(),
        improved: trace.improved.map(|s| side_name(s).to_string()),
        paths: sol.paths.iter().map(|p| p.iter().map(|a| a.0).collect()).collect(),
        cost_sum,
        delay_sum,
        cost_ratio: format_rational(&ratio(cost_sum, inst.cost_budget())),
        delay_ratio: format_rational(&ratio(delay_sum, inst.delay_budget())),
        advertised_bound: BoundPair {
            delay_factor: format_rational(&delay_factor),
            cost_factor: format_rational(&cost_factor),
        },
        h: trace.h(),
        termination: trace.termination.to_string(),
        cycle_log: trace.cycle_log(),
        scale: opts.scale.as_ref().map(format_rational),
        epsilon_mode: opts.epsilon_mode,
        wall_time_ms: opts.timing.then(|| started.elapsed().as_millis() as u64),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessJson {
    pub cost_sum: i64,
    pub delay_sum: i64,
    pub arcs: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub schema: String,
    pub instance_digest: String,
    pub path_sets: usize,
    pub feasible: bool,
    pub witness: Option<WitnessJson>,
    pub min_cost_given_delay: Option<WitnessJson>,
    pub pareto: Vec<WitnessJson>,
}

fn witness(cost_sum: i64, delay_sum: i64, arcs: &BTreeSet<kbcp::ArcId>) -> WitnessJson {
    WitnessJson { cost_sum, delay_sum, arcs: arcs.iter().map(|a| a.0).collect() }
}

pub fn oracle_report(inst: &Instance, limits: &OracleLimits) -> Result<OracleReport, CliError> {
    let cap = |e: oracle::OracleError| CliError::Usage(e.to_string());
    let path_sets = oracle::count_disjoint_path_sets(inst, limits).map_err(cap)?;
    let (feasible, w) = oracle::oracle_feasible(inst, limits).map_err(cap)?;
    let krsp = oracle::oracle_min_cost_given_delay(inst, limits).map_err(cap)?;
    let pareto = oracle::pareto_set(inst, limits).map_err(cap)?;
    Ok(OracleReport {
        schema: SCHEMA.to_string(),
        instance_digest: instance_digest(inst),
        path_sets,
        feasible,
        witness: w.map(|s| witness(s.cost_sum, s.delay_sum, &s.arc_ids)),
        min_cost_given_delay: krsp.map(|(_, s)| witness(s.cost_sum, s.delay_sum, &s.arc_ids)),
        pareto: pareto.iter().map(|p| witness(p.cost_sum, p.delay_sum, &p.witness)).collect(),
    })
}

pub fn generate(cfg: &GenConfig) -> Result<String, CliError> {
    let inst = kbcp::generate_instance(cfg).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(write_instance(&inst))
}

/// What a successful check established.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckSummary {
    pub checks: Vec<&'static str>,
    /// `None` when the oracle could not decide feasibility (instance too big).
    pub oracle_feasible: Option<bool>,
}

fn parse_ratio_field(field: &'static str, text: &str) -> Result<Rational, CliError> {
    parse_rational(text).ok_or_else(|| failed(field, format!("not a rational: {text:?}")))
}

/// Recomputes everything in `report` from its arc ids. Bound assertions are
/// made only when the oracle certifies that the budgets are attainable.
pub fn check_report(
    file_inst: &Instance,
    report: &SolveReport,
    limits: &OracleLimits,
) -> Result<CheckSummary, CliError> {
    let mut checks = Vec::new();
    if report.schema != SCHEMA {
        return Err(failed("schema", format!("expected {SCHEMA}, found {}", report.schema)));
    }
    checks.push("schema");
    if report.instance_digest != instance_digest(file_inst) {
        return Err(failed("instance-digest", "report was produced for a different instance"));
    }
    checks.push("instance-digest");
    let inst = file_inst.with_k(report.k).map_err(|e| failed("k", e.to_string()))?;

    // paths: k simple arc-disjoint s-t paths
    if report.paths.len() != inst.k() {
        return Err(failed("path-count", format!("{} paths for k = {}", report.paths.len(), inst.k())));
    }
    let mut used = BTreeSet::new();
    let (mut cost, mut delay) = (0i64, 0i64);
    for (p, path) in report.paths.iter().enumerate() {
        let mut at = inst.s();
        let mut seen = BTreeSet::from([at]);
        if path.is_empty() {
            return Err(failed("path-shape", format!("path {p} is empty")));
        }
        for &id in path {
            if id == 0 || id as usize > inst.m() {
                return Err(failed("arc-ids", format!("no arc {id}")));
            }
            let arc = &inst.arcs()[id as usize - 1];
            if arc.tail != at {
                return Err(failed("path-shape", format!("path {p} breaks at arc {id}")));
            }
            if !used.insert(id) {
                return Err(failed("arc-disjointness", format!("arc {id} used twice")));
            }
            at = arc.head;
            if !seen.insert(at) {
                return Err(failed("path-simplicity", format!("path {p} revisits vertex {}", at + 1)));
            }
            cost += arc.cost;
            delay += arc.delay;
        }
        if at != inst.t() {
            return Err(failed("path-shape", format!("path {p} does not end at t")));
        }
    }
    checks.extend(["path-count", "path-shape", "arc-disjointness", "path-simplicity"]);
    for &id in &used {
        let a = &inst.arcs()[id as usize - 1];
        let opposing = used.iter().any(|&o| {
            let b = &inst.arcs()[o as usize - 1];
            (b.tail, b.head) == (a.head, a.tail)
        });
        if opposing {
            return Err(failed("no-opposing-pair", format!("arc {id} has a reversed partner")));
        }
    }
    checks.push("no-opposing-pair");

    if (report.cost_sum, report.delay_sum) != (cost, delay) {
        return Err(failed(
            "metric-sums",
            format!(
                "report says ({}, {}), arcs give ({cost}, {delay})",
                report.cost_sum, report.delay_sum
            ),
        ));
    }
    checks.push("metric-sums");
    if parse_ratio_field("cost-ratio", &report.cost_ratio)? != ratio(cost, inst.cost_budget())
        || parse_ratio_field("delay-ratio", &report.delay_ratio)? != ratio(delay, inst.delay_budget())
    {
        return Err(failed("ratios", "ratios do not match the recomputed sums"));
    }
    checks.push("ratios");

    // cycle log
    if report.h != report.cycle_log.len() {
        return Err(failed("h", format!("h = {} but {} log entries", report.h, report.cycle_log.len())));
    }
    for (i, e) in report.cycle_log.iter().enumerate() {
        if e.iter != i + 1 {
            return Err(failed("cycle-log", format!("entry {i} numbered {}", e.iter)));
        }
        if e.delay >= 0 {
            return Err(failed("cycle-log", format!("entry {} does not decrease", e.iter)));
        }
        if !report.epsilon_mode
            && (e.cost <= 0 || parse_ratio_field("cycle-log", &e.ratio)? != ratio(e.delay, e.cost))
        {
            return Err(failed("cycle-log", format!("entry {} has a wrong ratio", e.iter)));
        }
    }
    checks.push("cycle-log");
    if !["target-met", "no-improving-cycle", "cap"].contains(&report.termination.as_str()) {
        return Err(failed("termination", format!("unknown reason {:?}", report.termination)));
    }
    checks.push("termination");

    let beta = parse_beta(&report.beta).map_err(|e| failed("beta", e.to_string()))?;
    let direction: Direction =
        report.direction.parse().map_err(|e: kbcp::improve::UnknownDirection| failed("direction", e.to_string()))?;
    let improved = match report.improved.as_deref() {
        None => None,
        Some("delay") => Some(Side::Delay),
        Some("cost") => Some(Side::Cost),
        Some(other) => return Err(failed("improved", format!("unknown side {other:?}"))),
    };
    let (df, cf) = advertised_bound(&inst, &beta, direction, improved);
    if report.advertised_bound
        != (BoundPair { delay_factor: format_rational(&df), cost_factor: format_rational(&cf) })
    {
        return Err(failed("advertised-bound", "does not match the recomputed factors"));
    }
    checks.push("advertised-bound");

    let oracle_feasible = match oracle::oracle_feasible(&inst, limits) {
        Ok((ok, _)) => Some(ok),
        Err(_) => None,
    };
    if oracle_feasible == Some(true) && report.scale.is_none() {
        // a side that needed no improvement is left as the mixed-weight
        // solution produced it; recompute that decision instead of trusting it
        if direction == Direction::Auto {
            let (start, _) = run_basic(&inst, &ratio(1, 1))
                .map_err(|e| failed("bifactor-bound", e.to_string()))?;
            let target = ratio(1, 1) + &beta;
            let d_over = !within(start.delay_sum, &target, inst.delay_budget());
            let c_over = !within(start.cost_sum, &target, inst.cost_budget());
            let expected = match (d_over, c_over) {
                (false, false) => None,
                (true, false) => Some(Side::Delay),
                (false, true) => Some(Side::Cost),
                (true, true) => {
                    let c = ratio(start.cost_sum, inst.cost_budget());
                    let d = ratio(start.delay_sum, inst.delay_budget());
                    Some(if c > d { Side::Cost } else { Side::Delay })
                }
            };
            if expected != improved {
                return Err(failed("improved", "auto direction picked the wrong side"));
            }
        }
        if !within(delay, &df, inst.delay_budget()) {
            return Err(failed("delay-bound", format!("delay {delay} exceeds {df} * {}", inst.delay_budget())));
        }
        if !within(cost, &cf, inst.cost_budget()) {
            return Err(failed("cost-bound", format!("cost {cost} exceeds {cf} * {}", inst.cost_budget())));
        }
        checks.push("bifactor-bound");
    }
    Ok(CheckSummary { checks, oracle_feasible })
}
