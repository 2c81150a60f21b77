//! Acceptance suite: one line per criterion, nonzero exit if a blocking one fails.
//!
//! The shared corpus is 500 seeded generator instances (n <= 10, k in {2, 3},
//! weights <= 8, budgets at a random nondominated point), plus each graph
//! again with budgets at its minimum-cost and minimum-delay points.

use std::process::Command;
use std::time::Instant;

use kbcp::basic::run_basic;
use kbcp::bounds::{ln_upper, within};
use kbcp::layered::build_layered;
use kbcp::oracle::{
    enumerate_disjoint_path_sets, oracle_feasible, oracle_min_ratio_cycle, oracle_min_weight,
    pareto_set, OracleLimits,
};
use kbcp::ratio_cycle::{best_improving_cycle, min_ratio_cycle_layered, SearchOptions};
use kbcp::{
    build_residual, generate_instance, improve, min_weight_disjoint_paths,
    normalize, parse_instance, preset_beta, ratio, write_instance, BudgetMode, CostMode, Direction,
    GenConfig, ImproveConfig, Instance, Rational, Side, Solution, Trace, WeightAssignment,
};
use kbcp_cli::{check_report, solve, SolveOptions, SolveReport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const I4: &str = "\
kbcp 6 8 2 10 10
st 1 6
a 1 2 1 3
a 2 6 2 4
a 1 3 1 3
a 3 6 1 4
a 1 4 2 2
a 4 6 3 3
a 1 5 2 2
a 5 6 3 3
";

struct Outcome {
    name: &'static str,
    blocking: bool,
    violations: Vec<String>,
    summary: String,
}

impl Outcome {
    fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn corpus_config(seed: u64, max_vertices: usize) -> GenConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6b62_6370 ^ seed);
    let k = rng.gen_range(2..=3);
    let routes = rng.gen_range(k..=k + 2);
    // n = 2 + sum of inner vertices <= 2 + routes * inner_max
    let inner_max = ((max_vertices - 2) / routes).clamp(1, 2);
    GenConfig {
        routes,
        extra_arcs: rng.gen_range(0..=5),
        max_cost: 8,
        max_delay: 8,
        k,
        seed,
        budget_mode: BudgetMode::OracleTight,
        inner_min: 1,
        inner_max,
    }
}

fn make_corpus(count: u64, max_vertices: usize, salt: u64) -> Vec<Instance> {
    (0..count)
        .map(|i| {
            let inst = generate_instance(&corpus_config(salt * 1_000_000 + i, max_vertices))
                .expect("corpus config is valid");
            assert!(inst.n() <= max_vertices);
            inst
        })
        .collect()
}

struct Run {
    sol: Solution,
    trace: Trace,
    start: Solution,
}

fn pipeline(inst: &Instance, beta: &Rational, direction: Direction) -> Run {
    let (start, _) = run_basic(inst, &ratio(1, 1)).expect("corpus instances carry k paths");
    let (sol, trace) = improve(inst, &start, &ImproveConfig::new(beta.clone(), direction));
    Run { sol, trace, start }
}

/// Progress facts for one improve run, in the frame of the improved side.
fn progress_violations(tag: &str, run: &Run, out: &mut Vec<String>) {
    let side = run.trace.improved.unwrap_or(Side::Delay);
    let initial = match side {
        Side::Delay => run.start.delay_sum,
        Side::Cost => run.start.cost_sum,
    };
    for (i, r) in run.trace.records.iter().enumerate() {
        let (before, after) = match side {
            Side::Delay => (r.delay_before, r.delay_after),
            Side::Cost => (r.cost_before, r.cost_after),
        };
        if after > before - 1 {
            out.push(format!("{tag}: iteration {} went {before} -> {after}", i + 1));
        }
    }
    if run.trace.h() as i64 > initial {
        out.push(format!("{tag}: h = {} > initial sum {initial}", run.trace.h()));
    }
    if run.trace.termination == kbcp::Termination::Cap {
        out.push(format!("{tag}: safety cap fired"));
    }
}

fn main() {
    let started = Instant::now();
    let limits = OracleLimits::default();
    let base = make_corpus(500, 10, 1);
    // the same graphs with budgets at the two extreme nondominated points,
    // where the improvement loop has the most work to do
    let mut corpus = base.clone();
    for inst in &base {
        let front = pareto_set(inst, &limits).unwrap();
        for p in [front.first().unwrap(), front.last().unwrap()] {
            corpus.push(inst.with_budgets(p.cost_sum, p.delay_sum).unwrap());
        }
    }
    let feasible: Vec<bool> =
        corpus.iter().map(|inst| oracle_feasible(inst, &limits).unwrap().0).collect();
    let n_feasible = feasible.iter().filter(|&&f| f).count();

    let mut outcomes = Vec::new();
    let mut progress = Vec::new();
    let mut reports: Vec<(usize, SolveReport)> = Vec::new();

    // AC1: basic with beta = 1
    {
        let mut v = Vec::new();
        for (i, inst) in corpus.iter().enumerate().filter(|(i, _)| feasible[*i]) {
            let (_, rep) = run_basic(inst, &ratio(1, 1)).unwrap();
            let total = &rep.delay_ratio + &rep.cost_ratio;
            if total > ratio(2, 1) {
                v.push(format!("instance {i}: delay+cost ratio {total}"));
            }
        }
        outcomes.push(Outcome {
            name: "AC1 basic(beta=1): delay_ratio + cost_ratio <= 2",
            blocking: true,
            summary: format!(
                "{n_feasible} oracle-feasible of {} (500 generated + 1000 extreme-budget variants)",
                corpus.len()
            ),
            violations: v,
        });
    }

    // AC2: basic with beta = 1/4
    {
        let mut v = Vec::new();
        let beta = ratio(1, 4);
        for (i, inst) in corpus.iter().enumerate().filter(|(i, _)| feasible[*i]) {
            let (sol, _) = run_basic(inst, &beta).unwrap();
            if !within(sol.delay_sum, &ratio(5, 4), inst.delay_budget())
                || !within(sol.cost_sum, &ratio(5, 1), inst.cost_budget())
            {
                v.push(format!("instance {i}: ({}, {})", sol.cost_sum, sol.delay_sum));
            }
        }
        outcomes.push(Outcome {
            name: "AC2 basic(beta=1/4): delay <= 5/4 D, cost <= 5 C",
            blocking: true,
            summary: format!("{n_feasible} instances"),
            violations: v,
        });
    }

    // AC3: cost2 (delay side) and balanced (auto)
    {
        let mut v = Vec::new();
        let cost2 = preset_beta("cost2").unwrap();
        let balanced = preset_beta("balanced").unwrap();
        let limit = ratio(15_671_433, 10_000_000) + ratio(1, 1_000_000);
        let mut iterations = 0;
        for (i, inst) in corpus.iter().enumerate().filter(|(i, _)| feasible[*i]) {
            let run = pipeline(inst, &cost2, Direction::Delay);
            progress_violations(&format!("cost2 #{i}"), &run, &mut progress);
            iterations += run.trace.h();
            if !within(run.sol.delay_sum, &(ratio(1, 1) + &cost2), inst.delay_budget())
                || !within(run.sol.cost_sum, &ratio(2, 1), inst.cost_budget())
            {
                v.push(format!(
                    "cost2 instance {i}: ({}, {}) with C={}, D={}, {}",
                    run.sol.cost_sum,
                    run.sol.delay_sum,
                    inst.cost_budget(),
                    inst.delay_budget(),
                    run.trace.termination
                ));
            }
            let run = pipeline(inst, &balanced, Direction::Auto);
            progress_violations(&format!("balanced #{i}"), &run, &mut progress);
            iterations += run.trace.h();
            if ratio(run.sol.delay_sum, inst.delay_budget()) > limit
                || ratio(run.sol.cost_sum, inst.cost_budget()) > limit
            {
                v.push(format!("balanced instance {i}: ({}, {})", run.sol.cost_sum, run.sol.delay_sum));
            }
            for (beta, direction) in [("cost2", Direction::Delay), ("balanced", Direction::Auto)] {
                let opts = SolveOptions {
                    beta: preset_beta(beta).unwrap(),
                    direction,
                    ..Default::default()
                };
                reports.push((i, solve(inst, &opts).unwrap()));
            }
        }
        outcomes.push(Outcome {
            name: "AC3 cost2: delay <= (1+b)D, cost <= 2C; balanced/auto: both <= 1.5671443",
            blocking: true,
            summary: format!("{n_feasible} instances x 2 presets, {iterations} cancelled cycles"),
            violations: v,
        });
    }

    // AC4: strict
    {
        let mut v = Vec::new();
        let zero = ratio(0, 1);
        let mut iterations = 0;
        for (i, inst) in corpus.iter().enumerate().filter(|(i, _)| feasible[*i]) {
            let run = pipeline(inst, &zero, Direction::Delay);
            progress_violations(&format!("strict #{i}"), &run, &mut progress);
            iterations += run.trace.h();
            let factor = ratio(3, 1) + ln_upper(&ratio(2 * inst.delay_budget(), 1));
            if run.sol.delay_sum > inst.delay_budget()
                || !within(run.sol.cost_sum, &factor, inst.cost_budget())
            {
                v.push(format!(
                    "instance {i}: ({}, {}) with C={}, D={}, {}",
                    run.sol.cost_sum,
                    run.sol.delay_sum,
                    inst.cost_budget(),
                    inst.delay_budget(),
                    run.trace.termination
                ));
            }
            let opts = SolveOptions { beta: zero.clone(), ..Default::default() };
            reports.push((i, solve(inst, &opts).unwrap()));
        }
        outcomes.push(Outcome {
            name: "AC4 strict: delay <= D, cost <= (3 + ln 2D) C",
            blocking: true,
            summary: format!("{n_feasible} instances, {iterations} cancelled cycles"),
            violations: v,
        });
    }

    // AC5: layered structure
    {
        let mut v = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut cycles = 0;
        for trial in 0..100 {
            let inst = &corpus[rng.gen_range(0..corpus.len())];
            let sets = enumerate_disjoint_path_sets(inst, &limits).unwrap();
            let pick = &sets[rng.gen_range(0..sets.len())];
            let sol = normalize(inst, pick.arc_ids.iter().copied()).unwrap();
            let rg = build_residual(inst, &sol, CostMode::Zero).unwrap();
            let root = rng.gen_range(0..inst.n());
            let layers = inst.cost_budget() as usize + 1;
            let h = build_layered(&rg, root, layers).unwrap();
            if !h.layer_equation_holds() {
                v.push(format!("trial {trial}: layer equation broken"));
            }
            if let Some(opt) = min_ratio_cycle_layered(&h, &rg) {
                cycles += 1;
                let (cost, _) = h.weight(&opt.cycle);
                if cost > inst.cost_budget() || h.backward_count(&opt.cycle) != 1 {
                    v.push(format!("trial {trial}: cycle cost {cost}, {} backward arcs", h.backward_count(&opt.cycle)));
                }
            }
        }
        outcomes.push(Outcome {
            name: "AC5 layered graphs: layer equation, returned cycles cost <= C with one backward arc",
            blocking: true,
            summary: format!("100 triples, {cycles} returned cycles"),
            violations: v,
        });
    }

    // AC6: ratio exactness against cycle enumeration
    {
        let mut v = Vec::new();
        let small = corpus_small(300);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut some = 0;
        for (i, inst) in small.iter().enumerate() {
            let sets = enumerate_disjoint_path_sets(inst, &limits).unwrap();
            let pick = &sets[rng.gen_range(0..sets.len())];
            let sol = normalize(inst, pick.arc_ids.iter().copied()).unwrap();
            let rg = build_residual(inst, &sol, CostMode::Zero).unwrap();
            let budget = rng.gen_range(1..=inst.cost_budget());
            let ours = best_improving_cycle(&rg, budget, &SearchOptions::default()).map(|c| c.ratio);
            let truth = oracle_min_ratio_cycle(&rg, budget).map(|(_, r)| r);
            if truth.is_some() {
                some += 1;
            }
            if ours != truth {
                v.push(format!("graph {i}: search {ours:?}, oracle {truth:?}"));
            }
        }
        outcomes.push(Outcome {
            name: "AC6 best_improving_cycle ratio == enumerated minimum (n <= 7)",
            blocking: true,
            summary: format!("300 residual graphs, {some} with an improving cycle"),
            violations: v,
        });
    }

    // AC7: flow optimality
    {
        let mut v = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let instances = make_corpus(300, 10, 7);
        for (i, inst) in instances.iter().enumerate() {
            let w = WeightAssignment(
                (0..inst.m()).map(|_| ratio(rng.gen_range(0..=20), rng.gen_range(1..=6))).collect(),
            );
            let flow = min_weight_disjoint_paths(inst, &w).unwrap();
            let best = oracle_min_weight(inst, &w, &limits).unwrap().unwrap();
            if flow.total_weight != best {
                v.push(format!("instance {i}: flow {} vs oracle {best}", flow.total_weight));
            }
        }
        outcomes.push(Outcome {
            name: "AC7 min_weight_disjoint_paths == enumerated optimum",
            blocking: true,
            summary: "300 instances, random rational weights".into(),
            violations: v,
        });
    }

    outcomes.push(Outcome {
        name: "AC8 every iteration lowers the improved sum by >= 1, h <= initial sum, no cap",
        blocking: true,
        summary: "all improve runs of AC3 and AC4".into(),
        violations: progress,
    });

    // AC9: golden I4
    {
        let mut v = Vec::new();
        let inst = parse_instance(I4).unwrap();
        let opts = SolveOptions { beta: preset_beta("cost2").unwrap(), ..Default::default() };
        let a = solve(&inst, &opts).unwrap();
        let b = solve(&inst, &opts).unwrap();
        if a.to_json() != b.to_json() {
            v.push("library output differs between runs".into());
        }
        let got = (a.cost_sum, a.delay_sum, a.h);
        if got != (7, 12, 1) {
            v.push(format!("(cost, delay, h) = {got:?}"));
        }
        match a.cycle_log.first() {
            Some(e) if e.ratio == "-2/5" && e.cycle_arcs == [-2, -1, 5, 6] => {}
            other => v.push(format!("cycle log {other:?}")),
        }
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("i4.kbcp");
        std::fs::write(&path, I4).unwrap();
        let run = || {
            Command::new(env!("CARGO_BIN_EXE_kbcp"))
                .args(["solve", "-i", path.to_str().unwrap(), "--beta", "cost2"])
                .output()
                .unwrap()
        };
        let (x, y) = (run(), run());
        if !x.status.success() || x.stdout != y.stdout || x.stdout != a.to_json().as_bytes() {
            v.push("binary output is not byte-stable or differs from the library".into());
        }
        outcomes.push(Outcome {
            name: "AC9 golden I4 with cost2",
            blocking: true,
            summary: "cost 7, delay 12, h 1, cycle [-2, -1, 5, 6] ratio -2/5".into(),
            violations: v,
        });
    }

    // AC10: cost scaling (soft)
    {
        let mut v = Vec::new();
        let eps = ratio(1, 2);
        let factor = ratio(1, 1) + &eps;
        let cost2 = preset_beta("cost2").unwrap();
        for (i, inst) in corpus.iter().enumerate().filter(|(i, _)| feasible[*i]) {
            let plain = SolveOptions { beta: cost2.clone(), ..Default::default() };
            let scaled = SolveOptions { scale: Some(eps.clone()), ..plain.clone() };
            let p = solve(inst, &plain).unwrap();
            let s = solve(inst, &scaled).unwrap();
            for (what, a, b) in [
                ("cost", &s.cost_ratio, &p.cost_ratio),
                ("delay", &s.delay_ratio, &p.delay_ratio),
            ] {
                let a = kbcp::parse_rational(a).unwrap();
                let b = kbcp::parse_rational(b).unwrap();
                if a > &b * &factor {
                    v.push(format!("instance {i}: scaled {what} ratio {a} vs {b}"));
                }
            }
        }
        outcomes.push(Outcome {
            name: "AC10 (soft) scaling with eps=1/2 stays within (1+eps) of unscaled",
            blocking: false,
            summary: format!("{n_feasible} instances, {} ratio comparisons", 2 * n_feasible),
            violations: v,
        });
    }

    // AC11: round trips and report checks
    {
        let mut v = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for i in 0..1000u64 {
            let k = rng.gen_range(1..=3);
            let cfg = GenConfig {
                routes: rng.gen_range(k..=6),
                extra_arcs: rng.gen_range(0..=12),
                max_cost: rng.gen_range(1..=50),
                max_delay: rng.gen_range(1..=50),
                k,
                seed: i,
                budget_mode: BudgetMode::Loose,
                inner_min: 1,
                inner_max: rng.gen_range(1..=4),
            };
            let inst = generate_instance(&cfg).unwrap();
            let text = write_instance(&inst);
            let back = parse_instance(&text).unwrap();
            if back != inst || write_instance(&back) != text {
                v.push(format!("round trip {i} changed the instance"));
            }
            let noisy = format!("# generated {i}\n\n{}", text.replace('\n', "  \r\n"));
            if parse_instance(&noisy).map(|x| write_instance(&x)) != Ok(text) {
                v.push(format!("round trip {i}: comments/whitespace not canonicalized"));
            }
        }
        let mut checked = 0;
        for (i, rep) in &reports {
            match check_report(&corpus[*i], rep, &limits) {
                Ok(_) => checked += 1,
                Err(e) => v.push(format!("report for instance {i}: {e}")),
            }
        }
        // one pass through the binary as well
        let dir = tempfile::tempdir().unwrap();
        for (n, (i, rep)) in reports.iter().enumerate().step_by(97) {
            let ipath = dir.path().join(format!("{n}.kbcp"));
            let rpath = dir.path().join(format!("{n}.json"));
            std::fs::write(&ipath, write_instance(&corpus[*i])).unwrap();
            std::fs::write(&rpath, rep.to_json()).unwrap();
            let status = Command::new(env!("CARGO_BIN_EXE_kbcp"))
                .args(["check", "-i", ipath.to_str().unwrap(), "-r", rpath.to_str().unwrap()])
                .output()
                .unwrap()
                .status;
            if status.code() != Some(0) {
                v.push(format!("kbcp check exited {status} on report {n}"));
            }
        }
        outcomes.push(Outcome {
            name: "AC11 1000 parse/write round trips; check accepts every suite report",
            blocking: true,
            summary: format!("{checked} of {} reports verified", reports.len()),
            violations: v,
        });
    }

    let mut blocking_failed = false;
    for o in &outcomes {
        let status = match (o.passed(), o.blocking) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "SOFT-FAIL",
        };
        println!("{status} {} [{}; {} violations]", o.name, o.summary, o.violations.len());
        for line in o.violations.iter().take(10) {
            println!("    {line}");
        }
        blocking_failed |= o.blocking && !o.passed();
    }
    println!("acceptance finished in {:.1}s", started.elapsed().as_secs_f64());
    if blocking_failed {
        std::process::exit(1);
    }
}

/// Instances with at most 7 vertices for cycle enumeration.
fn corpus_small(count: u64) -> Vec<Instance> {
    make_corpus(count, 7, 6)
}
