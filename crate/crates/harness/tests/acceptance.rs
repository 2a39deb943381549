//! Acceptance criteria. Runs without the libtest harness so that each
//! criterion prints exactly one `[PASS]`/`[FAIL]` line; any failure makes the
//! target exit nonzero.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use ueq_core::enumerate::{all_classes, all_partitions, nonempty_subsets};
use ueq_core::{induce_topology, Carrier, ElementSet, PseudoMetric, Rational, UeqClass};
use ueq_harness::checks::{product_topologies_agree, relative_agrees_with_subspace, run_checks, Caps};
use ueq_harness::oracle;

const SEED: u64 = 42;

fn carrier(n: usize) -> Carrier {
    Carrier::new(n).unwrap()
}

fn ids(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn caps(max_carrier: usize) -> Caps {
    Caps {
        max_carrier,
        ..Caps::default()
    }
}

/// Prints the verdict line; a criterion passes when `problems` is empty and
/// the time limit holds.
fn verdict(criterion: &str, elapsed: Duration, limit: Duration, detail: String, mut problems: Vec<String>) -> bool {
    if elapsed >= limit {
        problems.push(format!("took {elapsed:.2?}, limit {limit:?}"));
    }
    let tag = if problems.is_empty() { "PASS" } else { "FAIL" };
    println!("[{tag}] {criterion}: {detail} in {elapsed:.2?} (limit {limit:?})");
    for p in &problems {
        println!("       {p}");
    }
    problems.is_empty()
}

fn report_problems(report: &ueq_harness::VerificationReport, min_rate: f64) -> Vec<String> {
    let mut problems = Vec::new();
    for c in &report.checks {
        if c.failures > 0 {
            problems.push(format!("{} failed: {:?}", c.check_id, c.counterexample));
        }
        if c.non_vacuous_rate() < min_rate {
            problems.push(format!("{} non-vacuous rate {:.2}", c.check_id, c.non_vacuous_rate()));
        }
    }
    problems
}

fn ac1_embedding_characterization() -> bool {
    let start = Instant::now();
    let report = run_checks(&ids(&["P2.6"]), SEED, 500, caps(5)).unwrap();
    let c = &report.checks[0];
    let mut problems = report_problems(&report, 1.0);
    if c.passes != 500 {
        problems.push(format!("only {} agreeing trials", c.passes));
    }
    verdict(
        "AC1 embedding definition vs characterization",
        start.elapsed(),
        Duration::from_secs(5),
        format!("{} maps, {} mismatches", c.passes + c.failures, c.failures),
        problems,
    )
}

fn ac2_product_and_subspace_topologies() -> bool {
    let start = Instant::now();
    let classes: Vec<UeqClass> = (1..=3).flat_map(|n| all_classes(carrier(n), 3)).collect();
    let mut problems = Vec::new();
    let mut compared = 0;
    for a in &classes {
        for b in &classes {
            compared += 1;
            if !product_topologies_agree(&[a.clone(), b.clone()]).unwrap() {
                problems.push(format!("product mismatch for {a:?} x {b:?}"));
            }
        }
        for y in nonempty_subsets(a.carrier()) {
            compared += 1;
            if !relative_agrees_with_subspace(a, &y).unwrap() {
                problems.push(format!("subspace mismatch for {a:?} on {:?}", y.to_vec()));
            }
        }
    }
    let report = run_checks(&ids(&["P2.12u", "P4.3"]), SEED, 500, Caps::default()).unwrap();
    problems.extend(report_problems(&report, 1.0));
    let random: u64 = report.checks.iter().map(|c| c.passes + c.failures).sum();
    verdict(
        "AC2 product and subspace topologies",
        start.elapsed(),
        Duration::from_secs(10),
        format!("{compared} exhaustive comparisons over {} classes, {random} random trials", classes.len()),
        problems,
    )
}

fn ac3_metric_families() -> bool {
    let start = Instant::now();
    let report = run_checks(&ids(&["P4.8", "P4.9"]), SEED, 300, caps(5)).unwrap();
    let problems = report_problems(&report, 1.0);
    verdict(
        "AC3 metric sub-base topology and evaluation embedding",
        start.elapsed(),
        Duration::from_secs(10),
        format!("300 families per check, {} failures", report.checks.iter().map(|c| c.failures).sum::<u64>()),
        problems,
    )
}

fn ac4_open_subspace_results() -> bool {
    let start = Instant::now();
    let list = ["P3.1", "P3.2", "P3.4", "P3.6", "P3.7", "P3.8", "P3.9", "P3.10"];
    let report = run_checks(&ids(&list), SEED, 500, Caps::default()).unwrap();
    let problems = report_problems(&report, 0.3);
    let rates: Vec<String> = report
        .checks
        .iter()
        .map(|c| format!("{} {:.0}%", c.check_id, 100.0 * c.non_vacuous_rate()))
        .collect();
    verdict(
        "AC4 open subspace results",
        start.elapsed(),
        Duration::from_secs(15),
        format!("500 trials each, non-vacuous: {}", rates.join(", ")),
        problems,
    )
}

/// Every pseudo-metric on `n` points with off-diagonal entries drawn from
/// `values`.
fn small_metrics(n: usize, values: &[Rational]) -> Vec<PseudoMetric> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|x| (x + 1..n).map(move |y| (x, y))).collect();
    let count = values.len().pow(pairs.len() as u32);
    (0..count)
        .filter_map(|mut code| {
            let mut m = vec![vec![Rational::from_integer(0); n]; n];
            for &(x, y) in &pairs {
                m[x][y] = values[code % values.len()];
                m[y][x] = m[x][y];
                code /= values.len();
            }
            PseudoMetric::new(m).ok()
        })
        .collect()
}

fn strong_triangle(d: &PseudoMetric) -> bool {
    let n = d.size();
    (0..n).all(|x| (0..n).all(|y| (0..n).all(|z| d.d(x, z) <= d.d(x, y).max(d.d(y, z)))))
}

fn ac5_oracle_equivalences() -> bool {
    let start = Instant::now();
    let mut problems = Vec::new();
    let mut counts = [0usize; 4];
    // 0, 1/2, 1, 3/2, 2
    let halves: Vec<Rational> = (0..=4).map(|k| Rational::new(k, 2)).collect();
    for n in 1..=4 {
        let parts = all_partitions(carrier(n));
        for a in &parts {
            for b in &parts {
                counts[0] += 1;
                if oracle::pairs_of(&a.meet(b).unwrap()) != oracle::meet_pairs(a, b) {
                    problems.push(format!("meet of {a:?} and {b:?}"));
                }
            }
        }
        let subsets: Vec<ElementSet> = std::iter::once(ElementSet::empty(n))
            .chain(nonempty_subsets(carrier(n)))
            .collect();
        // every class is generated by its own members, so no generator cap
        for c in all_classes(carrier(n), parts.len()) {
            counts[1] += 1;
            let t = induce_topology(&c);
            let opens: BTreeSet<Vec<usize>> = t.opens().iter().map(ElementSet::to_vec).collect();
            let literal = oracle::topology_from_literal_base(&c);
            if opens != literal {
                problems.push(format!("induced topology of {c:?}"));
            }
            for s in &subsets {
                counts[3] += 1;
                if t.closure(s) != oracle::closure_by_complement(&literal, n, s) {
                    problems.push(format!("closure of {:?} under {c:?}", s.to_vec()));
                }
            }
        }
        for d in small_metrics(n, &halves) {
            counts[2] += 1;
            // is_transitive compares its sweep with the strong triangle law itself
            match d.is_transitive() {
                Ok(t) if t == strong_triangle(&d) && t == oracle::transitive_by_sampling(&d) => {}
                other => problems.push(format!("transitivity of {:?}: {other:?}", d.matrix())),
            }
        }
    }
    verdict(
        "AC5 oracle equivalences",
        start.elapsed(),
        Duration::from_secs(10),
        format!(
            "{} meets, {} induced topologies, {} metrics, {} closures; {} mismatches",
            counts[0],
            counts[1],
            counts[2],
            counts[3],
            problems.len()
        ),
        problems,
    )
}

fn ac6_round_trip() -> bool {
    let start = Instant::now();
    let report = run_checks(&ids(&["P4.10", "P4.6"]), SEED, 200, Caps::default()).unwrap();
    let problems = report_problems(&report, 0.3);
    let trips = report.check("P4.10").map(|c| c.passes).unwrap_or(0);
    verdict(
        "AC6 metric round trip and evaluation embedding",
        start.elapsed(),
        Duration::from_secs(10),
        format!("{trips} exact round trips out of 200"),
        problems,
    )
}

fn ac7_reports_are_deterministic() -> bool {
    let start = Instant::now();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_ueq"))
            .args(["verify", "--all", "--seed", "42", "--json"])
            .output()
            .unwrap()
    };
    let first = run();
    let second = run();
    let mut problems = Vec::new();
    if !first.status.success() {
        problems.push(format!("exit status {:?}", first.status.code()));
    }
    if first.stdout != second.stdout {
        problems.push("reports differ".into());
    }
    if first.stdout.is_empty() {
        problems.push("empty report".into());
    }
    verdict(
        "AC7 deterministic verify --all --seed 42",
        start.elapsed(),
        Duration::from_secs(60),
        format!("two reports of {} bytes, identical: {}", first.stdout.len(), first.stdout == second.stdout),
        problems,
    )
}

fn main() {
    let criteria: [fn() -> bool; 7] = [
        ac1_embedding_characterization,
        ac2_product_and_subspace_topologies,
        ac3_metric_families,
        ac4_open_subspace_results,
        ac5_oracle_equivalences,
        ac6_round_trip,
        ac7_reports_are_deterministic,
    ];
    let failed = criteria.iter().filter(|run| !run()).count();
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
