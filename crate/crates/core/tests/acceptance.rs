//! One line per acceptance criterion; exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use promise_lab_core::harness::{
    check_circuits, check_gadget_promise, check_intersections_exhaustive,
    check_intersections_random, check_lifts, check_machines, mutation_sensitivity,
    verify_hierarchy, verify_rule_exhaustive, vv_completeness, vv_soundness, EdgeStatus, Verdict,
};
use promise_lab_core::reductions::{diagram_nodes, pair_count, Catalog, Registry, RuleKind};
use promise_lab_core::Mutation;

const SEED: u64 = 0;
const ZERO_FAILURES: u64 = 0;

const RULE_WIDTH: usize = 3;
const RULE_BUDGET: Duration = Duration::from_secs(60);
const GADGET_BUDGET: Duration = Duration::from_secs(120);
const LIFTS_LEVEL2: usize = 500;
const LIFTS_LEVEL3: usize = 100;
const CIRCUITS: usize = 100;
const CIRCUIT_BUDGET: Duration = Duration::from_secs(120);
const INTERSECTION_SAMPLES: usize = 500;
const MACHINE_WIDTH: usize = 3;
const VV_SEEDS: u64 = 200;
const VV_WIDTHS: [usize; 3] = [2, 3, 4];
const VV_BUDGET: Duration = Duration::from_secs(300);

/// Rules with equality claims; every other catalog rule claims containment.
const EQUALITY_RULES: [&str; 7] = [
    "dual_sat",
    "dual_maxval",
    "dual_val",
    "dual_usat",
    "dual_uval",
    "dual_uvaln",
    "sat_to_maxval",
];

type Outcome = Result<(bool, String), promise_lab_core::Error>;
type Criterion = (&'static str, fn() -> Outcome);

fn failures(vs: &[Verdict]) -> u64 {
    vs.iter().map(|v| v.fail).sum()
}

fn checked(vs: &[Verdict]) -> u64 {
    vs.iter().map(|v| v.pass + v.fail).sum()
}

fn first_failure(vs: &[Verdict]) -> String {
    vs.iter()
        .find(|v| !v.ok())
        .map(|v| match &v.counterexample {
            Some(c) => format!("; first failure {}: {}", v.name, c.instance),
            None => format!("; first failure {}", v.name),
        })
        .unwrap_or_default()
}

fn rule_suite() -> Outcome {
    let start = Instant::now();
    let catalog = Catalog::standard();
    let mut vs = Vec::new();
    let mut kinds_ok = true;
    for rule in catalog.rules() {
        let want = if EQUALITY_RULES.contains(&rule.name()) {
            RuleKind::Equality
        } else {
            RuleKind::Containment
        };
        kinds_ok &= rule.kind() == want;
        vs.push(verify_rule_exhaustive(rule, RULE_WIDTH)?);
    }
    let t = start.elapsed();
    let full = vs.iter().all(|v| v.pass + v.fail >= 256);
    Ok((
        vs.len() == 13 && kinds_ok && full && failures(&vs) == ZERO_FAILURES && t < RULE_BUDGET,
        format!(
            "{} transforms, {} instances, {} failures, kinds {}, {:.1}s{}",
            vs.len(),
            checked(&vs),
            failures(&vs),
            if kinds_ok { "as claimed" } else { "MISMATCH" },
            t.as_secs_f64(),
            first_failure(&vs)
        ),
    ))
}

fn gadget() -> Outcome {
    let start = Instant::now();
    let catalog = Catalog::standard();
    let vs = (1..=3)
        .map(|m| check_gadget_promise(&catalog, m))
        .collect::<Result<Vec<_>, _>>()?;
    let widths: Vec<usize> = (1..=3).map(pair_count).collect();
    let counts_ok = vs.iter().zip([4, 16, 256]).all(|(v, n)| v.pass + v.fail == n);
    let t = start.elapsed();
    Ok((
        widths == [0, 1, 3] && counts_ok && failures(&vs) == ZERO_FAILURES && t < GADGET_BUDGET,
        format!(
            "m in 1..=3, m' = {widths:?}, {} instances, {} failures, {:.1}s{}",
            checked(&vs),
            failures(&vs),
            t.as_secs_f64(),
            first_failure(&vs)
        ),
    ))
}

fn lifts() -> Outcome {
    let catalog = Catalog::standard();
    let l2 = check_lifts(&catalog, &[2, 2], LIFTS_LEVEL2, SEED)?;
    let l3 = check_lifts(&catalog, &[2, 1, 1], LIFTS_LEVEL3, SEED + 1)?;
    let all: Vec<Verdict> = l2.iter().chain(&l3).cloned().collect();
    Ok((
        l2.len() == 13 && l3.len() == 12 && failures(&all) == ZERO_FAILURES,
        format!(
            "{} rules x {LIFTS_LEVEL2} level-2 families, {} rules x {LIFTS_LEVEL3} level-3 families, {} failures{}",
            l2.len(),
            l3.len(),
            failures(&all),
            first_failure(&all)
        ),
    ))
}

fn compiler() -> Outcome {
    let start = Instant::now();
    let v = check_circuits(CIRCUITS, SEED + 3)?;
    let t = start.elapsed();
    Ok((
        v.ok() && t < CIRCUIT_BUDGET,
        format!(
            "{CIRCUITS} circuits, {} (circuit, input) pairs, {} failures, {}, {:.1}s{}",
            v.pass + v.fail,
            v.fail,
            v.note.clone().unwrap_or_default(),
            t.as_secs_f64(),
            first_failure(std::slice::from_ref(&v))
        ),
    ))
}

fn intersections() -> Outcome {
    let mut vs = check_intersections_exhaustive(1, 1)?;
    vs.extend(check_intersections_random(2, 2, INTERSECTION_SAMPLES, SEED + 2)?);
    Ok((
        failures(&vs) == ZERO_FAILURES && vs[0].pass == 512,
        format!(
            "VAL and UVAL at (1,1) exhaustive and (2,2) x {INTERSECTION_SAMPLES}, {} checks, {} failures{}",
            checked(&vs),
            failures(&vs),
            first_failure(&vs)
        ),
    ))
}

fn machines() -> Outcome {
    let vs = check_machines(MACHINE_WIDTH, None)?;
    Ok((
        failures(&vs) == ZERO_FAILURES,
        format!(
            "sat-via-val and usat-via-uval on all tables m <= {MACHINE_WIDTH} plus promise instances at m = 4, {} inputs, {} failures{}",
            checked(&vs),
            failures(&vs),
            first_failure(&vs)
        ),
    ))
}

fn isolation() -> Outcome {
    let start = Instant::now();
    let mut vs = vec![vv_soundness(2, VV_SEEDS, SEED)?];
    let mut notes = Vec::new();
    for m in VV_WIDTHS {
        let (v, stats) = vv_completeness(m, VV_SEEDS, SEED)?;
        notes.push(format!(
            "m={m}: min success {:.3}, min isolation {:.3} vs 1/(8m) = {:.3}",
            stats.min_success, stats.min_isolation, stats.isolation_reference
        ));
        vs.extend(v);
    }
    let t = start.elapsed();
    Ok((
        failures(&vs) == ZERO_FAILURES && t < VV_BUDGET,
        format!(
            "soundness 16 x {VV_SEEDS}, completeness threshold 2/3; {}; {:.1}s{}",
            notes.join("; "),
            t.as_secs_f64(),
            first_failure(&vs)
        ),
    ))
}

fn hierarchy() -> Outcome {
    let r = verify_hierarchy(&Registry::standard(), SEED)?;
    let nodes = diagram_nodes().len();
    let solid = r.edges.iter().filter(|(_, s)| *s == EdgeStatus::Verified).count();
    let dashed = r.edges.iter().filter(|(_, s)| *s == EdgeStatus::RegistryOnly).count();
    let styled_by_witness = r.edges.iter().all(|(e, s)| {
        e.witness.is_executable() == (*s == EdgeStatus::Verified)
    });
    Ok((
        r.ok() && nodes == 15 && r.edges.len() == 21 && styled_by_witness,
        format!(
            "{nodes} nodes, {} edges ({solid} solid, {dashed} dashed), automorphism {}",
            r.edges.len(),
            if r.automorphism { "holds" } else { "BROKEN" }
        ),
    ))
}

fn mutations() -> Outcome {
    let mut caught = Vec::new();
    let mut missed = Vec::new();
    for mu in Mutation::ALL {
        let vs = mutation_sensitivity(mu, RULE_WIDTH)?;
        match vs.iter().find(|v| !v.ok()) {
            Some(v) => caught.push(format!("{mu} by {}", v.name)),
            None => missed.push(mu.to_string()),
        }
    }
    Ok((
        missed.is_empty(),
        format!(
            "{} of 5 caught ({}){}",
            caught.len(),
            caught.join(", "),
            if missed.is_empty() {
                String::new()
            } else {
                format!("; missed {}", missed.join(", "))
            }
        ),
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("strong reductions at level one", rule_suite),
        ("MAXVAL gadget and its uniqueness promise", gadget),
        ("lifts to levels two and three", lifts),
        ("oracle-circuit compiler", compiler),
        ("VAL and UVAL intersections", intersections),
        ("bit-fixing oracle machines", machines),
        ("randomized isolation", isolation),
        ("hierarchy diagram", hierarchy),
        ("mutation sensitivity", mutations),
    ];
    let mut all = true;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let (ok, detail) = match run() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        all &= ok;
        println!(
            "ACCEPTANCE {} {title}: {} ({detail})",
            i + 1,
            if ok { "PASS" } else { "FAIL" }
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
