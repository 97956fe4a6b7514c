//! Verification campaigns: instance generators, per-check verdicts and the
//! full default campaign.

mod campaigns;
mod hierarchy;

use std::fmt;
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;

use crate::circuit::{Gate, OracleCircuit};
use crate::error::{Error, Result};
use crate::expr::{from_truth_table, Expr, Family, VarRef};
use crate::reductions::{RuleKind, ReductionRule};
use crate::semantics::Solver;

pub use campaigns::{
    check_circuits, check_gadget_promise, check_intersections_exhaustive,
    check_intersections_random, check_lifts, check_machines, full_campaign, mutation_sensitivity,
    vv_completeness, vv_soundness, CampaignOptions, VvStats,
};
pub use hierarchy::{
    duality_automorphism_holds, emit_hierarchy_dot, verify_hierarchy, EdgeStatus, HierarchyReport,
};

/// A failing instance in replayable form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    /// CLI arguments that replay the check on `instance`.
    pub replay: String,
    pub instance: String,
    pub expected: String,
    pub got: String,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "instance: {}\nexpected: {}\ngot: {}\nreplay: {}",
            self.instance, self.expected, self.got, self.replay
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub name: String,
    pub pass: u64,
    pub fail: u64,
    pub counterexample: Option<Counterexample>,
    pub elapsed: Duration,
    /// Measured quantities worth printing next to the counts.
    pub note: Option<String>,
}

impl Verdict {
    pub fn ok(&self) -> bool {
        self.fail == 0
    }

    /// `CHECK <name> pass=<n> fail=<n> time=<ms>`; `time=0` when timing is off.
    pub fn report_line(&self, timing: bool) -> String {
        let ms = if timing { self.elapsed.as_millis() } else { 0 };
        format!(
            "CHECK {} pass={} fail={} time={ms}",
            self.name, self.pass, self.fail
        )
    }

    pub(crate) fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Runs `check` on every item in parallel. The first error and the first
/// counterexample are taken in item order, so results do not depend on
/// scheduling.
pub fn tally<T, F>(name: impl Into<String>, items: &[T], check: F) -> Result<Verdict>
where
    T: Sync,
    F: Fn(&T) -> Result<Option<Counterexample>> + Sync,
{
    let start = Instant::now();
    let results: Vec<Result<Option<Counterexample>>> = items.par_iter().map(&check).collect();
    let mut pass = 0;
    let mut fail = 0;
    let mut counterexample = None;
    for r in results {
        match r? {
            None => pass += 1,
            Some(c) => {
                fail += 1;
                counterexample.get_or_insert(c);
            }
        }
    }
    Ok(Verdict {
        name: name.into(),
        pass,
        fail,
        counterexample,
        elapsed: start.elapsed(),
        note: None,
    })
}

/// Runs `f` on a pool of at most `jobs` workers (all cores when `None`).
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

const MAX_TABLE_WIDTH: usize = 4;

fn table_cap_error(n: usize) -> Error {
    Error::CapExceeded {
        needed: 1u128 << (1u32 << n.min(6)).min(127),
        cap: 1 << (1 << MAX_TABLE_WIDTH),
    }
}

/// One family per boolean function over the given blocks, in order of
/// the table read as a binary number with entry 0 least significant.
pub fn enumerate_tables(widths: &[usize]) -> Result<Vec<Family>> {
    let n: usize = widths.iter().sum();
    if n > MAX_TABLE_WIDTH {
        return Err(table_cap_error(n));
    }
    let len = 1usize << n;
    (0..1u64 << len)
        .map(|t| {
            let table: Vec<bool> = (0..len).map(|i| (t >> i) & 1 == 1).collect();
            from_truth_table(widths, &table)
        })
        .collect()
}

/// All `2^(2^m)` functions of one `m`-bit block.
pub fn enumerate_truth_tables(m: usize) -> Result<Vec<Family>> {
    enumerate_tables(&[m])
}

fn random_expr<R: Rng + ?Sized>(vars: &[VarRef], budget: usize, rng: &mut R) -> Expr {
    if budget <= 1 || rng.gen_ratio(1, 4) {
        if vars.is_empty() || rng.gen_ratio(1, 12) {
            return Expr::Const(rng.gen());
        }
        return Expr::Var(vars[rng.gen_range(0..vars.len())]);
    }
    match rng.gen_range(0..5) {
        0 => Expr::not(random_expr(vars, budget - 1, rng)),
        k => {
            let left = rng.gen_range(1..budget.max(2));
            let a = random_expr(vars, left, rng);
            let b = random_expr(vars, budget.saturating_sub(left).max(1), rng);
            if k % 2 == 0 {
                Expr::and(a, b)
            } else {
                Expr::or(a, b)
            }
        }
    }
}

fn block_vars(widths: &[usize]) -> Vec<VarRef> {
    widths
        .iter()
        .enumerate()
        .flat_map(|(b, &w)| (1..=w).map(move |i| VarRef::new(b + 1, i)))
        .collect()
}

/// Random expression over the given blocks with roughly `budget` nodes.
pub fn random_family<R: Rng + ?Sized>(widths: &[usize], budget: usize, rng: &mut R) -> Family {
    let body = random_expr(&block_vars(widths), budget.max(1), rng);
    Family::new(widths.to_vec(), body).expect("variables drawn from the blocks")
}

/// Random function given by a uniformly drawn truth table.
pub fn random_table_family<R: Rng + ?Sized>(widths: &[usize], rng: &mut R) -> Family {
    let n: usize = widths.iter().sum();
    let table: Vec<bool> = (0..1usize << n).map(|_| rng.gen()).collect();
    from_truth_table(widths, &table).expect("table length matches")
}

/// Bounds for [`random_circuit`].
#[derive(Clone, Copy, Debug)]
pub struct CircuitSpec {
    pub max_inputs: usize,
    pub max_gates: usize,
    pub max_sat_gates: usize,
    pub max_witness: usize,
    pub budget: usize,
}

impl Default for CircuitSpec {
    fn default() -> Self {
        CircuitSpec {
            max_inputs: 2,
            max_gates: 4,
            max_sat_gates: 1,
            max_witness: 2,
            budget: 6,
        }
    }
}

pub fn random_circuit<R: Rng + ?Sized>(spec: &CircuitSpec, rng: &mut R) -> OracleCircuit {
    let m = rng.gen_range(1..=spec.max_inputs.max(1));
    let q = rng.gen_range(1..=spec.max_gates.max(1));
    let mut sat_left = rng.gen_range(0..=spec.max_sat_gates);
    let mut gates = Vec::with_capacity(q);
    for i in 1..=q {
        let mut vars: Vec<VarRef> = (1..=m).map(|j| VarRef::new(1, j)).collect();
        vars.extend((i + 1..=q).map(|j| VarRef::new(2, j)));
        let make_sat = sat_left > 0 && rng.gen_bool(0.5);
        if make_sat {
            sat_left -= 1;
            let w = rng.gen_range(1..=spec.max_witness.max(1));
            vars.extend((1..=w).map(|j| VarRef::new(3, j)));
            gates.push(Gate::Sat {
                width: w,
                body: random_expr(&vars, spec.budget, rng),
            });
        } else {
            gates.push(Gate::Ordinary(random_expr(&vars, spec.budget, rng)));
        }
    }
    OracleCircuit::new(m, gates).expect("variables drawn from the allowed range")
}

fn relation(kind: RuleKind) -> &'static str {
    match kind {
        RuleKind::Equality => "=",
        RuleKind::Containment => "⊇",
    }
}

/// Checks `rule` on one instance; `None` when it holds.
pub fn rule_counterexample(
    solver: &Solver,
    rule: &ReductionRule,
    f: &Family,
) -> Result<Option<Counterexample>> {
    let o = rule.check_with(solver, f)?;
    if o.pass {
        return Ok(None);
    }
    let level = f.level();
    Ok(Some(Counterexample {
        replay: format!("check --rule {}", rule.name()),
        instance: f.to_string(),
        expected: format!(
            "{}_{level}(f) {} {}_{}(μ(f)), size ≤ {}·size^{}",
            rule.source(),
            relation(rule.kind()),
            rule.target(),
            level + rule.shift(),
            rule.size_bound().coeff,
            rule.size_bound().degree
        ),
        got: format!(
            "{} vs {}, sizes {} -> {}",
            o.source_value,
            o.target_value,
            f.size(),
            o.transformed.size()
        ),
    }))
}

/// Instances of total width `m` matching the rule's level: one block of
/// width `m`, or for a rule fixed at level 2 every shape `(a, m − a)` with
/// both parts nonempty.
pub fn exhaustive_instances(rule: &ReductionRule, m: usize) -> Result<Vec<Family>> {
    match rule.fixed_level() {
        None | Some(1) => enumerate_truth_tables(m),
        Some(2) => {
            let mut out = Vec::new();
            for a in 1..m {
                out.extend(enumerate_tables(&[a, m - a])?);
            }
            Ok(out)
        }
        Some(l) => Err(Error::shape(format!(
            "no exhaustive instance space for level {l}"
        ))),
    }
}

pub fn verify_rule_exhaustive(rule: &ReductionRule, m: usize) -> Result<Verdict> {
    let solver = Solver::default();
    let instances = exhaustive_instances(rule, m)?;
    tally(format!("rule/{}/m{m}", rule.name()), &instances, |f| {
        rule_counterexample(&solver, rule, f)
    })
}

/// Checks `rule` on the given instances.
pub fn verify_rule_on(name: impl Into<String>, rule: &ReductionRule, instances: &[Family]) -> Result<Verdict> {
    let solver = Solver::default();
    tally(name, instances, |f| rule_counterexample(&solver, rule, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::truth_table;
    use crate::reductions::Catalog;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn table_counts() {
        assert_eq!(enumerate_truth_tables(1).unwrap().len(), 4);
        assert_eq!(enumerate_truth_tables(2).unwrap().len(), 16);
        assert_eq!(enumerate_truth_tables(3).unwrap().len(), 256);
        assert!(matches!(
            enumerate_truth_tables(5),
            Err(Error::CapExceeded { .. })
        ));
        let fs = enumerate_truth_tables(2).unwrap();
        for (t, f) in fs.iter().enumerate() {
            let want: Vec<bool> = (0..4).map(|i| (t >> i) & 1 == 1).collect();
            assert_eq!(truth_table(f).to_bools(), want);
        }
    }

    #[test]
    fn random_family_is_reproducible_and_well_formed() {
        let a = random_family(&[3, 2], 10, &mut ChaCha8Rng::seed_from_u64(1));
        let b = random_family(&[3, 2], 10, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(a, b);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let f = random_family(&[3, 2], 12, &mut rng);
            let back: Family = f.to_string().parse().unwrap();
            assert_eq!(back, f);
        }
    }

    #[test]
    fn random_circuits_respect_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let spec = CircuitSpec::default();
        for _ in 0..200 {
            let c = random_circuit(&spec, &mut rng);
            assert!(c.gate_count() <= 4 && c.input_width() <= 2);
            assert!(c.sat_gate_count() <= 1 && c.witness_width() <= 2);
            let back: OracleCircuit = c.to_string().parse().unwrap();
            assert_eq!(back, c);
        }
    }

    #[test]
    fn exhaustive_rule_examples() {
        let cat = Catalog::standard();
        let v = verify_rule_exhaustive(cat.get("usat_to_sat").unwrap(), 3).unwrap();
        assert_eq!((v.pass, v.fail), (256, 0));
        let v = verify_rule_exhaustive(cat.get("maxval_to_uvaln1").unwrap(), 3).unwrap();
        assert_eq!((v.pass, v.fail), (256, 0));
        assert_eq!(v.report_line(false), "CHECK rule/maxval_to_uvaln1/m3 pass=256 fail=0 time=0");
        let v = verify_rule_exhaustive(cat.get("dual_uvaln").unwrap(), 3).unwrap();
        assert_eq!((v.pass, v.fail), (512, 0));
    }

    #[test]
    fn corrupted_gadget_is_caught() {
        let cat = Catalog::with_mutation(Some(crate::Mutation::GadgetPositiveGuard));
        let v = verify_rule_exhaustive(cat.get("maxval_to_uvaln1").unwrap(), 3).unwrap();
        assert!(v.fail > 0);
        let c = v.counterexample.unwrap();
        let f: Family = c.instance.parse().unwrap();
        assert!(!cat.get("maxval_to_uvaln1").unwrap().check(&f).unwrap().pass);
    }

    #[test]
    fn jobs_cap_runs() {
        let n = with_jobs(Some(1), rayon::current_num_threads);
        assert_eq!(n, 1);
    }
}
