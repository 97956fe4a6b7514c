use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{
    enumerate_tables, enumerate_truth_tables, random_circuit, random_family,
    random_table_family, rule_counterexample, tally, verify_rule_exhaustive, verify_rule_on,
    CircuitSpec, Counterexample, Verdict,
};
use crate::circuit::{check_compiled, compile_uval2, COMPILED_SIZE_COEFF};
use crate::error::Result;
use crate::expr::{format_bits, index_bits, Family};
use crate::mutation::Mutation;
use crate::oracle::{check_machine, machine, Resolution};
use crate::reductions::{
    check_pi1_to_uval, check_uval_intersection, check_val_intersection, pair_count, Catalog,
    Registry, ReductionRule,
};
use crate::semantics::{PromiseValue, Solver};
use crate::vv::{decide_by_masks, default_trials, isolation_count, plan_from_seed, solution_mask, vv_run};

/// Sizes and seeds of the default campaign.
#[derive(Clone, Debug)]
pub struct CampaignOptions {
    pub seed: u64,
    /// Exhaustive width for rule checks; 4 is the long mode.
    pub rule_width: usize,
    pub lifts_level2: usize,
    pub lifts_level3: usize,
    pub intersection_samples: usize,
    pub circuits: usize,
    pub vv_seeds: u64,
    pub vv_widths: Vec<usize>,
}

impl Default for CampaignOptions {
    fn default() -> Self {
        CampaignOptions {
            seed: 0,
            rule_width: 3,
            lifts_level2: 500,
            lifts_level3: 100,
            intersection_samples: 500,
            circuits: 100,
            vv_seeds: 200,
            vv_widths: vec![2, 3, 4],
        }
    }
}

/// Extra additive term allowed for the gadget: `size(g) ≤ (m+1)·size(f) + 4m²`.
pub const GADGET_SLACK: usize = 4;

/// `maxval_to_uvaln1` on every table of width `m`: the containment, the
/// pair-block width `m(m−1)/2`, the size bound, and for satisfiable `f`
/// exactly one first-block solution whose first bit is the MAXVAL answer.
pub fn check_gadget_promise(catalog: &Catalog, m: usize) -> Result<Verdict> {
    let rule = catalog.get("maxval_to_uvaln1")?;
    let solver = Solver::default();
    let tables = enumerate_truth_tables(m)?;
    tally(format!("gadget-promise/m{m}"), &tables, |f| {
        if let Some(c) = rule_counterexample(&solver, rule, f)? {
            return Ok(Some(c));
        }
        let g = rule.apply(f)?;
        let sols = solver.first_block_solution_set(f)?;
        let mut problems = Vec::new();
        if g.widths() != [m, pair_count(m)] {
            problems.push(format!("widths {:?}", g.widths()));
        }
        if g.size() > (m + 1) * f.size() + GADGET_SLACK * m * m {
            problems.push(format!("size {} from {}", g.size(), f.size()));
        }
        if let Some(max) = sols.iter().max() {
            let gs = solver.first_block_solution_set(&g)?;
            if gs.len() != 1 || gs[0][0] != max[0] {
                problems.push(format!("{} solutions of g", gs.len()));
            }
        }
        Ok((!problems.is_empty()).then(|| Counterexample {
            replay: "check --rule maxval_to_uvaln1".into(),
            instance: f.to_string(),
            expected: "exactly one solution of g with first bit MAXVAL(f)".into(),
            got: problems.join("; "),
        }))
    })
}

fn lift_instances(widths_max: &[usize], count: usize, seed: u64) -> Vec<Family> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let widths: Vec<usize> = widths_max.iter().map(|&w| rng.gen_range(1..=w)).collect();
            if i % 2 == 0 {
                random_family(&widths, 10, &mut rng)
            } else {
                random_table_family(&widths, &mut rng)
            }
        })
        .collect()
}

/// Every rule applicable at the level of `widths_max` on seeded random
/// families whose block widths lie between 1 and the given maxima.
pub fn check_lifts(
    catalog: &Catalog,
    widths_max: &[usize],
    count: usize,
    seed: u64,
) -> Result<Vec<Verdict>> {
    let level = widths_max.len();
    let instances = lift_instances(widths_max, count, seed);
    catalog
        .rules()
        .filter(|r| r.fixed_level().is_none_or(|l| l == level))
        .map(|r| verify_rule_on(format!("lift{level}/{}", r.name()), r, &instances))
        .collect()
}

fn intersection_cex(
    kind: &str,
    g: &Family,
    h: &Family,
    x: &[bool],
    value: PromiseValue,
    forced: PromiseValue,
) -> Counterexample {
    Counterexample {
        replay: format!("check --intersection {kind} --x {}", format_bits(x)),
        instance: format!("{g}\n{h}"),
        expected: format!("value within {forced}"),
        got: value.to_string(),
    }
}

fn intersection_verdicts(
    label: &str,
    items: &[(Family, Family, Vec<bool>)],
) -> Result<Vec<Verdict>> {
    let val = tally(format!("intersection-val/{label}"), items, |(g, h, x)| {
        let o = check_val_intersection(g, h, x)?;
        Ok((!o.pass).then(|| intersection_cex("val", g, h, x, o.value, o.forced)))
    })?;
    let uval = tally(format!("intersection-uval/{label}"), items, |(g, h, x)| {
        let o = check_uval_intersection(g, h, x)?;
        Ok((!o.pass).then(|| intersection_cex("uval", g, h, x, o.value, o.forced)))
    })?;
    Ok(vec![val, uval])
}

/// All pairs of witness tables with blocks `(a, b)` and every `x`.
pub fn check_intersections_exhaustive(a: usize, b: usize) -> Result<Vec<Verdict>> {
    let tables = enumerate_tables(&[a, b])?;
    let mut items = Vec::with_capacity((tables.len() * tables.len()) << a);
    for g in &tables {
        for h in &tables {
            for i in 0..1u64 << a {
                items.push((g.clone(), h.clone(), index_bits(i, a)));
            }
        }
    }
    intersection_verdicts(&format!("{a}x{b}"), &items)
}

pub fn check_intersections_random(a: usize, b: usize, count: usize, seed: u64) -> Result<Vec<Verdict>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let items: Vec<_> = (0..count)
        .map(|_| {
            let g = random_table_family(&[a, b], &mut rng);
            let h = random_table_family(&[a, b], &mut rng);
            let x: Vec<bool> = (0..a).map(|_| rng.gen()).collect();
            (g, h, x)
        })
        .collect();
    intersection_verdicts(&format!("{a}x{b}-sampled"), &items)
}

/// The compiler on `count` seeded circuits at every input.
pub fn check_circuits(count: usize, seed: u64) -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = CircuitSpec::default();
    let mut items = Vec::new();
    for _ in 0..count {
        let c = random_circuit(&spec, &mut rng);
        for i in 0..1u64 << c.input_width() {
            items.push((c.clone(), index_bits(i, c.input_width())));
        }
    }
    let ratios: Vec<f64> = items
        .par_iter()
        .map(|(c, a)| {
            compile_uval2(c, a).map(|u| u.family.size() as f64 / (c.size() * c.size()) as f64)
        })
        .collect::<Result<_>>()?;
    let worst = ratios.iter().cloned().fold(0.0, f64::max);
    let v = tally("compile", &items, |(c, alpha)| {
        let r = check_compiled(c, alpha)?;
        let size_ok = r.uval2_size <= COMPILED_SIZE_COEFF * c.size() * c.size();
        if r.pass() && size_ok {
            return Ok(None);
        }
        Ok(Some(Counterexample {
            replay: format!("compile --check --alpha {}", format_bits(alpha)),
            instance: c.to_string(),
            expected: format!(
                "Σ₂ = UVAL₂ = circuit value with one valid assignment, size ≤ {COMPILED_SIZE_COEFF}·size²"
            ),
            got: format!("{r:?}"),
        }))
    })?;
    Ok(v.with_note(format!("max size(UVAL₂)/size(circuit)² = {worst:.2}")))
}

/// The two bit-fixing machines on every table of width `≤ max_m`, and the
/// UVAL machine on every instance of width 4 with at most one solution.
pub fn check_machines(max_m: usize, mutation: Option<Mutation>) -> Result<Vec<Verdict>> {
    let solver = Solver::default();
    let mut all = Vec::new();
    for m in 0..=max_m {
        all.extend(enumerate_truth_tables(m)?);
    }
    let promise: Vec<Family> = enumerate_truth_tables(4)?
        .into_iter()
        .filter(|f| solver.first_block_solution_set(f).is_ok_and(|s| s.len() <= 1))
        .collect();
    let run = |name: &str, label: String, items: &[Family]| -> Result<Verdict> {
        let mach = machine(name, mutation)?;
        tally(label, items, |f| {
            let m = f.width(1);
            let v = check_machine(mach.as_ref(), f, Some(m))?;
            Ok((!v.pass()).then(|| Counterexample {
                replay: format!("simulate --machine {name}"),
                instance: f.to_string(),
                expected: format!("every leaf in {} after {m} calls", v.source_value),
                got: format!("{v:?}"),
            }))
        })
    };
    Ok(vec![
        run("sat-via-val", format!("machine/sat-via-val/m0-{max_m}"), &all)?,
        run("usat-via-uval", format!("machine/usat-via-uval/m0-{max_m}"), &all)?,
        run("usat-via-uval", "machine/usat-via-uval/promise-m4".into(), &promise)?,
    ])
}

/// Every seeded run at width `m` on every function, with all free answers
/// explored: no path outputs `1` on an unsatisfiable function.
pub fn vv_soundness(m: usize, seeds: u64, base_seed: u64) -> Result<Verdict> {
    let tables = enumerate_truth_tables(m)?;
    let trials = default_trials(m);
    let items: Vec<(usize, u64)> = (0..tables.len())
        .flat_map(|i| (0..seeds).map(move |s| (i, s)))
        .collect();
    tally(format!("vv-soundness/m{m}"), &items, |&(i, s)| {
        let f = &tables[i];
        let plan = plan_from_seed(m, trials, None, base_seed + s)?;
        let tree = vv_run(f, plan, Resolution::Exhaustive)?;
        let sat = solution_mask(f)? != 0;
        let bad = !sat && tree.outputs().any(|b| b);
        Ok(bad.then(|| Counterexample {
            replay: format!("vv --seed {} --trials {trials} --exhaustive", base_seed + s),
            instance: f.to_string(),
            expected: "0 on every path".into(),
            got: "a path output 1".into(),
        }))
    })
}

/// Success and isolation frequencies at one width.
#[derive(Clone, Debug, PartialEq)]
pub struct VvStats {
    pub m: usize,
    pub trials: usize,
    pub seeds: u64,
    pub functions: usize,
    /// Lowest success frequency over satisfiable functions, and a function attaining it.
    pub min_success: f64,
    pub worst_success: u64,
    pub min_isolation: f64,
    pub worst_isolation: u64,
    /// `1/(8m)`.
    pub isolation_reference: f64,
}

/// Success threshold for each satisfiable function.
pub const VV_SUCCESS_THRESHOLD: f64 = 2.0 / 3.0;
/// Allowed shortfall of an isolation frequency below `1/(8m)`, in standard errors.
pub const VV_ISOLATION_SIGMAS: f64 = 3.0;

/// Completeness at width `m`: every satisfiable function is accepted with
/// frequency at least 2/3 over `seeds` plans when free queries answer `0`,
/// and its per-trial isolation frequency stays above `1/(8m) − 3σ`.
pub fn vv_completeness(m: usize, seeds: u64, base_seed: u64) -> Result<(Vec<Verdict>, VvStats)> {
    let start = Instant::now();
    let trials = default_trials(m);
    let plans: Vec<Vec<u64>> = (0..seeds)
        .map(|s| {
            plan_from_seed(m, trials, None, base_seed + s)
                .map(|p| p.iter().map(|h| h.mask()).collect())
        })
        .collect::<Result<_>>()?;
    let functions: Vec<u64> = (1u64..1 << (1 << m)).collect();
    let per: Vec<(u64, f64, f64)> = functions
        .par_iter()
        .map(|&sol| {
            let mut wins = 0u64;
            let mut isolated = 0usize;
            for masks in &plans {
                wins += u64::from(decide_by_masks(sol, masks, false));
                isolated += isolation_count(sol, masks);
            }
            let n = (seeds as usize * trials) as f64;
            (sol, wins as f64 / seeds as f64, isolated as f64 / n)
        })
        .collect();
    let reference = 1.0 / (8.0 * m as f64);
    let n = (seeds as usize * trials) as f64;
    let sigma = (reference * (1.0 - reference) / n).sqrt();
    let floor = reference - VV_ISOLATION_SIGMAS * sigma;
    let (ws, min_success, _) = per
        .iter()
        .cloned()
        .fold((0, f64::INFINITY, 0.0), |a, b| if b.1 < a.1 { b } else { a });
    let (wi, _, min_isolation) = per
        .iter()
        .cloned()
        .fold((0, 0.0, f64::INFINITY), |a, b| if b.2 < a.2 { b } else { a });
    let table_text = |sol: u64| {
        let table: Vec<bool> = (0..1 << m).map(|i| (sol >> i) & 1 == 1).collect();
        crate::expr::from_truth_table(&[m], &table).map(|f| f.to_string())
    };
    let mut verdicts = Vec::new();
    for (label, bad, worst, got) in [
        (
            "vv-completeness",
            per.iter().filter(|p| p.1 < VV_SUCCESS_THRESHOLD).count(),
            ws,
            min_success,
        ),
        (
            "vv-isolation",
            per.iter().filter(|p| p.2 < floor).count(),
            wi,
            min_isolation,
        ),
    ] {
        let counterexample = if bad > 0 {
            Some(Counterexample {
                replay: format!("vv --stats --m {m} --seeds {seeds} --seed {base_seed}"),
                instance: table_text(worst)?,
                expected: if label == "vv-completeness" {
                    format!("frequency ≥ {VV_SUCCESS_THRESHOLD:.4}")
                } else {
                    format!("frequency ≥ {floor:.4}")
                },
                got: format!("{got:.4}"),
            })
        } else {
            None
        };
        verdicts.push(Verdict {
            name: format!("{label}/m{m}"),
            pass: (per.len() - bad) as u64,
            fail: bad as u64,
            counterexample,
            elapsed: start.elapsed(),
            note: Some(if label == "vv-completeness" {
                format!("min success {min_success:.4} over {seeds} seeds, t={trials}")
            } else {
                format!(
                    "min isolation {min_isolation:.4}, reference 1/(8m) = {reference:.4}, floor {floor:.4}"
                )
            }),
        });
    }
    let stats = VvStats {
        m,
        trials,
        seeds,
        functions: per.len(),
        min_success,
        worst_success: ws,
        min_isolation,
        worst_isolation: wi,
        isolation_reference: reference,
    };
    Ok((verdicts, stats))
}

/// The formula path against the mask path for every satisfiable function
/// at width `m` over `seeds` plans.
pub fn vv_cross_check(m: usize, seeds: u64, base_seed: u64) -> Result<Verdict> {
    let tables = enumerate_truth_tables(m)?;
    let trials = default_trials(m);
    let items: Vec<(usize, u64)> = (0..tables.len())
        .flat_map(|i| (0..seeds).map(move |s| (i, s)))
        .collect();
    tally(format!("vv-formula-vs-mask/m{m}"), &items, |&(i, s)| {
        let f = &tables[i];
        let plan = plan_from_seed(m, trials, None, base_seed + s)?;
        let masks: Vec<u64> = plan.iter().map(|h| h.mask()).collect();
        let by_mask = decide_by_masks(solution_mask(f)?, &masks, false);
        let by_formula = vv_run(f, plan, Resolution::Fixed(false))?.paths[0].output;
        Ok((by_mask != by_formula).then(|| Counterexample {
            replay: format!("vv --seed {} --trials {trials}", base_seed + s),
            instance: f.to_string(),
            expected: by_mask.to_string(),
            got: by_formula.to_string(),
        }))
    })
}

fn level0_verdict() -> Result<Verdict> {
    let items: Vec<Vec<bool>> = (1..=5usize)
        .flat_map(|n| (0..1u64 << n).map(move |i| index_bits(i, n)))
        .collect();
    tally("rule/pi1_to_uval/n1-5", &items, |x| {
        let (v, ok) = check_pi1_to_uval(x)?;
        Ok((!ok).then(|| Counterexample {
            replay: "check --rule pi1_to_uval".into(),
            instance: format_bits(x),
            expected: format!("UVAL = {{{}}}", u8::from(x[0])),
            got: v.to_string(),
        }))
    })
}

fn rule_suite(rules: Vec<&ReductionRule>, m: usize) -> Result<Vec<Verdict>> {
    rules.into_iter().map(|r| verify_rule_exhaustive(r, m)).collect()
}

/// The default campaign in a fixed order.
pub fn full_campaign(opts: &CampaignOptions) -> Result<Vec<Verdict>> {
    let registry = Registry::standard();
    let catalog = registry.catalog();
    let mut out = rule_suite(catalog.rules().collect(), opts.rule_width)?;
    out.extend(rule_suite(registry.compositions().collect(), opts.rule_width)?);
    out.push(level0_verdict()?);
    for m in 1..=3 {
        out.push(check_gadget_promise(catalog, m)?);
    }
    out.extend(check_lifts(catalog, &[2, 2], opts.lifts_level2, opts.seed)?);
    out.extend(check_lifts(catalog, &[2, 1, 1], opts.lifts_level3, opts.seed + 1)?);
    out.extend(check_intersections_exhaustive(1, 1)?);
    out.extend(check_intersections_exhaustive(2, 1)?);
    out.extend(check_intersections_random(2, 2, opts.intersection_samples, opts.seed + 2)?);
    out.push(check_circuits(opts.circuits, opts.seed + 3)?);
    out.extend(check_machines(3, None)?);
    out.push(vv_soundness(2, opts.vv_seeds, opts.seed)?);
    for &m in &opts.vv_widths {
        out.extend(vv_completeness(m, opts.vv_seeds, opts.seed)?.0);
    }
    for m in 2..=3 {
        out.push(vv_cross_check(m, 20, opts.seed)?);
    }
    Ok(out)
}

/// Rule and machine campaigns with one fault injected. The fault counts as
/// caught when some returned verdict fails.
pub fn mutation_sensitivity(mutation: Mutation, m: usize) -> Result<Vec<Verdict>> {
    let catalog = Catalog::with_mutation(Some(mutation));
    let mut out = rule_suite(catalog.rules().collect(), m)?;
    out.extend(check_machines(m, Some(mutation))?);
    for v in &mut out {
        v.name = format!("mutant/{}/{}", mutation.name(), v.name);
        if let Some(c) = &mut v.counterexample {
            c.replay = format!("{} --mutation {}", c.replay, mutation.name());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gadget_promise_small() {
        let cat = Catalog::standard();
        for m in 1..=3 {
            let v = check_gadget_promise(&cat, m).unwrap();
            assert!(v.ok(), "{v:?}");
            assert_eq!(v.pass, 1 << (1 << m));
        }
    }

    #[test]
    fn intersections_1x1() {
        for v in check_intersections_exhaustive(1, 1).unwrap() {
            assert_eq!((v.pass, v.fail), (512, 0));
        }
    }

    #[test]
    fn machines_pass_and_mutants_fail() {
        assert!(check_machines(2, None).unwrap().iter().all(Verdict::ok));
        for mu in [Mutation::ValMachineSkipsFix, Mutation::UvalMachineFlipsBit] {
            assert!(check_machines(3, Some(mu)).unwrap().iter().any(|v| !v.ok()));
        }
    }

    #[test]
    fn every_mutation_is_caught() {
        for mu in Mutation::ALL {
            let vs = mutation_sensitivity(mu, 3).unwrap();
            assert!(vs.iter().any(|v| !v.ok()), "{mu} not caught");
        }
    }

    #[test]
    fn vv_small_width() {
        assert!(vv_soundness(2, 10, 0).unwrap().ok());
        let (vs, stats) = vv_completeness(2, 50, 0).unwrap();
        assert!(vs.iter().all(Verdict::ok), "{stats:?}");
        assert_eq!(stats.functions, 15);
        assert!(vv_cross_check(2, 5, 0).unwrap().ok());
    }

    #[test]
    fn lifts_small() {
        let cat = Catalog::standard();
        let vs = check_lifts(&cat, &[2, 2], 40, 7).unwrap();
        assert_eq!(vs.len(), 13);
        assert!(vs.iter().all(Verdict::ok), "{vs:?}");
        let vs = check_lifts(&cat, &[2, 1, 1], 10, 7).unwrap();
        assert_eq!(vs.len(), 12);
        assert!(vs.iter().all(Verdict::ok), "{vs:?}");
    }

    #[test]
    fn circuits_small() {
        let v = check_circuits(10, 1).unwrap();
        assert!(v.ok(), "{v:?}");
    }
}
