mod common;

use common::{all_assignments, arb_family, arb_family_at, naive_solve, same_function, solutions};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use promise_lab_core::circuit::{eval_circuit, valid_assignments, OracleCircuit};
use promise_lab_core::expr::{
    add_leading_variable, fix_first_block_prefix, from_truth_table, index_bits, negate_block_inputs,
    negate_output, truth_table,
};
use promise_lab_core::harness::{random_circuit, CircuitSpec};
use promise_lab_core::reductions::{
    compose_rules, identity_rule, standard_catalog, ReductionRule, RuleKind,
};
use promise_lab_core::vv::{default_trials, plan_from_seed, sample_hash, vv_run};
use promise_lab_core::oracle::Resolution;
use promise_lab_core::{Assignment, Family, PromiseValue};

fn value_of(p: promise_lab_core::reductions::ProblemRef, f: &Family) -> PromiseValue {
    let v = naive_solve(p.kind, f).expect("first block nonempty");
    if p.negated {
        v.dual()
    } else {
        v
    }
}

/// The rule's claim, with both sides computed by the brute-force reference.
fn holds_by_reference(rule: &ReductionRule, f: &Family) -> bool {
    let g = rule.apply(f).unwrap();
    assert_eq!(g.level(), f.level() + rule.shift());
    let src = value_of(rule.source(), f);
    let tgt = value_of(rule.target(), &g);
    match rule.kind() {
        RuleKind::Equality => src == tgt,
        RuleKind::Containment => src.is_superset_of(tgt),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn print_parse_round_trip(f in arb_family(4, 0, 4)) {
        let back: Family = f.to_string().parse().unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn negate_output_is_pointwise_and_involutive(f in arb_family(3, 0, 2)) {
        let g = negate_output(&f);
        for a in all_assignments(f.widths()) {
            prop_assert_eq!(g.evaluate(&a).unwrap(), !f.evaluate(&a).unwrap());
        }
        prop_assert!(same_function(&negate_output(&g), &f));
    }

    #[test]
    fn negate_block_complements_that_block(f in arb_family(3, 1, 2), pick in 0usize..3) {
        let b = pick % f.level() + 1;
        let g = negate_block_inputs(&f, b).unwrap();
        for a in all_assignments(f.widths()) {
            let mut blocks = a.blocks().to_vec();
            for bit in &mut blocks[b - 1] {
                *bit = !*bit;
            }
            prop_assert_eq!(g.evaluate(&Assignment::new(blocks)).unwrap(), f.evaluate(&a).unwrap());
        }
        prop_assert!(same_function(&negate_block_inputs(&g, b).unwrap(), &f));
    }

    #[test]
    fn fixing_a_prefix_is_substitution(f in arb_family(2, 1, 3), c in any::<bool>()) {
        let g = fix_first_block_prefix(&f, &[c]).unwrap();
        for a in all_assignments(g.widths()) {
            let mut blocks = a.blocks().to_vec();
            if f.width(1) == 1 {
                // the emptied first block is dropped
                prop_assert_eq!(g.level() + 1, f.level().max(2));
                blocks.insert(0, vec![c]);
                blocks.truncate(f.level());
            } else {
                blocks[0].insert(0, c);
            }
            prop_assert_eq!(g.evaluate(&a).unwrap(), f.evaluate(&Assignment::new(blocks)).unwrap());
        }
    }

    #[test]
    fn leading_variable_is_unused(f in arb_family(3, 0, 2), pick in 0usize..3) {
        let b = pick % f.level() + 1;
        let g = add_leading_variable(&f, b).unwrap();
        prop_assert_eq!(g.width(b), f.width(b) + 1);
        for a in all_assignments(f.widths()) {
            for c in [false, true] {
                let mut blocks = a.blocks().to_vec();
                blocks[b - 1].insert(0, c);
                prop_assert_eq!(g.evaluate(&Assignment::new(blocks)).unwrap(), f.evaluate(&a).unwrap());
            }
        }
    }

    #[test]
    fn tables_round_trip(f in arb_family(2, 0, 2)) {
        let t = truth_table(&f).to_bools();
        let g = from_truth_table(f.widths(), &t).unwrap();
        prop_assert!(same_function(&f, &g));
    }

    #[test]
    fn level_free_rules_hold_at_levels_one_and_two(f in arb_family(2, 1, 2)) {
        for rule in standard_catalog().rules().filter(|r| r.fixed_level().is_none()) {
            prop_assert!(holds_by_reference(rule, &f), "{} on {}", rule.name(), f);
        }
    }

    #[test]
    fn level_two_rules_hold(f in arb_family_at(2, 1, 2)) {
        for rule in standard_catalog().rules().filter(|r| r.fixed_level() == Some(2)) {
            prop_assert!(holds_by_reference(rule, &f), "{} on {}", rule.name(), f);
        }
    }

    #[test]
    fn checker_agrees_with_reference(f in arb_family(2, 1, 2)) {
        for rule in standard_catalog().rules().filter(|r| r.fixed_level().is_none_or(|l| l == f.level())) {
            let o = rule.check(&f).unwrap();
            prop_assert_eq!(o.pass, holds_by_reference(rule, &f) && o.size_ok);
            prop_assert!(o.size_ok, "{} size {} -> {}", rule.name(), f.size(), o.transformed.size());
        }
    }

    #[test]
    fn identity_composition_keeps_verdicts(f in arb_family(2, 1, 2)) {
        for rule in standard_catalog().rules().filter(|r| r.fixed_level().is_none()) {
            let left = compose_rules(&identity_rule(rule.source()), rule).unwrap();
            let right = compose_rules(rule, &identity_rule(rule.target())).unwrap();
            let want = rule.check(&f).unwrap();
            prop_assert_eq!(left.check(&f).unwrap().pass, want.pass);
            prop_assert_eq!(right.check(&f).unwrap().target_value, want.target_value);
        }
    }

    #[test]
    fn gadget_has_one_solution_when_satisfiable(f in arb_family_at(1, 1, 4)) {
        let g = standard_catalog().get("maxval_to_uvaln1").unwrap().apply(&f).unwrap();
        let m = f.width(1);
        prop_assert_eq!(g.widths(), &[m, m * (m - 1) / 2][..]);
        let s = solutions(&f);
        let gs = solutions(&g);
        match s.iter().max() {
            Some(max) => {
                prop_assert_eq!(gs.len(), 1);
                prop_assert_eq!(gs[0][0], max[0]);
            }
            None => prop_assert!(gs.is_empty()),
        }
    }

    #[test]
    fn circuits_round_trip_and_have_one_valid_assignment(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_circuit(&CircuitSpec::default(), &mut rng);
        let back: OracleCircuit = c.to_string().parse().unwrap();
        prop_assert_eq!(&back, &c);
        for i in 0..1u64 << c.input_width() {
            let alpha = index_bits(i, c.input_width());
            let v = valid_assignments(&c, &alpha).unwrap();
            prop_assert_eq!(v.len(), 1);
            prop_assert_eq!(v[0][0], eval_circuit(&c, &alpha).unwrap());
        }
    }

    #[test]
    fn isolation_never_accepts_unsatisfiable(f in arb_family_at(1, 1, 3), seed in any::<u64>()) {
        let m = f.width(1);
        let plan = plan_from_seed(m, default_trials(m), None, seed).unwrap();
        let tree = vv_run(&f, plan, Resolution::Exhaustive).unwrap();
        if solutions(&f).is_empty() {
            prop_assert!(tree.outputs().all(|b| !b));
        }
    }
}

#[test]
fn hash_bits_are_balanced() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (m, k, n) = (3, 2, 10_000);
    let mut ones = vec![0usize; k * (m + 1)];
    for _ in 0..n {
        let h = sample_hash(m, k, &mut rng).unwrap();
        for (r, row) in h.rows().iter().enumerate() {
            for (j, &b) in row.iter().enumerate() {
                ones[r * (m + 1) + j] += usize::from(b);
            }
            ones[r * (m + 1) + m] += usize::from(h.offsets()[r]);
        }
    }
    for c in ones {
        let p = c as f64 / n as f64;
        assert!((p - 0.5).abs() <= 0.02, "bit frequency {p}");
    }
}
