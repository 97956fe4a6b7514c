mod common;

use common::{arb_family, naive_solve, qbf, solutions};
use proptest::prelude::*;
use promise_lab_core::expr::truth_table;
use promise_lab_core::semantics::{Solver, DEFAULT_CAP};
use promise_lab_core::{Error, ProblemId, ProblemKind, Quantifier};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn every_problem_matches_brute_force(f in arb_family(3, 0, 2)) {
        let solver = Solver::default();
        for kind in ProblemKind::ALL {
            let got = solver.solve(ProblemId::new(kind, f.level()), &f);
            match naive_solve(kind, &f) {
                Some(v) => prop_assert_eq!(got.unwrap(), v, "{} on {}", kind, f),
                None => prop_assert_eq!(got, Err(Error::EmptyFirstBlock)),
            }
        }
    }

    #[test]
    fn qbf_matches_brute_force(f in arb_family(4, 0, 2)) {
        let solver = Solver::default();
        prop_assert_eq!(solver.qbf_value(&f, Quantifier::Exists).unwrap(), qbf(&f, true));
        prop_assert_eq!(solver.qbf_value(&f, Quantifier::Forall).unwrap(), qbf(&f, false));
    }

    #[test]
    fn solution_sets_match(f in arb_family(3, 0, 3)) {
        prop_assert_eq!(Solver::default().first_block_solution_set(&f).unwrap(), solutions(&f));
    }

    #[test]
    fn tables_match_evaluation(f in arb_family(3, 0, 3)) {
        let t = truth_table(&f);
        for (i, a) in common::all_assignments(f.widths()).iter().enumerate() {
            prop_assert_eq!(t.get(i), f.evaluate(a).unwrap());
        }
    }

    #[test]
    fn duals_swap_under_negation(f in arb_family(3, 1, 2)) {
        // SAT̄(¬f) is the dual of SAT(f) at every level
        let g = promise_lab_core::expr::negate_output(&f);
        let n = f.level();
        let solver = Solver::default();
        let sat = solver.solve(ProblemId::new(ProblemKind::Sat, n), &f).unwrap();
        let cosat = solver.solve(ProblemId::new(ProblemKind::CoSat, n), &g).unwrap();
        prop_assert_eq!(sat.dual(), cosat);
    }
}

#[test]
fn wrong_level_is_rejected() {
    let f = "blocks 1,1; b1_1".parse().unwrap();
    let r = Solver::default().solve(ProblemId::new(ProblemKind::Sat, 1), &f);
    assert_eq!(r, Err(Error::LevelMismatch { expected: 1, found: 2 }));
}

#[test]
fn cap_is_enforced() {
    let f = "blocks 23; b1_1".parse().unwrap();
    let r = Solver::default().qbf_value(&f, Quantifier::Exists);
    assert!(matches!(r, Err(Error::CapExceeded { cap, .. }) if cap == DEFAULT_CAP));
    let f = "blocks 3; b1_1".parse().unwrap();
    assert!(matches!(
        Solver::with_cap(4).qbf_value(&f, Quantifier::Exists),
        Err(Error::CapExceeded { needed: 8, cap: 4 })
    ));
}
