//! Brute-force reference semantics written directly from the definitions,
//! plus proptest strategies. Nothing here goes through the bit-parallel
//! truth tables.
#![allow(dead_code)]

use proptest::prelude::*;
use promise_lab_core::expr::index_bits;
use promise_lab_core::{Assignment, Expr, Family, PromiseValue, ProblemKind, VarRef};

/// Does the alternating game over blocks `next..=n` hold, with `q_exists`
/// choosing the quantifier of block `next`?
pub fn holds(f: &Family, prefix: &mut Vec<Vec<bool>>, next: usize, q_exists: bool) -> bool {
    if next > f.level() {
        return f.evaluate(&Assignment::new(prefix.clone())).unwrap();
    }
    let w = f.width(next);
    let mut any = false;
    let mut all = true;
    for i in 0..1u64 << w {
        prefix.push(index_bits(i, w));
        let v = holds(f, prefix, next + 1, !q_exists);
        prefix.pop();
        any |= v;
        all &= v;
    }
    if q_exists {
        any
    } else {
        all
    }
}

pub fn qbf(f: &Family, exists_first: bool) -> bool {
    holds(f, &mut Vec::new(), 1, exists_first)
}

/// First-block assignments `x` with `∀x₂ ∃x₃ … f` (block 2 universal).
pub fn solutions(f: &Family) -> Vec<Vec<bool>> {
    first_block_where(f, false)
}

/// First-block assignments `x` with `∃x₂ ∀x₃ … f`.
pub fn exists_inner(f: &Family) -> Vec<Vec<bool>> {
    first_block_where(f, true)
}

fn first_block_where(f: &Family, exists: bool) -> Vec<Vec<bool>> {
    let m = f.width(1);
    (0..1u64 << m)
        .map(|i| index_bits(i, m))
        .filter(|x| holds(f, &mut vec![x.clone()], 2, exists))
        .collect()
}

fn set_of(zero: bool, one: bool) -> PromiseValue {
    match (zero, one) {
        (true, false) => PromiseValue::Zero,
        (false, true) => PromiseValue::One,
        _ => PromiseValue::Both,
    }
}

fn bit(b: bool) -> PromiseValue {
    set_of(!b, b)
}

/// `None` when the problem reads a first bit that does not exist.
pub fn naive_solve(kind: ProblemKind, f: &Family) -> Option<PromiseValue> {
    let m = f.width(1);
    let reads = matches!(
        kind,
        ProblemKind::MaxVal | ProblemKind::MinVal | ProblemKind::Val | ProblemKind::UVal
    );
    if reads && m == 0 {
        return None;
    }
    let s = solutions(f);
    let total = 1usize << m;
    Some(match kind {
        ProblemKind::Sat => bit(!s.is_empty()),
        ProblemKind::CoSat => bit(exists_inner(f).len() == total),
        ProblemKind::MaxVal => s.iter().max().map_or(PromiseValue::Both, |x| bit(x[0])),
        ProblemKind::MinVal => s.iter().min().map_or(PromiseValue::Both, |x| bit(x[0])),
        ProblemKind::Val => set_of(s.iter().any(|x| !x[0]), s.iter().any(|x| x[0])),
        ProblemKind::USat => match s.len() {
            0 => PromiseValue::Zero,
            1 => PromiseValue::One,
            _ => PromiseValue::Both,
        },
        ProblemKind::CoUSat => match total - exists_inner(f).len() {
            0 => PromiseValue::One,
            1 => PromiseValue::Zero,
            _ => PromiseValue::Both,
        },
        ProblemKind::UVal => match s.as_slice() {
            [x] => bit(x[0]),
            _ => PromiseValue::Both,
        },
    })
}

pub fn all_assignments(widths: &[usize]) -> Vec<Assignment> {
    let n: usize = widths.iter().sum();
    (0..1u64 << n)
        .map(|i| Assignment::split(widths, &index_bits(i, n)).unwrap())
        .collect()
}

pub fn same_function(f: &Family, g: &Family) -> bool {
    f.widths() == g.widths()
        && all_assignments(f.widths())
            .iter()
            .all(|a| f.evaluate(a).unwrap() == g.evaluate(a).unwrap())
}

pub fn arb_expr(widths: Vec<usize>) -> BoxedStrategy<Expr> {
    let vars: Vec<VarRef> = widths
        .iter()
        .enumerate()
        .flat_map(|(b, &w)| (1..=w).map(move |i| VarRef::new(b + 1, i)))
        .collect();
    let leaf = if vars.is_empty() {
        any::<bool>().prop_map(Expr::Const).boxed()
    } else {
        prop_oneof![
            1 => any::<bool>().prop_map(Expr::Const),
            6 => proptest::sample::select(vars).prop_map(Expr::Var),
        ]
        .boxed()
    };
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Expr::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::and(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Expr::or(a, b)),
        ]
    })
    .boxed()
}

/// Families with `1..=max_level` blocks, each of width `min_width..=max_width`.
pub fn arb_family(max_level: usize, min_width: usize, max_width: usize) -> BoxedStrategy<Family> {
    proptest::collection::vec(min_width..=max_width, 1..=max_level)
        .prop_flat_map(|widths| {
            arb_expr(widths.clone()).prop_map(move |e| Family::new(widths.clone(), e).unwrap())
        })
        .boxed()
}

/// Families with exactly the given number of blocks.
pub fn arb_family_at(level: usize, min_width: usize, max_width: usize) -> BoxedStrategy<Family> {
    proptest::collection::vec(min_width..=max_width, level)
        .prop_flat_map(|widths| {
            arb_expr(widths.clone()).prop_map(move |e| Family::new(widths.clone(), e).unwrap())
        })
        .boxed()
}
