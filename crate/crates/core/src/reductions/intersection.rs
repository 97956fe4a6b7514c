//! Witnesses for `V̂ = Σ̂ ∩ Π̂` and `ÛV = ÛS ∩ ÛCS`.
//!
//! Given `g(x, y)` reducing `φ` to SAT (or USAT) and `h(x, y)` reducing it to
//! SAT̄ (or ŪSAT), the instance `f_x(i, y)` with `f_x(1, y) = g(x, y)` and
//! `f_x(0, y) = ¬h(x, y)` reduces `φ` to VAL (or UVAL). The smallest `φ`
//! consistent with `g` and `h` is the union of the values they force.

use crate::error::{Error, Result};
use crate::expr::{fix_block, Expr, Family};
use crate::semantics::{solve_kind, PromiseValue, ProblemKind};

fn check_pair(g: &Family, h: &Family, x: &[bool]) -> Result<()> {
    if g.level() != 2 || h.level() != 2 {
        return Err(Error::shape("witnesses must have an x-block and a y-block"));
    }
    if g.widths() != h.widths() {
        return Err(Error::shape(format!(
            "witness widths differ: {:?} vs {:?}",
            g.widths(),
            h.widths()
        )));
    }
    if x.len() != g.width(1) {
        return Err(Error::shape(format!(
            "x has {} bits, witnesses expect {}",
            x.len(),
            g.width(1)
        )));
    }
    Ok(())
}

/// `f_x(i, y) = (i ∧ g(x, y)) ∨ (¬i ∧ ¬h(x, y))` over one block `(i, y)`.
pub fn build_val_intersection(g: &Family, h: &Family, x: &[bool]) -> Result<Family> {
    check_pair(g, h, x)?;
    let ny = g.width(2);
    let lift = |e: &Expr| {
        e.map_vars(&mut |v| {
            if v.block == 1 {
                Expr::Const(x[v.index - 1])
            } else {
                Expr::var(1, v.index + 1)
            }
        })
    };
    let i = Expr::var(1, 1);
    let body = Expr::or(
        Expr::and(i.clone(), lift(g.body())),
        Expr::and(Expr::not(i), Expr::not(lift(h.body()))),
    );
    Family::new(vec![1 + ny], body)
}

/// Same instance as [`build_val_intersection`]; consumed by the UVAL check.
pub fn build_uval_intersection(g: &Family, h: &Family, x: &[bool]) -> Result<Family> {
    build_val_intersection(g, h, x)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionOutcome {
    pub instance: Family,
    /// `VAL(f_x)` or `UVAL(f_x)`.
    pub value: PromiseValue,
    /// Union of the values forced by the two witnesses.
    pub forced: PromiseValue,
    pub pass: bool,
}

fn outcome(
    instance: Family,
    kind: ProblemKind,
    forced: PromiseValue,
) -> Result<IntersectionOutcome> {
    let value = solve_kind(kind, &instance)?;
    Ok(IntersectionOutcome {
        pass: forced.is_superset_of(value),
        instance,
        value,
        forced,
    })
}

/// `VAL(f_x) ⊆ {SAT(g_x)} ∪ {SAT̄(h_x)}`.
pub fn check_val_intersection(g: &Family, h: &Family, x: &[bool]) -> Result<IntersectionOutcome> {
    let f = build_val_intersection(g, h, x)?;
    let gx = fix_block(g, 1, x)?;
    let hx = fix_block(h, 1, x)?;
    let forced = solve_kind(ProblemKind::Sat, &gx)?.union(solve_kind(ProblemKind::CoSat, &hx)?);
    outcome(f, ProblemKind::Val, forced)
}

/// `UVAL(f_x) ⊆ USAT(g_x) ∪ ŪSAT(h_x)`.
pub fn check_uval_intersection(
    g: &Family,
    h: &Family,
    x: &[bool],
) -> Result<IntersectionOutcome> {
    let f = build_uval_intersection(g, h, x)?;
    let gx = fix_block(g, 1, x)?;
    let hx = fix_block(h, 1, x)?;
    let forced =
        solve_kind(ProblemKind::USat, &gx)?.union(solve_kind(ProblemKind::CoUSat, &hx)?);
    outcome(f, ProblemKind::UVal, forced)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(s: &str) -> Family {
        s.parse().unwrap()
    }

    #[test]
    fn same_witness_forces_both() {
        let g = fam("blocks 0,1; b2_1");
        let o = check_val_intersection(&g, &g, &[]).unwrap();
        assert_eq!(o.value, PromiseValue::Both);
        assert_eq!(o.forced, PromiseValue::Both);
        assert!(o.pass);
        let g = fam("blocks 1,1; b2_1");
        for x in [false, true] {
            assert!(check_val_intersection(&g, &g, &[x]).unwrap().pass);
        }
    }

    #[test]
    fn empty_case_is_both() {
        let g = fam("blocks 1,1; 0");
        let h = fam("blocks 1,1; 1");
        let o = check_val_intersection(&g, &h, &[true]).unwrap();
        assert_eq!(o.value, PromiseValue::Both);
        assert_eq!(o.forced, PromiseValue::Both);
        let o = check_uval_intersection(&g, &h, &[true]).unwrap();
        assert_eq!(o.value, PromiseValue::Both);
        assert_eq!(o.forced, PromiseValue::Both);
    }

    #[test]
    fn unique_g_solution() {
        let g = fam("blocks 1,2; b2_1 & !b2_2");
        let h = fam("blocks 1,2; 1");
        let o = check_uval_intersection(&g, &h, &[false]).unwrap();
        assert_eq!(o.value, PromiseValue::One);
        assert!(o.forced.contains(true));
        assert!(o.pass);
    }

    #[test]
    fn shape_errors() {
        let g = fam("blocks 1,1; b2_1");
        let h = fam("blocks 1,2; b2_1");
        assert!(build_val_intersection(&g, &h, &[true]).is_err());
        assert!(build_val_intersection(&g, &g, &[]).is_err());
        assert!(build_val_intersection(&fam("blocks 1; 1"), &fam("blocks 1; 1"), &[true]).is_err());
    }
}
