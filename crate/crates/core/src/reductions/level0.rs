//! The bottom of the hierarchy: `π₁(x) = UVAL(f_x)` with `f_x(y) = 1 ⟺ y = (x₁)`.

use crate::error::{Error, Result};
use crate::expr::{Expr, Family, VarRef};
use crate::semantics::{solve_kind, PromiseValue, ProblemKind};

pub const PI1_TO_UVAL: &str = "pi1_to_uval";

/// Builds the one-variable family whose unique solution is `(x₁)`.
pub fn pi1_to_uval(x: &[bool]) -> Result<Family> {
    let first = *x
        .first()
        .ok_or_else(|| Error::shape("π₁ needs a nonempty string"))?;
    Family::new(vec![1], Expr::literal(VarRef::new(1, 1), first))
}

/// `UVAL(f_x) = {x₁}`; returns the computed value and whether it matched.
pub fn check_pi1_to_uval(x: &[bool]) -> Result<(PromiseValue, bool)> {
    let f = pi1_to_uval(x)?;
    let v = solve_kind(ProblemKind::UVal, &f)?;
    Ok((v, v == PromiseValue::singleton(x[0])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::index_bits;

    #[test]
    fn every_short_string() {
        for len in 1..=5 {
            for i in 0..(1u64 << len) {
                let x = index_bits(i, len);
                let (v, ok) = check_pi1_to_uval(&x).unwrap();
                assert!(ok);
                assert_eq!(v.as_bit(), Some(x[0]));
            }
        }
        assert!(pi1_to_uval(&[]).is_err());
    }
}
