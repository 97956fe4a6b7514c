//! The MAXVAL → UVAL gadget and its lift to quantified inputs.
//!
//! For `f(x)` with `|x| = m` the gadget is
//!
//! ```text
//! g(x, y) = f(x₁,…,x_m)
//!         ∧ (x₁ ∨ ¬f(1, y_{1,2},…,y_{1,m}))
//!         ∧ (x₂ ∨ ¬f(x₁, 1, y_{2,3},…,y_{2,m}))
//!         ∧ …
//!         ∧ (x_m ∨ ¬f(x₁,…,x_{m−1}, 1))
//! ```
//!
//! with `m(m−1)/2` universal variables `y_{i,j}`, `i < j`, laid out row by row.
//! The unique `x` with `∀y g(x, y)` is the lexicographically largest solution.
//!
//! When `f` has further quantifier blocks `(y⁽¹⁾,…,y⁽ⁿ⁻¹⁾)` each guard gets
//! its own copy of them, pushed one quantifier level deeper: the copy of
//! `y⁽ᵏ⁾` used by guard `i` lands in output block `k+2`. Output block 2 holds
//! `y⁽¹⁾` followed by the `y_{i,j}`. Blocks past `levels` are free
//! parameters shared by every copy.

use crate::error::Result;
use crate::expr::{Expr, Family};
use crate::mutation::Mutation;

/// Number of universal pair variables for an `m`-bit first block.
pub fn pair_count(m: usize) -> usize {
    m * m.saturating_sub(1) / 2
}

fn pair_index(m: usize, i: usize, j: usize) -> usize {
    // rows 1..i-1 contribute (m - i') each; 1-based result
    (1..i).map(|r| m - r).sum::<usize>() + (j - i)
}

pub(crate) fn maxval_gadget(
    f: &Family,
    levels: usize,
    mutation: Option<Mutation>,
) -> Result<Family> {
    let w = f.widths();
    let m = w[0];
    // width of original quantified block b (1-based), 0 beyond `levels`
    let own = |b: usize| if b <= levels { w[b - 1] } else { 0 };

    let mut out = Vec::with_capacity(w.len() + 1);
    out.push(m);
    for j in 2..=levels + 1 {
        let copies = if j == 2 { pair_count(m) } else { m * w[j - 2] };
        out.push(own(j) + copies);
    }
    out.extend_from_slice(&w[levels..]);

    let original = f.body().map_vars(&mut |v| {
        if v.block <= levels {
            Expr::Var(v)
        } else {
            Expr::var(v.block + 1, v.index)
        }
    });

    let guard_copy = |i: usize| {
        f.body().map_vars(&mut |v| {
            if v.block == 1 {
                if v.index < i {
                    Expr::Var(v)
                } else if v.index == i {
                    Expr::Const(true)
                } else {
                    Expr::var(2, own(2) + pair_index(m, i, v.index))
                }
            } else if v.block <= levels {
                let b = v.block;
                Expr::var(b + 1, own(b + 1) + (i - 1) * w[b - 1] + v.index)
            } else {
                Expr::var(v.block + 1, v.index)
            }
        })
    };

    let mut conjuncts = vec![original];
    for i in 1..=m {
        if i == m && mutation == Some(Mutation::GadgetDropFinalGuard) {
            continue;
        }
        let copy = guard_copy(i);
        let guard = if i == 1 && mutation == Some(Mutation::GadgetPositiveGuard) {
            copy
        } else {
            Expr::not(copy)
        };
        conjuncts.push(Expr::or(Expr::var(1, i), guard));
    }
    Family::new(out, Expr::all(conjuncts))
}
