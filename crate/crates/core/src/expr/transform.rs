//! Structural transforms shared by the reduction gadgets.

use super::{index_bits, Expr, Family, VarRef};
use crate::error::{Error, Result};

fn check_block(f: &Family, block: usize) -> Result<()> {
    if block == 0 || block > f.level() {
        return Err(Error::Index {
            block,
            blocks: f.level(),
        });
    }
    Ok(())
}

fn fix_prefix(f: &Family, block: usize, bits: &[bool], drop_empty: bool) -> Result<Family> {
    check_block(f, block)?;
    let width = f.width(block);
    let k = bits.len();
    if k > width {
        return Err(Error::shape(format!(
            "cannot fix {k} bits of block {block} with width {width}"
        )));
    }
    let drop = drop_empty && k == width && f.level() > 1;
    let body = f.body().map_vars(&mut |v| {
        if v.block == block {
            if v.index <= k {
                Expr::Const(bits[v.index - 1])
            } else {
                Expr::var(block, v.index - k)
            }
        } else if drop && v.block > block {
            Expr::var(v.block - 1, v.index)
        } else {
            Expr::Var(v)
        }
    });
    let mut widths = f.widths().to_vec();
    if drop {
        widths.remove(block - 1);
    } else {
        widths[block - 1] = width - k;
    }
    Family::new(widths, body)
}

/// Substitutes `bits` for the leading variables of block 1 (the function
/// `f_x` when the whole block is fixed). An emptied first block is dropped
/// when other blocks remain, and kept with width 0 otherwise.
pub fn fix_first_block_prefix(f: &Family, bits: &[bool]) -> Result<Family> {
    fix_prefix(f, 1, bits, true)
}

/// Like [`fix_first_block_prefix`] but always keeps block 1, so the block
/// count is preserved.
pub fn pin_first_block_prefix(f: &Family, bits: &[bool]) -> Result<Family> {
    fix_prefix(f, 1, bits, false)
}

/// Fixes every variable of `block` and removes the block (keeping a width-0
/// block if it was the only one).
pub fn fix_block(f: &Family, block: usize, bits: &[bool]) -> Result<Family> {
    check_block(f, block)?;
    if bits.len() != f.width(block) {
        return Err(Error::shape(format!(
            "block {block} has width {}, got {} bits",
            f.width(block),
            bits.len()
        )));
    }
    fix_prefix(f, block, bits, true)
}

pub fn negate_output(f: &Family) -> Family {
    Family {
        widths: f.widths().to_vec(),
        body: Expr::not(f.body().clone()),
    }
}

/// Replaces each variable of `block` by its negation.
pub fn negate_block_inputs(f: &Family, block: usize) -> Result<Family> {
    check_block(f, block)?;
    let body = f.body().map_vars(&mut |v| {
        if v.block == block {
            Expr::not(Expr::Var(v))
        } else {
            Expr::Var(v)
        }
    });
    Ok(Family {
        widths: f.widths().to_vec(),
        body,
    })
}

/// Widens `block` by one, shifting its variables up so that `(block, 1)` is a
/// fresh variable unused by the body.
pub fn add_leading_variable(f: &Family, block: usize) -> Result<Family> {
    check_block(f, block)?;
    let body = f.body().map_vars(&mut |v| {
        if v.block == block {
            Expr::var(block, v.index + 1)
        } else {
            Expr::Var(v)
        }
    });
    let mut widths = f.widths().to_vec();
    widths[block - 1] += 1;
    Ok(Family { widths, body })
}

/// Disjunction of minterms, one per true entry of `table` (lexicographic
/// order over the flat variables). An all-false table yields `0`.
pub fn from_truth_table(widths: &[usize], table: &[bool]) -> Result<Family> {
    let n: usize = widths.iter().sum();
    if n >= usize::BITS as usize || table.len() != 1usize << n {
        return Err(Error::shape(format!(
            "table of length {} does not match total width {n}",
            table.len()
        )));
    }
    if widths.is_empty() {
        return Err(Error::shape("a family needs at least one block"));
    }
    let vars: Vec<VarRef> = widths
        .iter()
        .enumerate()
        .flat_map(|(b, &w)| (1..=w).map(move |i| VarRef::new(b + 1, i)))
        .collect();
    let body = Expr::any(table.iter().enumerate().filter(|(_, &t)| t).map(|(i, _)| {
        let bits = index_bits(i as u64, n);
        if n == 0 {
            Expr::Const(true)
        } else {
            Expr::all(vars.iter().zip(bits).map(|(&v, b)| Expr::literal(v, b)))
        }
    }));
    Family::new(widths.to_vec(), body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{truth_table, Assignment};

    fn fam(s: &str) -> Family {
        s.parse().unwrap()
    }

    fn flat_values(f: &Family) -> Vec<bool> {
        truth_table(f).to_bools()
    }

    #[test]
    fn fix_prefix_reindexes() {
        let f = fix_first_block_prefix(&fam("blocks 2; b1_1 & b1_2"), &[true]).unwrap();
        assert_eq!(f.to_string(), "blocks 1; (1 & b1_1)");
        assert_eq!(flat_values(&f), vec![false, true]);
    }

    #[test]
    fn fix_prefix_drops_emptied_block() {
        let f = fix_first_block_prefix(&fam("blocks 1,1; b1_1 | b2_1"), &[false]).unwrap();
        assert_eq!(f.to_string(), "blocks 1; (0 | b1_1)");
        let g = pin_first_block_prefix(&fam("blocks 1,1; b1_1 | b2_1"), &[false]).unwrap();
        assert_eq!(g.to_string(), "blocks 0,1; (0 | b2_1)");
        let h = fix_first_block_prefix(&fam("blocks 1; b1_1"), &[true]).unwrap();
        assert_eq!(h.to_string(), "blocks 0; 1");
    }

    #[test]
    fn fix_prefix_too_long() {
        assert!(matches!(
            fix_first_block_prefix(&fam("blocks 1; b1_1"), &[true, true]),
            Err(Error::Shape(_))
        ));
    }

    // Oracle: direct substitution on the original at every (c, rest).
    #[test]
    fn substitution_law_width_three() {
        for table in 0u32..256 {
            let t: Vec<bool> = (0..8).map(|i| (table >> i) & 1 == 1).collect();
            let f = from_truth_table(&[3], &t).unwrap();
            for c in [false, true] {
                let g = fix_first_block_prefix(&f, &[c]).unwrap();
                for rest in 0..4u64 {
                    let r = index_bits(rest, 2);
                    let mut full = vec![c];
                    full.extend(&r);
                    assert_eq!(
                        g.evaluate(&Assignment::single(r.clone())).unwrap(),
                        f.evaluate(&Assignment::single(full)).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn negate_output_flips_everything() {
        let f = fam("blocks 1; b1_1");
        assert_eq!(negate_output(&f).to_string(), "blocks 1; !b1_1");
        for table in 0u32..256 {
            let t: Vec<bool> = (0..8).map(|i| (table >> i) & 1 == 1).collect();
            let f = from_truth_table(&[3], &t).unwrap();
            let flipped: Vec<bool> = t.iter().map(|b| !b).collect();
            assert_eq!(flat_values(&negate_output(&f)), flipped);
            assert_eq!(flat_values(&negate_output(&negate_output(&f))), t);
        }
    }

    #[test]
    fn negate_block_inputs_complements_solutions() {
        let f = fam("blocks 2; b1_1 & !b1_2");
        assert_eq!(
            negate_block_inputs(&f, 1).unwrap().to_string(),
            "blocks 2; (!b1_1 & !!b1_2)"
        );
        for table in 0u32..256 {
            let t: Vec<bool> = (0..8).map(|i| (table >> i) & 1 == 1).collect();
            let f = from_truth_table(&[3], &t).unwrap();
            let g = flat_values(&negate_block_inputs(&f, 1).unwrap());
            for i in 0..8 {
                assert_eq!(g[i], t[7 - i]);
            }
            let gg = negate_block_inputs(&negate_block_inputs(&f, 1).unwrap(), 1).unwrap();
            assert_eq!(flat_values(&gg), t);
        }
        assert!(matches!(
            negate_block_inputs(&f, 2),
            Err(Error::Index { block: 2, blocks: 1 })
        ));
    }

    #[test]
    fn add_leading_variable_shifts() {
        let f = add_leading_variable(&fam("blocks 1; b1_1"), 1).unwrap();
        assert_eq!(f.to_string(), "blocks 2; b1_2");
        let g = fam("blocks 2,1; (b1_1 & !b1_2) | b2_1");
        let h = add_leading_variable(&g, 1).unwrap();
        assert_eq!(h.widths(), &[3, 1]);
        for c in [false, true] {
            for rest in 0..8u64 {
                let r = index_bits(rest, 3);
                let mut full = vec![c];
                full.extend(&r);
                assert_eq!(h.evaluate_flat(&full).unwrap(), g.evaluate_flat(&r).unwrap());
            }
        }
    }

    #[test]
    fn from_truth_table_examples() {
        let f = from_truth_table(&[1], &[false, true]).unwrap();
        assert_eq!(flat_values(&f), vec![false, true]);
        let z = from_truth_table(&[2], &[false; 4]).unwrap();
        assert_eq!(z.body(), &Expr::Const(false));
        assert!(matches!(
            from_truth_table(&[2], &[false; 3]),
            Err(Error::Shape(_))
        ));
        let c = from_truth_table(&[0], &[true]).unwrap();
        assert_eq!(c.to_string(), "blocks 0; 1");
    }

    #[test]
    fn from_truth_table_reproduces_every_table_at_three() {
        for table in 0u32..256 {
            let t: Vec<bool> = (0..8).map(|i| (table >> i) & 1 == 1).collect();
            let f = from_truth_table(&[3], &t).unwrap();
            for i in 0..8u64 {
                let a = Assignment::single(index_bits(i, 3));
                assert_eq!(f.evaluate(&a).unwrap(), t[i as usize]);
            }
        }
    }
}
