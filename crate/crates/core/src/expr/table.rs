//! Bit-parallel truth tables: 64 assignments per machine word.

use super::{Expr, Family};

const LANES: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

#[derive(Clone, Copy, Debug)]
enum Op {
    Const(bool),
    Var(usize),
    Not,
    And,
    Or,
}

fn compile(e: &Expr, f: &Family, out: &mut Vec<Op>) {
    match e {
        Expr::Const(c) => out.push(Op::Const(*c)),
        Expr::Var(v) => out.push(Op::Var(f.flat_index(*v))),
        Expr::Not(a) => {
            compile(a, f, out);
            out.push(Op::Not);
        }
        Expr::And(a, b) => {
            compile(a, f, out);
            compile(b, f, out);
            out.push(Op::And);
        }
        Expr::Or(a, b) => {
            compile(a, f, out);
            compile(b, f, out);
            out.push(Op::Or);
        }
    }
}

/// Values of a family at every assignment, indexed lexicographically
/// (flat variable 0 is the most significant bit of the index).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthTable {
    width: usize,
    words: Vec<u64>,
}

impl TruthTable {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        1usize << self.width
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, index: usize) -> bool {
        (self.words[index >> 6] >> (index & 63)) & 1 == 1
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len()).map(|i| self.get(i)).collect()
    }
}

/// Computes the full truth table. The caller bounds the total width.
pub fn truth_table(f: &Family) -> TruthTable {
    let n = f.total_width();
    assert!(n <= 40, "truth table over {n} variables");
    let mut prog = Vec::with_capacity(f.body().size());
    compile(f.body(), f, &mut prog);

    let chunks = if n <= 6 { 1 } else { 1usize << (n - 6) };
    let lane_mask = if n >= 6 { !0u64 } else { (1u64 << (1 << n)) - 1 };
    let mut vals = vec![0u64; n];
    for (j, val) in vals.iter_mut().enumerate() {
        let p = n - 1 - j;
        if p < 6 {
            *val = LANES[p];
        }
    }
    let mut stack: Vec<u64> = Vec::with_capacity(64);
    let mut words = Vec::with_capacity(chunks);
    for c in 0..chunks {
        for (j, val) in vals.iter_mut().enumerate() {
            let p = n - 1 - j;
            if p >= 6 {
                *val = if (c >> (p - 6)) & 1 == 1 { !0 } else { 0 };
            }
        }
        stack.clear();
        for op in &prog {
            match *op {
                Op::Const(b) => stack.push(if b { !0 } else { 0 }),
                Op::Var(j) => stack.push(vals[j]),
                Op::Not => {
                    let a = stack.pop().unwrap();
                    stack.push(!a);
                }
                Op::And => {
                    let b = stack.pop().unwrap();
                    let a = stack.pop().unwrap();
                    stack.push(a & b);
                }
                Op::Or => {
                    let b = stack.pop().unwrap();
                    let a = stack.pop().unwrap();
                    stack.push(a | b);
                }
            }
        }
        words.push(stack.pop().unwrap() & lane_mask);
    }
    TruthTable { width: n, words }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::index_bits;

    #[test]
    fn agrees_with_tree_evaluation() {
        for text in [
            "blocks 0; 1",
            "blocks 1; !b1_1",
            "blocks 2,1; (b1_1 | b2_1) & !b1_2",
            "blocks 3,4; ((b1_1 & b2_4) | (b1_3 & !b2_1)) | (b1_2 & b2_2 & b2_3)",
            "blocks 4,4; (b1_1 & b2_4) | (b1_4 & !b2_1) | (b1_2 & b2_2)",
        ] {
            let f: Family = text.parse().unwrap();
            let t = truth_table(&f);
            for i in 0..t.len() {
                let bits = index_bits(i as u64, f.total_width());
                assert_eq!(t.get(i), f.evaluate_flat(&bits).unwrap(), "{text} @ {i}");
            }
        }
    }

    #[test]
    fn masks_unused_lanes() {
        let f: Family = "blocks 2; 1".parse().unwrap();
        assert_eq!(truth_table(&f).count_ones(), 4);
    }
}
