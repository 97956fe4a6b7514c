//! Boolean functions over named quantifier blocks.
//!
//! A [`Family`] is a body expression together with the widths of its
//! variable blocks. Variables are written `b<block>_<index>`, both 1-based.
//! Assignments are ordered lexicographically with the first variable of the
//! first block most significant, so `(0,1) < (1,0)`.

mod parse;
mod table;
mod transform;

use std::fmt;

use crate::error::{Error, Result};

pub use parse::parse_family;
pub use table::{truth_table, TruthTable};
pub use transform::{
    add_leading_variable, fix_block, fix_first_block_prefix, from_truth_table, negate_block_inputs,
    negate_output, pin_first_block_prefix,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarRef {
    pub block: usize,
    pub index: usize,
}

impl VarRef {
    pub fn new(block: usize, index: usize) -> Self {
        VarRef { block, index }
    }
}

impl fmt::Display for VarRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b{}_{}", self.block, self.index)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(bool),
    Var(VarRef),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(block: usize, index: usize) -> Expr {
        Expr::Var(VarRef::new(block, index))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    pub fn and(a: Expr, b: Expr) -> Expr {
        Expr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Expr, b: Expr) -> Expr {
        Expr::Or(Box::new(a), Box::new(b))
    }

    /// Left-associated conjunction; the empty conjunction is `1`.
    pub fn all<I: IntoIterator<Item = Expr>>(items: I) -> Expr {
        items
            .into_iter()
            .reduce(Expr::and)
            .unwrap_or(Expr::Const(true))
    }

    /// Left-associated disjunction; the empty disjunction is `0`.
    pub fn any<I: IntoIterator<Item = Expr>>(items: I) -> Expr {
        items
            .into_iter()
            .reduce(Expr::or)
            .unwrap_or(Expr::Const(false))
    }

    /// `(a | b) & !(a & b)`
    pub fn xor(a: Expr, b: Expr) -> Expr {
        Expr::and(
            Expr::or(a.clone(), b.clone()),
            Expr::not(Expr::and(a, b)),
        )
    }

    /// `(!a | b) & (a | !b)`
    pub fn iff(a: Expr, b: Expr) -> Expr {
        Expr::and(
            Expr::or(Expr::not(a.clone()), b.clone()),
            Expr::or(a, Expr::not(b)),
        )
    }

    /// A literal: the variable itself when `positive`, its negation otherwise.
    pub fn literal(v: VarRef, positive: bool) -> Expr {
        if positive {
            Expr::Var(v)
        } else {
            Expr::not(Expr::Var(v))
        }
    }

    /// Number of tree nodes.
    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 1,
            Expr::Not(e) => 1 + e.size(),
            Expr::And(a, b) | Expr::Or(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn eval_with<F: Fn(VarRef) -> bool>(&self, value: &F) -> bool {
        match self {
            Expr::Const(c) => *c,
            Expr::Var(v) => value(*v),
            Expr::Not(e) => !e.eval_with(value),
            Expr::And(a, b) => a.eval_with(value) && b.eval_with(value),
            Expr::Or(a, b) => a.eval_with(value) || b.eval_with(value),
        }
    }

    /// Replaces every variable by the expression returned from `subst`.
    pub fn map_vars<F: FnMut(VarRef) -> Expr>(&self, subst: &mut F) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Var(v) => subst(*v),
            Expr::Not(e) => Expr::not(e.map_vars(subst)),
            Expr::And(a, b) => Expr::and(a.map_vars(subst), b.map_vars(subst)),
            Expr::Or(a, b) => Expr::or(a.map_vars(subst), b.map_vars(subst)),
        }
    }

    pub fn for_each_var<F: FnMut(VarRef)>(&self, visit: &mut F) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(v) => visit(*v),
            Expr::Not(e) => e.for_each_var(visit),
            Expr::And(a, b) | Expr::Or(a, b) => {
                a.for_each_var(visit);
                b.for_each_var(visit);
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{}", u8::from(*c)),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Not(e) => write!(f, "!{e}"),
            Expr::And(a, b) => write!(f, "({a} & {b})"),
            Expr::Or(a, b) => write!(f, "({a} | {b})"),
        }
    }
}

/// A boolean function `Σ^{m₁} × … × Σ^{mₙ} → Σ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Family {
    widths: Vec<usize>,
    body: Expr,
}

impl Family {
    pub fn new(widths: Vec<usize>, body: Expr) -> Result<Self> {
        if widths.is_empty() {
            return Err(Error::shape("a family needs at least one block"));
        }
        let mut bad = None;
        body.for_each_var(&mut |v| {
            if bad.is_none()
                && (v.block == 0
                    || v.index == 0
                    || v.block > widths.len()
                    || v.index > widths[v.block - 1])
            {
                bad = Some(v);
            }
        });
        if let Some(v) = bad {
            let width = widths.get(v.block.wrapping_sub(1)).copied().unwrap_or(0);
            return Err(Error::Width {
                pos: 0,
                var: v.to_string(),
                block: v.block,
                width,
            });
        }
        Ok(Family { widths, body })
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn body(&self) -> &Expr {
        &self.body
    }

    pub fn into_body(self) -> Expr {
        self.body
    }

    /// Number of quantifier blocks.
    pub fn level(&self) -> usize {
        self.widths.len()
    }

    pub fn width(&self, block: usize) -> usize {
        self.widths[block - 1]
    }

    pub fn total_width(&self) -> usize {
        self.widths.iter().sum()
    }

    /// Body node count plus declared variables.
    pub fn size(&self) -> usize {
        self.body.size() + self.total_width()
    }

    /// Position of a variable in the flat, block-major variable order.
    pub fn flat_index(&self, v: VarRef) -> usize {
        self.widths[..v.block - 1].iter().sum::<usize>() + v.index - 1
    }

    pub fn evaluate(&self, a: &Assignment) -> Result<bool> {
        if a.widths() != self.widths {
            return Err(Error::shape(format!(
                "assignment widths {:?} do not match family widths {:?}",
                a.widths(),
                self.widths
            )));
        }
        Ok(self
            .body
            .eval_with(&|v: VarRef| a.blocks[v.block - 1][v.index - 1]))
    }

    /// Evaluates on a flat bit sequence in block-major order.
    pub fn evaluate_flat(&self, bits: &[bool]) -> Result<bool> {
        self.evaluate(&Assignment::split(&self.widths, bits)?)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let widths: Vec<String> = self.widths.iter().map(|w| w.to_string()).collect();
        write!(f, "blocks {}; {}", widths.join(","), self.body)
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_family(s)
    }
}

pub fn print_family(f: &Family) -> String {
    f.to_string()
}

pub fn evaluate(f: &Family, a: &Assignment) -> Result<bool> {
    f.evaluate(a)
}

/// Per-block bit sequences.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Assignment {
    blocks: Vec<Vec<bool>>,
}

impl Assignment {
    pub fn new(blocks: Vec<Vec<bool>>) -> Self {
        Assignment { blocks }
    }

    pub fn single(bits: Vec<bool>) -> Self {
        Assignment { blocks: vec![bits] }
    }

    pub fn split(widths: &[usize], flat: &[bool]) -> Result<Self> {
        if widths.iter().sum::<usize>() != flat.len() {
            return Err(Error::shape(format!(
                "{} bits cannot fill blocks {:?}",
                flat.len(),
                widths
            )));
        }
        let mut blocks = Vec::with_capacity(widths.len());
        let mut rest = flat;
        for &w in widths {
            let (head, tail) = rest.split_at(w);
            blocks.push(head.to_vec());
            rest = tail;
        }
        Ok(Assignment { blocks })
    }

    pub fn blocks(&self) -> &[Vec<bool>] {
        &self.blocks
    }

    pub fn widths(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }
}

/// Bits of `index` over `width` positions, most significant first.
pub fn index_bits(index: u64, width: usize) -> Vec<bool> {
    (0..width)
        .map(|j| (index >> (width - 1 - j)) & 1 == 1)
        .collect()
}

/// Inverse of [`index_bits`].
pub fn bits_index(bits: &[bool]) -> u64 {
    bits.iter().fold(0, |acc, &b| (acc << 1) | u64::from(b))
}

/// Parses a compact bit string such as `"101"`; blocks may be separated by `,`.
pub fn parse_bits(text: &str) -> Result<Vec<Vec<bool>>> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(vec![Vec::new()]);
    }
    text.split(',')
        .map(|part| {
            part.trim()
                .char_indices()
                .map(|(i, c)| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(Error::Parse {
                        pos: i,
                        msg: format!("expected a bit, found `{c}`"),
                    }),
                })
                .collect()
        })
        .collect()
}

pub fn format_bits(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}
