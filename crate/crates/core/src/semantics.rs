//! Exact brute-force semantics for the promise problems at every level.
//!
//! Everything here is computed by full enumeration of the truth table,
//! then folded block by block with alternating quantifiers. Nothing is
//! approximated: exceeding the enumeration cap is an error.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::expr::{index_bits, truth_table, Family};

pub const DEFAULT_CAP: u64 = 1 << 22;

/// A nonempty subset of `{0, 1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PromiseValue {
    Zero,
    One,
    Both,
}

impl PromiseValue {
    pub fn singleton(bit: bool) -> Self {
        if bit {
            PromiseValue::One
        } else {
            PromiseValue::Zero
        }
    }

    /// The set `{b | b ∈ bits}`, or `None` when empty.
    pub fn from_members(has_zero: bool, has_one: bool) -> Option<Self> {
        match (has_zero, has_one) {
            (true, true) => Some(PromiseValue::Both),
            (true, false) => Some(PromiseValue::Zero),
            (false, true) => Some(PromiseValue::One),
            (false, false) => None,
        }
    }

    pub fn contains(self, bit: bool) -> bool {
        match self {
            PromiseValue::Both => true,
            PromiseValue::One => bit,
            PromiseValue::Zero => !bit,
        }
    }

    pub fn is_superset_of(self, other: PromiseValue) -> bool {
        (!other.contains(false) || self.contains(false))
            && (!other.contains(true) || self.contains(true))
    }

    pub fn union(self, other: PromiseValue) -> PromiseValue {
        PromiseValue::from_members(
            self.contains(false) || other.contains(false),
            self.contains(true) || other.contains(true),
        )
        .expect("union of nonempty sets")
    }

    pub fn dual(self) -> PromiseValue {
        match self {
            PromiseValue::Zero => PromiseValue::One,
            PromiseValue::One => PromiseValue::Zero,
            PromiseValue::Both => PromiseValue::Both,
        }
    }

    pub fn as_bit(self) -> Option<bool> {
        match self {
            PromiseValue::Zero => Some(false),
            PromiseValue::One => Some(true),
            PromiseValue::Both => None,
        }
    }
}

pub fn dual_value(v: PromiseValue) -> PromiseValue {
    v.dual()
}

impl fmt::Display for PromiseValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PromiseValue::Zero => "ZERO",
            PromiseValue::One => "ONE",
            PromiseValue::Both => "BOTH",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProblemKind {
    Sat,
    CoSat,
    MaxVal,
    MinVal,
    Val,
    USat,
    CoUSat,
    UVal,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 8] = [
        ProblemKind::Sat,
        ProblemKind::CoSat,
        ProblemKind::MaxVal,
        ProblemKind::MinVal,
        ProblemKind::Val,
        ProblemKind::USat,
        ProblemKind::CoUSat,
        ProblemKind::UVal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Sat => "SAT",
            ProblemKind::CoSat => "COSAT",
            ProblemKind::MaxVal => "MAXVAL",
            ProblemKind::MinVal => "MINVAL",
            ProblemKind::Val => "VAL",
            ProblemKind::USat => "USAT",
            ProblemKind::CoUSat => "COUSAT",
            ProblemKind::UVal => "UVAL",
        }
    }

    /// Problems whose answer is a first bit `π₁ x` of some solution.
    pub fn reads_first_bit(self) -> bool {
        matches!(
            self,
            ProblemKind::MaxVal | ProblemKind::MinVal | ProblemKind::Val | ProblemKind::UVal
        )
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProblemKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::shape(format!("unknown problem `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ProblemId {
    pub kind: ProblemKind,
    pub level: usize,
}

impl ProblemId {
    pub fn new(kind: ProblemKind, level: usize) -> Self {
        ProblemId { kind, level }
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.kind, self.level)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantifier {
    Exists,
    Forall,
}

impl Quantifier {
    pub fn flip(self) -> Self {
        match self {
            Quantifier::Exists => Quantifier::Forall,
            Quantifier::Forall => Quantifier::Exists,
        }
    }
}

/// Brute-force evaluator with a configurable enumeration cap.
#[derive(Clone, Copy, Debug)]
pub struct Solver {
    cap: u64,
}

impl Default for Solver {
    fn default() -> Self {
        Solver { cap: DEFAULT_CAP }
    }
}

fn fold(values: Vec<bool>, width: usize, q: Quantifier) -> Vec<bool> {
    values
        .chunks(1usize << width)
        .map(|c| match q {
            Quantifier::Exists => c.iter().any(|&b| b),
            Quantifier::Forall => c.iter().all(|&b| b),
        })
        .collect()
}

impl Solver {
    pub fn with_cap(cap: u64) -> Self {
        Solver { cap }
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    fn table(&self, f: &Family) -> Result<Vec<bool>> {
        let n = f.total_width();
        let needed = 1u128 << n.min(127);
        if n > 40 || needed > u128::from(self.cap) {
            return Err(Error::CapExceeded {
                needed,
                cap: self.cap,
            });
        }
        Ok(truth_table(f).to_bools())
    }

    /// Folds blocks `n..=from` with alternating quantifiers, block `from`
    /// getting `q_from`; returns the table over the remaining leading blocks.
    fn fold_from(&self, f: &Family, from: usize, q_from: Quantifier) -> Result<Vec<bool>> {
        let mut values = self.table(f)?;
        let n = f.level();
        for block in (from..=n).rev() {
            let q = if (block - from).is_multiple_of(2) {
                q_from
            } else {
                q_from.flip()
            };
            values = fold(values, f.width(block), q);
        }
        Ok(values)
    }

    /// Alternating-quantifier value, `start` applying to block 1.
    pub fn qbf_value(&self, f: &Family, start: Quantifier) -> Result<bool> {
        let v = self.fold_from(f, 1, start)?;
        Ok(v[0])
    }

    /// Indicator over `x ∈ Σ^{m₁}` of `SAT̄_{n−1}(f_x) = 1`.
    fn forall_indicator(&self, f: &Family) -> Result<Vec<bool>> {
        self.fold_from(f, 2, Quantifier::Forall)
    }

    /// Indicator over `x ∈ Σ^{m₁}` of `SAT_{n−1}(f_x) = 1`.
    fn exists_indicator(&self, f: &Family) -> Result<Vec<bool>> {
        self.fold_from(f, 2, Quantifier::Exists)
    }

    /// Indicator over the first block of the alternating fold of blocks
    /// `2..=n`, block 2 getting `q`.
    pub fn inner_indicator(&self, f: &Family, q: Quantifier) -> Result<Vec<bool>> {
        self.fold_from(f, 2, q)
    }

    /// `{x | SAT̄_{n−1}(f_x) = 1}` in lexicographic order.
    pub fn first_block_solution_set(&self, f: &Family) -> Result<Vec<Vec<bool>>> {
        let ind = self.forall_indicator(f)?;
        let m = f.width(1);
        Ok(ind
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| index_bits(i as u64, m))
            .collect())
    }

    pub fn solve(&self, p: ProblemId, f: &Family) -> Result<PromiseValue> {
        if p.level != f.level() {
            return Err(Error::LevelMismatch {
                expected: p.level,
                found: f.level(),
            });
        }
        let m = f.width(1);
        if p.kind.reads_first_bit() && m == 0 {
            return Err(Error::EmptyFirstBlock);
        }
        // first bit of x at lexicographic index i
        let half = (1usize << m) / 2;
        let first_bit = |i: usize| i >= half;
        use ProblemKind::*;
        let v = match p.kind {
            Sat => {
                let s = self.forall_indicator(f)?;
                PromiseValue::singleton(s.iter().any(|&b| b))
            }
            CoSat => {
                let t = self.exists_indicator(f)?;
                PromiseValue::singleton(t.iter().all(|&b| b))
            }
            MaxVal | MinVal => {
                let s = self.forall_indicator(f)?;
                let pick = if p.kind == MaxVal {
                    s.iter().rposition(|&b| b)
                } else {
                    s.iter().position(|&b| b)
                };
                match pick {
                    Some(i) => PromiseValue::singleton(first_bit(i)),
                    None => PromiseValue::Both,
                }
            }
            Val => {
                let s = self.forall_indicator(f)?;
                let zero = s[..half].iter().any(|&b| b);
                let one = s[half..].iter().any(|&b| b);
                PromiseValue::from_members(zero, one).unwrap_or(PromiseValue::Both)
            }
            USat => {
                let s = self.forall_indicator(f)?;
                match s.iter().filter(|&&b| b).count() {
                    0 => PromiseValue::Zero,
                    1 => PromiseValue::One,
                    _ => PromiseValue::Both,
                }
            }
            CoUSat => {
                let t = self.exists_indicator(f)?;
                match t.iter().filter(|&&b| !b).count() {
                    0 => PromiseValue::One,
                    1 => PromiseValue::Zero,
                    _ => PromiseValue::Both,
                }
            }
            UVal => {
                let s = self.forall_indicator(f)?;
                let mut hits = s.iter().enumerate().filter(|(_, &b)| b);
                match (hits.next(), hits.next()) {
                    (Some((i, _)), None) => PromiseValue::singleton(first_bit(i)),
                    _ => PromiseValue::Both,
                }
            }
        };
        Ok(v)
    }
}

pub fn qbf_value(f: &Family, start: Quantifier) -> Result<bool> {
    Solver::default().qbf_value(f, start)
}

pub fn solve(p: ProblemId, f: &Family) -> Result<PromiseValue> {
    Solver::default().solve(p, f)
}

/// Solves at the family's own level.
pub fn solve_kind(kind: ProblemKind, f: &Family) -> Result<PromiseValue> {
    solve(ProblemId::new(kind, f.level()), f)
}

pub fn first_block_solution_set(f: &Family) -> Result<Vec<Vec<bool>>> {
    Solver::default().first_block_solution_set(f)
}
