//! Oracle machines under adversarial answers.
//!
//! A query whose promise fails (value `BOTH`) may be answered either way, and
//! answers to repeated queries need not agree. [`run_adversarial`] explores
//! every such choice by replaying the machine with a growing script of
//! answers, depth first, `0` before `1`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::expr::{fix_first_block_prefix, Family};
use crate::mutation::Mutation;
use crate::semantics::{PromiseValue, ProblemId, ProblemKind, Solver};

/// Answers membership queries for some promise problem.
pub trait Oracle {
    fn ask(&mut self, query: &Family) -> Result<bool>;
}

/// A deterministic procedure with oracle access.
pub trait OracleMachine: Sync {
    fn name(&self) -> &str;
    /// Problem answered by the oracle.
    fn oracle_problem(&self) -> ProblemKind;
    /// Problem the machine claims to solve.
    fn source_problem(&self) -> ProblemKind;
    fn run(&self, f: &Family, oracle: &mut dyn Oracle) -> Result<bool>;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Call {
    pub query: Family,
    pub answer: bool,
    pub forced: bool,
}

/// One root-to-leaf path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transcript {
    pub calls: Vec<Call>,
    pub output: bool,
}

impl Transcript {
    pub fn len(&self) -> usize {
        self.calls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.calls.is_empty()
    }

    /// Every answer lies in the solved value and `forced` matches it.
    pub fn is_valid(&self, solver: &Solver, oracle: ProblemKind) -> Result<bool> {
        for c in &self.calls {
            let v = solver.solve(ProblemId::new(oracle, c.query.level()), &c.query)?;
            if !v.contains(c.answer) || c.forced != (v != PromiseValue::Both) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn dump(&self) -> String {
        let mut out = String::new();
        for c in &self.calls {
            let tag = if c.forced { "forced" } else { "free" };
            let _ = writeln!(out, "Q {} -> {} [{tag}]", c.query, u8::from(c.answer));
        }
        let _ = writeln!(out, "OUT {}", u8::from(self.output));
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdversaryTree {
    pub paths: Vec<Transcript>,
}

impl AdversaryTree {
    pub fn leaf_count(&self) -> usize {
        self.paths.len()
    }

    pub fn max_calls(&self) -> usize {
        self.paths.iter().map(Transcript::len).max().unwrap_or(0)
    }

    pub fn outputs(&self) -> impl Iterator<Item = bool> + '_ {
        self.paths.iter().map(|p| p.output)
    }

    /// Paths separated by blank lines.
    pub fn dump(&self) -> String {
        self.paths
            .iter()
            .map(Transcript::dump)
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// How answers to `BOTH`-valued queries are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Resolution {
    /// Branch on both answers.
    Exhaustive,
    /// Always give this answer (one path).
    Fixed(bool),
}

pub const DEFAULT_PATH_CAP: usize = 1 << 16;

struct ScriptedOracle<'a> {
    solver: &'a Solver,
    problem: ProblemKind,
    resolution: Resolution,
    script: &'a [bool],
    used: usize,
    calls: Vec<Call>,
}

impl Oracle for ScriptedOracle<'_> {
    fn ask(&mut self, query: &Family) -> Result<bool> {
        let v = self
            .solver
            .solve(ProblemId::new(self.problem, query.level()), query)?;
        let (answer, forced) = match v.as_bit() {
            Some(b) => (b, true),
            None => {
                let b = match self.resolution {
                    Resolution::Fixed(b) => b,
                    Resolution::Exhaustive => self.script.get(self.used).copied().unwrap_or(false),
                };
                self.used += 1;
                (b, false)
            }
        };
        self.calls.push(Call {
            query: query.clone(),
            answer,
            forced,
        });
        Ok(answer)
    }
}

pub fn run_adversarial(
    machine: &dyn OracleMachine,
    f: &Family,
    resolution: Resolution,
    path_cap: usize,
) -> Result<AdversaryTree> {
    run_adversarial_with(&Solver::default(), machine, f, resolution, path_cap)
}

pub fn run_adversarial_with(
    solver: &Solver,
    machine: &dyn OracleMachine,
    f: &Family,
    resolution: Resolution,
    path_cap: usize,
) -> Result<AdversaryTree> {
    let mut paths = Vec::new();
    let mut script: Vec<bool> = Vec::new();
    loop {
        if paths.len() == path_cap {
            return Err(Error::PathCapExceeded { cap: path_cap });
        }
        let mut oracle = ScriptedOracle {
            solver,
            problem: machine.oracle_problem(),
            resolution,
            script: &script,
            used: 0,
            calls: Vec::new(),
        };
        let output = machine.run(f, &mut oracle)?;
        let used = oracle.used;
        paths.push(Transcript {
            calls: oracle.calls,
            output,
        });
        if resolution != Resolution::Exhaustive {
            break;
        }
        script.resize(used, false);
        while script.last() == Some(&true) {
            script.pop();
        }
        match script.last_mut() {
            Some(last) => *last = true,
            None => break,
        }
    }
    Ok(AdversaryTree { paths })
}

fn single_block(f: &Family) -> Result<usize> {
    if f.level() != 1 {
        return Err(Error::LevelMismatch {
            expected: 1,
            found: f.level(),
        });
    }
    Ok(f.width(1))
}

/// Finds a putative solution bit by bit, asking for the first bit of a
/// solution of the current restriction, then evaluates `f` on it.
fn bit_fixing(
    f: &Family,
    oracle: &mut dyn Oracle,
    skip_fix: bool,
    flip: bool,
) -> Result<bool> {
    let m = single_block(f)?;
    let mut current = f.clone();
    let mut x = Vec::with_capacity(m);
    for _ in 0..m {
        let bit = oracle.ask(&current)? ^ flip;
        x.push(bit);
        if !skip_fix {
            current = fix_first_block_prefix(&current, &[bit])?;
        }
    }
    f.evaluate_flat(&x)
}

/// SAT with a VAL oracle.
#[derive(Clone, Copy, Debug, Default)]
pub struct SatViaVal {
    pub mutation: Option<Mutation>,
}

impl OracleMachine for SatViaVal {
    fn name(&self) -> &str {
        "sat-via-val"
    }

    fn oracle_problem(&self) -> ProblemKind {
        ProblemKind::Val
    }

    fn source_problem(&self) -> ProblemKind {
        ProblemKind::Sat
    }

    fn run(&self, f: &Family, oracle: &mut dyn Oracle) -> Result<bool> {
        let skip = self.mutation == Some(Mutation::ValMachineSkipsFix);
        bit_fixing(f, oracle, skip, false)
    }
}

/// USAT with a UVAL oracle.
#[derive(Clone, Copy, Debug, Default)]
pub struct USatViaUVal {
    pub mutation: Option<Mutation>,
}

impl OracleMachine for USatViaUVal {
    fn name(&self) -> &str {
        "usat-via-uval"
    }

    fn oracle_problem(&self) -> ProblemKind {
        ProblemKind::UVal
    }

    fn source_problem(&self) -> ProblemKind {
        ProblemKind::USat
    }

    fn run(&self, f: &Family, oracle: &mut dyn Oracle) -> Result<bool> {
        let flip = self.mutation == Some(Mutation::UvalMachineFlipsBit);
        bit_fixing(f, oracle, false, flip)
    }
}

/// Asks its own problem once and echoes the answer.
#[derive(Clone, Copy, Debug)]
pub struct Identity {
    pub problem: ProblemKind,
}

impl OracleMachine for Identity {
    fn name(&self) -> &str {
        match self.problem {
            ProblemKind::Sat => "identity-sat",
            ProblemKind::USat => "identity-usat",
            _ => "identity",
        }
    }

    fn oracle_problem(&self) -> ProblemKind {
        self.problem
    }

    fn source_problem(&self) -> ProblemKind {
        self.problem
    }

    fn run(&self, f: &Family, oracle: &mut dyn Oracle) -> Result<bool> {
        oracle.ask(f)
    }
}

pub const MACHINE_NAMES: [&str; 4] = ["sat-via-val", "usat-via-uval", "identity-sat", "identity-usat"];

pub fn machine(name: &str, mutation: Option<Mutation>) -> Result<Box<dyn OracleMachine>> {
    Ok(match name {
        "sat-via-val" => Box::new(SatViaVal { mutation }),
        "usat-via-uval" => Box::new(USatViaUVal { mutation }),
        "identity-sat" => Box::new(Identity {
            problem: ProblemKind::Sat,
        }),
        "identity-usat" => Box::new(Identity {
            problem: ProblemKind::USat,
        }),
        _ => return Err(Error::shape(format!("unknown machine `{name}`"))),
    })
}

/// Outcome of checking a machine on one input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MachineVerdict {
    pub source_value: PromiseValue,
    pub leaves: usize,
    pub max_calls: usize,
    /// Every leaf output lies in `source_value`.
    pub leaves_ok: bool,
    /// Every path makes exactly `expected_calls` calls, when given.
    pub calls_ok: bool,
    pub transcripts_ok: bool,
}

impl MachineVerdict {
    pub fn pass(&self) -> bool {
        self.leaves_ok && self.calls_ok && self.transcripts_ok
    }
}

pub fn check_machine(
    machine: &dyn OracleMachine,
    f: &Family,
    expected_calls: Option<usize>,
) -> Result<MachineVerdict> {
    let solver = Solver::default();
    let tree = run_adversarial_with(&solver, machine, f, Resolution::Exhaustive, DEFAULT_PATH_CAP)?;
    let source_value = solver.solve(ProblemId::new(machine.source_problem(), f.level()), f)?;
    let mut transcripts_ok = true;
    for p in &tree.paths {
        transcripts_ok &= p.is_valid(&solver, machine.oracle_problem())?;
    }
    let leaves_ok = tree.outputs().all(|b| source_value.contains(b));
    let calls_ok = expected_calls.is_none_or(|k| tree.paths.iter().all(|p| p.len() == k));
    Ok(MachineVerdict {
        source_value,
        leaves: tree.leaf_count(),
        max_calls: tree.max_calls(),
        leaves_ok,
        calls_ok,
        transcripts_ok,
    })
}
