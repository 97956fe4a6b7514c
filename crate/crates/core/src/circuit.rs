//! Circuits with SAT gates, compiled per input `α` into a `∃∀` family and
//! into a `∃!w ∀z` family.
//!
//! Vertices are `x₁ … x_q` with `x₁` the output; gate `i` may read the inputs
//! `a₁ … a_m` and vertices `x_j` with `j > i`. A SAT gate owns private
//! witness variables `y₁ … y_w` and computes `∃y: b(a, x, y)`.
//!
//! Inside gate expressions, block 1 holds `a`, block 2 holds `x` and block 3
//! holds `y`.

use std::fmt;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::expr::{fix_block, index_bits, Expr, Family, VarRef};
use crate::reductions::{pair_count, standard_catalog};
use crate::semantics::{PromiseValue, ProblemId, ProblemKind, Quantifier, Solver};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Gate {
    Ordinary(Expr),
    Sat { width: usize, body: Expr },
}

impl Gate {
    fn expr(&self) -> &Expr {
        match self {
            Gate::Ordinary(e) => e,
            Gate::Sat { body, .. } => body,
        }
    }

    fn witness_width(&self) -> usize {
        match self {
            Gate::Ordinary(_) => 0,
            Gate::Sat { width, .. } => *width,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleCircuit {
    m: usize,
    gates: Vec<Gate>,
}

impl OracleCircuit {
    /// `gates[i]` computes vertex `x_{i+1}`.
    pub fn new(m: usize, gates: Vec<Gate>) -> Result<Self> {
        if gates.is_empty() {
            return Err(Error::shape("a circuit needs at least one gate"));
        }
        let q = gates.len();
        for (i0, g) in gates.iter().enumerate() {
            let i = i0 + 1;
            let mut bad = None;
            g.expr().for_each_var(&mut |v| {
                let ok = v.index >= 1
                    && match v.block {
                        1 => v.index <= m,
                        2 => v.index > i && v.index <= q,
                        3 => v.index <= g.witness_width(),
                        _ => false,
                    };
                if !ok && bad.is_none() {
                    bad = Some(v);
                }
            });
            if let Some(v) = bad {
                return Err(Error::shape(format!(
                    "gate x{i} cannot read {}",
                    var_name(v)
                )));
            }
        }
        Ok(OracleCircuit { m, gates })
    }

    pub fn input_width(&self) -> usize {
        self.m
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    /// Total witness width over all SAT gates.
    pub fn witness_width(&self) -> usize {
        self.gates.iter().map(Gate::witness_width).sum()
    }

    pub fn sat_gate_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::Sat { .. }))
            .count()
    }

    /// Inputs, vertices, witness variables and expression nodes.
    pub fn size(&self) -> usize {
        self.m
            + self.gates.len()
            + self
                .gates
                .iter()
                .map(|g| g.expr().size() + g.witness_width())
                .sum::<usize>()
    }

    /// Offset of each gate's witness inside the concatenated witness block.
    fn witness_offsets(&self) -> Vec<usize> {
        let mut off = 0;
        self.gates
            .iter()
            .map(|g| {
                let o = off;
                off += g.witness_width();
                o
            })
            .collect()
    }
}

fn var_name(v: VarRef) -> String {
    let c = match v.block {
        1 => 'a',
        2 => 'x',
        3 => 'y',
        _ => '?',
    };
    format!("{c}{}", v.index)
}

struct Shown<'a>(&'a Expr);

impl fmt::Display for Shown<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Expr::Const(c) => write!(f, "{}", u8::from(*c)),
            Expr::Var(v) => f.write_str(&var_name(*v)),
            Expr::Not(e) => write!(f, "!{}", Shown(e)),
            Expr::And(a, b) => write!(f, "({} & {})", Shown(a), Shown(b)),
            Expr::Or(a, b) => write!(f, "({} | {})", Shown(a), Shown(b)),
        }
    }
}

impl fmt::Display for OracleCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "circuit m={};", self.m)?;
        for (i, g) in self.gates.iter().enumerate() {
            match g {
                Gate::Ordinary(e) => writeln!(f, "x{} = {}", i + 1, Shown(e))?,
                Gate::Sat { width, body } => {
                    writeln!(f, "x{} = sat(w={width}) {}", i + 1, Shown(body))?
                }
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for OracleCircuit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_circuit(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Word(String),
    Var(char, usize),
    Int(usize),
    Sym(char),
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let number = |i: &mut usize| -> Result<usize> {
        let start = *i;
        while *i < bytes.len() && bytes[*i].is_ascii_digit() {
            *i += 1;
        }
        text[start..*i].parse().map_err(|_| Error::Parse {
            pos: start,
            msg: "integer out of range".into(),
        })
    };
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let n = number(&mut i)?;
            out.push((Tok::Int(n), start));
        } else if c.is_ascii_alphabetic() {
            while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                i += 1;
            }
            let word = &text[start..i];
            if word.len() == 1
                && matches!(c, 'a' | 'x' | 'y')
                && i < bytes.len()
                && bytes[i].is_ascii_digit()
            {
                let n = number(&mut i)?;
                out.push((Tok::Var(c, n), start));
            } else {
                out.push((Tok::Word(word.to_string()), start));
            }
        } else if "=;()!&|".contains(c) {
            out.push((Tok::Sym(c), start));
            i += 1;
        } else {
            return Err(Error::Parse {
                pos: start,
                msg: format!("unexpected character `{c}`"),
            });
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn expect_word(&mut self, w: &str) -> Result<()> {
        if *self.peek() == Tok::Word(w.into()) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected `{w}`"))
        }
    }

    fn int(&mut self) -> Result<usize> {
        match self.peek() {
            Tok::Int(n) => {
                let n = *n;
                self.bump();
                Ok(n)
            }
            _ => self.err("expected an integer"),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut e = self.term()?;
        while *self.peek() == Tok::Sym('|') {
            self.bump();
            e = Expr::or(e, self.term()?);
        }
        Ok(e)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut e = self.factor()?;
        while *self.peek() == Tok::Sym('&') {
            self.bump();
            e = Expr::and(e, self.factor()?);
        }
        Ok(e)
    }

    fn factor(&mut self) -> Result<Expr> {
        match self.peek().clone() {
            Tok::Sym('!') => {
                self.bump();
                Ok(Expr::not(self.factor()?))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            Tok::Int(n @ (0 | 1)) => {
                self.bump();
                Ok(Expr::Const(n == 1))
            }
            Tok::Var(c, n) => {
                if n == 0 {
                    return self.err("variable indices start at 1");
                }
                self.bump();
                let block = match c {
                    'a' => 1,
                    'x' => 2,
                    _ => 3,
                };
                Ok(Expr::var(block, n))
            }
            _ => self.err("expected `!`, `(`, `0`, `1` or a variable"),
        }
    }
}

/// Parses `circuit m=<int>;` followed by gate definitions
/// `x<i> = <expr>` or `x<i> = sat(w=<int>) <expr>`, optionally separated by `;`.
pub fn parse_circuit(text: &str) -> Result<OracleCircuit> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
    };
    p.expect_word("circuit")?;
    p.expect_word("m")?;
    p.expect_sym('=')?;
    let m = p.int()?;
    p.expect_sym(';')?;
    let mut defs: Vec<(usize, usize, Gate)> = Vec::new();
    while *p.peek() != Tok::End {
        let start = p.pos();
        let i = match p.bump() {
            Tok::Var('x', i) if i >= 1 => i,
            _ => {
                return Err(Error::Parse {
                    pos: start,
                    msg: "expected a gate definition `x<i> = …`".into(),
                })
            }
        };
        p.expect_sym('=')?;
        let gate = if *p.peek() == Tok::Word("sat".into()) {
            p.bump();
            p.expect_sym('(')?;
            p.expect_word("w")?;
            p.expect_sym('=')?;
            let width = p.int()?;
            p.expect_sym(')')?;
            Gate::Sat {
                width,
                body: p.expr()?,
            }
        } else {
            Gate::Ordinary(p.expr()?)
        };
        if *p.peek() == Tok::Sym(';') {
            p.bump();
        }
        defs.push((i, start, gate));
    }
    let q = defs.len();
    let mut gates: Vec<Option<Gate>> = vec![None; q];
    for (i, pos, gate) in defs {
        if i > q || gates[i - 1].is_some() {
            return Err(Error::Parse {
                pos,
                msg: format!("vertices must be x1..x{q}, each defined once"),
            });
        }
        gates[i - 1] = Some(gate);
    }
    let gates: Vec<Gate> = gates.into_iter().map(Option::unwrap).collect();
    OracleCircuit::new(m, gates).map_err(|e| match e {
        Error::Shape(msg) => Error::Parse { pos: 0, msg },
        other => other,
    })
}

fn check_alpha(c: &OracleCircuit, alpha: &[bool]) -> Result<()> {
    if alpha.len() != c.m {
        return Err(Error::shape(format!(
            "circuit reads {} inputs, got {}",
            c.m,
            alpha.len()
        )));
    }
    Ok(())
}

/// Values of `x₁ … x_q`, computed from `x_q` down.
pub fn vertex_values_with(solver: &Solver, c: &OracleCircuit, alpha: &[bool]) -> Result<Vec<bool>> {
    check_alpha(c, alpha)?;
    let q = c.gates.len();
    let mut x = vec![false; q];
    for i in (0..q).rev() {
        let read = |xs: &[bool], y: &[bool], v: VarRef| match v.block {
            1 => alpha[v.index - 1],
            2 => xs[v.index - 1],
            _ => y[v.index - 1],
        };
        x[i] = match &c.gates[i] {
            Gate::Ordinary(e) => e.eval_with(&|v| read(&x, &[], v)),
            Gate::Sat { width, body } => {
                let needed = 1u128 << (*width).min(127);
                if *width > 40 || needed > u128::from(solver.cap()) {
                    return Err(Error::CapExceeded {
                        needed,
                        cap: solver.cap(),
                    });
                }
                (0..1u64 << width).any(|j| {
                    let y = index_bits(j, *width);
                    body.eval_with(&|v| read(&x, &y, v))
                })
            }
        };
    }
    Ok(x)
}

pub fn eval_circuit(c: &OracleCircuit, alpha: &[bool]) -> Result<bool> {
    Ok(vertex_values_with(&Solver::default(), c, alpha)?[0])
}

/// `v(α, x) = (∃y p₁(x, y)) ∧ (∀z p₂(x, z))` for one `α`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidityParts {
    /// Blocks `[x, y]`: for each SAT gate, `¬x_i ∨ b_i(α, x, y⁽ⁱ⁾)`.
    pub p1: Family,
    /// Blocks `[x, z]`: both directions of every ordinary gate and
    /// `x_i ∨ ¬b_i(α, x, z⁽ⁱ⁾)` for each SAT gate.
    pub p2: Family,
}

/// `e` with `α` substituted, `x` in block `xb` and the gate's witness
/// variables shifted by `off` into block `wb`.
fn instantiate(e: &Expr, alpha: &[bool], xb: usize, wb: usize, off: usize) -> Expr {
    e.map_vars(&mut |v| match v.block {
        1 => Expr::Const(alpha[v.index - 1]),
        2 => Expr::var(xb, v.index),
        _ => Expr::var(wb, off + v.index),
    })
}

pub fn validity_parts(c: &OracleCircuit, alpha: &[bool]) -> Result<ValidityParts> {
    check_alpha(c, alpha)?;
    let q = c.gates.len();
    let w = c.witness_width();
    let offs = c.witness_offsets();
    let mut c1 = Vec::new();
    let mut c2 = Vec::new();
    for (i0, g) in c.gates.iter().enumerate() {
        let xi = Expr::var(1, i0 + 1);
        match g {
            Gate::Ordinary(e) => {
                let a = instantiate(e, alpha, 1, 2, 0);
                c2.push(Expr::or(Expr::not(xi.clone()), a.clone()));
                c2.push(Expr::or(xi, Expr::not(a)));
            }
            Gate::Sat { body, .. } => {
                let by = instantiate(body, alpha, 1, 2, offs[i0]);
                c1.push(Expr::or(Expr::not(xi.clone()), by.clone()));
                c2.push(Expr::or(xi, Expr::not(by)));
            }
        }
    }
    Ok(ValidityParts {
        p1: Family::new(vec![q, w], Expr::all(c1))?,
        p2: Family::new(vec![q, w], Expr::all(c2))?,
    })
}

/// Indicators over `x` of `∃y p₁` and `∀z p₂`.
fn part_indicators(solver: &Solver, parts: &ValidityParts) -> Result<(Vec<bool>, Vec<bool>)> {
    Ok((
        solver.inner_indicator(&parts.p1, Quantifier::Exists)?,
        solver.inner_indicator(&parts.p2, Quantifier::Forall)?,
    ))
}

/// Every `x` with `v(α, x) = 1`, in lexicographic order.
pub fn valid_assignments(c: &OracleCircuit, alpha: &[bool]) -> Result<Vec<Vec<bool>>> {
    let solver = Solver::default();
    let parts = validity_parts(c, alpha)?;
    let (e, a) = part_indicators(&solver, &parts)?;
    Ok((0..e.len())
        .filter(|&i| e[i] && a[i])
        .map(|i| index_bits(i as u64, c.gates.len()))
        .collect())
}

/// Blocks `[(x, y), z]` with body `x₁ ∧ p₁ ∧ p₂`; read with a leading `∃`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledSigma2 {
    pub family: Family,
}

pub fn compile_sigma2(c: &OracleCircuit, alpha: &[bool]) -> Result<CompiledSigma2> {
    let parts = validity_parts(c, alpha)?;
    let q = c.gates.len();
    let w = c.witness_width();
    let p1 = parts.p1.body().map_vars(&mut |v| {
        if v.block == 1 {
            Expr::Var(v)
        } else {
            Expr::var(1, q + v.index)
        }
    });
    let p2 = parts.p2.body().map_vars(&mut |v| {
        if v.block == 1 {
            Expr::Var(v)
        } else {
            Expr::var(2, v.index)
        }
    });
    let body = Expr::all([Expr::var(1, 1), p1, p2]);
    Ok(CompiledSigma2 {
        family: Family::new(vec![q + w, w], body)?,
    })
}

/// Positions (1-based, half open) of the named pieces in blocks `w` and `z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Uval2Layout {
    pub x: Range<usize>,
    pub u: usize,
    pub s: Range<usize>,
    pub t: Range<usize>,
    pub z3: Range<usize>,
    pub z4: Range<usize>,
}

impl fmt::Display for Uval2Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = |r: &Range<usize>| {
            if r.is_empty() {
                "-".to_string()
            } else {
                format!("{}..{}", r.start, r.end - 1)
            }
        };
        write!(
            f,
            "w: x={} u={} s={} t={}; z: z3={} z4={}",
            r(&self.x),
            self.u,
            r(&self.s),
            r(&self.t),
            r(&self.z3),
            r(&self.z4)
        )
    }
}

/// The `∃!w ∀z` family with `w = (x, u, s, t)` and `z = (z3, z4)`, plus the
/// two intermediate families `p₃` (blocks `[s, z3, x]`) and `p₄` (blocks
/// `[t, z4, x]`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledUval2 {
    pub family: Family,
    pub layout: Uval2Layout,
    pub parts: ValidityParts,
    pub p3: Family,
    pub p4: Family,
}

pub fn compile_uval2(c: &OracleCircuit, alpha: &[bool]) -> Result<CompiledUval2> {
    let parts = validity_parts(c, alpha)?;
    let q = c.gates.len();
    let catalog = standard_catalog();
    let swap = |f: &Family| -> Result<Family> {
        let body = f.body().map_vars(&mut |v| Expr::var(3 - v.block, v.index));
        Family::new(vec![f.width(2), f.width(1)], body)
    };
    // ∃y p₁ as SAT over y with parameters x, likewise ∀z p₂ as COSAT
    let p3 = catalog
        .sat_to_uval_next()
        .apply_with_params(&swap(&parts.p1)?, 1)?;
    let p4 = catalog
        .cosat_to_uval2()
        .apply_with_params(&swap(&parts.p2)?, 1)?;
    let (ns, nz3) = (p3.width(1), p3.width(2));
    let (nt, nz4) = (p4.width(1), p4.width(2));
    let layout = Uval2Layout {
        x: 1..q + 1,
        u: q + 1,
        s: q + 2..q + 2 + ns,
        t: q + 2 + ns..q + 2 + ns + nt,
        z3: 1..nz3 + 1,
        z4: nz3 + 1..nz3 + nz4 + 1,
    };
    let place = |f: &Family, first: usize, z: usize| {
        f.body().map_vars(&mut |v| match v.block {
            1 => Expr::var(1, first + v.index - 1),
            2 => Expr::var(2, z + v.index - 1),
            _ => Expr::var(1, v.index),
        })
    };
    let u = Expr::var(1, layout.u);
    let s1t1 = Expr::and(Expr::var(1, layout.s.start), Expr::var(1, layout.t.start));
    let body = Expr::all([
        u.clone(),
        Expr::iff(u, s1t1),
        place(&p3, layout.s.start, layout.z3.start),
        place(&p4, layout.t.start, layout.z4.start),
    ]);
    let family = Family::new(vec![layout.t.end - 1, layout.z4.end - 1], body)?;
    Ok(CompiledUval2 {
        family,
        layout,
        parts,
        p3,
        p4,
    })
}

/// For every `x`: `UVAL₂(p₃(·, ·, x)) = {[∃y p₁]}` and
/// `UVAL₂(p₄(·, ·, x)) = {[∀z p₂]}`.
pub fn side_conditions_hold(solver: &Solver, compiled: &CompiledUval2) -> Result<bool> {
    let (e, a) = part_indicators(solver, &compiled.parts)?;
    let q = compiled.parts.p1.width(1);
    let uval2 = ProblemId::new(ProblemKind::UVal, 2);
    for i in 0..1u64 << q {
        let x = index_bits(i, q);
        let s = solver.solve(uval2, &fix_block(&compiled.p3, 3, &x)?)?;
        let t = solver.solve(uval2, &fix_block(&compiled.p4, 3, &x)?)?;
        if s != PromiseValue::singleton(e[i as usize]) || t != PromiseValue::singleton(a[i as usize]) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Everything checked about one circuit at one input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompileCheck {
    pub circuit_value: bool,
    pub valid_count: usize,
    pub valid_first_bit: Option<bool>,
    pub sigma2_value: bool,
    /// Number of `w` with `∀z p₆(w, z)`.
    pub uval2_solutions: usize,
    pub uval2_value: PromiseValue,
    pub side_conditions: bool,
    pub sigma2_size: usize,
    pub uval2_size: usize,
}

impl CompileCheck {
    pub fn pass(&self) -> bool {
        self.valid_count == 1
            && self.valid_first_bit == Some(self.circuit_value)
            && self.sigma2_value == self.circuit_value
            && self.uval2_solutions == 1
            && self.uval2_value == PromiseValue::singleton(self.circuit_value)
            && self.side_conditions
    }
}

pub fn check_compiled(c: &OracleCircuit, alpha: &[bool]) -> Result<CompileCheck> {
    let solver = Solver::default();
    let circuit_value = vertex_values_with(&solver, c, alpha)?[0];
    let valid = valid_assignments(c, alpha)?;
    let sigma2 = compile_sigma2(c, alpha)?;
    let sigma2_value = solver.qbf_value(&sigma2.family, Quantifier::Exists)?;
    let uval2 = compile_uval2(c, alpha)?;
    let uval2_solutions = solver.first_block_solution_set(&uval2.family)?.len();
    let uval2_value = solver.solve(ProblemId::new(ProblemKind::UVal, 2), &uval2.family)?;
    Ok(CompileCheck {
        circuit_value,
        valid_count: valid.len(),
        valid_first_bit: valid.first().map(|x| x[0]),
        sigma2_value,
        uval2_solutions,
        uval2_value,
        side_conditions: side_conditions_hold(&solver, &uval2)?,
        sigma2_size: sigma2.family.size(),
        uval2_size: uval2.family.size(),
    })
}

/// `size(compiled UVAL₂ family) ≤ COMPILED_SIZE_COEFF · size(circuit)²`.
pub const COMPILED_SIZE_COEFF: usize = 16;

/// Width of the `z` block for a circuit: two gadget pair blocks.
pub fn uval2_universal_width(c: &OracleCircuit) -> usize {
    2 * pair_count(c.witness_width() + 1)
}
