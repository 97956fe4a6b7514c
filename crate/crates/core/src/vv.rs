//! Randomized reduction from SAT to USAT by affine isolation.
//!
//! Each trial draws `k` affine constraints `row·x = offset` over GF(2) and
//! asks the USAT oracle about `f ∧ constraints`. The machine accepts on the
//! first answer `1`. Randomness is drawn up front as a plan; the oracle
//! resolves promise-violating queries afterwards.
//!
//! Stream order for a plan: for each trial, `k` (uniform over the range),
//! then each row's `m` bits followed by its offset bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::expr::{bits_index, index_bits, truth_table, Expr, Family};
use crate::oracle::{run_adversarial, AdversaryTree, Oracle, OracleMachine, Resolution};
use crate::semantics::ProblemKind;

/// `k` affine equations over `m` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HashConstraint {
    m: usize,
    rows: Vec<Vec<bool>>,
    offsets: Vec<bool>,
}

impl HashConstraint {
    pub fn new(m: usize, rows: Vec<Vec<bool>>, offsets: Vec<bool>) -> Result<Self> {
        if rows.len() != offsets.len() || rows.iter().any(|r| r.len() != m) {
            return Err(Error::shape("hash rows must have length m, one offset each"));
        }
        Ok(HashConstraint { m, rows, offsets })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.rows
    }

    pub fn offsets(&self) -> &[bool] {
        &self.offsets
    }

    pub fn contains(&self, x: &[bool]) -> bool {
        self.rows.iter().zip(&self.offsets).all(|(row, &off)| {
            row.iter().zip(x).filter(|(&r, &b)| r && b).count() % 2 == usize::from(off)
        })
    }

    /// Bit `i` set iff the assignment with lexicographic index `i` satisfies
    /// every equation. Requires `m ≤ 6`.
    pub fn mask(&self) -> u64 {
        assert!(self.m <= 6);
        (0..1u64 << self.m)
            .filter(|&i| self.contains(&index_bits(i, self.m)))
            .fold(0, |acc, i| acc | (1 << i))
    }
}

impl std::fmt::Display for HashConstraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let rows: Vec<String> = self
            .rows
            .iter()
            .zip(&self.offsets)
            .map(|(r, &o)| format!("{}={}", crate::expr::format_bits(r), u8::from(o)))
            .collect();
        write!(f, "{}", rows.join(" "))
    }
}

pub fn sample_hash<R: Rng + ?Sized>(m: usize, k: usize, rng: &mut R) -> Result<HashConstraint> {
    if k == 0 || k > m + 1 {
        return Err(Error::shape(format!("need 1 ≤ k ≤ {}, got {k}", m + 1)));
    }
    let mut rows = Vec::with_capacity(k);
    let mut offsets = Vec::with_capacity(k);
    for _ in 0..k {
        rows.push((0..m).map(|_| rng.gen::<bool>()).collect());
        offsets.push(rng.gen::<bool>());
    }
    HashConstraint::new(m, rows, offsets)
}

fn parity_tree(vars: &[Expr]) -> Expr {
    match vars {
        [] => Expr::Const(false),
        [v] => v.clone(),
        _ => {
            let (a, b) = vars.split_at(vars.len() / 2);
            Expr::xor(parity_tree(a), parity_tree(b))
        }
    }
}

/// [`sample_hash`] with a fresh generator seeded by `seed`.
pub fn hash_from_seed(m: usize, k: usize, seed: u64) -> Result<HashConstraint> {
    sample_hash(m, k, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// `f ∧ ⋀ (row·x = offset)`.
pub fn conjoin_hash(f: &Family, hc: &HashConstraint) -> Result<Family> {
    if f.level() != 1 || f.width(1) != hc.m {
        return Err(Error::shape(format!(
            "hash over {} variables does not fit blocks {:?}",
            hc.m,
            f.widths()
        )));
    }
    let constraints = hc.rows.iter().zip(&hc.offsets).map(|(row, &off)| {
        let vars: Vec<Expr> = row
            .iter()
            .enumerate()
            .filter(|(_, &r)| r)
            .map(|(j, _)| Expr::var(1, j + 1))
            .collect();
        let p = parity_tree(&vars);
        if off {
            p
        } else {
            Expr::not(p)
        }
    });
    let body = Expr::all(std::iter::once(f.body().clone()).chain(constraints));
    Family::new(f.widths().to_vec(), body)
}

/// Inclusive range of `k`; the default is `2..=m+1`.
pub fn default_k_range(m: usize) -> (usize, usize) {
    (2.min(m + 1), m + 1)
}

/// Draws the hashes for `trials` trials. For `m = 0` the plan is a single
/// empty constraint, so the query is `f` itself.
pub fn draw_plan<R: Rng + ?Sized>(
    m: usize,
    trials: usize,
    k_range: Option<(usize, usize)>,
    rng: &mut R,
) -> Result<Vec<HashConstraint>> {
    if m == 0 {
        return Ok(vec![HashConstraint::new(0, vec![vec![]], vec![false])?]);
    }
    let (lo, hi) = k_range.unwrap_or_else(|| default_k_range(m));
    if lo == 0 || lo > hi || hi > m + 1 {
        return Err(Error::shape(format!(
            "k range {lo}..={hi} outside 1..={}",
            m + 1
        )));
    }
    (0..trials)
        .map(|_| {
            let k = rng.gen_range(lo..=hi);
            sample_hash(m, k, rng)
        })
        .collect()
}

pub fn plan_from_seed(
    m: usize,
    trials: usize,
    k_range: Option<(usize, usize)>,
    seed: u64,
) -> Result<Vec<HashConstraint>> {
    draw_plan(m, trials, k_range, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Trial count `24m` (at least one).
pub fn default_trials(m: usize) -> usize {
    (24 * m).max(1)
}

/// SAT via a USAT oracle, following a fixed plan.
#[derive(Clone, Debug)]
pub struct VvMachine {
    pub plan: Vec<HashConstraint>,
}

impl OracleMachine for VvMachine {
    fn name(&self) -> &str {
        "sat-via-usat"
    }

    fn oracle_problem(&self) -> ProblemKind {
        ProblemKind::USat
    }

    fn source_problem(&self) -> ProblemKind {
        ProblemKind::Sat
    }

    fn run(&self, f: &Family, oracle: &mut dyn Oracle) -> Result<bool> {
        for hc in &self.plan {
            if oracle.ask(&conjoin_hash(f, hc)?)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Runs the machine on a plan; `Fixed(false)` is the default adversary.
pub fn vv_run(
    f: &Family,
    plan: Vec<HashConstraint>,
    resolution: Resolution,
) -> Result<AdversaryTree> {
    let cap = plan.len() + 2;
    run_adversarial(&VvMachine { plan }, f, resolution, cap)
}

/// One decision with `trials` trials, free queries answered `0`.
pub fn vv_decide<R: Rng + ?Sized>(f: &Family, rng: &mut R, trials: usize) -> Result<bool> {
    if f.level() != 1 {
        return Err(Error::LevelMismatch {
            expected: 1,
            found: f.level(),
        });
    }
    let plan = draw_plan(f.width(1), trials, None, rng)?;
    let tree = vv_run(f, plan, Resolution::Fixed(false))?;
    Ok(tree.paths[0].output)
}

/// Solution set of a 1-block family with `m ≤ 6` as a bit mask.
pub fn solution_mask(f: &Family) -> Result<u64> {
    if f.level() != 1 || f.width(1) > 6 {
        return Err(Error::shape("solution masks need one block of width ≤ 6"));
    }
    let t = truth_table(f);
    Ok((0..t.len()).filter(|&i| t.get(i)).fold(0, |acc, i| acc | (1 << i)))
}

/// The machine's output computed from solution counts: a query with one
/// solution is answered `1`, none `0`, several `free`.
pub fn decide_by_masks(solutions: u64, masks: &[u64], free: bool) -> bool {
    masks.iter().any(|&h| match (solutions & h).count_ones() {
        0 => false,
        1 => true,
        _ => free,
    })
}

/// Number of trials whose query has exactly one solution.
pub fn isolation_count(solutions: u64, masks: &[u64]) -> usize {
    masks
        .iter()
        .filter(|&&h| (solutions & h).count_ones() == 1)
        .count()
}

/// Index of an assignment in a solution mask.
pub fn mask_bit(x: &[bool]) -> u64 {
    1 << bits_index(x)
}
