//! Strong reductions as executable family transforms.
//!
//! A rule `μ` from `A` to `B` claims `A(f) ⊇ B(μ(f))` for every instance
//! (containment), or `A(f) = B(μ(f))` (equality). Either side may be a dual
//! problem `¬A`, whose value is the dual of `A`'s. Rules are level
//! polymorphic: a rule applied to an `n`-block family reads its source at
//! level `n` and its target at level `n + shift`.
//!
//! Transforms accept trailing parameter blocks: `apply_with_params(f, l)`
//! treats only the first `l` blocks as quantified and passes the rest through
//! untouched. The circuit compiler uses this to convert formulas that still
//! mention the circuit's vertex variables.

mod gadget;
mod intersection;
mod level0;
mod registry;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::expr::{
    add_leading_variable, negate_block_inputs, negate_output, pin_first_block_prefix, Expr,
    Family,
};
use crate::mutation::Mutation;
use crate::semantics::{PromiseValue, ProblemId, ProblemKind, Solver};

pub use gadget::pair_count;
pub use intersection::{
    build_uval_intersection, build_val_intersection, check_uval_intersection,
    check_val_intersection, IntersectionOutcome,
};
pub use level0::{check_pi1_to_uval, pi1_to_uval, PI1_TO_UVAL};
pub use registry::{diagram_edges, diagram_nodes, ClassId, Edge, Registry, Witness};

/// A problem or its dual.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ProblemRef {
    pub kind: ProblemKind,
    pub negated: bool,
}

impl ProblemRef {
    pub const fn plain(kind: ProblemKind) -> Self {
        ProblemRef {
            kind,
            negated: false,
        }
    }

    pub const fn dual(kind: ProblemKind) -> Self {
        ProblemRef {
            kind,
            negated: true,
        }
    }

    pub fn negate(self) -> Self {
        ProblemRef {
            kind: self.kind,
            negated: !self.negated,
        }
    }

    pub fn value(self, solver: &Solver, level: usize, f: &Family) -> Result<PromiseValue> {
        let v = solver.solve(ProblemId::new(self.kind, level), f)?;
        Ok(if self.negated { v.dual() } else { v })
    }
}

impl fmt::Display for ProblemRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "¬{}", self.kind)
        } else {
            write!(f, "{}", self.kind)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleKind {
    Equality,
    Containment,
}

/// `size(out) ≤ coeff · size(in)^degree`, sizes per [`Family::size`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SizeBound {
    pub coeff: u64,
    pub degree: u32,
}

impl SizeBound {
    pub fn allows(self, input: usize, output: usize) -> bool {
        let limit = u128::from(self.coeff) * (input as u128).pow(self.degree);
        output as u128 <= limit
    }

    fn then(self, next: SizeBound) -> SizeBound {
        SizeBound {
            coeff: next.coeff.saturating_mul(self.coeff.saturating_pow(next.degree)),
            degree: self.degree * next.degree,
        }
    }
}

pub type TransformFn = Arc<dyn Fn(&Family, usize) -> Result<Family> + Send + Sync>;

#[derive(Clone)]
pub struct ReductionRule {
    name: String,
    source: ProblemRef,
    target: ProblemRef,
    kind: RuleKind,
    shift: usize,
    fixed_level: Option<usize>,
    involutive: bool,
    size_bound: SizeBound,
    transform: TransformFn,
}

impl fmt::Debug for ReductionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ReductionRule")
            .field("name", &self.name)
            .field("source", &self.source)
            .field("target", &self.target)
            .field("kind", &self.kind)
            .field("shift", &self.shift)
            .field("fixed_level", &self.fixed_level)
            .finish()
    }
}

/// Result of checking one rule on one instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub source_value: PromiseValue,
    pub target_value: PromiseValue,
    pub transformed: Family,
    pub size_ok: bool,
    pub pass: bool,
}

impl ReductionRule {
    #[allow(clippy::too_many_arguments)]
    fn new(
        name: &str,
        source: ProblemRef,
        target: ProblemRef,
        kind: RuleKind,
        shift: usize,
        involutive: bool,
        size_bound: SizeBound,
        transform: impl Fn(&Family, usize) -> Result<Family> + Send + Sync + 'static,
    ) -> Self {
        ReductionRule {
            name: name.to_string(),
            source,
            target,
            kind,
            shift,
            fixed_level: None,
            involutive,
            size_bound,
            transform: Arc::new(transform),
        }
    }

    fn at_level(mut self, level: usize) -> Self {
        self.fixed_level = Some(level);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> ProblemRef {
        self.source
    }

    pub fn target(&self) -> ProblemRef {
        self.target
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    /// Levels added by the transform (1 for the gadget, 0 otherwise).
    pub fn shift(&self) -> usize {
        self.shift
    }

    pub fn fixed_level(&self) -> Option<usize> {
        self.fixed_level
    }

    pub fn size_bound(&self) -> SizeBound {
        self.size_bound
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    fn check_level(&self, level: usize) -> Result<()> {
        match self.fixed_level {
            Some(l) if l != level => Err(Error::LevelMismatch {
                expected: l,
                found: level,
            }),
            _ if level == 0 => Err(Error::shape("rules need at least one quantified block")),
            _ => Ok(()),
        }
    }

    pub fn apply(&self, f: &Family) -> Result<Family> {
        self.apply_with_params(f, f.level())
    }

    /// Applies the transform treating blocks past `levels` as parameters.
    pub fn apply_with_params(&self, f: &Family, levels: usize) -> Result<Family> {
        if levels > f.level() {
            return Err(Error::shape(format!(
                "{levels} quantified blocks requested, family has {}",
                f.level()
            )));
        }
        self.check_level(levels)?;
        (self.transform)(f, levels)
    }

    /// Compares source and target values on `f`.
    pub fn check_with(&self, solver: &Solver, f: &Family) -> Result<CheckOutcome> {
        let level = f.level();
        self.check_level(level)?;
        let source_value = self.source.value(solver, level, f)?;
        let transformed = (self.transform)(f, level)?;
        let target_value = self.target.value(solver, level + self.shift, &transformed)?;
        let holds = match self.kind {
            RuleKind::Equality => source_value == target_value,
            RuleKind::Containment => source_value.is_superset_of(target_value),
        };
        let size_ok = self.size_bound.allows(f.size(), transformed.size());
        Ok(CheckOutcome {
            source_value,
            target_value,
            transformed,
            size_ok,
            pass: holds && size_ok,
        })
    }

    pub fn check(&self, f: &Family) -> Result<CheckOutcome> {
        self.check_with(&Solver::default(), f)
    }

    /// `¬A ⊇ ¬B ∘ μ` follows from `A ⊇ B ∘ μ`.
    pub fn dualized(&self) -> ReductionRule {
        let mut r = self.clone();
        r.name = format!("dual({})", self.name);
        r.source = self.source.negate();
        r.target = self.target.negate();
        r
    }

    /// For an equality rule `¬A = B ∘ μ` with `μ` an involution up to
    /// evaluation, `¬B = A ∘ μ`.
    pub fn converse(&self) -> Result<ReductionRule> {
        if !(self.involutive && self.kind == RuleKind::Equality && self.shift == 0) {
            return Err(Error::TypeMismatch(format!(
                "{} is not an involutive equality",
                self.name
            )));
        }
        let mut r = self.clone();
        r.name = format!("converse({})", self.name);
        r.source = self.target.negate();
        r.target = self.source.negate();
        Ok(r)
    }
}

/// `r2 ∘ r1`: applies `r1` then `r2`.
pub fn compose_rules(r1: &ReductionRule, r2: &ReductionRule) -> Result<ReductionRule> {
    if r1.target != r2.source {
        return Err(Error::TypeMismatch(format!(
            "{} targets {} but {} expects {}",
            r1.name, r1.target, r2.name, r2.source
        )));
    }
    let fixed_level = match (r1.fixed_level, r2.fixed_level) {
        (Some(a), Some(b)) if a + r1.shift != b => {
            return Err(Error::TypeMismatch(format!(
                "{} ends at level {} but {} starts at level {b}",
                r1.name,
                a + r1.shift,
                r2.name
            )))
        }
        (Some(a), _) => Some(a),
        (None, Some(b)) if b <= r1.shift => {
            return Err(Error::TypeMismatch(format!(
                "{} cannot reach level {b}",
                r1.name
            )))
        }
        (None, Some(b)) => Some(b - r1.shift),
        (None, None) => None,
    };
    let (t1, t2) = (r1.transform.clone(), r2.transform.clone());
    let shift1 = r1.shift;
    Ok(ReductionRule {
        name: format!("{}∘{}", r1.name, r2.name),
        source: r1.source,
        target: r2.target,
        kind: if r1.kind == RuleKind::Equality && r2.kind == RuleKind::Equality {
            RuleKind::Equality
        } else {
            RuleKind::Containment
        },
        shift: r1.shift + r2.shift,
        fixed_level,
        involutive: false,
        size_bound: r1.size_bound.then(r2.size_bound),
        transform: Arc::new(move |f, levels| {
            let mid = t1(f, levels)?;
            t2(&mid, levels + shift1)
        }),
    })
}

/// The identity rule on a problem, kind equality.
pub fn identity_rule(p: ProblemRef) -> ReductionRule {
    ReductionRule::new(
        "id",
        p,
        p,
        RuleKind::Equality,
        0,
        false,
        LINEAR,
        |f, _| Ok(f.clone()),
    )
}

const LINEAR: SizeBound = SizeBound {
    coeff: 6,
    degree: 1,
};

const QUADRATIC: SizeBound = SizeBound {
    coeff: 4,
    degree: 2,
};

pub const RULE_NAMES: [&str; 14] = [
    "dual_sat",
    "dual_maxval",
    "dual_val",
    "dual_usat",
    "dual_uval",
    "dual_uvaln",
    "sat_to_maxval",
    "maxval_to_sat",
    "uval_to_val",
    "val_to_maxval",
    "uval_to_usat",
    "usat_to_sat",
    "maxval_to_uvaln1",
    PI1_TO_UVAL,
];

/// Named catalog of the family-to-family rules.
#[derive(Clone, Debug)]
pub struct Catalog {
    rules: BTreeMap<String, ReductionRule>,
}

fn sat_to_maxval(f: &Family, mutation: Option<Mutation>) -> Result<Family> {
    let shifted = add_leading_variable(f, 1)?;
    let guard = if mutation == Some(Mutation::SatToMaxvalPositiveGuard) {
        Expr::var(1, 1)
    } else {
        Expr::not(Expr::var(1, 1))
    };
    Family::new(
        shifted.widths().to_vec(),
        Expr::or(shifted.body().clone(), guard),
    )
}

fn maxval_to_sat(f: &Family) -> Result<Family> {
    if f.width(1) == 0 {
        return Err(Error::EmptyFirstBlock);
    }
    Family::new(
        f.widths().to_vec(),
        Expr::and(f.body().clone(), Expr::var(1, 1)),
    )
}

impl Catalog {
    pub fn standard() -> Self {
        Catalog::with_mutation(None)
    }

    /// The catalog with one fault injected (see [`Mutation`]).
    pub fn with_mutation(mutation: Option<Mutation>) -> Self {
        use ProblemKind::*;
        use RuleKind::*;
        let p = ProblemRef::plain;
        let d = ProblemRef::dual;
        let negx = |f: &Family, _: usize| negate_block_inputs(f, 1);
        let nego = |f: &Family, _: usize| Ok(negate_output(f));
        let id = |f: &Family, _: usize| Ok(f.clone());
        let rules = vec![
            ReductionRule::new("dual_sat", d(Sat), p(CoSat), Equality, 0, true, LINEAR, nego),
            ReductionRule::new("dual_maxval", d(MaxVal), p(MinVal), Equality, 0, true, LINEAR, negx),
            ReductionRule::new("dual_val", d(Val), p(Val), Equality, 0, true, LINEAR, negx),
            ReductionRule::new("dual_usat", d(USat), p(CoUSat), Equality, 0, true, LINEAR, nego),
            ReductionRule::new("dual_uval", d(UVal), p(UVal), Equality, 0, true, LINEAR, negx),
            ReductionRule::new("dual_uvaln", d(UVal), p(UVal), Equality, 0, true, LINEAR, negx)
                .at_level(2),
            ReductionRule::new(
                "sat_to_maxval",
                p(Sat),
                p(MaxVal),
                Equality,
                0,
                false,
                LINEAR,
                move |f, _| sat_to_maxval(f, mutation),
            ),
            ReductionRule::new("maxval_to_sat", p(MaxVal), p(Sat), Containment, 0, false, LINEAR, |f, _| {
                maxval_to_sat(f)
            }),
            ReductionRule::new("uval_to_val", p(UVal), p(Val), Containment, 0, false, LINEAR, id),
            ReductionRule::new("val_to_maxval", p(Val), p(MaxVal), Containment, 0, false, LINEAR, id),
            ReductionRule::new("uval_to_usat", p(UVal), p(USat), Containment, 0, false, LINEAR, |f, _| {
                if f.width(1) == 0 {
                    return Err(Error::EmptyFirstBlock);
                }
                pin_first_block_prefix(f, &[true])
            }),
            ReductionRule::new("usat_to_sat", p(USat), p(Sat), Containment, 0, false, LINEAR, id),
            ReductionRule::new(
                "maxval_to_uvaln1",
                p(MaxVal),
                p(UVal),
                Containment,
                1,
                false,
                QUADRATIC,
                move |f, levels| gadget::maxval_gadget(f, levels, mutation),
            ),
        ];
        Catalog {
            rules: rules.into_iter().map(|r| (r.name.clone(), r)).collect(),
        }
    }

    pub fn get(&self, name: &str) -> Result<&ReductionRule> {
        self.rules
            .get(name)
            .ok_or_else(|| Error::UnknownRule(name.to_string()))
    }

    pub fn rules(&self) -> impl Iterator<Item = &ReductionRule> {
        self.rules.values()
    }

    /// `SAT_n ∝ UVAL_{n+1}`: `sat_to_maxval` then the gadget.
    pub fn sat_to_uval_next(&self) -> ReductionRule {
        compose_rules(
            self.get("sat_to_maxval").expect("catalog rule"),
            self.get("maxval_to_uvaln1").expect("catalog rule"),
        )
        .expect("composable")
        .renamed("sat_to_uvaln1")
    }

    /// `SAT̄ ∝ UVAL₂` obtained by duality: `COSAT → ¬SAT → ¬UVAL₂ → UVAL₂`.
    pub fn cosat_to_uval2(&self) -> ReductionRule {
        let to_neg_sat = self
            .get("dual_sat")
            .and_then(ReductionRule::converse)
            .expect("involutive")
            .dualized();
        let lifted = self.sat_to_uval_next().dualized();
        let back = self.get("dual_uvaln").expect("catalog rule");
        let first = compose_rules(&to_neg_sat, &lifted).expect("composable");
        compose_rules(&first, back)
            .expect("composable")
            .renamed("cosat_to_uval2")
    }
}

pub fn standard_catalog() -> &'static Catalog {
    static CATALOG: OnceLock<Catalog> = OnceLock::new();
    CATALOG.get_or_init(Catalog::standard)
}

pub fn rule(name: &str) -> Result<&'static ReductionRule> {
    if name == PI1_TO_UVAL {
        return Err(Error::TypeMismatch(format!(
            "{PI1_TO_UVAL} takes a bit string, not a family"
        )));
    }
    standard_catalog().get(name)
}

pub fn apply_rule(name: &str, f: &Family) -> Result<Family> {
    rule(name)?.apply(f)
}

pub fn check_rule(name: &str, f: &Family) -> Result<CheckOutcome> {
    rule(name)?.check(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::truth_table;
    use crate::semantics::solve_kind;

    fn fam(s: &str) -> Family {
        s.parse().unwrap()
    }

    fn same_function(a: &Family, b: &Family) -> bool {
        a.widths() == b.widths() && truth_table(a) == truth_table(b)
    }

    #[test]
    fn dual_sat_is_negate_output() {
        let f = fam("blocks 2; b1_1 & !b1_2");
        assert_eq!(apply_rule("dual_sat", &f).unwrap(), negate_output(&f));
    }

    #[test]
    fn sat_to_maxval_on_contradiction() {
        let f = fam("blocks 1; b1_1 & !b1_1");
        let g = apply_rule("sat_to_maxval", &f).unwrap();
        assert!(same_function(
            &g,
            &fam("blocks 2; (b1_2 & !b1_2) | !b1_1")
        ));
        assert_eq!(solve_kind(ProblemKind::MaxVal, &g).unwrap(), PromiseValue::Zero);
        let c = check_rule("sat_to_maxval", &f).unwrap();
        assert!(c.pass);
        assert_eq!(c.source_value, PromiseValue::Zero);
    }

    #[test]
    fn gadget_on_disjunction() {
        let f = fam("blocks 2; b1_1 | b1_2");
        let g = apply_rule("maxval_to_uvaln1", &f).unwrap();
        assert_eq!(g.widths(), &[2, 1]);
        assert_eq!(
            crate::semantics::first_block_solution_set(&g).unwrap(),
            vec![vec![true, true]]
        );
        let c = check_rule("maxval_to_uvaln1", &f).unwrap();
        assert_eq!(c.target_value, PromiseValue::One);
        assert_eq!(c.source_value, PromiseValue::One);
        assert!(c.pass);
    }

    #[test]
    fn uval_to_usat_pins_first_bit() {
        let f = fam("blocks 3; b1_1 & b1_2 | b1_3");
        let g = apply_rule("uval_to_usat", &f).unwrap();
        assert_eq!(g, pin_first_block_prefix(&f, &[true]).unwrap());
    }

    #[test]
    fn check_examples() {
        let c = check_rule("dual_uval", &fam("blocks 2; b1_1 & !b1_2")).unwrap();
        assert!(c.pass);
        assert_eq!(c.source_value, PromiseValue::Zero);
        assert_eq!(c.target_value, PromiseValue::Zero);
        let c = check_rule("usat_to_sat", &fam("blocks 2; b1_1 | b1_2")).unwrap();
        assert!(c.pass);
        assert_eq!(c.source_value, PromiseValue::Both);
        assert_eq!(c.target_value, PromiseValue::One);
    }

    #[test]
    fn unknown_and_misapplied_rules() {
        let f = fam("blocks 1; b1_1");
        assert_eq!(
            apply_rule("nope", &f).unwrap_err(),
            Error::UnknownRule("nope".into())
        );
        assert!(matches!(
            apply_rule("dual_uvaln", &f),
            Err(Error::LevelMismatch { expected: 2, found: 1 })
        ));
        assert!(matches!(
            apply_rule(PI1_TO_UVAL, &f),
            Err(Error::TypeMismatch(_))
        ));
        assert!(matches!(
            apply_rule("maxval_to_sat", &fam("blocks 0; 1")),
            Err(Error::EmptyFirstBlock)
        ));
    }

    #[test]
    fn composition_typing() {
        let c = standard_catalog();
        let r = compose_rules(c.get("uval_to_val").unwrap(), c.get("val_to_maxval").unwrap())
            .unwrap();
        assert_eq!(r.source(), ProblemRef::plain(ProblemKind::UVal));
        assert_eq!(r.target(), ProblemRef::plain(ProblemKind::MaxVal));
        assert_eq!(r.kind(), RuleKind::Containment);
        assert!(matches!(
            compose_rules(c.get("uval_to_val").unwrap(), c.get("usat_to_sat").unwrap()),
            Err(Error::TypeMismatch(_))
        ));
        let s = c.sat_to_uval_next();
        assert_eq!(s.shift(), 1);
        assert_eq!(s.kind(), RuleKind::Containment);
        let co = c.cosat_to_uval2();
        assert_eq!(co.source(), ProblemRef::plain(ProblemKind::CoSat));
        assert_eq!(co.target(), ProblemRef::plain(ProblemKind::UVal));
        assert_eq!(co.fixed_level(), Some(1));
        assert!(c.get("uval_to_val").unwrap().converse().is_err());
    }

    #[test]
    fn identity_composition_keeps_verdicts() {
        let c = standard_catalog();
        let r = c.get("maxval_to_sat").unwrap();
        let with_id = compose_rules(&identity_rule(r.source()), r).unwrap();
        for text in ["blocks 2; b1_1 | b1_2", "blocks 2; !b1_1 & b1_2", "blocks 1; 0"] {
            let f = fam(text);
            assert_eq!(r.check(&f).unwrap().pass, with_id.check(&f).unwrap().pass);
        }
    }

    #[test]
    fn params_pass_through() {
        // SAT over y with a parameter block x: y ↦ (x₁ & y₁)
        let f = fam("blocks 1,1; b2_1 & b1_1");
        let r = standard_catalog().sat_to_uval_next();
        let g = r.apply_with_params(&f, 1).unwrap();
        assert_eq!(g.level(), 3);
        assert_eq!(g.widths()[2], 1);
        for x in [false, true] {
            let gx = crate::expr::fix_block(&g, 3, &[x]).unwrap();
            let v = crate::semantics::solve_kind(ProblemKind::UVal, &gx).unwrap();
            assert_eq!(v, PromiseValue::singleton(x));
        }
    }
}
