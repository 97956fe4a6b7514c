//! Classes of the hierarchy diagram, its arrows for levels `n ≤ 2`, and the
//! witness attached to each arrow.

use std::collections::BTreeMap;
use std::fmt;

use super::{compose_rules, Catalog, ReductionRule, PI1_TO_UVAL};
use crate::error::{Error, Result};

/// A node of the diagram. Levels start at 1 (`ÛΔ̂` and `Δ̂` at 2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassId {
    P,
    UV(usize),
    V(usize),
    US(usize),
    UCS(usize),
    Sigma(usize),
    Pi(usize),
    UDelta(usize),
    Delta(usize),
}

fn subscript(n: usize) -> String {
    n.to_string()
        .chars()
        .map(|c| char::from_u32(0x2080 + c.to_digit(10).unwrap()).unwrap())
        .collect()
}

impl ClassId {
    /// ASCII identifier used for DOT node names.
    pub fn id(self) -> String {
        match self {
            ClassId::P => "P".into(),
            ClassId::UV(n) => format!("UV{n}"),
            ClassId::V(n) => format!("V{n}"),
            ClassId::US(n) => format!("US{n}"),
            ClassId::UCS(n) => format!("UCS{n}"),
            ClassId::Sigma(n) => format!("Sigma{n}"),
            ClassId::Pi(n) => format!("Pi{n}"),
            ClassId::UDelta(n) => format!("UDelta{n}"),
            ClassId::Delta(n) => format!("Delta{n}"),
        }
    }

    pub fn label(self) -> String {
        match self {
            ClassId::P => "P̂".into(),
            ClassId::UV(n) => format!("ÛV{}", subscript(n)),
            ClassId::V(n) => format!("V̂{}", subscript(n)),
            ClassId::US(n) => format!("ÛS{}", subscript(n)),
            ClassId::UCS(n) => format!("ÛCS{}", subscript(n)),
            ClassId::Sigma(n) => format!("Σ̂{}", subscript(n)),
            ClassId::Pi(n) => format!("Π̂{}", subscript(n)),
            ClassId::UDelta(n) => format!("ÛΔ̂{}", subscript(n)),
            ClassId::Delta(n) => format!("Δ̂{}", subscript(n)),
        }
    }

    /// Level of the problems defining the class (0 for `P̂`).
    pub fn level(self) -> usize {
        match self {
            ClassId::P => 0,
            ClassId::UV(n)
            | ClassId::V(n)
            | ClassId::US(n)
            | ClassId::UCS(n)
            | ClassId::Sigma(n)
            | ClassId::Pi(n)
            | ClassId::UDelta(n)
            | ClassId::Delta(n) => n,
        }
    }

    /// Reflection through the horizontal axis of the diagram.
    pub fn dual(self) -> ClassId {
        match self {
            ClassId::US(n) => ClassId::UCS(n),
            ClassId::UCS(n) => ClassId::US(n),
            ClassId::Sigma(n) => ClassId::Pi(n),
            ClassId::Pi(n) => ClassId::Sigma(n),
            other => other,
        }
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Every node of the diagram through level 2, in display order.
pub fn diagram_nodes() -> Vec<ClassId> {
    use ClassId::*;
    vec![
        P,
        UV(1),
        V(1),
        US(1),
        UCS(1),
        Sigma(1),
        Pi(1),
        UDelta(2),
        Delta(2),
        UV(2),
        V(2),
        US(2),
        UCS(2),
        Sigma(2),
        Pi(2),
    ]
}

fn cube(n: usize, out: &mut Vec<(ClassId, ClassId)>, with_top: bool) {
    use ClassId::*;
    out.extend([
        (UV(n), V(n)),
        (UV(n), US(n)),
        (UV(n), UCS(n)),
        (V(n), Sigma(n)),
        (V(n), Pi(n)),
        (US(n), Sigma(n)),
        (UCS(n), Pi(n)),
    ]);
    if with_top {
        out.extend([
            (US(n), UDelta(n + 1)),
            (UCS(n), UDelta(n + 1)),
            (Sigma(n), Delta(n + 1)),
            (Pi(n), Delta(n + 1)),
            (UDelta(n + 1), Delta(n + 1)),
        ]);
    }
}

/// Arrows `X → Y` (`X ⊆ Y`) of the diagram restricted to [`diagram_nodes`].
pub fn diagram_edges() -> Vec<(ClassId, ClassId)> {
    use ClassId::*;
    let mut out = vec![(P, UV(1))];
    cube(1, &mut out, true);
    out.push((Delta(2), UV(2)));
    cube(2, &mut out, false);
    out
}

/// Evidence for one arrow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// A catalog rule, checked at the source level.
    Rule(String),
    /// A composition stored in the registry.
    Composition(String),
    /// The bit-string construction `π₁(x) = UVAL(f_x)`.
    Level0,
    /// The oracle-circuit compiler into UVAL₂ form.
    Compiled,
    /// A theorem recorded without an executable construction.
    RegistryOnly(String),
}

impl Witness {
    pub fn tag(&self) -> String {
        match self {
            Witness::Rule(n) => format!("rule:{n}"),
            Witness::Composition(n) => format!("composition:{n}"),
            Witness::Level0 => format!("rule:{PI1_TO_UVAL}"),
            Witness::Compiled => "compiled:uval2".into(),
            Witness::RegistryOnly(t) => format!("theorem:{t}"),
        }
    }

    pub fn is_executable(&self) -> bool {
        !matches!(self, Witness::RegistryOnly(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: ClassId,
    pub to: ClassId,
    pub witness: Witness,
}

/// Catalog rules, derived compositions and the witness of every arrow.
#[derive(Clone, Debug)]
pub struct Registry {
    catalog: Catalog,
    compositions: BTreeMap<String, ReductionRule>,
    witnesses: BTreeMap<(ClassId, ClassId), Witness>,
}

fn chain(name: &str, parts: &[ReductionRule]) -> ReductionRule {
    let mut acc = parts[0].clone();
    for next in &parts[1..] {
        acc = compose_rules(&acc, next).expect("registry chains are well typed");
    }
    acc.renamed(name)
}

fn default_witness(from: ClassId, to: ClassId) -> Option<Witness> {
    use ClassId::*;
    let rule = |s: &str| Some(Witness::Rule(s.into()));
    let comp = |s: &str| Some(Witness::Composition(s.into()));
    let thm = |s: &str| Some(Witness::RegistryOnly(s.into()));
    match (from, to) {
        (P, UV(1)) => Some(Witness::Level0),
        (UV(a), V(b)) if a == b => rule("uval_to_val"),
        (UV(a), US(b)) if a == b => rule("uval_to_usat"),
        (UV(a), UCS(b)) if a == b => comp("uval_to_cousat"),
        (V(a), Sigma(b)) if a == b => comp("val_to_sat"),
        (V(a), Pi(b)) if a == b => comp("val_to_cosat"),
        (US(a), Sigma(b)) if a == b => rule("usat_to_sat"),
        (UCS(a), Pi(b)) if a == b => comp("cousat_to_cosat"),
        (US(a), UDelta(b)) | (UCS(a), UDelta(b)) if b == a + 1 => {
            thm("usat-in-p-usat")
        }
        (UDelta(a), Delta(b)) if a == b => thm("usat-in-p-usat"),
        (Sigma(a), Delta(b)) | (Pi(a), Delta(b)) if b == a + 1 => thm("sat-in-p-sat"),
        (Delta(2), UV(2)) => Some(Witness::Compiled),
        _ => None,
    }
}

impl Registry {
    pub fn standard() -> Self {
        Registry::from_catalog(Catalog::standard())
    }

    pub fn from_catalog(catalog: Catalog) -> Self {
        let r = |n: &str| catalog.get(n).expect("catalog rule").clone();
        let conv = |n: &str| r(n).converse().expect("involutive equality");
        let val_to_minval = chain(
            "val_to_minval",
            &[
                r("dual_val").dualized(),
                r("val_to_maxval").dualized(),
                r("dual_maxval"),
            ],
        );
        let minval_to_cosat = chain(
            "minval_to_cosat",
            &[
                conv("dual_maxval").dualized(),
                r("maxval_to_sat").dualized(),
                r("dual_sat"),
            ],
        );
        let mut compositions = BTreeMap::new();
        let mut add = |rule: ReductionRule| {
            compositions.insert(rule.name().to_string(), rule);
        };
        add(chain("uval_to_maxval", &[r("uval_to_val"), r("val_to_maxval")]));
        add(chain("val_to_sat", &[r("val_to_maxval"), r("maxval_to_sat")]));
        add(chain(
            "val_to_cosat",
            &[val_to_minval.clone(), minval_to_cosat.clone()],
        ));
        add(val_to_minval);
        add(minval_to_cosat);
        add(chain(
            "uval_to_cousat",
            &[
                r("dual_uval").dualized(),
                r("uval_to_usat").dualized(),
                r("dual_usat"),
            ],
        ));
        add(chain(
            "cousat_to_cosat",
            &[
                conv("dual_usat").dualized(),
                r("usat_to_sat").dualized(),
                r("dual_sat"),
            ],
        ));
        add(catalog.sat_to_uval_next());
        add(catalog.cosat_to_uval2());

        let witnesses = diagram_edges()
            .into_iter()
            .filter_map(|(a, b)| default_witness(a, b).map(|w| ((a, b), w)))
            .collect();
        Registry {
            catalog,
            compositions,
            witnesses,
        }
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn composition(&self, name: &str) -> Result<&ReductionRule> {
        self.compositions
            .get(name)
            .ok_or_else(|| Error::UnknownRule(name.to_string()))
    }

    /// A catalog rule or a composition.
    pub fn lookup(&self, name: &str) -> Result<&ReductionRule> {
        self.catalog.get(name).or_else(|_| self.composition(name))
    }

    pub fn compositions(&self) -> impl Iterator<Item = &ReductionRule> {
        self.compositions.values()
    }

    /// The executable rule behind a `Rule` or `Composition` witness.
    pub fn resolve(&self, w: &Witness) -> Option<&ReductionRule> {
        match w {
            Witness::Rule(n) => self.catalog.get(n).ok(),
            Witness::Composition(n) => self.compositions.get(n),
            _ => None,
        }
    }

    pub fn witness(&self, from: ClassId, to: ClassId) -> Option<&Witness> {
        self.witnesses.get(&(from, to))
    }

    /// Drops the witness of one arrow.
    pub fn without_witness(mut self, from: ClassId, to: ClassId) -> Self {
        self.witnesses.remove(&(from, to));
        self
    }

    /// Every diagram arrow with its witness, or the first unwitnessed arrow.
    pub fn validate(&self) -> Result<Vec<Edge>> {
        diagram_edges()
            .into_iter()
            .map(|(from, to)| match self.witnesses.get(&(from, to)) {
                Some(w) => Ok(Edge {
                    from,
                    to,
                    witness: w.clone(),
                }),
                None => Err(Error::IncompleteRegistry {
                    from: from.label(),
                    to: to.label(),
                }),
            })
            .collect()
    }
}
