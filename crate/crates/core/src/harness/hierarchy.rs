use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{enumerate_tables, random_circuit, tally, verify_rule_on, CircuitSpec, Counterexample, Verdict};
use crate::circuit::check_compiled;
use crate::error::Result;
use crate::expr::{format_bits, index_bits, Family};
use crate::reductions::{check_pi1_to_uval, diagram_nodes, ClassId, Edge, Registry, Witness};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeStatus {
    Verified,
    Failed,
    RegistryOnly,
}

impl EdgeStatus {
    fn attrs(self) -> &'static str {
        match self {
            EdgeStatus::Verified => "style=solid",
            EdgeStatus::Failed => "style=dotted, color=red",
            EdgeStatus::RegistryOnly => "style=dashed",
        }
    }
}

#[derive(Clone, Debug)]
pub struct HierarchyReport {
    pub edges: Vec<(Edge, EdgeStatus)>,
    /// One verdict per distinct executable witness.
    pub verdicts: Vec<Verdict>,
    pub automorphism: bool,
    pub dot: String,
}

impl HierarchyReport {
    pub fn ok(&self) -> bool {
        self.automorphism && self.edges.iter().all(|(_, s)| *s != EdgeStatus::Failed)
    }
}

/// Widths total 3: one block, or the level-2 shapes `(1,1)`, `(1,2)`, `(2,1)`.
fn instances_at(level: usize) -> Result<Vec<Family>> {
    match level {
        1 => enumerate_tables(&[3]),
        _ => {
            let mut out = enumerate_tables(&[1, 1])?;
            out.extend(enumerate_tables(&[1, 2])?);
            out.extend(enumerate_tables(&[2, 1])?);
            Ok(out)
        }
    }
}

/// Circuits checked for the compiled edge.
pub const HIERARCHY_CIRCUITS: usize = 20;

fn verify_witness(registry: &Registry, w: &Witness, level: usize, seed: u64) -> Result<Option<Verdict>> {
    match w {
        Witness::RegistryOnly(_) => Ok(None),
        Witness::Rule(_) | Witness::Composition(_) => {
            let rule = registry.resolve(w).ok_or(crate::Error::UnknownRule(w.tag()))?;
            let name = format!("edge/{}/level{level}", w.tag());
            verify_rule_on(name, rule, &instances_at(level)?).map(Some)
        }
        Witness::Level0 => {
            let items: Vec<Vec<bool>> = (1..=4usize)
                .flat_map(|n| (0..1u64 << n).map(move |i| index_bits(i, n)))
                .collect();
            tally(format!("edge/{}", w.tag()), &items, |x| {
                let (v, ok) = check_pi1_to_uval(x)?;
                Ok((!ok).then(|| Counterexample {
                    replay: "check --rule pi1_to_uval".into(),
                    instance: format_bits(x),
                    expected: format!("{{{}}}", u8::from(x[0])),
                    got: v.to_string(),
                }))
            })
            .map(Some)
        }
        Witness::Compiled => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut items = Vec::new();
            for _ in 0..HIERARCHY_CIRCUITS {
                let c = random_circuit(&CircuitSpec::default(), &mut rng);
                for i in 0..1u64 << c.input_width() {
                    items.push((c.clone(), index_bits(i, c.input_width())));
                }
            }
            tally(format!("edge/{}", w.tag()), &items, |(c, a)| {
                let r = check_compiled(c, a)?;
                Ok((!r.pass()).then(|| Counterexample {
                    replay: format!("compile --check --alpha {}", format_bits(a)),
                    instance: c.to_string(),
                    expected: "UVAL₂ form with the circuit value".into(),
                    got: format!("{r:?}"),
                }))
            })
            .map(Some)
        }
    }
}

/// `true` when swapping each class with its dual maps the styled edge set
/// and the node set onto themselves.
pub fn duality_automorphism_holds(nodes: &[ClassId], edges: &[(ClassId, ClassId, EdgeStatus)]) -> bool {
    let n: BTreeSet<ClassId> = nodes.iter().copied().collect();
    let e: BTreeSet<_> = edges.iter().copied().collect();
    n.iter().all(|c| n.contains(&c.dual()))
        && e.iter().all(|&(a, b, s)| e.contains(&(a.dual(), b.dual(), s)))
}

fn render(nodes: &[ClassId], edges: &[(Edge, EdgeStatus)]) -> String {
    let mut dot = String::from("digraph hierarchy {\n  rankdir=BT;\n  node [shape=box];\n");
    for n in nodes {
        let _ = writeln!(dot, "  {} [label=\"{}\"];", n.id(), n.label());
    }
    for (e, s) in edges {
        let _ = writeln!(
            dot,
            "  {} -> {} [{}, label=\"{}\"];",
            e.from.id(),
            e.to.id(),
            s.attrs(),
            e.witness.tag()
        );
    }
    dot.push_str("}\n");
    dot
}

/// Checks every executable witness of the diagram and renders it.
pub fn verify_hierarchy(registry: &Registry, seed: u64) -> Result<HierarchyReport> {
    let edges = registry.validate()?;
    let mut cache: BTreeMap<(String, usize), Option<Verdict>> = BTreeMap::new();
    let mut styled = Vec::with_capacity(edges.len());
    for e in edges {
        let level = e.from.level().max(1);
        let key = (e.witness.tag(), level);
        if !cache.contains_key(&key) {
            let v = verify_witness(registry, &e.witness, level, seed)?;
            cache.insert(key.clone(), v);
        }
        let status = match &cache[&key] {
            None => EdgeStatus::RegistryOnly,
            Some(v) if v.ok() => EdgeStatus::Verified,
            Some(_) => EdgeStatus::Failed,
        };
        styled.push((e, status));
    }
    let nodes = diagram_nodes();
    let triples: Vec<_> = styled.iter().map(|(e, s)| (e.from, e.to, *s)).collect();
    let automorphism = duality_automorphism_holds(&nodes, &triples);
    let dot = render(&nodes, &styled);
    Ok(HierarchyReport {
        edges: styled,
        verdicts: cache.into_values().flatten().collect(),
        automorphism,
        dot,
    })
}

/// DOT text for the standard registry.
pub fn emit_hierarchy_dot() -> Result<String> {
    verify_hierarchy(&Registry::standard(), 0).map(|r| r.dot)
}
