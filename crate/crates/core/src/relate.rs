//! Set-theoretic classification of the relationship between two RDF graphs.
//!
//! A graph is reduced to three symbol sets: its subjects, its predicates
//! (edge labels) and its objects. Two graphs are compared through the
//! pairwise intersections of those sets, and a rule table maps the pattern of
//! empty / non-empty intersections to a [`RelationKind`].

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphmodel::{SymbolId, SymbolTable};
use crate::model::{Graph, Term, Triple};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelateError {
    #[error("term {0} has not been interned")]
    NotInterned(String),
    #[error("graph name {0:?} is used more than once")]
    DuplicateName(String),
    #[error("at least one graph is required")]
    NoGraphs,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ComponentSets {
    pub sub: BTreeSet<SymbolId>,
    pub pred: BTreeSet<SymbolId>,
    pub obj: BTreeSet<SymbolId>,
}

fn lookup(table: &SymbolTable, term: &Term) -> Result<SymbolId, RelateError> {
    table
        .id_of(term)
        .ok_or_else(|| RelateError::NotInterned(term.to_string()))
}

pub fn component_sets(graph: &Graph, table: &SymbolTable) -> Result<ComponentSets, RelateError> {
    let mut sets = ComponentSets::default();
    for t in graph {
        sets.sub.insert(lookup(table, t.subject())?);
        sets.pred.insert(lookup(table, t.predicate())?);
        sets.obj.insert(lookup(table, t.object())?);
    }
    Ok(sets)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RelationKind {
    Identical,
    #[serde(rename = "SSPP")]
    Sspp,
    #[serde(rename = "OOPP")]
    Oopp,
    #[serde(rename = "SP_forward")]
    SpForward,
    #[serde(rename = "SP_backward")]
    SpBackward,
    WeakSS,
    WeakPP,
    WeakOO,
    Disjoint,
}

impl RelationKind {
    /// All kinds, in precedence order.
    pub const ALL: [RelationKind; 9] = [
        RelationKind::Identical,
        RelationKind::Sspp,
        RelationKind::Oopp,
        RelationKind::SpForward,
        RelationKind::SpBackward,
        RelationKind::WeakSS,
        RelationKind::WeakPP,
        RelationKind::WeakOO,
        RelationKind::Disjoint,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RelationKind::Identical => "Identical",
            RelationKind::Sspp => "SSPP",
            RelationKind::Oopp => "OOPP",
            RelationKind::SpForward => "SP_forward",
            RelationKind::SpBackward => "SP_backward",
            RelationKind::WeakSS => "WeakSS",
            RelationKind::WeakPP => "WeakPP",
            RelationKind::WeakOO => "WeakOO",
            RelationKind::Disjoint => "Disjoint",
        }
    }

    /// The kind seen from the other graph's side.
    pub fn reversed(self) -> Self {
        match self {
            RelationKind::SpForward => RelationKind::SpBackward,
            RelationKind::SpBackward => RelationKind::SpForward,
            other => other,
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RelationKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RelationKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown relation kind {s:?}"))
    }
}

/// Which component of the first graph is intersected with which component
/// of the second. `SubPred` is `sub(a) ∩ pred(b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ComponentPair {
    SubSub,
    PredPred,
    ObjObj,
    SubObj,
    ObjSub,
    SubPred,
    PredSub,
    ObjPred,
    PredObj,
}

impl ComponentPair {
    pub const ALL: [ComponentPair; 9] = [
        ComponentPair::SubSub,
        ComponentPair::PredPred,
        ComponentPair::ObjObj,
        ComponentPair::SubObj,
        ComponentPair::ObjSub,
        ComponentPair::SubPred,
        ComponentPair::PredSub,
        ComponentPair::ObjPred,
        ComponentPair::PredObj,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ComponentPair::SubSub => "sub-sub",
            ComponentPair::PredPred => "pred-pred",
            ComponentPair::ObjObj => "obj-obj",
            ComponentPair::SubObj => "sub-obj",
            ComponentPair::ObjSub => "obj-sub",
            ComponentPair::SubPred => "sub-pred",
            ComponentPair::PredSub => "pred-sub",
            ComponentPair::ObjPred => "obj-pred",
            ComponentPair::PredObj => "pred-obj",
        }
    }

    fn sides(self) -> (Component, Component) {
        use Component::*;
        match self {
            ComponentPair::SubSub => (Sub, Sub),
            ComponentPair::PredPred => (Pred, Pred),
            ComponentPair::ObjObj => (Obj, Obj),
            ComponentPair::SubObj => (Sub, Obj),
            ComponentPair::ObjSub => (Obj, Sub),
            ComponentPair::SubPred => (Sub, Pred),
            ComponentPair::PredSub => (Pred, Sub),
            ComponentPair::ObjPred => (Obj, Pred),
            ComponentPair::PredObj => (Pred, Obj),
        }
    }
}

impl fmt::Display for ComponentPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy)]
enum Component {
    Sub,
    Pred,
    Obj,
}

impl ComponentSets {
    fn get(&self, c: Component) -> &BTreeSet<SymbolId> {
        match c {
            Component::Sub => &self.sub,
            Component::Pred => &self.pred,
            Component::Obj => &self.obj,
        }
    }

    pub fn intersection(&self, other: &ComponentSets, pair: ComponentPair) -> BTreeSet<SymbolId> {
        let (left, right) = pair.sides();
        self.get(left).intersection(other.get(right)).copied().collect()
    }

    /// Every symbol in any position.
    pub fn all_symbols(&self) -> BTreeSet<SymbolId> {
        self.sub.iter().chain(&self.pred).chain(&self.obj).copied().collect()
    }
}

/// The seven intersections whose emptiness defines [`RelationKind::Disjoint`].
/// Object/predicate overlaps are only ever diagnostic.
const CLASSIFYING: [ComponentPair; 7] = [
    ComponentPair::SubSub,
    ComponentPair::PredPred,
    ComponentPair::ObjObj,
    ComponentPair::SubObj,
    ComponentPair::ObjSub,
    ComponentPair::SubPred,
    ComponentPair::PredSub,
];

struct Rule {
    kind: RelationKind,
    required: &'static [ComponentPair],
    forbidden: &'static [ComponentPair],
}

use ComponentPair as C;

/// Precedence-ordered rule table, excluding `Identical`.
const RULES: [Rule; 8] = [
    Rule {
        kind: RelationKind::Sspp,
        required: &[C::SubSub, C::PredPred],
        forbidden: &[C::ObjObj, C::SubObj, C::ObjSub],
    },
    Rule {
        kind: RelationKind::Oopp,
        required: &[C::ObjObj, C::PredPred],
        forbidden: &[C::SubSub, C::SubObj, C::ObjSub],
    },
    Rule {
        kind: RelationKind::SpForward,
        required: &[C::SubPred],
        forbidden: &[C::SubSub, C::ObjObj, C::PredPred],
    },
    Rule {
        kind: RelationKind::SpBackward,
        required: &[C::PredSub],
        forbidden: &[C::SubSub, C::ObjObj, C::PredPred],
    },
    Rule {
        kind: RelationKind::WeakSS,
        required: &[C::SubSub],
        forbidden: &[C::PredPred, C::ObjObj, C::SubObj, C::ObjSub, C::SubPred, C::PredSub],
    },
    Rule {
        kind: RelationKind::WeakPP,
        required: &[C::PredPred],
        forbidden: &[C::SubSub, C::ObjObj, C::SubObj, C::ObjSub, C::SubPred, C::PredSub],
    },
    Rule {
        kind: RelationKind::WeakOO,
        required: &[C::ObjObj],
        forbidden: &[C::SubSub, C::PredPred, C::SubObj, C::ObjSub, C::SubPred, C::PredSub],
    },
    Rule {
        kind: RelationKind::Disjoint,
        required: &[],
        forbidden: &CLASSIFYING,
    },
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub components: ComponentPair,
    pub symbols: BTreeSet<SymbolId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationReport {
    pub kind: RelationKind,
    /// Every non-empty intersection, in [`ComponentPair::ALL`] order.
    pub witnesses: Vec<Witness>,
    /// Overlaps that contradict the chosen kind, plus any object/predicate
    /// overlap.
    pub violated: Vec<ComponentPair>,
}

impl RelationReport {
    pub fn witness(&self, pair: ComponentPair) -> Option<&BTreeSet<SymbolId>> {
        self.witnesses.iter().find(|w| w.components == pair).map(|w| &w.symbols)
    }

    /// No rule matched exactly; the kind came from the relaxed pass.
    pub fn is_ambiguous(&self) -> bool {
        self.violated
            .iter()
            .any(|c| !matches!(c, ComponentPair::ObjPred | ComponentPair::PredObj))
    }

    /// Union of all witness symbol sets.
    pub fn witness_symbols(&self) -> BTreeSet<SymbolId> {
        self.witnesses.iter().flat_map(|w| w.symbols.iter().copied()).collect()
    }

    pub fn view(&self, table: &SymbolTable) -> ReportView {
        let render = |id: &SymbolId| {
            table
                .term_of(*id)
                .map(ToString::to_string)
                .unwrap_or_else(|| id.to_string())
        };
        ReportView {
            kind: self.kind,
            witnesses: self
                .witnesses
                .iter()
                .map(|w| {
                    let mut terms: Vec<String> = w.symbols.iter().map(render).collect();
                    terms.sort();
                    WitnessView {
                        components: w.components.name().to_string(),
                        terms,
                    }
                })
                .collect(),
            violated: self.violated.iter().map(|c| c.name().to_string()).collect(),
        }
    }
}

/// Serializable form of a report with terms rendered in N-Triples syntax and
/// sorted, so the output does not depend on interning order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportView {
    pub kind: RelationKind,
    pub witnesses: Vec<WitnessView>,
    pub violated: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessView {
    pub components: String,
    pub terms: Vec<String>,
}

/// Compares the subject-to-predicate witness terms of `(a, b)` against the
/// predicate-to-subject ones. `Greater` favours the forward direction.
fn sp_orientation(a: &Graph, b: &Graph) -> Ordering {
    let crossing = |x: &Graph, y: &Graph| -> BTreeSet<String> {
        let preds: BTreeSet<&Term> = y.iter().map(Triple::predicate).collect();
        x.iter()
            .map(Triple::subject)
            .filter(|t| preds.contains(t))
            .map(ToString::to_string)
            .collect()
    };
    let forward = crossing(a, b);
    let backward = crossing(b, a);
    forward.len().cmp(&backward.len()).then_with(|| forward.cmp(&backward))
}

/// Classifies the ordered pair `(a, b)`.
///
/// Rules are tried in precedence order, first requiring an exact match
/// (required overlaps present, forbidden overlaps absent). If nothing matches
/// exactly, the first rule whose required overlaps are present is taken and
/// the offending overlaps are listed in `violated`.
///
/// When subjects of each graph appear as predicates of the other, only one SP
/// direction is eligible: the one whose witness terms are more numerous, or
/// on a tie compare greater in N-Triples order. Swapping the arguments swaps
/// the witnesses, so the chosen kind is reversed with them.
pub fn classify_pair(a: &ComponentSets, b: &ComponentSets, a_triples: &Graph, b_triples: &Graph) -> RelationReport {
    let overlaps: BTreeMap<ComponentPair, BTreeSet<SymbolId>> = ComponentPair::ALL
        .into_iter()
        .map(|pair| (pair, a.intersection(b, pair)))
        .filter(|(_, s)| !s.is_empty())
        .collect();
    let witnesses = overlaps
        .iter()
        .map(|(&components, symbols)| Witness {
            components,
            symbols: symbols.clone(),
        })
        .collect();

    if a_triples == b_triples {
        return RelationReport {
            kind: RelationKind::Identical,
            witnesses,
            violated: Vec::new(),
        };
    }

    let present = |c: &ComponentPair| overlaps.contains_key(c);
    let excluded: &[RelationKind] = if present(&C::SubPred) && present(&C::PredSub) {
        match sp_orientation(a_triples, b_triples) {
            Ordering::Greater => &[RelationKind::SpBackward],
            Ordering::Less => &[RelationKind::SpForward],
            Ordering::Equal => &[RelationKind::SpForward, RelationKind::SpBackward],
        }
    } else {
        &[]
    };
    let eligible = |r: &&Rule| !excluded.contains(&r.kind);

    let rule = RULES
        .iter()
        .filter(eligible)
        .find(|r| r.required.iter().all(present) && !r.forbidden.iter().any(present))
        .or_else(|| RULES.iter().filter(eligible).find(|r| r.required.iter().all(present)))
        .expect("the Disjoint rule requires nothing");

    let mut violated: Vec<ComponentPair> = rule.forbidden.iter().copied().filter(|c| present(c)).collect();
    for diag in [C::ObjPred, C::PredObj] {
        if present(&diag) {
            violated.push(diag);
        }
    }
    violated.sort();

    RelationReport {
        kind: rule.kind,
        witnesses,
        violated,
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid scoring JSON")]
    Json(#[from] serde_json::Error),
    #[error("unknown relation kind {0:?} in scoring config")]
    UnknownKind(String),
    #[error("score for {kind} must be within [0, 1], got {value}")]
    OutOfRange { kind: RelationKind, value: f64 },
}

/// Score assigned to each relation kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoringConfig {
    scores: [f64; 9],
}

impl Default for ScoringConfig {
    fn default() -> Self {
        let mut scores = [0.0; 9];
        for kind in RelationKind::ALL {
            scores[kind.index()] = match kind {
                RelationKind::Identical => 1.0,
                RelationKind::Sspp | RelationKind::Oopp => 0.9,
                RelationKind::SpForward | RelationKind::SpBackward => 0.6,
                RelationKind::WeakSS | RelationKind::WeakPP | RelationKind::WeakOO => 0.2,
                RelationKind::Disjoint => 0.0,
            };
        }
        ScoringConfig { scores }
    }
}

impl ScoringConfig {
    /// Reads a JSON object mapping kind names to scores. Missing kinds keep
    /// their default.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let raw: BTreeMap<String, f64> = serde_json::from_str(text)?;
        let mut config = ScoringConfig::default();
        for (name, value) in raw {
            let kind: RelationKind = name.parse().map_err(|_| ConfigError::UnknownKind(name.clone()))?;
            config.set(kind, value)?;
        }
        Ok(config)
    }

    pub fn set(&mut self, kind: RelationKind, value: f64) -> Result<(), ConfigError> {
        if !(0.0..=1.0).contains(&value) {
            return Err(ConfigError::OutOfRange { kind, value });
        }
        self.scores[kind.index()] = value;
        Ok(())
    }

    pub fn score(&self, kind: RelationKind) -> f64 {
        self.scores[kind.index()]
    }
}

pub fn relation_score(kind: RelationKind, config: &ScoringConfig) -> f64 {
    config.score(kind)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkEdge {
    pub from: String,
    pub to: String,
    pub report: RelationReport,
    pub score: f64,
}

/// Network of pairwise relations over a named corpus of graphs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinkGraph {
    /// Sorted graph names.
    pub nodes: Vec<String>,
    /// Sorted by `(from, to)`; at most one edge per ordered pair.
    pub edges: Vec<LinkEdge>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkGraphView {
    pub nodes: Vec<String>,
    pub edges: Vec<LinkEdgeView>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkEdgeView {
    pub from: String,
    pub to: String,
    pub kind: RelationKind,
    pub score: f64,
}

impl LinkGraph {
    pub fn view(&self) -> LinkGraphView {
        LinkGraphView {
            nodes: self.nodes.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| LinkEdgeView {
                    from: e.from.clone(),
                    to: e.to.clone(),
                    kind: e.report.kind,
                    score: e.score,
                })
                .collect(),
        }
    }

    pub fn edge(&self, from: &str, to: &str) -> Option<&LinkEdge> {
        self.edges.iter().find(|e| e.from == from && e.to == to)
    }

    /// Graphviz rendering: relation kind as edge label, score as edge weight.
    pub fn to_dot(&self) -> String {
        let quote = |s: &str| format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""));
        let mut out = String::from("digraph links {\n");
        for node in &self.nodes {
            out.push_str(&format!("  {};\n", quote(node)));
        }
        for e in &self.edges {
            out.push_str(&format!(
                "  {} -> {} [label=\"{}\", weight={}];\n",
                quote(&e.from),
                quote(&e.to),
                e.report.kind,
                e.score
            ));
        }
        out.push_str("}\n");
        out
    }
}

/// Classifies every ordered pair of distinct graphs and keeps the
/// non-disjoint ones. All terms must already be interned in `table`.
pub fn relate_all(
    graphs: &[(String, Graph)],
    table: &SymbolTable,
    config: &ScoringConfig,
) -> Result<LinkGraph, RelateError> {
    if graphs.is_empty() {
        return Err(RelateError::NoGraphs);
    }
    let mut named: Vec<(&str, &Graph, ComponentSets)> = Vec::with_capacity(graphs.len());
    for (name, g) in graphs {
        named.push((name.as_str(), g, component_sets(g, table)?));
    }
    named.sort_by(|a, b| a.0.cmp(b.0));
    if let Some(w) = named.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(RelateError::DuplicateName(w[0].0.to_string()));
    }

    let pairs: Vec<(usize, usize)> = (0..named.len())
        .flat_map(|i| (0..named.len()).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let mut edges: Vec<LinkEdge> = pairs
        .par_iter()
        .filter_map(|&(i, j)| {
            let (from, ga, ca) = &named[i];
            let (to, gb, cb) = &named[j];
            let report = classify_pair(ca, cb, ga, gb);
            (report.kind != RelationKind::Disjoint).then(|| LinkEdge {
                from: from.to_string(),
                to: to.to_string(),
                score: relation_score(report.kind, config),
                report,
            })
        })
        .collect();
    edges.sort_by(|a, b| (&a.from, &a.to).cmp(&(&b.from, &b.to)));

    Ok(LinkGraph {
        nodes: named.iter().map(|n| n.0.to_string()).collect(),
        edges,
    })
}
