//! Term interning, blank node skolemization and the projection of a graph
//! onto a directed, node- and edge-labeled multigraph.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{is_valid_iri, Graph, Iri, Term};

/// Dense identifier of an interned term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SymbolId(pub u32);

impl SymbolId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for SymbolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Bijection between distinct terms and dense [`SymbolId`]s.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolTable {
    terms: Vec<Term>,
    ids: HashMap<Term, SymbolId>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, term: &Term) -> SymbolId {
        if let Some(&id) = self.ids.get(term) {
            return id;
        }
        let id = SymbolId(u32::try_from(self.terms.len()).expect("symbol table overflow"));
        self.terms.push(term.clone());
        self.ids.insert(term.clone(), id);
        id
    }

    pub fn intern_graph(&mut self, graph: &Graph) {
        for term in graph.terms() {
            self.intern(term);
        }
    }

    pub fn id_of(&self, term: &Term) -> Option<SymbolId> {
        self.ids.get(term).copied()
    }

    pub fn term_of(&self, id: SymbolId) -> Option<&Term> {
        self.terms.get(id.index())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in id order.
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Rebuilds a table from terms listed in id order. Fails on the first duplicate.
    pub fn from_terms(terms: Vec<Term>) -> Result<Self, Term> {
        let mut table = SymbolTable::new();
        for term in terms {
            if table.id_of(&term).is_some() {
                return Err(term);
            }
            table.intern(&term);
        }
        Ok(table)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SkolemError {
    #[error("skolem scheme {0:?} must be a valid IRI prefix ending in '/' or '#'")]
    InvalidScheme(String),
    #[error("skolem IRI {0:?} already occurs in the graph")]
    Collision(String),
}

/// Replaces every blank node `_:L` with the IRI `scheme + L`.
pub fn reify_blank_nodes(graph: &Graph, scheme: &str) -> Result<Graph, SkolemError> {
    if !is_valid_iri(scheme) || !(scheme.ends_with('/') || scheme.ends_with('#')) {
        return Err(SkolemError::InvalidScheme(scheme.to_string()));
    }
    let mut replacements: HashMap<&Term, Term> = HashMap::new();
    for term in graph.terms().filter(|t| t.is_blank()) {
        if replacements.contains_key(term) {
            continue;
        }
        let iri = format!("{scheme}{}", term.lexical());
        let skolem = Term::Iri(Iri::new(iri).expect("scheme and label are valid IRI text"));
        replacements.insert(term, skolem);
    }
    if replacements.is_empty() {
        return Ok(graph.clone());
    }
    for skolem in replacements.values() {
        if graph.terms().any(|t| t == skolem) {
            return Err(SkolemError::Collision(skolem.lexical().to_string()));
        }
    }
    Ok(graph
        .iter()
        .map(|t| t.map_terms(|term| replacements.get(term).cloned().unwrap_or_else(|| term.clone())))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

/// Node label: the lexical form, plus the datatype identifier for typed literals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NodeLabel {
    pub lexical: String,
    pub datatype: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub term: Term,
    pub label: NodeLabel,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub source: NodeId,
    pub target: NodeId,
    pub label: Term,
}

/// Directed multigraph with labeled nodes and edges. Parallel edges and loops
/// are kept.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabeledMultigraph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    index: HashMap<Term, NodeId>,
}

impl LabeledMultigraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &Node)> + '_ {
        self.nodes.iter().enumerate().map(|(i, n)| (NodeId(i), n))
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, &Edge)> + '_ {
        self.edges.iter().enumerate().map(|(i, e)| (EdgeId(i), e))
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0]
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id.0]
    }

    pub fn node_of(&self, term: &Term) -> Option<NodeId> {
        self.index.get(term).copied()
    }

    pub fn node_label(&self, id: NodeId) -> &NodeLabel {
        &self.nodes[id.0].label
    }

    pub fn edge_label(&self, id: EdgeId) -> &Term {
        &self.edges[id.0].label
    }

    pub fn source(&self, id: EdgeId) -> NodeId {
        self.edges[id.0].source
    }

    pub fn target(&self, id: EdgeId) -> NodeId {
        self.edges[id.0].target
    }

    fn node_for(&mut self, term: &Term) -> NodeId {
        if let Some(&id) = self.index.get(term) {
            return id;
        }
        let datatype = match term {
            Term::Literal(l) => l.datatype().map(|dt| dt.as_str().to_string()),
            _ => None,
        };
        let id = NodeId(self.nodes.len());
        self.nodes.push(Node {
            term: term.clone(),
            label: NodeLabel {
                lexical: term.lexical().to_string(),
                datatype,
            },
        });
        self.index.insert(term.clone(), id);
        id
    }
}

/// One node per subject or object term, one edge per triple labeled with its
/// predicate. Terms that only occur as predicates get no node.
pub fn project_multigraph(graph: &Graph) -> LabeledMultigraph {
    let mut mg = LabeledMultigraph::default();
    for triple in graph {
        let source = mg.node_for(triple.subject());
        let target = mg.node_for(triple.object());
        mg.edges.push(Edge {
            source,
            target,
            label: triple.predicate().clone(),
        });
    }
    mg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Triple;
    use crate::ntriples::parse_document;

    const TABLE_ONE: &str = r#"<http://www.w3.org/2001/sw/RDFCore/ntriples/> <http://purl.org/dc/elements/1.1/creator> "Dave Beckett" .
<http://www.w3.org/2001/sw/RDFCore/ntriples/> <http://purl.org/dc/elements/1.1/creator> "Art Barstow" .
<http://www.w3.org/2001/sw/RDFCore/ntriples/> <http://purl.org/dc/elements/1.1/publisher> <http://www.w3.org/> .
"#;

    const JOHN: &str = r#"<http://ex.org/John> <http://ex.org/knows> _:p1 .
_:p1 <http://ex.org/bornOn> "21st of April" .
"#;

    #[test]
    fn interning_is_stable_and_dense() {
        let mut table = SymbolTable::new();
        let a = Term::iri("http://ex.org/a").unwrap();
        assert_eq!(table.intern(&a), SymbolId(0));
        assert_eq!(table.intern(&a), SymbolId(0));
        assert_eq!(table.intern(&Term::literal("http://ex.org/a")), SymbolId(1));
        assert_eq!(table.term_of(SymbolId(0)), Some(&a));
        assert_eq!(table.term_of(SymbolId(5)), None);
    }

    #[test]
    fn table_one_has_six_distinct_terms() {
        let g = parse_document(TABLE_ONE).unwrap();
        let mut table = SymbolTable::new();
        let ids: Vec<SymbolId> = g.terms().map(|t| table.intern(t)).collect();
        assert_eq!(ids.len(), 9);
        assert_eq!(table.len(), 6);
    }

    #[test]
    fn from_terms_rejects_duplicates() {
        let a = Term::iri("a").unwrap();
        assert!(SymbolTable::from_terms(vec![a.clone(), Term::literal("a")]).is_ok());
        assert_eq!(SymbolTable::from_terms(vec![a.clone(), a.clone()]), Err(a));
    }

    #[test]
    fn reify_john_example() {
        let g = parse_document(JOHN).unwrap();
        let r = reify_blank_nodes(&g, "http://skolem.example/").unwrap();
        assert_eq!(r.len(), 2);
        assert!(!r.has_blank_nodes());
        let skolem = Term::iri("http://skolem.example/p1").unwrap();
        assert!(r.iter().any(|t| t.object() == &skolem));
        assert!(r.iter().any(|t| t.subject() == &skolem));
    }

    #[test]
    fn reify_identity_and_injectivity() {
        let g = parse_document(TABLE_ONE).unwrap();
        assert_eq!(reify_blank_nodes(&g, "http://s/").unwrap(), g);

        let g = parse_document("_:a <http://p> _:b .\n").unwrap();
        let r = reify_blank_nodes(&g, "http://s/#").unwrap();
        let t = r.iter().next().unwrap();
        assert_ne!(t.subject(), t.object());
    }

    #[test]
    fn reify_errors() {
        let g = parse_document("_:a <http://p> <http://s/a> .\n").unwrap();
        assert_eq!(
            reify_blank_nodes(&g, "http://s/"),
            Err(SkolemError::Collision("http://s/a".into()))
        );
        assert!(matches!(
            reify_blank_nodes(&g, "http://s"),
            Err(SkolemError::InvalidScheme(_))
        ));
        assert!(matches!(
            reify_blank_nodes(&g, "http://a b/"),
            Err(SkolemError::InvalidScheme(_))
        ));
    }

    #[test]
    fn project_table_one() {
        let g = parse_document(TABLE_ONE).unwrap();
        let mg = project_multigraph(&g);
        assert_eq!(mg.node_count(), 4);
        assert_eq!(mg.edge_count(), 3);
        let creator = Term::iri("http://purl.org/dc/elements/1.1/creator").unwrap();
        let creators: Vec<EdgeId> = mg
            .edges()
            .filter(|(_, e)| e.label == creator)
            .map(|(id, _)| id)
            .collect();
        assert_eq!(creators.len(), 2);
        assert_eq!(mg.source(creators[0]), mg.source(creators[1]));
        assert_ne!(mg.target(creators[0]), mg.target(creators[1]));
        // predicate-only terms get no node
        assert!(mg.node_of(&creator).is_none());
    }

    #[test]
    fn project_empty_and_loop() {
        assert_eq!(project_multigraph(&Graph::new()).node_count(), 0);
        let s = Term::iri("http://s").unwrap();
        let p = Term::iri("http://p").unwrap();
        let g: Graph = [Triple::new(s.clone(), p.clone(), s.clone()).unwrap()]
            .into_iter()
            .collect();
        let mg = project_multigraph(&g);
        assert_eq!(mg.node_count(), 1);
        assert_eq!(mg.edge_count(), 1);
        let (e, edge) = mg.edges().next().unwrap();
        assert_eq!(mg.source(e), mg.target(e));
        assert_eq!(edge.label, p);
    }

    #[test]
    fn literal_labels_carry_datatype() {
        let g = parse_document(
            "<http://s> <http://p> \"4\"^^<http://www.w3.org/2001/XMLSchema#int> .\n<http://s> <http://q> \"x\" .\n",
        )
        .unwrap();
        let mg = project_multigraph(&g);
        let labels: Vec<&NodeLabel> = mg.nodes().map(|(_, n)| &n.label).collect();
        assert!(labels.contains(&&NodeLabel {
            lexical: "4".into(),
            datatype: Some("http://www.w3.org/2001/XMLSchema#int".into())
        }));
        assert!(labels.contains(&&NodeLabel {
            lexical: "x".into(),
            datatype: None
        }));
    }
}
