//! S-P-O match decision between two graphs.
//!
//! Every detected relation between the graphs becomes a simple support
//! function: its score as mass on the union of the relation's witness
//! symbols, the remainder on the whole frame. The combined evidence's belief
//! in the second graph's symbol set is compared against a threshold.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use super::{dempster_combine, BeliefError, Frame, MassFunction, Subset, MAX_FRAME};
use crate::graphmodel::{SymbolId, SymbolTable};
use crate::model::Graph;
use crate::patterns::{urisequence, PatternError};
use crate::relate::{classify_pair, component_sets, relation_score, RelateError, RelationKind, ScoringConfig};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatchError {
    #[error("threshold must lie in (0, 1], got {0}")]
    InvalidThreshold(f64),
    #[error("score {0} is not representable in the chosen scalar type")]
    UnrepresentableScore(f64),
    #[error("frame of {0} symbols exceeds the maximum of {MAX_FRAME}")]
    FrameTooLarge(usize),
    #[error("total conflict between relation evidence")]
    TotalConflict,
    #[error(transparent)]
    Sequence(#[from] PatternError),
    #[error(transparent)]
    Relate(#[from] RelateError),
    #[error(transparent)]
    Belief(BeliefError),
}

impl From<BeliefError> for MatchError {
    fn from(e: BeliefError) -> Self {
        match e {
            BeliefError::TotalConflict => MatchError::TotalConflict,
            BeliefError::FrameTooLarge(n) => MatchError::FrameTooLarge(n),
            other => MatchError::Belief(other),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvidenceScope {
    /// The relation between the two whole graphs.
    Whole,
    /// The relation between the i-th triple of the first graph and the j-th
    /// triple of the second, in canonical order.
    TriplePair(usize, usize),
}

/// One scored relation, as a simple support function.
#[derive(Debug, Clone, PartialEq)]
pub struct Evidence<S> {
    pub scope: EvidenceScope,
    pub kind: RelationKind,
    pub focal: Subset,
    pub mass: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult<S> {
    pub belief: S,
    /// Symbols of the second graph.
    pub target_set: Vec<SymbolId>,
    pub threshold: S,
    pub established: bool,
    /// Conflict of the whole combination, 1 - Π(1 - K_i).
    pub conflict_k: S,
    pub frame: Frame,
    pub evidence: Vec<Evidence<S>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchView {
    pub belief: f64,
    pub threshold: f64,
    pub established: bool,
    #[serde(rename = "conflictK")]
    pub conflict_k: f64,
}

impl<S: Scalar> MatchResult<S> {
    pub fn view(&self) -> MatchView {
        let f = |v: &S| v.to_f64().unwrap_or(f64::NAN);
        MatchView {
            belief: f(&self.belief),
            threshold: f(&self.threshold),
            established: self.established,
            conflict_k: f(&self.conflict_k),
        }
    }
}

/// Left fold of Dempster's rule over the evidence, starting from the vacuous
/// mass. Returns the combined mass and the overall conflict.
pub fn combine_evidence<S: Scalar>(
    frame: &Frame,
    evidence: &[Evidence<S>],
) -> Result<(MassFunction<S>, S), BeliefError> {
    let mut combined = MassFunction::vacuous(frame.clone());
    let mut retained = S::one();
    for item in evidence {
        let support = MassFunction::simple_support(frame.clone(), item.focal, item.mass.clone())?;
        let (next, k) = dempster_combine(&combined, &support)?;
        combined = next;
        retained = retained * (S::one() - k);
    }
    Ok((combined, S::one() - retained))
}

fn scored<S: Scalar>(
    frame: &Frame,
    scope: EvidenceScope,
    kind: RelationKind,
    witnesses: BTreeSet<SymbolId>,
    scoring: &ScoringConfig,
) -> Result<Option<Evidence<S>>, MatchError> {
    let score = relation_score(kind, scoring);
    if witnesses.is_empty() || score == 0.0 {
        return Ok(None);
    }
    let mass = S::from_f64(score).ok_or(MatchError::UnrepresentableScore(score))?;
    Ok(Some(Evidence {
        scope,
        kind,
        focal: frame.subset_of(&witnesses)?,
        mass,
    }))
}

/// Decides whether the second graph's symbols are supported by the relation
/// evidence between the two graphs. Both graphs must be blank-node free and
/// interned in `table`.
pub fn match_graphs<S: Scalar>(
    g1: &Graph,
    g2: &Graph,
    table: &SymbolTable,
    scoring: &ScoringConfig,
    threshold: f64,
) -> Result<MatchResult<S>, MatchError> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(MatchError::InvalidThreshold(threshold));
    }
    let threshold_s = S::from_f64(threshold).ok_or(MatchError::InvalidThreshold(threshold))?;

    let seq1 = urisequence(g1, table)?;
    let seq2 = urisequence(g2, table)?;
    let universe: BTreeSet<SymbolId> = seq1.iter().chain(&seq2).copied().collect();
    if universe.len() > MAX_FRAME {
        return Err(MatchError::FrameTooLarge(universe.len()));
    }
    let frame = Frame::new(universe.into_iter().collect())?;
    let target: BTreeSet<SymbolId> = seq2.into_iter().collect();
    let target_subset = frame.subset_of(&target)?;

    let cs1 = component_sets(g1, table)?;
    let cs2 = component_sets(g2, table)?;
    let whole = classify_pair(&cs1, &cs2, g1, g2);
    let mut evidence = Vec::new();
    if let Some(e) = scored(
        &frame,
        EvidenceScope::Whole,
        whole.kind,
        whole.witness_symbols(),
        scoring,
    )? {
        evidence.push(e);
    }

    // With one triple on each side the triple pair is the whole-graph pair,
    // which is already counted.
    if g1.len() * g2.len() > 1 {
        let singles = |g: &Graph| -> Result<Vec<(Graph, _)>, RelateError> {
            g.canonical_triples()
                .into_iter()
                .map(|t| {
                    let single: Graph = std::iter::once(t.clone()).collect();
                    let sets = component_sets(&single, table)?;
                    Ok((single, sets))
                })
                .collect()
        };
        let left = singles(g1)?;
        let right = singles(g2)?;
        for (i, (ga, ca)) in left.iter().enumerate() {
            for (j, (gb, cb)) in right.iter().enumerate() {
                let report = classify_pair(ca, cb, ga, gb);
                if report.kind == RelationKind::Disjoint {
                    continue;
                }
                let scope = EvidenceScope::TriplePair(i, j);
                if let Some(e) = scored(&frame, scope, report.kind, report.witness_symbols(), scoring)? {
                    evidence.push(e);
                }
            }
        }
    }

    let (combined, conflict_k) = combine_evidence(&frame, &evidence)?;
    let belief = combined.belief(target_subset)?;
    let established = belief >= threshold_s;
    Ok(MatchResult {
        belief,
        target_set: target.into_iter().collect(),
        threshold: threshold_s,
        established,
        conflict_k,
        frame,
        evidence,
    })
}
