//! Adaptive mining of relational patterns over a growing store of symbol
//! sequences.
//!
//! Each session appends one sequence (the URISequence of a graph) to the
//! store and searches window lengths `x` in `[K1, K2]` for the most repeated
//! contiguous window. The length minimizing `λ = r / x` wins, and its length
//! becomes the next session's lower bound `K1`.

use std::collections::HashMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphmodel::{SymbolId, SymbolTable};
use crate::model::{Graph, Term};
use crate::ntriples::parse_term;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("graph contains blank nodes; skolemize it first")]
    BlankNodePresent,
    #[error("term {0} has not been interned")]
    NotInterned(String),
    #[error("window length must be at least 1")]
    ZeroLength,
    #[error("no stored sequence has a window of length {0}")]
    NoWindow(usize),
    #[error("invalid bounds K1 = {k1}, K2 = {k2}")]
    InvalidBounds { k1: usize, k2: usize },
    #[error("no window length in [{k1}, {k2}] admits a window")]
    EmptyRange { k1: usize, k2: usize },
    #[error("the session graph is empty")]
    EmptySequence,
    #[error("store has {0} sessions but no session state")]
    MissingState(usize),
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("malformed store JSON")]
    Json(#[from] serde_json::Error),
    #[error("corrupt store: {0}")]
    Corrupt(String),
}

fn corrupt(msg: impl Into<String>) -> StoreError {
    StoreError::Corrupt(msg.into())
}

/// Encodes a graph as the flattened `[s, p, o, s, p, o, ...]` symbols of its
/// triples in canonical line order. The graph must be blank-node free and
/// fully interned.
pub fn urisequence(graph: &Graph, table: &SymbolTable) -> Result<Vec<SymbolId>, PatternError> {
    if graph.has_blank_nodes() {
        return Err(PatternError::BlankNodePresent);
    }
    let lookup = |t: &Term| table.id_of(t).ok_or_else(|| PatternError::NotInterned(t.to_string()));
    let mut out = Vec::with_capacity(graph.len() * 3);
    for triple in graph.canonical_triples() {
        for term in triple.terms() {
            out.push(lookup(term)?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationalSequence {
    pub session: usize,
    pub source: String,
    pub symbols: Vec<SymbolId>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern {
    symbols: Vec<SymbolId>,
    count: u64,
}

impl Pattern {
    pub fn new(symbols: Vec<SymbolId>, count: u64) -> Self {
        assert!(
            !symbols.is_empty() && count >= 1,
            "a pattern is a non-empty window seen at least once"
        );
        Pattern { symbols, count }
    }

    pub fn symbols(&self) -> &[SymbolId] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Number of occurrences, r.
    pub fn count(&self) -> u64 {
        self.count
    }

    /// λ = r / x.
    pub fn lambda(&self) -> Ratio<u64> {
        Ratio::new(self.count, self.symbols.len() as u64)
    }
}

/// Patterns sharing one length and one occurrence count, in lexicographic
/// order of their symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternSet {
    patterns: Vec<Pattern>,
}

impl PatternSet {
    fn new(mut patterns: Vec<Pattern>) -> Self {
        assert!(!patterns.is_empty());
        patterns.sort();
        debug_assert!(patterns
            .windows(2)
            .all(|w| w[0].len() == w[1].len() && w[0].count == w[1].count));
        PatternSet { patterns }
    }

    /// The lexicographically smallest member.
    pub fn representative(&self) -> &Pattern {
        &self.patterns[0]
    }

    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    /// k, the number of patterns.
    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn pattern_length(&self) -> usize {
        self.patterns[0].len()
    }

    pub fn count(&self) -> u64 {
        self.patterns[0].count
    }
}

/// Adaptive bounds carried between sessions. `r / x` is the λ of the last
/// selected pattern and `x` its length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionState {
    #[serde(rename = "K1")]
    pub k1: usize,
    #[serde(rename = "K2")]
    pub k2: usize,
    pub r: u64,
    pub x: usize,
}

impl SessionState {
    /// Bounds for a search; λ fields are filled in by the search.
    pub fn bounds(k1: usize, k2: usize) -> Self {
        SessionState { k1, k2, r: 0, x: 0 }
    }

    pub fn lambda(&self) -> Option<Ratio<u64>> {
        (self.x > 0).then(|| Ratio::new(self.r, self.x as u64))
    }

    pub fn last_pattern_length(&self) -> usize {
        self.x
    }
}

/// Outcome of one completed session.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionRecord {
    pub session: usize,
    pub pattern: Pattern,
    /// Bounds the session searched.
    pub k1: usize,
    pub k2: usize,
}

/// The sequence storage and the patterns mined so far, one per session.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SequenceStore {
    sequences: Vec<RelationalSequence>,
    records: Vec<SessionRecord>,
}

impl SequenceStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// A store of bare sequences, numbered as sessions 0, 1, ...
    pub fn from_sequences<I, V>(sequences: I) -> Self
    where
        I: IntoIterator<Item = V>,
        V: Into<Vec<SymbolId>>,
    {
        let sequences = sequences
            .into_iter()
            .enumerate()
            .map(|(session, s)| RelationalSequence {
                session,
                source: String::new(),
                symbols: s.into(),
            })
            .collect();
        SequenceStore {
            sequences,
            records: Vec::new(),
        }
    }

    pub fn sequences(&self) -> &[RelationalSequence] {
        &self.sequences
    }

    pub fn records(&self) -> &[SessionRecord] {
        &self.records
    }

    pub fn total_symbols(&self) -> usize {
        self.sequences.iter().map(|s| s.symbols.len()).sum()
    }

    fn prefix(&self, sessions: usize) -> SequenceStore {
        SequenceStore {
            sequences: self.sequences[..sessions].to_vec(),
            records: Vec::new(),
        }
    }
}

/// Equivalence classes of all windows of the current width.
///
/// Classes at width `w + 1` are derived from the class of the width-`w`
/// prefix and the following symbol, so widening costs one hash lookup per
/// window instead of hashing the whole window.
struct WindowClasses<'a> {
    sequences: Vec<&'a [SymbolId]>,
    width: usize,
    classes: Vec<Vec<u32>>,
    class_count: usize,
}

struct Tally {
    max_count: u64,
    /// (sequence, offset) of one occurrence of each class achieving `max_count`.
    winners: Vec<(usize, usize)>,
}

impl<'a> WindowClasses<'a> {
    fn new(store: &'a SequenceStore) -> Self {
        let sequences: Vec<&[SymbolId]> = store.sequences.iter().map(|s| s.symbols.as_slice()).collect();
        let mut ids: HashMap<SymbolId, u32> = HashMap::new();
        let classes = sequences
            .iter()
            .map(|seq| {
                seq.iter()
                    .map(|sym| {
                        let next = ids.len() as u32;
                        *ids.entry(*sym).or_insert(next)
                    })
                    .collect()
            })
            .collect();
        WindowClasses {
            sequences,
            width: 1,
            classes,
            class_count: ids.len(),
        }
    }

    fn has_windows(&self) -> bool {
        self.classes.iter().any(|c| !c.is_empty())
    }

    fn widen(&mut self) {
        let windows: usize = self.classes.iter().map(Vec::len).sum();
        if windows == self.class_count {
            // All windows are distinct, so their extensions are too and the
            // existing ids stay valid.
            self.classes
                .iter_mut()
                .for_each(|c| c.truncate(c.len().saturating_sub(1)));
            self.width += 1;
            return;
        }
        let mut ids: HashMap<(u32, SymbolId), u32> = HashMap::new();
        let width = self.width;
        for (seq, classes) in self.sequences.iter().zip(self.classes.iter_mut()) {
            if classes.is_empty() {
                continue;
            }
            let next_len = classes.len() - 1;
            for i in 0..next_len {
                let key = (classes[i], seq[i + width]);
                let next = ids.len() as u32;
                classes[i] = *ids.entry(key).or_insert(next);
            }
            classes.truncate(next_len);
        }
        self.width += 1;
        self.class_count = ids.len();
    }

    fn widen_to(&mut self, width: usize) {
        while self.width < width && self.has_windows() {
            self.widen();
        }
    }

    fn tally(&self) -> Option<Tally> {
        if !self.has_windows() {
            return None;
        }
        let mut counts = vec![0u64; self.class_count];
        let mut first = vec![(usize::MAX, 0usize); self.class_count];
        for (s, classes) in self.classes.iter().enumerate() {
            for (i, &c) in classes.iter().enumerate() {
                let c = c as usize;
                if counts[c] == 0 {
                    first[c] = (s, i);
                }
                counts[c] += 1;
            }
        }
        let max_count = counts.iter().copied().max().unwrap_or(0);
        let winners = counts
            .iter()
            .zip(&first)
            .filter(|(&n, _)| n == max_count)
            .map(|(_, &pos)| pos)
            .collect();
        Some(Tally { max_count, winners })
    }

    fn pattern_set(&self, tally: &Tally) -> PatternSet {
        patterns_at(&self.sequences, self.width, tally)
    }
}

fn patterns_at(sequences: &[&[SymbolId]], width: usize, tally: &Tally) -> PatternSet {
    PatternSet::new(
        tally
            .winners
            .iter()
            .map(|&(s, i)| Pattern::new(sequences[s][i..i + width].to_vec(), tally.max_count))
            .collect(),
    )
}

/// Most repeated window of length `x` across every stored sequence,
/// counting overlapping occurrences. Ties go to the lexicographically
/// smallest window; the returned set holds all tied windows.
pub fn gen_relative_repetitive_seq(store: &SequenceStore, x: usize) -> Result<(Pattern, PatternSet), PatternError> {
    if x == 0 {
        return Err(PatternError::ZeroLength);
    }
    let mut classes = WindowClasses::new(store);
    classes.widen_to(x);
    let tally = classes
        .tally()
        .filter(|_| classes.width == x)
        .ok_or(PatternError::NoWindow(x))?;
    let set = classes.pattern_set(&tally);
    Ok((set.representative().clone(), set))
}

/// Searches every window length in `[state.k1, state.k2]` and selects the
/// length with the smallest λ = r/x, preferring the larger length on ties.
/// The returned state has `K1 = x*` and records `(r, x*)`.
pub fn gen_relational_pattern(
    store: &SequenceStore,
    state: &SessionState,
) -> Result<(PatternSet, SessionState), PatternError> {
    let (k1, k2) = (state.k1, state.k2);
    if k1 == 0 || k1 > k2 {
        return Err(PatternError::InvalidBounds { k1, k2 });
    }
    let mut classes = WindowClasses::new(store);
    classes.widen_to(k1);

    let mut best: Option<(usize, Tally)> = None;
    for x in k1..=k2 {
        if classes.width != x {
            break;
        }
        let Some(tally) = classes.tally() else { break };
        let better = match &best {
            None => true,
            // λ_x ≤ λ_min  <=>  r_x · x_min ≤ r_min · x
            Some((bx, bt)) => tally.max_count as u128 * *bx as u128 <= bt.max_count as u128 * x as u128,
        };
        if better {
            best = Some((x, tally));
        }
        if x < k2 {
            classes.widen();
        }
    }

    let (x_star, tally) = best.ok_or(PatternError::EmptyRange { k1, k2 })?;
    let set = patterns_at(&classes.sequences, x_star, &tally);
    let next = SessionState {
        k1: x_star,
        k2,
        r: tally.max_count,
        x: x_star,
    };
    Ok((set, next))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionOutcome {
    pub store: SequenceStore,
    pub state: SessionState,
    pub patterns: PatternSet,
}

/// Runs one mining session: appends the graph's URISequence as `S^t`, sets
/// `K2 = |S^t|` and `K1 = 1` for the first session or the previous pattern
/// length clamped to `[1, K2]` otherwise, and mines the session pattern.
pub fn run_session(
    store: &SequenceStore,
    state: Option<&SessionState>,
    graph: &Graph,
    table: &mut SymbolTable,
    source: &str,
) -> Result<SessionOutcome, PatternError> {
    if graph.has_blank_nodes() {
        return Err(PatternError::BlankNodePresent);
    }
    table.intern_graph(graph);
    let symbols = urisequence(graph, table)?;
    if symbols.is_empty() {
        return Err(PatternError::EmptySequence);
    }
    let t = store.sequences.len();
    let k2 = symbols.len();
    let k1 = if t == 0 {
        1
    } else {
        let prev = state.ok_or(PatternError::MissingState(t))?;
        prev.last_pattern_length().clamp(1, k2)
    };

    let mut next = store.clone();
    next.sequences.push(RelationalSequence {
        session: t,
        source: source.to_string(),
        symbols,
    });
    let (patterns, new_state) = gen_relational_pattern(&next, &SessionState::bounds(k1, k2))?;
    next.records.push(SessionRecord {
        session: t,
        pattern: patterns.representative().clone(),
        k1,
        k2,
    });
    Ok(SessionOutcome {
        store: next,
        state: new_state,
        patterns,
    })
}

/// Counts (overlapping) occurrences of `needle` in every sequence.
fn occurrences(sequences: &[RelationalSequence], needle: &[SymbolId]) -> u64 {
    sequences
        .iter()
        .map(|s| s.symbols.windows(needle.len()).filter(|w| *w == needle).count() as u64)
        .sum()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SequenceRecord {
    t: usize,
    source: String,
    symbols: Vec<u32>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatternRecord {
    t: usize,
    symbols: Vec<u32>,
    r: u64,
    x: usize,
    #[serde(rename = "K1")]
    k1: usize,
    #[serde(rename = "K2")]
    k2: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StoreFile {
    symbols: Vec<String>,
    sequences: Vec<SequenceRecord>,
    patterns: Vec<PatternRecord>,
    state: Option<SessionState>,
}

/// A sequence store together with its symbol table and session state: the
/// unit that is persisted between mining runs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MiningStore {
    pub table: SymbolTable,
    pub store: SequenceStore,
    pub state: Option<SessionState>,
}

impl MiningStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn sessions(&self) -> usize {
        self.store.sequences.len()
    }

    pub fn run_session(&mut self, graph: &Graph, source: &str) -> Result<PatternSet, PatternError> {
        let outcome = run_session(&self.store, self.state.as_ref(), graph, &mut self.table, source)?;
        self.store = outcome.store;
        self.state = Some(outcome.state);
        Ok(outcome.patterns)
    }

    pub fn to_json(&self) -> String {
        let ids = |v: &[SymbolId]| v.iter().map(|s| s.0).collect();
        let file = StoreFile {
            symbols: self.table.terms().iter().map(ToString::to_string).collect(),
            sequences: self
                .store
                .sequences
                .iter()
                .map(|s| SequenceRecord {
                    t: s.session,
                    source: s.source.clone(),
                    symbols: ids(&s.symbols),
                })
                .collect(),
            patterns: self
                .store
                .records
                .iter()
                .map(|r| PatternRecord {
                    t: r.session,
                    symbols: ids(r.pattern.symbols()),
                    r: r.pattern.count(),
                    x: r.pattern.len(),
                    k1: r.k1,
                    k2: r.k2,
                })
                .collect(),
            state: self.state,
        };
        let mut out = serde_json::to_string_pretty(&file).expect("store serializes");
        out.push('\n');
        out
    }

    /// Parses and validates a persisted store.
    pub fn from_json(text: &str) -> Result<Self, StoreError> {
        let file: StoreFile = serde_json::from_str(text)?;

        let mut terms = Vec::with_capacity(file.symbols.len());
        for (i, s) in file.symbols.iter().enumerate() {
            terms.push(parse_term(s).map_err(|e| corrupt(format!("symbol {i}: {e}")))?);
        }
        let table = SymbolTable::from_terms(terms).map_err(|t| corrupt(format!("duplicate symbol {t}")))?;
        let symbol = |id: u32| -> Result<SymbolId, StoreError> {
            if (id as usize) < table.len() {
                Ok(SymbolId(id))
            } else {
                Err(corrupt(format!("symbol id {id} out of range")))
            }
        };

        let mut sequences = Vec::with_capacity(file.sequences.len());
        for (i, rec) in file.sequences.into_iter().enumerate() {
            if rec.t != i {
                return Err(corrupt(format!("sequence {i} has session index {}", rec.t)));
            }
            if rec.symbols.is_empty() {
                return Err(corrupt(format!("sequence {i} is empty")));
            }
            sequences.push(RelationalSequence {
                session: i,
                source: rec.source,
                symbols: rec.symbols.into_iter().map(symbol).collect::<Result<_, _>>()?,
            });
        }

        if file.patterns.len() != sequences.len() {
            return Err(corrupt(format!(
                "{} sequences but {} patterns",
                sequences.len(),
                file.patterns.len()
            )));
        }
        let mut records: Vec<SessionRecord> = Vec::with_capacity(sequences.len());
        for (t, rec) in file.patterns.into_iter().enumerate() {
            if rec.t != t {
                return Err(corrupt(format!("pattern {t} has session index {}", rec.t)));
            }
            if rec.symbols.is_empty() || rec.x != rec.symbols.len() || rec.r == 0 {
                return Err(corrupt(format!(
                    "pattern {t}: x must equal its length and r must be positive"
                )));
            }
            let k2 = sequences[t].symbols.len();
            if rec.k2 != k2 {
                return Err(corrupt(format!("session {t}: K2 = {} but |S^t| = {k2}", rec.k2)));
            }
            let expected_k1 = match records.last() {
                None => 1,
                Some(prev) => prev.pattern.len().min(k2),
            };
            if rec.k1 != expected_k1 {
                return Err(corrupt(format!(
                    "session {t}: K1 = {} but expected {expected_k1}",
                    rec.k1
                )));
            }
            if rec.x < rec.k1 || rec.x > rec.k2 {
                return Err(corrupt(format!(
                    "session {t}: pattern length {} outside [K1, K2]",
                    rec.x
                )));
            }
            let symbols: Vec<SymbolId> = rec.symbols.into_iter().map(symbol).collect::<Result<_, _>>()?;
            let seen = occurrences(&sequences[..=t], &symbols);
            if seen != rec.r {
                return Err(corrupt(format!(
                    "session {t}: pattern occurs {seen} times, recorded r = {}",
                    rec.r
                )));
            }
            records.push(SessionRecord {
                session: t,
                pattern: Pattern::new(symbols, rec.r),
                k1: rec.k1,
                k2: rec.k2,
            });
        }

        match (records.last(), &file.state) {
            (None, None) => {}
            (None, Some(_)) => return Err(corrupt("session state present in an empty store")),
            (Some(_), None) => return Err(corrupt("session state missing")),
            (Some(last), Some(state)) => {
                let expected = SessionState {
                    k1: last.pattern.len(),
                    k2: last.k2,
                    r: last.pattern.count(),
                    x: last.pattern.len(),
                };
                if *state != expected {
                    return Err(corrupt(format!(
                        "session state {state:?} disagrees with the last pattern"
                    )));
                }
            }
        }

        Ok(MiningStore {
            table,
            store: SequenceStore { sequences, records },
            state: file.state,
        })
    }

    /// Re-mines every session from scratch and checks that the recorded
    /// patterns are reproduced.
    pub fn verify_replay(&self) -> Result<(), StoreError> {
        for (t, rec) in self.store.records.iter().enumerate() {
            let prefix = self.store.prefix(t + 1);
            let (set, _) = gen_relational_pattern(&prefix, &SessionState::bounds(rec.k1, rec.k2))
                .map_err(|e| corrupt(format!("session {t}: {e}")))?;
            if set.representative() != &rec.pattern {
                return Err(corrupt(format!("session {t}: replay selects a different pattern")));
            }
        }
        Ok(())
    }
}
