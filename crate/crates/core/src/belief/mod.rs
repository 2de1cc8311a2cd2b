//! Dempster-Shafer evidence over a finite frame of term symbols.
//!
//! Subsets of a [`Frame`] are bitsets over the frame's element indices, so a
//! frame holds at most [`MAX_FRAME`] elements. All numeric work is generic
//! over [`Scalar`], which lets the same code run in `f64`, `f32` or exact
//! rationals.

mod matching;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::graphmodel::SymbolId;
use crate::scalar::{ordered_sum, Scalar};

pub use matching::{combine_evidence, match_graphs, Evidence, EvidenceScope, MatchError, MatchResult, MatchView};

pub const MAX_FRAME: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BeliefError {
    #[error("frame has {0} elements, the maximum is {MAX_FRAME}")]
    FrameTooLarge(usize),
    #[error("symbol {0} occurs twice in the frame")]
    DuplicateElement(SymbolId),
    #[error("subset is not contained in the frame")]
    SubsetOutOfFrame,
    #[error("mass functions are defined over different frames")]
    FrameMismatch,
    #[error("negative mass {0}")]
    NegativeMass(String),
    #[error("the empty set cannot carry mass")]
    MassOnEmptySet,
    #[error("masses sum to {0}, expected 1")]
    NotNormalized(String),
    #[error("belief table has {got} entries, expected {expected}")]
    TableSize { expected: usize, got: usize },
    #[error("table is not a belief function: {0}")]
    NotABelief(String),
    #[error("total conflict: the mass functions share no compatible focal elements")]
    TotalConflict,
}

/// Set of frame element indices, one bit per element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Subset(u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_bits(bits: u32) -> Self {
        Subset(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, index: usize) -> bool {
        index < 32 && self.0 & (1 << index) != 0
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&i| self.contains(i))
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (n, i) in self.indices().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

/// Ordered set of distinct symbols forming the universe of discourse.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Frame {
    elements: Vec<SymbolId>,
}

impl Frame {
    pub fn new(elements: Vec<SymbolId>) -> Result<Self, BeliefError> {
        if elements.len() > MAX_FRAME {
            return Err(BeliefError::FrameTooLarge(elements.len()));
        }
        for (i, e) in elements.iter().enumerate() {
            if elements[..i].contains(e) {
                return Err(BeliefError::DuplicateElement(*e));
            }
        }
        Ok(Frame { elements })
    }

    /// Frame of `n` anonymous elements `SymbolId(0..n)`.
    pub fn of_size(n: usize) -> Result<Self, BeliefError> {
        Frame::new((0..n as u32).map(SymbolId).collect())
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[SymbolId] {
        &self.elements
    }

    /// The whole frame, Θ.
    pub fn full(&self) -> Subset {
        if self.elements.len() == 32 {
            Subset(u32::MAX)
        } else {
            Subset((1u32 << self.elements.len()) - 1)
        }
    }

    pub fn contains_subset(&self, s: Subset) -> bool {
        s.is_subset_of(self.full())
    }

    pub fn subset_of<'a>(&self, symbols: impl IntoIterator<Item = &'a SymbolId>) -> Result<Subset, BeliefError> {
        let mut bits = 0u32;
        for sym in symbols {
            let idx = self
                .elements
                .iter()
                .position(|e| e == sym)
                .ok_or(BeliefError::SubsetOutOfFrame)?;
            bits |= 1 << idx;
        }
        Ok(Subset(bits))
    }

    pub fn symbols_of(&self, s: Subset) -> Vec<SymbolId> {
        s.indices().filter_map(|i| self.elements.get(i).copied()).collect()
    }

    /// Every subset of the frame, in bitmask order.
    pub fn subsets(&self) -> impl Iterator<Item = Subset> {
        (0..=self.full().0 as u64).map(|b| Subset(b as u32))
    }
}

/// Basic belief assignment: positive masses on non-empty subsets, summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct MassFunction<S> {
    frame: Frame,
    focal: BTreeMap<Subset, S>,
}

impl<S: Scalar> MassFunction<S> {
    /// Validates and builds a mass function. Repeated subsets are summed and
    /// zero masses dropped.
    pub fn new(frame: Frame, entries: impl IntoIterator<Item = (Subset, S)>) -> Result<Self, BeliefError> {
        let mut focal: BTreeMap<Subset, S> = BTreeMap::new();
        for (subset, mass) in entries {
            if !frame.contains_subset(subset) {
                return Err(BeliefError::SubsetOutOfFrame);
            }
            if mass < S::zero() {
                return Err(BeliefError::NegativeMass(format!("{mass:?}")));
            }
            if mass.is_zero() {
                continue;
            }
            if subset.is_empty() {
                return Err(BeliefError::MassOnEmptySet);
            }
            let slot = focal.entry(subset).or_insert_with(S::zero);
            *slot = slot.clone() + mass;
        }
        let total = ordered_sum(focal.values().cloned().collect());
        if total.abs_diff(&S::one()) > S::tolerance() {
            return Err(BeliefError::NotNormalized(format!("{total:?}")));
        }
        Ok(MassFunction { frame, focal })
    }

    /// All mass on Θ.
    pub fn vacuous(frame: Frame) -> Self {
        let full = frame.full();
        let mut focal = BTreeMap::new();
        if !frame.is_empty() {
            focal.insert(full, S::one());
        }
        MassFunction { frame, focal }
    }

    /// `weight` on `focal`, the remainder on Θ.
    pub fn simple_support(frame: Frame, focal: Subset, weight: S) -> Result<Self, BeliefError> {
        let rest = S::one() - weight.clone();
        let full = frame.full();
        MassFunction::new(frame, [(focal, weight), (full, rest)])
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn mass(&self, subset: Subset) -> S {
        self.focal.get(&subset).cloned().unwrap_or_else(S::zero)
    }

    pub fn focal_elements(&self) -> impl Iterator<Item = (Subset, &S)> + '_ {
        self.focal.iter().map(|(s, m)| (*s, m))
    }

    pub fn total_mass(&self) -> S {
        ordered_sum(self.focal.values().cloned().collect())
    }

    /// bel(A): total mass of focal elements contained in `a`.
    pub fn belief(&self, a: Subset) -> Result<S, BeliefError> {
        if !self.frame.contains_subset(a) {
            return Err(BeliefError::SubsetOutOfFrame);
        }
        Ok(ordered_sum(
            self.focal
                .iter()
                .filter(|(b, _)| b.is_subset_of(a))
                .map(|(_, m)| m.clone())
                .collect(),
        ))
    }

    /// Whether every focal mass agrees with `other` within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: &S) -> bool {
        self.frame == other.frame
            && self
                .focal
                .keys()
                .chain(other.focal.keys())
                .all(|k| self.mass(*k).abs_diff(&other.mass(*k)) <= *tol)
    }
}

pub fn belief_from_mass<S: Scalar>(m: &MassFunction<S>, a: Subset) -> Result<S, BeliefError> {
    m.belief(a)
}

/// Belief values for every subset of a frame, indexed by subset bitmask.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefTable<S> {
    frame: Frame,
    values: Vec<S>,
}

impl<S: Scalar> BeliefTable<S> {
    pub fn new(frame: Frame, values: Vec<S>) -> Result<Self, BeliefError> {
        let expected = 1usize << frame.len();
        if values.len() != expected {
            return Err(BeliefError::TableSize {
                expected,
                got: values.len(),
            });
        }
        Ok(BeliefTable { frame, values })
    }

    /// Zeta transform of a mass function: bel(A) = Σ_{B ⊆ A} m(B).
    pub fn from_mass(m: &MassFunction<S>) -> Self {
        let n = m.frame.len();
        let mut values = vec![S::zero(); 1usize << n];
        for (subset, mass) in m.focal_elements() {
            values[subset.bits() as usize] = mass.clone();
        }
        for bit in 0..n {
            let step = 1usize << bit;
            for mask in 0..values.len() {
                if mask & step != 0 {
                    let below = values[mask ^ step].clone();
                    values[mask] = values[mask].clone() + below;
                }
            }
        }
        BeliefTable {
            frame: m.frame.clone(),
            values,
        }
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn get(&self, a: Subset) -> &S {
        &self.values[a.bits() as usize]
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }
}

/// Möbius inversion, m(A) = Σ_{B ⊆ A} (-1)^{|A-B|} bel(B), computed with the
/// fast subset transform.
pub fn mass_from_belief<S: Scalar>(table: &BeliefTable<S>) -> Result<MassFunction<S>, BeliefError> {
    let frame = &table.frame;
    let empty = table.get(Subset::EMPTY);
    if empty.abs_diff(&S::zero()) > S::tolerance() {
        return Err(BeliefError::NotABelief(format!("bel(∅) = {empty:?}")));
    }
    let whole = table.get(frame.full());
    if whole.abs_diff(&S::one()) > S::tolerance() {
        return Err(BeliefError::NotABelief(format!("bel(Θ) = {whole:?}")));
    }

    let mut values = table.values.clone();
    for bit in 0..frame.len() {
        let step = 1usize << bit;
        for mask in 0..values.len() {
            if mask & step != 0 {
                let below = values[mask ^ step].clone();
                values[mask] = values[mask].clone() - below;
            }
        }
    }

    let floor = S::zero() - S::tolerance();
    let mut entries = Vec::new();
    for (mask, m) in values.into_iter().enumerate().skip(1) {
        if m < floor {
            return Err(BeliefError::NotABelief(format!(
                "m({}) = {m:?} is negative",
                Subset(mask as u32)
            )));
        }
        if m > S::negligible() {
            entries.push((Subset(mask as u32), m));
        }
    }
    MassFunction::new(frame.clone(), entries).map_err(|e| BeliefError::NotABelief(e.to_string()))
}

/// Dempster's rule. Returns the normalized combination and the conflict
/// K = Σ_{X ∩ Y = ∅} m1(X)·m2(Y).
pub fn dempster_combine<S: Scalar>(
    m1: &MassFunction<S>,
    m2: &MassFunction<S>,
) -> Result<(MassFunction<S>, S), BeliefError> {
    if m1.frame != m2.frame {
        return Err(BeliefError::FrameMismatch);
    }
    let mut products: BTreeMap<Subset, Vec<S>> = BTreeMap::new();
    let mut conflicting = Vec::new();
    for (x, mx) in m1.focal_elements() {
        for (y, my) in m2.focal_elements() {
            let product = mx.clone() * my.clone();
            let meet = x.intersection(y);
            if meet.is_empty() {
                conflicting.push(product);
            } else {
                products.entry(meet).or_default().push(product);
            }
        }
    }
    let conflict = ordered_sum(conflicting);
    if S::one() - conflict.clone() <= S::negligible() {
        return Err(BeliefError::TotalConflict);
    }
    // 1 - K cancels badly in floating point when K is near one; the sum of the
    // surviving products is the same quantity without the cancellation.
    let sums: Vec<(Subset, S)> = products
        .into_iter()
        .map(|(subset, terms)| (subset, ordered_sum(terms)))
        .collect();
    let normalizer = if conflict.is_zero() {
        S::one()
    } else {
        ordered_sum(sums.iter().map(|(_, m)| m.clone()).collect())
    };
    let focal = sums
        .into_iter()
        .map(|(subset, m)| (subset, m / normalizer.clone()))
        .filter(|(_, m)| !m.is_zero())
        .collect();
    Ok((
        MassFunction {
            frame: m1.frame.clone(),
            focal,
        },
        conflict,
    ))
}
