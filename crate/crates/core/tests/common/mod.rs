//! Generators and brute-force oracles shared by the integration tests.
//!
//! The oracles work on rendered term strings and plain integers, never on the
//! library's interned representations.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spolink::model::{Literal, Term, Triple};
use spolink::{Graph, Iri};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// graph generators

const IRI_PIECES: &[&str] = &[
    "http://example.org/",
    "urn:x:",
    "a",
    "b7",
    "r%C3%A9",
    "é",
    "日本",
    "#frag",
    "?q=1&r=2",
    "\\",
    "\"",
    "{x}",
    "-_.~",
];

const LEXICAL_PIECES: &[&str] = &[
    "",
    "plain",
    " ",
    "\"",
    "\\",
    "\n",
    "\r",
    "\t",
    "é",
    "日本語",
    "😀",
    "'",
    "<>",
    "_:x",
    "@en",
    "^^",
    " . ",
];

pub fn random_iri(rng: &mut impl Rng) -> Iri {
    let mut s = String::from(*IRI_PIECES[..2].choose(rng).unwrap());
    for _ in 0..rng.gen_range(1..4) {
        s.push_str(IRI_PIECES.choose(rng).unwrap());
    }
    Iri::new(s).unwrap()
}

pub fn random_literal(rng: &mut impl Rng) -> Literal {
    let lexical: String = (0..rng.gen_range(0..4))
        .map(|_| *LEXICAL_PIECES.choose(rng).unwrap())
        .collect();
    match rng.gen_range(0..3) {
        0 => Literal::plain(lexical),
        1 => Literal::with_language(lexical, *["en", "en-GB", "de", "x-private1"].choose(rng).unwrap()).unwrap(),
        _ => Literal::with_datatype(lexical, random_iri(rng)),
    }
}

pub fn random_blank(rng: &mut impl Rng) -> Term {
    Term::blank(format!("b{}", rng.gen_range(0..6))).unwrap()
}

/// Graph over an open vocabulary of IRIs, literals and blank nodes.
pub fn random_rich_graph(rng: &mut impl Rng, max_triples: usize) -> Graph {
    let n = rng.gen_range(0..=max_triples);
    (0..n)
        .map(|_| {
            let s = if rng.gen_bool(0.3) {
                random_blank(rng)
            } else {
                random_iri(rng).into()
            };
            let p: Term = random_iri(rng).into();
            let o = match rng.gen_range(0..3) {
                0 => random_iri(rng).into(),
                1 => random_literal(rng).into(),
                _ => random_blank(rng),
            };
            Triple::new(s, p, o).unwrap()
        })
        .collect()
}

/// Vocabulary of at most eight terms: IRIs usable anywhere and literals for
/// the object position.
pub fn small_vocabulary(rng: &mut impl Rng) -> (Vec<Term>, Vec<Term>) {
    let n_iri = rng.gen_range(1..=6);
    let n_lit = rng.gen_range(0..=(8 - n_iri).min(2));
    let iris = (0..n_iri)
        .map(|i| Term::iri(format!("http://v.example/{i}")).unwrap())
        .collect();
    let lits = (0..n_lit).map(|i| Term::literal(format!("l{i}"))).collect();
    (iris, lits)
}

/// Graph with at most `max_triples` triples drawn from the given vocabulary.
pub fn small_graph(rng: &mut impl Rng, iris: &[Term], lits: &[Term], max_triples: usize) -> Graph {
    let n = rng.gen_range(0..=max_triples);
    (0..n)
        .map(|_| {
            let s = iris.choose(rng).unwrap().clone();
            let p = iris.choose(rng).unwrap().clone();
            let o = if !lits.is_empty() && rng.gen_bool(0.3) {
                lits.choose(rng).unwrap().clone()
            } else {
                iris.choose(rng).unwrap().clone()
            };
            Triple::new(s, p, o).unwrap()
        })
        .collect()
}

/// Random pair over a shared small vocabulary, biased towards overlaps.
pub fn small_pair(rng: &mut impl Rng) -> (Graph, Graph) {
    let (iris, lits) = small_vocabulary(rng);
    let a = small_graph(rng, &iris, &lits, 5);
    let b = if rng.gen_bool(0.05) {
        a.clone()
    } else {
        small_graph(rng, &iris, &lits, 5)
    };
    (a, b)
}

// ---------------------------------------------------------------------------
// classification oracle

pub struct Positions {
    pub sub: BTreeSet<String>,
    pub pred: BTreeSet<String>,
    pub obj: BTreeSet<String>,
}

pub fn positions(g: &Graph) -> Positions {
    Positions {
        sub: g.iter().map(|t| t.subject().to_string()).collect(),
        pred: g.iter().map(|t| t.predicate().to_string()).collect(),
        obj: g.iter().map(|t| t.object().to_string()).collect(),
    }
}

fn meet(x: &BTreeSet<String>, y: &BTreeSet<String>) -> BTreeSet<String> {
    x.intersection(y).cloned().collect()
}

/// The nine position intersections of `(a, b)` keyed by their display names.
pub fn intersections(a: &Graph, b: &Graph) -> Vec<(&'static str, BTreeSet<String>)> {
    let (pa, pb) = (positions(a), positions(b));
    vec![
        ("sub-sub", meet(&pa.sub, &pb.sub)),
        ("pred-pred", meet(&pa.pred, &pb.pred)),
        ("obj-obj", meet(&pa.obj, &pb.obj)),
        ("sub-obj", meet(&pa.sub, &pb.obj)),
        ("obj-sub", meet(&pa.obj, &pb.sub)),
        ("sub-pred", meet(&pa.sub, &pb.pred)),
        ("pred-sub", meet(&pa.pred, &pb.sub)),
        ("obj-pred", meet(&pa.obj, &pb.pred)),
        ("pred-obj", meet(&pa.pred, &pb.obj)),
    ]
}

/// Brute-force relation name for the ordered pair `(a, b)`.
pub fn oracle_kind(a: &Graph, b: &Graph) -> &'static str {
    let lines = |g: &Graph| -> BTreeSet<String> { g.iter().map(|t| t.to_string()).collect() };
    if lines(a) == lines(b) {
        return "Identical";
    }
    let (pa, pb) = (positions(a), positions(b));
    let sub_pred = meet(&pa.sub, &pb.pred);
    let pred_sub = meet(&pa.pred, &pb.sub);
    let ss = !meet(&pa.sub, &pb.sub).is_empty();
    let pp = !meet(&pa.pred, &pb.pred).is_empty();
    let oo = !meet(&pa.obj, &pb.obj).is_empty();
    let so = !meet(&pa.sub, &pb.obj).is_empty();
    let os = !meet(&pa.obj, &pb.sub).is_empty();
    let sp = !sub_pred.is_empty();
    let ps = !pred_sub.is_empty();

    // both S-P directions present: the larger, then greater, witness decides
    let (fwd_ok, bwd_ok) = if sp && ps {
        if sub_pred.len() != pred_sub.len() {
            (sub_pred.len() > pred_sub.len(), sub_pred.len() < pred_sub.len())
        } else {
            let f: Vec<&String> = sub_pred.iter().collect();
            let b: Vec<&String> = pred_sub.iter().collect();
            (f > b, f < b)
        }
    } else {
        (true, true)
    };

    let all = [ss, pp, oo, so, os, sp, ps];
    let overlaps = all.iter().filter(|&&x| x).count();

    if ss && pp && !oo && !so && !os {
        return "SSPP";
    }
    if oo && pp && !ss && !so && !os {
        return "OOPP";
    }
    if sp && fwd_ok && !ss && !oo && !pp {
        return "SP_forward";
    }
    if ps && bwd_ok && !ss && !oo && !pp {
        return "SP_backward";
    }
    if ss && overlaps == 1 {
        return "WeakSS";
    }
    if pp && overlaps == 1 {
        return "WeakPP";
    }
    if oo && overlaps == 1 {
        return "WeakOO";
    }
    if overlaps == 0 {
        return "Disjoint";
    }

    // nothing matched exactly: first kind whose shared components are present
    if ss && pp {
        "SSPP"
    } else if oo && pp {
        "OOPP"
    } else if sp && fwd_ok {
        "SP_forward"
    } else if ps && bwd_ok {
        "SP_backward"
    } else if ss {
        "WeakSS"
    } else if pp {
        "WeakPP"
    } else if oo {
        "WeakOO"
    } else {
        "Disjoint"
    }
}

pub fn reversed_name(kind: &str) -> &str {
    match kind {
        "SP_forward" => "SP_backward",
        "SP_backward" => "SP_forward",
        other => other,
    }
}

// ---------------------------------------------------------------------------
// window-tally oracle

pub struct WindowTally {
    pub r: u64,
    /// Every distinct window achieving `r`, sorted.
    pub tie_set: Vec<Vec<u32>>,
}

impl WindowTally {
    pub fn winner(&self) -> &[u32] {
        &self.tie_set[0]
    }
}

/// Materializes every window of length `x` and tallies the contents.
pub fn window_tally(sequences: &[Vec<u32>], x: usize) -> Option<WindowTally> {
    let mut counts: HashMap<Vec<u32>, u64> = HashMap::new();
    for s in sequences {
        if s.len() < x {
            continue;
        }
        for i in 0..=s.len() - x {
            *counts.entry(s[i..i + x].to_vec()).or_default() += 1;
        }
    }
    let r = *counts.values().max()?;
    let mut tie_set: Vec<Vec<u32>> = counts.into_iter().filter(|(_, c)| *c == r).map(|(w, _)| w).collect();
    tie_set.sort();
    Some(WindowTally { r, tie_set })
}

/// Width in `[k1, k2]` with the smallest r/x, later widths winning ties.
pub fn relational_oracle(sequences: &[Vec<u32>], k1: usize, k2: usize) -> Option<(usize, WindowTally)> {
    let mut best: Option<(usize, WindowTally)> = None;
    for x in k1..=k2 {
        let Some(t) = window_tally(sequences, x) else { break };
        let take = match &best {
            None => true,
            // correctly rounded division keeps equal ratios equal
            Some((bx, bt)) => t.r as f64 / x as f64 <= bt.r as f64 / *bx as f64,
        };
        if take {
            best = Some((x, t));
        }
    }
    best
}

pub fn random_sequences(rng: &mut impl Rng, max_sequences: usize, max_total: usize, alphabet: u32) -> Vec<Vec<u32>> {
    let n = rng.gen_range(1..=max_sequences);
    let mut budget = max_total;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        if budget == 0 {
            break;
        }
        let len = rng.gen_range(1..=budget.min(max_total / n).max(1));
        budget -= len;
        out.push((0..len).map(|_| rng.gen_range(0..alphabet)).collect());
    }
    out
}

// ---------------------------------------------------------------------------
// belief oracles

/// bel(A) as the literal sum of masses over subsets of A.
pub fn literal_belief(masses: &[f64], a: u32) -> f64 {
    (0..masses.len() as u32)
        .filter(|b| b & !a == 0)
        .map(|b| masses[b as usize])
        .sum()
}

/// m(A) as the literal alternating sum Σ_{B⊆A} (−1)^{|A∖B|} bel(B).
pub fn literal_mobius(bel: &[f64], a: u32) -> f64 {
    (0..bel.len() as u32)
        .filter(|b| b & !a == 0)
        .map(|b| {
            let sign = if (a & !b).count_ones().is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            sign * bel[b as usize]
        })
        .sum()
}

/// Random normalized mass vector indexed by subset bits, with nothing on ∅.
/// The frame must be non-empty.
pub fn random_masses(rng: &mut impl Rng, frame_size: usize) -> Vec<f64> {
    let n = 1usize << frame_size;
    let mut m = vec![0.0; n];
    for _ in 0..rng.gen_range(1..n) {
        m[rng.gen_range(1..n)] += rng.gen_range(0.01..1.0);
    }
    let total: f64 = m.iter().sum();
    m.iter_mut().for_each(|v| *v /= total);
    m
}

/// Brute-force Dempster combination over all focal pairs.
pub fn literal_combine(m1: &[f64], m2: &[f64]) -> (Vec<f64>, f64) {
    let mut out = vec![0.0; m1.len()];
    let mut conflict = 0.0;
    for (a, x) in m1.iter().enumerate() {
        for (b, y) in m2.iter().enumerate() {
            let c = a & b;
            if c == 0 {
                conflict += x * y;
            } else {
                out[c] += x * y;
            }
        }
    }
    out.iter_mut().for_each(|v| *v /= 1.0 - conflict);
    (out, conflict)
}
