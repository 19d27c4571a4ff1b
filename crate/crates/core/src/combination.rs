//! M-ary combination rules: conjunctive, Dubois–Prade and proportional
//! conflict redistribution (PCR), plus conflict measures.
//!
//! All rules enumerate tuples of focal elements directly, one element per
//! source, instead of folding binary combinations. PCR is not associative,
//! so folding would give a different rule.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::belief::{FocalSet, Frame, MassFunction};
use crate::error::CombinationError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CombinationRule {
    Conjunctive,
    DuboisPrade,
    Pcr,
}

impl CombinationRule {
    pub const ALL: [CombinationRule; 3] = [
        CombinationRule::Conjunctive,
        CombinationRule::DuboisPrade,
        CombinationRule::Pcr,
    ];

    pub fn combine(self, sources: &[MassFunction]) -> Result<MassFunction, CombinationError> {
        match self {
            CombinationRule::Conjunctive => conjunctive_combine(sources),
            CombinationRule::DuboisPrade => dubois_prade_combine(sources),
            CombinationRule::Pcr => pcr_combine(sources),
        }
    }
}

impl FromStr for CombinationRule {
    type Err = CombinationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "conjunctive" | "conj" => Ok(CombinationRule::Conjunctive),
            "dp" | "dubois_prade" | "dubois-prade" => Ok(CombinationRule::DuboisPrade),
            "pcr" => Ok(CombinationRule::Pcr),
            other => Err(CombinationError::UnknownRule(other.to_string())),
        }
    }
}

impl fmt::Display for CombinationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CombinationRule::Conjunctive => "conjunctive",
            CombinationRule::DuboisPrade => "dp",
            CombinationRule::Pcr => "pcr",
        })
    }
}

fn shared_frame(sources: &[MassFunction]) -> Result<&Frame, CombinationError> {
    if sources.len() < 2 {
        return Err(CombinationError::TooFewSources(sources.len()));
    }
    let frame = sources[0].frame();
    if let Some(i) = sources.iter().position(|m| m.frame() != frame) {
        return Err(CombinationError::FrameMismatch(i));
    }
    Ok(frame)
}

fn reject_empty_mass(sources: &[MassFunction]) -> Result<(), CombinationError> {
    match sources.iter().position(|m| m.empty_mass() > 0.0) {
        Some(i) => Err(CombinationError::EmptySetMass(i)),
        None => Ok(()),
    }
}

/// One tuple of focal elements, one per source.
struct Tuple<'a> {
    sets: &'a [FocalSet],
    masses: &'a [f64],
    product: f64,
    intersection: FocalSet,
}

/// Depth-first walk over every tuple of focal elements. Branches whose
/// partial product is zero are cut.
fn for_each_tuple(sources: &[MassFunction], mut visit: impl FnMut(&Tuple<'_>)) {
    let focal: Vec<Vec<(FocalSet, f64)>> = sources
        .iter()
        .map(|m| m.focal_elements().collect())
        .collect();
    let depth = focal.len();
    let mut sets = vec![FocalSet::EMPTY; depth];
    let mut masses = vec![0.0; depth];

    fn walk(
        level: usize,
        product: f64,
        intersection: FocalSet,
        focal: &[Vec<(FocalSet, f64)>],
        sets: &mut [FocalSet],
        masses: &mut [f64],
        visit: &mut dyn FnMut(&Tuple<'_>),
    ) {
        if level == focal.len() {
            visit(&Tuple {
                sets,
                masses,
                product,
                intersection,
            });
            return;
        }
        for &(set, mass) in &focal[level] {
            let p = product * mass;
            if p == 0.0 {
                continue;
            }
            sets[level] = set;
            masses[level] = mass;
            walk(
                level + 1,
                p,
                intersection.intersect(set),
                focal,
                sets,
                masses,
                visit,
            );
        }
    }

    if depth > 0 {
        let start = sources[0].frame().theta();
        walk(0, 1.0, start, &focal, &mut sets, &mut masses, &mut visit);
    }
}

/// Unnormalized conjunctive rule. Conflict stays on the empty set.
pub fn conjunctive_combine(sources: &[MassFunction]) -> Result<MassFunction, CombinationError> {
    let frame = shared_frame(sources)?;
    let mut acc = BTreeMap::new();
    for_each_tuple(sources, |t| {
        *acc.entry(t.intersection).or_insert(0.0) += t.product;
    });
    Ok(MassFunction::from_accumulated(frame.clone(), acc))
}

/// Dubois–Prade rule: conflicting tuples go to the union of their sets.
pub fn dubois_prade_combine(sources: &[MassFunction]) -> Result<MassFunction, CombinationError> {
    let frame = shared_frame(sources)?;
    reject_empty_mass(sources)?;
    let mut acc = BTreeMap::new();
    for_each_tuple(sources, |t| {
        let target = if t.intersection.is_empty() {
            t.sets.iter().fold(FocalSet::EMPTY, |u, &s| u.union(s))
        } else {
            t.intersection
        };
        *acc.entry(target).or_insert(0.0) += t.product;
    });
    Ok(MassFunction::from_accumulated(frame.clone(), acc))
}

/// PCR result split into its conjunctive part and the conflict mass given
/// back to each focal set.
#[derive(Clone, Debug)]
pub struct PcrBreakdown {
    /// Conjunctive consensus, including its mass on the empty set.
    pub conjunctive: MassFunction,
    /// Conflict mass redistributed onto each set.
    pub redistributed: BTreeMap<FocalSet, f64>,
    pub combined: MassFunction,
}

/// Generalized PCR rule for M sources.
///
/// Each conflicting tuple `(Y_1..Y_M)` with product `P` gives
/// `m_i(Y_i) * P / Σ_j m_j(Y_j)` back to every `Y_i`, which expands the
/// `m_i(X)^2 · Π / (m_i(X) + Σ)` terms of the M-ary formula. Tuples with a
/// zero denominator contribute nothing.
pub fn pcr_combine(sources: &[MassFunction]) -> Result<MassFunction, CombinationError> {
    pcr_breakdown(sources).map(|b| b.combined)
}

pub fn pcr_breakdown(sources: &[MassFunction]) -> Result<PcrBreakdown, CombinationError> {
    let frame = shared_frame(sources)?;
    reject_empty_mass(sources)?;
    let mut consensus = BTreeMap::new();
    let mut redistributed: BTreeMap<FocalSet, f64> = BTreeMap::new();
    for_each_tuple(sources, |t| {
        *consensus.entry(t.intersection).or_insert(0.0) += t.product;
        if !t.intersection.is_empty() {
            return;
        }
        let denominator: f64 = t.masses.iter().sum();
        if denominator == 0.0 {
            return;
        }
        for (&set, &mass) in t.sets.iter().zip(t.masses) {
            *redistributed.entry(set).or_insert(0.0) += mass * t.product / denominator;
        }
    });

    let mut combined: BTreeMap<FocalSet, f64> = consensus
        .iter()
        .filter(|(s, _)| !s.is_empty())
        .map(|(&s, &m)| (s, m))
        .collect();
    for (&set, &extra) in &redistributed {
        *combined.entry(set).or_insert(0.0) += extra;
    }
    Ok(PcrBreakdown {
        conjunctive: MassFunction::from_accumulated(frame.clone(), consensus),
        redistributed,
        combined: MassFunction::from_accumulated(frame.clone(), combined),
    })
}

/// Mass the conjunctive rule puts on the empty set.
pub fn conflict(sources: &[MassFunction]) -> Result<f64, CombinationError> {
    shared_frame(sources)?;
    let mut total = 0.0;
    for_each_tuple(sources, |t| {
        if t.intersection.is_empty() {
            total += t.product;
        }
    });
    Ok(total)
}

/// Conflict of `order` copies of the same source.
pub fn auto_conflict(m: &MassFunction, order: usize) -> Result<f64, CombinationError> {
    if order < 2 {
        return Err(CombinationError::AutoConflictOrder(order));
    }
    conflict(&vec![m.clone(); order])
}
