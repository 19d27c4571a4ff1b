//! Frames of discernment, mass functions over the power set, and the
//! credibility / plausibility / pignistic transforms.
//!
//! Subsets of a frame are encoded as bit codes: bit `i` is set when the
//! `i`-th label of the frame belongs to the subset. The empty code is the
//! empty set and the all-ones code is the whole frame.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::BeliefError;

/// Largest supported frame.
pub const MAX_CLASSES: usize = 16;

/// Tolerance on the unit-sum constraint of a mass function.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Masses below this value are dropped after combination.
pub const PRUNE_THRESHOLD: f64 = 1e-12;

/// Key used for the empty set in the JSON format.
pub const EMPTY_SET_KEY: &str = "{}";

/// Ordered list of mutually exclusive class labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Frame {
    labels: Vec<String>,
}

impl Frame {
    pub fn new<I, S>(labels: I) -> Result<Self, BeliefError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() || labels.len() > MAX_CLASSES {
            return Err(BeliefError::FrameSize(labels.len()));
        }
        for (i, label) in labels.iter().enumerate() {
            if label.is_empty() || label.contains('|') || label == EMPTY_SET_KEY {
                return Err(BeliefError::InvalidLabel(label.clone()));
            }
            if labels[..i].contains(label) {
                return Err(BeliefError::DuplicateLabel(label.clone()));
            }
        }
        Ok(Self { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> Option<&str> {
        self.labels.get(index).map(String::as_str)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// The whole frame, i.e. total ignorance.
    pub fn theta(&self) -> FocalSet {
        FocalSet((1u32 << self.labels.len()) - 1)
    }

    pub fn singleton(&self, label: &str) -> Result<FocalSet, BeliefError> {
        self.index_of(label)
            .map(FocalSet::singleton)
            .ok_or_else(|| BeliefError::UnknownLabel(label.to_string()))
    }

    /// Singletons in frame order.
    pub fn singletons(&self) -> impl Iterator<Item = FocalSet> + '_ {
        (0..self.labels.len()).map(FocalSet::singleton)
    }

    /// Every subset of the frame, including the empty set, by increasing code.
    pub fn subsets(&self) -> impl Iterator<Item = FocalSet> {
        (0..=self.theta().0).map(FocalSet)
    }

    pub fn contains(&self, set: FocalSet) -> bool {
        set.0 & !self.theta().0 == 0
    }

    pub fn check(&self, set: FocalSet) -> Result<(), BeliefError> {
        if self.contains(set) {
            Ok(())
        } else {
            Err(BeliefError::SetOutsideFrame {
                bits: set.0,
                size: self.len(),
            })
        }
    }

    pub fn complement(&self, set: FocalSet) -> FocalSet {
        FocalSet(!set.0 & self.theta().0)
    }

    /// Builds a subset from labels.
    pub fn set_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<FocalSet, BeliefError> {
        labels.iter().try_fold(FocalSet::EMPTY, |acc, l| {
            Ok(acc.union(self.singleton(l.as_ref())?))
        })
    }

    /// `"A|B"` style name of a subset, `"{}"` for the empty set.
    pub fn format_set(&self, set: FocalSet) -> String {
        if set.is_empty() {
            return EMPTY_SET_KEY.to_string();
        }
        set.members()
            .map(|i| self.labels[i].as_str())
            .collect::<Vec<_>>()
            .join("|")
    }

    pub fn parse_set(&self, key: &str) -> Result<FocalSet, BeliefError> {
        if key == EMPTY_SET_KEY {
            return Ok(FocalSet::EMPTY);
        }
        let mut set = FocalSet::EMPTY;
        for part in key.split('|') {
            let single = self.singleton(part.trim())?;
            if set.intersects(single) {
                return Err(BeliefError::InvalidSetKey(key.to_string()));
            }
            set = set.union(single);
        }
        Ok(set)
    }
}

/// A subset of a frame as a bit code.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FocalSet(u32);

impl FocalSet {
    pub const EMPTY: FocalSet = FocalSet(0);

    pub fn from_bits(bits: u32) -> Self {
        FocalSet(bits)
    }

    pub fn singleton(index: usize) -> Self {
        debug_assert!(index < MAX_CLASSES);
        FocalSet(1 << index)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Cardinality.
    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_singleton(self) -> bool {
        self.0.count_ones() == 1
    }

    pub fn intersect(self, other: FocalSet) -> FocalSet {
        FocalSet(self.0 & other.0)
    }

    pub fn union(self, other: FocalSet) -> FocalSet {
        FocalSet(self.0 | other.0)
    }

    pub fn intersects(self, other: FocalSet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn is_subset_of(self, other: FocalSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn contains(self, index: usize) -> bool {
        self.0 >> index & 1 == 1
    }

    /// Indices of the member classes, ascending.
    pub fn members(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |i| bits >> i & 1 == 1)
    }
}

/// One reason a candidate mass assignment is not a valid bba.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    NonFinite { set: FocalSet, mass: f64 },
    Negative { set: FocalSet, mass: f64 },
    AboveOne { set: FocalSet, mass: f64 },
    OutsideFrame { set: FocalSet },
    Sum { total: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonFinite { set, mass } => write!(f, "mass[{}]={mass} not finite", set.0),
            Violation::Negative { set, mass } => write!(f, "mass[{}]={mass} < 0", set.0),
            Violation::AboveOne { set, mass } => write!(f, "mass[{}]={mass} > 1", set.0),
            Violation::OutsideFrame { set } => write!(f, "subset code {} outside frame", set.0),
            Violation::Sum { total } => write!(f, "sum={total}"),
        }
    }
}

/// Result of [`validate_mass`]: empty when the assignment is a valid bba.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MassReport {
    pub violations: Vec<Violation>,
}

impl MassReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for MassReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("ok");
        }
        let parts: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join("; "))
    }
}

/// Checks a raw assignment against the bba invariants without building it.
///
/// Duplicate subsets are summed. Mass on the empty set is allowed.
pub fn validate_mass(frame: &Frame, entries: &[(FocalSet, f64)]) -> MassReport {
    let mut violations = Vec::new();
    let mut total = 0.0;
    for &(set, mass) in entries {
        if !frame.contains(set) {
            violations.push(Violation::OutsideFrame { set });
        }
        if !mass.is_finite() {
            violations.push(Violation::NonFinite { set, mass });
            continue;
        }
        if mass < 0.0 {
            violations.push(Violation::Negative { set, mass });
        } else if mass > 1.0 + SUM_TOLERANCE {
            violations.push(Violation::AboveOne { set, mass });
        }
        total += mass;
    }
    if (total - 1.0).abs() > SUM_TOLERANCE {
        violations.push(Violation::Sum { total });
    }
    MassReport { violations }
}

/// Basic belief assignment on a frame. Only focal elements are stored.
#[derive(Clone, Debug, PartialEq)]
pub struct MassFunction {
    frame: Frame,
    masses: BTreeMap<FocalSet, f64>,
}

impl MassFunction {
    /// Builds a validated mass function. Zero entries are dropped; repeated
    /// subsets are summed.
    pub fn new<I>(frame: Frame, entries: I) -> Result<Self, BeliefError>
    where
        I: IntoIterator<Item = (FocalSet, f64)>,
    {
        let entries: Vec<(FocalSet, f64)> = entries.into_iter().collect();
        let report = validate_mass(&frame, &entries);
        if !report.is_ok() {
            return Err(BeliefError::InvalidMass(report));
        }
        let mut masses = BTreeMap::new();
        for (set, mass) in entries {
            if mass > 0.0 {
                *masses.entry(set).or_insert(0.0) += mass;
            }
        }
        Ok(Self { frame, masses })
    }

    /// Builds from labelled subsets, e.g. `[("A", 0.6), ("A|B", 0.4)]`.
    pub fn from_labels<S: AsRef<str>>(
        frame: Frame,
        entries: &[(S, f64)],
    ) -> Result<Self, BeliefError> {
        let parsed = entries
            .iter()
            .map(|(k, v)| Ok((frame.parse_set(k.as_ref())?, *v)))
            .collect::<Result<Vec<_>, BeliefError>>()?;
        Self::new(frame, parsed)
    }

    /// Result path of the combination operators: drops dust below
    /// [`PRUNE_THRESHOLD`] and rescales to unit sum.
    pub(crate) fn from_accumulated(frame: Frame, raw: BTreeMap<FocalSet, f64>) -> Self {
        let mut masses: BTreeMap<FocalSet, f64> = raw
            .into_iter()
            .filter(|&(_, m)| m >= PRUNE_THRESHOLD)
            .collect();
        let total: f64 = masses.values().sum();
        if total > 0.0 && (total - 1.0).abs() > f64::EPSILON {
            masses.values_mut().for_each(|m| *m /= total);
        }
        Self { frame, masses }
    }

    /// Total ignorance: all mass on the frame.
    pub fn vacuous(frame: Frame) -> Self {
        let theta = frame.theta();
        Self {
            frame,
            masses: BTreeMap::from([(theta, 1.0)]),
        }
    }

    /// All mass on one subset.
    pub fn categorical(frame: Frame, set: FocalSet) -> Result<Self, BeliefError> {
        Self::new(frame, [(set, 1.0)])
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn mass(&self, set: FocalSet) -> f64 {
        self.masses.get(&set).copied().unwrap_or(0.0)
    }

    /// Focal elements with their masses, by increasing subset code.
    pub fn focal_elements(&self) -> impl Iterator<Item = (FocalSet, f64)> + '_ {
        self.masses.iter().map(|(&s, &m)| (s, m))
    }

    pub fn focal_count(&self) -> usize {
        self.masses.len()
    }

    /// Mass on the empty set (conflict in the open world).
    pub fn empty_mass(&self) -> f64 {
        self.mass(FocalSet::EMPTY)
    }

    pub fn total(&self) -> f64 {
        self.masses.values().sum()
    }

    /// Re-runs [`validate_mass`] on the stored focal elements.
    pub fn validate(&self) -> MassReport {
        let entries: Vec<_> = self.focal_elements().collect();
        validate_mass(&self.frame, &entries)
    }

    /// `bel(X)`: total mass of the non-empty subsets of `x`.
    pub fn credibility(&self, x: FocalSet) -> Result<f64, BeliefError> {
        self.frame.check(x)?;
        Ok(self
            .focal_elements()
            .filter(|(y, _)| !y.is_empty() && y.is_subset_of(x))
            .fold(0.0, |acc, (_, m)| acc + m))
    }

    /// `pl(X)`: total mass of the subsets meeting `x`.
    pub fn plausibility(&self, x: FocalSet) -> Result<f64, BeliefError> {
        self.frame.check(x)?;
        Ok(self
            .focal_elements()
            .filter(|(y, _)| y.intersects(x))
            .fold(0.0, |acc, (_, m)| acc + m))
    }

    /// Pignistic probability of a non-empty subset, with the conflict
    /// renormalized away.
    pub fn pignistic(&self, x: FocalSet) -> Result<f64, BeliefError> {
        self.frame.check(x)?;
        if x.is_empty() {
            return Err(BeliefError::EmptyQuery);
        }
        let open = 1.0 - self.empty_mass();
        if open <= 0.0 {
            return Err(BeliefError::TotalConflict);
        }
        Ok(self
            .focal_elements()
            .filter(|(y, _)| !y.is_empty())
            .map(|(y, m)| f64::from(x.intersect(y).len()) / f64::from(y.len()) * m)
            .sum::<f64>()
            / open)
    }

    /// Pignistic probability of every singleton, in frame order.
    pub fn pignistic_singletons(&self) -> Result<Vec<f64>, BeliefError> {
        self.frame.singletons().map(|s| self.pignistic(s)).collect()
    }

    fn score(&self, criterion: Criterion, x: FocalSet) -> Result<f64, BeliefError> {
        match criterion {
            Criterion::MaxPignistic => self.pignistic(x),
            Criterion::MaxCredibility => self.credibility(x),
            Criterion::MaxPlausibility => self.plausibility(x),
        }
    }
}

/// Decision functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    #[serde(rename = "betp")]
    MaxPignistic,
    #[serde(rename = "bel")]
    MaxCredibility,
    #[serde(rename = "pl")]
    MaxPlausibility,
}

impl FromStr for Criterion {
    type Err = BeliefError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "betp" | "pignistic" => Ok(Criterion::MaxPignistic),
            "bel" | "credibility" => Ok(Criterion::MaxCredibility),
            "pl" | "plausibility" => Ok(Criterion::MaxPlausibility),
            other => Err(BeliefError::UnknownCriterion(other.to_string())),
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::MaxPignistic => "betp",
            Criterion::MaxCredibility => "bel",
            Criterion::MaxPlausibility => "pl",
        })
    }
}

/// Picks the candidate maximizing `criterion`. Ties go to the lowest subset
/// code.
pub fn decide(
    m: &MassFunction,
    criterion: Criterion,
    candidates: &[FocalSet],
) -> Result<FocalSet, BeliefError> {
    if candidates.is_empty() {
        return Err(BeliefError::NoCandidates);
    }
    if candidates.iter().any(|c| c.is_empty()) {
        return Err(BeliefError::EmptyQuery);
    }
    let mut ordered = candidates.to_vec();
    ordered.sort_unstable();
    ordered.dedup();
    let mut best = ordered[0];
    let mut best_score = m.score(criterion, best)?;
    for &c in &ordered[1..] {
        let score = m.score(criterion, c)?;
        if score > best_score {
            best = c;
            best_score = score;
        }
    }
    Ok(best)
}

/// Shorthand for [`MassFunction::vacuous`].
pub fn vacuous(frame: &Frame) -> MassFunction {
    MassFunction::vacuous(frame.clone())
}

impl Serialize for MassFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            frame: &'a [String],
            masses: Masses<'a>,
        }
        Wire {
            frame: self.frame.labels(),
            masses: Masses(self),
        }
        .serialize(serializer)
    }
}

/// Serializes the focal elements as a JSON object keyed by subset name.
pub(crate) struct Masses<'a>(pub &'a MassFunction);

impl Serialize for Masses<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let m = self.0;
        let mut map = serializer.serialize_map(Some(m.focal_count()))?;
        for (set, mass) in m.focal_elements() {
            map.serialize_entry(&m.frame.format_set(set), &mass)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for MassFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Wire {
            frame: Vec<String>,
            masses: BTreeMap<String, f64>,
        }
        let wire = Wire::deserialize(deserializer)?;
        let frame = Frame::new(wire.frame).map_err(D::Error::custom)?;
        mass_from_keys(frame, &wire.masses).map_err(D::Error::custom)
    }
}

/// Builds a mass function from `"A|B"`-keyed masses.
pub fn mass_from_keys(
    frame: Frame,
    masses: &BTreeMap<String, f64>,
) -> Result<MassFunction, BeliefError> {
    let entries = masses
        .iter()
        .map(|(k, &v)| Ok((frame.parse_set(k)?, v)))
        .collect::<Result<Vec<_>, BeliefError>>()?;
    MassFunction::new(frame, entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Frame {
        Frame::new(["A", "B"]).unwrap()
    }

    fn conjunctive_table() -> MassFunction {
        MassFunction::from_labels(ab(), &[("{}", 0.12), ("A", 0.6), ("B", 0.08), ("A|B", 0.2)])
            .unwrap()
    }

    #[test]
    fn frame_rejects_bad_labels() {
        assert!(Frame::new(Vec::<String>::new()).is_err());
        assert!(Frame::new(["A", "A"]).is_err());
        assert!(Frame::new(["A", ""]).is_err());
        assert!(Frame::new(["A|B"]).is_err());
        let many: Vec<String> = (0..17).map(|i| format!("C{i}")).collect();
        assert!(matches!(Frame::new(many), Err(BeliefError::FrameSize(17))));
        let sixteen: Vec<String> = (0..16).map(|i| format!("C{i}")).collect();
        assert_eq!(Frame::new(sixteen).unwrap().theta().bits(), 0xFFFF);
    }

    #[test]
    fn set_names_round_trip() {
        let f = Frame::new(["A", "B", "C"]).unwrap();
        for s in f.subsets() {
            assert_eq!(f.parse_set(&f.format_set(s)).unwrap(), s);
        }
        assert_eq!(f.format_set(FocalSet::from_bits(0b101)), "A|C");
        assert!(f.parse_set("A|A").is_err());
        assert!(f.parse_set("D").is_err());
    }

    #[test]
    fn validate_examples() {
        let f = ab();
        let a = f.singleton("A").unwrap();
        let b = f.singleton("B").unwrap();
        assert!(validate_mass(&f, &[(a, 0.6), (f.theta(), 0.4)]).is_ok());
        assert!(validate_mass(&f, &[(f.theta(), 1.0)]).is_ok());
        let report = validate_mass(&f, &[(a, 0.6), (b, 0.6)]);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.to_string(), "sum=1.2");
        let report = validate_mass(&f, &[(a, -0.2), (b, 1.2), (FocalSet::from_bits(4), 0.0)]);
        assert!(report
            .violations
            .contains(&Violation::Negative { set: a, mass: -0.2 }));
        assert!(report
            .violations
            .contains(&Violation::AboveOne { set: b, mass: 1.2 }));
        assert!(report.violations.contains(&Violation::OutsideFrame {
            set: FocalSet::from_bits(4)
        }));
    }

    #[test]
    fn open_world_mass_is_valid() {
        let m = conjunctive_table();
        assert!(m.validate().is_ok());
        assert_eq!(m.empty_mass(), 0.12);
    }

    #[test]
    fn zero_entries_are_not_stored() {
        let f = ab();
        let m = MassFunction::new(
            f.clone(),
            [(f.singleton("A").unwrap(), 1.0), (f.theta(), 0.0)],
        )
        .unwrap();
        assert_eq!(m.focal_count(), 1);
    }

    #[test]
    fn credibility_and_plausibility_on_conjunctive_table() {
        let m = conjunctive_table();
        let f = m.frame().clone();
        let (a, b, ab) = (
            f.singleton("A").unwrap(),
            f.singleton("B").unwrap(),
            f.theta(),
        );
        assert!((m.credibility(a).unwrap() - 0.6).abs() < 1e-12);
        assert!((m.credibility(b).unwrap() - 0.08).abs() < 1e-12);
        assert!((m.credibility(ab).unwrap() - 0.88).abs() < 1e-12);
        assert!((m.plausibility(a).unwrap() - 0.8).abs() < 1e-12);
        assert!((m.plausibility(b).unwrap() - 0.28).abs() < 1e-12);
        assert_eq!(m.credibility(FocalSet::EMPTY).unwrap(), 0.0);
        assert_eq!(m.plausibility(FocalSet::EMPTY).unwrap(), 0.0);
    }

    #[test]
    fn vacuous_and_categorical() {
        let f = ab();
        let v = vacuous(&f);
        assert_eq!(v.credibility(f.singleton("A").unwrap()).unwrap(), 0.0);
        assert_eq!(v.pignistic(f.singleton("A").unwrap()).unwrap(), 0.5);
        let seven = Frame::new(["A", "B", "C", "D", "E", "F", "G"]).unwrap();
        let v7 = vacuous(&seven);
        assert_eq!(
            v7.focal_elements().collect::<Vec<_>>(),
            vec![(seven.theta(), 1.0)]
        );
        let cat = MassFunction::categorical(f.clone(), f.singleton("A").unwrap()).unwrap();
        assert_eq!(cat.plausibility(f.singleton("B").unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn frame_mismatch_is_an_error() {
        let m = conjunctive_table();
        assert!(matches!(
            m.credibility(FocalSet::from_bits(0b100)),
            Err(BeliefError::SetOutsideFrame { .. })
        ));
        assert!(m.plausibility(FocalSet::from_bits(0b1000)).is_err());
    }

    #[test]
    fn pignistic_table_values() {
        let m = conjunctive_table();
        let f = m.frame().clone();
        let a = m.pignistic(f.singleton("A").unwrap()).unwrap();
        let b = m.pignistic(f.singleton("B").unwrap()).unwrap();
        assert!((a - 0.7955).abs() < 5e-5);
        assert!((b - 0.2045).abs() < 5e-5);
        assert!((m.pignistic(f.theta()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pignistic_errors() {
        let f = ab();
        let m = vacuous(&f);
        assert!(matches!(
            m.pignistic(FocalSet::EMPTY),
            Err(BeliefError::EmptyQuery)
        ));
        let conflict = MassFunction::new(f, [(FocalSet::EMPTY, 1.0)]).unwrap();
        assert!(matches!(
            conflict.pignistic(FocalSet::singleton(0)),
            Err(BeliefError::TotalConflict)
        ));
    }

    #[test]
    fn decide_examples() {
        let f = ab();
        let singles: Vec<_> = f.singletons().collect();
        let pcr = MassFunction::from_labels(f.clone(), &[("A", 0.69), ("B", 0.11), ("A|B", 0.2)])
            .unwrap();
        assert_eq!(
            decide(&pcr, Criterion::MaxPignistic, &singles).unwrap(),
            singles[0]
        );

        let cat_b = MassFunction::categorical(f.clone(), singles[1]).unwrap();
        for c in [
            Criterion::MaxPignistic,
            Criterion::MaxCredibility,
            Criterion::MaxPlausibility,
        ] {
            assert_eq!(decide(&cat_b, c, &singles).unwrap(), singles[1]);
        }

        let tie = MassFunction::from_labels(f.clone(), &[("A", 0.5), ("B", 0.5)]).unwrap();
        assert_eq!(
            decide(&tie, Criterion::MaxPignistic, &[singles[1], singles[0]]).unwrap(),
            singles[0]
        );

        assert!(matches!(
            decide(&tie, Criterion::MaxPignistic, &[]),
            Err(BeliefError::NoCandidates)
        ));
        assert!(decide(&tie, Criterion::MaxPignistic, &[FocalSet::EMPTY]).is_err());
    }

    #[test]
    fn criterion_parsing() {
        assert_eq!(
            "betP".parse::<Criterion>().unwrap(),
            Criterion::MaxPignistic
        );
        assert_eq!(
            "bel".parse::<Criterion>().unwrap(),
            Criterion::MaxCredibility
        );
        assert_eq!(
            "pl".parse::<Criterion>().unwrap(),
            Criterion::MaxPlausibility
        );
        assert!("max".parse::<Criterion>().is_err());
    }

    #[test]
    fn json_format() {
        let m = MassFunction::from_labels(ab(), &[("A", 0.6), ("A|B", 0.4)]).unwrap();
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(text, r#"{"frame":["A","B"],"masses":{"A":0.6,"A|B":0.4}}"#);
        let back: MassFunction = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);

        let open: MassFunction = serde_json::from_str(
            r#"{"frame":["A","B"],"masses":{"{}":0.12,"A":0.6,"B":0.08,"A|B":0.2}}"#,
        )
        .unwrap();
        assert_eq!(open.empty_mass(), 0.12);

        let bad = serde_json::from_str::<MassFunction>(
            r#"{"frame":["A","B"],"masses":{"A":0.6,"B":0.6}}"#,
        );
        assert!(bad.unwrap_err().to_string().contains("sum=1.2"));
    }
}
