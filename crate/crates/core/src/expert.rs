//! Expert annotations to mass functions, per-tile fusion, and the decided
//! reference map used as training and evaluation ground truth.
//!
//! An expert describes a tile by the proportion of each class present and
//! how sure they are of it. Each class gets `Σ_k p_k · c_k` over its
//! certainty levels; what is left goes to the whole frame.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::belief::{decide, mass_from_keys, Criterion, FocalSet, Frame, MassFunction, Masses};
use crate::combination::{conflict, CombinationRule};
use crate::error::{BeliefError, FusionError};

const PROPORTION_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertaintyLevel {
    Sure,
    ModeratelySure,
    NotSure,
}

impl CertaintyLevel {
    pub const ALL: [CertaintyLevel; 3] = [
        CertaintyLevel::Sure,
        CertaintyLevel::ModeratelySure,
        CertaintyLevel::NotSure,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CertaintyLevel::Sure => "sure",
            CertaintyLevel::ModeratelySure => "moderately_sure",
            CertaintyLevel::NotSure => "not_sure",
        }
    }
}

impl FromStr for CertaintyLevel {
    type Err = FusionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CertaintyLevel::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| FusionError::UnknownCertainty(s.to_string()))
    }
}

impl fmt::Display for CertaintyLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Weights attached to the three certainty levels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertaintyWeights {
    sure: f64,
    moderately_sure: f64,
    not_sure: f64,
}

impl Default for CertaintyWeights {
    fn default() -> Self {
        Self {
            sure: 2.0 / 3.0,
            moderately_sure: 0.5,
            not_sure: 1.0 / 3.0,
        }
    }
}

impl CertaintyWeights {
    pub fn new(sure: f64, moderately_sure: f64, not_sure: f64) -> Result<Self, FusionError> {
        let in_range = [sure, moderately_sure, not_sure]
            .iter()
            .all(|w| (0.0..=1.0).contains(w));
        if !in_range || sure <= moderately_sure || moderately_sure <= not_sure {
            return Err(FusionError::CertaintyWeights);
        }
        Ok(Self {
            sure,
            moderately_sure,
            not_sure,
        })
    }

    pub fn weight(&self, level: CertaintyLevel) -> f64 {
        match level {
            CertaintyLevel::Sure => self.sure,
            CertaintyLevel::ModeratelySure => self.moderately_sure,
            CertaintyLevel::NotSure => self.not_sure,
        }
    }
}

/// Certainty of one annotation entry: a named level, or a raw weight in
/// `[0,1]` when the expert's confidence is given numerically.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Certainty {
    Level(CertaintyLevel),
    Weight(f64),
}

impl From<CertaintyLevel> for Certainty {
    fn from(level: CertaintyLevel) -> Self {
        Certainty::Level(level)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnotationEntry {
    pub class: String,
    pub certainty: Certainty,
    pub p: f64,
}

impl AnnotationEntry {
    pub fn new(class: impl Into<String>, certainty: impl Into<Certainty>, p: f64) -> Self {
        Self {
            class: class.into(),
            certainty: certainty.into(),
            p,
        }
    }
}

/// One expert's description of one tile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TileAnnotation {
    pub expert: String,
    pub entries: Vec<AnnotationEntry>,
}

impl TileAnnotation {
    pub fn new(expert: impl Into<String>, entries: Vec<AnnotationEntry>) -> Self {
        Self {
            expert: expert.into(),
            entries,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedTile {
    pub id: String,
    pub experts: Vec<TileAnnotation>,
}

/// Annotation file: a frame and the expert annotations of every tile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnotationSet {
    pub frame: Vec<String>,
    pub tiles: Vec<AnnotatedTile>,
}

impl AnnotationSet {
    pub fn frame(&self) -> Result<Frame, BeliefError> {
        Frame::new(self.frame.iter().cloned())
    }
}

/// How annotations become mass functions.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MassModel {
    pub weights: CertaintyWeights,
    /// Class treated as absence of information: its area stays on the
    /// whole frame instead of its singleton.
    pub shadow_as_ignorance: Option<String>,
}

impl MassModel {
    pub fn with_shadow(mut self, class: impl Into<String>) -> Self {
        self.shadow_as_ignorance = Some(class.into());
        self
    }

    fn weight(&self, certainty: Certainty) -> Option<f64> {
        match certainty {
            Certainty::Level(level) => Some(self.weights.weight(level)),
            Certainty::Weight(w) if (0.0..=1.0).contains(&w) => Some(w),
            Certainty::Weight(_) => None,
        }
    }
}

/// Mass function of one expert on one tile. Focal elements are singletons
/// and the whole frame.
pub fn annotation_to_mass(
    annotation: &TileAnnotation,
    frame: &Frame,
    model: &MassModel,
) -> Result<MassFunction, FusionError> {
    let invalid = |reason: String| FusionError::Annotation {
        expert: annotation.expert.clone(),
        reason,
    };
    if let Some(shadow) = &model.shadow_as_ignorance {
        frame.singleton(shadow)?;
    }
    let mut singles = vec![0.0; frame.len()];
    let mut proportion = 0.0;
    for entry in &annotation.entries {
        let index = frame
            .index_of(&entry.class)
            .ok_or_else(|| invalid(format!("unknown class {:?}", entry.class)))?;
        if !(0.0..=1.0).contains(&entry.p) {
            return Err(invalid(format!("proportion {} outside [0,1]", entry.p)));
        }
        let weight = model
            .weight(entry.certainty)
            .ok_or_else(|| invalid(format!("certainty {:?} outside [0,1]", entry.certainty)))?;
        proportion += entry.p;
        if model.shadow_as_ignorance.as_deref() == Some(entry.class.as_str()) {
            continue;
        }
        singles[index] += entry.p * weight;
    }
    if proportion > 1.0 + PROPORTION_TOLERANCE {
        return Err(invalid(format!("proportions sum to {proportion}")));
    }
    let theta = 1.0 - singles.iter().sum::<f64>();
    if theta < -PROPORTION_TOLERANCE {
        return Err(FusionError::Inconsistent {
            expert: annotation.expert.clone(),
            theta,
        });
    }
    let entries = singles
        .into_iter()
        .enumerate()
        .map(|(i, m)| (FocalSet::singleton(i), m))
        .chain(std::iter::once((frame.theta(), theta.max(0.0))));
    Ok(MassFunction::new(frame.clone(), entries)?)
}

/// Fuses the experts of one tile. A single expert's mass is returned as is.
pub fn fuse_tile(
    annotations: &[TileAnnotation],
    rule: CombinationRule,
    frame: &Frame,
    model: &MassModel,
) -> Result<MassFunction, FusionError> {
    let mut masses = expert_masses(annotations, frame, model)?;
    if masses.len() == 1 {
        return Ok(masses.remove(0));
    }
    Ok(rule.combine(&masses)?)
}

fn expert_masses(
    annotations: &[TileAnnotation],
    frame: &Frame,
    model: &MassModel,
) -> Result<Vec<MassFunction>, FusionError> {
    if annotations.is_empty() {
        return Err(FusionError::NoAnnotation(String::new()));
    }
    annotations
        .iter()
        .map(|a| annotation_to_mass(a, frame, model))
        .collect()
}

/// Settings of [`build_reference_map`].
#[derive(Clone, Debug)]
pub struct ReferenceOptions {
    pub rule: CombinationRule,
    pub criterion: Criterion,
    /// Decision candidates; empty means the singletons.
    pub candidates: Vec<FocalSet>,
    pub model: MassModel,
}

impl ReferenceOptions {
    pub fn new(rule: CombinationRule, criterion: Criterion) -> Self {
        Self {
            rule,
            criterion,
            candidates: Vec::new(),
            model: MassModel::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceEntry {
    pub tile_id: String,
    pub fused: MassFunction,
    pub decision: FocalSet,
    /// Conjunctive conflict between the tile's experts.
    pub conflict: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceMap {
    pub frame: Frame,
    pub rule: CombinationRule,
    pub criterion: Criterion,
    pub entries: Vec<ReferenceEntry>,
}

impl ReferenceMap {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn mean_conflict(&self) -> f64 {
        if self.entries.is_empty() {
            return 0.0;
        }
        self.entries.iter().map(|e| e.conflict).sum::<f64>() / self.entries.len() as f64
    }

    pub fn decided_label(&self, index: usize) -> String {
        self.frame.format_set(self.entries[index].decision)
    }

    pub fn decided_labels(&self) -> Vec<String> {
        (0..self.entries.len())
            .map(|i| self.decided_label(i))
            .collect()
    }

    /// Fraction of tiles decided differently by another map of the same tiles.
    pub fn disagreement_rate(&self, other: &ReferenceMap) -> Result<f64, FusionError> {
        if self.frame != other.frame
            || self.entries.len() != other.entries.len()
            || self
                .entries
                .iter()
                .zip(&other.entries)
                .any(|(a, b)| a.tile_id != b.tile_id)
        {
            return Err(FusionError::MapMismatch);
        }
        if self.entries.is_empty() {
            return Ok(0.0);
        }
        let differ = self
            .entries
            .iter()
            .zip(&other.entries)
            .filter(|(a, b)| a.decision != b.decision)
            .count();
        Ok(differ as f64 / self.entries.len() as f64)
    }

    /// `tile_id,decided_label,conflict` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["tile_id", "decided_label", "conflict"])?;
        for (i, e) in self.entries.iter().enumerate() {
            writer.write_record([
                e.tile_id.as_str(),
                &self.decided_label(i),
                &e.conflict.to_string(),
            ])?;
        }
        writer.flush()?;
        Ok(())
    }

    /// Fused masses of every tile, readable back with [`ReferenceSidecar`].
    pub fn write_json<W: Write>(&self, out: W) -> serde_json::Result<()> {
        #[derive(Serialize)]
        struct Tile<'a> {
            id: &'a str,
            decision: String,
            conflict: f64,
            masses: Masses<'a>,
        }
        #[derive(Serialize)]
        struct Wire<'a> {
            frame: &'a [String],
            rule: CombinationRule,
            decision: Criterion,
            tiles: Vec<Tile<'a>>,
        }
        let wire = Wire {
            frame: self.frame.labels(),
            rule: self.rule,
            decision: self.criterion,
            tiles: self
                .entries
                .iter()
                .enumerate()
                .map(|(i, e)| Tile {
                    id: &e.tile_id,
                    decision: self.decided_label(i),
                    conflict: e.conflict,
                    masses: Masses(&e.fused),
                })
                .collect(),
        };
        serde_json::to_writer_pretty(out, &wire)
    }
}

/// Reader for the JSON written by [`ReferenceMap::write_json`].
#[derive(Clone, Debug, Deserialize)]
pub struct ReferenceSidecar {
    pub frame: Vec<String>,
    pub tiles: Vec<SidecarTile>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct SidecarTile {
    pub id: String,
    pub decision: String,
    pub conflict: f64,
    pub masses: BTreeMap<String, f64>,
}

impl ReferenceSidecar {
    /// Tile ids with their fused mass functions.
    pub fn masses(&self) -> Result<(Frame, Vec<(String, MassFunction)>), BeliefError> {
        let frame = Frame::new(self.frame.iter().cloned())?;
        let tiles = self
            .tiles
            .iter()
            .map(|t| Ok((t.id.clone(), mass_from_keys(frame.clone(), &t.masses)?)))
            .collect::<Result<Vec<_>, BeliefError>>()?;
        Ok((frame, tiles))
    }
}

fn reference_entry(
    tile: &AnnotatedTile,
    frame: &Frame,
    options: &ReferenceOptions,
    candidates: &[FocalSet],
) -> Result<ReferenceEntry, FusionError> {
    if tile.experts.is_empty() {
        return Err(FusionError::NoAnnotation(tile.id.clone()));
    }
    let masses = expert_masses(&tile.experts, frame, &options.model)?;
    let (fused, tile_conflict) = if masses.len() == 1 {
        (masses[0].clone(), 0.0)
    } else {
        (options.rule.combine(&masses)?, conflict(&masses)?)
    };
    let decision = decide(&fused, options.criterion, candidates)?;
    Ok(ReferenceEntry {
        tile_id: tile.id.clone(),
        fused,
        decision,
        conflict: tile_conflict,
    })
}

/// Fuses and decides every tile. Output order follows the input order.
pub fn build_reference_map(
    tiles: &[AnnotatedTile],
    frame: &Frame,
    options: &ReferenceOptions,
) -> Result<ReferenceMap, FusionError> {
    let candidates: Vec<FocalSet> = if options.candidates.is_empty() {
        frame.singletons().collect()
    } else {
        for &c in &options.candidates {
            frame.check(c)?;
        }
        options.candidates.clone()
    };
    let entries = tiles
        .par_iter()
        .map(|tile| reference_entry(tile, frame, options, &candidates))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ReferenceMap {
        frame: frame.clone(),
        rule: options.rule,
        criterion: options.criterion,
        entries,
    })
}

/// Rewrites a mass function onto `target`, sending each source label to a
/// non-empty set of target labels. Labels missing from `mapping` keep
/// their own name in the target frame.
pub fn merge_classes(
    m: &MassFunction,
    target: &Frame,
    mapping: &BTreeMap<String, Vec<String>>,
) -> Result<MassFunction, FusionError> {
    let source = m.frame();
    if let Some(unknown) = mapping.keys().find(|k| source.index_of(k).is_none()) {
        return Err(FusionError::Mapping(format!(
            "unknown source label {unknown:?}"
        )));
    }
    let images = source
        .labels()
        .iter()
        .map(|label| {
            let image = match mapping.get(label) {
                Some(targets) => target.set_of(targets),
                None => target.singleton(label),
            }
            .map_err(|e| FusionError::Mapping(format!("{label}: {e}")))?;
            if image.is_empty() {
                return Err(FusionError::Mapping(format!(
                    "{label} maps to the empty set"
                )));
            }
            Ok(image)
        })
        .collect::<Result<Vec<FocalSet>, FusionError>>()?;

    let mut acc: BTreeMap<FocalSet, f64> = BTreeMap::new();
    for (set, mass) in m.focal_elements() {
        let image = set
            .members()
            .fold(FocalSet::EMPTY, |u, i| u.union(images[i]));
        *acc.entry(image).or_insert(0.0) += mass;
    }
    Ok(MassFunction::from_accumulated(target.clone(), acc))
}
