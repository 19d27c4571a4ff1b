//! Repeated random train/test splits over a fused-expert reference.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::belief::{Criterion, Frame};
use crate::combination::CombinationRule;
use crate::error::{HarnessError, MlpError};
use crate::expert::{
    build_reference_map, AnnotatedTile, AnnotationSet, ReferenceMap, ReferenceOptions,
};
use crate::mlp::{init_network_with, train, BeliefSample, FeatureScaler, Model, TrainConfig};
use crate::texture::FeatureVector;

/// Normal-approximation 95% interval.
pub const CI_METHOD: &str = "normal-95";
const Z_95: f64 = 1.96;

/// Fraction of positions where the two label vectors agree.
pub fn good_classification_rate<S: AsRef<str>, T: AsRef<str>>(
    predicted: &[S],
    reference: &[T],
) -> Result<f64, HarnessError> {
    if predicted.len() != reference.len() {
        return Err(HarnessError::LengthMismatch(
            predicted.len(),
            reference.len(),
        ));
    }
    if predicted.is_empty() {
        return Err(HarnessError::EmptyLabels);
    }
    let good = predicted
        .iter()
        .zip(reference)
        .filter(|(p, r)| p.as_ref() == r.as_ref())
        .count();
    Ok(good as f64 / predicted.len() as f64)
}

/// Mean with `mean ± 1.96 · sd / √n`, `sd` the sample standard deviation.
/// A single value gives a zero-width interval.
pub fn confidence_interval(values: &[f64]) -> (f64, f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, mean, mean);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let half = Z_95 * var.sqrt() / n.sqrt();
    (mean, mean - half, mean + half)
}

/// What the network is trained against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetMode {
    /// Singleton masses scaled to a unit maximum.
    Belief,
    /// One-hot of the decided reference class.
    Crisp,
}

impl FromStr for TargetMode {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "belief" => Ok(TargetMode::Belief),
            "crisp" => Ok(TargetMode::Crisp),
            other => Err(HarnessError::EvalConfig(format!(
                "unknown target mode {other:?}"
            ))),
        }
    }
}

impl fmt::Display for TargetMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TargetMode::Belief => "belief",
            TargetMode::Crisp => "crisp",
        })
    }
}

/// Network shape and training settings shared by every trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlpSettings {
    pub hidden: Vec<usize>,
    pub slope: f64,
    pub train: TrainConfig,
}

impl Default for MlpSettings {
    fn default() -> Self {
        Self {
            hidden: vec![30],
            slope: 1.0,
            train: TrainConfig::default(),
        }
    }
}

/// Trains a model on feature vectors and targets. Inputs are standardized
/// with statistics of the training rows.
pub fn fit_model(
    frame: &Frame,
    samples: &[BeliefSample],
    settings: &MlpSettings,
    seed: u64,
) -> Result<Model, MlpError> {
    let first = samples.first().ok_or(MlpError::NoSamples)?;
    let scaler = FeatureScaler::fit(samples.iter().map(|s| s.features.as_slice()))
        .ok_or(MlpError::NoSamples)?;
    let scaled: Vec<BeliefSample> = samples
        .iter()
        .map(|s| BeliefSample {
            features: scaler.transform(&s.features),
            target: s.target.clone(),
        })
        .collect();
    let mut sizes = vec![first.features.len()];
    sizes.extend(&settings.hidden);
    sizes.push(frame.len());
    let mut network = init_network_with(
        &sizes,
        seed,
        settings.train.init_range,
        settings.slope,
        true,
    )?;
    let cfg = TrainConfig {
        seed,
        ..settings.train.clone()
    };
    train(&mut network, &scaled, &cfg)?;
    Ok(Model {
        classes: frame.labels().to_vec(),
        network,
        scaler: Some(scaler),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub rule: CombinationRule,
    pub criterion: Criterion,
    pub targets: TargetMode,
    pub mlp: MlpSettings,
    pub trials: usize,
    /// Training share of each split.
    pub split: f64,
    pub seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            rule: CombinationRule::Pcr,
            criterion: Criterion::MaxPignistic,
            targets: TargetMode::Belief,
            mlp: MlpSettings::default(),
            trials: 30,
            split: 2.0 / 3.0,
            seed: 0,
        }
    }
}

/// Features, annotations and optional true labels of the same tiles.
#[derive(Clone, Debug)]
pub struct EvalData {
    pub frame: Frame,
    pub ids: Vec<String>,
    pub features: Vec<Vec<f64>>,
    pub annotations: Vec<AnnotatedTile>,
    pub truth: Option<Vec<String>>,
}

impl EvalData {
    /// Aligns annotations and labels on the order of the feature rows.
    pub fn align(
        features: &[FeatureVector],
        annotations: &AnnotationSet,
        truth: Option<&[(String, String)]>,
    ) -> Result<Self, HarnessError> {
        let frame = annotations.frame()?;
        let by_id: BTreeMap<&str, &AnnotatedTile> = annotations
            .tiles
            .iter()
            .map(|t| (t.id.as_str(), t))
            .collect();
        let labels: Option<BTreeMap<&str, &str>> =
            truth.map(|t| t.iter().map(|(i, l)| (i.as_str(), l.as_str())).collect());
        let mut data = EvalData {
            frame,
            ids: Vec::with_capacity(features.len()),
            features: Vec::with_capacity(features.len()),
            annotations: Vec::with_capacity(features.len()),
            truth: labels.as_ref().map(|_| Vec::with_capacity(features.len())),
        };
        for f in features {
            let tile = by_id
                .get(f.tile_id.as_str())
                .ok_or_else(|| HarnessError::MissingTile(f.tile_id.clone()))?;
            data.ids.push(f.tile_id.clone());
            data.features.push(f.values.to_vec());
            data.annotations.push((*tile).clone());
            if let (Some(labels), Some(out)) = (&labels, data.truth.as_mut()) {
                let label = labels
                    .get(f.tile_id.as_str())
                    .ok_or_else(|| HarnessError::MissingTile(f.tile_id.clone()))?;
                out.push(label.to_string());
            }
        }
        Ok(data)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialResult {
    pub trial: usize,
    /// Agreement with the fused-expert reference.
    pub rate: f64,
    /// Agreement with the true labels, when known.
    pub truth_rate: Option<f64>,
    /// Training tiles without singleton mass.
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalReport {
    pub trials: Vec<TrialResult>,
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub truth_mean: Option<f64>,
    pub truth_ci: Option<(f64, f64)>,
    pub ci_method: &'static str,
    pub config: EvalConfig,
}

impl EvalReport {
    /// `trial,rate,truth_rate` rows after a `#` line echoing the
    /// configuration, then a summary header and line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let c = &self.config;
        writeln!(
            out,
            "# rule={} decision={} targets={} split={} trials={} seed={} hidden={:?} slope={} eta={} epochs={} init_range={} shuffle={}",
            c.rule,
            c.criterion,
            c.targets,
            c.split,
            c.trials,
            c.seed,
            c.mlp.hidden,
            c.mlp.slope,
            c.mlp.train.eta,
            c.mlp.train.epochs,
            c.mlp.train.init_range,
            c.mlp.train.shuffle
        )?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        writeln!(out, "trial,rate,truth_rate")?;
        for t in &self.trials {
            writeln!(out, "{},{},{}", t.trial, t.rate, opt(t.truth_rate))?;
        }
        writeln!(
            out,
            "mean,ci_low,ci_high,trials,truth_mean,truth_ci_low,truth_ci_high,ci_method"
        )?;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            self.mean,
            self.ci_low,
            self.ci_high,
            self.trials.len(),
            opt(self.truth_mean),
            opt(self.truth_ci.map(|c| c.0)),
            opt(self.truth_ci.map(|c| c.1)),
            self.ci_method
        )
    }
}

/// Seed of trial `trial`, spread with splitmix64.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    let mut z = seed.wrapping_add((trial as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn run_trial(
    data: &EvalData,
    reference: &ReferenceMap,
    reference_labels: &[String],
    cfg: &EvalConfig,
    trial: usize,
) -> Result<TrialResult, HarnessError> {
    let seed = trial_seed(cfg.seed, trial);
    let n = data.len();
    let n_train = (cfg.split * n as f64).round() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (train_idx, test_idx) = order.split_at(n_train);

    let mut skipped = 0;
    let mut samples = Vec::with_capacity(train_idx.len());
    for &i in train_idx {
        let entry = &reference.entries[i];
        let sample = match cfg.targets {
            TargetMode::Belief => {
                match BeliefSample::from_mass(data.features[i].clone(), &entry.fused) {
                    Ok(s) => s,
                    Err(MlpError::NoSingletonMass) => {
                        skipped += 1;
                        continue;
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            TargetMode::Crisp => {
                let class = entry.decision.members().next().unwrap_or(0);
                BeliefSample::crisp(data.features[i].clone(), class, data.frame.len())
            }
        };
        samples.push(sample);
    }
    let model = fit_model(&data.frame, &samples, &cfg.mlp, seed)?;

    let predicted = test_idx
        .iter()
        .map(|&i| {
            let class = model.classify(&data.features[i], cfg.criterion)?;
            Ok(data.frame.labels()[class].clone())
        })
        .collect::<Result<Vec<String>, MlpError>>()?;
    let expected: Vec<&String> = test_idx.iter().map(|&i| &reference_labels[i]).collect();
    let rate = good_classification_rate(&predicted, &expected)?;
    let truth_rate = match &data.truth {
        Some(truth) => {
            let expected: Vec<&String> = test_idx.iter().map(|&i| &truth[i]).collect();
            Some(good_classification_rate(&predicted, &expected)?)
        }
        None => None,
    };
    Ok(TrialResult {
        trial: trial + 1,
        rate,
        truth_rate,
        skipped,
    })
}

/// Runs `cfg.trials` independent split/train/test rounds. Trials run in
/// parallel; results are ordered by trial index.
pub fn evaluate(data: &EvalData, cfg: &EvalConfig) -> Result<EvalReport, HarnessError> {
    if cfg.trials == 0 {
        return Err(HarnessError::EvalConfig("trials must be at least 1".into()));
    }
    if !(cfg.split > 0.0 && cfg.split < 1.0) {
        return Err(HarnessError::EvalConfig(
            "split must lie strictly between 0 and 1".into(),
        ));
    }
    let n = data.len();
    let n_train = (cfg.split * n as f64).round() as usize;
    if n_train == 0 || n_train >= n {
        return Err(HarnessError::TooFewTiles(n));
    }
    if data.features.len() != n
        || data.annotations.len() != n
        || data.truth.as_ref().is_some_and(|t| t.len() != n)
    {
        return Err(HarnessError::LengthMismatch(
            data.features.len(),
            data.annotations.len(),
        ));
    }
    let reference = build_reference_map(
        &data.annotations,
        &data.frame,
        &ReferenceOptions::new(cfg.rule, cfg.criterion),
    )?;
    let reference_labels = reference.decided_labels();

    let trials = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(data, &reference, &reference_labels, cfg, t))
        .collect::<Result<Vec<_>, _>>()?;

    let rates: Vec<f64> = trials.iter().map(|t| t.rate).collect();
    let (mean, ci_low, ci_high) = confidence_interval(&rates);
    let truth: Option<Vec<f64>> = trials.iter().map(|t| t.truth_rate).collect();
    let (truth_mean, truth_ci) = match truth {
        Some(r) => {
            let (m, lo, hi) = confidence_interval(&r);
            (Some(m), Some((lo, hi)))
        }
        None => (None, None),
    };
    Ok(EvalReport {
        trials,
        mean,
        ci_low,
        ci_high,
        truth_mean,
        truth_ci,
        ci_method: CI_METHOD,
        config: cfg.clone(),
    })
}
