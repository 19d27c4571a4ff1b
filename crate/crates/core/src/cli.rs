//! Command-line front end. Every subcommand reads and writes the file
//! formats of the library modules; all randomness comes from `--seed`.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::belief::{Criterion, FocalSet, MassFunction};
use crate::combination::{auto_conflict, conflict, CombinationRule};
use crate::error::MlpError;
use crate::expert::{
    build_reference_map, AnnotationSet, MassModel, ReferenceOptions, ReferenceSidecar,
};
use crate::harness::eval::{evaluate, fit_model, EvalConfig, EvalData, MlpSettings, TargetMode};
use crate::harness::synth::{read_labels, synth_corpus, SynthConfig};
use crate::mlp::{BeliefSample, Model, TrainConfig};
use crate::texture::{
    extract24, read_features_csv, write_features_csv, FeatureVector, GrayTile, DEFAULT_LEVELS,
};

#[derive(Debug, Parser)]
#[command(
    name = "sonar-belief",
    version,
    about = "Fuse uncertain expert annotations with belief functions and train a belief-target MLP",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic annotated texture corpus
    Synth(SynthArgs),
    /// Extract the 24 co-occurrence features of every PGM tile in a directory
    Features(FeaturesArgs),
    /// Fuse expert annotations per tile and decide a reference label map
    Reality(RealityArgs),
    /// Combine mass functions
    Fuse(FuseArgs),
    /// Train a network on features and fused reference masses
    Train(TrainArgs),
    /// Classify feature rows with a trained model
    Classify(ClassifyArgs),
    /// Repeated random-split evaluation
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    tiles_per_class: usize,
    #[arg(long, default_value_t = 0.1)]
    error_rate: f64,
    #[arg(long, default_value_t = 0.1)]
    mixed: f64,
    #[arg(long, default_value_t = 64)]
    tile_size: usize,
    /// JSON synthetic configuration; overrides the other corpus flags except --seed
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FeaturesArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_LEVELS)]
    levels: usize,
}

#[derive(Debug, Args)]
struct RealityArgs {
    #[arg(long, default_value = "pcr")]
    rule: CombinationRule,
    #[arg(long, default_value = "betp")]
    decision: Criterion,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Fused mass sidecar; defaults to the output path with a .json extension
    #[arg(long)]
    masses: Option<PathBuf>,
    /// Class whose area counts as ignorance
    #[arg(long)]
    shadow: Option<String>,
    /// Comma-separated decision candidates such as `A,B,A|B`; default singletons
    #[arg(long)]
    candidates: Option<String>,
    /// Second rule whose decisions are compared with --rule
    #[arg(long)]
    compare_rule: Option<CombinationRule>,
}

#[derive(Debug, Args)]
struct FuseArgs {
    #[arg(long)]
    rule: CombinationRule,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// CSV with the conflict and each input's order-3 auto-conflict
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct NetArgs {
    /// Hidden layer sizes, comma-separated
    #[arg(long, value_delimiter = ',', default_value = "30")]
    hidden: Vec<usize>,
    #[arg(long, default_value_t = 0.1)]
    eta: f64,
    #[arg(long, default_value_t = 100)]
    epochs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    slope: f64,
    #[arg(long, default_value_t = 0.5)]
    init_range: f64,
    #[arg(long)]
    no_shuffle: bool,
}

impl NetArgs {
    fn settings(&self) -> MlpSettings {
        MlpSettings {
            hidden: self.hidden.clone(),
            slope: self.slope,
            train: TrainConfig {
                eta: self.eta,
                epochs: self.epochs,
                seed: self.seed,
                init_range: self.init_range,
                shuffle: !self.no_shuffle,
            },
        }
    }
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    features: PathBuf,
    /// Fused mass sidecar written by `reality`
    #[arg(long)]
    targets: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "belief")]
    target_mode: TargetMode,
    #[command(flatten)]
    net: NetArgs,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    features: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "betp")]
    decision: Criterion,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    features: PathBuf,
    #[arg(long)]
    annotations: PathBuf,
    /// True labels (`tile_id,label`), scored separately when given
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long, default_value_t = 30)]
    trials: usize,
    #[arg(long, default_value_t = 2.0 / 3.0)]
    split: f64,
    #[arg(long, default_value = "pcr")]
    rule: CombinationRule,
    #[arg(long, default_value = "betp")]
    decision: Criterion,
    #[arg(long, default_value = "belief")]
    target_mode: TargetMode,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    net: NetArgs,
}

/// Parses `args` (program name first) and runs the subcommand. Returns the
/// process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Synth(a) => synth(a),
        Command::Features(a) => features(a),
        Command::Reality(a) => reality(a),
        Command::Fuse(a) => fuse(a),
        Command::Train(a) => train_cmd(a),
        Command::Classify(a) => classify(a),
        Command::Eval(a) => eval(a),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    serde_json::from_reader(BufReader::new(file))
        .with_context(|| format!("parsing {}", path.display()))
}

fn read_features(path: &Path) -> Result<Vec<FeatureVector>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_features_csv(BufReader::new(file)).with_context(|| format!("parsing {}", path.display()))
}

fn synth(a: SynthArgs) -> Result<()> {
    let cfg = match &a.config {
        Some(path) => SynthConfig {
            seed: a.seed,
            ..read_json(path)?
        },
        None => {
            let mut cfg = SynthConfig::desk(a.tiles_per_class, a.error_rate, a.seed);
            cfg.mixed_fraction = a.mixed;
            cfg.tile_size = a.tile_size;
            cfg
        }
    };
    let corpus = synth_corpus(&cfg)?;
    corpus
        .write(&a.out)
        .with_context(|| format!("writing corpus to {}", a.out.display()))?;
    eprintln!(
        "wrote {} tiles ({} mixed) to {}",
        corpus.tiles.len(),
        corpus.mixed_count(),
        a.out.display()
    );
    Ok(())
}

fn features(a: FeaturesArgs) -> Result<()> {
    let mut paths: Vec<PathBuf> = fs::read_dir(&a.input)
        .with_context(|| format!("reading {}", a.input.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    paths.retain(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm")));
    paths.sort();
    if paths.is_empty() {
        bail!("no .pgm tiles in {}", a.input.display());
    }
    let feats = paths
        .par_iter()
        .map(|p| Ok(extract24(&GrayTile::read_pgm(p)?, a.levels)?))
        .collect::<Result<Vec<_>>>()?;
    write_features_csv(&feats, create(&a.out)?)?;
    eprintln!("wrote {} feature rows to {}", feats.len(), a.out.display());
    Ok(())
}

fn parse_candidates(list: &str, frame: &crate::belief::Frame) -> Result<Vec<FocalSet>> {
    list.split(',')
        .map(|s| Ok(frame.parse_set(s.trim())?))
        .collect()
}

fn reality(a: RealityArgs) -> Result<()> {
    let set: AnnotationSet = read_json(&a.input)?;
    let frame = set.frame()?;
    let mut options = ReferenceOptions::new(a.rule, a.decision);
    if let Some(shadow) = a.shadow {
        options.model = MassModel::default().with_shadow(shadow);
    }
    if let Some(list) = &a.candidates {
        options.candidates = parse_candidates(list, &frame)?;
    }
    let map = build_reference_map(&set.tiles, &frame, &options)?;
    let mut csv_out = create(&a.out)?;
    map.write_csv(&mut csv_out)?;
    csv_out.flush()?;
    let sidecar = a.masses.unwrap_or_else(|| a.out.with_extension("json"));
    let mut json_out = create(&sidecar)?;
    map.write_json(&mut json_out)?;
    json_out.flush()?;
    eprintln!(
        "{} tiles, mean conflict {:.4}",
        map.len(),
        map.mean_conflict()
    );
    if let Some(other) = a.compare_rule {
        let compared = build_reference_map(
            &set.tiles,
            &frame,
            &ReferenceOptions {
                rule: other,
                ..options
            },
        )?;
        eprintln!(
            "decision disagreement {} vs {}: {:.4}",
            a.rule,
            other,
            map.disagreement_rate(&compared)?
        );
    }
    Ok(())
}

fn fuse(a: FuseArgs) -> Result<()> {
    let sources: Vec<MassFunction> = read_json(&a.input)?;
    let fused = a.rule.combine(&sources)?;
    let mut out = create(&a.out)?;
    serde_json::to_writer_pretty(&mut out, &fused)?;
    writeln!(out)?;
    out.flush()?;
    if let Some(path) = &a.report {
        let mut w = csv::Writer::from_writer(create(path)?);
        w.write_record(["measure", "source", "value"])?;
        w.write_record(["conflict", "all", &conflict(&sources)?.to_string()])?;
        for (i, m) in sources.iter().enumerate() {
            w.write_record([
                "auto_conflict_3",
                &i.to_string(),
                &auto_conflict(m, 3)?.to_string(),
            ])?;
        }
        w.flush()?;
    }
    Ok(())
}

fn train_cmd(a: TrainArgs) -> Result<()> {
    let feats = read_features(&a.features)?;
    let sidecar: ReferenceSidecar = read_json(&a.targets)?;
    let (frame, masses) = sidecar.masses()?;
    let by_id: std::collections::BTreeMap<&str, (usize, &MassFunction)> = masses
        .iter()
        .enumerate()
        .map(|(i, (id, m))| (id.as_str(), (i, m)))
        .collect();
    let mut samples = Vec::new();
    let mut skipped = 0;
    for f in &feats {
        let (i, m) = *by_id
            .get(f.tile_id.as_str())
            .with_context(|| format!("tile {} has no target", f.tile_id))?;
        match a.target_mode {
            TargetMode::Belief => match BeliefSample::from_mass(f.values.to_vec(), m) {
                Ok(s) => samples.push(s),
                Err(MlpError::NoSingletonMass) => skipped += 1,
                Err(e) => return Err(e.into()),
            },
            TargetMode::Crisp => {
                let decision = frame.parse_set(&sidecar.tiles[i].decision)?;
                if !decision.is_singleton() {
                    skipped += 1;
                    continue;
                }
                let class = decision.members().next().unwrap_or(0);
                samples.push(BeliefSample::crisp(f.values.to_vec(), class, frame.len()));
            }
        }
    }
    let settings = a.net.settings();
    let model = fit_model(&frame, &samples, &settings, settings.train.seed)?;
    let mut out = create(&a.out)?;
    serde_json::to_writer(&mut out, &model)?;
    out.flush()?;
    eprintln!("trained on {} tiles, skipped {}", samples.len(), skipped);
    Ok(())
}

fn classify(a: ClassifyArgs) -> Result<()> {
    let model: Model = read_json(&a.model)?;
    let feats = read_features(&a.features)?;
    let mut w = csv::Writer::from_writer(create(&a.out)?);
    w.write_record(["tile_id", "label"])?;
    for f in &feats {
        let class = model.classify(&f.values, a.decision)?;
        w.write_record([f.tile_id.as_str(), model.classes[class].as_str()])?;
    }
    w.flush()?;
    Ok(())
}

fn eval(a: EvalArgs) -> Result<()> {
    let feats = read_features(&a.features)?;
    let set: AnnotationSet = read_json(&a.annotations)?;
    let labels = match &a.labels {
        Some(path) => {
            Some(read_labels(path).with_context(|| format!("reading {}", path.display()))?)
        }
        None => None,
    };
    let data = EvalData::align(&feats, &set, labels.as_deref())?;
    let cfg = EvalConfig {
        rule: a.rule,
        criterion: a.decision,
        targets: a.target_mode,
        mlp: a.net.settings(),
        trials: a.trials,
        split: a.split,
        seed: a.net.seed,
    };
    let report = evaluate(&data, &cfg)?;
    let mut out = create(&a.out)?;
    report.write_csv(&mut out)?;
    out.flush()?;
    match report.truth_mean {
        Some(t) => eprintln!(
            "mean rate {:.4} [{:.4}; {:.4}], against true labels {:.4}",
            report.mean, report.ci_low, report.ci_high, t
        ),
        None => eprintln!(
            "mean rate {:.4} [{:.4}; {:.4}]",
            report.mean, report.ci_low, report.ci_high
        ),
    }
    Ok(())
}
