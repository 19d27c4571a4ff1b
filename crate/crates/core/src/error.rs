use thiserror::Error;

use crate::belief::MassReport;

#[derive(Debug, Error)]
pub enum BeliefError {
    #[error("frame must hold between 1 and 16 classes, got {0}")]
    FrameSize(usize),
    #[error("invalid class label {0:?}")]
    InvalidLabel(String),
    #[error("duplicate class label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown class label {0:?}")]
    UnknownLabel(String),
    #[error("invalid subset key {0:?}")]
    InvalidSetKey(String),
    #[error("subset code {bits} does not belong to a frame of {size} classes")]
    SetOutsideFrame { bits: u32, size: usize },
    #[error("invalid mass function: {0}")]
    InvalidMass(MassReport),
    #[error("query on the empty set")]
    EmptyQuery,
    #[error("total conflict: all mass is on the empty set")]
    TotalConflict,
    #[error("no decision candidates")]
    NoCandidates,
    #[error("unknown decision criterion {0:?}")]
    UnknownCriterion(String),
}

#[derive(Debug, Error)]
pub enum CombinationError {
    #[error("combination needs at least 2 sources, got {0}")]
    TooFewSources(usize),
    #[error("source {0} is defined on a different frame")]
    FrameMismatch(usize),
    #[error("source {0} puts mass on the empty set")]
    EmptySetMass(usize),
    #[error("auto-conflict order must be at least 2, got {0}")]
    AutoConflictOrder(usize),
    #[error("unknown combination rule {0:?}")]
    UnknownRule(String),
}

#[derive(Debug, Error)]
pub enum FusionError {
    #[error(transparent)]
    Belief(#[from] BeliefError),
    #[error(transparent)]
    Combination(#[from] CombinationError),
    #[error("certainty weights must lie in [0,1] and strictly decrease from sure to not sure")]
    CertaintyWeights,
    #[error("unknown certainty level {0:?}")]
    UnknownCertainty(String),
    #[error("expert {expert}: {reason}")]
    Annotation { expert: String, reason: String },
    #[error("expert {expert}: weighted proportions exceed 1 (ignorance mass {theta})")]
    Inconsistent { expert: String, theta: f64 },
    #[error("tile {0} has no annotation")]
    NoAnnotation(String),
    #[error("class mapping: {0}")]
    Mapping(String),
    #[error("reference maps cover different tiles")]
    MapMismatch,
}

#[derive(Debug, Error)]
pub enum TextureError {
    #[error("tile {id}: {width}x{height} is smaller than 2x2")]
    TileTooSmall {
        id: String,
        width: usize,
        height: usize,
    },
    #[error("tile {id}: expected {expected} pixels, got {actual}")]
    PixelCount {
        id: String,
        expected: usize,
        actual: usize,
    },
    #[error("quantization levels must lie in [2,256], got {0}")]
    Levels(usize),
    #[error("co-occurrence matrix is not normalized (sum {sum})")]
    Unnormalized { sum: f64 },
    #[error("unknown direction {0}")]
    Direction(String),
    #[error("image {path}: {reason}")]
    Image { path: String, reason: String },
}

#[derive(Debug, Error)]
pub enum MlpError {
    #[error("network needs at least an input and an output layer")]
    Layers,
    #[error("layer sizes must be positive")]
    EmptyLayer,
    #[error("expected a vector of length {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },
    #[error("non-finite value during {0}")]
    NonFinite(&'static str),
    #[error("training needs at least one sample")]
    NoSamples,
    #[error("training configuration: {0}")]
    Config(&'static str),
    #[error("target bba has no singleton mass")]
    NoSingletonMass,
    #[error("output layer needs at least 2 units matching the frame, got {outputs} for {classes} classes")]
    OutputSize { outputs: usize, classes: usize },
    #[error("network outputs must be finite and non-negative")]
    InvalidOutputs,
    #[error(transparent)]
    Belief(#[from] BeliefError),
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Fusion(#[from] FusionError),
    #[error(transparent)]
    Texture(#[from] TextureError),
    #[error(transparent)]
    Mlp(#[from] MlpError),
    #[error(transparent)]
    Belief(#[from] BeliefError),
    #[error("invalid synthetic corpus configuration: {0}")]
    SynthConfig(String),
    #[error("label vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("no labels to score")]
    EmptyLabels,
    #[error("invalid evaluation configuration: {0}")]
    EvalConfig(String),
    #[error("too few tiles ({0}) to split into training and test sets")]
    TooFewTiles(usize),
    #[error("tile {0} has features but no annotation")]
    MissingTile(String),
}
