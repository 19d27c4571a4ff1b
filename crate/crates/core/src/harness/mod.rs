//! Synthetic corpus generation and the repeated-split evaluation protocol.

pub mod eval;
pub mod synth;

pub use eval::{
    confidence_interval, evaluate, fit_model, good_classification_rate, EvalConfig, EvalData,
    EvalReport, MlpSettings, TargetMode,
};
pub use synth::{synth_corpus, ClassRecipe, Corpus, ExpertProfile, SynthConfig, Texture};
