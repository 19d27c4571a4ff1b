//! Repeated random splits on a synthetic corpus, scored against the fused
//! expert reference and against the true labels, for belief and crisp
//! targets.

use sonar_belief::harness::{
    evaluate, synth_corpus, EvalConfig, EvalData, SynthConfig, TargetMode,
};
use sonar_belief::texture::{extract24, DEFAULT_LEVELS};

fn main() -> anyhow::Result<()> {
    let trials = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(10);
    let corpus = synth_corpus(&SynthConfig::desk(60, 0.2, 11))?;
    println!(
        "{} tiles, {} mixed",
        corpus.tiles.len(),
        corpus.mixed_count()
    );

    let features = corpus
        .tiles
        .iter()
        .map(|t| extract24(&t.tile, DEFAULT_LEVELS))
        .collect::<Result<Vec<_>, _>>()?;
    let truth: Vec<(String, String)> = corpus
        .tiles
        .iter()
        .map(|t| (t.tile.id().to_string(), t.truth.clone()))
        .collect();
    let data = EvalData::align(&features, &corpus.annotation_set(), Some(&truth))?;

    for targets in [TargetMode::Belief, TargetMode::Crisp] {
        let cfg = EvalConfig {
            trials,
            targets,
            ..EvalConfig::default()
        };
        let r = evaluate(&data, &cfg)?;
        let (tl, th) = r.truth_ci.unwrap_or((f64::NAN, f64::NAN));
        println!(
            "{targets:?}: reference {:.4} [{:.4}; {:.4}], truth {:.4} [{tl:.4}; {th:.4}]",
            r.mean,
            r.ci_low,
            r.ci_high,
            r.truth_mean.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
