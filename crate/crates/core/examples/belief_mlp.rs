//! Training a network on belief targets: fused masses become targets
//! scaled to their largest singleton, and outputs go back to a mass
//! function for the decision.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sonar_belief::mlp::{
    belief_targets, init_network, outputs_to_mass, train, BeliefSample, TrainConfig,
};
use sonar_belief::{decide, Criterion, Frame, MassFunction};

fn main() -> anyhow::Result<()> {
    let frame = Frame::new(["rock", "sand", "silt"])?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let centres = [[0.2, 0.2], [0.8, 0.3], [0.5, 0.8]];

    // each sample's mass favours its class, with some ignorance and a
    // little support for a neighbour
    let mut samples = Vec::new();
    for k in 0..150 {
        let c = k % 3;
        let x = vec![
            centres[c][0] + rng.gen_range(-0.1..0.1),
            centres[c][1] + rng.gen_range(-0.1..0.1),
        ];
        let labels = frame.labels();
        let main = rng.gen_range(0.4..0.7);
        let side = rng.gen_range(0.0..0.2);
        let m = MassFunction::from_labels(
            frame.clone(),
            &[
                (labels[c].as_str(), main),
                (labels[(c + 1) % 3].as_str(), side),
                ("rock|sand|silt", 1.0 - main - side),
            ],
        )?;
        samples.push(BeliefSample::from_mass(x, &m)?);
    }
    println!("first target: {:?}", samples[0].target);

    let mut net = init_network(&[2, 6, 3], 4, 0.5)?;
    let cfg = TrainConfig {
        eta: 0.5,
        epochs: 300,
        ..TrainConfig::default()
    };
    let report = train(&mut net, &samples, &cfg)?;
    println!(
        "error: epoch 1 {:.4}, last {:.4}",
        report.epoch_errors[0],
        report.final_error()
    );

    let singles: Vec<_> = frame.singletons().collect();
    for (c, centre) in centres.iter().enumerate() {
        let out = net.predict(centre)?;
        let m = outputs_to_mass(&out, &frame)?.mass;
        let d = decide(&m, Criterion::MaxPignistic, &singles)?;
        println!(
            "centre of {}: outputs {:?} -> {}",
            frame.labels()[c],
            out.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>(),
            frame.format_set(d)
        );
    }
    let m = MassFunction::from_labels(
        frame.clone(),
        &[("sand", 0.3), ("silt", 0.1), ("rock|sand|silt", 0.6)],
    )?;
    println!(
        "targets of sand 0.3 / silt 0.1 / ignorance 0.6: {:?}",
        belief_targets(&m)?
    );
    Ok(())
}
