//! Three sources, three rules: where the conflict goes, and how the
//! auto-conflict of a source grows with the number of copies combined.

use sonar_belief::{auto_conflict, conflict, CombinationRule, Frame, MassFunction};

fn main() -> anyhow::Result<()> {
    let f = Frame::new(["rock", "sand", "silt"])?;
    let sources = [
        MassFunction::from_labels(
            f.clone(),
            &[("rock", 0.5), ("rock|sand", 0.3), ("rock|sand|silt", 0.2)],
        )?,
        MassFunction::from_labels(f.clone(), &[("sand", 0.6), ("rock|sand|silt", 0.4)])?,
        MassFunction::from_labels(
            f.clone(),
            &[("rock", 0.4), ("silt", 0.3), ("rock|sand|silt", 0.3)],
        )?,
    ];
    println!(
        "conflict between the three sources: {:.4}",
        conflict(&sources)?
    );
    for rule in CombinationRule::ALL {
        let m = rule.combine(&sources)?;
        let masses: Vec<String> = m
            .focal_elements()
            .map(|(s, v)| format!("{}={:.4}", f.format_set(s), v))
            .collect();
        println!("{rule:>12}: {}", masses.join(" "));
        println!(
            "{:>12}  betP {:?}",
            "",
            m.pignistic_singletons()?
                .iter()
                .map(|p| format!("{p:.3}"))
                .collect::<Vec<_>>()
        );
    }
    for (i, s) in sources.iter().enumerate() {
        let k: Vec<String> = (2..=5)
            .map(|n| auto_conflict(s, n).map(|v| format!("{v:.4}")))
            .collect::<Result<_, _>>()?;
        println!("source {i} auto-conflict, orders 2..5: {}", k.join(" "));
    }
    Ok(())
}
