//! Two experts on a two-class frame: conjunctive and PCR tables with bel,
//! pl and betP for every subset.

use sonar_belief::{conjunctive_combine, pcr_breakdown, MassFunction};

fn print_table(title: &str, m: &MassFunction) -> anyhow::Result<()> {
    let f = m.frame();
    println!("{title}");
    println!(
        "  {:<6} {:>6} {:>6} {:>6} {:>7}",
        "set", "m", "bel", "pl", "betP"
    );
    for x in f.subsets() {
        let betp = if x.is_empty() {
            "-".to_string()
        } else {
            format!("{:.4}", m.pignistic(x)?)
        };
        println!(
            "  {:<6} {:>6.3} {:>6.3} {:>6.3} {:>7}",
            f.format_set(x),
            m.mass(x),
            m.credibility(x)?,
            m.plausibility(x)?,
            betp
        );
    }
    Ok(())
}

fn main() -> anyhow::Result<()> {
    let frame = sonar_belief::Frame::new(["A", "B"])?;
    // first expert: A with certainty 0.6; second: half A (0.6), half B (0.4)
    let m1 = MassFunction::from_labels(frame.clone(), &[("A", 0.6), ("A|B", 0.4)])?;
    let m2 = MassFunction::from_labels(frame.clone(), &[("A", 0.3), ("B", 0.2), ("A|B", 0.5)])?;

    print_table(
        "conjunctive",
        &conjunctive_combine(&[m1.clone(), m2.clone()])?,
    )?;

    let pcr = pcr_breakdown(&[m1, m2])?;
    print_table("PCR", &pcr.combined)?;
    for (set, extra) in &pcr.redistributed {
        println!(
            "  {}: {:.2} kept + {:.2} redistributed",
            frame.format_set(*set),
            pcr.conjunctive.mass(*set),
            extra
        );
    }
    Ok(())
}
