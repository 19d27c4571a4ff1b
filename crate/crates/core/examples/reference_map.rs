//! Expert annotations to fused masses and a decided label per tile,
//! comparing the conjunctive and PCR references.

use sonar_belief::expert::{
    build_reference_map, AnnotatedTile, AnnotationEntry, CertaintyLevel::*, ReferenceOptions,
    TileAnnotation,
};
use sonar_belief::{CombinationRule, Criterion, Frame};

fn main() -> anyhow::Result<()> {
    let frame = Frame::new(["rock", "sand", "ripple"])?;
    let tiles = vec![
        AnnotatedTile {
            id: "t1".into(),
            experts: vec![
                TileAnnotation::new("e1", vec![AnnotationEntry::new("rock", Sure, 1.0)]),
                TileAnnotation::new(
                    "e2",
                    vec![AnnotationEntry::new("rock", ModeratelySure, 1.0)],
                ),
            ],
        },
        AnnotatedTile {
            id: "t2".into(),
            experts: vec![
                TileAnnotation::new(
                    "e1",
                    vec![
                        AnnotationEntry::new("sand", Sure, 0.7),
                        AnnotationEntry::new("ripple", NotSure, 0.3),
                    ],
                ),
                TileAnnotation::new(
                    "e2",
                    vec![AnnotationEntry::new("ripple", ModeratelySure, 1.0)],
                ),
            ],
        },
        AnnotatedTile {
            id: "t3".into(),
            experts: vec![
                TileAnnotation::new("e1", vec![AnnotationEntry::new("sand", NotSure, 1.0)]),
                TileAnnotation::new("e2", vec![AnnotationEntry::new("rock", NotSure, 1.0)]),
            ],
        },
    ];

    let mut maps = Vec::new();
    for rule in [CombinationRule::Conjunctive, CombinationRule::Pcr] {
        let map = build_reference_map(
            &tiles,
            &frame,
            &ReferenceOptions::new(rule, Criterion::MaxPignistic),
        )?;
        println!(
            "{rule}: labels {:?}, mean conflict {:.4}",
            map.decided_labels(),
            map.mean_conflict()
        );
        maps.push(map);
    }
    println!(
        "decision disagreement: {:.3}",
        maps[0].disagreement_rate(&maps[1])?
    );

    let mut csv = Vec::new();
    maps[1].write_csv(&mut csv)?;
    print!("{}", String::from_utf8(csv)?);
    Ok(())
}
