//! 24 co-occurrence features of three synthetic textures. The stripes show
//! how a quarter turn swaps the 0° and 90° blocks.

use sonar_belief::texture::{extract24, Direction, GrayTile, Haralick, DEFAULT_LEVELS};

fn show(tile: &GrayTile) -> anyhow::Result<()> {
    let f = extract24(tile, DEFAULT_LEVELS)?;
    println!("{}", tile.id());
    println!(
        "  {:>5} {}",
        "dir",
        Haralick::NAMES.map(|n| format!("{n:>12}")).join("")
    );
    for d in Direction::ALL {
        let row: String = f.block(d).iter().map(|v| format!("{v:>12.4}")).collect();
        println!("  {:>4}° {row}", d.degrees());
    }
    Ok(())
}

fn main() -> anyhow::Result<()> {
    let stripes = GrayTile::from_fn(
        "vertical stripes",
        32,
        32,
        |x, _| if x % 4 < 2 { 40 } else { 210 },
    )?;
    let flat = GrayTile::from_fn("smooth ramp", 32, 32, |x, y| ((x + y) * 4) as u8)?;
    let speckle = GrayTile::from_fn("speckle", 32, 32, |x, y| {
        ((x * 7919 + y * 104729) % 251) as u8
    })?;
    for t in [&stripes, &flat, &speckle] {
        show(t)?;
    }
    let turned = stripes.rotate90();
    show(&GrayTile::new(
        "stripes turned a quarter",
        turned.width(),
        turned.height(),
        turned.pixels().to_vec(),
    )?)
}
