//! Gray-level co-occurrence matrices and six Haralick-style statistics per
//! direction, giving a 24-value feature vector per tile.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, ImageEncoder, ImageFormat};

use crate::error::TextureError;

pub const DEFAULT_LEVELS: usize = 16;

/// Number of statistics per direction.
pub const STATS_PER_DIRECTION: usize = 6;

pub const FEATURE_COUNT: usize = 4 * STATS_PER_DIRECTION;

const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// 8-bit grayscale tile, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayTile {
    id: String,
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayTile {
    pub fn new(
        id: impl Into<String>,
        width: usize,
        height: usize,
        pixels: Vec<u8>,
    ) -> Result<Self, TextureError> {
        let id = id.into();
        if width < 2 || height < 2 {
            return Err(TextureError::TileTooSmall { id, width, height });
        }
        if pixels.len() != width * height {
            return Err(TextureError::PixelCount {
                id,
                expected: width * height,
                actual: pixels.len(),
            });
        }
        Ok(Self {
            id,
            width,
            height,
            pixels,
        })
    }

    pub fn from_fn(
        id: impl Into<String>,
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self, TextureError> {
        let pixels = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Self::new(id, width, height, pixels)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    /// Quarter turn counter-clockwise.
    pub fn rotate90(&self) -> GrayTile {
        let (w, h) = (self.width, self.height);
        let pixels = (0..w)
            .flat_map(|ny| (0..h).map(move |nx| (nx, ny)))
            .map(|(nx, ny)| self.get(w - 1 - ny, nx))
            .collect();
        GrayTile {
            id: self.id.clone(),
            width: h,
            height: w,
            pixels,
        }
    }

    /// Reads an 8-bit binary PGM (P5). The tile id is the file stem.
    pub fn read_pgm(path: &Path) -> Result<Self, TextureError> {
        let err = |reason: String| TextureError::Image {
            path: path.display().to_string(),
            reason,
        };
        let bytes = std::fs::read(path).map_err(|e| err(e.to_string()))?;
        if !bytes.starts_with(b"P5") {
            return Err(err("not a binary PGM (P5) file".into()));
        }
        let img = image::load_from_memory_with_format(&bytes, ImageFormat::Pnm)
            .map_err(|e| err(e.to_string()))?;
        let gray = match img {
            image::DynamicImage::ImageLuma8(g) => g,
            _ => return Err(err("expected 8-bit samples".into())),
        };
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let (w, h) = gray.dimensions();
        Self::new(id, w as usize, h as usize, gray.into_raw())
    }

    pub fn write_pgm<W: Write>(&self, out: W) -> Result<(), TextureError> {
        PnmEncoder::new(out)
            .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
            .write_image(
                &self.pixels,
                self.width as u32,
                self.height as u32,
                ExtendedColorType::L8,
            )
            .map_err(|e| TextureError::Image {
                path: self.id.clone(),
                reason: e.to_string(),
            })
    }
}

/// Pixel-pair directions, in feature order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    D0,
    D45,
    D90,
    D135,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::D0,
        Direction::D45,
        Direction::D90,
        Direction::D135,
    ];

    /// Offset `(dx, dy)` to the neighbour, image rows growing downwards.
    pub fn offset(self) -> (isize, isize) {
        match self {
            Direction::D0 => (1, 0),
            Direction::D45 => (1, -1),
            Direction::D90 => (0, -1),
            Direction::D135 => (-1, -1),
        }
    }

    pub fn degrees(self) -> u32 {
        match self {
            Direction::D0 => 0,
            Direction::D45 => 45,
            Direction::D90 => 90,
            Direction::D135 => 135,
        }
    }
}

impl FromStr for Direction {
    type Err = TextureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Direction::ALL
            .into_iter()
            .find(|d| d.degrees().to_string() == s)
            .ok_or_else(|| TextureError::Direction(s.to_string()))
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.degrees())
    }
}

/// Symmetric, unit-sum co-occurrence matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Glcm {
    levels: usize,
    p: Vec<f64>,
}

impl Glcm {
    /// Wraps a row-major `levels × levels` matrix of probabilities.
    pub fn from_probabilities(levels: usize, p: Vec<f64>) -> Result<Self, TextureError> {
        if p.len() != levels * levels || levels == 0 {
            return Err(TextureError::Levels(levels));
        }
        let sum: f64 = p.iter().sum();
        if p.iter().any(|v| !v.is_finite() || *v < 0.0)
            || (sum - 1.0).abs() > NORMALIZATION_TOLERANCE
        {
            return Err(TextureError::Unnormalized { sum });
        }
        Ok(Self { levels, p })
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.p[i * self.levels + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }
}

fn quantize(value: u8, levels: usize) -> usize {
    usize::from(value) * levels / 256
}

/// Distance-1 co-occurrence matrix in one direction, both pair orders
/// counted.
pub fn cooccurrence(
    tile: &GrayTile,
    direction: Direction,
    levels: usize,
) -> Result<Glcm, TextureError> {
    if !(2..=256).contains(&levels) {
        return Err(TextureError::Levels(levels));
    }
    let (dx, dy) = direction.offset();
    let (w, h) = (tile.width as isize, tile.height as isize);
    if w <= dx.abs() || h <= dy.abs() {
        return Err(TextureError::TileTooSmall {
            id: tile.id.clone(),
            width: tile.width,
            height: tile.height,
        });
    }
    let mut counts = vec![0u64; levels * levels];
    for y in 0..h {
        let ny = y + dy;
        if !(0..h).contains(&ny) {
            continue;
        }
        for x in 0..w {
            let nx = x + dx;
            if !(0..w).contains(&nx) {
                continue;
            }
            let a = quantize(tile.get(x as usize, y as usize), levels);
            let b = quantize(tile.get(nx as usize, ny as usize), levels);
            counts[a * levels + b] += 1;
            counts[b * levels + a] += 1;
        }
    }
    let total: u64 = counts.iter().sum();
    let p = counts
        .into_iter()
        .map(|c| c as f64 / total as f64)
        .collect();
    Ok(Glcm { levels, p })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Haralick {
    pub homogeneity: f64,
    pub contrast: f64,
    pub entropy: f64,
    pub correlation: f64,
    pub directivity: f64,
    pub uniformity: f64,
}

impl Haralick {
    pub const NAMES: [&'static str; STATS_PER_DIRECTION] = [
        "homogeneity",
        "contrast",
        "entropy",
        "correlation",
        "directivity",
        "uniformity",
    ];

    pub fn to_array(self) -> [f64; STATS_PER_DIRECTION] {
        [
            self.homogeneity,
            self.contrast,
            self.entropy,
            self.correlation,
            self.directivity,
            self.uniformity,
        ]
    }
}

/// Homogeneity `Σ p/(1+|i−j|)`, contrast `Σ (i−j)² p`, entropy in bits,
/// correlation (0 when either marginal is constant), directivity as the
/// diagonal mass and uniformity `Σ p²`.
#[allow(clippy::needless_range_loop)]
pub fn haralick6(glcm: &Glcm) -> Result<Haralick, TextureError> {
    let sum: f64 = glcm.p.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(TextureError::Unnormalized { sum });
    }
    let n = glcm.levels;
    let mut row = vec![0.0; n];
    let mut col = vec![0.0; n];
    let (mut homogeneity, mut contrast, mut entropy, mut directivity, mut uniformity) =
        (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let p = glcm.get(i, j);
            if p == 0.0 {
                continue;
            }
            let d = i.abs_diff(j) as f64;
            homogeneity += p / (1.0 + d);
            contrast += d * d * p;
            entropy -= p * p.log2();
            uniformity += p * p;
            if i == j {
                directivity += p;
            }
            row[i] += p;
            col[j] += p;
        }
    }
    let moments = |marginal: &[f64]| {
        let mean: f64 = marginal.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
        let var: f64 = marginal
            .iter()
            .enumerate()
            .map(|(k, p)| (k as f64 - mean).powi(2) * p)
            .sum();
        (mean, var.sqrt())
    };
    let (mu_i, sd_i) = moments(&row);
    let (mu_j, sd_j) = moments(&col);
    let spread = sd_i * sd_j;
    let correlation = if spread > 1e-12 {
        let mut cov = 0.0;
        for i in 0..n {
            for j in 0..n {
                cov += (i as f64 - mu_i) * (j as f64 - mu_j) * glcm.get(i, j);
            }
        }
        cov / spread
    } else {
        0.0
    };
    Ok(Haralick {
        homogeneity,
        contrast,
        entropy: entropy.max(0.0),
        correlation,
        directivity,
        uniformity,
    })
}

/// 24 texture values of a tile: the six statistics for 0°, 45°, 90° and
/// 135°, in that order.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector {
    pub tile_id: String,
    pub values: [f64; FEATURE_COUNT],
}

impl FeatureVector {
    pub fn block(&self, direction: Direction) -> &[f64] {
        let k = Direction::ALL
            .iter()
            .position(|&d| d == direction)
            .unwrap_or(0);
        &self.values[k * STATS_PER_DIRECTION..(k + 1) * STATS_PER_DIRECTION]
    }
}

pub fn extract24(tile: &GrayTile, levels: usize) -> Result<FeatureVector, TextureError> {
    let mut values = [0.0; FEATURE_COUNT];
    for (k, direction) in Direction::ALL.into_iter().enumerate() {
        let stats = haralick6(&cooccurrence(tile, direction, levels)?)?;
        values[k * STATS_PER_DIRECTION..(k + 1) * STATS_PER_DIRECTION]
            .copy_from_slice(&stats.to_array());
    }
    Ok(FeatureVector {
        tile_id: tile.id.clone(),
        values,
    })
}

/// Column names of the feature CSV: `tile_id`, then `f1..f24` where
/// `f(6k+s+1)` is statistic `s` of [`Haralick::NAMES`] in direction `k` of
/// [`Direction::ALL`].
pub fn feature_header() -> Vec<String> {
    std::iter::once("tile_id".to_string())
        .chain((1..=FEATURE_COUNT).map(|i| format!("f{i}")))
        .collect()
}

pub fn write_features_csv<W: Write>(features: &[FeatureVector], out: W) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(feature_header())?;
    for f in features {
        let mut record = vec![f.tile_id.clone()];
        record.extend(f.values.iter().map(|v| v.to_string()));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_features_csv<R: std::io::Read>(input: R) -> Result<Vec<FeatureVector>, csv::Error> {
    let mut reader = csv::Reader::from_reader(input);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != feature_header() {
        return Err(csv::Error::from(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            "unexpected feature CSV header",
        )));
    }
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record?;
        let mut values = [0.0; FEATURE_COUNT];
        for (k, v) in values.iter_mut().enumerate() {
            *v = record[k + 1].parse().map_err(|e| {
                csv::Error::from(std::io::Error::new(
                    std::io::ErrorKind::InvalidData,
                    format!("{e}"),
                ))
            })?;
        }
        out.push(FeatureVector {
            tile_id: record[0].to_string(),
            values,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant(v: u8) -> GrayTile {
        GrayTile::from_fn("c", 8, 8, |_, _| v).unwrap()
    }

    #[test]
    fn tile_validation() {
        assert!(GrayTile::new("t", 1, 4, vec![0; 4]).is_err());
        assert!(GrayTile::new("t", 2, 2, vec![0; 3]).is_err());
        assert!(GrayTile::new("t", 2, 2, vec![0; 4]).is_ok());
    }

    #[test]
    fn constant_tile_glcm() {
        let g = cooccurrence(&constant(200), Direction::D45, 16).unwrap();
        let q = 200 * 16 / 256;
        assert_eq!(g.get(q, q), 1.0);
        assert_eq!(g.as_slice().iter().filter(|&&v| v != 0.0).count(), 1);
    }

    #[test]
    fn two_by_two_vertical_pairs() {
        let tile = GrayTile::new("t", 2, 2, vec![0, 255, 0, 255]).unwrap();
        let g = cooccurrence(&tile, Direction::D90, 2).unwrap();
        assert_eq!(g.as_slice(), &[0.5, 0.0, 0.0, 0.5]);
        let h = cooccurrence(&tile, Direction::D0, 2).unwrap();
        assert_eq!(h.as_slice(), &[0.0, 0.5, 0.5, 0.0]);
    }

    #[test]
    fn level_bounds() {
        assert!(matches!(
            cooccurrence(&constant(1), Direction::D0, 1),
            Err(TextureError::Levels(1))
        ));
        assert!(cooccurrence(&constant(1), Direction::D0, 257).is_err());
        assert!(cooccurrence(&constant(255), Direction::D0, 256).is_ok());
    }

    #[test]
    fn constant_glcm_statistics() {
        let h = haralick6(&cooccurrence(&constant(17), Direction::D0, 16).unwrap()).unwrap();
        assert_eq!(h.to_array(), [1.0, 0.0, 0.0, 0.0, 1.0, 1.0]);
    }

    #[test]
    fn uniform_glcm_closed_form() {
        for levels in [2usize, 4, 16] {
            let n = levels * levels;
            let g = Glcm::from_probabilities(levels, vec![1.0 / n as f64; n]).unwrap();
            let h = haralick6(&g).unwrap();
            assert!((h.entropy - 2.0 * (levels as f64).log2()).abs() < 1e-12);
            assert!((h.uniformity - 1.0 / n as f64).abs() < 1e-15);
            assert!(h.correlation.abs() < 1e-12);
        }
    }

    #[test]
    fn unnormalized_input_is_rejected() {
        assert!(Glcm::from_probabilities(2, vec![0.5, 0.5, 0.5, 0.5]).is_err());
        let g = Glcm {
            levels: 2,
            p: vec![0.2; 4],
        };
        assert!(matches!(
            haralick6(&g),
            Err(TextureError::Unnormalized { .. })
        ));
    }

    #[test]
    fn extract_constant_tile() {
        let f = extract24(&constant(90), 16).unwrap();
        for d in Direction::ALL {
            assert_eq!(f.block(d), &[1.0, 0.0, 0.0, 0.0, 1.0, 1.0]);
        }
    }

    #[test]
    fn vertical_stripes_have_horizontal_contrast() {
        let tile =
            GrayTile::from_fn("s", 64, 64, |x, _| if x % 2 == 0 { 30 } else { 220 }).unwrap();
        let f = extract24(&tile, 16).unwrap();
        assert!(f.block(Direction::D0)[1] > f.block(Direction::D90)[1]);
        assert_eq!(f.block(Direction::D90)[1], 0.0);
    }

    #[test]
    fn rotation_matches_pixels() {
        let tile = GrayTile::new("r", 3, 2, vec![1, 2, 3, 4, 5, 6]).unwrap();
        let r = tile.rotate90();
        assert_eq!((r.width(), r.height()), (2, 3));
        assert_eq!(r.pixels(), &[3, 6, 2, 5, 1, 4]);
    }

    #[test]
    fn pgm_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let tile = GrayTile::from_fn("tile_7", 5, 3, |x, y| (x * 40 + y) as u8).unwrap();
        let path = dir.path().join("tile_7.pgm");
        tile.write_pgm(std::fs::File::create(&path).unwrap())
            .unwrap();
        assert_eq!(GrayTile::read_pgm(&path).unwrap(), tile);
        std::fs::write(dir.path().join("bad.pgm"), b"P2\n1 1\n255\n0\n").unwrap();
        assert!(GrayTile::read_pgm(&dir.path().join("bad.pgm")).is_err());
    }

    #[test]
    fn feature_csv_round_trip() {
        let tile = GrayTile::from_fn("a", 16, 16, |x, y| ((x * 7 + y * 13) % 256) as u8).unwrap();
        let f = extract24(&tile, 16).unwrap();
        let mut buf = Vec::new();
        write_features_csv(std::slice::from_ref(&f), &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("tile_id,f1,f2,"));
        assert_eq!(read_features_csv(&buf[..]).unwrap(), vec![f]);
    }
}
