//! Synthetic stand-in for an expert-annotated sonar corpus: textured tiles
//! with known classes and simulated experts who mislabel and hedge.

use std::f64::consts::PI;
use std::fs;
use std::io::{self, BufWriter};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::belief::Frame;
use crate::error::HarnessError;
use crate::expert::{
    AnnotatedTile, AnnotationEntry, AnnotationSet, CertaintyLevel, TileAnnotation,
};
use crate::texture::GrayTile;

/// Pixel recipe of one class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Texture {
    /// Flat level with Gaussian noise.
    Noise { mean: f64, sd: f64 },
    /// Sinusoidal stripes at `angle` degrees with a random phase per tile.
    Ripple {
        period: f64,
        angle: f64,
        mean: f64,
        amplitude: f64,
        sd: f64,
    },
    /// Bright blobs on a darker background, each with a shadow below it.
    Blobs {
        count: usize,
        radius: f64,
        background: f64,
        highlight: f64,
        sd: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassRecipe {
    pub label: String,
    pub texture: Texture,
}

/// How a simulated expert annotates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpertProfile {
    pub id: String,
    /// Probability of naming a wrong class for each class present.
    pub error_rate: f64,
    /// Probabilities of sure, moderately sure, not sure.
    pub certainty: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub classes: Vec<ClassRecipe>,
    pub tiles_per_class: usize,
    pub tile_size: usize,
    pub experts: Vec<ExpertProfile>,
    /// Fraction of tiles showing two classes side by side.
    pub mixed_fraction: f64,
    pub seed: u64,
}

impl SynthConfig {
    /// Three well-separated textures (rock, sand, ripple), 64×64 tiles and
    /// three experts with the given error rate.
    pub fn desk(tiles_per_class: usize, error_rate: f64, seed: u64) -> Self {
        let classes = vec![
            ClassRecipe {
                label: "rock".into(),
                texture: Texture::Blobs {
                    count: 6,
                    radius: 6.0,
                    background: 70.0,
                    highlight: 200.0,
                    sd: 18.0,
                },
            },
            ClassRecipe {
                label: "sand".into(),
                texture: Texture::Noise {
                    mean: 120.0,
                    sd: 12.0,
                },
            },
            ClassRecipe {
                label: "ripple".into(),
                texture: Texture::Ripple {
                    period: 8.0,
                    angle: 0.0,
                    mean: 130.0,
                    amplitude: 60.0,
                    sd: 10.0,
                },
            },
        ];
        let experts = (1..=3)
            .map(|i| ExpertProfile {
                id: format!("E{i}"),
                error_rate,
                certainty: [0.5, 0.3, 0.2],
            })
            .collect();
        Self {
            classes,
            tiles_per_class,
            tile_size: 64,
            experts,
            mixed_fraction: 0.1,
            seed,
        }
    }

    pub fn tile_count(&self) -> usize {
        self.classes.len() * self.tiles_per_class
    }

    pub fn frame(&self) -> Result<Frame, HarnessError> {
        Ok(Frame::new(self.classes.iter().map(|c| c.label.clone()))?)
    }

    fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: &str| Err(HarnessError::SynthConfig(msg.to_string()));
        if self.classes.is_empty() {
            return bad("no classes");
        }
        if self.tiles_per_class == 0 {
            return bad("tiles per class must be at least 1");
        }
        if self.tile_size < 3 {
            return bad("tile size must be at least 3");
        }
        if self.experts.is_empty() {
            return bad("no experts");
        }
        if !(0.0..=1.0).contains(&self.mixed_fraction) {
            return bad("mixed fraction outside [0,1]");
        }
        if self.mixed_fraction > 0.0 && self.classes.len() < 2 {
            return bad("mixed tiles need at least two classes");
        }
        for e in &self.experts {
            if !(0.0..=1.0).contains(&e.error_rate) {
                return bad("expert error rate outside [0,1]");
            }
            if e.error_rate > 0.0 && self.classes.len() < 2 {
                return bad("expert errors need at least two classes");
            }
            let total: f64 = e.certainty.iter().sum();
            if e.certainty.iter().any(|p| !(0.0..=1.0).contains(p)) || (total - 1.0).abs() > 1e-9 {
                return bad("certainty probabilities must lie in [0,1] and sum to 1");
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthTile {
    pub tile: GrayTile,
    /// Majority class.
    pub truth: String,
    /// Classes present with their area fractions.
    pub components: Vec<(String, f64)>,
    pub annotations: Vec<TileAnnotation>,
}

impl SynthTile {
    pub fn is_mixed(&self) -> bool {
        self.components.len() > 1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Corpus {
    pub frame: Frame,
    pub tiles: Vec<SynthTile>,
}

impl Corpus {
    pub fn annotation_set(&self) -> AnnotationSet {
        AnnotationSet {
            frame: self.frame.labels().to_vec(),
            tiles: self
                .tiles
                .iter()
                .map(|t| AnnotatedTile {
                    id: t.tile.id().to_string(),
                    experts: t.annotations.clone(),
                })
                .collect(),
        }
    }

    pub fn truth(&self) -> Vec<String> {
        self.tiles.iter().map(|t| t.truth.clone()).collect()
    }

    pub fn mixed_count(&self) -> usize {
        self.tiles.iter().filter(|t| t.is_mixed()).count()
    }

    /// Writes `tiles/<id>.pgm`, `labels.csv` and `annotations.json` under `dir`.
    pub fn write(&self, dir: &Path) -> io::Result<()> {
        let tiles_dir = dir.join("tiles");
        fs::create_dir_all(&tiles_dir)?;
        for t in &self.tiles {
            let file = fs::File::create(tiles_dir.join(format!("{}.pgm", t.tile.id())))?;
            t.tile
                .write_pgm(BufWriter::new(file))
                .map_err(|e| io::Error::other(e.to_string()))?;
        }
        let mut labels = csv::Writer::from_path(dir.join("labels.csv"))?;
        labels.write_record(["tile_id", "label"])?;
        for t in &self.tiles {
            labels.write_record([t.tile.id(), t.truth.as_str()])?;
        }
        labels.flush()?;
        let file = BufWriter::new(fs::File::create(dir.join("annotations.json"))?);
        serde_json::to_writer_pretty(file, &self.annotation_set())?;
        Ok(())
    }
}

/// Reads a `tile_id,label` CSV.
pub fn read_labels(path: &Path) -> Result<Vec<(String, String)>, csv::Error> {
    let mut reader = csv::Reader::from_path(path)?;
    reader
        .records()
        .map(|r| {
            let r = r?;
            Ok((r[0].to_string(), r[1].to_string()))
        })
        .collect()
}

fn noise(rng: &mut ChaCha8Rng, sd: f64) -> f64 {
    if sd > 0.0 {
        Normal::new(0.0, sd).map(|n| n.sample(rng)).unwrap_or(0.0)
    } else {
        0.0
    }
}

fn clamp_pixel(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Full-tile field of one texture.
fn render(texture: &Texture, size: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut field = vec![0.0; size * size];
    match *texture {
        Texture::Noise { mean, sd } => {
            for v in field.iter_mut() {
                *v = mean + noise(rng, sd);
            }
        }
        Texture::Ripple {
            period,
            angle,
            mean,
            amplitude,
            sd,
        } => {
            let phase = rng.gen_range(0.0..2.0 * PI);
            let (sin, cos) = angle.to_radians().sin_cos();
            for y in 0..size {
                for x in 0..size {
                    let t = (x as f64 * cos + y as f64 * sin) / period;
                    field[y * size + x] =
                        mean + amplitude * (2.0 * PI * t + phase).sin() + noise(rng, sd);
                }
            }
        }
        Texture::Blobs {
            count,
            radius,
            background,
            highlight,
            sd,
        } => {
            let centres: Vec<(f64, f64)> = (0..count)
                .map(|_| {
                    (
                        rng.gen_range(0.0..size as f64),
                        rng.gen_range(0.0..size as f64),
                    )
                })
                .collect();
            for y in 0..size {
                for x in 0..size {
                    let mut v = background;
                    for &(cx, cy) in &centres {
                        let d2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
                        let shadow =
                            (x as f64 - cx).powi(2) + (y as f64 - cy - 1.5 * radius).powi(2);
                        if d2 <= radius * radius {
                            v = highlight;
                        } else if shadow <= radius * radius && v != highlight {
                            v = background * 0.3;
                        }
                    }
                    field[y * size + x] = v + noise(rng, sd);
                }
            }
        }
    }
    field
}

fn draw_certainty(rng: &mut ChaCha8Rng, probs: &[f64; 3]) -> CertaintyLevel {
    let u: f64 = rng.gen();
    if u < probs[0] {
        CertaintyLevel::Sure
    } else if u < probs[0] + probs[1] {
        CertaintyLevel::ModeratelySure
    } else {
        CertaintyLevel::NotSure
    }
}

fn other_class(rng: &mut ChaCha8Rng, classes: usize, except: usize) -> usize {
    let k = rng.gen_range(0..classes - 1);
    if k >= except {
        k + 1
    } else {
        k
    }
}

/// Generates the corpus. Tiles are grouped by class, `tiles_per_class`
/// each, and exactly `round(mixed_fraction · tiles)` of them are mixed.
pub fn synth_corpus(cfg: &SynthConfig) -> Result<Corpus, HarnessError> {
    cfg.validate()?;
    let frame = cfg.frame()?;
    let n = cfg.tile_count();
    let k = cfg.classes.len();
    let size = cfg.tile_size;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mixed_count = (cfg.mixed_fraction * n as f64).round() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut mixed = vec![false; n];
    for &i in &order[..mixed_count] {
        mixed[i] = true;
    }

    let width = n.to_string().len().max(4);
    let mut tiles = Vec::with_capacity(n);
    for (i, &is_mixed) in mixed.iter().enumerate() {
        let class = i / cfg.tiles_per_class;
        let mut field = render(&cfg.classes[class].texture, size, &mut rng);
        let mut components = vec![(class, 1.0)];
        if is_mixed {
            let second = other_class(&mut rng, k, class);
            let split = ((rng.gen_range(0.55..0.8) * size as f64).round() as usize)
                .clamp(size / 2 + 1, size - 1);
            let other = render(&cfg.classes[second].texture, size, &mut rng);
            for y in 0..size {
                for x in split..size {
                    field[y * size + x] = other[y * size + x];
                }
            }
            let p = split as f64 / size as f64;
            components = vec![(class, p), (second, 1.0 - p)];
        }
        let pixels = field.into_iter().map(clamp_pixel).collect();
        let tile = GrayTile::new(format!("t{i:0width$}"), size, size, pixels)?;

        let annotations = cfg
            .experts
            .iter()
            .map(|e| {
                let entries = components
                    .iter()
                    .map(|&(c, p)| {
                        let named = if rng.gen::<f64>() < e.error_rate {
                            other_class(&mut rng, k, c)
                        } else {
                            c
                        };
                        let certainty = draw_certainty(&mut rng, &e.certainty);
                        AnnotationEntry::new(cfg.classes[named].label.clone(), certainty, p)
                    })
                    .collect();
                TileAnnotation::new(e.id.clone(), entries)
            })
            .collect();

        tiles.push(SynthTile {
            tile,
            truth: cfg.classes[class].label.clone(),
            components: components
                .into_iter()
                .map(|(c, p)| (cfg.classes[c].label.clone(), p))
                .collect(),
            annotations,
        });
    }
    Ok(Corpus { frame, tiles })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expert::Certainty;

    fn small(error: f64) -> SynthConfig {
        let mut cfg = SynthConfig::desk(10, error, 3);
        cfg.tile_size = 16;
        cfg
    }

    #[test]
    fn perfect_sure_experts_match_truth() {
        let mut cfg = small(0.0);
        for e in &mut cfg.experts {
            e.certainty = [1.0, 0.0, 0.0];
        }
        let corpus = synth_corpus(&cfg).unwrap();
        for t in &corpus.tiles {
            for a in &t.annotations {
                let named: Vec<(String, f64)> =
                    a.entries.iter().map(|e| (e.class.clone(), e.p)).collect();
                assert_eq!(named, t.components);
                assert!(a
                    .entries
                    .iter()
                    .all(|e| e.certainty == Certainty::Level(CertaintyLevel::Sure)));
            }
        }
    }

    #[test]
    fn same_seed_same_corpus() {
        let a = synth_corpus(&small(0.1)).unwrap();
        let b = synth_corpus(&small(0.1)).unwrap();
        assert_eq!(a, b);
        let mut other = small(0.1);
        other.seed = 4;
        assert_ne!(a, synth_corpus(&other).unwrap());
    }

    #[test]
    fn mixed_fraction_is_exact() {
        let mut cfg = SynthConfig::desk(25, 0.0, 8);
        cfg.classes.push(ClassRecipe {
            label: "silt".into(),
            texture: Texture::Noise {
                mean: 60.0,
                sd: 4.0,
            },
        });
        cfg.tile_size = 8;
        cfg.mixed_fraction = 0.2;
        let corpus = synth_corpus(&cfg).unwrap();
        assert_eq!(corpus.tiles.len(), 100);
        let recount = corpus
            .annotation_set()
            .tiles
            .iter()
            .filter(|t| {
                let mut classes: Vec<&str> = t.experts[0]
                    .entries
                    .iter()
                    .map(|e| e.class.as_str())
                    .collect();
                classes.dedup();
                classes.len() == 2
            })
            .count();
        assert_eq!(recount, 20);
        assert_eq!(corpus.mixed_count(), 20);
        for t in corpus.tiles.iter().filter(|t| t.is_mixed()) {
            assert!(t.components[0].1 > 0.5);
            assert!((t.components.iter().map(|c| c.1).sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = small(0.1);
        cfg.tiles_per_class = 0;
        assert!(synth_corpus(&cfg).is_err());
        let mut cfg = small(1.5);
        assert!(synth_corpus(&cfg).is_err());
        cfg = small(0.1);
        cfg.experts[0].certainty = [0.5, 0.5, 0.5];
        assert!(synth_corpus(&cfg).is_err());
        cfg = small(0.1);
        cfg.mixed_fraction = -0.1;
        assert!(synth_corpus(&cfg).is_err());
    }

    #[test]
    fn write_layout() {
        let dir = tempfile::tempdir().unwrap();
        let corpus = synth_corpus(&small(0.1)).unwrap();
        corpus.write(dir.path()).unwrap();
        assert_eq!(fs::read_dir(dir.path().join("tiles")).unwrap().count(), 30);
        let labels = read_labels(&dir.path().join("labels.csv")).unwrap();
        assert_eq!(labels.len(), 30);
        assert_eq!(labels[0].1, "rock");
        let ann: AnnotationSet =
            serde_json::from_str(&fs::read_to_string(dir.path().join("annotations.json")).unwrap())
                .unwrap();
        assert_eq!(ann, corpus.annotation_set());
        let tile = GrayTile::read_pgm(
            &dir.path()
                .join("tiles")
                .join(format!("{}.pgm", corpus.tiles[3].tile.id())),
        )
        .unwrap();
        assert_eq!(tile, corpus.tiles[3].tile);
    }
}
