//! Seeded two-class blob corpus.
//!
//! "continuous" images hold a few large smooth blobs, "dotted" images many
//! small ones; both get the same low-amplitude noise. Every image is then
//! histogram-matched to a uniform 8-bit histogram, so both classes share
//! identical first-order intensity statistics and only the spatial
//! arrangement differs.

use std::fmt;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::corpus::{write_manifest, ManifestEntry};
use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::pgm::{self, Pgm};

/// Standard deviation of the additive pixel noise.
pub const NOISE_SIGMA: f64 = 0.005;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SynthClass {
    Continuous,
    Dotted,
}

impl SynthClass {
    pub fn name(self) -> &'static str {
        match self {
            SynthClass::Continuous => "continuous",
            SynthClass::Dotted => "dotted",
        }
    }

    /// Inclusive blob-count range and sigma range as fractions of the side.
    fn blob_params(self) -> ((usize, usize), (f64, f64)) {
        match self {
            SynthClass::Continuous => ((4, 8), (1.0 / 8.0, 1.0 / 4.0)),
            SynthClass::Dotted => ((80, 160), (1.0 / 64.0, 1.0 / 32.0)),
        }
    }
}

impl fmt::Display for SynthClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// SplitMix64 finalizer, used to derive per-image seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of image `index` in a corpus generated with `seed`.
pub fn image_seed(seed: u64, index: u64) -> u64 {
    mix(mix(seed) ^ index)
}

fn blob_field(class: SynthClass, size: usize, noise_sigma: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let ((lo, hi), (s_lo, s_hi)) = class.blob_params();
    let count = rng.random_range(lo..=hi);
    let side = size as f64;
    let mut field = vec![0.0; size * size];
    for _ in 0..count {
        let cm = rng.random_range(0.0..side);
        let cn = rng.random_range(0.0..side);
        let sigma = rng.random_range(s_lo * side..=s_hi * side);
        let amplitude = rng.random_range(0.5..=1.0);
        let reach = 4.0 * sigma;
        let m0 = (cm - reach).floor().max(0.0) as usize;
        let m1 = ((cm + reach).ceil() as usize).min(size - 1);
        let n0 = (cn - reach).floor().max(0.0) as usize;
        let n1 = ((cn + reach).ceil() as usize).min(size - 1);
        let inv = 1.0 / (2.0 * sigma * sigma);
        for m in m0..=m1 {
            let dm = m as f64 - cm;
            for n in n0..=n1 {
                let dn = n as f64 - cn;
                field[m * size + n] += amplitude * (-(dm * dm + dn * dn) * inv).exp();
            }
        }
    }
    let noise = Normal::new(0.0, noise_sigma).expect("valid sigma");
    field.iter_mut().for_each(|v| *v += noise.sample(rng));
    field
}

/// Rank-based histogram specification onto 256 equally populated levels.
/// Ties are broken by pixel index.
fn match_histogram(field: &[f64]) -> Vec<u16> {
    let n = field.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| field[a].total_cmp(&field[b]).then(a.cmp(&b)));
    let mut out = vec![0u16; n];
    for (rank, &i) in order.iter().enumerate() {
        out[i] = (rank * 256 / n).min(255) as u16;
    }
    out
}

/// One 8-bit image of the given class.
pub fn synth_image(class: SynthClass, size: usize, seed: u64) -> Pgm {
    synth_image_with_noise(class, size, seed, NOISE_SIGMA)
}

/// [`synth_image`] with a custom noise level.
pub fn synth_image_with_noise(class: SynthClass, size: usize, seed: u64, noise_sigma: f64) -> Pgm {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let field = blob_field(class, size, noise_sigma, &mut rng);
    Pgm {
        width: size,
        height: size,
        maxval: 255,
        samples: match_histogram(&field),
    }
}

/// In-memory corpus: images in manifest order with their class.
pub fn synth_corpus(per_class: usize, size: usize, seed: u64) -> Result<Vec<(SynthClass, GrayImage)>> {
    check_params(per_class, size)?;
    corpus_plan(per_class, seed)
        .into_par_iter()
        .map(|(class, _, s)| GrayImage::from_pgm(&synth_image(class, size, s)).map(|img| (class, img)))
        .collect()
}

fn check_params(per_class: usize, size: usize) -> Result<()> {
    if per_class == 0 {
        return Err(Error::InvalidArgument("per_class must be at least 1".into()));
    }
    if !size.is_power_of_two() || size < 8 {
        return Err(Error::InvalidArgument(format!(
            "image size {size} must be a power of two and at least 8"
        )));
    }
    Ok(())
}

/// `(class, file name, seed)` for every image, alternating classes.
fn corpus_plan(per_class: usize, seed: u64) -> Vec<(SynthClass, String, u64)> {
    (0..per_class)
        .flat_map(|i| [(SynthClass::Continuous, i), (SynthClass::Dotted, i)])
        .enumerate()
        .map(|(index, (class, i))| {
            (class, format!("{}_{i:04}.pgm", class.name()), image_seed(seed, index as u64))
        })
        .collect()
}

/// Writes `2 * per_class` PGM images and `manifest.csv` into `out_dir`.
pub fn generate_corpus(out_dir: &Path, per_class: usize, size: usize, seed: u64) -> Result<Vec<ManifestEntry>> {
    check_params(per_class, size)?;
    std::fs::create_dir_all(out_dir)?;
    let plan = corpus_plan(per_class, seed);
    plan.par_iter().try_for_each(|(class, name, s)| {
        pgm::write(&out_dir.join(name), &synth_image(*class, size, *s))
    })?;
    let entries: Vec<ManifestEntry> = plan
        .into_iter()
        .map(|(class, name, s)| ManifestEntry {
            path: name,
            label: class.name().to_string(),
            seed: Some(s),
        })
        .collect();
    write_manifest(&out_dir.join("manifest.csv"), &entries)?;
    Ok(entries)
}
