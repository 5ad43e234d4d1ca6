//! Tiled descriptor pipeline.
//!
//! The image is cut into non-overlapping square tiles; each tile contributes
//! its TOSF (and optionally FOSF). Every descriptor dimension is then
//! summarized across tiles by population mean, variance and energy (mean of
//! squares), so `energy - mean^2 = variance`.

use std::fmt;
use std::str::FromStr;

use ndarray::s;

use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::slices::{fosf, tosf};
use crate::spectral::{default_phase_spectrum, dft2};
use crate::stats::{foss_fast, toss_fast};

/// Tile sizes evaluated by the scale sweep.
pub const SUPPORTED_TILE_SIZES: [usize; 8] = [2, 4, 8, 16, 32, 64, 128, 256];

/// Smallest tile size that yields a meaningful spectrum.
pub const MIN_MEANINGFUL_TILE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DescriptorSet {
    #[default]
    Tosf,
    TosfFosf,
}

impl DescriptorSet {
    pub fn dimension_names(self) -> &'static [&'static str] {
        match self {
            DescriptorSet::Tosf => &["t1", "t2"],
            DescriptorSet::TosfFosf => &["t1", "t2", "f1", "f2"],
        }
    }

    /// Length of the aggregated vector.
    pub fn vector_len(self) -> usize {
        3 * self.dimension_names().len()
    }

    /// Column names in layout order, e.g. `t1_mean`.
    pub fn column_names(self) -> Vec<String> {
        self.dimension_names()
            .iter()
            .flat_map(|d| ["mean", "var", "energy"].map(|a| format!("{d}_{a}")))
            .collect()
    }
}

impl fmt::Display for DescriptorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DescriptorSet::Tosf => "tosf",
            DescriptorSet::TosfFosf => "tosf+fosf",
        })
    }
}

impl FromStr for DescriptorSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tosf" => Ok(DescriptorSet::Tosf),
            "tosf+fosf" => Ok(DescriptorSet::TosfFosf),
            other => Err(Error::InvalidArgument(format!("unknown descriptor set {other:?}"))),
        }
    }
}

/// Aggregated per-image descriptor.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    /// For each descriptor dimension: mean, variance, energy.
    pub values: Vec<f64>,
    pub scale: usize,
    pub descriptor_set: DescriptorSet,
    /// Tiles were smaller than [`MIN_MEANINGFUL_TILE`].
    pub coarse: bool,
}

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Splits the image into `(P / tile_size)^2` tiles in row-major order.
pub fn tile(image: &GrayImage, tile_size: usize) -> Result<Vec<GrayImage>> {
    let p = image.size();
    if !SUPPORTED_TILE_SIZES.contains(&tile_size) {
        return Err(Error::InvalidArgument(format!(
            "tile size {tile_size} is not one of {SUPPORTED_TILE_SIZES:?}"
        )));
    }
    if tile_size > p || !p.is_multiple_of(tile_size) {
        return Err(Error::InvalidArgument(format!(
            "tile size {tile_size} does not divide image side {p}"
        )));
    }
    let per_side = p / tile_size;
    let pixels = image.pixels();
    (0..per_side * per_side)
        .map(|k| {
            let (r, c) = ((k / per_side) * tile_size, (k % per_side) * tile_size);
            GrayImage::new(pixels.slice(s![r..r + tile_size, c..c + tile_size]).to_owned())
        })
        .collect()
}

/// Descriptor values of a single tile, in [`DescriptorSet::dimension_names`]
/// order.
pub fn tile_descriptors(tile: &GrayImage, set: DescriptorSet) -> Vec<f64> {
    let phase = default_phase_spectrum(&dft2(tile));
    let t = tosf(&toss_fast(&phase)).expect("TOSS surface");
    match set {
        DescriptorSet::Tosf => vec![t.t1, t.t2],
        DescriptorSet::TosfFosf => {
            let f = fosf(&foss_fast(&phase)).expect("FOSS surface");
            vec![t.t1, t.t2, f.f1, f.f2]
        }
    }
}

/// Population mean, variance and energy of `samples`.
pub fn aggregate(samples: &[f64]) -> [f64; 3] {
    let k = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / k;
    let variance = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / k;
    let energy = samples.iter().map(|x| x * x).sum::<f64>() / k;
    [mean, variance, energy]
}

pub fn grid_feature_vector(image: &GrayImage, tile_size: usize, set: DescriptorSet) -> Result<FeatureVector> {
    let tiles = tile(image, tile_size)?;
    let coarse = tile_size < MIN_MEANINGFUL_TILE;
    if coarse {
        log::warn!("tile size {tile_size} is below {MIN_MEANINGFUL_TILE}; descriptors are degenerate");
    }
    let per_tile: Vec<Vec<f64>> = tiles.iter().map(|t| tile_descriptors(t, set)).collect();
    let dims = set.dimension_names().len();
    let mut values = Vec::with_capacity(set.vector_len());
    for d in 0..dims {
        let column: Vec<f64> = per_tile.iter().map(|row| row[d]).collect();
        values.extend(aggregate(&column));
    }
    Ok(FeatureVector {
        values,
        scale: tile_size,
        descriptor_set: set,
        coarse,
    })
}
