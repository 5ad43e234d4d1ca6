//! Preprocessing, centered surface views, radial/normal slices and the
//! TOSF/FOSF descriptors.
//!
//! Slices are taken on the centered view of a statistic surface (the quadrant
//! mirrored evenly into all four quadrants, origin at the center). Angle 0
//! points along the first frequency index. The radial slice averages over
//! angles at each radius; the normal slice averages over radii at each angle,
//! skipping the innermost eighth where near-DC values fluctuate.

use std::f64::consts::PI;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::image::{min_max_normalize, GrayImage};
use crate::stats::{fast_surface, StatKind, StatMode, StatSurface};

/// Angles averaged per radius in the radial slice.
pub const RADIAL_ANGLE_SAMPLES: usize = 360;
/// Default number of angle bins of the normal slice.
pub const DEFAULT_ANGULAR_BINS: usize = 72;
/// Inner radius of the normal slice as a fraction of `Q`.
pub const NORMAL_INNER_FRACTION: f64 = 1.0 / 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SliceKind {
    Radial,
    Normal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SliceProfile {
    pub kind: SliceKind,
    pub samples: Vec<f64>,
}

impl SliceProfile {
    pub fn bin_count(&self) -> usize {
        self.samples.len()
    }

    pub fn min(&self) -> f64 {
        self.samples.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.samples.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Lower-middle order statistic.
    pub fn median(&self) -> f64 {
        let mut sorted = self.samples.clone();
        sorted.sort_by(f64::total_cmp);
        sorted[(sorted.len() - 1) / 2]
    }
}

/// Third-order structure feature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tosf {
    /// Minimum of the radial slice.
    pub t1: f64,
    /// Median of the normal slice.
    pub t2: f64,
}

/// Fourth-order structure feature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fosf {
    /// Minimum of the radial slice.
    pub f1: f64,
    /// Radial slice at the outermost radius (the maximum frequency).
    pub f2: f64,
}

/// Bilinear sample; coordinates are clamped into the array.
fn bilinear(values: &Array2<f64>, x: f64, y: f64) -> f64 {
    let (rows, cols) = values.dim();
    let x = x.clamp(0.0, (rows - 1) as f64);
    let y = y.clamp(0.0, (cols - 1) as f64);
    let (x0, y0) = (x.floor() as usize, y.floor() as usize);
    let (x1, y1) = ((x0 + 1).min(rows - 1), (y0 + 1).min(cols - 1));
    let (fx, fy) = (x - x0 as f64, y - y0 as f64);
    let top = values[[x0, y0]] * (1.0 - fy) + values[[x0, y1]] * fy;
    let bottom = values[[x1, y0]] * (1.0 - fy) + values[[x1, y1]] * fy;
    top * (1.0 - fx) + bottom * fx
}

/// Log-polar resampling about the image center.
///
/// Row `i` of the output holds radius `(P/2)^(i / (radial_bins - 1))`, column
/// `k` holds angle `2 pi k / angular_bins`. Samples farther than half a pixel
/// outside the raster are 0. The grid is placed at the top-left of a `P x P`
/// output, zero-padded or cropped as needed.
pub fn log_polar(image: &GrayImage, radial_bins: usize, angular_bins: usize) -> Result<GrayImage> {
    if radial_bins < 8 || angular_bins < 8 {
        return Err(Error::InvalidArgument(format!(
            "log-polar bins {radial_bins}x{angular_bins}, each must be at least 8"
        )));
    }
    let p = image.size();
    let pixels = image.pixels().to_owned();
    let center = (p as f64 - 1.0) / 2.0;
    let max_radius = p as f64 / 2.0;
    let lo = -0.5;
    let hi = p as f64 - 0.5;
    let mut out = Array2::zeros((p, p));
    for i in 0..radial_bins.min(p) {
        let radius = max_radius.powf(i as f64 / (radial_bins - 1) as f64);
        for k in 0..angular_bins.min(p) {
            let theta = 2.0 * PI * k as f64 / angular_bins as f64;
            let x = center + radius * theta.cos();
            let y = center + radius * theta.sin();
            out[[i, k]] = if x < lo || x > hi || y < lo || y > hi {
                0.0
            } else {
                bilinear(&pixels, x, y)
            };
        }
    }
    GrayImage::new(out)
}

/// Z-scores the image, then rescales affinely to `[0, 1]`. Images with
/// standard deviation below `1e-12` map to zero.
pub fn illumination_normalize(image: &GrayImage) -> GrayImage {
    let z = standardize_pixels(image);
    GrayImage::new(min_max_normalize(&z)).expect("same dimensions")
}

/// The z-scored stage of [`illumination_normalize`].
pub fn standardize_pixels(image: &GrayImage) -> Array2<f64> {
    let px = image.pixels();
    let mean = image.mean();
    let var = px.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / px.len() as f64;
    let std = var.sqrt();
    if std < 1e-12 {
        return Array2::zeros(px.raw_dim());
    }
    px.mapv(|v| (v - mean) / std)
}

/// Elementwise mean of the fast statistic over a set of images, optionally
/// after log-polar resampling (`P x P` bins) and illumination normalization.
pub fn class_average_stat(images: &[GrayImage], kind: StatKind, preprocess: bool) -> Result<StatSurface> {
    let first = images.first().ok_or(Error::Empty("class average needs at least one image"))?;
    let p = first.size();
    if let Some(bad) = images.iter().find(|img| img.size() != p) {
        return Err(Error::Dimension(format!(
            "mixed image sizes {p} and {} in class average",
            bad.size()
        )));
    }
    let mut acc = Array2::<f64>::zeros((p / 2 + 1, p / 2 + 1));
    for img in images {
        let surface = if preprocess {
            let resampled = log_polar(img, p.max(8), p.max(8))?;
            fast_surface(&illumination_normalize(&resampled), kind)
        } else {
            fast_surface(img, kind)
        };
        acc += surface.values();
    }
    acc /= images.len() as f64;
    StatSurface::new(acc, kind, StatMode::PhaseLinear)
}

/// Even mirror of the quadrant into a `(2Q+1) x (2Q+1)` matrix with `(0, 0)`
/// at the center.
pub fn center_surface(surface: &StatSurface) -> Array2<f64> {
    let q = surface.quadrant();
    let values = surface.values();
    Array2::from_shape_fn((2 * q + 1, 2 * q + 1), |(i, j)| values[[i.abs_diff(q), j.abs_diff(q)]])
}

fn default_radial_bins(q: usize) -> usize {
    q.max(2)
}

/// Angle-averaged profile at `radial_bins` radii spaced uniformly over
/// `[0, Q]`, endpoints included.
pub fn radial_slice(surface: &StatSurface, radial_bins: usize) -> SliceProfile {
    let q = surface.quadrant() as f64;
    let centered = center_surface(surface);
    let step = if radial_bins > 1 { q / (radial_bins - 1) as f64 } else { 0.0 };
    let angles: Vec<(f64, f64)> = (0..RADIAL_ANGLE_SAMPLES)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / RADIAL_ANGLE_SAMPLES as f64;
            (theta.cos(), theta.sin())
        })
        .collect();
    let samples = (0..radial_bins)
        .map(|k| {
            let r = step * k as f64;
            angles
                .iter()
                .map(|&(c, s)| bilinear(&centered, q + r * c, q + r * s))
                .sum::<f64>()
                / angles.len() as f64
        })
        .collect();
    SliceProfile {
        kind: SliceKind::Radial,
        samples,
    }
}

/// Radius-averaged profile at `angular_bins` angles uniform over `[0, 2 pi)`,
/// using `Q + 1` radii spaced over `[Q/8, Q]`.
pub fn normal_slice(surface: &StatSurface, angular_bins: usize) -> SliceProfile {
    let quadrant = surface.quadrant();
    let q = quadrant as f64;
    let centered = center_surface(surface);
    let inner = q * NORMAL_INNER_FRACTION;
    let radius_count = quadrant + 1;
    let radii: Vec<f64> = (0..radius_count)
        .map(|j| inner + (q - inner) * j as f64 / (radius_count - 1) as f64)
        .collect();
    let samples = (0..angular_bins)
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / angular_bins as f64;
            let (c, s) = (theta.cos(), theta.sin());
            radii
                .iter()
                .map(|&r| bilinear(&centered, q + r * c, q + r * s))
                .sum::<f64>()
                / radii.len() as f64
        })
        .collect();
    SliceProfile {
        kind: SliceKind::Normal,
        samples,
    }
}

fn expect_kind(surface: &StatSurface, expected: StatKind) -> Result<()> {
    if surface.kind() != expected {
        return Err(Error::KindMismatch {
            expected: expected.name(),
            actual: surface.kind().name(),
        });
    }
    Ok(())
}

pub fn tosf(surface: &StatSurface) -> Result<Tosf> {
    expect_kind(surface, StatKind::Toss)?;
    let radial = radial_slice(surface, default_radial_bins(surface.quadrant()));
    let normal = normal_slice(surface, DEFAULT_ANGULAR_BINS);
    Ok(Tosf {
        t1: radial.min(),
        t2: normal.median(),
    })
}

pub fn fosf(surface: &StatSurface) -> Result<Fosf> {
    expect_kind(surface, StatKind::Foss)?;
    let radial = radial_slice(surface, default_radial_bins(surface.quadrant()));
    Ok(Fosf {
        f1: radial.min(),
        f2: *radial.samples.last().expect("at least two radial bins"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surface(q: usize, kind: StatKind, f: impl FnMut((usize, usize)) -> f64) -> StatSurface {
        StatSurface::new(Array2::from_shape_fn((q + 1, q + 1), f), kind, StatMode::PhaseLinear).unwrap()
    }

    #[test]
    fn log_polar_constant() {
        let img = GrayImage::constant(32, 0.4).unwrap();
        let lp = log_polar(&img, 32, 32).unwrap();
        assert!(lp.pixels().iter().all(|&v| (v - 0.4).abs() < 1e-12));
        assert!(log_polar(&img, 4, 32).is_err());
    }

    #[test]
    fn log_polar_rotation_shifts_angles() {
        let img = GrayImage::from_fn(32, |(m, n)| ((m * 13 + n * 7 + m * n) % 17) as f64 / 16.0).unwrap();
        let a = log_polar(&img, 32, 32).unwrap();
        let b = log_polar(&img.rotate90(), 32, 32).unwrap();
        for i in 0..31 {
            for k in 0..32 {
                let d = (b.get(i, (k + 8) % 32) - a.get(i, k)).abs();
                assert!(d < 1e-6, "radius {i} angle {k}: {d}");
            }
        }
    }

    #[test]
    fn log_polar_soft_disk_is_angle_constant() {
        let p = 64;
        let c = (p as f64 - 1.0) / 2.0;
        let sigma = p as f64 / 4.0;
        let img = GrayImage::from_fn(p, |(m, n)| {
            let r2 = (m as f64 - c).powi(2) + (n as f64 - c).powi(2);
            (-r2 / (2.0 * sigma * sigma)).exp()
        })
        .unwrap();
        let lp = log_polar(&img, p, p).unwrap();
        // the outermost ring reaches half a pixel past the raster edge
        for i in 0..p - 1 {
            let row: Vec<f64> = (0..p).map(|k| lp.get(i, k)).collect();
            let mean = row.iter().sum::<f64>() / p as f64;
            let var = row.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / p as f64;
            assert!(var < 1e-6, "radius bin {i}: variance {var}");
        }
    }

    #[test]
    fn illumination_examples() {
        let zero = illumination_normalize(&GrayImage::constant(8, 0.7).unwrap());
        assert!(zero.pixels().iter().all(|&v| v == 0.0));

        let x = GrayImage::from_fn(16, |(m, n)| ((m * 5 + n * 11) % 13) as f64 / 12.0).unwrap();
        let y = GrayImage::new(x.pixels().mapv(|v| 0.5 * v + 0.2)).unwrap();
        let (a, b) = (illumination_normalize(&x), illumination_normalize(&y));
        for (u, v) in a.pixels().iter().zip(b.pixels().iter()) {
            assert!((u - v).abs() < 1e-9);
        }

        let z = standardize_pixels(&x);
        let n = z.len() as f64;
        let mean = z.sum() / n;
        let std = (z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
        assert!(mean.abs() < 1e-9 && (std - 1.0).abs() < 1e-9);
    }

    #[test]
    fn class_average_trivial_cases() {
        let img = GrayImage::from_fn(16, |(m, n)| ((m * 3 + n * n) % 7) as f64 / 6.0).unwrap();
        let single = class_average_stat(std::slice::from_ref(&img), StatKind::Toss, false).unwrap();
        assert_eq!(single, fast_surface(&img, StatKind::Toss));
        let triple = class_average_stat(&[img.clone(), img.clone(), img.clone()], StatKind::Toss, false).unwrap();
        assert!(triple.max_abs_diff(&single) < 1e-12);

        assert!(matches!(class_average_stat(&[], StatKind::Toss, false), Err(Error::Empty(_))));
        let other = GrayImage::constant(8, 0.5).unwrap();
        assert!(class_average_stat(&[img, other], StatKind::Foss, true).is_err());
    }

    #[test]
    fn centering() {
        let s = surface(4, StatKind::Toss, |idx| if idx == (2, 3) { 1.0 } else { 0.0 });
        let c = center_surface(&s);
        assert_eq!(c.dim(), (9, 9));
        for (i, j) in [(6, 7), (2, 7), (6, 1), (2, 1)] {
            assert_eq!(c[[i, j]], 1.0);
        }
        assert_eq!(c.sum(), 4.0);
    }

    #[test]
    fn slices_of_constant_and_zero() {
        for value in [0.0, 2.5] {
            let s = surface(8, StatKind::Toss, |_| value);
            let r = radial_slice(&s, 8);
            let n = normal_slice(&s, 72);
            assert_eq!(r.bin_count(), 8);
            assert_eq!(n.bin_count(), 72);
            assert!(r.samples.iter().chain(&n.samples).all(|&v| (v - value).abs() < 1e-12));
            let t = tosf(&s).unwrap();
            assert!((t.t1 - value).abs() < 1e-12 && (t.t2 - value).abs() < 1e-12);

            let f = surface(8, StatKind::Foss, |_| value);
            let d = fosf(&f).unwrap();
            assert!((d.f1 - value).abs() < 1e-12 && (d.f2 - value).abs() < 1e-12);
        }
    }

    #[test]
    fn radial_slice_of_paraboloid() {
        let q = 32;
        let s = surface(q, StatKind::Toss, |(m, n)| (m * m + n * n) as f64);
        let profile = radial_slice(&s, q + 1);
        for (k, &v) in profile.samples.iter().enumerate().skip(q / 4).take(q / 2) {
            let r = k as f64;
            assert!((v - r * r).abs() / (r * r) < 0.02, "r={r} v={v}");
        }
    }

    #[test]
    fn normal_slice_of_ramp() {
        let s = surface(16, StatKind::Toss, |(m, _)| m as f64);
        let profile = normal_slice(&s, 72);
        let argmax = (0..72).max_by(|&a, &b| profile.samples[a].total_cmp(&profile.samples[b])).unwrap();
        let argmin = (0..72).min_by(|&a, &b| profile.samples[a].total_cmp(&profile.samples[b])).unwrap();
        assert!(argmax == 0 || argmax == 36, "argmax {argmax}");
        assert!(argmin == 18 || argmin == 54, "argmin {argmin}");
    }

    #[test]
    fn kind_mismatch() {
        let s = surface(4, StatKind::Foss, |_| 0.0);
        assert!(matches!(tosf(&s), Err(Error::KindMismatch { .. })));
        let s = surface(4, StatKind::Toss, |_| 0.0);
        assert!(matches!(fosf(&s), Err(Error::KindMismatch { .. })));
    }

    #[test]
    fn median_is_lower_middle() {
        let p = SliceProfile {
            kind: SliceKind::Normal,
            samples: vec![4.0, 1.0, 3.0, 2.0],
        };
        assert_eq!(p.median(), 2.0);
    }
}
