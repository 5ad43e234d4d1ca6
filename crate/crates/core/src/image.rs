use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::pgm::Pgm;

/// Square real-valued raster with an even side length.
///
/// Pixel `(m, n)` is `pixels[[m, n]]`; the first index is the one paired with
/// the first frequency index of the spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    pixels: Array2<f64>,
}

impl GrayImage {
    pub fn new(pixels: Array2<f64>) -> Result<Self> {
        let (rows, cols) = pixels.dim();
        if rows != cols {
            return Err(Error::Dimension(format!("image is {rows}x{cols}, expected square")));
        }
        if rows < 2 || rows % 2 != 0 {
            return Err(Error::Dimension(format!("image side {rows} must be even and at least 2")));
        }
        if pixels.iter().any(|v| !v.is_finite()) {
            return Err(Error::Dimension("image contains non-finite values".into()));
        }
        Ok(Self { pixels })
    }

    pub fn from_fn(size: usize, f: impl FnMut((usize, usize)) -> f64) -> Result<Self> {
        Self::new(Array2::from_shape_fn((size, size), f))
    }

    pub fn constant(size: usize, value: f64) -> Result<Self> {
        Self::new(Array2::from_elem((size, size), value))
    }

    /// Unit impulse at `(m, n)`.
    pub fn delta(size: usize, at: (usize, usize)) -> Result<Self> {
        Self::from_fn(size, |idx| if idx == at { 1.0 } else { 0.0 })
    }

    /// Decodes a PGM and scales samples into `[0, 1]` by the format's maxval.
    pub fn from_pgm(pgm: &Pgm) -> Result<Self> {
        let scale = f64::from(pgm.maxval);
        let pixels = Array2::from_shape_fn((pgm.height, pgm.width), |(r, c)| {
            f64::from(pgm.samples[r * pgm.width + c]) / scale
        });
        Self::new(pixels)
    }

    /// Quantizes to 8 bits after clamping to `[0, 1]`.
    pub fn to_pgm(&self) -> Pgm {
        let samples = self
            .pixels
            .iter()
            .map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u16)
            .collect();
        Pgm {
            width: self.size(),
            height: self.size(),
            maxval: 255,
            samples,
        }
    }

    pub fn size(&self) -> usize {
        self.pixels.nrows()
    }

    pub fn pixels(&self) -> ArrayView2<'_, f64> {
        self.pixels.view()
    }

    pub fn into_pixels(self) -> Array2<f64> {
        self.pixels
    }

    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.pixels[[m, n]]
    }

    pub fn mean(&self) -> f64 {
        self.pixels.sum() / self.pixels.len() as f64
    }

    /// Multiplies every pixel by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.pixels.mapv(|v| v * factor))
    }

    /// Circular translation: output pixel `(m, n)` takes input pixel
    /// `(m - dm, n - dn)` modulo the side length.
    pub fn circular_shift(&self, dm: usize, dn: usize) -> Self {
        let p = self.size();
        let pixels = Array2::from_shape_fn((p, p), |(m, n)| {
            self.pixels[[(m + p - dm % p) % p, (n + p - dn % p) % p]]
        });
        Self { pixels }
    }

    /// Rotation by 90 degrees about the image center.
    pub fn rotate90(&self) -> Self {
        let p = self.size();
        let pixels = Array2::from_shape_fn((p, p), |(m, n)| self.pixels[[n, p - 1 - m]]);
        Self { pixels }
    }

    /// Rescales affinely so that the minimum maps to 0 and the maximum to 1.
    /// A constant image maps to all zeros.
    pub fn min_max_normalized(&self) -> Self {
        Self {
            pixels: min_max_normalize(&self.pixels),
        }
    }

    /// Checks the analysis constraints on a loaded image: power-of-two side of
    /// at least 8.
    pub fn check_analysis_size(&self) -> Result<()> {
        let p = self.size();
        if !p.is_power_of_two() || p < 8 {
            return Err(Error::Dimension(format!(
                "image side {p} must be a power of two and at least 8"
            )));
        }
        Ok(())
    }
}

/// Affine map of `values` onto `[0, 1]`; all zeros when the range is empty.
pub fn min_max_normalize(values: &Array2<f64>) -> Array2<f64> {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let range = hi - lo;
    if !(range > 0.0) {
        return Array2::zeros(values.raw_dim());
    }
    values.mapv(|v| (v - lo) / range)
}
