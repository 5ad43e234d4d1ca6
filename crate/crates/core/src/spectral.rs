//! Discrete Fourier analysis of square images: the complex spectrum, its
//! principal-value phase, and pointwise bispectrum/trispectrum evaluation.
//!
//! Phases are reported in `[-pi, pi)`. Coefficients whose modulus does not
//! exceed the magnitude floor are degenerate and get phase 0. Coefficients
//! lying on the real axis (to within `1e-12` relative) get exactly `0` or
//! `-pi`, so the Nyquist samples of a real image never flip sign with
//! rounding noise.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::ops::Add;

use ndarray::{Array2, Axis};
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::image::GrayImage;

/// Relative factor of the default magnitude floor.
pub const DEFAULT_FLOOR_RATIO: f64 = 1e-12;

const REAL_AXIS_TOLERANCE: f64 = 1e-12;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Frequency index pair `(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Freq(pub usize, pub usize);

impl Add for Freq {
    type Output = Freq;

    fn add(self, rhs: Freq) -> Freq {
        Freq(self.0 + rhs.0, self.1 + rhs.1)
    }
}

/// Unnormalized forward DFT of a real image, standard index order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpectrum {
    coeffs: Array2<Complex64>,
}

impl ComplexSpectrum {
    pub fn from_coefficients(coeffs: Array2<Complex64>) -> Result<Self> {
        let (r, c) = coeffs.dim();
        if r != c || r < 2 || r % 2 != 0 {
            return Err(Error::Dimension(format!("spectrum is {r}x{c}, expected even square")));
        }
        Ok(Self { coeffs })
    }

    pub fn size(&self) -> usize {
        self.coeffs.nrows()
    }

    /// `Q = P / 2`, the largest index of the non-negative quadrant.
    pub fn quadrant(&self) -> usize {
        self.size() / 2
    }

    pub fn coefficients(&self) -> &Array2<Complex64> {
        &self.coeffs
    }

    pub fn at(&self, w: Freq) -> Complex64 {
        self.coeffs[[w.0, w.1]]
    }

    pub fn max_modulus(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `1e-12` times the largest coefficient modulus.
    pub fn default_floor(&self) -> f64 {
        DEFAULT_FLOOR_RATIO * self.max_modulus()
    }

    /// Inverse transform, normalized by `1 / P^2`.
    pub fn inverse(&self) -> Array2<Complex64> {
        let mut data = self.coeffs.clone();
        fft2_in_place(&mut data, true);
        let scale = 1.0 / (data.len() as f64);
        data.mapv_inplace(|c| c * scale);
        data
    }

    fn check_quadrant(&self, w: Freq) -> Result<()> {
        let q = self.quadrant();
        if w.0 > q || w.1 > q {
            return Err(Error::Range(format!(
                "({}, {}) outside the quadrant [0, {q}]^2",
                w.0, w.1
            )));
        }
        Ok(())
    }
}

/// Principal-value phase over the non-negative quadrant `[0, Q]^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSurface {
    phase: Array2<f64>,
    degenerate: Array2<bool>,
    magnitude_floor: f64,
}

impl PhaseSurface {
    /// Builds a surface from raw phase values with no degenerate entries.
    pub fn from_values(phase: Array2<f64>) -> Result<Self> {
        let (r, c) = phase.dim();
        if r != c || r < 2 {
            return Err(Error::Dimension(format!("phase surface is {r}x{c}")));
        }
        if phase.iter().any(|v| !v.is_finite()) {
            return Err(Error::Dimension("phase surface contains non-finite values".into()));
        }
        let degenerate = Array2::from_elem(phase.raw_dim(), false);
        Ok(Self {
            phase,
            degenerate,
            magnitude_floor: 0.0,
        })
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.phase
    }

    pub fn at(&self, m: usize, n: usize) -> f64 {
        self.phase[[m, n]]
    }

    pub fn is_degenerate(&self, m: usize, n: usize) -> bool {
        self.degenerate[[m, n]]
    }

    pub fn degenerate_mask(&self) -> &Array2<bool> {
        &self.degenerate
    }

    pub fn magnitude_floor(&self) -> f64 {
        self.magnitude_floor
    }

    pub fn quadrant(&self) -> usize {
        self.phase.nrows() - 1
    }

    /// Side length of the source image, `2 Q`.
    pub fn source_size(&self) -> usize {
        2 * self.quadrant()
    }
}

/// Result of a higher-order phase evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyPhase {
    pub phase: f64,
    /// Set when some coefficient in the product is at or below the floor;
    /// `phase` is 0 in that case.
    pub degenerate: bool,
}

/// Maps any finite angle into `[-pi, pi)`.
pub fn wrap_phase(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let w = x - two_pi * ((x + PI) / two_pi).floor();
    if w >= PI {
        w - two_pi
    } else {
        w
    }
}

/// Principal argument in `[-pi, pi)`, or `None` when `|c| <= floor`.
pub fn principal_phase(c: Complex64, floor: f64) -> Option<f64> {
    let modulus = c.norm();
    if !(modulus > floor) {
        return None;
    }
    if c.im.abs() <= REAL_AXIS_TOLERANCE * modulus {
        return Some(if c.re > 0.0 { 0.0 } else { -PI });
    }
    let a = c.im.atan2(c.re);
    Some(if a >= PI { a - 2.0 * PI } else { a })
}

pub(crate) fn fft2_in_place(data: &mut Array2<Complex64>, inverse: bool) {
    let (rows, cols) = data.dim();
    PLANNER.with(|planner| {
        let mut planner = planner.borrow_mut();
        let row_fft = if inverse {
            planner.plan_fft_inverse(cols)
        } else {
            planner.plan_fft_forward(cols)
        };
        let col_fft = if inverse {
            planner.plan_fft_inverse(rows)
        } else {
            planner.plan_fft_forward(rows)
        };
        let mut buf = Vec::with_capacity(rows.max(cols));
        for mut row in data.axis_iter_mut(Axis(0)) {
            buf.clear();
            buf.extend(row.iter().copied());
            row_fft.process(&mut buf);
            row.iter_mut().zip(&buf).for_each(|(d, s)| *d = *s);
        }
        for mut col in data.axis_iter_mut(Axis(1)) {
            buf.clear();
            buf.extend(col.iter().copied());
            col_fft.process(&mut buf);
            col.iter_mut().zip(&buf).for_each(|(d, s)| *d = *s);
        }
    });
}

/// Forward 2-D DFT with kernel `exp(-j 2 pi (u m + v n) / P)`, no scaling.
pub fn dft2(image: &GrayImage) -> ComplexSpectrum {
    let mut data = image.pixels().mapv(|v| Complex64::new(v, 0.0));
    fft2_in_place(&mut data, false);
    ComplexSpectrum { coeffs: data }
}

/// Phase of the quadrant `[0, Q]^2`; coefficients with modulus at or below
/// `magnitude_floor` get phase 0 and are marked degenerate.
pub fn phase_spectrum(spec: &ComplexSpectrum, magnitude_floor: f64) -> PhaseSurface {
    let q = spec.quadrant();
    let mut phase = Array2::zeros((q + 1, q + 1));
    let mut degenerate = Array2::from_elem((q + 1, q + 1), false);
    for m in 0..=q {
        for n in 0..=q {
            match principal_phase(spec.coeffs[[m, n]], magnitude_floor) {
                Some(p) => phase[[m, n]] = p,
                None => degenerate[[m, n]] = true,
            }
        }
    }
    PhaseSurface {
        phase,
        degenerate,
        magnitude_floor,
    }
}

/// [`phase_spectrum`] with the default floor of the spectrum.
pub fn default_phase_spectrum(spec: &ComplexSpectrum) -> PhaseSurface {
    phase_spectrum(spec, spec.default_floor())
}

/// Phase over the whole `P x P` plane in DFT order, same conventions as
/// [`phase_spectrum`].
pub fn full_phase(spec: &ComplexSpectrum, magnitude_floor: f64) -> Array2<f64> {
    spec.coeffs
        .mapv(|c| principal_phase(c, magnitude_floor).unwrap_or(0.0))
}

/// `F(w1) F(w2) conj(F(w1 + w2))`.
pub fn bispectrum_value(spec: &ComplexSpectrum, w1: Freq, w2: Freq) -> Result<Complex64> {
    spec.check_quadrant(w1)?;
    spec.check_quadrant(w2)?;
    spec.check_quadrant(w1 + w2)?;
    Ok(spec.at(w1) * spec.at(w2) * spec.at(w1 + w2).conj())
}

/// Principal argument of [`bispectrum_value`].
pub fn bispectrum_phase(spec: &ComplexSpectrum, w1: Freq, w2: Freq) -> Result<PolyPhase> {
    let value = bispectrum_value(spec, w1, w2)?;
    Ok(poly_phase(spec, &[w1, w2, w1 + w2], value))
}

/// `F(w1) F(w2) F(w3) conj(F(w1 + w2 + w3))`.
pub fn trispectrum_value(spec: &ComplexSpectrum, w1: Freq, w2: Freq, w3: Freq) -> Result<Complex64> {
    for w in [w1, w2, w3, w1 + w2 + w3] {
        spec.check_quadrant(w)?;
    }
    Ok(spec.at(w1) * spec.at(w2) * spec.at(w3) * spec.at(w1 + w2 + w3).conj())
}

/// Principal argument of [`trispectrum_value`].
pub fn trispectrum_phase(spec: &ComplexSpectrum, w1: Freq, w2: Freq, w3: Freq) -> Result<PolyPhase> {
    let value = trispectrum_value(spec, w1, w2, w3)?;
    Ok(poly_phase(spec, &[w1, w2, w3, w1 + w2 + w3], value))
}

fn poly_phase(spec: &ComplexSpectrum, involved: &[Freq], value: Complex64) -> PolyPhase {
    let floor = spec.default_floor();
    if involved.iter().any(|&w| !(spec.at(w).norm() > floor)) {
        return PolyPhase {
            phase: 0.0,
            degenerate: true,
        };
    }
    PolyPhase {
        phase: principal_phase(value, 0.0).unwrap_or(0.0),
        degenerate: false,
    }
}
