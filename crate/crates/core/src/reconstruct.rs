//! Unit-magnitude reconstructions and similarity scoring.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::image::{min_max_normalize, GrayImage};
use crate::spectral::{dft2, fft2_in_place, full_phase, ComplexSpectrum};
use crate::stats::StatSurface;

/// Rescaling applied to a statistic surface before it is used as a phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseScaling {
    /// Use the raw values.
    None,
    /// Scale so the largest magnitude maps to `pi`.
    #[default]
    PiScale,
}

/// Inverse DFT of `exp(j * phase)`; real part, min-max normalized to `[0, 1]`.
pub fn reconstruct_from_phase(phase_full: &Array2<f64>) -> Result<GrayImage> {
    let (r, c) = phase_full.dim();
    if r != c || r < 2 || r % 2 != 0 {
        return Err(Error::Dimension(format!("phase map is {r}x{c}, expected even square")));
    }
    let spectrum = phase_full.mapv(|p| Complex64::from_polar(1.0, p));
    let spectrum = ComplexSpectrum::from_coefficients(spectrum)?;
    let real = spectrum.inverse().mapv(|c| c.re);
    GrayImage::new(min_max_normalize(&real))
}

/// Imaginary residual of the inverse transform of `exp(j * phase)`; zero up to
/// rounding when the map is odd-symmetric.
pub fn imaginary_residual(phase_full: &Array2<f64>) -> f64 {
    let mut data = phase_full.mapv(|p| Complex64::from_polar(1.0, p));
    fft2_in_place(&mut data, true);
    let scale = 1.0 / data.len() as f64;
    data.iter().map(|c| (c.im * scale).abs()).fold(0.0, f64::max)
}

/// Phase-only reconstruction of an image.
pub fn phase_only(image: &GrayImage) -> GrayImage {
    let spec = dft2(image);
    let phase = full_phase(&spec, spec.default_floor());
    reconstruct_from_phase(&phase).expect("image dimensions are valid")
}

/// Magnitude-only baseline: inverse DFT of `|F|` with zero phase.
pub fn magnitude_only(image: &GrayImage) -> GrayImage {
    let spec = dft2(image);
    let magnitude = spec.coefficients().mapv(|c| Complex64::new(c.norm(), 0.0));
    let spec = ComplexSpectrum::from_coefficients(magnitude).expect("same dimensions");
    let real = spec.inverse().mapv(|c| c.re);
    GrayImage::new(min_max_normalize(&real)).expect("same dimensions")
}

/// Mirrors a quadrant surface onto the full `P x P` plane with odd symmetry,
/// `map(u, v) = -map(-u, -v)`, so that a unit-magnitude spectrum with this
/// phase has a real inverse.
///
/// The quadrant value at `(m, n)` lands at `(m, n)` and `(m, -n)`; their
/// point reflections get the negated value. The four self-conjugate
/// frequencies `(0|Q, 0|Q)` are set to zero.
pub fn stat_to_full_phase(surface: &StatSurface, scaling: PhaseScaling) -> Array2<f64> {
    let q = surface.quadrant();
    let p = 2 * q;
    let values = surface.values();
    let factor = match scaling {
        PhaseScaling::None => 1.0,
        PhaseScaling::PiScale => {
            let peak = values
                .indexed_iter()
                .filter(|&((m, n), _)| !is_self_conjugate(m, n, q))
                .map(|(_, v)| v.abs())
                .fold(0.0, f64::max);
            if peak > 0.0 {
                PI / peak
            } else {
                1.0
            }
        }
    };
    let mut out = Array2::zeros((p, p));
    for m in 0..=q {
        for n in 0..=q {
            if is_self_conjugate(m, n, q) {
                continue;
            }
            let (pm, pn) = ((p - m) % p, (p - n) % p);
            let v = values[[m, n]] * factor;
            out[[m, n]] = v;
            out[[pm, pn]] = -v;
            if (1..q).contains(&m) && (1..q).contains(&n) {
                out[[m, p - n]] = v;
                out[[p - m, n]] = -v;
            }
        }
    }
    out
}

fn is_self_conjugate(m: usize, n: usize, q: usize) -> bool {
    (m == 0 || m == q) && (n == 0 || n == q)
}

/// Reconstruction from a statistic surface.
pub fn reconstruct_from_stat(surface: &StatSurface, scaling: PhaseScaling) -> GrayImage {
    reconstruct_from_phase(&stat_to_full_phase(surface, scaling)).expect("mirrored map is even square")
}

/// Zero-mean normalized cross-correlation; 0 when either image is constant.
pub fn ncc(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    if a.size() != b.size() {
        return Err(Error::Dimension(format!(
            "ncc of {0}x{0} and {1}x{1} images",
            a.size(),
            b.size()
        )));
    }
    let is_constant = |img: &GrayImage| {
        let first = img.get(0, 0);
        img.pixels().iter().all(|&v| v == first)
    };
    if is_constant(a) || is_constant(b) {
        return Ok(0.0);
    }
    let (ma, mb) = (a.mean(), b.mean());
    let (mut cross, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.pixels().iter().zip(b.pixels().iter()) {
        let (dx, dy) = (x - ma, y - mb);
        cross += dx * dy;
        va += dx * dx;
        vb += dy * dy;
    }
    if !(va > 0.0) || !(vb > 0.0) {
        return Ok(0.0);
    }
    Ok((cross / (va.sqrt() * vb.sqrt())).clamp(-1.0, 1.0))
}

/// Gradient magnitude from circular central differences.
pub fn gradient_magnitude(image: &GrayImage) -> GrayImage {
    let p = image.size();
    let px = image.pixels();
    let grad = Array2::from_shape_fn((p, p), |(m, n)| {
        let dm = px[[(m + 1) % p, n]] - px[[(m + p - 1) % p, n]];
        let dn = px[[m, (n + 1) % p]] - px[[m, (n + p - 1) % p]];
        0.5 * (dm * dm + dn * dn).sqrt()
    });
    GrayImage::new(grad).expect("same dimensions")
}

/// NCC between the gradient-magnitude maps of two images.
pub fn gradient_ncc(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    ncc(&gradient_magnitude(a), &gradient_magnitude(b))
}
