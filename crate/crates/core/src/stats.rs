//! Third- and fourth-order structure statistics.
//!
//! TOSS at `(m, n)` sums the bispectrum phase over every split
//! `i + j = (m, n)` of the frequency into two non-negative pairs; FOSS sums
//! the trispectrum phase over every ordered split into three. The projection
//! functions evaluate those sums term by term and serve as the reference.
//! The fast functions use the closed forms
//!
//! ```text
//! S(m, n) = 2 * sum_{i <= (m,n)} phi(i) - (m+1)(n+1) phi(m, n)
//! Q(m, n) = 3 * sum_{k <= (m,n)} (m-kx+1)(n-ky+1) phi(k)
//!           - (m+1)(m+2)(n+1)(n+2)/4 * phi(m, n)
//! ```
//!
//! evaluated with 2-D prefix sums in `O(Q^2)`.

use std::fmt;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::spectral::{default_phase_spectrum, dft2, principal_phase, wrap_phase, ComplexSpectrum, PhaseSurface};

/// Default quadrant limit for [`foss_projection`], which costs `O(Q^6)`.
pub const DEFAULT_FOSS_PROJECTION_LIMIT: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StatKind {
    Toss,
    Foss,
}

impl StatKind {
    pub fn name(self) -> &'static str {
        match self {
            StatKind::Toss => "TOSS",
            StatKind::Foss => "FOSS",
        }
    }
}

impl fmt::Display for StatKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How each higher-order phase term enters the sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum StatMode {
    /// Unwrapped linear combination of principal phases.
    #[default]
    PhaseLinear,
    /// Principal value of the argument of the spectral product.
    WrappedArg,
}

/// TOSS or FOSS values over the quadrant `[0, Q]^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct StatSurface {
    values: Array2<f64>,
    kind: StatKind,
    mode: StatMode,
    source_size: usize,
}

impl StatSurface {
    pub fn new(values: Array2<f64>, kind: StatKind, mode: StatMode) -> Result<Self> {
        let (r, c) = values.dim();
        if r != c || r < 2 {
            return Err(Error::Dimension(format!("surface is {r}x{c}")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Dimension("surface contains non-finite values".into()));
        }
        Ok(Self {
            source_size: 2 * (r - 1),
            values,
            kind,
            mode,
        })
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn into_values(self) -> Array2<f64> {
        self.values
    }

    pub fn at(&self, m: usize, n: usize) -> f64 {
        self.values[[m, n]]
    }

    pub fn kind(&self) -> StatKind {
        self.kind
    }

    pub fn mode(&self) -> StatMode {
        self.mode
    }

    pub fn source_size(&self) -> usize {
        self.source_size
    }

    pub fn quadrant(&self) -> usize {
        self.values.nrows() - 1
    }

    pub fn max_abs_diff(&self, other: &StatSurface) -> f64 {
        self.values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Pre-computed spectrum data shared by the projection routines.
struct Terms<'a> {
    spec: &'a ComplexSpectrum,
    phase: PhaseSurface,
}

impl Terms<'_> {
    fn coeff(&self, m: usize, n: usize) -> Complex64 {
        self.spec.coefficients()[[m, n]]
    }

    fn degenerate(&self, m: usize, n: usize) -> bool {
        self.phase.is_degenerate(m, n)
    }

    /// Principal argument of `prod`, or the wrapped floored-phase sum when any
    /// factor is degenerate.
    fn wrapped(&self, prod: Complex64, any_degenerate: bool, floored_sum: f64) -> f64 {
        if any_degenerate {
            wrap_phase(floored_sum)
        } else {
            principal_phase(prod, 0.0).unwrap_or(0.0)
        }
    }
}

/// Brute-force TOSS, `O(Q^4)`.
pub fn toss_projection(spec: &ComplexSpectrum, mode: StatMode) -> StatSurface {
    let terms = Terms {
        spec,
        phase: default_phase_spectrum(spec),
    };
    let q = spec.quadrant();
    let phi = terms.phase.values();
    let mut out = Array2::zeros((q + 1, q + 1));
    for m in 0..=q {
        for n in 0..=q {
            let target = phi[[m, n]];
            let target_conj = terms.coeff(m, n).conj();
            let mut acc = 0.0;
            for ix in 0..=m {
                for iy in 0..=n {
                    let (jx, jy) = (m - ix, n - iy);
                    let linear = phi[[ix, iy]] + phi[[jx, jy]] - target;
                    acc += match mode {
                        StatMode::PhaseLinear => linear,
                        StatMode::WrappedArg => terms.wrapped(
                            terms.coeff(ix, iy) * terms.coeff(jx, jy) * target_conj,
                            terms.degenerate(ix, iy) || terms.degenerate(jx, jy) || terms.degenerate(m, n),
                            linear,
                        ),
                    };
                }
            }
            out[[m, n]] = acc;
        }
    }
    StatSurface::new(out, StatKind::Toss, mode).expect("projection output is finite")
}

/// Inclusive 2-D prefix sum, accumulated in row-major order.
fn prefix_sum(values: &Array2<f64>) -> Array2<f64> {
    let (rows, cols) = values.dim();
    let mut out = Array2::zeros((rows, cols));
    for m in 0..rows {
        let mut row_acc = 0.0;
        for n in 0..cols {
            row_acc += values[[m, n]];
            out[[m, n]] = row_acc + if m > 0 { out[[m - 1, n]] } else { 0.0 };
        }
    }
    out
}

/// TOSS via the prefix-sum closed form, `O(Q^2)`. Always phase-linear.
pub fn toss_fast(phase: &PhaseSurface) -> StatSurface {
    let phi = phase.values();
    let sums = prefix_sum(phi);
    let out = Array2::from_shape_fn(phi.dim(), |(m, n)| {
        2.0 * sums[[m, n]] - ((m + 1) * (n + 1)) as f64 * phi[[m, n]]
    });
    StatSurface::new(out, StatKind::Toss, StatMode::PhaseLinear).expect("finite phases give finite sums")
}

/// Number of ordered triples of non-negative pairs summing to `(m, n)`.
pub fn simplex_count(m: usize, n: usize) -> usize {
    (m + 1) * (m + 2) * (n + 1) * (n + 2) / 4
}

/// Brute-force FOSS with the default quadrant limit.
pub fn foss_projection(spec: &ComplexSpectrum, mode: StatMode) -> Result<StatSurface> {
    foss_projection_with_limit(spec, mode, DEFAULT_FOSS_PROJECTION_LIMIT)
}

/// Brute-force FOSS, `O(Q^6)`. Refuses quadrants larger than `max_quadrant`.
pub fn foss_projection_with_limit(
    spec: &ComplexSpectrum,
    mode: StatMode,
    max_quadrant: usize,
) -> Result<StatSurface> {
    let q = spec.quadrant();
    if q > max_quadrant {
        return Err(Error::SizeGuard { q, limit: max_quadrant });
    }
    let terms = Terms {
        spec,
        phase: default_phase_spectrum(spec),
    };
    let phi = terms.phase.values();
    let mut out = Array2::zeros((q + 1, q + 1));
    for m in 0..=q {
        for n in 0..=q {
            let target = phi[[m, n]];
            let target_conj = terms.coeff(m, n).conj();
            let target_degenerate = terms.degenerate(m, n);
            let mut acc = 0.0;
            for ax in 0..=m {
                for ay in 0..=n {
                    let a = terms.coeff(ax, ay);
                    for bx in 0..=m - ax {
                        for by in 0..=n - ay {
                            let (cx, cy) = (m - ax - bx, n - ay - by);
                            let linear = phi[[ax, ay]] + phi[[bx, by]] + phi[[cx, cy]] - target;
                            acc += match mode {
                                StatMode::PhaseLinear => linear,
                                StatMode::WrappedArg => terms.wrapped(
                                    a * terms.coeff(bx, by) * terms.coeff(cx, cy) * target_conj,
                                    target_degenerate
                                        || terms.degenerate(ax, ay)
                                        || terms.degenerate(bx, by)
                                        || terms.degenerate(cx, cy),
                                    linear,
                                ),
                            };
                        }
                    }
                }
            }
            out[[m, n]] = acc;
        }
    }
    Ok(StatSurface::new(out, StatKind::Foss, mode).expect("projection output is finite"))
}

/// FOSS via the closed form, `O(Q^2)`. Always phase-linear.
///
/// The weight `(m - kx + 1)(n - ky + 1)` expands into
/// `(m+1)(n+1) - (n+1) kx - (m+1) ky + kx ky`, so four prefix tables of
/// `phi`, `kx phi`, `ky phi` and `kx ky phi` suffice.
pub fn foss_fast(phase: &PhaseSurface) -> StatSurface {
    let phi = phase.values();
    let plain = prefix_sum(phi);
    let by_x = prefix_sum(&Array2::from_shape_fn(phi.dim(), |(kx, ky)| kx as f64 * phi[[kx, ky]]));
    let by_y = prefix_sum(&Array2::from_shape_fn(phi.dim(), |(kx, ky)| ky as f64 * phi[[kx, ky]]));
    let by_xy = prefix_sum(&Array2::from_shape_fn(phi.dim(), |(kx, ky)| {
        (kx * ky) as f64 * phi[[kx, ky]]
    }));
    let out = Array2::from_shape_fn(phi.dim(), |(m, n)| {
        let (m1, n1) = ((m + 1) as f64, (n + 1) as f64);
        let weighted = m1 * n1 * plain[[m, n]] - n1 * by_x[[m, n]] - m1 * by_y[[m, n]] + by_xy[[m, n]];
        3.0 * weighted - simplex_count(m, n) as f64 * phi[[m, n]]
    });
    StatSurface::new(out, StatKind::Foss, StatMode::PhaseLinear).expect("finite phases give finite sums")
}

/// Fast phase-linear statistic of an image with the default magnitude floor.
pub fn fast_surface(image: &GrayImage, kind: StatKind) -> StatSurface {
    let phase = default_phase_spectrum(&dft2(image));
    match kind {
        StatKind::Toss => toss_fast(&phase),
        StatKind::Foss => foss_fast(&phase),
    }
}

/// Dispatches to the fast path for phase-linear mode and to the projection
/// for wrapped mode, which has no closed form.
pub fn surface(image: &GrayImage, kind: StatKind, mode: StatMode, foss_limit: usize) -> Result<StatSurface> {
    let spec = dft2(image);
    match (kind, mode) {
        (_, StatMode::PhaseLinear) => Ok(fast_surface(image, kind)),
        (StatKind::Toss, StatMode::WrappedArg) => Ok(toss_projection(&spec, mode)),
        (StatKind::Foss, StatMode::WrappedArg) => foss_projection_with_limit(&spec, mode, foss_limit),
    }
}
