//! Reference computations shared by the integration tests. Everything here is
//! written for clarity rather than speed.
#![allow(dead_code)]

use std::f64::consts::PI;

use hoss::spectral::{bispectrum_phase, trispectrum_phase};
use hoss::{ComplexSpectrum, Freq, GrayImage};
use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Uniform `[0, 1)` pixels from a seeded generator.
pub fn random_image(p: usize, seed: u64) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    GrayImage::from_fn(p, |_| rng.random::<f64>()).unwrap()
}

/// Direct `O(P^4)` evaluation of the forward DFT.
pub fn direct_dft(image: &GrayImage) -> Array2<Complex64> {
    let p = image.size();
    let px = image.pixels();
    Array2::from_shape_fn((p, p), |(u, v)| {
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..p {
            for n in 0..p {
                let angle = -2.0 * PI * ((u * m + v * n) % p) as f64 / p as f64;
                acc += px[[m, n]] * Complex64::from_polar(1.0, angle);
            }
        }
        acc
    })
}

/// Wrapped TOSS built only from `bispectrum_phase` calls.
pub fn toss_from_bispectrum(spec: &ComplexSpectrum) -> (Array2<f64>, Array2<bool>) {
    let q = spec.quadrant();
    let mut out = Array2::zeros((q + 1, q + 1));
    let mut degenerate = Array2::from_elem((q + 1, q + 1), false);
    for m in 0..=q {
        for n in 0..=q {
            for ix in 0..=m {
                for iy in 0..=n {
                    let b = bispectrum_phase(spec, Freq(ix, iy), Freq(m - ix, n - iy)).unwrap();
                    out[[m, n]] += b.phase;
                    degenerate[[m, n]] |= b.degenerate;
                }
            }
        }
    }
    (out, degenerate)
}

/// Wrapped FOSS built only from `trispectrum_phase` calls.
pub fn foss_from_trispectrum(spec: &ComplexSpectrum) -> (Array2<f64>, Array2<bool>) {
    let q = spec.quadrant();
    let mut out = Array2::zeros((q + 1, q + 1));
    let mut degenerate = Array2::from_elem((q + 1, q + 1), false);
    for m in 0..=q {
        for n in 0..=q {
            for ax in 0..=m {
                for ay in 0..=n {
                    for bx in 0..=m - ax {
                        for by in 0..=n - ay {
                            let t = trispectrum_phase(
                                spec,
                                Freq(ax, ay),
                                Freq(bx, by),
                                Freq(m - ax - bx, n - ay - by),
                            )
                            .unwrap();
                            out[[m, n]] += t.phase;
                            degenerate[[m, n]] |= t.degenerate;
                        }
                    }
                }
            }
        }
    }
    (out, degenerate)
}

/// Number of ordered triples of non-negative pairs summing to `(m, n)`,
/// counted over the first two members.
pub fn count_triples(m: usize, n: usize) -> usize {
    let mut count = 0;
    for ax in 0..=m {
        for ay in 0..=n {
            count += (m - ax + 1) * (n - ay + 1);
        }
    }
    count
}

/// `|a - b| <= tol * max(1, |a|, |b|)`: absolute near zero, relative for
/// large magnitudes.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

pub fn max_abs_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Population mean, variance and mean of squares.
pub fn moments(xs: &[f64]) -> (f64, f64, f64) {
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / k;
    let energy = xs.iter().map(|x| x * x).sum::<f64>() / k;
    (mean, var, energy)
}

/// Two 2-D Gaussian classes with unit variance centred at `(-2, 0)` and
/// `(2, 0)`, alternating labels.
pub fn gaussian_blobs(count: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<i8>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 1.0).unwrap();
    let mut xs = Vec::with_capacity(count);
    let mut ys = Vec::with_capacity(count);
    for i in 0..count {
        let y: i8 = if i % 2 == 0 { -1 } else { 1 };
        let cx = 2.0 * f64::from(y);
        xs.push(vec![cx + noise.sample(&mut rng), noise.sample(&mut rng)]);
        ys.push(y);
    }
    (xs, ys)
}

pub fn testdata(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("testdata").join(name)
}

pub fn bundled_images() -> Vec<(&'static str, GrayImage)> {
    ["landscape.pgm", "shapes.pgm", "fields.pgm"]
        .into_iter()
        .map(|name| (name, hoss::corpus::load_image(&testdata(name)).unwrap()))
        .collect()
}
