//! Regenerates the bundled scene images in `testdata/`.
//!
//! Run with `cargo run -p hoss-core --example gen_testdata`.

use std::path::Path;

use hoss::pgm;
use hoss::GrayImage;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SIZE: usize = 256;

fn smooth_noise(rng: &mut ChaCha8Rng, cell: usize) -> impl Fn(f64, f64) -> f64 {
    let cells = SIZE / cell + 2;
    let grid: Vec<f64> = (0..cells * cells).map(|_| rng.random_range(-1.0..1.0)).collect();
    move |x: f64, y: f64| {
        let (gx, gy) = (x / cell as f64, y / cell as f64);
        let (i, j) = (gx.floor() as usize, gy.floor() as usize);
        let (fx, fy) = (gx - i as f64, gy - j as f64);
        let at = |a: usize, b: usize| grid[a * cells + b];
        let top = at(i, j) * (1.0 - fy) + at(i, j + 1) * fy;
        let bottom = at(i + 1, j) * (1.0 - fy) + at(i + 1, j + 1) * fy;
        top * (1.0 - fx) + bottom * fx
    }
}

/// Sky gradient over hills, a sun, and a few houses.
fn landscape(seed: u64) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ridge = smooth_noise(&mut rng, 32);
    let grass = smooth_noise(&mut rng, 4);
    let houses: Vec<(f64, f64, f64, f64)> = (0..5)
        .map(|_| {
            let x = rng.random_range(20.0..220.0);
            let w = rng.random_range(14.0..30.0);
            let h = rng.random_range(14.0..36.0);
            (x, w, h, rng.random_range(0.15..0.45))
        })
        .collect();
    GrayImage::from_fn(SIZE, |(m, n)| {
        let (y, x) = (m as f64, n as f64);
        let horizon = 150.0 + 25.0 * ridge(40.0, x);
        let mut v = if y < horizon {
            0.85 - 0.4 * y / horizon
        } else {
            0.35 + 0.12 * grass(y, x)
        };
        if (y - 50.0).hypot(x - 190.0) < 18.0 {
            v = 0.98;
        }
        for &(hx, w, h, shade) in &houses {
            let base = 150.0 + 25.0 * ridge(40.0, hx) + 8.0;
            if (x - hx).abs() < w / 2.0 && y > base - h && y < base {
                v = shade;
                let (wx, wy) = ((x - hx + w / 2.0) % 8.0, (base - y) % 10.0);
                if (2.0..5.0).contains(&wx) && (3.0..7.0).contains(&wy) {
                    v = 0.9;
                }
            }
        }
        v.clamp(0.0, 1.0)
    })
    .unwrap()
}

/// Overlapping rectangles and discs on a shaded background.
fn shapes(seed: u64) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shade = smooth_noise(&mut rng, 64);
    let items: Vec<(bool, f64, f64, f64, f64, f64)> = (0..14)
        .map(|_| {
            (
                rng.random_bool(0.5),
                rng.random_range(0.0..256.0),
                rng.random_range(0.0..256.0),
                rng.random_range(10.0..50.0),
                rng.random_range(10.0..50.0),
                rng.random_range(0.0..1.0),
            )
        })
        .collect();
    GrayImage::from_fn(SIZE, |(m, n)| {
        let (y, x) = (m as f64, n as f64);
        let mut v = 0.5 + 0.2 * shade(y, x);
        for &(disc, cy, cx, a, b, level) in &items {
            let inside = if disc {
                (y - cy).hypot(x - cx) < a
            } else {
                (y - cy).abs() < a && (x - cx).abs() < b
            };
            if inside {
                v = level;
            }
        }
        v.clamp(0.0, 1.0)
    })
    .unwrap()
}

/// Field of oriented stripes with a darker road crossing it.
fn fields(seed: u64) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let patches: Vec<(f64, f64, f64)> = (0..16)
        .map(|_| {
            (
                rng.random_range(0.0..std::f64::consts::PI),
                rng.random_range(4.0..14.0),
                rng.random_range(0.3..0.7),
            )
        })
        .collect();
    let tex = smooth_noise(&mut rng, 8);
    GrayImage::from_fn(SIZE, |(m, n)| {
        let (y, x) = (m as f64, n as f64);
        let (theta, period, base) = patches[(m / 64) * 4 + n / 64];
        let u = x * theta.cos() + y * theta.sin();
        let mut v = base + 0.15 * (2.0 * std::f64::consts::PI * u / period).sin() + 0.05 * tex(y, x);
        if (y - 0.6 * x - 40.0).abs() < 9.0 {
            v = 0.1;
        }
        v.clamp(0.0, 1.0)
    })
    .unwrap()
}

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("testdata");
    std::fs::create_dir_all(&dir).unwrap();
    for (name, img) in [
        ("landscape.pgm", landscape(1)),
        ("shapes.pgm", shapes(2)),
        ("fields.pgm", fields(3)),
    ] {
        pgm::write(&dir.join(name), &img.to_pgm()).unwrap();
        println!("wrote {}", dir.join(name).display());
    }
}
