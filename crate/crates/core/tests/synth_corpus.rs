mod common;

use common::{moments, random_image};
use hoss::corpus::{format_manifest, load_image, parse_manifest, read_manifest, FeatureTable, ManifestEntry};
use hoss::slices::class_average_stat;
use hoss::stats::fast_surface;
use hoss::synth::{generate_corpus, synth_corpus, SynthClass};
use hoss::{DescriptorSet, Error, StatKind};

#[test]
fn per_class_one_writes_two_images() {
    let dir = tempfile::tempdir().unwrap();
    let entries = generate_corpus(dir.path(), 1, 64, 5).unwrap();
    assert_eq!(entries.len(), 2);
    let manifest = read_manifest(&dir.path().join("manifest.csv")).unwrap();
    assert_eq!(manifest, entries);
    assert_eq!(manifest[0].path, "continuous_0000.pgm");
    assert_eq!(manifest[1].label, "dotted");
    for e in &manifest {
        assert_eq!(load_image(&dir.path().join(&e.path)).unwrap().size(), 64);
    }
}

#[test]
fn same_seed_same_bytes() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    generate_corpus(a.path(), 3, 64, 9).unwrap();
    generate_corpus(b.path(), 3, 64, 9).unwrap();
    for name in ["manifest.csv", "continuous_0002.pgm", "dotted_0001.pgm"] {
        assert_eq!(std::fs::read(a.path().join(name)).unwrap(), std::fs::read(b.path().join(name)).unwrap());
    }
}

#[test]
fn unwritable_directory() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("occupied");
    std::fs::write(&file, b"x").unwrap();
    assert!(matches!(generate_corpus(&file, 1, 64, 1), Err(Error::Io(_))));
}

#[test]
fn classes_share_first_order_statistics() {
    let corpus = synth_corpus(100, 256, 2024).unwrap();
    let class_stats = |class: SynthClass| {
        let pixels: Vec<f64> = corpus
            .iter()
            .filter(|(c, _)| *c == class)
            .flat_map(|(_, img)| img.pixels().iter().copied().collect::<Vec<_>>())
            .collect();
        moments(&pixels)
    };
    let (ma, va, _) = class_stats(SynthClass::Continuous);
    let (mb, vb, _) = class_stats(SynthClass::Dotted);
    assert!((ma - mb).abs() < 0.01);
    assert!((va - vb).abs() < 0.02);
}

#[test]
fn class_average_basics() {
    let img = random_image(32, 3);
    for kind in [StatKind::Toss, StatKind::Foss] {
        let single = class_average_stat(std::slice::from_ref(&img), kind, false).unwrap();
        assert_eq!(single, fast_surface(&img, kind));
        let repeated = class_average_stat(&[img.clone(), img.clone(), img.clone()], kind, false).unwrap();
        assert!(repeated.max_abs_diff(&single) <= 1e-9 * single.values().iter().fold(1.0f64, |a, v| a.max(v.abs())));
    }
    assert!(class_average_stat(&[], StatKind::Toss, false).is_err());
    assert!(class_average_stat(&[img, random_image(16, 1)], StatKind::Toss, false).is_err());
}

/// Compares the distance between the two class-mean surfaces with the mean
/// distance of each surface to its own class mean. On this corpus the
/// per-image phase surfaces are dominated by placement-dependent terms, and
/// the inequality does not hold; run with `--ignored` to see the numbers.
#[test]
#[ignore = "class-mean separation does not exceed within-class spread on the blob corpus"]
fn class_means_separate_beyond_within_class_spread() {
    let corpus = synth_corpus(100, 128, 2024).unwrap();
    let mut means = Vec::new();
    let mut within = Vec::new();
    for class in [SynthClass::Continuous, SynthClass::Dotted] {
        let images: Vec<_> = corpus.iter().filter(|(c, _)| *c == class).map(|(_, i)| i.clone()).collect();
        let mean = class_average_stat(&images, StatKind::Toss, true).unwrap();
        let spread = images
            .iter()
            .map(|img| {
                let s = class_average_stat(std::slice::from_ref(img), StatKind::Toss, true).unwrap();
                (s.values() - mean.values()).mapv(|x| x * x).sum().sqrt()
            })
            .sum::<f64>()
            / images.len() as f64;
        within.push(spread);
        means.push(mean);
    }
    let between = (means[0].values() - means[1].values()).mapv(|x| x * x).sum().sqrt();
    println!("between {between:.1}, within {:.1} / {:.1}", within[0], within[1]);
    assert!(between > within[0] && between > within[1]);
}

#[test]
fn manifest_round_trip() {
    let entries = vec![
        ManifestEntry {
            path: "a b.pgm".into(),
            label: "x".into(),
            seed: Some(7),
        },
        ManifestEntry {
            path: "sub/c,d.pgm".into(),
            label: "y".into(),
            seed: None,
        },
    ];
    let text = format_manifest(&entries);
    assert!(text.starts_with("path,label,seed\n"));
    assert!(!text.contains('\r'));
    assert_eq!(parse_manifest(&text).unwrap(), entries);
    assert!(parse_manifest("file,label,seed\na,b,1\n").is_err());
    assert!(parse_manifest("path,label,seed\na,b,notanumber\n").is_err());
}

#[test]
fn feature_table_round_trip_is_exact() {
    let table = FeatureTable {
        columns: DescriptorSet::Tosf.column_names(),
        rows: vec![hoss::corpus::FeatureRow {
            path: "p.pgm".into(),
            label: "dotted".into(),
            values: vec![0.1, -1.0 / 3.0, 1e-300, 123456789.123, -0.0, 5e22],
        }],
    };
    let text = table.to_csv();
    assert!(text.starts_with("path,label,t1_mean,t1_var,t1_energy,t2_mean,t2_var,t2_energy\n"));
    assert_eq!(FeatureTable::parse(&text).unwrap(), table);
    assert!(FeatureTable::parse("path,label,a\np,x,NaN\n").is_err());
}
