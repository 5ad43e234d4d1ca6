use std::path::Path;

use hoss::corpus::{load_image, load_manifest_images, read_manifest, FeatureTable, LabelMap, ManifestEntry};
use hoss::image::min_max_normalize;
use hoss::numfmt::{shortest, sig12};
use hoss::pgm::{self, Pgm};
use hoss::reconstruct::{gradient_ncc, magnitude_only, phase_only, reconstruct_from_stat};
use hoss::slices::{center_surface, class_average_stat, DEFAULT_ANGULAR_BINS};
use hoss::stats::{fast_surface, surface as stat_surface, DEFAULT_FOSS_PROJECTION_LIMIT};
use hoss::svm::{accuracy, corpus_features};
use hoss::synth::generate_corpus;
use hoss::{
    cross_validate, fosf, normal_slice, radial_slice, scale_sweep, svm_train, tosf, DescriptorSet, Error, Result,
    StatKind, StatSurface, SvmConfig, SvmModel,
};
use ndarray::Array2;

use crate::{
    ClassAverageArgs, EvalArgs, FeatureSource, FeaturesArgs, ReconstructArgs, SlicesArgs, SourceArg, SurfaceArgs,
    SweepArgs, SynthArgs, TrainArgs,
};

fn surface_csv(surface: &StatSurface) -> String {
    let mut out = String::new();
    for row in surface.values().rows() {
        let cells: Vec<String> = row.iter().map(|&v| sig12(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// 8-bit heatmap of any real matrix.
fn heatmap(values: &Array2<f64>) -> Pgm {
    let (height, width) = values.dim();
    let samples = min_max_normalize(values)
        .iter()
        .map(|&v| (v * 255.0).round() as u16)
        .collect();
    Pgm {
        width,
        height,
        maxval: 255,
        samples,
    }
}

fn write_surface(surface: &StatSurface, csv: Option<&Path>, heat: Option<&Path>) -> Result<()> {
    if let Some(path) = csv {
        std::fs::write(path, surface_csv(surface))?;
    }
    if let Some(path) = heat {
        pgm::write(path, &heatmap(&center_surface(surface)))?;
    }
    Ok(())
}

pub fn surface(args: SurfaceArgs) -> Result<()> {
    let image = load_image(&args.input)?;
    let limit = if args.force {
        usize::MAX
    } else {
        DEFAULT_FOSS_PROJECTION_LIMIT
    };
    let surface = stat_surface(&image, args.kind.into(), args.mode.into(), limit)?;
    write_surface(&surface, args.out_csv.as_deref(), args.out_pgm.as_deref())
}

pub fn reconstruct(args: ReconstructArgs) -> Result<()> {
    let image = load_image(&args.input)?;
    let (name, rec) = match args.source {
        SourceArg::Phase => ("phase", phase_only(&image)),
        SourceArg::Magnitude => ("magnitude", magnitude_only(&image)),
        SourceArg::Toss => ("toss", reconstruct_from_stat(&fast_surface(&image, StatKind::Toss), args.scaling.into())),
        SourceArg::Foss => ("foss", reconstruct_from_stat(&fast_surface(&image, StatKind::Foss), args.scaling.into())),
    };
    pgm::write(&args.out, &rec.to_pgm())?;
    if args.ncc_report {
        println!("source,gradient_ncc");
        println!("{name},{}", shortest(gradient_ncc(&rec, &image)?));
        if !matches!(args.source, SourceArg::Magnitude) {
            println!("magnitude,{}", shortest(gradient_ncc(&magnitude_only(&image), &image)?));
        }
    }
    Ok(())
}

pub fn slices(args: SlicesArgs) -> Result<()> {
    let image = load_image(&args.input)?;
    let kind: StatKind = args.kind.into();
    let surface = fast_surface(&image, kind);
    let radial = radial_slice(&surface, surface.quadrant().max(2));
    let normal = normal_slice(&surface, DEFAULT_ANGULAR_BINS);
    let mut out = String::from("slice,bin,value\n");
    for (name, profile) in [("radial", &radial), ("normal", &normal)] {
        for (bin, v) in profile.samples.iter().enumerate() {
            out.push_str(&format!("{name},{bin},{}\n", shortest(*v)));
        }
    }
    std::fs::write(&args.out_csv, out)?;
    match kind {
        StatKind::Toss => {
            let t = tosf(&surface)?;
            println!("t1,{}\nt2,{}", shortest(t.t1), shortest(t.t2));
        }
        StatKind::Foss => {
            let f = fosf(&surface)?;
            println!("f1,{}\nf2,{}", shortest(f.f1), shortest(f.f2));
        }
    }
    Ok(())
}

pub fn class_average(args: ClassAverageArgs) -> Result<()> {
    let entries: Vec<ManifestEntry> = read_manifest(&args.manifest)?
        .into_iter()
        .filter(|e| e.label == args.label)
        .collect();
    if entries.is_empty() {
        return Err(Error::InvalidArgument(format!("no images labeled {:?} in manifest", args.label)));
    }
    let images = load_manifest_images(&args.manifest, &entries)?;
    let surface = class_average_stat(&images, args.kind.into(), args.preprocess)?;
    write_surface(&surface, args.out_csv.as_deref(), args.out_pgm.as_deref())
}

fn manifest_table(manifest: &Path, tile_size: usize, set: DescriptorSet) -> Result<FeatureTable> {
    let entries = read_manifest(manifest)?;
    let images = load_manifest_images(manifest, &entries)?;
    let vectors = corpus_features(&images, tile_size, set)?;
    Ok(FeatureTable::from_vectors(set.column_names(), &entries, &vectors))
}

pub fn features(args: FeaturesArgs) -> Result<()> {
    let table = manifest_table(&args.manifest, args.tile_size, args.descriptors.into())?;
    std::fs::write(&args.out_csv, table.to_csv())?;
    Ok(())
}

fn load_table(source: &FeatureSource) -> Result<FeatureTable> {
    match (&source.features_csv, &source.manifest) {
        (Some(csv), _) => FeatureTable::parse(&std::fs::read_to_string(csv)?),
        (None, Some(manifest)) => manifest_table(manifest, source.tile_size, source.descriptors.into()),
        (None, None) => Err(Error::InvalidArgument("need --features-csv or --manifest".into())),
    }
}

pub fn train(args: TrainArgs) -> Result<()> {
    let table = load_table(&args.source)?;
    let map = table.label_map()?;
    let (xs, ys) = table.dataset(&map)?;
    let mut model = svm_train(&xs, &ys, &SvmConfig::from(&args.svm))?;
    model.labels = Some(map.pair());
    std::fs::write(&args.model, model.to_json())?;
    Ok(())
}

pub fn eval(args: EvalArgs) -> Result<()> {
    let table = load_table(&args.source)?;
    let mut out = String::from("metric,value\n");
    match &args.model {
        Some(path) => {
            let model = SvmModel::from_json(&std::fs::read_to_string(path)?)?;
            let map = match &model.labels {
                Some(pair) => LabelMap::from_pair(pair),
                None => table.label_map()?,
            };
            let (xs, ys) = table.dataset(&map)?;
            out.push_str(&format!("accuracy,{}\n", shortest(accuracy(&model, &xs, &ys)?)));
        }
        None => {
            let map = table.label_map()?;
            let (xs, ys) = table.dataset(&map)?;
            let cv = cross_validate(&xs, &ys, args.folds, &SvmConfig::from(&args.svm))?;
            out.push_str(&format!("accuracy,{}\n", shortest(cv.mean_accuracy)));
            for (i, a) in cv.fold_accuracies.iter().enumerate() {
                out.push_str(&format!("fold_{i},{}\n", shortest(*a)));
            }
        }
    }
    print!("{out}");
    if let Some(path) = &args.out_csv {
        std::fs::write(path, &out)?;
    }
    Ok(())
}

pub fn sweep(args: SweepArgs) -> Result<()> {
    let entries = read_manifest(&args.manifest)?;
    let map = LabelMap::from_labels(entries.iter().map(|e| e.label.as_str()))?;
    let labels = entries.iter().map(|e| map.encode(&e.label)).collect::<Result<Vec<i8>>>()?;
    let images = load_manifest_images(&args.manifest, &entries)?;
    let rows = scale_sweep(
        &images,
        &labels,
        &args.scales,
        args.descriptors.into(),
        args.folds,
        &SvmConfig::from(&args.svm),
    )?;
    let mut out = String::from("scale,accuracy\n");
    for (scale, acc) in rows {
        out.push_str(&format!("{scale},{}\n", shortest(acc)));
    }
    std::fs::write(&args.out_csv, out)?;
    Ok(())
}

pub fn synth(args: SynthArgs) -> Result<()> {
    let entries = generate_corpus(&args.out_dir, args.per_class, args.size, args.seed)?;
    println!("wrote {} images and manifest.csv to {}", entries.len(), args.out_dir.display());
    Ok(())
}
