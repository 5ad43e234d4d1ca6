//! Deterministic two-class linear SVM.
//!
//! Features are z-scored with training statistics, then the primal objective
//!
//! ```text
//! lambda/2 |w|^2 + 1/N sum_i max(0, 1 - y_i (w . x_i + b))
//! ```
//!
//! is minimized by stochastic subgradient steps of size `1 / (lambda t)` over
//! a seeded per-epoch shuffle, with projection onto the ball of radius
//! `1 / sqrt(lambda)`. The bias is not regularized. The returned model is the
//! average of the iterates visited during the final epoch.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{grid_feature_vector, DescriptorSet, FeatureVector};
use crate::image::GrayImage;

pub const MODEL_VERSION: u32 = 1;
pub const DEFAULT_FOLDS: usize = 5;

const FROZEN_STD: f64 = 1e-12;
const FOLD_SEED_SALT: u64 = 0x5eed_f01d;

impl AsRef<[f64]> for FeatureVector {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmConfig {
    pub lambda: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self {
            lambda: 0.01,
            epochs: 200,
            seed: 0,
        }
    }
}

impl SvmConfig {
    fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidArgument(format!("lambda must be positive, got {}", self.lambda)));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidArgument("epochs must be at least 1".into()));
        }
        Ok(())
    }
}

/// Trained linear classifier. Serializes as a versioned JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub version: u32,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    pub lambda: f64,
    pub epochs: usize,
    pub seed: u64,
    /// Class names for labels `-1` and `+1`, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<[String; 2]>,
}

impl SvmModel {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn standardize(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }

    pub fn decision_value(&self, x: &[f64]) -> Result<f64> {
        check_len(self.dim(), x.len())?;
        let z = self.standardize(x);
        Ok(dot(&self.weights, &z) + self.bias)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: SvmModel =
            serde_json::from_str(text).map_err(|e| Error::Format(format!("model document: {e}")))?;
        if model.version != MODEL_VERSION {
            return Err(Error::Format(format!("unsupported model version {}", model.version)));
        }
        let d = model.weights.len();
        if model.means.len() != d || model.stds.len() != d {
            return Err(Error::Format("model vectors have inconsistent lengths".into()));
        }
        let finite = model
            .weights
            .iter()
            .chain(&model.means)
            .chain(std::iter::once(&model.bias))
            .all(|v| v.is_finite());
        if !finite || model.stds.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
            return Err(Error::Format("model contains non-finite values or non-positive stds".into()));
        }
        Ok(model)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::LengthMismatch { expected, actual });
    }
    Ok(())
}

fn check_dataset<F: AsRef<[f64]>>(features: &[F], labels: &[i8]) -> Result<usize> {
    if features.len() != labels.len() {
        return Err(Error::LengthMismatch {
            expected: features.len(),
            actual: labels.len(),
        });
    }
    let dim = features.first().map(|f| f.as_ref().len()).ok_or(Error::Empty("no training examples"))?;
    for f in features {
        check_len(dim, f.as_ref().len())?;
    }
    if let Some(bad) = labels.iter().find(|&&y| y != 1 && y != -1) {
        return Err(Error::InvalidArgument(format!("label {bad} is not -1 or +1")));
    }
    Ok(dim)
}

/// Regularized hinge objective of `(weights, bias)` on standardized data.
fn objective(weights: &[f64], bias: f64, data: &[Vec<f64>], labels: &[i8], lambda: f64) -> f64 {
    let hinge: f64 = data
        .iter()
        .zip(labels)
        .map(|(x, &y)| (1.0 - f64::from(y) * (dot(weights, x) + bias)).max(0.0))
        .sum();
    0.5 * lambda * dot(weights, weights) + hinge / data.len() as f64
}

/// Trained model plus the objective of each epoch's averaged iterate.
#[derive(Debug, Clone)]
pub struct TrainReport {
    pub model: SvmModel,
    /// Objective at the zero initialization.
    pub initial_objective: f64,
    pub epoch_objectives: Vec<f64>,
}

pub fn svm_train<F: AsRef<[f64]>>(features: &[F], labels: &[i8], config: &SvmConfig) -> Result<SvmModel> {
    svm_train_report(features, labels, config).map(|r| r.model)
}

pub fn svm_train_report<F: AsRef<[f64]>>(features: &[F], labels: &[i8], config: &SvmConfig) -> Result<TrainReport> {
    config.validate()?;
    let dim = check_dataset(features, labels)?;
    let positives = labels.iter().filter(|&&y| y == 1).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::SingleClass);
    }
    if positives < 2 || negatives < 2 {
        return Err(Error::TooFewExamples(format!(
            "need at least 2 examples per class, got {negatives} negative and {positives} positive"
        )));
    }

    let n = features.len();
    let mut means = vec![0.0; dim];
    for f in features {
        means.iter_mut().zip(f.as_ref()).for_each(|(m, v)| *m += v);
    }
    means.iter_mut().for_each(|m| *m /= n as f64);
    let mut stds = vec![0.0; dim];
    for f in features {
        stds.iter_mut()
            .zip(f.as_ref().iter().zip(&means))
            .for_each(|(s, (v, m))| *s += (v - m) * (v - m));
    }
    let frozen: Vec<bool> = stds
        .iter_mut()
        .map(|s| {
            *s = (*s / n as f64).sqrt();
            let frozen = *s < FROZEN_STD;
            if frozen {
                *s = 1.0;
            }
            frozen
        })
        .collect();
    let data: Vec<Vec<f64>> = features
        .iter()
        .map(|f| {
            f.as_ref()
                .iter()
                .zip(means.iter().zip(&stds))
                .zip(&frozen)
                .map(|((v, (m, s)), &fz)| if fz { 0.0 } else { (v - m) / s })
                .collect()
        })
        .collect();

    let lambda = config.lambda;
    let radius = 1.0 / lambda.sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut t: u64 = 0;
    let initial_objective = objective(&w, b, &data, labels, lambda);
    let mut epoch_objectives = Vec::with_capacity(config.epochs);
    let mut avg_w = vec![0.0; dim];
    let mut avg_b = 0.0;

    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        avg_w.iter_mut().for_each(|v| *v = 0.0);
        avg_b = 0.0;
        for &i in &order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let x = &data[i];
            let y = f64::from(labels[i]);
            let margin = y * (dot(&w, x) + b);
            let shrink = 1.0 - eta * lambda;
            w.iter_mut().for_each(|v| *v *= shrink);
            if margin < 1.0 {
                w.iter_mut().zip(x).for_each(|(v, xi)| *v += eta * y * xi);
                b += eta * y;
            }
            let norm = dot(&w, &w).sqrt();
            if norm > radius {
                let k = radius / norm;
                w.iter_mut().for_each(|v| *v *= k);
            }
            avg_w.iter_mut().zip(&w).for_each(|(a, v)| *a += v);
            avg_b += b;
        }
        avg_w.iter_mut().for_each(|v| *v /= n as f64);
        avg_b /= n as f64;
        epoch_objectives.push(objective(&avg_w, avg_b, &data, labels, lambda));
    }

    Ok(TrainReport {
        model: SvmModel {
            version: MODEL_VERSION,
            weights: avg_w,
            bias: avg_b,
            means,
            stds,
            lambda,
            epochs: config.epochs,
            seed: config.seed,
            labels: None,
        },
        initial_objective,
        epoch_objectives,
    })
}

/// Predicted label and raw decision value; a decision value of exactly 0
/// maps to `+1`.
pub fn svm_predict(model: &SvmModel, feature: &[f64]) -> Result<(i8, f64)> {
    let margin = model.decision_value(feature)?;
    Ok((if margin >= 0.0 { 1 } else { -1 }, margin))
}

pub fn accuracy<F: AsRef<[f64]>>(model: &SvmModel, features: &[F], labels: &[i8]) -> Result<f64> {
    check_dataset(features, labels)?;
    let mut correct = 0usize;
    for (f, &y) in features.iter().zip(labels) {
        if svm_predict(model, f.as_ref())?.0 == y {
            correct += 1;
        }
    }
    Ok(correct as f64 / labels.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvResult {
    pub mean_accuracy: f64,
    pub fold_accuracies: Vec<f64>,
}

/// Seeded stratified fold assignment: within each class, indices are shuffled
/// and dealt round-robin.
pub fn stratified_folds(labels: &[i8], folds: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ FOLD_SEED_SALT);
    let mut assignment = vec![0; labels.len()];
    for class in [-1i8, 1] {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        members.shuffle(&mut rng);
        for (j, i) in members.into_iter().enumerate() {
            assignment[i] = j % folds;
        }
    }
    assignment
}

pub fn cross_validate<F: AsRef<[f64]> + Sync>(
    features: &[F],
    labels: &[i8],
    folds: usize,
    config: &SvmConfig,
) -> Result<CvResult> {
    config.validate()?;
    check_dataset(features, labels)?;
    if folds < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 folds, got {folds}")));
    }
    for class in [-1i8, 1] {
        let count = labels.iter().filter(|&&y| y == class).count();
        if count == 0 {
            return Err(Error::SingleClass);
        }
        // every fold needs a test example of each class and training keeps >= 2
        if count < folds || count - count.div_ceil(folds) < 2 {
            return Err(Error::TooFewExamples(format!(
                "class {class:+} has {count} examples, too few for {folds} folds"
            )));
        }
    }
    let assignment = stratified_folds(labels, folds, config.seed);
    let fold_accuracies = (0..folds)
        .into_par_iter()
        .map(|fold| {
            let (mut train_x, mut train_y, mut test_x, mut test_y) = (vec![], vec![], vec![], vec![]);
            for (i, f) in features.iter().enumerate() {
                if assignment[i] == fold {
                    test_x.push(f.as_ref());
                    test_y.push(labels[i]);
                } else {
                    train_x.push(f.as_ref());
                    train_y.push(labels[i]);
                }
            }
            let model = svm_train(&train_x, &train_y, config)?;
            accuracy(&model, &test_x, &test_y)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mean_accuracy = fold_accuracies.iter().sum::<f64>() / folds as f64;
    Ok(CvResult {
        mean_accuracy,
        fold_accuracies,
    })
}

/// Feature vectors of every image at one tile size, in input order.
pub fn corpus_features(images: &[GrayImage], tile_size: usize, set: DescriptorSet) -> Result<Vec<FeatureVector>> {
    images
        .par_iter()
        .map(|img| grid_feature_vector(img, tile_size, set))
        .collect()
}

/// Cross-validated accuracy at each tile size, in the order given.
pub fn scale_sweep(
    images: &[GrayImage],
    labels: &[i8],
    scales: &[usize],
    set: DescriptorSet,
    folds: usize,
    config: &SvmConfig,
) -> Result<Vec<(usize, f64)>> {
    scales
        .iter()
        .map(|&scale| {
            let features = corpus_features(images, scale, set)?;
            let cv = cross_validate(&features, labels, folds, config)?;
            log::info!("tile size {scale}: mean accuracy {:.4}", cv.mean_accuracy);
            Ok((scale, cv.mean_accuracy))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_model(w: f64, b: f64) -> SvmModel {
        SvmModel {
            version: MODEL_VERSION,
            weights: vec![w],
            bias: b,
            means: vec![0.0],
            stds: vec![1.0],
            lambda: 0.01,
            epochs: 1,
            seed: 0,
            labels: None,
        }
    }

    #[test]
    fn predict_and_tie_rule() {
        let model = toy_model(1.0, 0.0);
        assert_eq!(svm_predict(&model, &[0.5]).unwrap(), (1, 0.5));
        assert_eq!(svm_predict(&model, &[0.0]).unwrap(), (1, 0.0));
        assert_eq!(svm_predict(&model, &[-0.5]).unwrap().0, -1);
        assert!(matches!(svm_predict(&model, &[0.0, 1.0]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn separable_pair() {
        let x = vec![vec![-1.0], vec![-1.1], vec![1.0], vec![1.1]];
        let y = [-1, -1, 1, 1];
        let model = svm_train(&x, &y, &SvmConfig::default()).unwrap();
        assert_eq!(accuracy(&model, &x, &y).unwrap(), 1.0);
    }

    #[test]
    fn input_errors() {
        let cfg = SvmConfig::default();
        let x = vec![vec![0.0], vec![1.0], vec![2.0]];
        assert!(matches!(svm_train(&x, &[1, 1, 1], &cfg), Err(Error::SingleClass)));
        assert!(matches!(svm_train(&x, &[1, -1], &cfg), Err(Error::LengthMismatch { .. })));
        assert!(matches!(svm_train(&x, &[1, -1, -1], &cfg), Err(Error::TooFewExamples(_))));
        let ragged = vec![vec![0.0], vec![1.0, 2.0]];
        assert!(matches!(svm_train(&ragged, &[1, -1], &cfg), Err(Error::LengthMismatch { .. })));
        assert!(svm_train(&x, &[1, -1, 2], &cfg).is_err());
        let bad = SvmConfig { lambda: 0.0, ..cfg };
        assert!(svm_train(&x, &[1, -1, -1], &bad).is_err());
    }

    #[test]
    fn frozen_dimension_gets_zero_weight() {
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 3.0]).collect();
        let y: Vec<i8> = (0..10).map(|i| if i < 5 { -1 } else { 1 }).collect();
        let model = svm_train(&x, &y, &SvmConfig::default()).unwrap();
        assert_eq!(model.weights[1], 0.0);
        assert_eq!(model.stds[1], 1.0);
        assert_eq!(accuracy(&model, &x, &y).unwrap(), 1.0);
    }

    #[test]
    fn model_json_roundtrip() {
        let mut model = toy_model(0.25, -1.5);
        model.labels = Some(["a".into(), "b".into()]);
        let text = model.to_json();
        assert_eq!(SvmModel::from_json(&text).unwrap(), model);
        assert!(SvmModel::from_json("{}").is_err());
        let wrong = text.replace("\"version\": 1", "\"version\": 9");
        assert!(matches!(SvmModel::from_json(&wrong), Err(Error::Format(_))));
    }

    #[test]
    fn folds_are_stratified() {
        let labels: Vec<i8> = (0..23).map(|i| if i % 3 == 0 { 1 } else { -1 }).collect();
        let a = stratified_folds(&labels, 4, 9);
        assert_eq!(a, stratified_folds(&labels, 4, 9));
        for fold in 0..4 {
            let pos = (0..23).filter(|&i| a[i] == fold && labels[i] == 1).count();
            assert!((1..=2).contains(&pos));
        }
    }

    #[test]
    fn cv_rejects_tiny_classes() {
        let x: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64]).collect();
        let y = [-1, -1, -1, -1, -1, -1, 1, 1];
        assert!(matches!(
            cross_validate(&x, &y, 5, &SvmConfig::default()),
            Err(Error::TooFewExamples(_))
        ));
        assert!(cross_validate(&x, &y, 1, &SvmConfig::default()).is_err());
    }
}
