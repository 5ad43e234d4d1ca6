//! Higher-order structure statistics of grayscale images.
//!
//! The third-order statistic (TOSS) projects the bispectrum phase onto the
//! lines `w1 + w2 = (m, n)`; the fourth-order statistic (FOSS) does the same
//! for the trispectrum phase over the simplex `k1 + k2 + k3 = (m, n)`. Both
//! reduce to linear combinations of the image phase spectrum and are computed
//! in `O(Q^2)` with prefix sums, where `Q = P / 2` for a `P x P` image.
//!
//! On top of the surfaces the crate provides phase-only reconstruction,
//! radial/normal slicing into the TOSF/FOSF descriptors, a tiled feature
//! pipeline, a deterministic linear SVM, and a seeded synthetic corpus.

pub mod corpus;
pub mod error;
pub mod features;
pub mod image;
pub mod numfmt;
pub mod pgm;
pub mod reconstruct;
pub mod slices;
pub mod spectral;
pub mod stats;
pub mod svm;
pub mod synth;

pub use error::{Error, Result};
pub use features::{grid_feature_vector, tile, DescriptorSet, FeatureVector};
pub use image::GrayImage;
pub use reconstruct::{ncc, reconstruct_from_phase, stat_to_full_phase, PhaseScaling};
pub use slices::{fosf, normal_slice, radial_slice, tosf, Fosf, SliceKind, SliceProfile, Tosf};
pub use spectral::{dft2, phase_spectrum, ComplexSpectrum, Freq, PhaseSurface};
pub use stats::{foss_fast, foss_projection, toss_fast, toss_projection, StatKind, StatMode, StatSurface};
pub use svm::{cross_validate, scale_sweep, svm_predict, svm_train, SvmConfig, SvmModel};
