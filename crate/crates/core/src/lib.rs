//! Pose-error metrics and process simulation for 6D object-pose evaluation.
//!
//! The crate is `no_std` (with `alloc`) and does no IO. It provides:
//!
//! * [`geometry`]: SE(3) poses, object models and the error functions
//!   (maximum distance error, ADD, per-axis components);
//! * [`metrics`]: visibility-gated matching of estimates to ground truth,
//!   average precision/recall, confidence sweeps and error statistics;
//! * [`perturb`]: synthetic scenes and noisy estimates with known error
//!   characteristics;
//! * [`process`]: a Monte-Carlo model of a pick-and-place sequencing
//!   process that turns pose errors into process-level TP/FP/FN.
//!
//! All lengths are millimeters.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod annotation;
pub mod geometry;
pub mod metrics;
pub mod perturb;
pub mod process;
pub mod seed;

pub use annotation::{group_samples, AnnotationError, Estimate, GtAnnotation, Sample, SampleKey};
pub use geometry::{
    compute_add, compute_axis_components, compute_mde, GeometryError, ModelSet, ObjectModel, Pose,
};
pub use metrics::{
    compute_ap_ar, component_statistics, evaluate, export_distribution, match_sample, prepare_samples,
    sweep_confidence, ApAr, ComponentScope, ComponentStats, Counts, DistributionRow, EmptySamplePolicy,
    EvalConfig, EvalError, EvalReport, MatchRecord, PreparedSample, SampleMatchResult, SweepPoint, Verdict,
};
pub use perturb::{perturb, sample_scene, ConfidenceModel, NoiseModel, PerturbError, SceneLayout};
pub use process::{
    simulate, simulate_from_estimates, simulate_replications, AttemptVerdict, ProcessConfig, ProcessError,
    ProcessOutcome, TargetPolicy,
};

pub use nalgebra::{Matrix3, Vector3};
