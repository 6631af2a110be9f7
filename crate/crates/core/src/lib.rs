//! Numerical toolkit for piecewise-smooth maps of the interval with negative
//! Schwarzian derivative: lateral (two-sided) orbits through critical points
//! and discontinuities, first-return maps, map surgeries, and statistical
//! detection and classification of metrical attractors.

pub mod branch;
pub mod lateral;
pub mod map;
pub mod mapfile;
pub mod numerics;
pub mod classify;
pub mod returns;
pub mod surgery;
pub mod zoo;

pub use branch::{Approach, BranchForm, BranchSpec, Orientation, PivotSide, SupEstimate, SupMethod};
pub use lateral::{
    detect_periodic_like, lateral_orbit, lateral_step, omega_estimate, rotation_number,
    LateralError, LateralOrbit, LateralState, OmegaCover, PeriodicLikeRecord, RotationError,
    Stability, Truncation,
};
pub use classify::{
    attractor_count_bound, classification_report, classify_attractor, cluster_attractors,
    density_trend, mane_probe, sample_omega, AttractorEstimate, AttractorKind,
    ClassificationReport, ClassifyError, DensityTrend, SamplingParams, Support,
};
pub use map::{
    EvalError, MapBuildError, PiecewiseMap, Provenance, SchwarzianError, Side, ValidationReport,
};
pub use mapfile::{canonical_json, load_map, save_map, MapfileError};
pub use returns::{
    accelerated_induced_map, check_nice, dichotomy_probe, first_return_map, DichotomyVerdict,
    FirstReturnMap, InducedMap, InducedMapError, NiceReport, NiceViolation, PendingBranch,
    ReturnBranch, ReturnMapError,
};
pub use surgery::{
    flatten_unimodal, lorenz_rescale, pit_surgery, SurgeryError, SurgeryKind, SurgeryRecord,
};
pub use zoo::{
    construct_ewi, extract_gap_map, make_logistic, make_lorenz, EwiMap, GapMap, LorenzParams,
    ZooError,
};
