//! Attractor estimation: seeded omega-limit sampling, clustering of the
//! sampled covers, taxonomy (periodic cycle / interval cycle / thin set),
//! basin bookkeeping, and the critical-proximity probe.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lateral::{
    detect_periodic_like, lateral_orbit, lateral_step, omega_estimate, LateralState, OmegaCover,
    PeriodicLikeRecord, Stability, MAX_TAIL_PERIOD,
};
use crate::map::{PiecewiseMap, Side};
use crate::numerics::hausdorff;

/// Resolutions for the density-trend discrimination: each entry halves the
/// previous one.
pub const TREND_RESOLUTIONS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

/// Density drop factor per resolution halving that marks a thin support.
const THIN_DROP: f64 = 1.5;

/// Relative density change per halving treated as stable (interval-like).
const STABLE_BAND: f64 = 0.10;

/// Tolerance for the cycle detector used during classification.
const DETECT_TOL: f64 = 1e-9;

/// Monte Carlo sampling configuration. The seed is always explicit: there is
/// no implicit entropy anywhere in the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingParams {
    pub samples: usize,
    pub burn_in: usize,
    pub tail: usize,
    pub resolution: f64,
    pub hausdorff_tol: f64,
    pub seed: u64,
}

impl SamplingParams {
    /// Desk-scale defaults: 500 samples, 10⁴ burn-in, 10⁵ tail, grid 10⁻³,
    /// cluster tolerance 5·10⁻³.
    pub fn with_seed(seed: u64) -> Self {
        SamplingParams {
            samples: 500,
            burn_in: 10_000,
            tail: 100_000,
            resolution: 1e-3,
            hausdorff_tol: 5e-3,
            seed,
        }
    }
}

/// The i-th sample start: an own counter stream of the seeded generator, so
/// samples are reproducible individually and independent of thread count.
fn sample_start(seed: u64, index: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng.random::<f64>()
}

/// One omega-limit cover per sampled start, in sample order.
pub fn sample_omega(map: &PiecewiseMap, params: &SamplingParams) -> Vec<OmegaCover> {
    assert!(params.samples >= 1, "need at least one sample");
    (0..params.samples)
        .into_par_iter()
        .map(|i| {
            let x0 = sample_start(params.seed, i);
            omega_estimate(map, x0, params.burn_in, params.tail, params.resolution)
        })
        .collect()
}

/// Attractor taxonomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttractorKind {
    PeriodicLike,
    CycleOfIntervals,
    CantorLike,
    Undetermined,
}

/// Support of an estimated attractor: a verified finite cycle (with side
/// tags) or a union of grid intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Support {
    Points { points: Vec<LateralState> },
    Cover {
        resolution: f64,
        cells: Vec<u32>,
        intervals: Vec<(f64, f64)>,
    },
}

/// Maximal runs of consecutive cells as closed-open intervals.
fn intervals_from_cells(cells: &[u32], resolution: f64) -> Vec<(f64, f64)> {
    let mut out: Vec<(u32, u32)> = Vec::new();
    for &c in cells {
        match out.last_mut() {
            Some((_, hi)) if *hi + 1 == c => *hi = c,
            _ => out.push((c, c)),
        }
    }
    out.iter()
        .map(|&(lo, hi)| (lo as f64 * resolution, (hi as f64 + 1.0) * resolution))
        .collect()
}

impl Support {
    /// Sorted coordinates representing the support (cycle points or cell
    /// midpoints), for Hausdorff comparisons.
    pub fn representative_coords(&self) -> Vec<f64> {
        match self {
            Support::Points { points } => {
                let mut v: Vec<f64> = points.iter().map(|p| p.coord).collect();
                v.sort_by(|a, b| a.partial_cmp(b).unwrap());
                v
            }
            Support::Cover {
                resolution, cells, ..
            } => cells
                .iter()
                .map(|&i| (i as f64 + 0.5) * resolution)
                .collect(),
        }
    }

    pub fn infimum(&self) -> f64 {
        self.representative_coords().first().copied().unwrap_or(0.0)
    }

    /// Is `x` strictly inside one of the support intervals?
    pub fn contains_interior(&self, x: f64) -> bool {
        match self {
            Support::Points { .. } => false,
            Support::Cover { intervals, .. } => {
                intervals.iter().any(|&(lo, hi)| lo < x && x < hi)
            }
        }
    }
}

/// One candidate attractor: where it is, how it is classified, and how much
/// of the sample converged to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttractorEstimate {
    pub id: usize,
    pub kind: AttractorKind,
    pub support: Support,
    /// Fraction of samples whose cover joined this cluster.
    pub basin_measure: f64,
    /// 1.96·√(p̂(1−p̂)/n) Monte Carlo halfwidth for the basin estimate.
    pub confidence_halfwidth: f64,
    /// Samples backing the basin estimate (basin_measure = count/samples).
    pub member_count: usize,
    /// A sampled start known to converge to this attractor.
    pub witness_x0: f64,
    /// Lateral exceptional points whose orbit closure matches the support.
    pub traced_by: Vec<LateralState>,
    /// Verification record behind a periodic_like verdict.
    pub periodic: Option<PeriodicLikeRecord>,
}

/// Merge sampled covers into candidate attractors by single-linkage
/// clustering of their cell-midpoint sets under the Hausdorff metric.
/// Partial covers (orbits that hit the exceptional set exactly) stay
/// unassigned. Output is sorted by support infimum and carries basin
/// frequencies relative to `covers.len()`.
pub fn cluster_attractors(covers: &[OmegaCover], hausdorff_tol: f64) -> Vec<AttractorEstimate> {
    assert!(hausdorff_tol > 0.0, "hausdorff_tol must be positive");
    let total = covers.len();
    // Deduplicate identical cell sets first; most samples of one basin
    // produce the very same cover.
    let mut unique: Vec<(Vec<u32>, Vec<usize>)> = Vec::new();
    let mut order: Vec<usize> = (0..total).collect();
    order.sort_by(|&i, &j| {
        covers[i]
            .cells
            .cmp(&covers[j].cells)
            .then(covers[i].x0.total_cmp(&covers[j].x0))
    });
    for idx in order {
        let c = &covers[idx];
        if c.partial || c.cells.is_empty() {
            continue;
        }
        match unique.last_mut() {
            Some((cells, members)) if *cells == c.cells => members.push(idx),
            _ => unique.push((c.cells.clone(), vec![idx])),
        }
    }
    // Single-linkage merge of the unique covers (transitive).
    let resolution = covers.first().map(|c| c.resolution).unwrap_or(1e-3);
    let midpoints: Vec<Vec<f64>> = unique
        .iter()
        .map(|(cells, _)| {
            cells
                .iter()
                .map(|&i| (i as f64 + 0.5) * resolution)
                .collect()
        })
        .collect();
    let n = unique.len();
    let mut cluster_of: Vec<usize> = (0..n).collect();
    fn root(cluster_of: &mut Vec<usize>, mut i: usize) -> usize {
        while cluster_of[i] != i {
            cluster_of[i] = cluster_of[cluster_of[i]];
            i = cluster_of[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if hausdorff(&midpoints[i], &midpoints[j]) <= hausdorff_tol {
                let (ri, rj) = (root(&mut cluster_of, i), root(&mut cluster_of, j));
                if ri != rj {
                    cluster_of[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut group_ids: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = root(&mut cluster_of, i);
        match group_ids[r] {
            Some(g) => groups[g].push(i),
            None => {
                group_ids[r] = Some(groups.len());
                groups.push(vec![i]);
            }
        }
    }
    let mut estimates: Vec<AttractorEstimate> = groups
        .into_iter()
        .map(|uniq_ids| {
            let mut cells: Vec<u32> = Vec::new();
            let mut members: Vec<usize> = Vec::new();
            for &u in &uniq_ids {
                cells.extend_from_slice(&unique[u].0);
                members.extend_from_slice(&unique[u].1);
            }
            cells.sort_unstable();
            cells.dedup();
            members.sort_unstable();
            let member_count = members.len();
            let witness_x0 = covers[members[0]].x0;
            let p = member_count as f64 / total as f64;
            let intervals = intervals_from_cells(&cells, resolution);
            AttractorEstimate {
                id: 0,
                kind: AttractorKind::Undetermined,
                support: Support::Cover {
                    resolution,
                    cells,
                    intervals,
                },
                basin_measure: p,
                confidence_halfwidth: 1.96 * (p * (1.0 - p) / total as f64).sqrt(),
                member_count,
                witness_x0,
                traced_by: Vec::new(),
                periodic: None,
            }
        })
        .collect();
    estimates.sort_by(|a, b| a.support.infimum().total_cmp(&b.support.infimum()));
    for (i, e) in estimates.iter_mut().enumerate() {
        e.id = i;
    }
    estimates
}

/// Evolve a start through the burn-in with plain evaluation.
fn burned(map: &PiecewiseMap, x0: f64, burn_in: usize) -> Option<f64> {
    let mut x = x0;
    for _ in 0..burn_in {
        x = map.eval(x).ok()?;
    }
    Some(x)
}

/// The refined cycle as side-tagged states, starting from the record point.
fn cycle_states(map: &PiecewiseMap, rec: &PeriodicLikeRecord) -> Option<Vec<LateralState>> {
    let mut states = vec![rec.point];
    let mut s = rec.point;
    for _ in 1..rec.period {
        s = lateral_step(map, s).ok()?;
        states.push(s);
    }
    Some(states)
}

/// Try to verify the cluster as a periodic-like cycle: settle the witness,
/// run the detector, and require a non-repelling cycle whose points match
/// the sampled support.
fn verify_periodic(
    map: &PiecewiseMap,
    est: &AttractorEstimate,
    params: &SamplingParams,
) -> Option<(PeriodicLikeRecord, Vec<LateralState>)> {
    let x = burned(map, est.witness_x0, params.burn_in)?;
    let side = if x == 1.0 { Side::Minus } else { Side::Plus };
    let start = LateralState::new(x, side).ok()?;
    let rec = detect_periodic_like(map, start, MAX_TAIL_PERIOD, DETECT_TOL)?;
    if rec.stability == Stability::Repelling {
        return None;
    }
    let states = cycle_states(map, &rec)?;
    let mut coords: Vec<f64> = states.iter().map(|s| s.coord).collect();
    coords.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let support = est.support.representative_coords();
    if hausdorff(&coords, &support) <= params.hausdorff_tol.max(est_resolution(est)) {
        Some((rec, states))
    } else {
        None
    }
}

fn est_resolution(est: &AttractorEstimate) -> f64 {
    match est.support {
        Support::Cover { resolution, .. } => resolution,
        Support::Points { .. } => 0.0,
    }
}

/// Lateral exceptional points whose forward-orbit closure (sampled on the
/// support grid for `params.tail` steps) matches the support set.
fn trace_support(
    map: &PiecewiseMap,
    support_coords: &[f64],
    params: &SamplingParams,
) -> Vec<LateralState> {
    let res = params.resolution;
    let n_cells = (1.0 / res).ceil() as usize;
    let mut traced = Vec::new();
    for &e in &map.exceptional_set {
        for side in [Side::Minus, Side::Plus] {
            let Ok(start) = LateralState::new(e, side) else {
                continue;
            };
            let orbit = lateral_orbit(map, start, params.tail);
            let mut visited = vec![false; n_cells];
            for s in &orbit.states {
                visited[((s.coord / res) as usize).min(n_cells - 1)] = true;
            }
            let closure: Vec<f64> = visited
                .iter()
                .enumerate()
                .filter_map(|(i, &v)| v.then_some((i as f64 + 0.5) * res))
                .collect();
            if !closure.is_empty()
                && hausdorff(&closure, support_coords) <= params.hausdorff_tol
            {
                traced.push(start);
            }
        }
    }
    traced
}

/// How the covered measure behaves as the grid is halved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityTrend {
    /// cell_count × resolution stays within ±10% per halving.
    Stable,
    /// cell_count × resolution drops by ≥ 1.5× per halving.
    Thinning,
    Unclear,
}

/// Classify the sequence of covered measures (one per resolution halving).
pub fn density_trend(measures: &[f64]) -> DensityTrend {
    if measures.len() < 2 || measures.iter().any(|&m| !(m > 0.0)) {
        return DensityTrend::Unclear;
    }
    let stable = measures
        .windows(2)
        .all(|w| (w[1] / w[0] - 1.0).abs() <= STABLE_BAND);
    if stable {
        return DensityTrend::Stable;
    }
    let thinning = measures.windows(2).all(|w| w[0] / w[1] >= THIN_DROP);
    if thinning {
        return DensityTrend::Thinning;
    }
    DensityTrend::Unclear
}

/// Assign a taxonomy verdict to a clustered estimate:
/// 1. a detector-verified, non-repelling cycle matching the support makes it
///    periodic_like (support replaced by the refined cycle);
/// 2. otherwise the covered measure is re-sampled at each resolution in
///    `resolutions`; a stable trend with an exceptional point strictly
///    inside the support makes it cycle_of_intervals, a thinning trend whose
///    support is traced by a lateral critical orbit makes it cantor_like;
/// 3. anything else stays undetermined.
pub fn classify_attractor(
    map: &PiecewiseMap,
    mut est: AttractorEstimate,
    resolutions: &[f64],
    params: &SamplingParams,
) -> AttractorEstimate {
    est.traced_by = trace_support(map, &est.support.representative_coords(), params);
    if let Some((rec, states)) = verify_periodic(map, &est, params) {
        est.kind = AttractorKind::PeriodicLike;
        est.support = Support::Points { points: states };
        est.periodic = Some(rec);
        return est;
    }
    let measures: Vec<f64> = resolutions
        .iter()
        .map(|&r| {
            let cov = omega_estimate(map, est.witness_x0, params.burn_in, params.tail, r);
            cov.cells.len() as f64 * r
        })
        .collect();
    est.kind = match density_trend(&measures) {
        DensityTrend::Stable => {
            let interior = map
                .exceptional_set
                .iter()
                .any(|&e| est.support.contains_interior(e));
            if interior {
                AttractorKind::CycleOfIntervals
            } else {
                AttractorKind::Undetermined
            }
        }
        DensityTrend::Thinning => {
            if est.traced_by.is_empty() {
                AttractorKind::Undetermined
            } else {
                AttractorKind::CantorLike
            }
        }
        DensityTrend::Unclear => AttractorKind::Undetermined,
    };
    est
}

/// Full classification output for one map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub map: String,
    pub attractors: Vec<AttractorEstimate>,
    /// Fraction of samples whose cover joined no cluster (truncated orbits).
    pub unassigned_fraction: f64,
    /// 2^(1+2·#exceptional): the hard cap on simultaneous attractors.
    pub count_bound: u64,
    pub bound_respected: bool,
    pub sampling: SamplingParams,
}

/// The attractor-count cap 2^(1+2·#C_f) for this map.
pub fn attractor_count_bound(map: &PiecewiseMap) -> u64 {
    let n = map.exceptional_set.len() as u32;
    2u64.saturating_pow(1 + 2 * n)
}

/// Run the whole pipeline: sample, cluster, classify, and audit the count
/// bound. Identical (map, params) inputs give byte-identical reports.
pub fn classification_report(map: &PiecewiseMap, params: &SamplingParams) -> ClassificationReport {
    let covers = sample_omega(map, params);
    let clustered = cluster_attractors(&covers, params.hausdorff_tol);
    let attractors: Vec<AttractorEstimate> = clustered
        .into_iter()
        .map(|est| classify_attractor(map, est, &TREND_RESOLUTIONS, params))
        .collect();
    let assigned: usize = attractors.iter().map(|a| a.member_count).sum();
    let unassigned_fraction = (params.samples - assigned) as f64 / params.samples as f64;
    let count_bound = attractor_count_bound(map);
    ClassificationReport {
        map: map.name.clone(),
        bound_respected: attractors.len() as u64 <= count_bound,
        attractors,
        unassigned_fraction,
        count_bound,
        sampling: *params,
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error(
        "a non-repelling cycle obstructs the probe: period {} at {} (multiplier {})",
        record.period,
        record.point,
        record.multiplier
    )]
    PreconditionFailed { record: PeriodicLikeRecord },
}

/// Fraction of sampled points whose tail orbit comes within `tol_dist` of
/// the exceptional set. Errors with `PreconditionFailed` when a lateral
/// exceptional orbit settles onto an attracting or indifferent cycle (the
/// proximity statement only holds without periodic attractors).
pub fn mane_probe(
    map: &PiecewiseMap,
    samples: usize,
    tol_dist: f64,
    params: &SamplingParams,
) -> Result<f64, ClassifyError> {
    for &e in &map.exceptional_set {
        for side in [Side::Minus, Side::Plus] {
            let Ok(start) = LateralState::new(e, side) else {
                continue;
            };
            let orbit = lateral_orbit(map, start, params.burn_in);
            if orbit.truncated.is_some() {
                continue;
            }
            let settled = *orbit.states.last().unwrap();
            if let Some(record) = detect_periodic_like(map, settled, MAX_TAIL_PERIOD, DETECT_TOL) {
                if record.stability != Stability::Repelling {
                    return Err(ClassifyError::PreconditionFailed { record });
                }
            }
        }
    }
    let hits = (0..samples)
        .into_par_iter()
        .filter(|&i| {
            let mut x = sample_start(params.seed, i);
            for _ in 0..params.burn_in {
                match map.eval(x) {
                    Ok(y) => x = y,
                    // An exact exceptional hit is proximity zero.
                    Err(_) => return true,
                }
            }
            for _ in 0..params.tail {
                if map
                    .exceptional_set
                    .iter()
                    .any(|&e| (x - e).abs() <= tol_dist)
                {
                    return true;
                }
                match map.eval(x) {
                    Ok(y) => x = y,
                    Err(_) => return true,
                }
            }
            false
        })
        .count();
    Ok(hits as f64 / samples as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::{make_logistic, make_lorenz, LorenzParams};

    fn lorenz_interval_map() -> PiecewiseMap {
        make_lorenz(LorenzParams {
            c: 0.5,
            rho_l: 2.0,
            rho_r: 2.0,
            u: 0.9,
            v: 0.1,
        })
        .unwrap()
    }

    fn quick(seed: u64, samples: usize, burn_in: usize, tail: usize) -> SamplingParams {
        SamplingParams {
            samples,
            burn_in,
            tail,
            ..SamplingParams::with_seed(seed)
        }
    }

    #[test]
    fn sample_omega_fixed_point_gives_identical_single_cell_covers() {
        let f = make_logistic(2.5).unwrap();
        let params = quick(11, 100, 10_000, 20_000);
        let covers = sample_omega(&f, &params);
        assert_eq!(covers.len(), 100);
        // Orbits settle on the float fixed point 0.6 exactly: one cell.
        for c in &covers {
            assert_eq!(c.cells, vec![600], "cover of {} differs", c.x0);
            assert_eq!(c.periodic, Some(1));
            assert!(!c.partial);
        }
    }

    #[test]
    fn sample_omega_chaotic_covers_the_whole_interval() {
        let f = make_logistic(4.0).unwrap();
        let params = SamplingParams {
            samples: 50,
            burn_in: 1_000,
            tail: 100_000,
            resolution: 1e-2,
            ..SamplingParams::with_seed(12)
        };
        let covers = sample_omega(&f, &params);
        let full = covers.iter().filter(|c| c.cells.len() == 100).count();
        assert!(full >= 48, "only {full}/50 covers were complete");
    }

    #[test]
    fn sample_omega_single_sample() {
        let f = make_logistic(2.5).unwrap();
        let covers = sample_omega(&f, &quick(1, 1, 100, 100));
        assert_eq!(covers.len(), 1);
    }

    fn fabricated_cover(x0: f64, cells: Vec<u32>) -> OmegaCover {
        OmegaCover {
            x0,
            resolution: 1e-3,
            cells,
            periodic: None,
            partial: false,
            steps: 0,
        }
    }

    #[test]
    fn cluster_identical_covers_is_one_full_basin() {
        let covers: Vec<OmegaCover> = (0..100)
            .map(|i| fabricated_cover(i as f64 / 100.0, vec![600]))
            .collect();
        let ests = cluster_attractors(&covers, 1e-3);
        assert_eq!(ests.len(), 1);
        assert_eq!(ests[0].basin_measure, 1.0);
        assert_eq!(ests[0].member_count, 100);
        assert_eq!(ests[0].confidence_halfwidth, 0.0);
    }

    #[test]
    fn cluster_disjoint_covers_split_by_frequency() {
        let mut covers = Vec::new();
        for i in 0..60 {
            covers.push(fabricated_cover(0.001 * i as f64, vec![600]));
        }
        for i in 0..40 {
            covers.push(fabricated_cover(0.7 + 0.001 * i as f64, vec![513, 799]));
        }
        let ests = cluster_attractors(&covers, 1e-3);
        assert_eq!(ests.len(), 2);
        // Sorted by support infimum: the 2-cell cluster starts lower.
        assert_eq!(ests[0].id, 0);
        assert_eq!(ests[0].basin_measure, 0.4);
        assert_eq!(ests[1].basin_measure, 0.6);
        let inf0 = ests[0].support.infimum();
        let inf1 = ests[1].support.infimum();
        assert!(inf0 < inf1);
        assert!((inf0 - 0.5135).abs() < 1e-12);
    }

    #[test]
    fn cluster_period_two_run_is_a_single_basin() {
        let f = make_logistic(3.2).unwrap();
        let params = quick(13, 100, 10_000, 20_000);
        let covers = sample_omega(&f, &params);
        let ests = cluster_attractors(&covers, params.hausdorff_tol);
        assert_eq!(ests.len(), 1);
        assert_eq!(ests[0].basin_measure, 1.0);
    }

    #[test]
    fn density_trend_regimes() {
        assert_eq!(density_trend(&[0.60, 0.59, 0.58]), DensityTrend::Stable);
        assert_eq!(density_trend(&[0.4, 0.25, 0.15]), DensityTrend::Thinning);
        assert_eq!(density_trend(&[0.4, 0.3, 0.25]), DensityTrend::Unclear);
        assert_eq!(density_trend(&[0.4]), DensityTrend::Unclear);
        assert_eq!(density_trend(&[0.4, 0.0]), DensityTrend::Unclear);
    }

    #[test]
    fn report_fixed_point_is_one_periodic_like_attractor() {
        let f = make_logistic(2.5).unwrap();
        let params = quick(21, 100, 10_000, 20_000);
        let report = classification_report(&f, &params);
        assert_eq!(report.attractors.len(), 1);
        assert_eq!(report.count_bound, 8);
        assert!(report.bound_respected);
        let a = &report.attractors[0];
        assert_eq!(a.kind, AttractorKind::PeriodicLike);
        assert_eq!(a.basin_measure, 1.0);
        assert_eq!(report.unassigned_fraction, 0.0);
        let rec = a.periodic.as_ref().unwrap();
        // The fixed point 0.6 reverses orientation (f'(0.6) = −0.5), so the
        // side-tagged cycle alternates sides: lateral period 2, multiplier
        // |f'(0.6)|² = 0.25.
        assert_eq!(rec.period, 2);
        assert!((rec.multiplier - 0.25).abs() < 1e-9);
        match &a.support {
            Support::Points { points } => {
                assert_eq!(points.len(), 2);
                assert!(points.iter().all(|p| (p.coord - 0.6).abs() < 1e-9));
                assert_ne!(points[0].side, points[1].side);
            }
            other => panic!("unexpected support {other:?}"),
        }
    }

    #[test]
    fn report_period_two_refines_the_closed_form_cycle() {
        let f = make_logistic(3.2).unwrap();
        let params = quick(22, 100, 10_000, 20_000);
        let report = classification_report(&f, &params);
        assert_eq!(report.attractors.len(), 1);
        let a = &report.attractors[0];
        assert_eq!(a.kind, AttractorKind::PeriodicLike);
        let rec = a.periodic.as_ref().unwrap();
        assert_eq!(rec.period, 2);
        // Closed form: multiplier |f'(x1)f'(x2)| = |4 + 2λ − λ²| = 0.16.
        assert!((rec.multiplier - 0.16).abs() < 1e-6);
        let coords = a.support.representative_coords();
        let s = ((3.2f64 + 1.0) * (3.2 - 3.0)).sqrt();
        let x1 = (3.2 + 1.0 - s) / 6.4;
        let x2 = (3.2 + 1.0 + s) / 6.4;
        assert_eq!(coords.len(), 2);
        assert!((coords[0] - x1).abs() < 1e-5);
        assert!((coords[1] - x2).abs() < 1e-5);
    }

    #[test]
    fn report_chaotic_logistic_is_a_full_interval_cycle() {
        let f = make_logistic(4.0).unwrap();
        let params = quick(23, 60, 1_000, 100_000);
        let report = classification_report(&f, &params);
        assert_eq!(report.attractors.len(), 1);
        assert!(report.bound_respected);
        let a = &report.attractors[0];
        assert_eq!(a.kind, AttractorKind::CycleOfIntervals);
        match &a.support {
            Support::Cover { intervals, .. } => {
                assert_eq!(intervals.len(), 1);
                assert!(intervals[0].0 <= 1e-3 && intervals[0].1 >= 1.0 - 1e-3);
            }
            other => panic!("unexpected support {other:?}"),
        }
        assert!(a.support.contains_interior(0.5));
    }

    #[test]
    fn report_lorenz_finds_traced_interval_cycle() {
        let f = lorenz_interval_map();
        let params = quick(24, 60, 10_000, 100_000);
        let report = classification_report(&f, &params);
        assert_eq!(report.attractors.len(), 1);
        let a = &report.attractors[0];
        assert_eq!(a.kind, AttractorKind::CycleOfIntervals);
        match &a.support {
            Support::Cover { intervals, .. } => {
                assert_eq!(intervals.len(), 3, "intervals: {intervals:?}");
            }
            other => panic!("unexpected support {other:?}"),
        }
        assert!(a.support.contains_interior(0.5));
        // Both lateral critical orbits trace the attractor.
        assert_eq!(a.traced_by.len(), 2);
        assert!(a.traced_by.iter().all(|s| s.coord == 0.5));
        let support = a.support.representative_coords();
        for s in &a.traced_by {
            let orbit = lateral_orbit(&f, *s, params.tail);
            let mut cl: Vec<f64> = orbit.states.iter().map(|st| st.coord).collect();
            cl.sort_by(|p, q| p.partial_cmp(q).unwrap());
            cl.dedup();
            assert!(hausdorff(&cl, &support) <= params.hausdorff_tol);
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let f = make_logistic(3.2).unwrap();
        let params = quick(31, 50, 5_000, 10_000);
        let a = serde_json::to_string(&classification_report(&f, &params)).unwrap();
        let b = serde_json::to_string(&classification_report(&f, &params)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn basin_counting_identity_is_exact() {
        let f = lorenz_interval_map();
        let params = quick(32, 40, 5_000, 20_000);
        let report = classification_report(&f, &params);
        let assigned: usize = report.attractors.iter().map(|a| a.member_count).sum();
        let unassigned = (report.unassigned_fraction * params.samples as f64).round() as usize;
        assert_eq!(assigned + unassigned, params.samples);
    }

    #[test]
    fn mane_probe_chaotic_orbits_visit_the_critical_point() {
        let f = make_logistic(4.0).unwrap();
        let params = quick(33, 200, 1_000, 100_000);
        let fraction = mane_probe(&f, 200, 1e-3, &params).unwrap();
        assert!(fraction >= 0.95, "fraction = {fraction}");
    }

    #[test]
    fn mane_probe_rejects_attracting_fixed_point() {
        let f = make_logistic(2.5).unwrap();
        let params = quick(34, 50, 5_000, 10_000);
        match mane_probe(&f, 50, 1e-3, &params) {
            Err(ClassifyError::PreconditionFailed { record }) => {
                assert_eq!(record.stability, Stability::Attracting);
                assert!((record.point.coord - 0.6).abs() < 1e-9);
            }
            other => panic!("expected precondition failure, got {other:?}"),
        }
    }

    #[test]
    fn mane_probe_lorenz_non_periodic_parameters() {
        let f = lorenz_interval_map();
        let params = quick(35, 100, 5_000, 100_000);
        let fraction = mane_probe(&f, 100, 1e-3, &params).unwrap();
        assert!(fraction >= 0.95, "fraction = {fraction}");
    }
}
