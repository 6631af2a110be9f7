//! Map surgeries: affine rescalings applied on a subinterval, leaving the
//! map bit-identical elsewhere.
//!
//! Each constructor splits the source branch tiling at the modified
//! interval's endpoints, wraps the inside pieces in a [`BranchForm::Scaled`]
//! layer, and copies every outside piece with its original form. Orbits that
//! never enter the modified interval therefore evaluate through the very
//! same arithmetic and reproduce the source orbit bit for bit.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::branch::{BranchForm, BranchSpec, SupMethod};
use crate::map::{EvalError, PiecewiseMap, Provenance, Side};
use crate::numerics::solve_monotone;

/// Rescale denominators smaller than this are rejected as degenerate.
pub const DEGENERATE_TOL: f64 = 1e-12;

/// Steps allowed for a claimed periodic point to return to itself.
const PERIOD_HORIZON: usize = 4096;

/// Distance at which the orbit is considered to have returned to its start.
const PERIOD_TOL: f64 = 1e-9;

/// Which local modification produced a derived map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurgeryKind {
    /// Contract the map toward an interior target on an interval.
    Pit,
    /// Stretch a unimodal peak so its supremum reaches 1.
    FlattenUnimodal,
    /// Stretch the two sides of a Lorenz discontinuity onto (f(a),1) and
    /// (0,f(b)).
    LorenzRescale,
}

impl SurgeryKind {
    pub fn op_name(self) -> &'static str {
        match self {
            SurgeryKind::Pit => "pit",
            SurgeryKind::FlattenUnimodal => "flatten_unimodal",
            SurgeryKind::LorenzRescale => "lorenz_rescale",
        }
    }
}

/// A derived map together with how it was obtained.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurgeryRecord {
    pub kind: SurgeryKind,
    /// Name of the map the surgery was applied to.
    pub source: String,
    /// Open interval on which the map was altered.
    pub modified_interval: (f64, f64),
    /// The affine factors used (σ for pit, λ for flatten, λ_a and λ_b for
    /// the Lorenz rescale).
    pub scale_factors: Vec<f64>,
    /// How the derivative supremum behind a pit factor was obtained.
    pub sup_method: Option<SupMethod>,
    pub result: PiecewiseMap,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurgeryError {
    #[error("derivative supremum unavailable or infinite; cannot size the contraction factor")]
    UnboundedDerivative,
    #[error("rescale denominator {denom:e} is below {DEGENERATE_TOL:e}")]
    DegenerateScale { denom: f64 },
    #[error("invalid surgery parameter: {0}")]
    BadParam(String),
    #[error("derived map construction failed: {0}")]
    Build(String),
}

impl From<EvalError> for SurgeryError {
    fn from(e: EvalError) -> Self {
        SurgeryError::BadParam(format!("evaluation failed: {e}"))
    }
}

/// One rescaled zone: wrap branch pieces inside `(lo, hi)` as
/// `offset + scale·(f − anchor)`.
struct Zone {
    lo: f64,
    hi: f64,
    scale: f64,
    offset: f64,
    anchor: f64,
}

impl Zone {
    fn wrap(&self, form: &BranchForm) -> BranchForm {
        BranchForm::Scaled {
            inner: Box::new(form.clone()),
            scale: self.scale,
            offset: self.offset,
            anchor: self.anchor,
        }
    }
}

/// Rebuild the branch list with every piece inside a zone wrapped and every
/// piece outside copied verbatim. Zones must be disjoint and ordered; their
/// endpoints become branch boundaries (hence exceptional points) wherever
/// they fall strictly inside an existing branch.
fn rebuild(map: &PiecewiseMap, zones: &[Zone]) -> Vec<BranchSpec> {
    let mut out = Vec::with_capacity(map.branches.len() + 2 * zones.len());
    for b in &map.branches {
        let mut cuts = vec![b.lo];
        for z in zones {
            for e in [z.lo, z.hi] {
                if b.lo < e && e < b.hi {
                    cuts.push(e);
                }
            }
        }
        cuts.push(b.hi);
        cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        cuts.dedup();
        for w in cuts.windows(2) {
            let (plo, phi) = (w[0], w[1]);
            let zone = zones.iter().find(|z| z.lo <= plo && phi <= z.hi);
            let form = match zone {
                Some(z) => {
                    debug_assert!(z.scale > 0.0, "surgeries use positive factors");
                    z.wrap(&b.form)
                }
                None => b.form.clone(),
            };
            out.push(BranchSpec {
                lo: plo,
                hi: phi,
                orientation: b.orientation,
                form,
            });
        }
    }
    out
}

fn finish(
    map: &PiecewiseMap,
    kind: SurgeryKind,
    interval: (f64, f64),
    factors: Vec<f64>,
    sup_method: Option<SupMethod>,
    zones: &[Zone],
) -> Result<SurgeryRecord, SurgeryError> {
    let branches = rebuild(map, zones);
    let provenance = Provenance::Surgery {
        op: kind.op_name().into(),
        source: map.name.clone(),
        interval,
        factors: factors.clone(),
    };
    let name = format!("{}+{}", map.name, kind.op_name());
    let result = PiecewiseMap::new(name, branches, Some(provenance))
        .map_err(|e| SurgeryError::Build(e.to_string()))?;
    Ok(SurgeryRecord {
        kind,
        source: map.name.clone(),
        modified_interval: interval,
        scale_factors: factors,
        sup_method,
        result,
    })
}

/// Replace f by `g = q + σ(f − q)` on `interval`, with
/// `σ = (2·sup|f′|)⁻¹` taken over the whole domain, so `|g′| ≤ 1/2` there.
/// Outside the interval the map is untouched. When `g` maps the interval
/// into itself, the contraction gives it a unique attracting fixed point
/// inside.
pub fn pit_surgery(
    map: &PiecewiseMap,
    interval: (f64, f64),
    q: f64,
) -> Result<SurgeryRecord, SurgeryError> {
    let (lo, hi) = interval;
    if !(0.0 < lo && lo < hi && hi < 1.0) {
        return Err(SurgeryError::BadParam(format!(
            "interval ({lo}, {hi}) must satisfy 0 < lo < hi < 1"
        )));
    }
    if !(lo < q && q < hi) {
        return Err(SurgeryError::BadParam(format!(
            "target {q} must lie inside ({lo}, {hi})"
        )));
    }
    let sup = map
        .sup_abs_derivative()
        .ok_or(SurgeryError::UnboundedDerivative)?;
    if !sup.value.is_finite() {
        return Err(SurgeryError::UnboundedDerivative);
    }
    let denom = 2.0 * sup.value;
    if denom < DEGENERATE_TOL {
        return Err(SurgeryError::DegenerateScale { denom });
    }
    let sigma = 1.0 / denom;
    let zones = [Zone {
        lo,
        hi,
        scale: sigma,
        offset: q,
        anchor: q,
    }];
    finish(
        map,
        SurgeryKind::Pit,
        interval,
        vec![sigma],
        Some(sup.method),
        &zones,
    )
}

/// Forward orbit of `p` until it returns within [`PERIOD_TOL`] of itself.
/// Returns the points of one period, starting at `p`.
fn periodic_orbit(map: &PiecewiseMap, p: f64) -> Result<Vec<f64>, SurgeryError> {
    let mut points = vec![p];
    let mut x = p;
    for _ in 0..PERIOD_HORIZON {
        x = map.eval(x)?;
        if (x - p).abs() <= PERIOD_TOL {
            return Ok(points);
        }
        points.push(x);
    }
    Err(SurgeryError::BadParam(format!(
        "point {p} did not return to itself within {PERIOD_HORIZON} steps"
    )))
}

/// Replace f by `g = f(p) + λ(f − f(p))` on `J = f⁻¹((p̂, 1])`, where `p` is
/// a periodic point, `p̂` the largest point on its orbit, and
/// `λ = (1 − f(p))/(f(c) − f(p))`, so that the peak of `g` over `J` reaches
/// exactly 1. Requires a unimodal map: one increasing branch, then one
/// decreasing branch, meeting at the turning point `c`.
pub fn flatten_unimodal(map: &PiecewiseMap, p: f64) -> Result<SurgeryRecord, SurgeryError> {
    use crate::branch::Orientation;
    let two_branch = map.branches.len() == 2
        && map.branches[0].orientation == Orientation::Increasing
        && map.branches[1].orientation == Orientation::Decreasing;
    if !two_branch {
        return Err(SurgeryError::BadParam(
            "flatten expects a unimodal map: an increasing branch then a decreasing one".into(),
        ));
    }
    let c = map.exceptional_set[0];
    let orbit = periodic_orbit(map, p)?;
    let p_hat = orbit.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let fp = map.eval(p)?;
    let fc = map.one_sided_value(c, Side::Minus)?;
    let denom = fc - fp;
    if denom < DEGENERATE_TOL {
        return Err(SurgeryError::DegenerateScale { denom });
    }
    if !(p_hat < fc) {
        return Err(SurgeryError::BadParam(format!(
            "orbit maximum {p_hat} reaches the peak value {fc}; nothing to stretch"
        )));
    }
    let lambda = (1.0 - fp) / denom;
    let up = &map.branches[0];
    let down = &map.branches[1];
    let j_lo = solve_monotone(|x| up.eval(x) - p_hat, up.lo, up.hi).ok_or_else(|| {
        SurgeryError::BadParam(format!(
            "orbit maximum {p_hat} is not attained on the increasing branch"
        ))
    })?;
    let j_hi = solve_monotone(|x| down.eval(x) - p_hat, down.lo, down.hi).ok_or_else(|| {
        SurgeryError::BadParam(format!(
            "orbit maximum {p_hat} is not attained on the decreasing branch"
        ))
    })?;
    if !(j_lo < c && c < j_hi) {
        return Err(SurgeryError::BadParam(format!(
            "computed interval ({j_lo}, {j_hi}) does not surround the turning point {c}"
        )));
    }
    let zones = [Zone {
        lo: j_lo,
        hi: j_hi,
        scale: lambda,
        offset: fp,
        anchor: fp,
    }];
    finish(
        map,
        SurgeryKind::FlattenUnimodal,
        (j_lo, j_hi),
        vec![lambda],
        None,
        &zones,
    )
}

/// Rescale the two sides of the discontinuity `c` of a Lorenz-like map so
/// the left half maps `(a, c)` onto `(f(a), 1)` and the right half maps
/// `(c, b)` onto `(0, f(b))`:
/// `g = f(a) + λ_a(f − f(a))` on `(a, c)` with `λ_a = (1 − f(a))/(f(c⁻) − f(a))`,
/// `g = f(b) + λ_b(f − f(b))` on `(c, b)` with `λ_b = f(b)/(f(b) − f(c⁺))`.
/// Both rescales anchor the outer endpoint, so `g(a⁺) = f(a)` and
/// `g(b⁻) = f(b)` and the map stays continuous there.
pub fn lorenz_rescale(
    map: &PiecewiseMap,
    a: f64,
    b: f64,
    c: f64,
) -> Result<SurgeryRecord, SurgeryError> {
    if !map.is_exceptional(c) {
        return Err(SurgeryError::BadParam(format!(
            "{c} is not an exceptional point of {}",
            map.name
        )));
    }
    if !(0.0 <= a && a < c && c < b && b <= 1.0) {
        return Err(SurgeryError::BadParam(format!(
            "need 0 ≤ a < c < b ≤ 1, got a = {a}, c = {c}, b = {b}"
        )));
    }
    let fa = map.one_sided_value(a, Side::Plus)?;
    let fb = map.one_sided_value(b, Side::Minus)?;
    let u = map.one_sided_value(c, Side::Minus)?;
    let v = map.one_sided_value(c, Side::Plus)?;
    let denom_a = u - fa;
    if denom_a < DEGENERATE_TOL {
        return Err(SurgeryError::DegenerateScale { denom: denom_a });
    }
    let denom_b = fb - v;
    if denom_b < DEGENERATE_TOL {
        return Err(SurgeryError::DegenerateScale { denom: denom_b });
    }
    let lambda_a = (1.0 - fa) / denom_a;
    let lambda_b = fb / denom_b;
    let zones = [
        Zone {
            lo: a,
            hi: c,
            scale: lambda_a,
            offset: fa,
            anchor: fa,
        },
        Zone {
            lo: c,
            hi: b,
            scale: lambda_b,
            offset: fb,
            anchor: fb,
        },
    ];
    finish(
        map,
        SurgeryKind::LorenzRescale,
        (a, b),
        vec![lambda_a, lambda_b],
        None,
        &zones,
    )
}
