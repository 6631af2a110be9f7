//! Built-in parametrized families, each emitting a validated `PiecewiseMap`:
//! the logistic family, contracting Lorenz maps with power-law branches, the
//! gap maps they induce around the discontinuity, and a three-branch
//! construction whose gap dynamics targets a rotation number far from
//! low-denominator rationals.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::branch::{BranchForm, BranchSpec, Orientation, PivotSide};
use crate::lateral::rotation_number;
use crate::map::{PiecewiseMap, Provenance, Side};
use crate::numerics::solve_monotone;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZooError {
    #[error("bad parameter: {0}")]
    BadParam(String),
    #[error("not a gap map{}: {reason}", j.map(|(a, b)| format!(" (J = [{a}, {b}])")).unwrap_or_default())]
    NotAGapMap { j: Option<(f64, f64)>, reason: String },
    #[error("parameter search exhausted after {tried} candidates")]
    SearchExhausted { tried: usize },
}

/// The logistic map λx(1−x), split at its critical point 1/2 so that each
/// branch is monotone. Requires 0 < λ ≤ 4 (so the interval maps into itself).
pub fn make_logistic(lambda: f64) -> Result<PiecewiseMap, ZooError> {
    if !lambda.is_finite() || lambda <= 0.0 || lambda > 4.0 {
        return Err(ZooError::BadParam(format!(
            "logistic family requires 0 < lambda <= 4, got {lambda}"
        )));
    }
    let poly = BranchForm::Polynomial {
        coeffs: vec![0.0, lambda, -lambda],
    };
    let map = PiecewiseMap::new(
        format!("logistic(lambda={lambda})"),
        vec![
            BranchSpec {
                lo: 0.0,
                hi: 0.5,
                orientation: Orientation::Increasing,
                form: poly.clone(),
            },
            BranchSpec {
                lo: 0.5,
                hi: 1.0,
                orientation: Orientation::Decreasing,
                form: poly,
            },
        ],
        Some(Provenance::Zoo {
            family: "logistic".into(),
            params: vec![("lambda".into(), lambda)],
        }),
    )
    .map_err(|e| ZooError::BadParam(e.to_string()))?;
    Ok(map)
}

/// Parameters of the contracting-Lorenz family: discontinuity c, branch
/// exponents ρ_L, ρ_R > 1, and lateral limits u = f(c−), v = f(c+).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorenzParams {
    pub c: f64,
    pub rho_l: f64,
    pub rho_r: f64,
    pub u: f64,
    pub v: f64,
}

impl LorenzParams {
    pub fn as_pairs(&self) -> Vec<(String, f64)> {
        vec![
            ("c".into(), self.c),
            ("rho_l".into(), self.rho_l),
            ("rho_r".into(), self.rho_r),
            ("u".into(), self.u),
            ("v".into(), self.v),
        ]
    }
}

/// Contracting Lorenz map: left branch u − (u/c^ρL)(c−x)^ρL fixing 0 with
/// left limit u at c; right branch v + ((1−v)/(1−c)^ρR)(x−c)^ρR fixing 1
/// with right limit v at c. Both branches increase; ρ > 1 makes the
/// Schwarzian derivative (1−ρ²)/(2(x−pivot)²) negative on each branch.
pub fn make_lorenz(p: LorenzParams) -> Result<PiecewiseMap, ZooError> {
    let LorenzParams { c, rho_l, rho_r, u, v } = p;
    let bad = |msg: String| Err(ZooError::BadParam(msg));
    if ![c, rho_l, rho_r, u, v].iter().all(|x| x.is_finite()) {
        return bad("non-finite parameter".into());
    }
    if !(0.0 < c && c < 1.0) {
        return bad(format!("requires 0 < c < 1, got c = {c}"));
    }
    if rho_l <= 1.0 || rho_r <= 1.0 {
        return bad(format!(
            "requires branch exponents > 1, got ({rho_l}, {rho_r})"
        ));
    }
    if !(0.0 < v && v < c && c < u && u < 1.0) {
        return bad(format!("requires 0 < v < c < u < 1, got v = {v}, u = {u}"));
    }
    let left = BranchForm::PowerLaw {
        v: u,
        k: -u / c.powf(rho_l),
        rho: rho_l,
        pivot: c,
        side: PivotSide::Left,
    };
    let right = BranchForm::PowerLaw {
        v,
        k: (1.0 - v) / (1.0 - c).powf(rho_r),
        rho: rho_r,
        pivot: c,
        side: PivotSide::Right,
    };
    let map = PiecewiseMap::new(
        format!("lorenz(c={c},rho=({rho_l},{rho_r}),u={u},v={v})"),
        vec![
            BranchSpec {
                lo: 0.0,
                hi: c,
                orientation: Orientation::Increasing,
                form: left,
            },
            BranchSpec {
                lo: c,
                hi: 1.0,
                orientation: Orientation::Increasing,
                form: right,
            },
        ],
        Some(Provenance::Zoo {
            family: "lorenz".into(),
            params: p.as_pairs(),
        }),
    )
    .map_err(|e| ZooError::BadParam(e.to_string()))?;
    Ok(map)
}

/// Scan (0,1) for fixed points with |f'| > 1. The contracting-Lorenz class
/// forbids these; the scan flags out-of-family inputs (construction is not
/// blocked — callers decide). Endpoint fixed points 0 and 1 are ignored.
pub fn repelling_interior_fixed_points(map: &PiecewiseMap, grid_per_branch: usize) -> Vec<f64> {
    let n = grid_per_branch.max(2);
    let mut found: Vec<f64> = Vec::new();
    for b in &map.branches {
        let g = |x: f64| b.eval(x) - x;
        let width = b.hi - b.lo;
        let mut prev = b.lo + width * (0.5 / n as f64);
        for i in 1..n {
            let next = b.lo + width * ((i as f64 + 0.5) / n as f64);
            if let Some(root) = solve_monotone(g, prev, next) {
                let interior = root > 1e-9 && root < 1.0 - 1e-9;
                if interior && b.derivative(root, 1).abs() > 1.0 + 1e-9 {
                    let fresh = found.iter().all(|&r| (r - root).abs() > 1e-9);
                    if fresh {
                        found.push(root);
                    }
                }
            }
            prev = next;
        }
    }
    found.sort_by(|a, b| a.partial_cmp(b).unwrap());
    found
}

/// The gap map induced by a single-discontinuity map around c: the
/// restriction to J = [v0, v1] (v0 = f(c+), v1 = f(c−)) when that
/// restriction is injective but not surjective. The source map is kept
/// whole; the interval records where the gap dynamics lives.
#[derive(Debug, Clone)]
pub struct GapMap {
    pub map: PiecewiseMap,
    /// J = [v0, v1], the closure of the lateral images of c.
    pub j: (f64, f64),
    pub c: f64,
    /// |J| − Leb(f(J∖{c})) > 0: the length of the uncovered gap.
    pub gap: f64,
}

/// Check the gap conditions on a single-discontinuity increasing map and
/// package the restriction interval. Fails when the map is not
/// Lorenz-shaped or when the branch images of J overlap (no gap).
pub fn extract_gap_map(map: &PiecewiseMap) -> Result<GapMap, ZooError> {
    let fail = |j, reason: String| Err(ZooError::NotAGapMap { j, reason });
    if map.exceptional_set.len() != 1 {
        return fail(
            None,
            format!(
                "expected exactly one exceptional point, found {}",
                map.exceptional_set.len()
            ),
        );
    }
    let c = map.exceptional_set[0];
    for side in [Side::Minus, Side::Plus] {
        match map.one_sided_derivative_sign(c, side) {
            Ok(Some(1)) => {}
            _ => return fail(None, format!("branch on side {side:?} of {c} is not increasing")),
        }
    }
    const FIX_TOL: f64 = 1e-9;
    let f0 = map.one_sided_value(0.0, Side::Plus).map_err(|e| ZooError::NotAGapMap {
        j: None,
        reason: e.to_string(),
    })?;
    let f1 = map.one_sided_value(1.0, Side::Minus).map_err(|e| ZooError::NotAGapMap {
        j: None,
        reason: e.to_string(),
    })?;
    if f0.abs() > FIX_TOL || (f1 - 1.0).abs() > FIX_TOL {
        return fail(None, format!("0 and 1 are not fixed: f(0) = {f0}, f(1) = {f1}"));
    }
    let v0 = map.one_sided_value(c, Side::Plus).unwrap();
    let v1 = map.one_sided_value(c, Side::Minus).unwrap();
    if !(v0 < c && c < v1) {
        return fail(
            None,
            format!("lateral images do not straddle c = {c}: v0 = {v0}, v1 = {v1}"),
        );
    }
    let j = (v0, v1);
    // Branch images of J∖{c}: (f(v0), v1) on the left of c, (v0, f(v1)) on
    // the right. They overlap (and the restriction fails to be injective
    // with a gap) unless f(v1) < f(v0).
    let f_v0 = map.one_sided_value(v0, Side::Plus).unwrap();
    let f_v1 = map.one_sided_value(v1, Side::Minus).unwrap();
    let gap = f_v0 - f_v1;
    if gap <= 1e-12 {
        return fail(
            Some(j),
            format!(
                "branch images of J cover it (f(v0) = {f_v0} <= f(v1) = {f_v1}): no gap"
            ),
        );
    }
    Ok(GapMap {
        map: map.clone(),
        j,
        c,
        gap,
    })
}

/// Iterates used to estimate rotation numbers during parameter search.
const EWI_ROT_STEPS: usize = 40_000;
/// Grid step for the search over v.
const EWI_SEARCH_STEP: f64 = 0.0025;
/// Rational-exclusion threshold: accepted rotation estimates stay at least
/// this far from every p/q with q ≤ EWI_MAX_DEN.
pub const RATIONAL_EXCLUSION: f64 = 1e-3;
pub const EWI_MAX_DEN: u32 = 20;

/// Distance from x to the nearest p/q with 1 ≤ q ≤ max_den, 0 ≤ p ≤ q.
pub fn distance_to_rationals(x: f64, max_den: u32) -> f64 {
    let mut best = f64::INFINITY;
    for q in 1..=max_den {
        let p = (x * q as f64).round();
        let d = (x - p / q as f64).abs();
        if d < best {
            best = d;
        }
    }
    best
}

/// Result of the three-branch construction: the map F equal to f above a and
/// to f/f(a) below it, with C_F = {a, c}, plus the search outcome.
#[derive(Debug, Clone)]
pub struct EwiMap {
    pub map: PiecewiseMap,
    /// The extra exceptional point: the unique a < v0 with f(a) = f(v1).
    pub a: f64,
    /// Rotation-number estimate of the gap dynamics of F around c.
    pub rotation_estimate: f64,
    /// The accepted Lorenz parameters (v possibly adjusted by the search).
    pub params: LorenzParams,
}

/// Build a three-branch map F from a contracting Lorenz map f whose gap
/// dynamics has a rotation number far from low-denominator rationals:
/// F = f/f(a) on (0, a) and F = f elsewhere, where f(a) = f(v1). Since
/// irrationality has no finite certificate, the search over v (alternating
/// steps around the given value, first qualifying candidate wins; with a
/// target, the closest qualifying estimate wins) only excludes rationals
/// p/q with q ≤ 20 by margin ≥ 1e−3. The output is a candidate, not a
/// certified example.
pub fn construct_ewi(
    base: LorenzParams,
    rotation_target: Option<f64>,
    search_budget: usize,
) -> Result<EwiMap, ZooError> {
    let mut tried = 0usize;
    let mut best: Option<(f64, LorenzParams, GapMap, f64)> = None; // (score, params, gap, rho)
    for k in 0..search_budget {
        let half = k.div_ceil(2) as f64;
        let offset = if k % 2 == 1 { half } else { -half } * EWI_SEARCH_STEP;
        let v = base.v + offset;
        if !(1e-3 < v && v < base.c - 1e-3) {
            continue;
        }
        let cand = LorenzParams { v, ..base };
        tried += 1;
        let Ok(map) = make_lorenz(cand) else { continue };
        let Ok(gm) = extract_gap_map(&map) else { continue };
        let Ok(rho) = rotation_number(&gm.map, gm.c, EWI_ROT_STEPS) else {
            continue;
        };
        if distance_to_rationals(rho, EWI_MAX_DEN) < RATIONAL_EXCLUSION {
            continue;
        }
        match rotation_target {
            None => {
                best = Some((0.0, cand, gm, rho));
                break;
            }
            Some(t) => {
                let score = (rho - t).abs();
                if best.as_ref().is_none_or(|(s, ..)| score < *s) {
                    best = Some((score, cand, gm, rho));
                }
            }
        }
    }
    let Some((_, params, gm, _)) = best else {
        return Err(ZooError::SearchExhausted { tried });
    };

    let f = &gm.map;
    let (v0, v1) = gm.j;
    let c = gm.c;
    let left_form = f.branches[0].form.clone();
    let right_form = f.branches[1].form.clone();
    let f_v1 = f.one_sided_value(v1, Side::Minus).unwrap();
    // Unique a in (0, v0) with f(a) = f(v1): the left branch is increasing
    // with f(0) = 0 < f(v1) < f(v0).
    let a = solve_monotone(|x| left_form.eval(x) - f_v1, 0.0, v0).ok_or_else(|| {
        ZooError::NotAGapMap {
            j: Some(gm.j),
            reason: "no a in (0, v0) with f(a) = f(v1)".into(),
        }
    })?;
    let fa = left_form.eval(a);
    let scaled = BranchForm::Scaled {
        inner: Box::new(left_form.clone()),
        scale: 1.0 / fa,
        offset: 0.0,
        anchor: 0.0,
    };
    let mut pairs = params.as_pairs();
    pairs.push(("a".into(), a));
    let map = PiecewiseMap::new(
        format!("ewi(c={c},a={a:.12})"),
        vec![
            BranchSpec {
                lo: 0.0,
                hi: a,
                orientation: Orientation::Increasing,
                form: scaled,
            },
            BranchSpec {
                lo: a,
                hi: c,
                orientation: Orientation::Increasing,
                form: left_form,
            },
            BranchSpec {
                lo: c,
                hi: 1.0,
                orientation: Orientation::Increasing,
                form: right_form,
            },
        ],
        None,
    )
    .map_err(|e| ZooError::BadParam(e.to_string()))?;
    // The gap dynamics of F around c is untouched by the extra branch
    // (a < v0), so estimate the rotation number on F itself.
    let rotation_estimate = rotation_number(&map, c, EWI_ROT_STEPS).map_err(|e| {
        ZooError::NotAGapMap {
            j: Some(gm.j),
            reason: e.to_string(),
        }
    })?;
    pairs.push(("rotation_estimate".into(), rotation_estimate));
    let map = PiecewiseMap {
        provenance: Some(Provenance::Zoo {
            family: "ewi".into(),
            params: pairs,
        }),
        ..map
    };
    Ok(EwiMap {
        map,
        a,
        rotation_estimate,
        params,
    })
}
