//! Piecewise maps of the unit interval: finitely many monotone branches whose
//! closed domains tile [0,1], meeting at the exceptional set (critical points
//! and discontinuities). Evaluation is undefined on the exceptional set;
//! one-sided limits are taken through branch closures.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::branch::{BranchSpec, Orientation, SupEstimate, SupMethod};

/// |f'| below this is treated as a critical point by the Schwarzian.
pub const CRITICAL_DERIV_TOL: f64 = 1e-12;

/// Round-off slack for branch values: overflow beyond [0,1] up to this much
/// is clamped; anything larger is a range violation and is never clamped.
pub const RANGE_SLACK: f64 = 1e-12;

/// Where a map came from. Carried through files and surgeries so derived maps
/// stay attributable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Zoo {
        family: String,
        params: Vec<(String, f64)>,
    },
    Surgery {
        op: String,
        source: String,
        interval: (f64, f64),
        factors: Vec<f64>,
    },
    Note {
        text: String,
    },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapBuildError {
    #[error("map must have at least one branch")]
    Empty,
    #[error("branch domains must tile [0,1]: {0}")]
    BadTiling(String),
    #[error("non-finite parameter in branch {0}")]
    NonFinite(usize),
}

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum EvalError {
    #[error("x = {0} is an exceptional point (no value there; use one-sided limits)")]
    ExceptionalPoint(f64),
    #[error("x = {0} is outside [0,1]")]
    OutOfDomain(f64),
}

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum SchwarzianError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("|f'({0})| < {CRITICAL_DERIV_TOL:e}: Schwarzian undefined at a critical point")]
    CriticalPoint(f64),
}

/// Side from which a lateral point approaches its coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Minus,
    Plus,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Minus => Side::Plus,
            Side::Plus => Side::Minus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Side::Minus => '-',
            Side::Plus => '+',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseMap {
    pub name: String,
    pub branches: Vec<BranchSpec>,
    /// Interior branch boundaries, sorted; derived from the branch list.
    pub exceptional_set: Vec<f64>,
    pub provenance: Option<Provenance>,
}

impl PiecewiseMap {
    pub fn new(
        name: impl Into<String>,
        branches: Vec<BranchSpec>,
        provenance: Option<Provenance>,
    ) -> Result<Self, MapBuildError> {
        if branches.is_empty() {
            return Err(MapBuildError::Empty);
        }
        for (i, b) in branches.iter().enumerate() {
            if !(b.lo.is_finite() && b.hi.is_finite()) || !b.form.is_finite() {
                return Err(MapBuildError::NonFinite(i));
            }
            if !(b.lo < b.hi) {
                return Err(MapBuildError::BadTiling(format!(
                    "branch {i} has empty domain ({}, {})",
                    b.lo, b.hi
                )));
            }
        }
        if branches[0].lo != 0.0 {
            return Err(MapBuildError::BadTiling(format!(
                "first branch starts at {}, expected 0",
                branches[0].lo
            )));
        }
        if branches.last().unwrap().hi != 1.0 {
            return Err(MapBuildError::BadTiling(format!(
                "last branch ends at {}, expected 1",
                branches.last().unwrap().hi
            )));
        }
        let mut exceptional = Vec::with_capacity(branches.len() - 1);
        for w in branches.windows(2) {
            if w[0].hi != w[1].lo {
                return Err(MapBuildError::BadTiling(format!(
                    "gap or overlap between branch ending at {} and branch starting at {}",
                    w[0].hi, w[1].lo
                )));
            }
            exceptional.push(w[0].hi);
        }
        Ok(PiecewiseMap {
            name: name.into(),
            branches,
            exceptional_set: exceptional,
            provenance,
        })
    }

    pub fn is_exceptional(&self, x: f64) -> bool {
        // Exact floating-point membership: the exceptional set is a finite
        // set of representable numbers.
        self.exceptional_set.iter().any(|&c| c == x)
    }

    /// Index of the open branch containing x (x not exceptional, in [0,1]).
    pub fn branch_index(&self, x: f64) -> Result<usize, EvalError> {
        if !(0.0..=1.0).contains(&x) {
            return Err(EvalError::OutOfDomain(x));
        }
        if self.is_exceptional(x) {
            return Err(EvalError::ExceptionalPoint(x));
        }
        // Branches are sorted; find the first with hi > x (for x = 1 take
        // the last branch).
        let idx = self
            .branches
            .partition_point(|b| b.hi <= x)
            .min(self.branches.len() - 1);
        Ok(idx)
    }

    /// Branch adjacent to `coord` on the given side. Side `Minus` requires
    /// coord > 0, side `Plus` requires coord < 1.
    pub fn branch_index_from_side(&self, coord: f64, side: Side) -> Result<usize, EvalError> {
        if !(0.0..=1.0).contains(&coord) {
            return Err(EvalError::OutOfDomain(coord));
        }
        match side {
            Side::Minus => {
                if coord <= 0.0 {
                    return Err(EvalError::OutOfDomain(coord));
                }
                // Branch with lo < coord <= hi.
                Ok(self
                    .branches
                    .partition_point(|b| b.hi < coord)
                    .min(self.branches.len() - 1))
            }
            Side::Plus => {
                if coord >= 1.0 {
                    return Err(EvalError::OutOfDomain(coord));
                }
                // Branch with lo <= coord < hi.
                Ok(self
                    .branches
                    .partition_point(|b| b.hi <= coord)
                    .min(self.branches.len() - 1))
            }
        }
    }

    /// f(x) for x in [0,1] minus the exceptional set. Values overflowing
    /// [0,1] by at most `RANGE_SLACK` are clamped (round-off); larger
    /// violations are returned raw so they surface in validation.
    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        let idx = self.branch_index(x)?;
        Ok(clamp_roundoff(self.branches[idx].eval(x)))
    }

    /// Exact derivative of order 1..=3 at a non-exceptional point.
    pub fn derivative(&self, x: f64, order: u8) -> Result<f64, EvalError> {
        let idx = self.branch_index(x)?;
        Ok(self.branches[idx].derivative(x, order))
    }

    /// Schwarzian derivative f'''/f' − (3/2)(f''/f')² at a non-exceptional,
    /// non-critical point.
    pub fn schwarzian(&self, x: f64) -> Result<f64, SchwarzianError> {
        let idx = self.branch_index(x)?;
        let b = &self.branches[idx];
        let d1 = b.derivative(x, 1);
        if d1.abs() < CRITICAL_DERIV_TOL {
            return Err(SchwarzianError::CriticalPoint(x));
        }
        let d2 = b.derivative(x, 2);
        let d3 = b.derivative(x, 3);
        let ratio = d2 / d1;
        Ok(d3 / d1 - 1.5 * ratio * ratio)
    }

    /// One-sided limit of f at `coord` from `side`, via the adjacent branch
    /// closure.
    pub fn one_sided_value(&self, coord: f64, side: Side) -> Result<f64, EvalError> {
        let idx = self.branch_index_from_side(coord, side)?;
        Ok(clamp_roundoff(self.branches[idx].eval(coord)))
    }

    /// One-sided limit of f' (the value, which may be 0 at a power-law or
    /// polynomial critical endpoint).
    pub fn one_sided_derivative(&self, coord: f64, side: Side) -> Result<f64, EvalError> {
        let idx = self.branch_index_from_side(coord, side)?;
        Ok(self.branches[idx].derivative(coord, 1))
    }

    /// One-sided limit of f'/|f'| from `side`: the sign of the derivative
    /// through nearby points, defined even where the derivative value limit
    /// is 0. `None` means the branch is flat from that side.
    pub fn one_sided_derivative_sign(
        &self,
        coord: f64,
        side: Side,
    ) -> Result<Option<i8>, EvalError> {
        let idx = self.branch_index_from_side(coord, side)?;
        Ok(self.branches[idx].derivative_sign_at(coord))
    }

    /// Supremum of |f'| over the whole domain. `None` when some branch has
    /// unbounded derivative.
    pub fn sup_abs_derivative(&self) -> Option<SupEstimate> {
        let mut value: f64 = 0.0;
        let mut method = SupMethod::Analytic;
        for b in &self.branches {
            let s = b.form.sup_abs_derivative(b.lo, b.hi)?;
            value = value.max(s.value);
            if s.method == SupMethod::Grid {
                method = SupMethod::Grid;
            }
        }
        Some(SupEstimate { value, method })
    }

    /// Grid-based semantic validation: range containment, declared
    /// orientation versus the derivative, and negative Schwarzian, sampled
    /// at `grid_per_branch` interior points of every branch.
    pub fn validate(&self, grid_per_branch: usize) -> ValidationReport {
        let mut report = ValidationReport::new(grid_per_branch);
        let n = grid_per_branch.max(2);
        for (bi, b) in self.branches.iter().enumerate() {
            for i in 0..n {
                // Strictly interior sample points; endpoints belong to the
                // exceptional set or the domain boundary.
                let x = b.lo + (b.hi - b.lo) * (i as f64 + 0.5) / n as f64;
                let v = b.eval(x);
                if !v.is_finite() || v < -RANGE_SLACK || v > 1.0 + RANGE_SLACK {
                    report.push_range(bi, x, v);
                }
                let d1 = b.derivative(x, 1);
                if d1 == 0.0 || (d1 > 0.0) != (b.orientation == Orientation::Increasing) {
                    report.push_orientation(bi, x, d1);
                }
                if d1.abs() >= CRITICAL_DERIV_TOL {
                    let d2 = b.derivative(x, 2);
                    let d3 = b.derivative(x, 3);
                    let r = d2 / d1;
                    let s = d3 / d1 - 1.5 * r * r;
                    if !(s < 0.0) {
                        report.push_schwarzian(bi, x, s);
                    }
                } else {
                    report.push_critical(bi, x);
                }
            }
        }
        report
    }
}

pub(crate) fn clamp_roundoff(v: f64) -> f64 {
    if v > 1.0 && v <= 1.0 + RANGE_SLACK {
        1.0
    } else if v < 0.0 && v >= -RANGE_SLACK {
        0.0
    } else {
        v
    }
}

/// One recorded grid violation: (branch index, sample point, offending value).
pub type GridFlag = (usize, f64, f64);

const MAX_STORED_FLAGS: usize = 16;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub grid_per_branch: usize,
    pub range_violations: u64,
    pub range_examples: Vec<GridFlag>,
    pub orientation_violations: u64,
    pub orientation_examples: Vec<GridFlag>,
    /// Grid points where Sf >= 0 (negative-Schwarzian hypothesis fails).
    pub nonnegative_schwarzian: u64,
    pub schwarzian_examples: Vec<GridFlag>,
    /// Grid points where |f'| fell below the critical threshold: the
    /// Schwarzian was skipped there (a critical point interior to a branch
    /// usually means the branch partition is wrong).
    pub critical_grid_points: u64,
    pub critical_examples: Vec<(usize, f64)>,
}

impl ValidationReport {
    fn new(grid_per_branch: usize) -> Self {
        ValidationReport {
            grid_per_branch,
            range_violations: 0,
            range_examples: Vec::new(),
            orientation_violations: 0,
            orientation_examples: Vec::new(),
            nonnegative_schwarzian: 0,
            schwarzian_examples: Vec::new(),
            critical_grid_points: 0,
            critical_examples: Vec::new(),
        }
    }

    fn push_range(&mut self, b: usize, x: f64, v: f64) {
        self.range_violations += 1;
        if self.range_examples.len() < MAX_STORED_FLAGS {
            self.range_examples.push((b, x, v));
        }
    }

    fn push_orientation(&mut self, b: usize, x: f64, d: f64) {
        self.orientation_violations += 1;
        if self.orientation_examples.len() < MAX_STORED_FLAGS {
            self.orientation_examples.push((b, x, d));
        }
    }

    fn push_schwarzian(&mut self, b: usize, x: f64, s: f64) {
        self.nonnegative_schwarzian += 1;
        if self.schwarzian_examples.len() < MAX_STORED_FLAGS {
            self.schwarzian_examples.push((b, x, s));
        }
    }

    fn push_critical(&mut self, b: usize, x: f64) {
        self.critical_grid_points += 1;
        if self.critical_examples.len() < MAX_STORED_FLAGS {
            self.critical_examples.push((b, x));
        }
    }

    /// Clean run: in-range, orientation-consistent, Sf < 0 wherever defined,
    /// and no interior critical points.
    pub fn is_clean(&self) -> bool {
        self.range_violations == 0
            && self.orientation_violations == 0
            && self.nonnegative_schwarzian == 0
            && self.critical_grid_points == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branch::BranchForm;

    pub fn logistic(lambda: f64) -> PiecewiseMap {
        let form = BranchForm::Polynomial {
            coeffs: vec![0.0, lambda, -lambda],
        };
        PiecewiseMap::new(
            format!("logistic_{lambda}"),
            vec![
                BranchSpec {
                    lo: 0.0,
                    hi: 0.5,
                    orientation: Orientation::Increasing,
                    form: form.clone(),
                },
                BranchSpec {
                    lo: 0.5,
                    hi: 1.0,
                    orientation: Orientation::Decreasing,
                    form,
                },
            ],
            None,
        )
        .unwrap()
    }

    #[test]
    fn eval_values_and_errors() {
        let f = logistic(4.0);
        assert_eq!(f.eval(0.25).unwrap(), 0.75);
        assert_eq!(
            f.eval(0.5),
            Err(EvalError::ExceptionalPoint(0.5)),
            "exceptional point has no value"
        );
        assert_eq!(f.eval(1.25), Err(EvalError::OutOfDomain(1.25)));
        assert_eq!(f.eval(0.0).unwrap(), 0.0);
        assert_eq!(f.eval(1.0).unwrap(), 0.0);
    }

    #[test]
    fn fixed_point_closed_form() {
        // looking for f(1 − 1/λ) = 1 − 1/λ
        let lambda = 2.5;
        let f = logistic(lambda);
        let star = 1.0 - 1.0 / lambda;
        assert!((f.eval(star).unwrap() - star).abs() < 1e-15);
    }

    #[test]
    fn derivatives_exact() {
        let f = logistic(4.0);
        assert_eq!(f.derivative(0.0, 1).unwrap(), 4.0);
        assert_eq!(f.derivative(0.0, 2).unwrap(), -8.0);
        assert_eq!(f.derivative(0.0, 3).unwrap(), 0.0);
    }

    #[test]
    fn schwarzian_closed_form_points() {
        // For λ=4: Sf = −(3/2)·(−8/(4−8x))² = −96/(4−8x)²; Sf(0) = −6,
        // Sf(0.25) = −24.
        let f = logistic(4.0);
        assert!((f.schwarzian(0.0).unwrap() + 6.0).abs() < 1e-12);
        assert!((f.schwarzian(0.25).unwrap() + 24.0).abs() < 1e-12);
        assert!(matches!(
            f.schwarzian(0.5),
            Err(SchwarzianError::Eval(EvalError::ExceptionalPoint(_)))
        ));
    }

    #[test]
    fn schwarzian_zero_for_affine() {
        let m = PiecewiseMap::new(
            "id",
            vec![BranchSpec {
                lo: 0.0,
                hi: 1.0,
                orientation: Orientation::Increasing,
                form: BranchForm::Affine { a: 1.0, b: 0.0 },
            }],
            None,
        )
        .unwrap();
        assert_eq!(m.schwarzian(0.3).unwrap(), 0.0);
        // Sf = 0 is not negative: validation flags it.
        let report = m.validate(100);
        assert_eq!(report.nonnegative_schwarzian, 100);
        assert!(!report.is_clean());
    }

    #[test]
    fn one_sided_limits_at_critical_point() {
        let f = logistic(4.0);
        assert_eq!(f.one_sided_value(0.5, Side::Minus).unwrap(), 1.0);
        assert_eq!(f.one_sided_value(0.5, Side::Plus).unwrap(), 1.0);
        assert_eq!(f.one_sided_derivative(0.5, Side::Minus).unwrap(), 0.0);
        assert_eq!(f.one_sided_derivative_sign(0.5, Side::Minus).unwrap(), Some(1));
        assert_eq!(f.one_sided_derivative_sign(0.5, Side::Plus).unwrap(), Some(-1));
        assert_eq!(f.one_sided_derivative_sign(1.0, Side::Minus).unwrap(), Some(-1));
        assert!(f.one_sided_value(0.0, Side::Minus).is_err());
        assert!(f.one_sided_value(1.0, Side::Plus).is_err());
    }

    #[test]
    fn bad_tilings_rejected() {
        let form = BranchForm::Affine { a: 1.0, b: 0.0 };
        let mk = |lo, hi| BranchSpec {
            lo,
            hi,
            orientation: Orientation::Increasing,
            form: form.clone(),
        };
        assert!(matches!(
            PiecewiseMap::new("gap", vec![mk(0.0, 0.4), mk(0.5, 1.0)], None),
            Err(MapBuildError::BadTiling(_))
        ));
        assert!(matches!(
            PiecewiseMap::new("overlap", vec![mk(0.0, 0.6), mk(0.5, 1.0)], None),
            Err(MapBuildError::BadTiling(_))
        ));
        assert!(matches!(
            PiecewiseMap::new("short", vec![mk(0.0, 0.9)], None),
            Err(MapBuildError::BadTiling(_))
        ));
        assert!(matches!(
            PiecewiseMap::new("none", vec![], None),
            Err(MapBuildError::Empty)
        ));
    }

    #[test]
    fn validate_clean_logistic() {
        let report = logistic(4.0).validate(1000);
        assert!(report.is_clean(), "{report:?}");
        let report = logistic(2.5).validate(1000);
        assert!(report.is_clean());
    }

    #[test]
    fn sup_derivative_logistic() {
        let s = logistic(4.0).sup_abs_derivative().unwrap();
        assert_eq!(s.value, 4.0);
        assert_eq!(s.method, SupMethod::Analytic);
    }
}
