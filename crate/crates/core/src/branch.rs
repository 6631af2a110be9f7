//! Branch forms: the closed algebra of expressions a piecewise map is built
//! from. Every form is analytic on the closure of its branch domain, so
//! one-sided limits at branch endpoints are plain evaluations and derivatives
//! are exact.

use serde::{Deserialize, Serialize};

/// Declared monotonicity of a branch on its open domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Increasing,
    Decreasing,
}

impl Orientation {
    pub fn sign(self) -> i8 {
        match self {
            Orientation::Increasing => 1,
            Orientation::Decreasing => -1,
        }
    }
}

/// Which side of the pivot a power-law branch domain lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PivotSide {
    Left,
    Right,
}

/// Direction a one-sided limit approaches from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Approach {
    /// x ↑ p: through points below p.
    FromBelow,
    /// x ↓ p: through points above p.
    FromAbove,
}

impl Approach {
    fn dir(self) -> f64 {
        match self {
            Approach::FromBelow => -1.0,
            Approach::FromAbove => 1.0,
        }
    }
}

/// How a derivative supremum was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupMethod {
    Analytic,
    Grid,
}

/// Supremum of |f'| over a domain, with the method that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupEstimate {
    pub value: f64,
    pub method: SupMethod,
}

const SUP_GRID: usize = 20_001;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BranchForm {
    /// x ↦ a·x + b
    Affine { a: f64, b: f64 },
    /// x ↦ Σ coeffs[i]·x^i (ascending powers)
    Polynomial { coeffs: Vec<f64> },
    /// x ↦ v + k·|x − pivot|^rho with the domain on `side` of the pivot
    PowerLaw {
        v: f64,
        k: f64,
        rho: f64,
        pivot: f64,
        side: PivotSide,
    },
    /// x ↦ offset + scale·(inner(x) − anchor)
    Scaled {
        inner: Box<BranchForm>,
        scale: f64,
        offset: f64,
        anchor: f64,
    },
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Coefficients of the derivative polynomial.
fn derive_coeffs(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| c * i as f64)
        .collect()
}

impl BranchForm {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            BranchForm::Affine { a, b } => a * x + b,
            BranchForm::Polynomial { coeffs } => horner(coeffs, x),
            BranchForm::PowerLaw {
                v, k, rho, pivot, ..
            } => v + k * (x - pivot).abs().powf(*rho),
            BranchForm::Scaled {
                inner,
                scale,
                offset,
                anchor,
            } => offset + scale * (inner.eval(x) - anchor),
        }
    }

    /// Exact derivative of the given order (1..=3). Power-law derivatives of
    /// order ≥ 2 diverge at the pivot when 1 < rho < order; callers evaluate
    /// away from branch boundaries.
    pub fn derivative(&self, x: f64, order: u8) -> f64 {
        assert!((1..=3).contains(&order), "derivative order must be 1..=3");
        match self {
            BranchForm::Affine { a, .. } => {
                if order == 1 {
                    *a
                } else {
                    0.0
                }
            }
            BranchForm::Polynomial { coeffs } => {
                let mut c = derive_coeffs(coeffs);
                for _ in 1..order {
                    c = derive_coeffs(&c);
                }
                horner(&c, x)
            }
            BranchForm::PowerLaw {
                k, rho, pivot, ..
            } => {
                let u = (x - pivot).abs();
                // d/dx |x−p|^rho = rho·|x−p|^(rho−1)·sign(x−p)
                let sgn: f64 = if x >= *pivot { 1.0 } else { -1.0 };
                let mut factor = *rho;
                let mut power = rho - 1.0;
                for _ in 1..order {
                    factor *= power;
                    power -= 1.0;
                }
                k * factor * u.powf(power) * sgn.powi(order as i32)
            }
            BranchForm::Scaled { inner, scale, .. } => scale * inner.derivative(x, order),
        }
    }

    /// Sign of f' in the limit x → p from the given side, i.e. the limit of
    /// f'/|f'| through nearby points. Returns `None` when the form is flat
    /// from that side (identically constant), which has no sign.
    pub fn derivative_sign(&self, p: f64, from: Approach) -> Option<i8> {
        match self {
            BranchForm::Affine { a, .. } => sign_of(*a),
            BranchForm::Polynomial { coeffs } => {
                // Sign of p'(p + dir·ε) for small ε > 0: first non-vanishing
                // Taylor coefficient of p' at p decides.
                let mut c = derive_coeffs(coeffs);
                let dir = from.dir();
                let mut dir_pow = 1.0;
                while !c.is_empty() {
                    let val = horner(&c, p);
                    if val != 0.0 {
                        return sign_of(val * dir_pow);
                    }
                    c = derive_coeffs(&c);
                    dir_pow *= dir;
                }
                None
            }
            BranchForm::PowerLaw { k, side, .. } => {
                // f' = ±k·rho·u^(rho−1) with fixed sign on each side of the
                // pivot, so the sign limit is side-determined even when the
                // derivative value tends to 0 (rho > 1).
                let s = match side {
                    PivotSide::Right => sign_of(*k),
                    PivotSide::Left => sign_of(-*k),
                }?;
                Some(s)
            }
            BranchForm::Scaled { inner, scale, .. } => {
                let s = sign_of(*scale)?;
                Some(s * inner.derivative_sign(p, from)?)
            }
        }
    }

    /// Supremum of |f'| over `[lo, hi]`. Analytic where the extremum has a
    /// closed form, dense-grid fallback otherwise. `None` means unbounded
    /// (power law with rho < 1 whose domain touches the pivot).
    pub fn sup_abs_derivative(&self, lo: f64, hi: f64) -> Option<SupEstimate> {
        match self {
            BranchForm::Affine { a, .. } => Some(SupEstimate {
                value: a.abs(),
                method: SupMethod::Analytic,
            }),
            BranchForm::Polynomial { coeffs } => {
                let d1 = derive_coeffs(coeffs);
                let d2 = derive_coeffs(&d1);
                let mut candidates = vec![lo, hi];
                match d2.len() {
                    0 | 1 => {
                        // |p'| affine or constant: endpoint extremum.
                    }
                    2 => {
                        // p'' linear: single interior stationary point of p'.
                        let r = -d2[0] / d2[1];
                        if r.is_finite() && r > lo && r < hi {
                            candidates.push(r);
                        }
                    }
                    3 => {
                        // p'' quadratic: closed-form roots.
                        let (c0, c1, c2) = (d2[0], d2[1], d2[2]);
                        let disc = c1 * c1 - 4.0 * c2 * c0;
                        if disc >= 0.0 && c2 != 0.0 {
                            let sq = disc.sqrt();
                            for r in [(-c1 - sq) / (2.0 * c2), (-c1 + sq) / (2.0 * c2)] {
                                if r.is_finite() && r > lo && r < hi {
                                    candidates.push(r);
                                }
                            }
                        }
                    }
                    _ => {
                        // High degree: dense grid.
                        let mut best: f64 = 0.0;
                        for i in 0..SUP_GRID {
                            let x = lo + (hi - lo) * i as f64 / (SUP_GRID - 1) as f64;
                            best = best.max(horner(&d1, x).abs());
                        }
                        return Some(SupEstimate {
                            value: best,
                            method: SupMethod::Grid,
                        });
                    }
                }
                let value = candidates
                    .into_iter()
                    .map(|x| horner(&d1, x).abs())
                    .fold(0.0f64, f64::max);
                Some(SupEstimate {
                    value,
                    method: SupMethod::Analytic,
                })
            }
            BranchForm::PowerLaw {
                k, rho, pivot, ..
            } => {
                // |f'| = |k|·rho·u^(rho−1) is monotone in u = |x − pivot|.
                let u_lo = (lo - pivot).abs().min((hi - pivot).abs());
                let u_hi = (lo - pivot).abs().max((hi - pivot).abs());
                let touches_pivot = lo <= *pivot && *pivot <= hi;
                let u_min = if touches_pivot { 0.0 } else { u_lo };
                if *rho < 1.0 && u_min == 0.0 && *k != 0.0 {
                    return None;
                }
                let at = |u: f64| k.abs() * rho * u.powf(rho - 1.0);
                let value = if *rho >= 1.0 { at(u_hi) } else { at(u_min) };
                Some(SupEstimate {
                    value,
                    method: SupMethod::Analytic,
                })
            }
            BranchForm::Scaled { inner, scale, .. } => {
                let s = inner.sup_abs_derivative(lo, hi)?;
                Some(SupEstimate {
                    value: scale.abs() * s.value,
                    method: s.method,
                })
            }
        }
    }

    /// True when every parameter of the form (recursively) is finite.
    pub fn is_finite(&self) -> bool {
        match self {
            BranchForm::Affine { a, b } => a.is_finite() && b.is_finite(),
            BranchForm::Polynomial { coeffs } => coeffs.iter().all(|c| c.is_finite()),
            BranchForm::PowerLaw {
                v, k, rho, pivot, ..
            } => v.is_finite() && k.is_finite() && rho.is_finite() && pivot.is_finite() && *rho > 0.0,
            BranchForm::Scaled {
                inner,
                scale,
                offset,
                anchor,
            } => {
                scale.is_finite() && offset.is_finite() && anchor.is_finite() && inner.is_finite()
            }
        }
    }
}

fn sign_of(v: f64) -> Option<i8> {
    if v > 0.0 {
        Some(1)
    } else if v < 0.0 {
        Some(-1)
    } else {
        None
    }
}

/// One monotone piece of a piecewise map: an open interval (lo, hi) and the
/// analytic form evaluated on its closure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchSpec {
    pub lo: f64,
    pub hi: f64,
    pub orientation: Orientation,
    pub form: BranchForm,
}

impl BranchSpec {
    pub fn eval(&self, x: f64) -> f64 {
        self.form.eval(x)
    }

    pub fn derivative(&self, x: f64, order: u8) -> f64 {
        self.form.derivative(x, order)
    }

    pub fn contains_open(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    /// Sign limit of f' when approaching `p` from inside the branch domain.
    pub fn derivative_sign_at(&self, p: f64) -> Option<i8> {
        let from = if p >= self.hi {
            Approach::FromBelow
        } else if p <= self.lo {
            Approach::FromAbove
        } else {
            // Interior points: either side gives the same sign for a
            // monotone branch; use the below-approach.
            Approach::FromBelow
        };
        self.form.derivative_sign(p, from)
    }
}
