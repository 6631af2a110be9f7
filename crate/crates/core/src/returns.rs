//! First-return machinery on a base interval I = (a,b): niceness checking of
//! the boundary orbits, exhaustive enumeration of the monotone branches of
//! the first return map (with onto verification), a statistical probe of the
//! avoid-or-cover dichotomy, and the accelerated induced map built by
//! composing the boundary branch through the a-adjacent full branch.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lateral::{lateral_step, LateralState};
use crate::map::{clamp_roundoff, PiecewiseMap, Side};
use crate::numerics::solve_monotone;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Default tolerance for declaring an image endpoint to match the base
/// interval's endpoint.
pub const TOL_ONTO: f64 = 1e-9;

/// Default cap on enumeration work items.
pub const SUBDIVISION_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NiceViolation {
    /// Which endpoint's orbit re-entered (a or b).
    pub endpoint: f64,
    /// Number of map applications when it landed inside.
    pub step: usize,
    pub landing: f64,
}

/// Outcome of iterating the boundary orbits of (a,b) up to a horizon: the
/// interval is nice (so far) iff no iterate of a or b lands strictly inside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NiceReport {
    pub interval: (f64, f64),
    pub horizon: usize,
    pub is_nice_up_to_horizon: bool,
    pub violation: Option<NiceViolation>,
}

/// Iterate the forward orbits of both endpoints (laterally, facing away from
/// the interval, so endpoints on the exceptional set have well-defined
/// orbits) and report the first landing strictly inside (a,b).
pub fn check_nice(map: &PiecewiseMap, interval: (f64, f64), horizon: usize) -> NiceReport {
    let (a, b) = interval;
    assert!((0.0..=1.0).contains(&a) && a < b && b <= 1.0, "bad interval");
    assert!(horizon >= 1);
    let side_a = if a == 0.0 { Side::Plus } else { Side::Minus };
    let side_b = if b == 1.0 { Side::Minus } else { Side::Plus };
    let mut states = [
        Some((a, LateralState::new(a, side_a).unwrap())),
        Some((b, LateralState::new(b, side_b).unwrap())),
    ];
    for step in 1..=horizon {
        for slot in states.iter_mut() {
            let Some((endpoint, s)) = *slot else { continue };
            match lateral_step(map, s) {
                Ok(next) => {
                    if a < next.coord && next.coord < b {
                        return NiceReport {
                            interval,
                            horizon,
                            is_nice_up_to_horizon: false,
                            violation: Some(NiceViolation {
                                endpoint,
                                step,
                                landing: next.coord,
                            }),
                        };
                    }
                    *slot = Some((endpoint, next));
                }
                Err(_) => *slot = None,
            }
        }
    }
    NiceReport {
        interval,
        horizon,
        is_nice_up_to_horizon: true,
        violation: None,
    }
}

/// One monotone branch of the first return map: f^return_time maps
/// (sub_lo, sub_hi) homeomorphically onto (image_lo, image_hi) ⊆ [a,b], with
/// no earlier iterate of the open interval meeting (a,b).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnBranch {
    pub sub_lo: f64,
    pub sub_hi: f64,
    pub return_time: usize,
    pub image_lo: f64,
    pub image_hi: f64,
    /// Image matches (a,b) at both ends within tol_onto.
    pub onto: bool,
    /// Branch indices of the map applied in order along the composition.
    pub itinerary: Vec<usize>,
}

/// A subinterval whose orbit had not yet returned to (a,b) when enumeration
/// stopped at max_time. Its image endpoints flow exactly through the branch
/// forms, so a boundary piece adjacent to an exceptional point carries the
/// lateral image of that point as one endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PendingBranch {
    pub sub_lo: f64,
    pub sub_hi: f64,
    /// Map applications performed so far.
    pub elapsed: usize,
    pub image_lo: f64,
    pub image_hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstReturnMap {
    pub base: (f64, f64),
    /// Completed branches, sorted by sub_lo, pairwise disjoint.
    pub branches: Vec<ReturnBranch>,
    /// Pieces still outside (a,b) at the max_time horizon.
    pub pending: Vec<PendingBranch>,
    pub max_time: usize,
    pub tol_onto: f64,
    /// Total length of completed branch domains divided by b−a.
    pub coverage_measure: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReturnMapError {
    #[error("branch subdivision exceeded the cap of {cap} work items")]
    SubdivisionOverflow { cap: usize },
}

struct WorkItem {
    sub_lo: f64,
    sub_hi: f64,
    img_lo: f64,
    img_hi: f64,
    /// Whether the composition so far is increasing.
    increasing: bool,
    t: usize,
    itinerary: Vec<usize>,
}

fn eval_itin(map: &PiecewiseMap, it: &[usize], x: f64) -> f64 {
    it.iter().fold(x, |acc, &i| map.branches[i].eval(acc))
}

/// Pull an image value back through the item's composition into its
/// subinterval (monotone, so bisection is exact to 1e−12).
fn pull_back(map: &PiecewiseMap, it: &[usize], sub_lo: f64, sub_hi: f64, z: f64) -> Option<f64> {
    solve_monotone(|w| eval_itin(map, it, w) - z, sub_lo, sub_hi)
}

/// Enumerate all monotone branches of the first return map to (a,b) with
/// return time ≤ max_time, by flowing subintervals of (a,b) forward and
/// splitting their images at the exceptional set and at {a,b}. Image
/// endpoints propagate exactly through the branch forms; subinterval
/// endpoints of split pieces are recovered by monotone bisection.
pub fn first_return_map(
    map: &PiecewiseMap,
    interval: (f64, f64),
    max_time: usize,
    tol_onto: f64,
) -> Result<FirstReturnMap, ReturnMapError> {
    let (a, b) = interval;
    assert!((0.0..=1.0).contains(&a) && a < b && b <= 1.0, "bad interval");
    assert!(max_time >= 1);
    let mut created: usize = 0;
    let mut queue: std::collections::VecDeque<WorkItem> = Default::default();
    let mut branches: Vec<ReturnBranch> = Vec::new();
    let mut pending: Vec<PendingBranch> = Vec::new();

    // Seed: (a,b) split at interior exceptional points.
    {
        let mut cuts = vec![a];
        cuts.extend(map.exceptional_set.iter().copied().filter(|&e| a < e && e < b));
        cuts.push(b);
        for w in cuts.windows(2) {
            if w[0] < w[1] {
                queue.push_back(WorkItem {
                    sub_lo: w[0],
                    sub_hi: w[1],
                    img_lo: w[0],
                    img_hi: w[1],
                    increasing: true,
                    t: 0,
                    itinerary: Vec::new(),
                });
                created += 1;
            }
        }
    }

    while let Some(item) = queue.pop_front() {
        if item.t == max_time {
            pending.push(PendingBranch {
                sub_lo: item.sub_lo,
                sub_hi: item.sub_hi,
                elapsed: item.t,
                image_lo: item.img_lo,
                image_hi: item.img_hi,
            });
            continue;
        }
        // Split the image at exceptional points, apply one branch per piece.
        let mut cuts = vec![item.img_lo];
        cuts.extend(
            map.exceptional_set
                .iter()
                .copied()
                .filter(|&e| item.img_lo < e && e < item.img_hi),
        );
        cuts.push(item.img_hi);
        for w in cuts.windows(2) {
            let (plo, phi) = (w[0], w[1]);
            if plo >= phi {
                continue;
            }
            // The branch containing the open piece (phi is its supremum).
            let Ok(bidx) = map.branch_index_from_side(phi, Side::Minus) else {
                continue;
            };
            let beta = &map.branches[bidx];
            let y_lo = clamp_roundoff(beta.eval(plo));
            let y_hi = clamp_roundoff(beta.eval(phi));
            let beta_up = y_lo < y_hi;
            let (ny_lo, ny_hi) = if beta_up { (y_lo, y_hi) } else { (y_hi, y_lo) };
            if ny_lo >= ny_hi {
                continue;
            }
            // Recover the subinterval of this piece: inherit endpoints that
            // were not split, bisect the split ones.
            let sub_of = |z: f64, inherited: Option<f64>| -> Option<f64> {
                if let Some(v) = inherited {
                    Some(v)
                } else {
                    pull_back(map, &item.itinerary, item.sub_lo, item.sub_hi, z)
                }
            };
            let (lo_inherit, hi_inherit) = if item.increasing {
                (
                    (plo == item.img_lo).then_some(item.sub_lo),
                    (phi == item.img_hi).then_some(item.sub_hi),
                )
            } else {
                (
                    (plo == item.img_lo).then_some(item.sub_hi),
                    (phi == item.img_hi).then_some(item.sub_lo),
                )
            };
            let (Some(w1), Some(w2)) = (sub_of(plo, lo_inherit), sub_of(phi, hi_inherit)) else {
                continue;
            };
            let (nsub_lo, nsub_hi) = if w1 <= w2 { (w1, w2) } else { (w2, w1) };
            let n_increasing = item.increasing == beta_up;
            let mut n_it = item.itinerary.clone();
            n_it.push(bidx);
            let nt = item.t + 1;

            // Split the new image at the base endpoints; inside pieces are
            // completed return branches, outside pieces continue.
            let mut bcuts = vec![ny_lo];
            for &e in &[a, b] {
                if ny_lo < e && e < ny_hi {
                    bcuts.push(e);
                }
            }
            bcuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
            bcuts.push(ny_hi);
            for v in bcuts.windows(2) {
                let (qlo, qhi) = (v[0], v[1]);
                if qlo >= qhi {
                    continue;
                }
                let q_sub_of = |z: f64, inherited: Option<f64>| -> Option<f64> {
                    if let Some(vv) = inherited {
                        Some(vv)
                    } else {
                        pull_back(map, &n_it, nsub_lo, nsub_hi, z)
                    }
                };
                let (qlo_inherit, qhi_inherit) = if n_increasing {
                    (
                        (qlo == ny_lo).then_some(nsub_lo),
                        (qhi == ny_hi).then_some(nsub_hi),
                    )
                } else {
                    (
                        (qlo == ny_lo).then_some(nsub_hi),
                        (qhi == ny_hi).then_some(nsub_lo),
                    )
                };
                let (Some(s1), Some(s2)) = (q_sub_of(qlo, qlo_inherit), q_sub_of(qhi, qhi_inherit))
                else {
                    continue;
                };
                let (qs_lo, qs_hi) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
                if qs_lo >= qs_hi {
                    continue;
                }
                if qlo >= a && qhi <= b {
                    branches.push(ReturnBranch {
                        sub_lo: qs_lo,
                        sub_hi: qs_hi,
                        return_time: nt,
                        image_lo: qlo,
                        image_hi: qhi,
                        onto: (qlo - a).abs() <= tol_onto && (qhi - b).abs() <= tol_onto,
                        itinerary: n_it.clone(),
                    });
                } else {
                    created += 1;
                    if created > SUBDIVISION_CAP {
                        return Err(ReturnMapError::SubdivisionOverflow {
                            cap: SUBDIVISION_CAP,
                        });
                    }
                    queue.push_back(WorkItem {
                        sub_lo: qs_lo,
                        sub_hi: qs_hi,
                        img_lo: qlo,
                        img_hi: qhi,
                        increasing: n_increasing,
                        t: nt,
                        itinerary: n_it.clone(),
                    });
                }
            }
        }
    }

    branches.sort_by(|x, y| x.sub_lo.partial_cmp(&y.sub_lo).unwrap());
    pending.sort_by(|x, y| x.sub_lo.partial_cmp(&y.sub_lo).unwrap());
    let coverage_measure = branches
        .iter()
        .map(|br| br.sub_hi - br.sub_lo)
        .sum::<f64>()
        / (b - a);
    Ok(FirstReturnMap {
        base: interval,
        branches,
        pending,
        max_time,
        tol_onto,
        coverage_measure,
    })
}

/// Verdict of the statistical avoid-or-cover probe on an interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum DichotomyVerdict {
    /// A lateral critical value orbit enters the interval, so the dichotomy
    /// hypothesis does not apply.
    PreconditionFailed {
        critical_value: f64,
        step: usize,
        landed: f64,
    },
    AllAvoid { avoid_fraction: f64 },
    AllCover { cover_fraction: f64 },
    Mixed {
        avoid_fraction: f64,
        cover_fraction: f64,
        counterexample: Option<f64>,
    },
}

#[derive(Clone, Copy, PartialEq)]
enum SampleOutcome {
    Avoid,
    Cover,
    Neither,
}

/// Horizon for the critical-value-orbit precondition.
const PRECONDITION_HORIZON: usize = 1000;
const PROBE_SCAN_INTERVAL: usize = 512;
const PROBE_WINDOW: usize = 192;

fn sample_outcome(
    map: &PiecewiseMap,
    x0: f64,
    interval: (f64, f64),
    burn_in: usize,
    tail: usize,
    resolution: f64,
) -> SampleOutcome {
    let (a, b) = interval;
    let n_sub = (((b - a) / resolution).ceil() as usize).max(1);
    let mut covered = vec![false; n_sub];
    let mut covered_count = 0usize;
    let mut entered = false;
    let mut x = x0;
    for _ in 0..burn_in {
        match map.eval(x) {
            Ok(y) => x = y,
            Err(_) => return SampleOutcome::Neither,
        }
    }
    let mut window: Vec<f64> = Vec::with_capacity(PROBE_WINDOW);
    for step in 0..tail {
        if a < x && x < b {
            entered = true;
            let j = (((x - a) / resolution) as usize).min(n_sub - 1);
            if !covered[j] {
                covered[j] = true;
                covered_count += 1;
                if covered_count == n_sub {
                    return SampleOutcome::Cover;
                }
            }
        }
        if window.len() == PROBE_WINDOW {
            window.remove(0);
        }
        window.push(x);
        if (step + 1) % PROBE_SCAN_INTERVAL == 0 && window.len() == PROBE_WINDOW {
            if let Some(p) = crate::lateral::scan_tail_period(&window) {
                // The tail has settled on a cycle: the outcome can no longer
                // change if the cycle keeps a safe margin from the interval.
                let cyc = &window[window.len() - p as usize..];
                let clear = cyc
                    .iter()
                    .all(|&y| y <= a - resolution || y >= b + resolution);
                if clear {
                    return if entered {
                        SampleOutcome::Neither
                    } else {
                        SampleOutcome::Avoid
                    };
                } else if entered {
                    // Revisiting the same in-interval cycle cells forever.
                    return SampleOutcome::Neither;
                }
            }
        }
        match map.eval(x) {
            Ok(y) => x = y,
            Err(_) => break,
        }
    }
    if !entered {
        SampleOutcome::Avoid
    } else if covered_count == n_sub {
        SampleOutcome::Cover
    } else {
        SampleOutcome::Neither
    }
}

/// Statistical probe of the avoid-or-cover dichotomy on (a,b): seeded
/// uniform samples in the interval either avoid it after burn-in or cover
/// it to the given resolution. Requires the lateral critical value orbits
/// to miss the interval (checked up to a horizon first).
pub fn dichotomy_probe(
    map: &PiecewiseMap,
    interval: (f64, f64),
    samples: usize,
    burn_in: usize,
    tail: usize,
    resolution: f64,
    seed: u64,
) -> DichotomyVerdict {
    let (a, b) = interval;
    assert!((0.0..=1.0).contains(&a) && a < b && b <= 1.0, "bad interval");
    assert!(samples >= 1 && resolution > 0.0);

    for &alpha in &map.exceptional_set {
        for side in [Side::Minus, Side::Plus] {
            let Ok(start) = LateralState::new(alpha, side) else { continue };
            let Ok(mut s) = lateral_step(map, start) else { continue };
            let v = s.coord;
            for step in 0..PRECONDITION_HORIZON {
                if a < s.coord && s.coord < b {
                    return DichotomyVerdict::PreconditionFailed {
                        critical_value: v,
                        step,
                        landed: s.coord,
                    };
                }
                match lateral_step(map, s) {
                    Ok(next) => s = next,
                    Err(_) => break,
                }
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<f64> = (0..samples)
        .map(|_| a + (b - a) * rng.random::<f64>())
        .collect();
    let outcomes: Vec<SampleOutcome> = xs
        .par_iter()
        .map(|&x0| sample_outcome(map, x0, interval, burn_in, tail, resolution))
        .collect();
    let n = samples as f64;
    let avoid = outcomes.iter().filter(|&&o| o == SampleOutcome::Avoid).count();
    let cover = outcomes.iter().filter(|&&o| o == SampleOutcome::Cover).count();
    let avoid_fraction = avoid as f64 / n;
    let cover_fraction = cover as f64 / n;
    if avoid_fraction >= 0.95 {
        DichotomyVerdict::AllAvoid { avoid_fraction }
    } else if cover_fraction >= 0.95 {
        DichotomyVerdict::AllCover { cover_fraction }
    } else {
        // Prefer a sample that satisfies neither horn; otherwise one from
        // the minority horn.
        let neither = outcomes
            .iter()
            .position(|&o| o == SampleOutcome::Neither)
            .map(|i| xs[i]);
        let minority = if avoid <= cover {
            SampleOutcome::Avoid
        } else {
            SampleOutcome::Cover
        };
        let counterexample = neither.or_else(|| {
            outcomes
                .iter()
                .position(|&o| o == minority)
                .map(|i| xs[i])
        });
        DichotomyVerdict::Mixed {
            avoid_fraction,
            cover_fraction,
            counterexample,
        }
    }
}

/// Result of the inductive full-branch construction on the left part (a,c)
/// of the base interval.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedMap {
    pub base: (f64, f64),
    /// Full branches accumulated through depth_reached inductive steps;
    /// every branch maps its subinterval onto (a,b).
    pub branches: Vec<ReturnBranch>,
    pub depth_reached: usize,
    /// The current boundary piece (t_n, c) with its composed image.
    pub boundary: PendingBranch,
    /// True when the induction stopped for budget reasons (depth_cap, or a
    /// landing outside the enumerated branches) rather than convergence of
    /// the boundary piece to c.
    pub depth_exhausted: bool,
    pub coverage_measure: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InducedMapError {
    #[error("induced-map hypothesis failed: {reason}")]
    HypothesisFailed { reason: String },
    #[error(transparent)]
    Enumeration(#[from] ReturnMapError),
}

/// The boundary piece is declared converged when shorter than this.
const BOUNDARY_CONVERGED: f64 = 1e-12;
/// Tolerance for the boundary image to count as anchored at a.
const ANCHOR_TOL: f64 = 1e-7;
/// Cap on compositions through the a-adjacent branch per inductive step.
const MAX_HOPS: usize = 100_000;

/// Build the accelerated induced map on (a,c): start from the first-return
/// branches left of the single interior exceptional point c, then repeatedly
/// compose the c-adjacent boundary branch with returns through the
/// a-adjacent full branch until its image escapes, pulling every full branch
/// inside the escape image back into the boundary piece. Every emitted
/// branch maps onto (a,b); the boundary piece shrinks toward c.
pub fn accelerated_induced_map(
    map: &PiecewiseMap,
    interval: (f64, f64),
    depth_cap: usize,
    max_time: usize,
) -> Result<InducedMap, InducedMapError> {
    let (a, b) = interval;
    let fail = |reason: String| Err(InducedMapError::HypothesisFailed { reason });

    // Exactly one exceptional point inside, with increasing branches.
    let inside: Vec<f64> = map
        .exceptional_set
        .iter()
        .copied()
        .filter(|&e| a < e && e < b)
        .collect();
    let [c] = inside[..] else {
        return fail(format!(
            "expected exactly one exceptional point inside the interval, found {}",
            inside.len()
        ));
    };
    for side in [Side::Minus, Side::Plus] {
        if map.one_sided_derivative_sign(c, side) != Ok(Some(1)) {
            return fail(format!(
                "map is not orientation preserving around {c} (side {side:?})"
            ));
        }
    }

    // a must be periodic with its cycle avoiding (a,b).
    let side_a = if a == 0.0 { Side::Plus } else { Side::Minus };
    let start = LateralState::new(a, side_a)
        .map_err(|e| InducedMapError::HypothesisFailed { reason: e.to_string() })?;
    let Some(rec) = crate::lateral::detect_periodic_like(map, start, 64, 1e-9) else {
        return fail(format!("left endpoint {a} was not detected periodic"));
    };
    if (rec.point.coord - a).abs() > 1e-9 {
        return fail(format!(
            "left endpoint {a} is not itself periodic (nearest cycle point {})",
            rec.point.coord
        ));
    }
    let cycle = crate::lateral::lateral_orbit(map, rec.point, rec.period);
    for s in &cycle.states {
        if a < s.coord && s.coord < b {
            return fail(format!(
                "orbit of the left endpoint enters the interval at {}",
                s.coord
            ));
        }
    }

    let frm = first_return_map(map, interval, max_time, TOL_ONTO)?;
    let left: Vec<&ReturnBranch> = frm.branches.iter().filter(|br| br.sub_hi <= c).collect();
    let Some(i_a) = left.iter().find(|br| br.sub_lo == a) else {
        if frm.pending.iter().any(|p| p.sub_lo == a) {
            return fail("branch adjacent to a did not return within max_time".into());
        }
        return fail("no branch adjacent to a".into());
    };
    if !i_a.onto {
        return fail(format!(
            "branch adjacent to a is not onto (image [{}, {}])",
            i_a.image_lo, i_a.image_hi
        ));
    }
    let Some(b0) = left.iter().find(|br| br.sub_hi == c).map(|br| (*br).clone()) else {
        if frm.pending.iter().any(|p| p.sub_hi == c) {
            return fail("boundary branch at c did not return within max_time".into());
        }
        return fail("no boundary branch adjacent to c".into());
    };
    if b0.sub_lo == a {
        return fail(
            "the whole of (a,c) returns as one branch: periodic-like attractor indicated".into(),
        );
    }
    if (b0.image_lo - a).abs() > ANCHOR_TOL {
        return fail(format!(
            "boundary branch image starts at {} rather than a = {a}",
            b0.image_lo
        ));
    }
    if b0.image_hi >= c {
        return fail(format!(
            "lateral critical image {} lands at or right of c = {c}",
            b0.image_hi
        ));
    }
    for br in &left {
        if !br.onto && br.sub_hi != c {
            return fail(format!(
                "unexpected partial branch [{}, {}] with image [{}, {}]",
                br.sub_lo, br.sub_hi, br.image_lo, br.image_hi
            ));
        }
    }

    let alpha = i_a.sub_hi;
    let i_a = (*i_a).clone();
    let mut branches: Vec<ReturnBranch> =
        left.into_iter().filter(|br| br.onto).cloned().collect();
    // Boundary state: (t_n, c), composed itinerary, image anchored at a.
    let mut bd_sub_lo = b0.sub_lo;
    let mut bd_time = b0.return_time;
    let mut bd_it = b0.itinerary;
    let mut bd_img_hi = b0.image_hi;
    let mut depth_reached = 0usize;
    let mut depth_exhausted = depth_cap > 0 || (c - bd_sub_lo) >= BOUNDARY_CONVERGED;

    'induction: for _ in 0..depth_cap {
        depth_exhausted = true;
        // Compose through the a-adjacent branch until the image escapes
        // (a, alpha). The image lower endpoint stays anchored at a because
        // a is a fixed point of the a-adjacent return branch.
        let mut h = bd_img_hi;
        let mut hops = 0usize;
        while h <= alpha {
            if hops >= MAX_HOPS {
                return fail(
                    "boundary image trapped in the a-adjacent branch: attracting behavior at a"
                        .into(),
                );
            }
            h = eval_itin(map, &i_a.itinerary, h);
            hops += 1;
        }
        if h >= c {
            return fail(format!(
                "lateral critical orbit landed at {h}, at or right of c = {c}"
            ));
        }
        // Find the enumerated piece containing the landing.
        enum Straddler {
            Boundary,
            Branch(usize),
        }
        let straddler = if bd_sub_lo < h {
            Straddler::Boundary
        } else if let Some(i) = branches
            .iter()
            .position(|br| br.sub_lo < h && h < br.sub_hi)
        {
            Straddler::Branch(i)
        } else {
            // Landing in a gap not enumerated within max_time: cannot
            // continue the induction honestly.
            break 'induction;
        };

        // Composition mapping the boundary piece onto (a, h).
        let mut g_it = bd_it.clone();
        for _ in 0..hops {
            g_it.extend_from_slice(&i_a.itinerary);
        }
        let g_time = bd_time + hops * i_a.return_time;
        let pull = |z: f64| pull_back(map, &g_it, bd_sub_lo, c, z);

        // Pull every full branch inside (a, h) back into the boundary piece.
        let mut emitted: Vec<ReturnBranch> = Vec::new();
        for br in &branches {
            if br.sub_hi <= h {
                let (Some(w_lo), Some(w_hi)) = (pull(br.sub_lo), pull(br.sub_hi)) else {
                    continue;
                };
                if w_lo < w_hi {
                    let mut it = g_it.clone();
                    it.extend_from_slice(&br.itinerary);
                    emitted.push(ReturnBranch {
                        sub_lo: w_lo,
                        sub_hi: w_hi,
                        return_time: g_time + br.return_time,
                        image_lo: br.image_lo,
                        image_hi: br.image_hi,
                        onto: br.onto,
                        itinerary: it,
                    });
                }
            }
        }
        // The landed piece becomes the next boundary.
        let (p_sub_lo, p_time, p_it, p_img_lo): (f64, usize, Vec<usize>, f64) = match straddler {
            Straddler::Boundary => (bd_sub_lo, bd_time, bd_it.clone(), a),
            Straddler::Branch(i) => {
                let br = &branches[i];
                (br.sub_lo, br.return_time, br.itinerary.clone(), br.image_lo)
            }
        };
        let Some(t_next) = pull(p_sub_lo) else {
            break 'induction;
        };
        let new_img_hi = eval_itin(map, &p_it, h);
        if new_img_hi >= c || new_img_hi <= a {
            return fail(format!(
                "lateral critical orbit left (a, c) at {new_img_hi} during induction"
            ));
        }
        let _ = p_img_lo; // anchored at a by the full-branch invariant
        bd_it = g_it;
        bd_it.extend_from_slice(&p_it);
        bd_time = g_time + p_time;
        bd_sub_lo = t_next;
        bd_img_hi = new_img_hi;
        branches.extend(emitted);
        depth_reached += 1;
        if (c - bd_sub_lo) < BOUNDARY_CONVERGED {
            depth_exhausted = false;
            break 'induction;
        }
    }
    if depth_cap == 0 {
        depth_exhausted = (c - bd_sub_lo) >= BOUNDARY_CONVERGED;
    }

    branches.sort_by(|x, y| x.sub_lo.partial_cmp(&y.sub_lo).unwrap());
    let coverage_measure = branches
        .iter()
        .map(|br| br.sub_hi - br.sub_lo)
        .sum::<f64>()
        / (b - a);
    Ok(InducedMap {
        base: interval,
        branches,
        depth_reached,
        boundary: PendingBranch {
            sub_lo: bd_sub_lo,
            sub_hi: c,
            elapsed: bd_time,
            image_lo: a,
            image_hi: bd_img_hi,
        },
        depth_exhausted,
        coverage_measure,
    })
}
