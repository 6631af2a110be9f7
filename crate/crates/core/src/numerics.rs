//! Small numeric helpers shared across the crate: monotone root bracketing,
//! bisection, and Hausdorff distances between finite point sets.

/// Width below which pullback brackets are treated as degenerate by callers
/// that prune structure (bisection itself runs to machine precision, since
/// expanding compositions amplify any domain slack into image error).
pub const BISECTION_TOL: f64 = 1e-12;

/// Bisect a continuous function with a sign change on `[lo, hi]` until the
/// bracket cannot shrink further in f64. Returns the midpoint of the final
/// bracket. The caller guarantees `g(lo)` and `g(hi)` have opposite
/// (non-zero) signs.
pub fn bisect<G: Fn(f64) -> f64>(g: G, mut lo: f64, mut hi: f64) -> f64 {
    let mut glo = g(lo);
    if glo == 0.0 {
        return lo;
    }
    let ghi = g(hi);
    if ghi == 0.0 {
        return hi;
    }
    debug_assert!(
        glo.signum() != ghi.signum(),
        "bisect requires a sign change"
    );
    // A unit-scale bracket exhausts f64 in at most ~64 halvings; the
    // midpoint test exits when the bracket has collapsed to adjacent floats.
    for _ in 0..128 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid);
        if gm == 0.0 {
            return mid;
        }
        if gm.signum() == glo.signum() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solve `g(x) = 0` for strictly monotone `g` on `[lo, hi]`, returning `None`
/// when there is no sign change over the bracket.
pub fn solve_monotone<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64) -> Option<f64> {
    let glo = g(lo);
    let ghi = g(hi);
    if glo == 0.0 {
        return Some(lo);
    }
    if ghi == 0.0 {
        return Some(hi);
    }
    if glo.signum() == ghi.signum() {
        return None;
    }
    Some(bisect(g, lo, hi))
}

/// Directed Hausdorff distance from `a` to `b`; both slices must be sorted.
pub fn directed_hausdorff(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    if b.is_empty() {
        return f64::INFINITY;
    }
    let mut worst: f64 = 0.0;
    let mut j = 0;
    for &x in a {
        while j + 1 < b.len() && b[j + 1] < x {
            j += 1;
        }
        let mut best = (x - b[j]).abs();
        if j + 1 < b.len() {
            best = best.min((b[j + 1] - x).abs());
        }
        worst = worst.max(best);
    }
    worst
}

/// Symmetric Hausdorff distance between two sorted point sets.
pub fn hausdorff(a: &[f64], b: &[f64]) -> f64 {
    directed_hausdorff(a, b).max(directed_hausdorff(b, a))
}
