//! Property-based invariants: randomized checks of the numerical contracts
//! that the unit tests pin only at hand-picked points.

use proptest::prelude::*;

use pwdyn::lateral::{lateral_orbit, lateral_step, omega_estimate, LateralState};
use pwdyn::mapfile::{canonical_json, load_map, save_map};
use pwdyn::returns::TOL_ONTO;
use pwdyn::{
    first_return_map, make_logistic, make_lorenz, BranchForm, LorenzParams, Orientation,
    PiecewiseMap, Side,
};

/// Parameters for the quadratic family, kept away from the degenerate λ → 0
/// end where branch derivatives vanish everywhere.
fn logistic_lambda() -> impl Strategy<Value = f64> {
    1.5f64..=4.0
}

/// Lorenz parameters that always build: exponents above 1, values straddling
/// the discontinuity.
fn lorenz_params() -> impl Strategy<Value = LorenzParams> {
    (1.2f64..=2.8, 0.3f64..=0.49, 0.55f64..=0.95, 0.05f64..=0.45).prop_map(
        |(rho, c, u, v)| LorenzParams {
            c,
            rho_l: rho,
            rho_r: rho,
            u: u.max(c + 0.05),
            v: v.min(c - 0.05),
        },
    )
}

fn central_diff(map: &PiecewiseMap, x: f64, h: f64) -> f64 {
    (map.eval(x + h).unwrap() - map.eval(x - h).unwrap()) / (2.0 * h)
}

/// Distance from x to the nearest branch endpoint of the branch containing
/// it, used as a conditioning guard for finite-difference stencils.
fn margin(map: &PiecewiseMap, x: f64) -> f64 {
    map.branches
        .iter()
        .flat_map(|b| [b.lo, b.hi])
        .map(|e| (x - e).abs())
        .fold(f64::INFINITY, f64::min)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    /// Central differences of eval converge to the analytic derivative at
    /// second order: shrinking h from 1e−4 to 1e−5 divides the error by
    /// ≈ 100 (within a factor of 10) whenever the error is above the
    /// round-off floor.
    #[test]
    fn derivative_matches_central_differences(
        params in lorenz_params(),
        t in 0.02f64..0.98,
    ) {
        let map = make_lorenz(params).unwrap();
        let x = t;
        prop_assume!(margin(&map, x) > 0.05);
        let d1 = map
            .branches
            .iter()
            .find(|b| b.lo <= x && x < b.hi)
            .unwrap()
            .derivative(x, 1);
        let e4 = (central_diff(&map, x, 1e-4) - d1).abs();
        let e5 = (central_diff(&map, x, 1e-5) - d1).abs();
        // Agreement to O(h²) in absolute terms.
        prop_assert!(e4 <= 1e-2 * (1.0 + d1.abs()), "e4 = {e4} at x = {x}");
        if e4 >= 1e-7 {
            let ratio = e4 / e5.max(1e-300);
            prop_assert!(
                (10.0..=1000.0).contains(&ratio),
                "error ratio {ratio} outside [10, 1000] at x = {x} (e4 {e4}, e5 {e5})"
            );
        } else {
            prop_assert!(e5 <= 1e-7, "e5 = {e5} not at round-off floor while e4 = {e4}");
        }
    }

    /// The Schwarzian from analytic derivatives matches a finite-difference
    /// assembly at well-conditioned points (|f'| > 0.1).
    #[test]
    fn schwarzian_matches_finite_differences(
        lambda in logistic_lambda(),
        t in 0.02f64..0.98,
    ) {
        let map = make_logistic(lambda).unwrap();
        let x = t;
        prop_assume!(margin(&map, x) > 0.05);
        let b = map.branches.iter().find(|b| b.lo <= x && x < b.hi).unwrap();
        prop_assume!(b.derivative(x, 1).abs() > 0.1);
        let h = 1e-3;
        let f = |y: f64| map.eval(y).unwrap();
        let (fm2, fm1, f0, fp1, fp2) =
            (f(x - 2.0 * h), f(x - h), f(x), f(x + h), f(x + 2.0 * h));
        let d1 = (fp1 - fm1) / (2.0 * h);
        let d2 = (fp1 - 2.0 * f0 + fm1) / (h * h);
        let d3 = (fp2 - 2.0 * fp1 + 2.0 * fm1 - fm2) / (2.0 * h * h * h);
        let s_fd = d3 / d1 - 1.5 * (d2 / d1) * (d2 / d1);
        let s_an = map.schwarzian(x).unwrap();
        prop_assert!(
            (s_fd - s_an).abs() <= 1e-4 * s_an.abs(),
            "x = {x}: finite-difference {s_fd} vs analytic {s_an}"
        );
    }

    /// The scaled branch form is exactly the affine postcomposition of its
    /// inner form: offset + scale·(inner(x) − anchor), bit for bit.
    #[test]
    fn scaled_form_composes_exactly(
        a in -3.0f64..3.0,
        b in -1.0f64..1.0,
        scale in 0.05f64..4.0,
        offset in -1.0f64..1.0,
        anchor in -1.0f64..1.0,
        x in 0.0f64..1.0,
    ) {
        let inner = BranchForm::Affine { a, b };
        let scaled = BranchForm::Scaled {
            inner: Box::new(inner.clone()),
            scale,
            offset,
            anchor,
        };
        let direct = offset + scale * (inner.eval(x) - anchor);
        prop_assert_eq!(scaled.eval(x).to_bits(), direct.to_bits());
    }

    /// Side tags compose multiplicatively: after k steps the side equals the
    /// start side times the product of the one-sided derivative signs seen
    /// along the orbit.
    #[test]
    fn side_flip_parity_along_orbits(
        lambda in logistic_lambda(),
        x0 in 0.01f64..0.99,
        plus in proptest::bool::ANY,
        k in 1usize..50,
    ) {
        let map = make_logistic(lambda).unwrap();
        let side = if plus { Side::Plus } else { Side::Minus };
        let Ok(mut s) = LateralState::new(x0, side) else {
            return Ok(());
        };
        let mut sign = 1i8;
        for _ in 0..k {
            let d = map.one_sided_derivative(s.coord, s.side).unwrap();
            let step_sign = if d > 0.0 {
                1
            } else if d < 0.0 {
                -1
            } else {
                // At a critical endpoint the branch orientation carries the
                // side information instead of the vanishing derivative.
                let idx = map
                    .branches
                    .iter()
                    .position(|b| b.lo <= s.coord && s.coord <= b.hi)
                    .unwrap();
                match map.branches[idx].orientation {
                    Orientation::Increasing => 1,
                    Orientation::Decreasing => -1,
                }
            };
            let next = match lateral_step(&map, s) {
                Ok(n) => n,
                Err(_) => return Ok(()),
            };
            // Boundary folding at 0 and 1 overrides the flip rule; parity
            // accounting restarts there.
            if next.coord == 0.0 || next.coord == 1.0 {
                return Ok(());
            }
            sign *= step_sign;
            s = next;
        }
        let expected = match (side, sign) {
            (s0, 1) => s0,
            (Side::Plus, _) => Side::Minus,
            (Side::Minus, _) => Side::Plus,
        };
        prop_assert_eq!(s.side, expected, "after {} steps from {}", k, x0);
    }

    /// Lateral orbits are the ε → 0 limits of ordinary orbits displaced to
    /// the tagged side, while the iterate count keeps the Lyapunov growth of
    /// the displacement below the tolerance.
    #[test]
    fn lateral_orbit_is_the_one_sided_limit(
        lambda in logistic_lambda(),
        plus in proptest::bool::ANY,
        k in 1usize..12,
    ) {
        let map = make_logistic(lambda).unwrap();
        let side = if plus { Side::Plus } else { Side::Minus };
        let start = LateralState::new(0.5, side).unwrap();
        let orbit = lateral_orbit(&map, start, k);
        prop_assume!(orbit.states.len() == k + 1);
        // Conditioning guard: no interior iterate too close to the
        // exceptional point (the start itself is exactly on it).
        for s in &orbit.states[1..] {
            prop_assume!((s.coord - 0.5).abs() > 1e-5);
        }
        let target = orbit.states[k].coord;
        let mut best = f64::INFINITY;
        for eps in [1e-6, 1e-8, 1e-10] {
            let mut x = match side {
                Side::Plus => 0.5 + eps,
                Side::Minus => 0.5 - eps,
            };
            let mut ok = true;
            for _ in 0..k {
                match map.eval(x) {
                    Ok(y) => x = y,
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                best = best.min((x - target).abs());
            }
        }
        prop_assert!(best <= 1e-4, "one-sided limit misses by {best} after {k} steps");
    }

    /// Omega covers only grow with a longer tail.
    #[test]
    fn omega_cover_is_monotone_in_tail(
        lambda in 2.5f64..=4.0,
        x0 in 0.05f64..0.95,
        tail in 200usize..1500,
    ) {
        let map = make_logistic(lambda).unwrap();
        let short = omega_estimate(&map, x0, 500, tail, 1e-2);
        let long = omega_estimate(&map, x0, 500, 2 * tail, 1e-2);
        prop_assume!(!short.partial && !long.partial);
        let mut missing = short.cells.iter().filter(|c| !long.cells.contains(c));
        prop_assert!(
            missing.next().is_none(),
            "cells visited by the short tail vanished from the longer one"
        );
    }

    /// Every constructor-produced map passes its own validation grid, and
    /// survives a save/load round trip with its canonical serialization
    /// unchanged.
    #[test]
    fn zoo_maps_validate_and_round_trip(params in lorenz_params()) {
        let map = make_lorenz(params).unwrap();
        prop_assert!(map.validate(64).is_clean());

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("map.json");
        save_map(&map, &path).unwrap();
        let back = load_map(&path).unwrap();
        prop_assert_eq!(canonical_json(&map), canonical_json(&back));
    }

    /// Values stay inside the unit interval on valid zoo maps.
    #[test]
    fn eval_stays_in_the_unit_interval(
        lambda in 0.5f64..=4.0,
        x in 0.0f64..1.0,
    ) {
        let map = make_logistic(lambda).unwrap();
        if let Ok(y) = map.eval(x) {
            prop_assert!((0.0..=1.0).contains(&y), "f({x}) = {y}");
        }
    }

    /// First-return branches are sorted, pairwise disjoint, respect the
    /// announced return time at their midpoint, and image inside the base
    /// interval.
    #[test]
    fn return_branches_are_consistent(
        offsets in (0.01f64..0.2, 0.01f64..0.2),
        max_time in 3usize..7,
    ) {
        let map = make_logistic(4.0).unwrap();
        let (a, b) = (0.2 + offsets.0, 0.45 + offsets.1);
        let frm = first_return_map(&map, (a, b), max_time, TOL_ONTO).unwrap();
        for w in frm.branches.windows(2) {
            prop_assert!(w[0].sub_hi <= w[1].sub_lo + 1e-12, "branches overlap");
        }
        prop_assert!(frm.coverage_measure <= 1.0 + 1e-9);
        for br in &frm.branches {
            prop_assert!(br.return_time >= 1 && br.return_time <= max_time);
            prop_assert!(br.image_lo >= a - 1e-9 && br.image_hi <= b + 1e-9);
            let mid = 0.5 * (br.sub_lo + br.sub_hi);
            let mut x = mid;
            for step in 1..=br.return_time {
                x = map.eval(x).unwrap();
                let inside = a < x && x < b;
                if step < br.return_time {
                    prop_assert!(!inside, "premature return from {mid} at step {step}");
                } else {
                    prop_assert!(inside, "no return from {mid} at step {step}");
                }
            }
        }
    }
}
