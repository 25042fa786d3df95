use proptest::prelude::*;
use ridgelab_core::advection::*;
use ridgelab_core::frame::{WeightRule, WindowBank, BankSpec};
use ridgelab_core::geometry::{Direction, Point};
use ridgelab_core::grid::{japanese, GridFunction, GridSpec};
use ridgelab_core::xform::{analyze, hs_norm_via_weights};
use ridgelab_core::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

fn gauss(x: Point) -> f64 {
    (-PI * (x[0] * x[0] + x[1] * x[1])).exp()
}

fn wobbly() -> AbsorptionField {
    AbsorptionField { kappa: Arc::new(|x: Point| 1.0 + 0.5 * (x[0] * x[1]).sin().powi(2)), gamma: 1.0 }
}

fn max_interior_error(u: &GridFunction, exact: impl Fn(Point) -> f64, radius: f64) -> f64 {
    (0..u.spec.len())
        .filter(|&i| {
            let x = u.spec.point(i);
            x[0].abs() < radius && x[1].abs() < radius
        })
        .map(|i| (u.values[i].re - exact(u.spec.point(i))).abs())
        .fold(0.0, f64::max)
}

#[test]
fn closed_form_case() {
    // κ ≡ 1, s = e₁, f = H(x₁) e^{-x₁} g(x₂)  ⇒  u = g(x₂) H(x₁) x₁ e^{-x₁}
    let grid = GridSpec::new(2.0, 512).unwrap();
    let g = |y: f64| (-3.0 * y * y).exp();
    let src = MutilatedFunction {
        f0: Arc::new(|_| 0.0),
        parts: vec![(Arc::new(move |x: Point| (-x[0]).exp() * g(x[1])), Hyperplane { n: Direction::e1(), v: 0.0 })],
    };
    let u = solve(Source::Mutilated(&src), &AbsorptionField::constant(1.0), &Direction::e1(), grid, SolveOptions::default())
        .unwrap();
    let exact = |x: Point| if x[0] > 0.0 { g(x[1]) * x[0] * (-x[0]).exp() } else { 0.0 };
    let err = max_interior_error(&u, exact, f64::INFINITY);
    assert!(err <= 1e-4, "{err:e}");
}

#[test]
fn manufactured_round_trip_and_residual() {
    let grid = GridSpec::new(2.0, 512).unwrap();
    let kap = wobbly();
    for s in [Direction::e1(), Direction::from_angle(0.4)] {
        let k = kap.kappa.clone();
        // f = A u for u = e^{-π|x|²}: s·∇u = -2π (s·x) u
        let f = MutilatedFunction::smooth(Arc::new(move |x: Point| (-2.0 * PI * s.dot(&x) + k(x)) * gauss(x)));
        let u = solve(Source::Mutilated(&f), &kap, &s, grid, SolveOptions::default()).unwrap();
        let err = max_interior_error(&u, gauss, 1.5);
        assert!(err <= 1e-4, "manufactured {err:e}");
        let fg = GridFunction::from_real(grid, |x| f.eval(x));
        let res = apply_a(&u, &kap, &s).sub(&fg).l2_norm() / fg.l2_norm();
        assert!(res <= 5e-3, "residual {res:e}");
    }
}

#[test]
fn apply_a_examples() {
    let grid = GridSpec::new(4.0, 128).unwrap();
    let one = AbsorptionField::constant(1.0);
    let c = GridFunction::from_real(grid, |_| 2.5);
    let out = apply_a(&c, &one, &Direction::from_angle(1.1));
    assert!(out.sub(&c).max_abs() <= 1e-12);
    let u = GridFunction::from_real(grid, gauss);
    let du = apply_a(&u, &one, &Direction::e1());
    let err = max_interior_error(&du, |x| (1.0 - 2.0 * PI * x[0]) * gauss(x), 3.0);
    assert!(err <= 1e-8, "{err:e}");
}

#[test]
fn zero_source_gives_zero() {
    let grid = GridSpec::new(2.0, 64).unwrap();
    let z = GridFunction::zeros(grid);
    for s in [Direction::e1(), Direction::from_angle(2.0)] {
        let u = solve(Source::Grid(&z), &wobbly(), &s, grid, SolveOptions::default()).unwrap();
        assert_eq!(u.max_abs(), 0.0);
    }
    assert_eq!(decay_envelope_check(&z, 2), 0.0);
}

#[test]
fn field_validation() {
    let grid = GridSpec::new(2.0, 32).unwrap();
    let z = GridFunction::zeros(grid);
    let bad = AbsorptionField { kappa: Arc::new(|_| 1.0), gamma: 0.0 };
    assert!(matches!(
        solve(Source::Grid(&z), &bad, &Direction::e1(), grid, SolveOptions::default()),
        Err(AdvectionError::Ellipticity(_))
    ));
    let dip = AbsorptionField { kappa: Arc::new(|x: Point| 1.0 - 0.5 * x[0]), gamma: 0.8 };
    assert!(matches!(
        solve(Source::Grid(&z), &dip, &Direction::e1(), grid, SolveOptions::default()),
        Err(AdvectionError::Inconsistent { .. })
    ));
    let other = GridFunction::zeros(GridSpec::new(2.0, 64).unwrap());
    assert!(solve(Source::Grid(&other), &wobbly(), &Direction::e1(), grid, SolveOptions::default()).is_err());
}

#[test]
fn decay_envelope_examples_and_stability() {
    let grid = GridSpec::new(4.0, 64).unwrap();
    let u = GridFunction::from_real(grid, |x| japanese(x).powi(-4));
    assert!((decay_envelope_check(&u, 2) - 1.0).abs() <= 1e-12);
    let mut consts = Vec::new();
    for n in [256, 512] {
        let grid = GridSpec::new(2.0, n).unwrap();
        let f = GridFunction::from_real(grid, gauss);
        let u = solve(Source::Grid(&f), &AbsorptionField::constant(1.0), &Direction::from_angle(0.3), grid, SolveOptions::default())
            .unwrap();
        consts.push(decay_envelope_check(&u, 2));
    }
    assert!(consts[0].is_finite() && consts[0] > 0.0);
    assert!((consts[1] / consts[0] - 1.0).abs() <= 1e-2, "{consts:?}");
}

#[test]
fn jumps_stay_on_the_source_hyperplane() {
    // planes parallel to s with s·n ≤ 0 and n₁ < 0
    let grid = GridSpec::new(2.0, 512).unwrap();
    let h = grid.h();
    for theta in [PI / 2.0, 0.4] {
        let s = Direction::from_angle(theta);
        let n = Direction::from_angle(theta + PI / 2.0);
        assert!(n.x() < 0.0 && s.dot(&n.components()).abs() < 1e-12);
        let plane = Hyperplane { n, v: 0.13 };
        let src = MutilatedFunction {
            f0: Arc::new(|x: Point| 0.2 * gauss(x)),
            parts: vec![(Arc::new(|x: Point| (-2.0 * (x[0] * x[0] + x[1] * x[1])).exp()), plane)],
        };
        let u = solve(Source::Mutilated(&src), &AbsorptionField::constant(1.0), &s, grid, SolveOptions::default()).unwrap();
        // 2h keeps every bilinear stencil on one side of the plane
        let eps = 2.0 * h;
        let at = |p: Point, d: Direction, t: f64| bilinear(&u, [p[0] + t * d.x(), p[1] + t * d.y()]);
        let diff = |p: Point, d: Direction| (at(p, d, eps) - at(p, d, -eps)).abs();
        let base = [0.13 * n.x(), 0.13 * n.y()];
        let mut worst_ratio = f64::INFINITY;
        let mut jump = f64::INFINITY;
        for t in [-0.2, -0.1, 0.0, 0.1, 0.2] {
            let p = [base[0] + t * s.x(), base[1] + t * s.y()];
            let across = diff(p, n);
            let along = [eps, -eps]
                .iter()
                .map(|&o| diff([p[0] + o * n.x(), p[1] + o * n.y()], s))
                .fold(0.0, f64::max);
            worst_ratio = worst_ratio.min(across / along);
            jump = jump.min(across);
        }
        assert!(worst_ratio >= 10.0, "theta {theta}: ratio {worst_ratio}");
        // off the plane the same stencil sees no jump
        for off in [-0.5, -0.25, 0.35, 0.6] {
            for t in [-0.2, 0.0, 0.2] {
                let p = [base[0] + off * n.x() + t * s.x(), base[1] + off * n.y() + t * s.y()];
                assert!(diff(p, n) * 10.0 <= jump, "theta {theta}: off-plane {off}, {t}: {} vs {jump}", diff(p, n));
            }
        }
    }
}

#[test]
fn flipped_representation_gives_same_solution() {
    let grid = GridSpec::new(2.0, 128).unwrap();
    let s = Direction::from_angle(0.7);
    let src = MutilatedFunction {
        f0: Arc::new(|x: Point| 0.5 * gauss(x)),
        parts: vec![(Arc::new(|x: Point| x[1] * gauss(x)), Hyperplane { n: Direction::from_angle(2.9), v: 0.071 })],
    };
    let k = wobbly();
    let a = solve(Source::Mutilated(&src), &k, &s, grid, SolveOptions::default()).unwrap();
    let b = solve(Source::Mutilated(&src.flip_part(0)), &k, &s, grid, SolveOptions::default()).unwrap();
    assert!(a.sub(&b).max_abs() <= 1e-10 * a.max_abs(), "{:e}", a.sub(&b).max_abs());
}

#[test]
fn fourier_split_identity() {
    let g = |x: Point| gauss(x);
    let errs: Vec<f64> =
        [128, 256, 512].iter().map(|&n| fourier_split_check(&g, &Direction::e1(), 0.0, GridSpec::new(2.0, n).unwrap())).collect();
    assert!(errs[1] <= 5e-2, "{errs:?}");
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    let zero = |_: Point| 0.0;
    assert_eq!(fourier_split_check(&zero, &Direction::e1(), 0.0, GridSpec::new(2.0, 64).unwrap()), 0.0);
}

#[test]
fn weighted_norm_of_solutions_stays_in_bracket() {
    let grid = GridSpec::new(4.0, 128).unwrap();
    let bank = WindowBank::build(BankSpec::new(5), grid).unwrap();
    for i in 0..10 {
        let a = [1.0, 2.0, 4.0, 8.0, 1.5][i % 5];
        let c = [0.3 * (i as f64).sin(), -0.2 * (i as f64).cos()];
        let s = Direction::from_angle(0.37 * i as f64);
        let kap = if i % 2 == 0 { AbsorptionField::constant(1.0) } else { wobbly() };
        let f = GridFunction::from_real(grid, |x| (-a * ((x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2))).exp());
        let u = solve(Source::Grid(&f), &kap, &s, grid, SolveOptions::default()).unwrap();
        let r = hs_norm_via_weights(&analyze(&u, &bank).unwrap(), &WeightRule { s }) / f.l2_norm();
        assert!((0.1..=10.0).contains(&r), "function {i}: {r}");
    }
}

#[test]
fn mutilated_evaluation() {
    let m = MutilatedFunction::smooth(Arc::new(gauss));
    assert_eq!(eval_mutilated(&m, [0.3, 0.1]), gauss([0.3, 0.1]));
    let step = MutilatedFunction {
        f0: Arc::new(|_| 0.0),
        parts: vec![(Arc::new(|_| 1.0), Hyperplane { n: Direction::e1(), v: 0.0 })],
    };
    assert_eq!(eval_mutilated(&step, [1.0, 0.0]), 1.0);
    assert_eq!(eval_mutilated(&step, [0.0, 0.5]), 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn solve_and_apply_are_linear(theta in 0.0f64..(2.0 * PI), a in -2.0f64..2.0, b in -2.0f64..2.0, c0 in -0.3f64..0.3) {
        let grid = GridSpec::new(2.0, 64).unwrap();
        let s = Direction::from_angle(theta);
        let k = wobbly();
        let f = GridFunction::from_real(grid, |x| gauss([x[0] - c0, x[1]]));
        let g = GridFunction::from_real(grid, |x| x[0] * gauss([x[0], x[1] + c0]));
        let (ca, cb) = (Complex64::new(a, 0.0), Complex64::new(b, 0.0));
        let comb = f.scale(ca).add(&g.scale(cb));
        let opts = SolveOptions::default();
        let lhs = solve(Source::Grid(&comb), &k, &s, grid, opts).unwrap();
        let rhs = solve(Source::Grid(&f), &k, &s, grid, opts).unwrap().scale(ca)
            .add(&solve(Source::Grid(&g), &k, &s, grid, opts).unwrap().scale(cb));
        prop_assert!(lhs.sub(&rhs).max_abs() <= 1e-12 * (1.0 + rhs.max_abs()));
        let al = apply_a(&comb, &k, &s);
        let ar = apply_a(&f, &k, &s).scale(ca).add(&apply_a(&g, &k, &s).scale(cb));
        prop_assert!(al.sub(&ar).max_abs() <= 1e-12 * (1.0 + ar.max_abs()));
    }
}
