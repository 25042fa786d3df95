use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ridgelab_core::frame::{build_window_bank, WeightRule, WindowBank, SIGMA_DEFAULT};
use ridgelab_core::geometry::Direction;
use ridgelab_core::grid::{GridFunction, GridSpec};
use ridgelab_core::seqspace::*;
use ridgelab_core::xform::{analyze, synthesize};
use std::sync::OnceLock;

fn bank() -> &'static WindowBank {
    static B: OnceLock<WindowBank> = OnceLock::new();
    B.get_or_init(|| build_window_bank(3, GridSpec::new(2.0, 32).unwrap(), SIGMA_DEFAULT).unwrap())
}

fn bumpy(grid: GridSpec, seed: u64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b, t): (f64, f64, f64) = (rng.random_range(1.0..6.0), rng.random_range(-0.5..0.5), rng.random_range(0.0..3.0));
    GridFunction::from_real(grid, |x| {
        let g = (-a * (x[0] * x[0] + x[1] * x[1])).exp();
        if x[0] * t.cos() + x[1] * t.sin() > b {
            g
        } else {
            0.3 * g
        }
    })
}

#[test]
fn power_law_examples() {
    for p in [0.5, 1.0, 2.0 / 3.0, 1.7] {
        let seq: Vec<f64> = (1..=10_000).map(|n| (n as f64).powf(-1.0 / p)).collect();
        let w = weak_lp_norm(&rearrange(&seq), p).unwrap();
        assert!((w - 1.0).abs() <= 1e-12, "p={p}: {w}");
    }
    let sq: Vec<f64> = (1..=1000).map(|n| (n as f64).powi(-2)).collect();
    let fit = fit_decay_exponent(&rearrange(&sq), (10, 1000)).unwrap();
    assert!((fit.slope + 2.0).abs() < 1e-12);
    assert!((fit.p_hat.unwrap() - 0.5).abs() < 1e-12);
    let flat = fit_decay_exponent(&rearrange(&[0.7; 50]), (1, 50)).unwrap();
    assert!(!flat.decaying());
    assert!(fit_decay_exponent(&rearrange(&sq), (10, 15)).is_err());
    assert_eq!(weak_lp_norm(&rearrange(&[]), 1.0).unwrap(), 0.0);
    assert_eq!(lorentz_norm(&rearrange(&[]), 1.0, 2.0).unwrap(), 0.0);
    assert!(lorentz_norm(&rearrange(&[1.0]), 0.0, 1.0).is_err());
}

#[test]
fn rearrangement_examples() {
    let r = rearrange(&[0.1, 3.0, 2.0]);
    assert_eq!(r.values, vec![3.0, 2.0, 0.1]);
    let tie = rearrange(&[1.0, -1.0, 1.0]);
    assert_eq!(tie.perm, vec![0, 1, 2]);
}

#[test]
fn nterm_endpoints_and_monotonicity() {
    let b = bank();
    let f = bumpy(b.grid, 9);
    let c = analyze(&f, b).unwrap();
    let total = c.len();
    let mut ns = vec![0usize];
    ns.extend(log_sizes(0, 10, 3));
    ns.push(total);
    ns.push(total + 10);
    let rule = WeightRule { s: Direction::from_angle(0.4) };
    let curve = nterm_error_curve(&c, b, &f, NtermNorm::L2, Some(&rule), &ns).unwrap();
    assert!((curve[0].error_l2 - f.l2_norm()).abs() <= 1e-12 * f.l2_norm());
    let residual = synthesize(&c, b).unwrap().sub(&f).l2_norm();
    let last = curve[curve.len() - 2];
    assert!((last.error_l2 - residual).abs() <= 1e-10 * f.l2_norm());
    assert_eq!(last.error_hs, 0.0);
    assert_eq!(curve[curve.len() - 1].error_l2, last.error_l2);
    assert!(nterm_error_curve(&c, b, &f, NtermNorm::L2, None, &[5, 3]).is_err());
}

#[test]
fn slopes_of_an_exact_power_law() {
    let curve: Vec<CurvePoint> = log_sizes(2, 10, 2)
        .into_iter()
        .map(|n| CurvePoint { n, error_l2: (n as f64).powf(-0.75), error_hs: 0.0 })
        .collect();
    for (_, s) in local_slopes(&curve) {
        assert!((s + 0.75).abs() < 1e-2, "{s}");
    }
    assert!((slope_at(&curve, 64).unwrap() + 0.75).abs() < 1e-2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rearrangement_is_a_sorted_permutation(v in prop::collection::vec(-1e3f64..1e3, 0..200)) {
        let r = rearrange(&v);
        let mut seen = r.perm.clone();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..v.len()).collect::<Vec<_>>());
        for (i, &p) in r.perm.iter().enumerate() {
            prop_assert_eq!(r.values[i], v[p].abs());
        }
        prop_assert!(r.values.windows(2).all(|w| w[0] >= w[1]));
        let direct = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!((r.l2_norm() - direct).abs() <= 1e-14 * direct.max(1.0));
        prop_assert_eq!(rearrange(&r.values).values, r.values.clone());
    }

    #[test]
    fn lorentz_diagonal_is_plain_lp(v in prop::collection::vec(-10.0f64..10.0, 1..300), p in 0.3f64..4.0) {
        let r = rearrange(&v);
        let plain = v.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p);
        let l = lorentz_norm(&r, p, p).unwrap();
        prop_assert!((l - plain).abs() <= 1e-12 * plain.max(1e-300), "{l} vs {plain}");
    }

    #[test]
    fn weak_norm_is_dominated(v in prop::collection::vec(0.0f64..10.0, 1..300), p in 0.3f64..3.0, q in 0.3f64..6.0) {
        // c*_n^q Σ_{m≤n} m^{q/p-1} ≤ ‖c‖^q and that sum is ≥ min(1, p/q) n^{q/p}
        let r = rearrange(&v);
        let weak = weak_lp_norm(&r, p).unwrap();
        let lq = lorentz_norm(&r, p, q).unwrap();
        let c = (q / p).max(1.0).powf(1.0 / q);
        prop_assert!(weak <= c * lq * (1.0 + 1e-12), "{weak} vs {c}·{lq}");
        prop_assert_eq!(lorentz_norm(&r, p, f64::INFINITY).unwrap(), weak);
    }

    #[test]
    fn power_laws_order_by_second_index(s in 0.2f64..2.0, p in 0.3f64..3.0, q1 in 0.3f64..3.0, dq in 0.0f64..3.0) {
        // c_n = n^{-1/p - s} is in every ℓ^{p,q}; ‖·‖_{p,q2} ≤ C ‖·‖_{p,q1} for q1 ≤ q2
        let q2 = q1 + dq;
        let seq: Vec<f64> = (1..=2000).map(|n| (n as f64).powf(-1.0 / p - s)).collect();
        let r = rearrange(&seq);
        let a = lorentz_norm(&r, p, q1).unwrap();
        let b = lorentz_norm(&r, p, q2).unwrap();
        let c = (q1 / p).max(1.0).powf(1.0 / q1);
        prop_assert!(b <= c * a * (1.0 + 1e-12), "{b} vs {c}·{a}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn nterm_error_never_increases(seed in 0u64..10_000, hs in any::<bool>()) {
        let b = bank();
        let f = bumpy(b.grid, seed);
        let c = analyze(&f, b).unwrap();
        let rule = WeightRule { s: Direction::from_angle(seed as f64) };
        let norm = if hs { NtermNorm::Hs(rule) } else { NtermNorm::L2 };
        // thresholding a redundant frame can wobble by ~0.1% between nearby N,
        // so sizes are log-spaced as in the experiments
        let mut ns = vec![0usize];
        ns.extend(log_sizes(0, 11, 4));
        let curve = nterm_error_curve(&c, b, &f, norm, None, &ns).unwrap();
        let rt = synthesize(&c, b).unwrap().sub(&f).l2_norm();
        for w in curve.windows(2) {
            prop_assert!(w[1].error_hs <= w[0].error_hs);
            if !hs {
                prop_assert!(w[1].error_l2 <= w[0].error_l2 * (1.0 + 1e-12), "{:?}", w);
            }
        }
        // ‖f - f_N‖ ≤ ‖f - SAf‖ + ‖S(tail)‖, with frame bound 1 + defect
        if !hs {
            let defect = (c.norm_sqr() / f.l2_norm().powi(2) - 1.0).abs();
            for p in &curve {
                prop_assert!(p.error_l2 <= rt + p.error_hs * (1.0 + defect).sqrt() + 1e-12);
            }
        }
    }
}
