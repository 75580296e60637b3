use hypotest_core::*;
use proptest::prelude::*;

fn simplex(weights: &[f64]) -> Vec<f64> {
    let total: f64 = weights.iter().sum();
    weights.iter().map(|w| w / total).collect()
}

fn discrete_pair() -> impl Strategy<Value = Pair> {
    (2_usize..=4)
        .prop_flat_map(|k| (proptest::collection::vec(0.05_f64..1.0, k), proptest::collection::vec(0.05_f64..1.0, k)))
        .prop_map(|(a, b)| Pair::discrete(simplex(&a), simplex(&b)).unwrap())
}

fn bernoulli_pair() -> impl Strategy<Value = Pair> {
    (0.05_f64..0.95, 0.005_f64..0.3, any::<bool>()).prop_filter_map("in range", |(p, d, up)| {
        let q = if up { p + d } else { p - d };
        (q > 0.0 && q < 1.0).then(|| Pair::bernoulli(p, q).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn q_is_decreasing_and_symmetric(x in -30.0_f64..30.0, h in 1e-6_f64..3.0) {
        let a = q_function(x).unwrap();
        let b = q_function(x + h).unwrap();
        prop_assert!(b <= a);
        prop_assert!((a + q_function(-x).unwrap() - 1.0).abs() <= 1e-15);
        prop_assert!(log_q_function(x + h) <= log_q_function(x));
    }

    #[test]
    fn q_inverse_log_round_trips(log_p in -5.0e5_f64..-1e-9) {
        let x = q_inverse_log(log_p).unwrap();
        let back = log_q_function(x);
        prop_assert!((back - log_p).abs() <= 1e-10 * log_p.abs().max(1.0), "{} vs {}", back, log_p);
    }

    #[test]
    fn log_sum_exp_matches_naive(xs in proptest::collection::vec(-50.0_f64..50.0, 1..20)) {
        let naive = xs.iter().map(|x| x.exp()).sum::<f64>().ln();
        let got = log_sum_exp(&xs).unwrap();
        prop_assert!((got - naive).abs() <= 1e-12 * naive.abs().max(1.0));
        let shifted: Vec<f64> = xs.iter().map(|x| x - 2000.0).collect();
        prop_assert!((log_sum_exp(&shifted).unwrap() - (got - 2000.0)).abs() <= 1e-9);
    }

    #[test]
    fn renyi_is_nondecreasing_in_order(pair in discrete_pair(), a in 0.05_f64..8.0, b in 0.05_f64..8.0) {
        prop_assume!((a - 1.0).abs() > 1e-6 && (b - 1.0).abs() > 1e-6);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        for dir in [Direction::Forward, Direction::Reverse] {
            let x = pair.renyi_divergence(lo, dir).unwrap();
            let y = pair.renyi_divergence(hi, dir).unwrap();
            prop_assert!(x >= -1e-15);
            prop_assert!(x <= y + 1e-12, "D_{} = {} > D_{} = {}", lo, x, hi, y);
        }
    }

    #[test]
    fn renyi_tends_to_kl(pair in discrete_pair()) {
        for dir in [Direction::Forward, Direction::Reverse] {
            let kl = pair.kl_divergence(dir);
            for h in [1e-7, -1e-7] {
                let d = pair.renyi_divergence(1.0 + h, dir).unwrap();
                prop_assert!((d - kl).abs() <= 1e-6 * kl.max(1e-3), "{} vs {}", d, kl);
            }
        }
    }

    #[test]
    fn tensorization(pair in discrete_pair(), n in 2_u32..=4, idx in 0_usize..4) {
        let lambda = [0.3, 0.7, 2.0, 5.0][idx];
        let product = pair.n_fold_product(n).unwrap();
        for dir in [Direction::Forward, Direction::Reverse] {
            let single = pair.renyi_divergence(lambda, dir).unwrap();
            let joint = product.renyi_divergence(lambda, dir).unwrap();
            prop_assert!((joint - n as f64 * single).abs() <= 1e-10);
        }
    }

    #[test]
    fn hellinger_and_bhattacharyya_agree(pair in discrete_pair()) {
        let h2 = pair.hellinger_squared();
        prop_assert!((0.0..=1.0).contains(&h2));
        prop_assert!(((-h2).ln_1p() - pair.log_bhattacharyya()).abs() <= 1e-14);
        // D_{1/2} = -2 log(1 - H^2)
        let d_half = pair.renyi_divergence(0.5, Direction::Forward).unwrap();
        prop_assert!((d_half + 2.0 * pair.log_bhattacharyya()).abs() <= 1e-12);
    }

    #[test]
    fn maximize_beats_random_points(a in 0.1_f64..10.0, b in -5.0_f64..5.0, probes in proptest::collection::vec(0.0_f64..1.0, 8)) {
        // Concave with interior peak at 1 + a on (1, inf).
        let f = |x: f64| -(x - 1.0 - a).powi(2) + b * (x - 1.0).ln();
        let bracket = Bracket::unbounded_above(1.0).unwrap();
        let m = maximize_scalar(f, &bracket).unwrap();
        for p in probes {
            let x = 1.0 + 1e-6 + 50.0 * p;
            prop_assert!(m.value >= f(x) - 1e-12);
        }
        let bounded = Bracket::open(0.0, 1.0).unwrap();
        let g = |x: f64| (x * (1.0 - x)).ln() + b * x;
        let m = maximize_scalar(g, &bounded).unwrap();
        for p in [0.01, 0.3, 0.5, 0.7, 0.99] {
            prop_assert!(m.value >= g(p) - 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn lower_bounds_are_sound_for_bernoulli(pair in bernoulli_pair(), n in 1_u64..400, log_eps in -25.0_f64..-0.01) {
        let exact = np_exact_bernoulli(&pair, n, log_eps, true).unwrap();
        let bounds = [
            renyi_converse(&pair, n, log_eps),
            fano_bound(&pair, n, log_eps),
            hellinger_bound(&pair, n, log_eps),
            berry_esseen_bound(&pair, n, log_eps, None),
        ];
        for (name, b) in ["renyi", "fano", "hellinger", "berry_esseen"].iter().zip(bounds) {
            if b.valid {
                prop_assert!(b.value <= exact.beta + 1e-12, "{}: {} > {}", name, b.value, exact.beta);
            }
        }
    }

    #[test]
    fn lower_bounds_are_sound_for_gaussian(delta in 0.01_f64..1.0, n in 1_u64..3000, log_eps in -60.0_f64..-0.01) {
        let pair = Pair::gaussian_unit(2.0, delta).unwrap();
        let exact = np_exact_gaussian(&pair, n, log_eps).unwrap();
        let bounds = [
            renyi_converse(&pair, n, log_eps),
            fano_bound(&pair, n, log_eps),
            hellinger_bound(&pair, n, log_eps),
            berry_esseen_bound(&pair, n, log_eps, None),
            smoothing_out_bound(&pair, n, log_eps, None).unwrap(),
        ];
        for b in bounds {
            if b.valid {
                prop_assert!(b.log_value <= exact.log_beta + 1e-12 * exact.log_beta.abs().max(1.0),
                    "{} > {}", b.log_value, exact.log_beta);
            }
        }
    }

    #[test]
    fn phase_achievability_is_sound(pair in bernoulli_pair(), n in 1_u64..600, frac in 0.05_f64..0.95) {
        let c = frac * pair.kl_divergence(Direction::Reverse);
        let upper = phase_transition_achievability(&pair, n, c).unwrap();
        let exact = np_exact_bernoulli(&pair, n, -(n as f64) * c, true).unwrap();
        prop_assert!(exact.beta <= upper.value + 1e-12);
    }

    #[test]
    fn bruteforce_matches_bernoulli(pair in bernoulli_pair(), n in 1_u32..=14, log_eps in -20.0_f64..-0.01) {
        let a = np_exact_bernoulli(&pair, n as u64, log_eps, true).unwrap();
        let b = np_exact_discrete_bruteforce(&pair, n, log_eps).unwrap();
        prop_assert!((a.beta - b.beta).abs() <= 1e-12, "{} vs {}", a.beta, b.beta);
        prop_assert!(b.achieved_alpha <= log_eps.exp() + 1e-12);
    }

    #[test]
    fn bruteforce_beats_random_tests(pair in discrete_pair(), n in 1_u32..=5, eps in 0.001_f64..0.5,
                                     phis in proptest::collection::vec(0.0_f64..1.0, 1024)) {
        let exact = np_exact_discrete_bruteforce(&pair, n, eps.ln()).unwrap();
        let product = pair.n_fold_product(n).unwrap();
        let Family::FiniteDiscrete { p0, p1 } = product.family() else { unreachable!() };
        let phi: Vec<f64> = phis.iter().cycle().take(p0.len()).copied().collect();
        let alpha: f64 = p0.iter().zip(&phi).map(|(p, f)| p * f).sum();
        let scale = if alpha > eps { eps / alpha } else { 1.0 };
        let beta: f64 = p1.iter().zip(&phi).map(|(q, f)| q * (1.0 - scale * f)).sum();
        prop_assert!(exact.beta <= beta + 1e-12);
    }
}

#[test]
fn achievability_never_undercuts_the_optimal_test() {
    let pair = Pair::gaussian_unit(2.0, 0.3).unwrap();
    let d = pair.kl_divergence(Direction::Reverse);
    for n in [10_u64, 100, 1000] {
        for frac in [0.1, 0.5, 0.9] {
            let c = frac * d;
            let upper = phase_transition_achievability(&pair, n, c).unwrap();
            let exact = np_exact_gaussian(&pair, n, -(n as f64) * c).unwrap();
            assert!(exact.beta <= upper.value + 1e-12);
        }
    }
}
