use orthant_hup::catalog::{polygauss_random, random_polynomial, SUITE_SPECS};
use orthant_hup::deficits::{additive_from, envelope_search, identity_residual, optimal_alpha_from, rho1_from};
use orthant_hup::domain::{make_extremal, OrthantSpec, ScaledGaussianMeasure, TestField, WeightExponents};
use orthant_hup::functionals::{core_functionals, hardy_constant, hardy_ratio, hup_constant, hup_ratio, Backend};
use orthant_hup::poincare::polynomial_stats;
use orthant_hup::projection::{dist_to_affine_family, dist_to_e};
use orthant_hup::quadrature::QuadConfig;
use orthant_hup::report::fmt17;
use orthant_hup::stability::stability_report;
use proptest::prelude::*;

fn quad() -> QuadConfig {
    QuadConfig::with_order(24)
}

fn spec(i: usize) -> OrthantSpec {
    let (n, k) = SUITE_SPECS[i % SUITE_SPECS.len()];
    OrthantSpec::new(n, k).unwrap()
}

fn field(i: usize, seed: u64) -> TestField {
    polygauss_random(spec(i), seed, 4, 1).unwrap()
}

/// Orthants of dimension at most 2, where quadrature-backed checks are cheap.
fn small_spec(i: usize) -> OrthantSpec {
    let small: Vec<_> = SUITE_SPECS.iter().filter(|(n, _)| *n <= 2).collect();
    let (n, k) = small[i % small.len()];
    OrthantSpec::new(*n, *k).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn additive_deficit_dominates_twice_rho1(i in 0usize..16, seed in 0u64..100_000, alpha in 0.1f64..10.0) {
        let core = core_functionals(&field(i, seed), Backend::Oracle, &quad()).unwrap();
        let additive = additive_from(&core, alpha).unwrap();
        let rho1 = rho1_from(&core);
        let tol = 1e-12 * core.scale();
        prop_assert!(rho1 >= -tol, "rho1 {rho1}");
        prop_assert!(additive >= 2.0 * rho1 - tol, "additive {additive} rho1 {rho1}");
    }

    #[test]
    fn envelope_attains_rho1(i in 0usize..16, seed in 0u64..100_000) {
        let core = core_functionals(&field(i, seed), Backend::Oracle, &quad()).unwrap();
        let rho1 = rho1_from(&core);
        let closed = 0.5 * additive_from(&core, optimal_alpha_from(&core).unwrap()).unwrap();
        prop_assert!((closed - rho1).abs() <= 1e-10 * core.scale());
        prop_assert!((0.5 * envelope_search(&core).value - rho1).abs() <= 1e-9 * core.scale());
    }

    #[test]
    fn sharp_bounds_hold(i in 0usize..16, seed in 0u64..100_000) {
        let f = field(i, seed);
        let s = f.spec();
        prop_assert!(hup_ratio(&f, Backend::Oracle, &quad()).unwrap() >= hup_constant(&s) * (1.0 - 1e-12));
        prop_assert!(hardy_ratio(&f, Backend::Oracle, &quad()).unwrap() >= hardy_constant(&s) * (1.0 - 1e-12));
    }

    #[test]
    fn rho1_is_invariant_under_dilation_and_scales_quadratically(
        i in 0usize..16,
        seed in 0u64..100_000,
        c in 0.1f64..10.0,
        lambda in 0.3f64..3.0,
    ) {
        let f = field(i, seed);
        let base = hup_ratio(&f, Backend::Oracle, &quad()).unwrap();
        let dilated = hup_ratio(&f.dilated(lambda).unwrap(), Backend::Oracle, &quad()).unwrap();
        prop_assert!((dilated - base).abs() <= 1e-10 * base);
        let r = rho1_from(&core_functionals(&f, Backend::Oracle, &quad()).unwrap());
        let rc = rho1_from(&core_functionals(&f.scaled(c), Backend::Oracle, &quad()).unwrap());
        prop_assert!((rc - c * c * r).abs() <= 1e-10 * c * c * r.abs().max(1e-300));
    }

    #[test]
    fn extremals_have_zero_rho1(i in 0usize..16, c in -5.0f64..5.0, beta in 0.05f64..5.0) {
        prop_assume!(c.abs() > 1e-3);
        let core = core_functionals(&make_extremal(spec(i), c, beta).unwrap(), Backend::Oracle, &quad()).unwrap();
        prop_assert!(rho1_from(&core).abs() <= 1e-12 * core.scale());
    }

    #[test]
    fn poincare_quotient_is_at_least_inverse_lambda_squared(
        w in 0usize..3,
        lambda in 0.3f64..3.0,
        seed in 0u64..100_000,
    ) {
        let a = [vec![0.0, 2.0], vec![2.0, 2.0], vec![0.0, 0.0, 2.0]][w].clone();
        let dim = a.len();
        let m = ScaledGaussianMeasure::new(WeightExponents::new(a).unwrap(), lambda).unwrap();
        let p = random_polynomial(dim, 3, seed);
        let s = polynomial_stats(&p, &m).unwrap();
        prop_assume!(!s.is_degenerate());
        prop_assert!(s.dirichlet >= s.variance / (lambda * lambda) * (1.0 - 1e-10));
    }

    #[test]
    fn fmt17_round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
        prop_assert_eq!(fmt17(x).parse::<f64>().unwrap(), x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn identity_residual_vanishes(i in 0usize..8, seed in 0u64..100_000, alpha in 0.25f64..4.0) {
        let f = polygauss_random(small_spec(i), seed, 4, 1).unwrap();
        let core = core_functionals(&f, Backend::Oracle, &quad()).unwrap();
        let r = identity_residual(&f, alpha, Backend::Oracle, &quad()).unwrap();
        prop_assert!(r.abs() <= 1e-8 * (1.0 + additive_from(&core, alpha).unwrap().abs()), "residual {r}");
    }

    #[test]
    fn distances_are_nested_and_stability_holds(i in 0usize..8, seed in 0u64..100_000) {
        let f = polygauss_random(small_spec(i), seed, 4, 1).unwrap();
        let core = core_functionals(&f, Backend::Oracle, &quad()).unwrap();
        let de = dist_to_e(&f, &quad()).unwrap().dist_sq;
        let da = dist_to_affine_family(&f, &quad()).unwrap().dist_sq;
        let tol = 1e-9 * core.scale();
        prop_assert!(da <= de + tol && de <= core.mass + tol, "affine {da} extremal {de} mass {}", core.mass);
        let report = stability_report(&f, &quad()).unwrap();
        prop_assert!(report.all_hold(), "{:?}", report.worst());
        prop_assert!(report.rho1 >= de - tol);
    }
}
