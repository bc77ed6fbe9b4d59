use std::sync::OnceLock;

use dunkl_ou::inequalities::battery::random_polynomial;
use dunkl_ou::inequalities::report::{from_json, to_csv, to_json};
use dunkl_ou::inequalities::{run_suite, CheckContext, Settings, Status, Suite};
use dunkl_ou::poly::{
    carre_du_champ, dunkl_laplacian_closed_form, dunkl_laplacian_sum_of_squares, generator_l, gradient_norm_sq,
};
use dunkl_ou::quadrature::expectation_exact;
use dunkl_ou::rational::{self, int, ratio, Rational};
use dunkl_ou::spectral::{build_basis, EigenBasis};
use dunkl_ou::{GroupKind, Polynomial, RootSystem};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn groups() -> Vec<RootSystem> {
    vec![
        RootSystem::build(GroupKind::Rank1, &[ratio(3, 2)]).unwrap(),
        RootSystem::build(GroupKind::Z2Power(2), &[int(1), ratio(1, 2)]).unwrap(),
        RootSystem::build(GroupKind::Z2Power(3), &[ratio(1, 3), int(0), int(2)]).unwrap(),
        RootSystem::build(GroupKind::SymmetricGroup(3), &[int(1)]).unwrap(),
    ]
}

fn poly(seed: u64, dim: usize, degree: u32) -> Polynomial {
    random_polynomial(&mut ChaCha8Rng::seed_from_u64(seed), dim, degree, 5, 3)
}

fn z2_basis() -> &'static (RootSystem, EigenBasis) {
    static BASIS: OnceLock<(RootSystem, EigenBasis)> = OnceLock::new();
    BASIS.get_or_init(|| {
        let rs = RootSystem::build(GroupKind::Z2Power(2), &[int(1), ratio(1, 2)]).unwrap();
        let basis = build_basis(&rs, 6).unwrap();
        (rs, basis)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn laplacian_paths_agree(seed in any::<u64>(), g in 0usize..4) {
        let rs = &groups()[g];
        let p = poly(seed, rs.dimension(), 6);
        prop_assert_eq!(dunkl_laplacian_sum_of_squares(rs, &p).unwrap(), dunkl_laplacian_closed_form(rs, &p).unwrap());
    }

    #[test]
    fn generator_has_zero_mean_and_is_symmetric(seed in any::<u64>(), g in 0usize..3) {
        let rs = &groups()[g];
        let f = poly(seed, rs.dimension(), 5);
        let h = poly(seed ^ 0x5eed, rs.dimension(), 5);
        prop_assert_eq!(expectation_exact(rs, &generator_l(rs, &f).unwrap()).unwrap(), Rational::from_integer(0.into()));
        let lf_h = expectation_exact(rs, &generator_l(rs, &f).unwrap().try_mul(&h).unwrap()).unwrap();
        let f_lh = expectation_exact(rs, &f.try_mul(&generator_l(rs, &h).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(lf_h, f_lh);
    }

    #[test]
    fn carre_du_champ_is_nonnegative_and_dominates(seed in any::<u64>(), g in 0usize..4, x in prop::collection::vec(-30i64..30, 3)) {
        let rs = &groups()[g];
        let d = rs.dimension();
        let f = poly(seed, d, 4);
        let point: Vec<Rational> = x[..d].iter().map(|&v| ratio(v, 10)).collect();
        let gamma = carre_du_champ(rs, &f, &f).unwrap().eval_exact(&point);
        let tf = gradient_norm_sq(rs, &f).unwrap().eval_exact(&point);
        prop_assert!(gamma >= int(0));
        prop_assert!(tf <= rs.gradient_constant() * gamma);
    }

    #[test]
    fn spectral_semigroup_composes(seed in any::<u64>(), s in 0.0f64..1.5, t in 0.0f64..1.5, x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let (_, basis) = z2_basis();
        let f = poly(seed, 2, 6);
        let stepwise = basis.ou_spectral(&f, s).unwrap().evolve(t).eval(&[x, y]);
        let direct = basis.ou_spectral(&f, s + t).unwrap().eval(&[x, y]);
        prop_assert!((stepwise - direct).abs() <= 1e-9 * (1.0 + direct.abs()));
    }

    #[test]
    fn psi_is_decreasing(seed in any::<u64>(), t in 0.0f64..3.0) {
        let (_, basis) = z2_basis();
        let f = poly(seed, 2, 6);
        prop_assert!(basis.psi(&f, t + 0.1).unwrap() <= basis.psi(&f, t).unwrap() * (1.0 + 1e-12));
        prop_assert!(basis.dirichlet_form(&f, t).unwrap() >= 0.0);
    }
}

#[test]
fn rank_one_generator_on_x_squared() {
    // L_k x² = 2 + 4k − 2x²
    let k = ratio(1, 2);
    let rs = RootSystem::build(GroupKind::Rank1, std::slice::from_ref(&k)).unwrap();
    let x2 = Polynomial::parse("x1^2", 1).unwrap();
    let expected = &Polynomial::constant(1, int(2) + int(4) * &k) - &x2.scale(&int(2));
    assert_eq!(generator_l(&rs, &x2).unwrap(), expected);
    assert_eq!(rational::to_f64(&expectation_exact(&rs, &x2).unwrap()), 2.0);
}

#[test]
fn suites_are_deterministic_and_serialize() {
    let settings = Settings { battery_size: 8, ..Settings::default() };
    let run = || {
        let ctx = CheckContext::new(RootSystem::build(GroupKind::Z2Power(2), &[int(1), ratio(1, 2)]).unwrap(), settings.clone());
        run_suite(&ctx, Suite::Gradient)
    };
    let (a, b) = (run(), run());
    assert_eq!(to_csv(&a).unwrap(), to_csv(&b).unwrap());
    assert_eq!(from_json(&to_json(&a).unwrap()).unwrap(), a);
    assert!(a.iter().all(|r| r.pass), "{:?}", a.iter().find(|r| !r.pass));
}

#[test]
fn groups_without_a_kernel_skip_numeric_checks() {
    let ctx = CheckContext::new(RootSystem::build(GroupKind::SymmetricGroup(3), &[int(1)]).unwrap(), Settings { battery_size: 4, ..Settings::default() });
    let reports = run_suite(&ctx, Suite::Semigroup);
    assert!(!reports.is_empty());
    assert!(reports.iter().all(|r| r.status == Status::Skipped && r.note.contains("capability")));
    let symbolic = run_suite(&ctx, Suite::Identity);
    assert!(symbolic.iter().any(|r| r.status == Status::Pass));
    assert!(symbolic.iter().all(|r| r.status != Status::Fail));
}
