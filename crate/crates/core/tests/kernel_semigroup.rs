use polyheat::grid::{lp_norm, sample_bumps, sample_function, Bump};
use polyheat::kernel::{build_profile, eval_kernel, fit_majorant, majorant_exponent, scaling_check, ProfileConfig};
use polyheat::semigroup::{kappa, kappa_integral, smoothing_ratio, zeta_integral, Propagator};
use polyheat::{GridField, GridSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn scaling_law_on_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.gen_range(1..=3);
        let d = rng.gen_range(1..=2);
        let t = 10f64.powf(rng.gen_range(-2.0..2.0));
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0) * t.powf(0.25)).collect();
        let c = scaling_check(t, &x, d).unwrap();
        // relative error is only meaningful away from the kernel's zeros
        if c.rhs.abs() > 1e-6 * eval_kernel(t, 0.0, n, d).unwrap().value {
            worst = worst.max(c.rel_err);
        }
    }
    assert!(worst < 1e-8, "worst relative error {worst}");
}

#[test]
fn scaling_at_sixteen_halves_the_origin_value() {
    let c = scaling_check(16.0, &[0.0], 2).unwrap();
    let origin = eval_kernel(1.0, 0.0, 1, 2).unwrap().value;
    assert!((c.lhs - origin / 2.0).abs() < 1e-13);
}

#[test]
fn spectral_semigroup_matches_direct_convolution() {
    let spec = GridSpec::new(1, 1024, 40.0).unwrap();
    let h = spec.spacing();
    let t = 1.0;
    let phi = sample_bumps(&spec, &[Bump::centered(0.5, 1.0)]).unwrap();
    // kernel tabulated at multiples of h, one Hankel quadrature per lag
    let n = spec.points_per_axis;
    let table: Vec<f64> = (0..n).map(|k| eval_kernel(t, (k.min(n - k)) as f64 * h, 1, 2).unwrap().value).collect();
    let direct: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| table[(i + n - j) % n] * phi.values()[j] * h).sum())
        .collect();
    let direct = GridField::new(spec, direct).unwrap();
    let spectral = Propagator::new(spec, 2).unwrap().apply(t, &phi).unwrap();
    let rel = lp_norm(&spectral.sub(&direct).unwrap(), 2.0).unwrap() / lp_norm(&direct, 2.0).unwrap();
    assert!(rel < 1e-6, "relative L2 difference {rel}");
}

#[test]
fn majorant_survives_refinement() {
    let spec = GridSpec::new(1, 1024, 64.0).unwrap();
    for d in [1, 2] {
        let beta = majorant_exponent(d);
        let coarse = build_profile(1, d, &ProfileConfig::for_grid(&spec)).unwrap();
        let fit = fit_majorant(&coarse, beta).unwrap();
        assert!(fit.k > 1.0 && fit.mu > 0.0);
        let fine = build_profile(1, d, &ProfileConfig::for_grid(&spec.refined(4).unwrap())).unwrap();
        let refit = fit_majorant(&fine, beta).unwrap();
        assert!(refit.max_ratio_on(&fine) <= 1.0);
    }
}

#[test]
fn narrow_bump_ratio_tends_to_kernel_peak() {
    let spec = GridSpec::new(1, 8192, 40.0).unwrap();
    let prop = Propagator::new(spec, 2).unwrap();
    let peak = eval_kernel(1.0, 0.0, 1, 2).unwrap().value;
    let gaps: Vec<f64> = [1.0, 0.3, 0.1, 0.03]
        .iter()
        .map(|&w| {
            let phi = sample_bumps(&spec, &[Bump::centered(w, 1.0)]).unwrap();
            (smoothing_ratio(&prop, &phi, 1.0, 1.0, f64::INFINITY).unwrap() - peak).abs()
        })
        .collect();
    assert!(gaps.windows(2).all(|g| g[1] < g[0]), "{gaps:?}");
    assert!(gaps[3] < 1e-3 * peak);
}

fn field_strategy(spec: GridSpec) -> impl Strategy<Value = GridField> {
    prop::collection::vec((-2.0..2.0f64, 0.3..2.0f64, -3.0..3.0f64), 1..4).prop_map(move |bs| {
        let bumps: Vec<Bump> = bs
            .into_iter()
            .map(|(c, w, a)| Bump { center: [c, 0.0, 0.0], width: w, amplitude: a })
            .collect();
        sample_bumps(&spec, &bumps).unwrap()
    })
}

fn grid() -> GridSpec {
    GridSpec::new(1, 256, 16.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn semigroup_law(f in field_strategy(grid()), s in 0.001..2.0f64, t in 0.001..2.0f64, d in 1u32..=3) {
        let prop = Propagator::new(grid(), d).unwrap();
        let two_steps = prop.apply(t, &prop.apply(s, &f).unwrap()).unwrap();
        let one_step = prop.apply(s + t, &f).unwrap();
        let scale = lp_norm(&one_step, 2.0).unwrap().max(1e-300);
        let diff = lp_norm(&two_steps.sub(&one_step).unwrap(), 2.0).unwrap();
        prop_assert!(diff <= 1e-12 * scale.max(lp_norm(&f, 2.0).unwrap()));
    }

    #[test]
    fn mass_is_conserved(f in field_strategy(grid()), t in 0.0..10.0f64, d in 1u32..=3) {
        let prop = Propagator::new(grid(), d).unwrap();
        let before = f.mean();
        let after = prop.apply(t, &f).unwrap().mean();
        prop_assert!((before - after).abs() <= 1e-13 * (1.0 + f.sup_norm()));
    }

    #[test]
    fn heat_flow_preserves_sign(f in field_strategy(grid()), t in 0.01..5.0f64) {
        let positive = f.map(f64::abs).unwrap();
        let evolved = Propagator::new(grid(), 1).unwrap().apply(t, &positive).unwrap();
        let floor = 1e-13 * positive.sup_norm();
        prop_assert!(evolved.values().iter().all(|&v| v >= -floor));
    }

    #[test]
    fn l2_ratio_is_nonincreasing_in_time(f in field_strategy(grid()), d in 1u32..=2) {
        let prop = Propagator::new(grid(), d).unwrap();
        let ratios: Vec<f64> = [0.01, 0.1, 1.0, 10.0]
            .iter()
            .map(|&t| smoothing_ratio(&prop, &f, t, 2.0, 2.0).unwrap())
            .collect();
        prop_assert!(ratios.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
    }
}

#[test]
fn biharmonic_flow_breaks_positivity() {
    let spec = grid();
    let narrow = sample_bumps(&spec, &[Bump::centered(0.3, 1.0)]).unwrap();
    let evolved = Propagator::new(spec, 2).unwrap().apply(1.0, &narrow).unwrap();
    let min = evolved.values().iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(min < -1e-4 * evolved.sup_norm(), "min {min}");
}

#[test]
fn heat_is_a_contraction_for_every_p() {
    let spec = grid();
    let prop = Propagator::new(spec, 1).unwrap();
    let f = sample_function(&spec, |x| (-x[0] * x[0]).exp() * (1.0 + 0.5 * (3.0 * x[0]).cos())).unwrap();
    for p in [1.0, 2.0, 4.0, f64::INFINITY] {
        for t in [0.01, 0.1, 1.0] {
            assert!(smoothing_ratio(&prop, &f, t, p, p).unwrap() <= 1.0 + 1e-12);
        }
    }
}

#[test]
fn kappa_and_zeta_are_integrable() {
    assert!(kappa(1e8, 9, 3.0, 2, 1.0).unwrap() < 1e-8);
    let k = kappa_integral(9, 3.0, 2, 1.0).unwrap();
    assert!(k.value.is_finite() && k.rel_change < 1e-6, "{k:?}");
    let z = zeta_integral(1.0).unwrap();
    assert!(z.value.is_finite() && z.rel_change < 1e-6, "{z:?}");
}
