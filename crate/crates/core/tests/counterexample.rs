use osp_core::counterexample::*;
use osp_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn g_closed_form_matches_quadrature() {
    for x in [0.0, 1e-8, 1e-3, 0.1, 0.5, 1.0, 2.0, 7.5, 30.0, 100.0] {
        let a = G_eval(x).unwrap();
        let b = G_quadrature(x).unwrap();
        assert!((a - b).abs() <= 1e-10 * a.abs().max(1e-300), "x = {x}: {a} vs {b}");
    }
    assert!(G_eval(-1.0).is_err());
    assert!((G_eval(1e6).unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn h_inverts_g_and_decreases() {
    assert_eq!(h_eval(1.0).unwrap(), 0.0);
    let mut last = 0.0;
    for k in 1..=60 {
        let x = 1.0 - k as f64 / 61.0;
        let h = h_eval(x).unwrap();
        assert!(h > last);
        last = h;
        assert!((G_eval(h).unwrap() - (1.0 - x)).abs() < 1e-14);
    }
    // Far below the double range, through the logarithmic entry point:
    // e^{−u}(1+u) = e^{−l}.
    let l = 5000.0;
    let u = h_from_neg_log(l).unwrap().sqrt();
    assert!(rel(u - (1.0 + u).ln(), l) < 1e-14);
    assert!(h_eval(0.0).is_err() && h_eval(1.5).is_err());
}

#[test]
fn moments_of_h_are_odd_factorials() {
    for n in 0..=6 {
        let m = moment_integral(n).unwrap();
        assert!(rel(m, factorial(2 * n + 1)) <= 1e-6, "n = {n}: {m}");
    }
    assert!((moment_integral(1).unwrap() - 6.0).abs() < 6e-6);
    assert!((moment_integral(3).unwrap() - 5040.0).abs() < 5040e-6);
    assert!(matches!(moment_integral(MAX_MOMENT + 1), Err(Error::Domain(_))));
}

#[test]
fn log_norms_are_factorials() {
    for n in 1..=8 {
        let p = lp_power(&SampledFunction::log(), n).unwrap();
        assert!(rel(p, factorial(n)) <= 1e-6, "n = {n}: {p}");
    }
}

#[test]
fn bounded_functions_integrate_on_the_unit_interval() {
    let f = SampledFunction::bounded("x^2", |x| x * x);
    for n in 1..=5 {
        assert!(rel(lp_power(&f, n).unwrap(), 1.0 / (2 * n + 1) as f64) < 1e-12);
    }
    assert!(lp_norm(&f, 0).is_err());
    assert!(f.eval(0.0).is_err());
}

#[test]
fn banach_norm_examples() {
    let c = SampledFunction::constant(0.3);
    for scheme in [NormScheme::A, NormScheme::B] {
        let b = banach_norm(&c, scheme, 6).unwrap();
        assert_eq!(b.argmax, 1);
        // ‖h‖₁ = 3! = 6 under scheme A.
        let want = if scheme == NormScheme::A { 0.05 } else { 0.3 };
        assert!(rel(b.value, want) < 1e-8, "{scheme:?}: {b:?}");
    }
    // ‖log‖_n = (n!)^{1/n}, so the scheme-B norm of log is 1 at every order.
    let b = banach_norm(&SampledFunction::log(), NormScheme::B, 6).unwrap();
    assert!((b.value - 1.0).abs() < 1e-8);
    assert!(matches!(banach_norm(&c, NormScheme::B, 3), Err(Error::Precondition(_))));
}

#[test]
fn analytic_bound_holds_for_random_functions() {
    let mut r = ChaCha8Rng::seed_from_u64(50);
    for i in 0..20 {
        let (a, p, b, k): (f64, i32, f64, f64) =
            (r.gen_range(0.0..1.0), r.gen_range(0..3), r.gen_range(-1.0..1.0), r.gen_range(0.5..4.0));
        // a·(−ln x)^p + b·x^k
        let f = SampledFunction::singular(format!("f{i}"), move |s| a * s.powi(p) + b * (-k * s).exp());
        let norm = banach_norm(&f, NormScheme::B, 12).unwrap().value;
        let target: f64 = r.gen_range(0.05..0.4);
        let g = f.scaled(target / norm);
        let rep = analytic_bound_check(&g, 6).unwrap();
        assert!(rep.pass, "{rep:?}");
    }
    let big = SampledFunction::constant(0.6);
    assert!(matches!(analytic_bound_check(&big, 6), Err(Error::Precondition(_))));
}

#[test]
fn central_binomial_bound() {
    let rep = factorial_inequality(20);
    assert!(rep.pass && rep.residual == 0.0);
    // Equivalent form C(2n, n) ≤ 4ⁿ, in exact u128 arithmetic.
    for n in 0..=20u32 {
        let mut binom: u128 = 1;
        for j in 0..n as u128 {
            binom = binom * (2 * n as u128 - j) / (j + 1);
        }
        assert!(binom <= 4u128.pow(n));
    }
}

#[test]
fn witness_diverges_for_positive_times() {
    for t in [0.5, 1.0, 2.0] {
        let table = divergence_witness(t, 0.5, 40).unwrap();
        assert!(table.strictly_increasing);
        match table.outcome {
            WitnessOutcome::Diverges { level } => assert!(level <= 40, "t = {t}"),
            WitnessOutcome::Inconclusive => panic!("t = {t} inconclusive"),
        }
    }
    // Larger t diverges no later.
    let level = |t| match divergence_witness(t, 0.5, 40).unwrap().outcome {
        WitnessOutcome::Diverges { level } => level,
        WitnessOutcome::Inconclusive => usize::MAX,
    };
    assert!(level(2.0) <= level(1.0) && level(1.0) <= level(0.5));
}

#[test]
fn witness_matches_direct_quadrature_on_shallow_levels() {
    let table = divergence_witness(1.0, 0.5, 6).unwrap();
    for row in &table.rows {
        let direct = integrate_adaptive(|x| h_eval(x).unwrap().exp(), row.delta, 0.5, 1e-12, 1e-12).unwrap();
        assert!((row.log10_integral - direct.log10()).abs() < 1e-9, "{row:?} vs {direct}");
    }
}

#[test]
fn witness_is_inconclusive_at_zero_time() {
    let table = divergence_witness(0.0, 0.5, 40).unwrap();
    assert_eq!(table.outcome, WitnessOutcome::Inconclusive);
    for row in &table.rows {
        assert!((row.log10_integral - (0.5 - row.delta).log10()).abs() < 1e-12);
    }
    assert!(divergence_witness(-1.0, 0.5, 4).is_err());
    assert!(divergence_witness(1.0, 1.5, 4).is_err());
}
