//! Acceptance criteria A1 to A9. Each test prints one PASS/FAIL line.

use std::f64::consts::PI;
use std::time::Instant;

use proptest::prelude::*;
use proptest::test_runner::{Config as PtConfig, TestRunner};

use whlab::coeffs::{b_coeff, b_d_coeff, v1, v1_ray_counting, BOptions, Restriction};
use whlab::lab::{
    fit_log_slope, ols, plan_sweep, run_sweep, BaseConfig, Predictor, Regime, Response, RunRecord, SymbolFamily,
};
use whlab::regions::Region;
use whlab::specfun::{renyi_eta, u_eta_closed_form, u_functional, u_two_point, SpectralFunction};
use whlab::symbols::{make_fermi, Dispersion, SymbolSpec};
use whlab::whop::{assemble, build_kernel_with_reach, discretize, trace_d, trace_d_poly, GridSpec};

fn report(id: &str, pass: bool, detail: String) {
    println!("{id} {} {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{id}: {detail}");
}

fn unit() -> Region {
    Region::interval(0.0, 1.0).unwrap()
}

fn fermi1() -> Dispersion {
    Dispersion::quadratic(1, 1.0).unwrap()
}

fn eta(g: f64) -> SpectralFunction {
    renyi_eta(g).unwrap()
}

fn sweep(regime: Regime, family: SymbolFamily, f: SpectralFunction, start: f64) -> Vec<RunRecord> {
    let plan = plan_sweep(regime, BaseConfig::new(family, unit(), f, start), 4).unwrap();
    let recs = run_sweep::<Vec<u8>>(&plan, 4, None).unwrap();
    for r in &recs {
        assert!(r.error.is_none(), "{:?}", r.error);
    }
    recs
}

fn gap(x: f64, want: f64) -> f64 {
    ((x - want) / want).abs()
}

#[test]
fn a1_closed_form_u() {
    let mut worst: f64 = 0.0;
    for g in [0.25, 0.5, 1.0, 2.0, 4.0] {
        worst = worst.max((u_functional(&eta(g)).unwrap().value - u_eta_closed_form(g)).abs());
    }
    let u1 = u_functional(&SpectralFunction::monomial(1).unwrap()).unwrap().value;
    let u2 = u_functional(&SpectralFunction::monomial(2).unwrap()).unwrap().value;
    let pass = worst <= 1e-8 && u1.abs() <= 1e-12 && (u2 + 1.0).abs() <= 1e-12;
    report("A1", pass, format!("max|U(eta)-closed|={worst:.2e} U(g1)={u1:.1e} U(g2)={u2:.15}"));
}

#[test]
fn a2_v1_cross_oracle() {
    let disk = Region::disk([0.0, 0.0], 1.0).unwrap();
    let square = Region::polygon(vec![[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]]).unwrap();
    let q = v1(|_, _| 1.0, &disk, &disk, 128).unwrap();
    let mc = v1_ray_counting(&disk, &disk, 100_000, 1).unwrap();
    let qs = v1(|_, _| 1.0, &disk, &square, 128).unwrap();
    let mcs = v1_ray_counting(&disk, &square, 100_000, 2).unwrap();
    let d1 = (q.value - 1.0 / (PI * PI)).abs();
    let z1 = (mc.value - q.value).abs() / mc.error;
    let z2 = (mcs.value - qs.value).abs() / (mcs.error + qs.error);
    let pass = d1 <= 1e-6 && z1 <= 3.0 && z2 <= 3.0;
    report("A2", pass, format!("|v1-1/pi^2|={d1:.2e} disk/disk z={z1:.2} disk/square z={z2:.2}"));
}

#[test]
fn a3_sharp_symbol_log_law() {
    let sharp = SymbolFamily::Fixed(SymbolSpec::indicator(Region::interval(-1.0, 1.0).unwrap()));
    let recs = sweep(Regime::SmoothFixedT, sharp, eta(1.0), 100.0);
    let fit = fit_log_slope(&recs, Predictor::LogAlpha, Response::Trace, Some(1.0 / 3.0)).unwrap();
    let g = fit.gap.unwrap();
    report("A3", g <= 0.05, format!("slope={:.5} target=0.33333 gap={:.2}% used={}", fit.slope, 100.0 * g, fit.n_used));
}

#[test]
fn a4_sub_critical_fermi() {
    let recs = sweep(Regime::SubCritical, SymbolFamily::Fermi(fermi1()), eta(1.0), 100.0);
    let fit = fit_log_slope(&recs, Predictor::LogAlpha, Response::Trace, Some(1.0 / 3.0)).unwrap();
    let g = fit.gap.unwrap();
    report("A4", g <= 0.07, format!("slope={:.5} target=0.33333 gap={:.2}% used={}", fit.slope, 100.0 * g, fit.n_used));
}

#[test]
fn a5_super_critical_fermi() {
    let s1 = fit_log_slope(
        &sweep(Regime::SuperCritical, SymbolFamily::Fermi(fermi1()), eta(1.0), 0.05),
        Predictor::LogInvT,
        Response::Trace,
        Some(1.0 / 3.0),
    )
    .unwrap();
    let s2 = fit_log_slope(
        &sweep(Regime::SuperCritical, SymbolFamily::Fermi(fermi1()), eta(2.0), 0.05),
        Predictor::LogInvT,
        Response::Trace,
        Some(0.25),
    )
    .unwrap();
    let g1 = s1.gap.unwrap();
    let ratio = s2.slope / s1.slope;
    let g2 = gap(ratio, 0.75);
    report(
        "A5",
        g1 <= 0.07 && g2 <= 0.07,
        format!("slope(eta1)={:.5} gap={:.2}%  slope(eta2)/slope(eta1)={ratio:.5} target=0.75 gap={:.2}%", s1.slope, 100.0 * g1, 100.0 * g2),
    );
}

#[test]
fn a6_smooth_symbol_widom() {
    let a = make_fermi(fermi1(), 0.2).unwrap();
    let f = SpectralFunction::parabola();
    let tr = trace_d(&a, &unit(), 800.0, &f, &GridSpec::default()).unwrap();
    let b = b_coeff(&Restriction::of_symbol(&a).unwrap(), &f, &BOptions::default()).unwrap();
    let g = gap(tr.value, 2.0 * b.value);
    report("A6", g <= 0.03, format!("trD={:.6} 2B={:.6} gap={:.3}% grid_n={}", tr.value, 2.0 * b.value, 100.0 * g, tr.grid_n));
}

#[test]
fn a7_comparison_limit_1d() {
    let temps = [0.1, 0.05, 0.025, 0.0125];
    let f = eta(1.0);
    let ratios: Vec<f64> = temps
        .iter()
        .map(|t| {
            let r = Restriction::of_symbol(&make_fermi(fermi1(), *t).unwrap()).unwrap();
            b_coeff(&r, &f, &BOptions::default()).unwrap().value / (1.0 / t).ln()
        })
        .collect();
    let gaps: Vec<f64> = ratios.iter().map(|r| gap(*r, 1.0 / 6.0)).collect();
    let monotone = gaps.windows(2).all(|w| w[1] < w[0]);
    let x: Vec<f64> = temps.iter().map(|t| 1.0 / (1.0 / t).ln()).collect();
    let (_, extrapolated, _, _) = ols(&x, &ratios).unwrap();
    let last = gaps[gaps.len() - 1];
    report(
        "A7",
        monotone && last <= 0.05,
        format!(
            "ratios={:?} gaps%={:?} monotone={monotone} final gap={:.2}% (1/log(1/T) extrapolation {:.4})",
            ratios.iter().map(|r| (r * 1e5).round() / 1e5).collect::<Vec<_>>(),
            gaps.iter().map(|g| (g * 1e4).round() / 1e2).collect::<Vec<_>>(),
            100.0 * last,
            extrapolated
        ),
    );
}

#[test]
fn a8_two_dimensional_trend() {
    let start = Instant::now();
    let disk = Region::disk([0.0, 0.0], 1.0).unwrap();
    let d2 = Dispersion::quadratic(2, 1.0).unwrap();
    let f = eta(1.0);
    let temps = [0.2, 0.1, 0.05];
    let mut x = Vec::new();
    let mut y = Vec::new();
    for t in temps {
        let a = make_fermi(d2.clone(), t).unwrap();
        let alpha = 4.0 / t;
        let r = trace_d(&a, &disk, alpha, &f, &GridSpec::default()).unwrap();
        x.push((1.0 / t).ln());
        y.push(r.value / alpha);
    }
    let (slope, ..) = ols(&x, &y).unwrap();
    let g1 = gap(slope, 1.0 / 3.0);
    let t = 0.0125;
    let q = disk.boundary_quadrature(64).unwrap();
    let bd = b_d_coeff(&make_fermi(d2, t).unwrap(), &q, &f, &BOptions::default()).unwrap();
    let ratio = bd.value / (1.0 / t).ln();
    let g2 = gap(ratio, 1.0 / 3.0);
    report(
        "A8",
        g1 <= 0.15 && g2 <= 0.10,
        format!(
            "slope(trD/alpha)={slope:.5} gap={:.2}%  Bd/log(1/T) at T=0.0125={ratio:.5} gap={:.2}%  ({:.0} s)",
            100.0 * g1,
            100.0 * g2,
            start.elapsed().as_secs_f64()
        ),
    );
}

fn check(runner: &mut TestRunner, name: &str, failures: &mut Vec<String>, r: Result<(), proptest::test_runner::TestError<impl std::fmt::Debug>>) {
    let _ = runner;
    if let Err(e) = r {
        failures.push(format!("{name}: {e}"));
    }
}

#[test]
fn a9_property_suites() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut runner = TestRunner::new(PtConfig { cases: 24, failure_persistence: None, ..PtConfig::default() });

    // tr A = |Λ| K(0) and eigenvalues within [0, 1] for the sharp symbol
    let r = runner.run(&(5.0f64..60.0, 0.2f64..2.0), |(alpha, len)| {
        let a = SymbolSpec::indicator(Region::interval(-1.0, 1.0).unwrap());
        let lam = Region::interval(0.0, len).unwrap();
        let k = build_kernel_with_reach(&a, alpha, len).unwrap();
        let op = assemble(&k, &lam, &GridSpec::default()).unwrap();
        prop_assert!((op.trace() - len * alpha / PI).abs() < 1e-9 * (1.0 + op.trace()));
        let spec = discretize(&a, &lam, alpha, &GridSpec::default()).unwrap().spectrum().unwrap();
        prop_assert!(spec.iter().all(|(l, _)| *l > -1e-9 && *l < 1.0 + 1e-9));
        Ok(())
    });
    check(&mut runner, "trace identity / eigenvalue range", &mut failures, r);

    // g₁ cancellation, eigen vs power path, additivity in f
    let r = runner.run(&(5.0f64..40.0, 0.1f64..0.6, 2u32..5), |(alpha, t, p)| {
        let a = make_fermi(fermi1(), t).unwrap();
        let g = GridSpec::default();
        let g1 = trace_d(&a, &unit(), alpha, &SpectralFunction::monomial(1).unwrap(), &g).unwrap();
        prop_assert!(g1.value.abs() < 1e-9);
        let fp = SpectralFunction::monomial(p).unwrap();
        let eig = trace_d(&a, &unit(), alpha, &fp, &g).unwrap();
        let pow = trace_d_poly(&a, &unit(), alpha, p, &g).unwrap();
        prop_assert!((eig.value - pow.value).abs() < 1e-8 * eig.spectral.abs().max(1.0));
        let e = eta(1.0);
        let sum = SpectralFunction::combination(vec![(2.0, e.clone()), (-1.0, fp.clone())]);
        let te = trace_d(&a, &unit(), alpha, &e, &g).unwrap().value;
        let ts = trace_d(&a, &unit(), alpha, &sum, &g).unwrap().value;
        prop_assert!((ts - (2.0 * te - eig.value)).abs() < 1e-9 * (1.0 + te.abs()));
        Ok(())
    });
    check(&mut runner, "g1 cancellation / power path / additivity", &mut failures, r);

    // unitary scaling: (α, Λ) and (1, αΛ) give the same trace
    let r = runner.run(&(5.0f64..30.0,), |(alpha,)| {
        let a = make_fermi(fermi1(), 0.25).unwrap();
        let small = trace_d(&a, &unit(), alpha, &eta(1.0), &GridSpec::with_points_per_unit(200.0)).unwrap();
        let big = trace_d(&a, &unit().scaled(alpha).unwrap(), 1.0, &eta(1.0), &GridSpec::with_points_per_unit(200.0 / alpha)).unwrap();
        prop_assert!((small.value - big.value).abs() <= small.two_grid_err.max(1e-9));
        Ok(())
    });
    check(&mut runner, "unitary scaling", &mut failures, r);

    // U two-point symmetry and affine annihilation
    let r = runner.run(&(0.0f64..1.0, 0.0f64..1.0, -2.0f64..2.0, -2.0f64..2.0), |(s1, s2, c, d)| {
        let f = eta(0.7);
        prop_assert_eq!(u_two_point(s1, s2, &f).unwrap().value, u_two_point(s2, s1, &f).unwrap().value);
        prop_assert_eq!(u_two_point(s1, s2, &SpectralFunction::linear(c, d)).unwrap().value, 0.0);
        Ok(())
    });
    check(&mut runner, "U symmetry / affine", &mut failures, r);

    // 𝓑 scale invariance and split consistency
    let mut slow = TestRunner::new(PtConfig { cases: 6, failure_persistence: None, ..PtConfig::default() });
    let r = slow.run(&(0.03f64..0.3, 0.3f64..3.0, 0.4f64..0.9), |(t, tau, theta)| {
        let r = Restriction::of_symbol(&make_fermi(fermi1(), t).unwrap()).unwrap();
        let e = eta(1.0);
        let base = b_coeff(&r, &e, &BOptions::default()).unwrap();
        let scaled = b_coeff(&r.scaled(tau).unwrap(), &e, &BOptions::default()).unwrap();
        prop_assert!((base.value - scaled.value).abs() < 1e-6 * base.value);
        let split = b_coeff(&r, &e, &BOptions { theta, ..BOptions::default() }).unwrap();
        prop_assert!((base.value - split.value).abs() <= base.error + split.error + 1e-9 * base.value);
        Ok(())
    });
    check(&mut runner, "B scale invariance / split consistency", &mut failures, r);

    // regime tagging
    let r = runner.run(&(0.01f64..0.9, 1.1f64..3.0, 0usize..3), |(start, ratio, pick)| {
        let regime = [Regime::SubCritical, Regime::Critical, Regime::SuperCritical][pick];
        let s = if regime == Regime::SuperCritical { start } else { 100.0 * start };
        let mut base = BaseConfig::new(SymbolFamily::Fermi(fermi1()), unit(), eta(1.0), s);
        base.ratio = ratio;
        let plan = plan_sweep(regime, base, 5).unwrap();
        prop_assert!(plan.points.iter().all(|(a, t)| regime.admits(*a, *t)));
        Ok(())
    });
    check(&mut runner, "regime tagging", &mut failures, r);

    // synthetic-fit exactness
    let r = runner.run(&(-3.0f64..3.0, -5.0f64..5.0), |(m, c)| {
        let x: Vec<f64> = (0..6).map(|k| (10.0 * 2f64.powi(k)).ln()).collect();
        let y: Vec<f64> = x.iter().map(|x| m * x + c).collect();
        let (s, i, ..) = ols(&x, &y).unwrap();
        prop_assert!((s - m).abs() < 1e-12 && (i - c).abs() < 1e-12);
        Ok(())
    });
    check(&mut runner, "synthetic fit", &mut failures, r);

    let secs = start.elapsed().as_secs_f64();
    report("A9", failures.is_empty() && secs < 300.0, format!("7 suites, {secs:.1} s, failures={failures:?}"));
}
