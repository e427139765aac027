use proptest::prelude::*;

use whlab::lab::{
    compare_to_theory, fit_log_slope, plan_sweep, run_sweep, theory_slope, BaseConfig, Config, Predictor, Quantity,
    Regime, Response, RunRecord, SymbolFamily, Verdict, CSV_HEADER,
};
use whlab::regions::Region;
use whlab::specfun::{renyi_eta, SpectralFunction};
use whlab::symbols::{Dispersion, SymbolSpec};

fn fermi() -> SymbolFamily {
    SymbolFamily::Fermi(Dispersion::quadratic(1, 1.0).unwrap())
}

fn unit() -> Region {
    Region::interval(0.0, 1.0).unwrap()
}

fn eta1() -> SpectralFunction {
    renyi_eta(1.0).unwrap()
}

fn synthetic(xs: &[f64], slope: f64, intercept: f64) -> Vec<RunRecord> {
    xs.iter()
        .map(|a| RunRecord {
            alpha: *a,
            temperature: 0.0,
            gamma_or_f: "1".into(),
            regime: Regime::SmoothFixedT,
            dim: 1,
            trace: slope * a.ln() + intercept,
            bulk: 0.0,
            remainder: slope * a.ln() + intercept,
            grid_n: 10,
            two_grid_err: 0.0,
            wall_ms: 0.0,
            method: String::new(),
            error: None,
        })
        .collect()
}

#[test]
fn super_critical_schedule() {
    let mut base = BaseConfig::new(fermi(), unit(), eta1(), 0.05);
    base.ratio = 2.0;
    let plan = plan_sweep(Regime::SuperCritical, base, 4).unwrap();
    let want = [(80.0, 0.05), (160.0, 0.025), (320.0, 0.0125), (640.0, 0.00625)];
    for ((a, t), (wa, wt)) in plan.points.iter().zip(want) {
        assert!((a - wa).abs() < 1e-9 && (t - wt).abs() < 1e-15, "({a}, {t})");
    }
}

#[test]
fn sub_critical_schedule() {
    let plan = plan_sweep(Regime::SubCritical, BaseConfig::new(fermi(), unit(), eta1(), 100.0), 4).unwrap();
    let want = [(100.0, 1.0 / 400.0), (200.0, 1.0 / 800.0), (400.0, 1.0 / 1600.0), (800.0, 1.0 / 3200.0)];
    for ((a, t), (wa, wt)) in plan.points.iter().zip(want) {
        assert_eq!(*a, wa);
        assert!((t - wt).abs() < 1e-18);
    }
}

#[test]
fn short_or_inconsistent_plans_are_rejected() {
    assert!(plan_sweep(Regime::SubCritical, BaseConfig::new(fermi(), unit(), eta1(), 100.0), 2).is_err());
    let mut base = BaseConfig::new(fermi(), unit(), eta1(), 100.0);
    base.product = Some(2.0);
    assert!(plan_sweep(Regime::SubCritical, base, 4).is_err());
    let sharp = SymbolFamily::Fixed(SymbolSpec::indicator(Region::interval(-1.0, 1.0).unwrap()));
    assert!(plan_sweep(Regime::SuperCritical, BaseConfig::new(sharp, unit(), eta1(), 0.05), 4).is_err());
    assert!(plan_sweep(Regime::SmoothFixedT, BaseConfig::new(fermi(), unit(), eta1(), 10.0), 4).is_err());
}

#[test]
fn critical_schedule_keeps_product() {
    let plan = plan_sweep(Regime::Critical, BaseConfig::new(fermi(), unit(), eta1(), 10.0), 5).unwrap();
    assert!(plan.points.iter().all(|(a, t)| (a * t - 1.0).abs() < 1e-12));
}

#[test]
fn empty_plan_gives_no_records() {
    let mut plan = plan_sweep(Regime::Critical, BaseConfig::new(fermi(), unit(), eta1(), 10.0), 4).unwrap();
    plan.points.clear();
    let mut buf = Vec::new();
    assert!(run_sweep(&plan, 2, Some(&mut buf)).unwrap().is_empty());
    assert_eq!(String::from_utf8(buf).unwrap().trim(), CSV_HEADER);
}

#[test]
fn linear_function_sweep_vanishes() {
    let mut base = BaseConfig::new(fermi(), unit(), SpectralFunction::monomial(1).unwrap(), 10.0);
    base.product = Some(4.0);
    let plan = plan_sweep(Regime::Critical, base, 4).unwrap();
    for r in run_sweep::<Vec<u8>>(&plan, 2, None).unwrap() {
        assert!(r.error.is_none());
        assert!(r.trace.abs() < 1e-9, "{}", r.trace);
    }
}

fn strip_wall(csv: &str) -> Vec<String> {
    csv.lines().map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect()
}

#[test]
fn sweep_output_is_reproducible_and_ordered() {
    let plan = plan_sweep(Regime::SuperCritical, BaseConfig::new(fermi(), unit(), eta1(), 0.4), 4).unwrap();
    let mut a = Vec::new();
    let mut b = Vec::new();
    let ra = run_sweep(&plan, 1, Some(&mut a)).unwrap();
    run_sweep(&plan, 4, Some(&mut b)).unwrap();
    let (a, b) = (String::from_utf8(a).unwrap(), String::from_utf8(b).unwrap());
    assert_eq!(strip_wall(&a), strip_wall(&b));
    assert!(a.starts_with(CSV_HEADER));
    let alphas: Vec<f64> = ra.iter().map(|r| r.alpha).collect();
    assert!(alphas.windows(2).all(|w| w[1] > w[0]));
    assert!(ra.iter().all(|r| r.alpha * r.temperature >= 1.0));
}

#[test]
fn point_failures_are_recorded() {
    let mut plan = plan_sweep(Regime::Critical, BaseConfig::new(fermi(), unit(), eta1(), 10.0), 4).unwrap();
    plan.grid.max_rows = 30;
    let recs = run_sweep::<Vec<u8>>(&plan, 2, None).unwrap();
    assert_eq!(recs.len(), 4);
    assert!(recs.iter().any(|r| r.error.is_some()));
}

#[test]
fn fit_recovers_synthetic_line() {
    let recs = synthetic(&[100.0, 200.0, 400.0, 800.0], 0.5, 1.0);
    let f = fit_log_slope(&recs, Predictor::LogAlpha, Response::Trace, Some(0.5)).unwrap();
    assert!((f.slope - 0.5).abs() < 1e-12 && (f.intercept - 1.0).abs() < 1e-12, "{f:?}");
    assert!(f.gap.unwrap() < 1e-12);
    let flat = synthetic(&[100.0, 200.0, 400.0], 0.0, 3.0);
    assert!(fit_log_slope(&flat, Predictor::LogAlpha, Response::Remainder, None).unwrap().slope.abs() < 1e-12);
}

#[test]
fn fit_needs_three_distinct_points() {
    assert!(fit_log_slope(&synthetic(&[100.0, 200.0], 1.0, 0.0), Predictor::LogAlpha, Response::Trace, None).is_err());
    let same = synthetic(&[100.0, 100.0, 100.0], 1.0, 0.0);
    assert!(fit_log_slope(&same, Predictor::LogAlpha, Response::Trace, None).is_err());
}

#[test]
fn fit_drops_unresolved_first_point() {
    let mut recs = synthetic(&[100.0, 200.0, 400.0, 800.0], 0.5, 1.0);
    recs[0].two_grid_err = 1.0;
    recs[0].trace += 5.0;
    recs[0].remainder += 5.0;
    let f = fit_log_slope(&recs, Predictor::LogAlpha, Response::Trace, None).unwrap();
    assert_eq!(f.n_used, 3);
    assert!((f.slope - 0.5).abs() < 1e-12);
}

#[test]
fn theory_comparison_examples() {
    assert_eq!(compare_to_theory(0.333, 1.0 / 3.0, 0.05).unwrap().verdict, Verdict::Pass);
    let r = compare_to_theory(0.30, 1.0 / 3.0, 0.05).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert!((r.rel_gap.unwrap() - 0.1).abs() < 1e-12);
    let z = compare_to_theory(0.2, 0.0, 0.05).unwrap();
    assert_eq!(z.verdict, Verdict::Indeterminate);
    assert!(z.rel_gap.is_none() && (z.abs_gap - 0.2).abs() < 1e-15);
    assert!(compare_to_theory(f64::NAN, 1.0, 0.05).is_err());
}

#[test]
fn theory_slope_one_dimensional() {
    let om = Region::interval(-1.0, 1.0).unwrap();
    let s = theory_slope(&eta1(), &unit(), &om, Quantity::Trace).unwrap();
    assert!((s - 1.0 / 3.0).abs() < 1e-8, "{s}");
    let h = theory_slope(&eta1(), &unit(), &om, Quantity::Entanglement).unwrap();
    assert!((h - 2.0 / 3.0).abs() < 1e-8);
}

#[test]
fn config_round_trip() {
    let text = r#"
[regions]
lam = { kind = "interval", lo = 0.0, hi = 1.0 }
disk = { kind = "disk", center = [0.0, 0.0], radius = 1.0 }

[symbols]
fermi = { kind = "fermi", h = "quadratic", mu = 1.0, T = 0.05 }
sharp = { kind = "indicator", omega = { kind = "interval", lo = -1.0, hi = 1.0 } }

[functions]
eta1 = { name = "eta", gamma = 1.0 }
p = { name = "parabola" }

[plans.super]
regime = "super_critical"
symbol = "fermi"
region = "lam"
function = "eta1"
start = 0.05
n_points = 4
"#;
    let cfg = Config::parse(text).unwrap();
    assert_eq!(cfg.region("disk").unwrap().as_disk().unwrap().1, 1.0);
    assert_eq!(cfg.symbol("fermi").unwrap().temperature(), 0.05);
    assert_eq!(cfg.symbol("sharp").unwrap().temperature(), 0.0);
    assert_eq!(cfg.function("p").unwrap(), SpectralFunction::parabola());
    let plan = cfg.plan("super").unwrap();
    assert_eq!(plan.points.len(), 4);
    let inline = cfg.region(r#"{kind="rect", lo=[0,0], hi=[1,2]}"#).unwrap();
    assert!((inline.measure() - 2.0).abs() < 1e-15);
    assert!(cfg.region("nope").is_err());
    assert!(Config::parse("[regions]\nx = { kind = \"blob\" }").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn regime_tagging(start in 0.01f64..500.0, ratio in 1.1f64..4.0, n in 4usize..9, pick in 0usize..3) {
        let regime = [Regime::SubCritical, Regime::Critical, Regime::SuperCritical][pick];
        let start = if regime == Regime::SuperCritical { start.min(0.99) } else { start };
        let mut base = BaseConfig::new(fermi(), unit(), eta1(), start);
        base.ratio = ratio;
        let plan = plan_sweep(regime, base, n).unwrap();
        prop_assert_eq!(plan.points.len(), n);
        for &(a, t) in &plan.points {
            prop_assert!(regime.admits(a, t));
        }
    }

    #[test]
    fn synthetic_fit_exactness(slope in -5.0f64..5.0, intercept in -10.0f64..10.0, a0 in 1.0f64..100.0) {
        let xs: Vec<f64> = (0..5).map(|k| a0 * 2f64.powi(k)).collect();
        let f = fit_log_slope(&synthetic(&xs, slope, intercept), Predictor::LogAlpha, Response::Trace, None).unwrap();
        prop_assert!((f.slope - slope).abs() < 1e-12);
        prop_assert!((f.intercept - intercept).abs() < 1e-11 * (1.0 + intercept.abs()));
    }
}
