use hyperscatter::par::Execution;
use hyperscatter::radial::{ModelPotential, RadialOptions};
use hyperscatter::scattering::{
    analytic_amplitude, gamma_report, numeric_amplitude, scaling_sweep, AnalyticAmplitudeParams, KRange, SweepMode,
    SweepOptions,
};
use hyperscatter::Complex64;
use proptest::prelude::*;

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn analytic(p: &ModelPotential, k: f64) -> Complex64 {
    analytic_amplitude(&AnalyticAmplitudeParams::new(p, k)).unwrap()
}

#[test]
fn end_to_end_against_closed_form() {
    let p = ModelPotential::from_qr0(1.0, 0.01, 1.0).unwrap();
    let num = numeric_amplitude(&p, 0.02, &RadialOptions::default()).unwrap();
    let ana = analytic(&p, 0.02);
    assert!((num.f0.norm() / ana.norm() - 1.0).abs() < 0.3, "{} vs {}", num.f0, ana);
    assert!(num.unitarity_defect() < 1e-12);
    assert!(num.stability < 1e-3);
}

#[test]
fn closed_form_doubling_ratio() {
    let p = ModelPotential::from_qr0(1.0, 0.01, 1.0).unwrap();
    let r = analytic(&p, 2e-3).norm() / analytic(&p, 1e-3).norm();
    assert!((r / 64.0 - 1.0).abs() < 1e-3);
}

#[test]
fn numeric_doubling_ratio() {
    let p = ModelPotential::from_qr0(1.5, 0.01, 1.0).unwrap();
    let opts = RadialOptions::default();
    let a = numeric_amplitude(&p, 1e-3, &opts).unwrap().f0.norm();
    let b = numeric_amplitude(&p, 2e-3, &opts).unwrap().f0.norm();
    assert!((b / a / 64.0 - 1.0).abs() < 1e-2, "ratio {}", b / a);
}

#[test]
fn analytic_sweep_exponents() {
    let p = ModelPotential::from_qr0(1.0, 0.01, 1.0).unwrap();
    let range = KRange { lo: 1e-3, hi: 1e-2, points: 16 };
    let res = scaling_sweep(1.0, &range, &p, SweepMode::Analytic, &SweepOptions::default()).unwrap();
    let slope = res.analytic_slope.unwrap().slope;
    assert!((slope - 6.0).abs() < 0.01);
    assert!((res.rate_slope.slope - 2.0 * slope).abs() < 1e-9);
    assert!(!res.flagged);
    for row in &res.rows {
        assert!((row.f0().inv().im - 1.0).abs() < 1e-12);
    }
}

#[test]
fn exponent_is_window_robust() {
    let p = ModelPotential::from_qr0(2.0, 0.01, 1.0).unwrap();
    let opts = SweepOptions::default();
    let slopes: Vec<f64> = [(1e-3, 3e-3), (3e-3, 1e-2), (1e-3, 1e-2)]
        .iter()
        .map(|&(lo, hi)| {
            let range = KRange { lo, hi, points: 8 };
            scaling_sweep(1.0, &range, &p, SweepMode::Numeric, &opts)
                .unwrap()
                .numeric_slope
                .unwrap()
                .slope
        })
        .collect();
    for s in &slopes {
        assert!((s - 6.0).abs() < 0.05, "{slopes:?}");
    }
}

#[test]
fn parallel_and_sequential_agree_bitwise() {
    let p = ModelPotential::from_qr0(1.0, 0.01, 1.0).unwrap();
    let range = KRange { lo: 2e-3, hi: 2e-2, points: 8 };
    let run = |exec| {
        scaling_sweep(1.0, &range, &p, SweepMode::Both, &SweepOptions { exec, ..SweepOptions::default() }).unwrap()
    };
    assert_eq!(run(Execution::Sequential), run(Execution::Parallel));
}

#[test]
fn gamma_table_power_law() {
    let rows = gamma_report(1.0, &[10.0, 20.0, 40.0]).unwrap();
    assert!((rows[1].suppression / rows[0].suppression * 4096.0 - 1.0).abs() < 1e-12);
    assert!((rows[0].suppression - 1e-12).abs() < 1e-24);
    for r in &rows {
        assert!((r.ratio / rows[0].ratio - 1.0).abs() < 1e-12);
    }
    assert!(gamma_report(1.0, &[5.0]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn scale_covariance(s in 0.1f64..10.0, qr0 in 0.5f64..2.0, log_kc in -2.7f64..-2.0) {
        let p = ModelPotential::from_qr0(qr0, 0.01, 1.0).unwrap();
        let k = 10f64.powf(log_kc);
        let ps = p.rescaled(s).unwrap();
        let opts = RadialOptions::default();
        let a = numeric_amplitude(&p, k, &opts).unwrap();
        let b = numeric_amplitude(&ps, k / s, &opts).unwrap();
        prop_assert!(rel(b.f0, a.f0) < 1e-10, "numeric {} vs {}", b.f0, a.f0);
        prop_assert!(rel(analytic(&ps, k / s), analytic(&p, k)) < 1e-10);
        prop_assert!(a.unitarity_defect() < 1e-12 && b.unitarity_defect() < 1e-12);
    }
}
