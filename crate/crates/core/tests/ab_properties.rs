use std::f64::consts::{PI, TAU};

use proptest::prelude::*;

use tdab::bessel::{j0, j1, y0, y1};
use tdab::config::{parse_config, to_config_string};
use tdab::dynamics::{circular_omega, run_beam_pair, BeamLaunch, BeamPath, PairSetup, ParticleConfig, PathSign, RunControl};
use tdab::fields::{FieldModel, SolenoidConfig};
use tdab::flux::{FluxProfile, Side};
use tdab::phase::phase_ledger;
use tdab::quadrature::simpson;
use tdab::scenario::{builtin, run_scenario, PathKind, Scenario};

fn flux_strategy() -> impl Strategy<Value = FluxProfile> {
    prop_oneof![
        (-3.0..3.0f64).prop_map(|p| FluxProfile::constant(p).unwrap()),
        (-2.0..2.0f64).prop_map(|a| FluxProfile::linear_ramp(a).unwrap()),
        (-3.0..3.0f64, 0.1..8.0f64).prop_map(|(p, w)| FluxProfile::sinusoidal(p, w).unwrap()),
        (-3.0..3.0f64, 0.0..0.3f64, 0.0..0.05f64, 0.0..0.4f64).prop_map(|(p, on, w, len)| {
            FluxProfile::trapezoidal_pulse(p, on, on + 2.0 * w + len, w).unwrap()
        }),
    ]
}

fn circular_setup(flux: FluxProfile, e: f64, m: f64, radius: f64, w: [f64; 2]) -> PairSetup {
    let field = FieldModel::quasistatic(SolenoidConfig::new(1.0, 1e4).unwrap(), flux).unwrap();
    let l = |omega0| BeamLaunch { r0: radius, v_r0: 0.0, omega0 };
    PairSetup::new(ParticleConfig::new(e, m).unwrap(), field, BeamPath::Circular { radius }, [l(w[0]), l(w[1])])
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn time_average_is_the_antiderivative_over_t(flux in flux_strategy(), t in 0.05..3.0f64) {
        let avg = flux.time_average(t).unwrap();
        prop_assert!((avg - flux.integral_from_zero(t) / t).abs() <= 1e-12 * (1.0 + avg.abs()));
        // fine Simpson oracle on the smooth pieces is within its own error
        let n = 20_000;
        let h = t / n as f64;
        let vals: Vec<f64> = (0..=n).map(|i| flux.value_at(i as f64 * h, Side::After)).collect();
        let q = simpson(&vals, h).unwrap() / t;
        prop_assert!((q - avg).abs() < 1e-3 * (1.0 + avg.abs()));
    }

    #[test]
    fn one_sided_values_bracket_jumps(flux in flux_strategy(), t in 0.0..1.0f64) {
        let jump = flux.value_at(t, Side::After) - flux.value_at(t, Side::Before);
        prop_assert_eq!(jump, flux.jump_at(t));
        prop_assert_eq!(flux.value(t), flux.value_at(t, Side::After));
    }

    #[test]
    fn circular_omega_sum_is_constant(
        flux in flux_strategy(),
        e in prop_oneof![-2.0..-0.1f64, 0.1..2.0f64],
        m in 0.2..3.0f64,
        radius in 1.1..4.0f64,
        w0 in 0.5..5.0f64,
        t in 0.0..2.0f64,
    ) {
        let p = ParticleConfig::new(e, m).unwrap();
        let a_now = flux.value(t) / (TAU * radius);
        let a_start = flux.value(0.0) / (TAU * radius);
        let s = circular_omega(&p, radius, w0, a_now, a_start, PathSign::Positive)
            + circular_omega(&p, radius, w0, a_now, a_start, PathSign::Negative);
        prop_assert!((s - 2.0 * w0).abs() <= 1e-12 * (1.0 + w0 + (e / m * a_now / radius).abs()));
    }

    #[test]
    fn bessel_wronskian(x in 0.01..200.0f64) {
        let w = j1(x) * y0(x) - j0(x) * y1(x);
        prop_assert!((w * PI * x / 2.0 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn exact_field_satisfies_gauge_relations(r in 1.05..8.0f64, t in -5.0..5.0f64, omega in 0.2..3.0f64) {
        let sol = SolenoidConfig::new(1.0, 1.0).unwrap();
        let model = FieldModel::exact_sinusoidal(sol, FluxProfile::sinusoidal(1.3, omega).unwrap()).unwrap();
        let h = 1e-4;
        let s = model.sample(r, t).unwrap();
        let dadt = (model.sample(r, t + h).unwrap().a_theta - model.sample(r, t - h).unwrap().a_theta) / (2.0 * h);
        let curl = |rr: f64| rr * model.sample(rr, t).unwrap().a_theta;
        let b = (curl(r + h) - curl(r - h)) / (2.0 * h) / r / sol.light_speed_c;
        let scale = 1.0 + s.e_theta.abs() + s.b_z.abs();
        prop_assert!((s.e_theta + dadt).abs() < 1e-6 * scale);
        prop_assert!((s.b_z - b).abs() < 1e-6 * scale);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn circular_quasistatic_total_is_initial_flux(
        flux in flux_strategy(),
        e in prop_oneof![-1.5..-0.2f64, 0.2..1.5f64],
        m in 0.5..2.0f64,
        radius in 1.2..3.0f64,
        w0 in 1.0..5.0f64,
    ) {
        let setup = circular_setup(flux, e, m, radius, [w0, w0]);
        let mut ctl = RunControl::defaults_for(&setup);
        ctl.dt = setup.meeting_time_estimate() / 4000.0;
        let run = run_beam_pair(&setup, &ctl).unwrap();
        let l = phase_ledger(&run, &setup.field, &setup.particle).unwrap();
        prop_assert_eq!(l.phi_total, l.phi_ab + l.phi_kin);
        let scale = 1f64.max((e * flux.amplitude().unwrap_or(0.0)).abs());
        prop_assert!((l.phi_total - e * flux.value(0.0)).abs() < 1e-8 * scale,
            "total {} vs {}", l.phi_total, e * flux.value(0.0));
        let avg = flux.time_average(run.meeting_time()).unwrap();
        prop_assert!((l.phi_ab - e * avg).abs() < 1e-8 * scale);
    }

    #[test]
    fn meeting_time_is_flux_independent_for_circles(flux in flux_strategy(), w1 in 0.5..5.0f64, w2 in 0.5..5.0f64) {
        let setup = circular_setup(flux, 1.0, 1.0, 2.0, [w1, w2]);
        let mut ctl = RunControl::defaults_for(&setup);
        ctl.dt = setup.meeting_time_estimate() / 500.0;
        let run = run_beam_pair(&setup, &ctl).unwrap();
        prop_assert!((run.meeting_time() - TAU / (w1 + w2)).abs() < 1e-11);
    }

    #[test]
    fn config_round_trips(
        flux in flux_strategy(),
        free in any::<bool>(),
        radius in 1.5..4.0f64,
        w0 in 0.5..5.0f64,
        v in -0.3..0.3f64,
        dt in proptest::option::of(1e-4..1e-2f64),
    ) {
        let mut s: Scenario = builtin(if free { "free-path-static-sweep" } else { "static-circular" }).unwrap();
        s.flux = flux;
        s.beams.omega0_1 = w0;
        if free {
            s.beams.r0 = Some(radius);
            s.beams.v_r0 = v;
            s.beams.guide_omega = Some(w0);
        } else {
            s.beams.radius = Some(radius);
        }
        s.run.dt = dt;
        prop_assert_eq!(s.beams.path == PathKind::Free, free);
        let text = to_config_string(&s);
        let back = parse_config(&text).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(to_config_string(&back), text);
    }
}

#[test]
fn dynamic_sweep_spread_regression() {
    // Path-dependent AB phase under Φ₀cos(πt), launch speeds 0, ±0.05, ±0.1 of r0ω0.
    let r = run_scenario(&builtin("free-path-dynamic-sweep").unwrap()).unwrap();
    let spread = r.sweep.unwrap().relative_spread.unwrap();
    assert!((spread - 0.084_784_568_119).abs() < 1e-9, "{spread}");
}

#[test]
fn quadrature_refinement_follows_fourth_order() {
    let s = builtin("free-path-dynamic-sweep").unwrap();
    let mut s = s;
    s.beams.sweep_v_r0.clear();
    s.bounds = Default::default();
    let phase = |n: f64| run_scenario(&s.clone().with_dt(1.0 / n)).unwrap().phases;
    let (a, b, c) = (phase(100.0), phase(200.0), phase(400.0));
    let ratio = (a.phi_ab - b.phi_ab).abs() / (b.phi_ab - c.phi_ab).abs();
    assert!(ratio > 12.0 && ratio < 20.0, "{ratio}");
    let ratio = (a.phi_kin - b.phi_kin).abs() / (b.phi_kin - c.phi_kin).abs();
    assert!(ratio > 12.0 && ratio < 20.0, "{ratio}");
}
