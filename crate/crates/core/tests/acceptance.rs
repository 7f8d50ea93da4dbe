//! Acceptance criteria, one pass/fail line each. Exits nonzero if any fails.

use std::f64::consts::{FRAC_2_PI, PI, TAU};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use tdab::bessel::{j0, j1, y0, y1};
use tdab::dynamics::{quasistatic_canonical_invariant, run_beam_pair};
use tdab::fields::{maxwell_residual, FieldModel, SolenoidConfig};
use tdab::flux::{FluxProfile, Side};
use tdab::output::suite_json;
use tdab::scenario::{
    builtin, builtins, initial_enclosed_flux, path_independence_sweep, quasistatic_convergence_sweep,
    run_scenario, run_suite, Scenario, ShapeParams,
};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn circular(flux: FluxProfile) -> Scenario {
    let mut s = builtin("static-circular").unwrap();
    s.flux = flux;
    s.bounds = Default::default();
    s
}

/// Closed-form (1/T)∫₀ᵀ Φ dt checked against a fine independent Simpson sum.
fn independent_average(flux: &FluxProfile, period: f64) -> f64 {
    let n = 200_000;
    let h = period / n as f64;
    let mut acc = flux.value(0.0) + flux.value_at(period, Side::Before);
    for i in 1..n {
        acc += flux.value(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0 / period
}

fn c1_static_phase() -> Outcome {
    let r = run_scenario(&builtin("static-circular").unwrap()).map_err(|e| e.to_string())?;
    let e_phi0 = r.e_phi0.unwrap();
    let rel = (r.phases.phi_ab - e_phi0).abs() / e_phi0.abs();
    ensure(rel < 1e-9, format!("relative error {rel:.3e} (< 1e-9)"))
}

fn c2_total_identity() -> Outcome {
    let pulse = |p, a, b, w| FluxProfile::trapezoidal_pulse(p, a, b, w).unwrap();
    let profiles = [
        FluxProfile::constant(1.0).unwrap(),
        FluxProfile::constant(-2.5).unwrap(),
        FluxProfile::constant(0.3).unwrap(),
        FluxProfile::linear_ramp(0.5).unwrap(),
        FluxProfile::linear_ramp(-1.2).unwrap(),
        FluxProfile::linear_ramp(3.0).unwrap(),
        FluxProfile::sinusoidal(1.0, 0.5 * PI).unwrap(),
        FluxProfile::sinusoidal(2.0, PI).unwrap(),
        FluxProfile::sinusoidal(0.7, TAU).unwrap(),
        pulse(1.0, 0.2, 0.6, 0.0),
        pulse(1.0, 0.1, 0.9, 0.01),
        pulse(2.0, 0.0, 0.5, 0.05),
    ];
    let mut worst: f64 = 0.0;
    for flux in profiles {
        let s = circular(flux);
        let r = run_scenario(&s).map_err(|e| e.to_string())?;
        let e = s.particle.charge_e;
        let e_phi_start = e * flux.value(0.0);
        let scale = 1f64.max((e * flux.amplitude().unwrap_or(0.0)).abs());
        let err = (r.phases.phi_total - e_phi_start).abs() / scale;
        worst = worst.max(err);
    }
    ensure(worst < 1e-8, format!("12 runs, 4 kinds; worst |Δφ_tot − eΦ(0)| / max(1,|eΦ₀|) = {worst:.3e} (< 1e-8)"))
}

fn c3_time_average() -> Outcome {
    let mut fluxes: Vec<FluxProfile> = [0.5 * PI, PI, TAU]
        .iter()
        .map(|&w| FluxProfile::sinusoidal(1.0, w).unwrap())
        .collect();
    for w in [0.0, 0.01] {
        fluxes.push(FluxProfile::trapezoidal_pulse(1.0, 0.25 - 0.5 * w, 0.75 + 0.5 * w, w).unwrap());
    }
    let mut worst: f64 = 0.0;
    for flux in fluxes {
        let r = run_scenario(&circular(flux)).map_err(|e| e.to_string())?;
        let avg = flux.time_average(1.0).map_err(|e| e.to_string())?;
        if (avg - independent_average(&flux, 1.0)).abs() > 1e-9 {
            return Err(format!("closed-form average disagrees with quadrature for {flux:?}"));
        }
        worst = worst.max((r.phases.phi_ab - avg).abs());
    }
    ensure(worst < 1e-8, format!("ΩT ∈ {{π/2, π, 2π}}, pulse w ∈ {{0, T/100}}; worst {worst:.3e} (< 1e-8)"))
}

fn c4_pulse() -> Outcome {
    let r = run_scenario(&builtin("pulse-halfphase").unwrap()).map_err(|e| e.to_string())?;
    let ratio = r.phases.phi_ab / (0.5 * r.e_phi0.unwrap());
    let mut totals = Vec::new();
    for w in [0.1, 0.01, 0.001, 0.0] {
        let flux = FluxProfile::trapezoidal_pulse(1.0, 0.25 - 0.5 * w, 0.75 + 0.5 * w, w).unwrap();
        totals.push(run_scenario(&circular(flux)).map_err(|e| e.to_string())?.phases.phi_total.abs());
    }
    let tail = *totals.last().unwrap();
    let shown: Vec<String> = totals.iter().map(|t| format!("{t:.1e}")).collect();
    ensure(
        (0.98..=1.02).contains(&ratio) && tail < 1e-8 && totals.iter().all(|t| *t < 1e-8),
        format!("Δφ_AB / (½eΦ₀) = {ratio:.12}; |Δφ_tot| for w = T/10 .. 0: [{}]", shown.join(", ")),
    )
}

fn c5_generalized_circular() -> Outcome {
    let s = builtin("sinusoid-circular-exactfield").unwrap();
    let omega = s.flux.drive_frequency().unwrap();
    let ratio = omega * s.solenoid.radius_a / s.solenoid.light_speed_c;
    let radius = s.beams.radius.unwrap();
    let enclosed = initial_enclosed_flux(&s, radius).map_err(|e| e.to_string())?;
    let r = run_scenario(&s).map_err(|e| e.to_string())?;
    let err = (r.phases.phi_total - s.particle.charge_e * enclosed).abs();
    ensure(
        err < 1e-8 && (ratio - 1e-3).abs() < 1e-15,
        format!("Ωa/c = {ratio:.1e}; eΦ_enc(R,0) = {enclosed:.12}; |Δφ_tot − eΦ_enc| = {err:.3e} (< 1e-8)"),
    )
}

fn sweep_spread(name: &str) -> Result<f64, String> {
    let s = builtin(name).unwrap();
    let r0 = s.beams.r0.unwrap();
    let shapes: Vec<ShapeParams> = s
        .beams
        .sweep_v_r0
        .iter()
        .map(|f| ShapeParams { r0, v_r0: f * r0 * s.beams.omega0_1 })
        .collect();
    let rep = path_independence_sweep(&s, &shapes).map_err(|e| e.to_string())?;
    if rep.failures > 0 || rep.members.len() < 5 {
        return Err(format!("{name}: {} members, {} failed", rep.members.len(), rep.failures));
    }
    Ok(rep.relative_spread.unwrap())
}

fn c6_path_independence() -> Outcome {
    let static_spread = sweep_spread("free-path-static-sweep")?;
    let dynamic_spread = sweep_spread("free-path-dynamic-sweep")?;
    ensure(
        static_spread < 1e-6 && dynamic_spread > 1e-3,
        format!("static spread {static_spread:.3e}·eΦ₀ (< 1e-6); sinusoidal spread {dynamic_spread:.10}·eΦ₀ (> 1e-3)"),
    )
}

fn c7_canonical_invariant() -> Outcome {
    let fluxes = [
        FluxProfile::constant(1.0).unwrap(),
        FluxProfile::linear_ramp(0.8).unwrap(),
        FluxProfile::sinusoidal(1.0, PI).unwrap(),
        FluxProfile::trapezoidal_pulse(1.5, 0.2, 0.7, 0.0).unwrap(),
        FluxProfile::trapezoidal_pulse(1.5, 0.2, 0.7, 0.05).unwrap(),
    ];
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for flux in fluxes {
        for v_frac in [0.0, 0.1, -0.1] {
            let mut s = builtin("free-path-static-sweep").unwrap();
            s.flux = flux;
            s.beams.v_r0 = v_frac * s.beams.r0.unwrap() * s.beams.omega0_1;
            s.beams.sweep_v_r0.clear();
            let setup = s.pair_setup().map_err(|e| e.to_string())?;
            let run = run_beam_pair(&setup, &s.run_control(&setup)).map_err(|e| e.to_string())?;
            for beam in 0..2 {
                let states = run.beam(beam);
                let inv = |i: usize| {
                    let st = &states[i];
                    quasistatic_canonical_invariant(&s.particle, st, flux.value_at(st.t, run.side_of(i)))
                };
                let p0 = inv(0);
                let scale = states[0].angular_momentum(&s.particle).abs() + (flux.value(0.0) / TAU).abs();
                for i in 0..states.len() {
                    worst = worst.max((inv(i) - p0).abs() / scale);
                }
                count += 1;
            }
        }
    }
    ensure(worst < 1e-8, format!("{count} trajectories; worst relative drift {worst:.3e} (< 1e-8)"))
}

fn c8_quasistatic_convergence() -> Outcome {
    let sol = SolenoidConfig::new(1.0, 1.0).unwrap();
    let rep = quasistatic_convergence_sweep(&sol, 5.0, &[1e-2, 3e-3, 1e-3]).map_err(|e| e.to_string())?;
    let pts: Vec<String> = rep.points.iter().map(|(w, d)| format!("Ωa/c={w:.0e}: {d:.4e}")).collect();
    ensure(
        rep.slope_within(2.0, 0.1),
        format!("r = 5a, slope {:.4} (target 2.0 ± 0.1); {}", rep.slope, pts.join(", ")),
    )
}

fn c9_maxwell() -> Outcome {
    let sol = SolenoidConfig::new(1.0, 1.0).unwrap();
    let model = FieldModel::exact_sinusoidal(sol, FluxProfile::sinusoidal(1.0, 1.0).unwrap()).unwrap();
    let mut ratios = Vec::new();
    for &(r, t) in &[(2.5, 0.3), (1.7, 2.0), (4.0, 1.1)] {
        let coarse = maxwell_residual(&model, r, t, 0.02).map_err(|e| e.to_string())?;
        let fine = maxwell_residual(&model, r, t, 0.01).map_err(|e| e.to_string())?;
        ratios.push(coarse.faraday.abs() / fine.faraday.abs());
        ratios.push(coarse.ampere.abs() / fine.ampere.abs());
    }
    ensure(
        ratios.iter().all(|q| (q - 4.0).abs() <= 0.3),
        format!("refinement ratios [{}] (4 ± 0.3)", ratios.iter().map(|q| format!("{q:.3}")).collect::<Vec<_>>().join(", ")),
    )
}

fn c10_special_functions() -> Outcome {
    let n = 5000;
    let mut worst_w: f64 = 0.0;
    for i in 0..=n {
        let x = 0.01 + (50.0 - 0.01) * i as f64 / n as f64;
        let w = j1(x) * y0(x) - j0(x) * y1(x);
        worst_w = worst_w.max((w - 2.0 / (PI * x)).abs());
    }
    let x = 1e-4;
    let laws = [
        (j0(x) - 1.0).abs(),
        (j1(x) / (0.5 * x) - 1.0).abs(),
        (y0(x) / (FRAC_2_PI * ((0.5 * x).ln() + EULER_GAMMA)) - 1.0).abs(),
        (y1(x) / (-2.0 / (PI * x)) - 1.0).abs(),
    ];
    let worst_law = laws.iter().copied().fold(0.0, f64::max);
    ensure(
        worst_w < 1e-10 && worst_law < 1e-6,
        format!("Wronskian max error {worst_w:.3e} (< 1e-10); small-argument max relative error {worst_law:.3e} (< 1e-6)"),
    )
}

fn c11_determinism() -> Outcome {
    let first = suite_json(&run_suite(&builtins())).to_pretty_string();
    let second = suite_json(&run_suite(&builtins())).to_pretty_string();
    ensure(first == second, format!("suite summary {} bytes, identical = {}", first.len(), first == second))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("static AB phase equals eΦ₀", c1_static_phase),
        ("total phase equals eΦ(0) on circular paths", c2_total_identity),
        ("AB phase equals the time-averaged flux", c3_time_average),
        ("intermittent pulse gives half the static phase", c4_pulse),
        ("total phase equals initial enclosed flux (exact fields)", c5_generalized_circular),
        ("static path independence, dynamic path dependence", c6_path_independence),
        ("canonical angular momentum is conserved", c7_canonical_invariant),
        ("quasistatic deviation scales as Ω²", c8_quasistatic_convergence),
        ("Maxwell residuals converge at second order", c9_maxwell),
        ("Bessel Wronskian and small-argument laws", c10_special_functions),
        ("suite summaries are byte-identical", c11_determinism),
    ];
    let mut failed = 0;
    for (i, (title, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into());
            Err(format!("panic: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS [{:>2}] {title}: {detail} ({secs:.2}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{:>2}] {title}: {detail} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
