//! Named scenarios run end to end: fields, beam dynamics, phases,
//! closed-form predictions and residual checks.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{
    run_beam_pair, BeamLaunch, BeamPairRun, BeamPath, PairSetup, ParticleConfig, RadialGuide, RunControl,
    DEFAULT_EVENT_TOLERANCE, DEFAULT_STEPS_PER_RUN,
};
use crate::error::{Error, Result};
use crate::fields::{
    quasistatic_validity, sample_exact_sinusoidal, FieldModel, FieldModelKind, FieldSample, SolenoidConfig,
    ValidityReport, DEFAULT_VALIDITY_THRESHOLD,
};
use crate::flux::{FluxProfile, Side};
use crate::phase::{closed_form_prediction, phase_ledger, Applicability, ClosedFormPrediction, PhaseLedger};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PathKind {
    Circular,
    Free,
}

impl PathKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PathKind::Circular => "circular",
            PathKind::Free => "free",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "circular" => Some(PathKind::Circular),
            "free" => Some(PathKind::Free),
            _ => None,
        }
    }
}

/// Beam initialisation. `radius` is used for circular paths, `r0`/`v_r0`
/// for free paths; beam 2 mirrors beam 1 unless overridden.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamsConfig {
    pub path: PathKind,
    pub radius: Option<f64>,
    pub omega0_1: f64,
    pub omega0_2: Option<f64>,
    pub r0: Option<f64>,
    pub v_r0: f64,
    pub r0_2: Option<f64>,
    pub v_r0_2: Option<f64>,
    /// Angular frequency κ of the central guide force on free paths;
    /// defaults to the mean launch angular speed.
    pub guide_omega: Option<f64>,
    /// Radial launch speeds, as fractions of r0·ω0, of a path-shape family
    /// run alongside the scenario itself.
    pub sweep_v_r0: Vec<f64>,
}

impl BeamsConfig {
    pub fn omega0_2(&self) -> f64 {
        self.omega0_2.unwrap_or(self.omega0_1)
    }

    pub fn guide_omega(&self) -> f64 {
        self.guide_omega.unwrap_or(0.5 * (self.omega0_1 + self.omega0_2()))
    }

    fn launch(&self) -> [BeamLaunch; 2] {
        let r0 = self.r0.or(self.radius).unwrap_or(f64::NAN);
        [
            BeamLaunch {
                r0,
                v_r0: self.v_r0,
                omega0: self.omega0_1,
            },
            BeamLaunch {
                r0: self.r0_2.unwrap_or(r0),
                v_r0: self.v_r0_2.unwrap_or(self.v_r0),
                omega0: self.omega0_2(),
            },
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunConfig {
    pub dt: Option<f64>,
    pub t_max: Option<f64>,
    pub event_tol: Option<f64>,
}

/// Acceptance bounds a scenario carries with it. Phase residuals are in
/// radians; the AB window and sweep spreads are in units of eΦ₀.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ResidualBounds {
    pub ab: Option<f64>,
    pub kin: Option<f64>,
    pub total: Option<f64>,
    pub ab_window: Option<(f64, f64)>,
    pub canonical_drift: Option<f64>,
    pub spread_max: Option<f64>,
    pub spread_min: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub solenoid: SolenoidConfig,
    pub particle: ParticleConfig,
    pub flux: FluxProfile,
    pub field_model: FieldModelKind,
    pub validity_threshold: f64,
    pub beams: BeamsConfig,
    pub run: RunConfig,
    pub bounds: ResidualBounds,
}

impl Scenario {
    pub fn field(&self) -> Result<FieldModel> {
        FieldModel::new(self.field_model, self.solenoid, self.flux)
    }

    pub fn path(&self) -> BeamPath {
        match self.beams.path {
            PathKind::Circular => BeamPath::Circular {
                radius: self.beams.radius.unwrap_or(f64::NAN),
            },
            PathKind::Free => BeamPath::Free {
                guide: RadialGuide {
                    omega: self.beams.guide_omega(),
                },
            },
        }
    }

    pub fn pair_setup(&self) -> Result<PairSetup> {
        PairSetup::new(self.particle, self.field()?, self.path(), self.beams.launch())
    }

    pub fn run_control(&self, setup: &PairSetup) -> RunControl {
        let d = RunControl::defaults_for(setup);
        RunControl {
            dt: self.run.dt.unwrap_or(d.dt),
            t_max: self.run.t_max.unwrap_or(d.t_max),
            event_tol: self.run.event_tol.unwrap_or(d.event_tol),
        }
    }

    /// Every validation problem, not just the first.
    pub fn validation_errors(&self) -> Vec<String> {
        let mut errs = Vec::new();
        if self.name.trim().is_empty() {
            errs.push("name: must not be empty".to_string());
        }
        let mut push = |r: Result<()>| {
            if let Err(e) = r {
                errs.push(e.to_string());
            }
        };
        push(self.solenoid.validate());
        push(self.particle.validate());
        push(self.flux.validate());
        push(self.field().map(|_| ()));
        match self.beams.path {
            PathKind::Circular => match self.beams.radius {
                None => errs.push("beams.R: required for circular paths".into()),
                Some(r) if !(r > self.solenoid.radius_a) => errs.push(format!(
                    "beams.R: circular radius inside solenoid (R = {r}, radius_a = {})",
                    self.solenoid.radius_a
                )),
                _ => {}
            },
            PathKind::Free => {
                if self.beams.r0.is_none() {
                    errs.push("beams.r0: required for free paths".into());
                }
                if !self.beams.sweep_v_r0.iter().all(|v| v.is_finite()) {
                    errs.push("beams.sweep_v_r0: entries must be finite".into());
                }
            }
        }
        if let Ok(field) = self.field() {
            if let Err(e) = PairSetup::new(self.particle, field, self.path(), self.beams.launch()) {
                let msg = e.to_string();
                if !errs.contains(&msg) && !msg.contains("circular radius inside solenoid") {
                    errs.push(msg);
                }
            }
        }
        if !(self.validity_threshold > 0.0) {
            errs.push(format!(
                "field.validity_threshold: must be > 0, got {}",
                self.validity_threshold
            ));
        }
        for (key, v) in [("run.dt", self.run.dt), ("run.t_max", self.run.t_max), ("run.event_tol", self.run.event_tol)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    errs.push(format!("{key}: must be finite and > 0, got {v}"));
                }
            }
        }
        if let Some((lo, hi)) = self.bounds.ab_window {
            if !(lo <= hi) {
                errs.push(format!("bounds.ab_window: lower {lo} exceeds upper {hi}"));
            }
        }
        errs
    }

    pub fn validate(&self) -> Result<()> {
        let errs = self.validation_errors();
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }

    /// eΦ₀ for profiles with an amplitude.
    pub fn e_phi0(&self) -> Option<f64> {
        self.flux.amplitude().map(|p| self.particle.charge_e * p)
    }

    /// Same scenario with the step overridden.
    pub fn with_dt(mut self, dt: f64) -> Self {
        self.run.dt = Some(dt);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals {
    pub ab: f64,
    pub kin: f64,
    pub total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    pub meeting_time: f64,
    pub event_residual: f64,
    pub final_radial_separation: f64,
    /// Light-travel ratios for a driven flux; absent otherwise.
    pub validity: Option<ValidityReport>,
    /// Largest relative change of m r² ω + e r A_θ along either beam.
    pub canonical_drift: f64,
    pub grid_points: usize,
    pub grid_dt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShapeParams {
    pub r0: f64,
    pub v_r0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepMember {
    pub shape: ShapeParams,
    pub phi_ab: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub members: Vec<SweepMember>,
    /// max − min of Δφ_AB over members that completed.
    pub spread: f64,
    /// Spread divided by |eΦ₀|, when Φ₀ is defined and nonzero.
    pub relative_spread: Option<f64>,
    pub failures: usize,
}

/// One row of the exported time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSeriesRow {
    pub t: f64,
    pub beams: [(f64, f64, f64, f64); 2],
    pub fields: [FieldSample; 2],
    pub phi_ab_partial: f64,
    pub phi_kin_partial: f64,
}

#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub name: String,
    pub phases: PhaseLedger,
    pub prediction: ClosedFormPrediction,
    pub residuals: Option<Residuals>,
    pub diagnostics: Diagnostics,
    pub sweep: Option<SweepReport>,
    pub e_phi0: Option<f64>,
    pub bounds: ResidualBounds,
    pub bound_failures: Vec<String>,
    run: BeamPairRun,
    field: FieldModel,
}

impl ScenarioResult {
    pub fn passed(&self) -> bool {
        self.bound_failures.is_empty()
    }

    pub fn run(&self) -> &BeamPairRun {
        &self.run
    }

    pub fn field(&self) -> &FieldModel {
        &self.field
    }

    pub fn time_series(&self) -> Result<Vec<TimeSeriesRow>> {
        (0..self.run.len())
            .map(|i| {
                let side = self.run.side_of(i);
                let (a, b) = (&self.run.beam1()[i], &self.run.beam2()[i]);
                Ok(TimeSeriesRow {
                    t: a.t,
                    beams: [(a.r, a.theta, a.omega, a.v_r), (b.r, b.theta, b.omega, b.v_r)],
                    fields: [
                        self.field.sample_at(a.r, a.t, side)?,
                        self.field.sample_at(b.r, b.t, side)?,
                    ],
                    phi_ab_partial: self.phases.ab_partials[i],
                    phi_kin_partial: self.phases.kin_partials[i],
                })
            })
            .collect()
    }
}

fn canonical_drift(run: &BeamPairRun, field: &FieldModel, particle: &ParticleConfig) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for beam in 0..2 {
        let states = run.beam(beam);
        let p = |i: usize| -> Result<(f64, f64)> {
            let s = &states[i];
            let a = field.a_theta_at(s.r, s.t, run.side_of(i))?;
            let kinetic = s.angular_momentum(particle);
            let potential = particle.charge_e * s.r * a;
            Ok((kinetic + potential, kinetic.abs() + potential.abs()))
        };
        let (p0, scale) = p(0)?;
        let scale = if scale > 0.0 { scale } else { 1.0 };
        for i in 1..states.len() {
            worst = worst.max((p(i)?.0 - p0).abs() / scale);
        }
    }
    Ok(worst)
}

fn check_bounds(result: &ScenarioResult) -> Vec<String> {
    let mut fails = Vec::new();
    let b = &result.bounds;
    let residual_checks = [("ab", b.ab), ("kin", b.kin), ("total", b.total)];
    for (label, bound) in residual_checks {
        let Some(bound) = bound else { continue };
        match result.residuals {
            None => fails.push(format!("residual_{label}: no closed-form prediction to compare against")),
            Some(r) => {
                let v = match label {
                    "ab" => r.ab,
                    "kin" => r.kin,
                    _ => r.total,
                };
                if !(v <= bound) {
                    fails.push(format!("residual_{label} = {v:e} exceeds {bound:e}"));
                }
            }
        }
    }
    if let Some((lo, hi)) = b.ab_window {
        match result.e_phi0.filter(|&e| e != 0.0) {
            None => fails.push("ab_window: eΦ₀ undefined or zero".into()),
            Some(e) => {
                let x = result.phases.phi_ab / e;
                if !(x >= lo && x <= hi) {
                    fails.push(format!("phi_ab / eΦ₀ = {x} outside [{lo}, {hi}]"));
                }
            }
        }
    }
    if let Some(bound) = b.canonical_drift {
        let d = result.diagnostics.canonical_drift;
        if !(d <= bound) {
            fails.push(format!("canonical drift {d:e} exceeds {bound:e}"));
        }
    }
    if b.spread_max.is_some() || b.spread_min.is_some() {
        match &result.sweep {
            None => fails.push("spread bound set but no path-shape sweep configured".into()),
            Some(s) => {
                if s.failures > 0 {
                    fails.push(format!("{} sweep member(s) failed", s.failures));
                }
                match s.relative_spread {
                    None => fails.push("sweep spread needs a nonzero eΦ₀".into()),
                    Some(x) => {
                        if let Some(max) = b.spread_max {
                            if !(x < max) {
                                fails.push(format!("sweep spread {x:e}·eΦ₀ not below {max:e}"));
                            }
                        }
                        if let Some(min) = b.spread_min {
                            if !(x > min) {
                                fails.push(format!("sweep spread {x:e}·eΦ₀ not above {min:e}"));
                            }
                        }
                    }
                }
            }
        }
    }
    fails
}

/// Run one scenario end to end. Deterministic for a given scenario.
pub fn run_scenario(scenario: &Scenario) -> Result<ScenarioResult> {
    scenario.validate()?;
    let setup = scenario.pair_setup()?;
    let control = scenario.run_control(&setup);
    let run = run_beam_pair(&setup, &control)?;
    let field = setup.field;
    let phases = phase_ledger(&run, &field, &setup.particle)?;
    let prediction = closed_form_prediction(&setup);
    let residuals = match (prediction.predicted_ab, prediction.predicted_kin, prediction.predicted_total) {
        (Some(ab), Some(kin), Some(total)) if prediction.applicability != Applicability::None => Some(Residuals {
            ab: (phases.phi_ab - ab).abs(),
            kin: (phases.phi_kin - kin).abs(),
            total: (phases.phi_total - total).abs(),
        }),
        _ => None,
    };
    let validity = scenario.flux.drive_frequency().map(|omega| {
        let r_max = run
            .beam1()
            .iter()
            .chain(run.beam2())
            .map(|s| s.r)
            .fold(0.0, f64::max);
        quasistatic_validity(&scenario.solenoid, omega, r_max, scenario.validity_threshold)
    });
    let diagnostics = Diagnostics {
        meeting_time: run.meeting_time(),
        event_residual: run.event_residual(),
        final_radial_separation: run.final_radial_separation(),
        validity,
        canonical_drift: canonical_drift(&run, &field, &setup.particle)?,
        grid_points: run.len(),
        grid_dt: run.grid_dt(),
    };
    let sweep = if scenario.beams.path == PathKind::Free && !scenario.beams.sweep_v_r0.is_empty() {
        let r0 = setup.launch[0].r0;
        let w0 = setup.launch[0].omega0;
        let shapes: Vec<ShapeParams> = scenario
            .beams
            .sweep_v_r0
            .iter()
            .map(|f| ShapeParams { r0, v_r0: f * r0 * w0 })
            .collect();
        Some(path_independence_sweep(scenario, &shapes)?)
    } else {
        None
    };
    let mut result = ScenarioResult {
        name: scenario.name.clone(),
        phases,
        prediction,
        residuals,
        diagnostics,
        sweep,
        e_phi0: scenario.e_phi0(),
        bounds: scenario.bounds,
        bound_failures: Vec::new(),
        run,
        field,
    };
    result.bound_failures = check_bounds(&result);
    Ok(result)
}

/// Δφ_AB for each free-path shape (both beams launched from `r0` with
/// radial speed `v_r0`), under the scenario's flux and field. Members
/// that fail (hit the solenoid, never meet) are kept with their error.
pub fn path_independence_sweep(base: &Scenario, shapes: &[ShapeParams]) -> Result<SweepReport> {
    if base.beams.path != PathKind::Free {
        return Err(Error::invalid("beams.path", "a path-shape sweep needs free paths"));
    }
    if shapes.is_empty() {
        return Err(Error::InsufficientPoints { need: 1, got: 0 });
    }
    let members: Vec<SweepMember> = shapes
        .par_iter()
        .map(|&shape| {
            let mut s = base.clone();
            s.beams.r0 = Some(shape.r0);
            s.beams.v_r0 = shape.v_r0;
            s.beams.r0_2 = None;
            s.beams.v_r0_2 = None;
            let outcome = s.pair_setup().and_then(|setup| {
                let run = run_beam_pair(&setup, &s.run_control(&setup))?;
                crate::phase::accumulate_ab_phase(&run, &setup.field, &setup.particle)
            });
            match outcome {
                Ok(phi) => SweepMember { shape, phi_ab: Some(phi), error: None },
                Err(e) => SweepMember { shape, phi_ab: None, error: Some(e.to_string()) },
            }
        })
        .collect();
    let ok: Vec<f64> = members.iter().filter_map(|m| m.phi_ab).collect();
    let spread = if ok.is_empty() {
        f64::NAN
    } else {
        ok.iter().copied().fold(f64::NEG_INFINITY, f64::max) - ok.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let relative_spread = base.e_phi0().filter(|&e| e != 0.0).map(|e| spread / e.abs());
    Ok(SweepReport {
        failures: members.len() - ok.len(),
        members,
        spread,
        relative_spread,
    })
}

/// Slope gate for the quasistatic convergence study: every Ωr/c must
/// stay below this.
pub const CONVERGENCE_GATE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub r_over_a: f64,
    /// (Ω, max_t |A_exact − A_qs| / (Φ₀/2πr))
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
    pub max_kr: f64,
    pub applicable: bool,
}

impl ConvergenceReport {
    pub fn slope_within(&self, target: f64, tol: f64) -> bool {
        self.applicable && (self.slope - target).abs() <= tol
    }
}

/// Log-log slope of the exact-versus-quasistatic deviation of A_θ at
/// r = (r/a)·a against the drive frequency.
///
/// Both potentials are sinusoids in t, so the maximum over t of the
/// difference is its amplitude, evaluated in closed form.
pub fn quasistatic_convergence_sweep(
    solenoid: &SolenoidConfig,
    r_over_a: f64,
    omegas: &[f64],
) -> Result<ConvergenceReport> {
    solenoid.validate()?;
    if omegas.len() < 3 {
        return Err(Error::InsufficientPoints { need: 3, got: omegas.len() });
    }
    if !(r_over_a > 1.0) || !r_over_a.is_finite() {
        return Err(Error::invalid("r_over_a", format!("must exceed 1, got {r_over_a}")));
    }
    let r = r_over_a * solenoid.radius_a;
    let mut points = Vec::with_capacity(omegas.len());
    for &omega in omegas {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::invalid("omega", format!("drive frequencies must be > 0, got {omega}")));
        }
        let flux = FluxProfile::sinusoidal(1.0, omega)?;
        let quarter = 0.5 * PI / omega;
        // A_exact = P sin Ωt − Q cos Ωt, A_qs = cos Ωt / (2πr)
        let p = sample_exact_sinusoidal(solenoid, &flux, r, quarter)?.a_theta;
        let q = -sample_exact_sinusoidal(solenoid, &flux, r, 0.0)?.a_theta;
        let qs = 1.0 / (TAU * r);
        points.push((omega, p.hypot(q + qs) / qs));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let max_kr = omegas.iter().copied().fold(0.0, f64::max) * r / solenoid.light_speed_c;
    Ok(ConvergenceReport {
        r_over_a,
        points,
        slope: sxy / sxx,
        max_kr,
        applicable: max_kr < CONVERGENCE_GATE,
    })
}

/// Run scenarios concurrently; results come back in input order.
pub fn run_suite(scenarios: &[Scenario]) -> Vec<(String, Result<ScenarioResult>)> {
    scenarios
        .par_iter()
        .map(|s| (s.name.clone(), run_scenario(s)))
        .collect()
}

pub const BUILTIN_NAMES: [&str; 7] = [
    "static-circular",
    "linear-ramp-circular",
    "sinusoid-circular-quasistatic",
    "sinusoid-circular-exactfield",
    "pulse-halfphase",
    "free-path-static-sweep",
    "free-path-dynamic-sweep",
];

const RADIUS: f64 = 2.0;
const OMEGA0: f64 = PI;

fn base(name: &str, flux: FluxProfile, path: PathKind) -> Scenario {
    Scenario {
        name: name.to_string(),
        solenoid: SolenoidConfig::new(1.0, 1e4).expect("valid"),
        particle: ParticleConfig::new(1.0, 1.0).expect("valid"),
        flux,
        field_model: FieldModelKind::Quasistatic,
        validity_threshold: DEFAULT_VALIDITY_THRESHOLD,
        beams: BeamsConfig {
            path,
            radius: (path == PathKind::Circular).then_some(RADIUS),
            omega0_1: OMEGA0,
            omega0_2: None,
            r0: (path == PathKind::Free).then_some(RADIUS),
            v_r0: 0.0,
            r0_2: None,
            v_r0_2: None,
            guide_omega: None,
            sweep_v_r0: Vec::new(),
        },
        run: RunConfig::default(),
        bounds: ResidualBounds::default(),
    }
}

fn tight(ab: f64, total: f64) -> ResidualBounds {
    ResidualBounds {
        ab: Some(ab),
        kin: Some(total),
        total: Some(total),
        ..Default::default()
    }
}

/// The builtin scenario registry. Every builtin uses e = m = 1, solenoid
/// radius 1, beams at radius 2 launched at ω₀ = π, so T = 1.
pub fn builtin(name: &str) -> Option<Scenario> {
    let period = TAU / (2.0 * OMEGA0);
    let s = match name {
        "static-circular" => {
            let mut s = base(name, FluxProfile::constant(1.0).ok()?, PathKind::Circular);
            s.bounds = tight(1e-9, 1e-9);
            s
        }
        "linear-ramp-circular" => {
            let mut s = base(name, FluxProfile::linear_ramp(0.5).ok()?, PathKind::Circular);
            s.bounds = tight(1e-8, 1e-8);
            s
        }
        "sinusoid-circular-quasistatic" => {
            let omega = PI / period;
            let mut s = base(name, FluxProfile::sinusoidal(1.0, omega).ok()?, PathKind::Circular);
            s.bounds = tight(1e-8, 1e-8);
            s
        }
        "sinusoid-circular-exactfield" => {
            let omega = PI / period;
            let mut s = base(name, FluxProfile::sinusoidal(1.0, omega).ok()?, PathKind::Circular);
            // Ωa/c = 10⁻³
            s.solenoid = SolenoidConfig::new(1.0, omega * 1e3).ok()?;
            s.field_model = FieldModelKind::ExactSinusoidal;
            s.bounds = tight(1e-8, 1e-8);
            s
        }
        "pulse-halfphase" => {
            // Flux on for the middle half of the run, ramps centred on T/4 and 3T/4.
            let w = period / 100.0;
            let flux = FluxProfile::trapezoidal_pulse(1.0, 0.25 * period - 0.5 * w, 0.75 * period + 0.5 * w, w).ok()?;
            let mut s = base(name, flux, PathKind::Circular);
            s.bounds = tight(1e-8, 1e-8);
            s.bounds.ab_window = Some((0.49, 0.51));
            s
        }
        "free-path-static-sweep" => {
            let mut s = base(name, FluxProfile::constant(1.0).ok()?, PathKind::Free);
            s.beams.v_r0 = 0.1 * RADIUS * OMEGA0;
            s.beams.sweep_v_r0 = vec![0.0, 0.05, -0.05, 0.1, -0.1];
            s.bounds = ResidualBounds {
                ab: Some(1e-9),
                kin: Some(1e-9),
                total: Some(1e-9),
                canonical_drift: Some(1e-8),
                spread_max: Some(1e-6),
                ..Default::default()
            };
            s
        }
        "free-path-dynamic-sweep" => {
            let omega = PI / period;
            let mut s = base(name, FluxProfile::sinusoidal(1.0, omega).ok()?, PathKind::Free);
            s.beams.v_r0 = 0.1 * RADIUS * OMEGA0;
            s.beams.sweep_v_r0 = vec![0.0, 0.05, -0.05, 0.1, -0.1];
            s.bounds = ResidualBounds {
                canonical_drift: Some(1e-8),
                spread_min: Some(1e-3),
                ..Default::default()
            };
            s
        }
        _ => return None,
    };
    Some(s)
}

pub fn builtins() -> Vec<Scenario> {
    BUILTIN_NAMES.iter().filter_map(|n| builtin(n)).collect()
}

/// Default integration step for a scenario, T_est / 10⁵.
pub fn default_dt(scenario: &Scenario) -> f64 {
    let w = scenario.beams.omega0_1 + scenario.beams.omega0_2();
    TAU / w / DEFAULT_STEPS_PER_RUN
}

/// Default meeting-event tolerance, re-exported for config emission.
pub const EVENT_TOLERANCE: f64 = DEFAULT_EVENT_TOLERANCE;

/// Φ_enc(R, 0) = 2πR A_θ(R, 0) for the scenario's field.
pub fn initial_enclosed_flux(scenario: &Scenario, radius: f64) -> Result<f64> {
    Ok(TAU * radius * scenario.field()?.a_theta_at(radius, 0.0, Side::After)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_complete_and_valid() {
        let all = builtins();
        assert_eq!(all.len(), BUILTIN_NAMES.len());
        for s in &all {
            assert!(s.validation_errors().is_empty(), "{}: {:?}", s.name, s.validation_errors());
        }
        assert!(builtin("nope").is_none());
    }

    #[test]
    fn pulse_builtin_averages_to_half() {
        let s = builtin("pulse-halfphase").unwrap();
        assert!((s.flux.time_average(1.0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(s.flux.value(0.0), 0.0);
    }

    #[test]
    fn static_circular_meets_its_bounds() {
        let r = run_scenario(&builtin("static-circular").unwrap().with_dt(1e-3)).unwrap();
        assert!(r.passed(), "{:?}", r.bound_failures);
        assert_eq!(r.prediction.applicability, Applicability::CircularQuasistatic);
        assert!(r.diagnostics.validity.is_none());
        assert!((r.diagnostics.meeting_time - 1.0).abs() < 1e-12);
    }

    #[test]
    fn residuals_present_iff_prediction_applies() {
        let s = builtin("free-path-dynamic-sweep").unwrap().with_dt(1e-3);
        let mut one = s.clone();
        one.beams.sweep_v_r0.clear();
        one.bounds = ResidualBounds::default();
        let r = run_scenario(&one).unwrap();
        assert_eq!(r.prediction.applicability, Applicability::None);
        assert!(r.residuals.is_none());
        let r = run_scenario(&builtin("linear-ramp-circular").unwrap().with_dt(1e-3)).unwrap();
        assert!(r.residuals.is_some());
    }

    #[test]
    fn unmet_bound_is_reported() {
        let mut s = builtin("static-circular").unwrap().with_dt(1e-3);
        s.bounds.ab_window = Some((0.0, 0.5));
        let r = run_scenario(&s).unwrap();
        assert!(!r.passed());
        assert_eq!(r.bound_failures.len(), 1);
    }

    #[test]
    fn sweep_keeps_failed_members() {
        let s = builtin("free-path-static-sweep").unwrap().with_dt(1e-3);
        let shapes = [
            ShapeParams { r0: 2.0, v_r0: 0.0 },
            ShapeParams { r0: 2.0, v_r0: -50.0 },
        ];
        let rep = path_independence_sweep(&s, &shapes).unwrap();
        assert_eq!(rep.members.len(), 2);
        assert_eq!(rep.failures, 1);
        assert!(rep.members[1].error.as_deref().unwrap().contains("hit the solenoid"));
    }

    #[test]
    fn circular_radii_give_identical_static_phase() {
        let s = builtin("static-circular").unwrap().with_dt(1e-3);
        let mut phases = Vec::new();
        for radius in [1.5, 3.0] {
            let mut t = s.clone();
            t.beams.radius = Some(radius);
            phases.push(run_scenario(&t).unwrap().phases.phi_ab);
        }
        assert!((phases[0] - phases[1]).abs() < 1e-9);
    }

    #[test]
    fn convergence_sweep_preconditions() {
        let sol = SolenoidConfig::new(1.0, 1.0).unwrap();
        assert!(matches!(
            quasistatic_convergence_sweep(&sol, 5.0, &[1e-2, 1e-3]),
            Err(Error::InsufficientPoints { need: 3, got: 2 })
        ));
        assert!(quasistatic_convergence_sweep(&sol, 5.0, &[1e-2, 0.0, 1e-3]).is_err());
        // Ωr/c reaches 0.5 at r = 50a
        let far = quasistatic_convergence_sweep(&sol, 50.0, &[1e-2, 3e-3, 1e-3]).unwrap();
        assert!((far.max_kr - 0.5).abs() < 1e-12);
        assert!(!far.applicable);
        assert!(!far.slope_within(far.slope, 1.0));
        let near = quasistatic_convergence_sweep(&sol, 5.0, &[1e-2, 3e-3, 1e-3]).unwrap();
        assert!(near.applicable);
    }

    #[test]
    fn convergence_deviation_decreases_with_frequency() {
        let sol = SolenoidConfig::new(1.0, 1.0).unwrap();
        let rep = quasistatic_convergence_sweep(&sol, 5.0, &[1e-2, 1e-3, 1e-4]).unwrap();
        assert!(rep.points.windows(2).all(|w| w[1].1 < w[0].1));
        assert!(rep.slope > 1.5 && rep.slope < 2.1);
    }
}
