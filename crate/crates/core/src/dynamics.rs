//! Electron beam dynamics around the solenoid.
//!
//! Beams move in the plane, in cylindrical coordinates (r, θ) about the
//! solenoid axis, under the Lorentz force of an axisymmetric field
//! A = A_θ(r, t) θ̂ (A₀ = 0):
//!
//! ```text
//! dv_r/dt = r ω² + (e/m) ω r B_z + F_guide/m
//! d(r² ω)/dt = (e/m) r (E_θ − v_r B_z)
//! ```
//!
//! Beam 1 circulates counter-clockwise (path sign +1), beam 2 clockwise
//! (path sign −1). Angles and angular velocities are stored signed in the
//! lab frame; the swept rate of a beam is `path_sign · ω`.
//!
//! Integration is classical fixed-step RK4. Flux breakpoints are always
//! grid points, and at a flux jump the canonical angular momentum
//! m r² ω + e r A_θ is carried across so the impulsive torque of the
//! delta-function E field is exact.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::FieldModel;
use crate::flux::Side;

/// Default number of integration steps per estimated meeting time.
pub const DEFAULT_STEPS_PER_RUN: f64 = 1e5;

/// Default meeting-event tolerance on the swept-angle sum, in radians.
pub const DEFAULT_EVENT_TOLERANCE: f64 = 1e-12 * TAU;

const MAX_GRID_STEPS: f64 = 5e7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleConfig {
    pub charge_e: f64,
    pub mass_m: f64,
}

impl ParticleConfig {
    pub fn new(charge_e: f64, mass_m: f64) -> Result<Self> {
        let p = ParticleConfig { charge_e, mass_m };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass_m > 0.0 && self.mass_m.is_finite()) {
            return Err(Error::invalid(
                "particle.mass_m",
                format!("must be finite and > 0, got {}", self.mass_m),
            ));
        }
        if self.charge_e == 0.0 || !self.charge_e.is_finite() {
            return Err(Error::invalid(
                "particle.charge_e",
                format!("must be finite and nonzero, got {}", self.charge_e),
            ));
        }
        Ok(())
    }

    fn charge_to_mass(&self) -> f64 {
        self.charge_e / self.mass_m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PathSign {
    /// Beam 1, counter-clockwise.
    Positive,
    /// Beam 2, clockwise.
    Negative,
}

impl PathSign {
    pub fn value(self) -> f64 {
        match self {
            PathSign::Positive => 1.0,
            PathSign::Negative => -1.0,
        }
    }

    /// Sign of beam `index` (0 → beam 1, 1 → beam 2).
    pub fn of_beam(index: usize) -> Self {
        if index == 0 {
            PathSign::Positive
        } else {
            PathSign::Negative
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamState {
    pub r: f64,
    /// Unwrapped lab-frame angle.
    pub theta: f64,
    pub v_r: f64,
    /// Lab-frame angular velocity dθ/dt.
    pub omega: f64,
    pub t: f64,
    pub path_sign: PathSign,
}

impl BeamState {
    /// Angular speed in the beam's own direction of circulation.
    pub fn swept_rate(&self) -> f64 {
        self.path_sign.value() * self.omega
    }

    /// Angle swept in the beam's own direction since `theta0`.
    pub fn swept_angle(&self, theta0: f64) -> f64 {
        self.path_sign.value() * (self.theta - theta0)
    }

    pub fn speed_squared(&self) -> f64 {
        self.v_r * self.v_r + self.r * self.r * self.omega * self.omega
    }

    pub fn kinetic_energy(&self, particle: &ParticleConfig) -> f64 {
        0.5 * particle.mass_m * self.speed_squared()
    }

    /// Kinetic angular momentum m r² ω (lab frame, signed).
    pub fn angular_momentum(&self, particle: &ParticleConfig) -> f64 {
        particle.mass_m * self.r * self.r * self.omega
    }

    /// Canonical angular momentum m r² ω + e r A_θ, conserved for any
    /// axisymmetric field and any central guiding force.
    pub fn canonical_angular_momentum(&self, particle: &ParticleConfig, a_theta: f64) -> f64 {
        self.angular_momentum(particle) + particle.charge_e * self.r * a_theta
    }

    fn to_array(self) -> [f64; 4] {
        [self.r, self.v_r, self.theta, self.omega]
    }

    fn with_array(self, y: [f64; 4], t: f64) -> Self {
        BeamState {
            r: y[0],
            v_r: y[1],
            theta: y[2],
            omega: y[3],
            t,
            path_sign: self.path_sign,
        }
    }
}

/// Central harmonic guiding force F = −m κ² r r̂.
///
/// It exerts no torque, so it leaves the tangential dynamics (and the
/// canonical angular momentum) untouched. With no flux and κ equal to the
/// launch angular speed a beam launched with v_r = 0 stays on a circle;
/// a radial kick turns the orbit into an origin-centred ellipse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGuide {
    pub omega: f64,
}

impl RadialGuide {
    pub const NONE: RadialGuide = RadialGuide { omega: 0.0 };

    pub fn potential_energy(&self, particle: &ParticleConfig, r: f64) -> f64 {
        0.5 * particle.mass_m * self.omega * self.omega * r * r
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BeamPath {
    /// Both beams held on the circle r = radius; only the azimuthal motion evolves.
    Circular { radius: f64 },
    /// Beams follow the Lorentz force plus a central guiding force.
    Free { guide: RadialGuide },
}

impl BeamPath {
    pub fn is_circular(&self) -> bool {
        matches!(self, BeamPath::Circular { .. })
    }
}

/// Launch conditions of one beam. `omega0` is the swept angular speed in
/// the beam's own direction and must be positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamLaunch {
    pub r0: f64,
    pub v_r0: f64,
    pub omega0: f64,
}

/// ω(t) = ω(0) − s (e / m R) [A_θ(R, t) − A_θ(R, 0)] for a beam held on a
/// circle of radius R, as a swept angular speed. `path_sign` is +1 for
/// beam 1 and −1 for beam 2.
pub fn circular_omega(
    particle: &ParticleConfig,
    radius: f64,
    omega0: f64,
    a_theta_now: f64,
    a_theta_initial: f64,
    path_sign: PathSign,
) -> f64 {
    omega0 - path_sign.value() * particle.charge_to_mass() / radius * (a_theta_now - a_theta_initial)
}

/// Everything needed to launch and evolve a pair of beams.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSetup {
    pub particle: ParticleConfig,
    pub field: FieldModel,
    pub path: BeamPath,
    pub launch: [BeamLaunch; 2],
}

impl PairSetup {
    pub fn new(
        particle: ParticleConfig,
        field: FieldModel,
        path: BeamPath,
        launch: [BeamLaunch; 2],
    ) -> Result<Self> {
        let s = PairSetup {
            particle,
            field,
            path,
            launch,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.particle.validate()?;
        let a = self.field.solenoid().radius_a;
        match self.path {
            BeamPath::Circular { radius } => {
                if !(radius > a) || !radius.is_finite() {
                    return Err(Error::invalid(
                        "beams.R",
                        format!("circular radius inside solenoid: R = {radius} <= a = {a}"),
                    ));
                }
            }
            BeamPath::Free { guide } => {
                if !(guide.omega >= 0.0) || !guide.omega.is_finite() {
                    return Err(Error::invalid(
                        "beams.guide_omega",
                        format!("must be finite and >= 0, got {}", guide.omega),
                    ));
                }
                for l in &self.launch {
                    if !(l.r0 > a) || !l.r0.is_finite() {
                        return Err(Error::invalid(
                            "beams.r0",
                            format!("launch radius must lie outside the solenoid: r0 = {} <= a = {a}", l.r0),
                        ));
                    }
                    if !l.v_r0.is_finite() {
                        return Err(Error::invalid("beams.v_r0", "must be finite"));
                    }
                }
            }
        }
        for (name, l) in [("beams.omega0_1", &self.launch[0]), ("beams.omega0_2", &self.launch[1])] {
            if !(l.omega0 > 0.0) || !l.omega0.is_finite() {
                return Err(Error::invalid(
                    name,
                    format!("swept angular speed must be finite and > 0, got {}", l.omega0),
                ));
            }
        }
        Ok(())
    }

    /// Both beams start from mirror-image conditions.
    pub fn is_symmetric(&self) -> bool {
        let [l1, l2] = self.launch;
        l1.omega0 == l2.omega0
            && (self.path.is_circular() || (l1.r0 == l2.r0 && l1.v_r0 == l2.v_r0))
    }

    fn launch_radius(&self, beam: usize) -> f64 {
        match self.path {
            BeamPath::Circular { radius } => radius,
            BeamPath::Free { .. } => self.launch[beam].r0,
        }
    }

    pub fn initial_states(&self) -> [BeamState; 2] {
        std::array::from_fn(|beam| {
            let sign = PathSign::of_beam(beam);
            let l = self.launch[beam];
            BeamState {
                r: self.launch_radius(beam),
                theta: 0.0,
                v_r: if self.path.is_circular() { 0.0 } else { l.v_r0 },
                omega: sign.value() * l.omega0,
                t: 0.0,
                path_sign: sign,
            }
        })
    }

    /// L₀ = m r(0)² ω(0) per beam, as magnitudes.
    pub fn initial_angular_momenta(&self) -> [f64; 2] {
        std::array::from_fn(|beam| {
            let r = self.launch_radius(beam);
            self.particle.mass_m * r * r * self.launch[beam].omega0
        })
    }

    /// 2π / (ω₁(0) + ω₂(0)); exact for circular paths.
    pub fn meeting_time_estimate(&self) -> f64 {
        TAU / (self.launch[0].omega0 + self.launch[1].omega0)
    }

    fn integrator(&self, beam: usize) -> Result<BeamIntegrator<'_>> {
        let motion = match self.path {
            BeamPath::Circular { radius } => Motion::Circular {
                radius,
                omega0: self.launch[beam].omega0,
                a_initial: self.field.a_theta_at(radius, 0.0, Side::After)?,
            },
            BeamPath::Free { guide } => Motion::Free {
                guide_k2: guide.omega * guide.omega,
            },
        };
        Ok(BeamIntegrator {
            beam,
            particle: self.particle,
            field: &self.field,
            motion,
            sign: PathSign::of_beam(beam),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunControl {
    /// Largest step; the grid uses the largest even subdivision not exceeding it.
    pub dt: f64,
    pub t_max: f64,
    pub event_tol: f64,
}

impl RunControl {
    /// dt = T/10⁵, t_max = 10 T, event tolerance 1e-12·2π, with T the
    /// circular meeting-time estimate.
    pub fn defaults_for(setup: &PairSetup) -> Self {
        let t_est = setup.meeting_time_estimate();
        RunControl {
            dt: t_est / DEFAULT_STEPS_PER_RUN,
            t_max: 10.0 * t_est,
            event_tol: DEFAULT_EVENT_TOLERANCE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::invalid("run.dt", format!("must be finite and > 0, got {}", self.dt)));
        }
        if !(self.t_max > 0.0) || !self.t_max.is_finite() {
            return Err(Error::invalid(
                "run.t_max",
                format!("must be finite and > 0, got {}", self.t_max),
            ));
        }
        if !(self.event_tol > 0.0) {
            return Err(Error::invalid(
                "run.event_tol",
                format!("must be > 0, got {}", self.event_tol),
            ));
        }
        Ok(())
    }
}

/// Inclusive index range of one smooth stretch of the time grid. Adjacent
/// segments share a time: the end sample of one and the start sample of
/// the next sit on the same breakpoint, holding the one-sided limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
}

impl Segment {
    pub fn steps(&self) -> usize {
        self.end - self.start
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamPairRun {
    beams: [Vec<BeamState>; 2],
    segments: Vec<Segment>,
    initial_angular_momenta: [f64; 2],
    meeting_time: f64,
    grid_dt: f64,
    event_residual: f64,
    event_tol: f64,
}

impl BeamPairRun {
    /// Assemble a run from raw samples. [`Self::check_complete`] decides
    /// whether it can be used for phase accumulation.
    pub fn from_parts(
        beam1: Vec<BeamState>,
        beam2: Vec<BeamState>,
        segments: Vec<Segment>,
        initial_angular_momenta: [f64; 2],
        meeting_time: f64,
        grid_dt: f64,
        event_tol: f64,
    ) -> Self {
        let event_residual = match (beam1.first(), beam1.last(), beam2.first(), beam2.last()) {
            (Some(a0), Some(a1), Some(b0), Some(b1)) => {
                a1.swept_angle(a0.theta) + b1.swept_angle(b0.theta) - TAU
            }
            _ => f64::NAN,
        };
        BeamPairRun {
            beams: [beam1, beam2],
            segments,
            initial_angular_momenta,
            meeting_time,
            grid_dt,
            event_residual,
            event_tol,
        }
    }

    pub fn beam1(&self) -> &[BeamState] {
        &self.beams[0]
    }

    pub fn beam2(&self) -> &[BeamState] {
        &self.beams[1]
    }

    pub fn beam(&self, index: usize) -> &[BeamState] {
        &self.beams[index]
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.beams[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.beams[0].is_empty()
    }

    pub fn meeting_time(&self) -> f64 {
        self.meeting_time
    }

    pub fn grid_dt(&self) -> f64 {
        self.grid_dt
    }

    /// Swept-angle sum minus 2π at the final sample.
    pub fn event_residual(&self) -> f64 {
        self.event_residual
    }

    pub fn initial_angular_momenta(&self) -> [f64; 2] {
        self.initial_angular_momenta
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.beams[0].iter().map(|s| s.t)
    }

    /// Which one-sided limit sample `index` represents.
    pub fn side_of(&self, index: usize) -> Side {
        if self.segments.iter().any(|s| s.end == index && s.start != index) {
            Side::Before
        } else {
            Side::After
        }
    }

    /// |r₁(T) − r₂(T)|
    pub fn final_radial_separation(&self) -> f64 {
        match (self.beams[0].last(), self.beams[1].last()) {
            (Some(a), Some(b)) => (a.r - b.r).abs(),
            _ => f64::NAN,
        }
    }

    pub fn check_complete(&self) -> Result<()> {
        let n = self.beams[0].len();
        if n < 3 || self.beams[1].len() != n {
            return Err(Error::IncompleteRun(format!(
                "need two equal-length beams with >= 3 samples, got {} and {}",
                n,
                self.beams[1].len()
            )));
        }
        if self.segments.is_empty()
            || self.segments[0].start != 0
            || self.segments.last().map(|s| s.end) != Some(n - 1)
            || self.segments.iter().any(|s| s.steps() < 2 || s.steps() % 2 != 0)
            || self.segments.windows(2).any(|w| w[1].start != w[0].end + 1)
        {
            return Err(Error::IncompleteRun(
                "segments must tile the samples with an even number of steps each".into(),
            ));
        }
        let first = self.beams[0][0].t;
        let last = self.beams[0][n - 1].t;
        if first != 0.0 || last != self.meeting_time {
            return Err(Error::IncompleteRun(format!(
                "samples span [{first}, {last}] but the meeting time is {}",
                self.meeting_time
            )));
        }
        if !(self.event_residual.abs() <= self.event_tol) {
            return Err(Error::IncompleteRun(format!(
                "swept-angle sum misses 2π by {} (tolerance {})",
                self.event_residual, self.event_tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
enum Motion {
    Circular {
        radius: f64,
        omega0: f64,
        a_initial: f64,
    },
    Free {
        guide_k2: f64,
    },
}

struct BeamIntegrator<'a> {
    beam: usize,
    particle: ParticleConfig,
    field: &'a FieldModel,
    motion: Motion,
    sign: PathSign,
}

impl BeamIntegrator<'_> {
    fn hit(&self, t: f64, r: f64) -> Error {
        Error::TrajectoryHitsSolenoid {
            beam: self.beam + 1,
            t,
            r,
            radius_a: self.field.solenoid().radius_a,
        }
    }

    fn check_exterior(&self, t: f64, r: f64) -> Result<()> {
        if r > self.field.solenoid().radius_a && r.is_finite() {
            Ok(())
        } else {
            Err(self.hit(t, r))
        }
    }

    fn circular_lab_omega(&self, radius: f64, omega0: f64, a_initial: f64, t: f64, side: Side) -> Result<f64> {
        let a_now = self.field.a_theta_at(radius, t, side)?;
        Ok(self.sign.value()
            * circular_omega(&self.particle, radius, omega0, a_now, a_initial, self.sign))
    }

    fn derivative(&self, t: f64, side: Side, y: [f64; 4]) -> Result<[f64; 4]> {
        match self.motion {
            Motion::Circular {
                radius,
                omega0,
                a_initial,
            } => Ok([
                0.0,
                0.0,
                self.circular_lab_omega(radius, omega0, a_initial, t, side)?,
                0.0,
            ]),
            Motion::Free { guide_k2 } => {
                let [r, v_r, _, omega] = y;
                self.check_exterior(t, r)?;
                let f = self.field.sample_at(r, t, side)?;
                let q = self.particle.charge_to_mass();
                Ok([
                    v_r,
                    r * omega * omega + q * omega * r * f.b_z - guide_k2 * r,
                    omega,
                    (q * (f.e_theta - v_r * f.b_z) - 2.0 * v_r * omega) / r,
                ])
            }
        }
    }

    /// One RK4 step from `state` to `t_next`, both ends inside one smooth
    /// segment: the start is evaluated from the right, the end from the left.
    fn step(&self, state: &BeamState, t_next: f64) -> Result<BeamState> {
        let t = state.t;
        let h = t_next - t;
        if !(h > 0.0) {
            return Err(Error::StepUnderflow { dt: h, t });
        }
        let y = state.to_array();
        let axpy = |a: f64, k: &[f64; 4]| -> [f64; 4] { std::array::from_fn(|i| y[i] + a * k[i]) };
        let k1 = self.derivative(t, Side::After, y)?;
        let k2 = self.derivative(t + 0.5 * h, Side::After, axpy(0.5 * h, &k1))?;
        let k3 = self.derivative(t + 0.5 * h, Side::After, axpy(0.5 * h, &k2))?;
        let k4 = self.derivative(t_next, Side::Before, axpy(h, &k3))?;
        let mut next: [f64; 4] =
            std::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
        if let Motion::Circular {
            radius,
            omega0,
            a_initial,
        } = self.motion
        {
            next[3] = self.circular_lab_omega(radius, omega0, a_initial, t_next, Side::Before)?;
        }
        self.check_exterior(t_next, next[0])?;
        Ok(state.with_array(next, t_next))
    }

    /// Carry the state across a breakpoint at `state.t`, from its left
    /// limit to its right limit.
    fn cross_breakpoint(&self, state: &BeamState) -> Result<BeamState> {
        let t = state.t;
        let mut next = *state;
        match self.motion {
            Motion::Circular {
                radius,
                omega0,
                a_initial,
            } => {
                next.omega = self.circular_lab_omega(radius, omega0, a_initial, t, Side::After)?;
            }
            Motion::Free { .. } => {
                let before = self.field.a_theta_at(state.r, t, Side::Before)?;
                let after = self.field.a_theta_at(state.r, t, Side::After)?;
                next.omega -= self.particle.charge_e * (after - before) / (self.particle.mass_m * state.r);
            }
        }
        Ok(next)
    }
}

/// Breakpoints strictly inside (t0, t1), ascending.
fn interior_breakpoints(field: &FieldModel, t0: f64, t1: f64) -> Vec<f64> {
    let mut knots: Vec<f64> = field
        .flux()
        .breakpoints()
        .into_iter()
        .filter(|&k| k > t0 && k < t1)
        .collect();
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    knots
}

fn even_steps(len: f64, dt: f64, t: f64) -> Result<usize> {
    let n = (len / (2.0 * dt)).ceil() * 2.0;
    if n > MAX_GRID_STEPS {
        return Err(Error::StepUnderflow { dt, t });
    }
    Ok((n as usize).max(2))
}

/// Integrate beams over [t0, t1] on a grid that is uniform inside each
/// smooth segment, returning the samples and the segment table.
fn integrate_segments(
    integrators: &[BeamIntegrator<'_>],
    initial: &[BeamState],
    t1: f64,
    dt: f64,
) -> Result<(Vec<Vec<BeamState>>, Vec<Segment>)> {
    let t0 = initial[0].t;
    if !(dt > 0.0) || t0 + dt == t0 {
        return Err(Error::StepUnderflow { dt, t: t0 });
    }
    let field = integrators[0].field;
    let mut bounds = vec![t0];
    bounds.extend(interior_breakpoints(field, t0, t1));
    bounds.push(t1);

    let mut samples: Vec<Vec<BeamState>> = initial.iter().map(|s| vec![*s]).collect();
    let mut segments = Vec::with_capacity(bounds.len() - 1);
    for (seg_index, w) in bounds.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        if seg_index > 0 {
            for (beam, integ) in integrators.iter().enumerate() {
                let last = *samples[beam].last().expect("non-empty");
                let crossed = integ.cross_breakpoint(&last)?;
                samples[beam].push(crossed);
            }
        }
        let start = samples[0].len() - 1;
        let n = even_steps(b - a, dt, a)?;
        let h = (b - a) / n as f64;
        for j in 1..=n {
            let t_next = if j == n { b } else { a + j as f64 * h };
            for (beam, integ) in integrators.iter().enumerate() {
                let last = *samples[beam].last().expect("non-empty");
                let next = integ.step(&last, t_next)?;
                samples[beam].push(next);
            }
        }
        segments.push(Segment {
            start,
            end: samples[0].len() - 1,
        });
    }
    Ok((samples, segments))
}

/// Integrate one free beam (Lorentz force plus `guide`) from `initial.t`
/// to `t_max`. Flux breakpoints are placed on the grid; each carries two
/// samples holding the left and right limits.
pub fn integrate_free_beam(
    particle: &ParticleConfig,
    field: &FieldModel,
    guide: RadialGuide,
    initial: BeamState,
    dt: f64,
    t_max: f64,
) -> Result<Vec<BeamState>> {
    particle.validate()?;
    field.solenoid().check_exterior(initial.r).map_err(|_| Error::invalid(
        "initial.r",
        format!("launch radius must lie outside the solenoid, got {}", initial.r),
    ))?;
    if !(t_max > initial.t) {
        return Err(Error::invalid(
            "t_max",
            format!("must exceed the start time {}, got {t_max}", initial.t),
        ));
    }
    let integ = BeamIntegrator {
        beam: if initial.path_sign == PathSign::Positive { 0 } else { 1 },
        particle: *particle,
        field,
        motion: Motion::Free {
            guide_k2: guide.omega * guide.omega,
        },
        sign: initial.path_sign,
    };
    let (mut samples, _) = integrate_segments(std::slice::from_ref(&integ), &[initial], t_max, dt)?;
    Ok(samples.pop().expect("one beam"))
}

fn swept_sum(states: &[BeamState; 2]) -> f64 {
    states[0].swept_angle(0.0) + states[1].swept_angle(0.0)
}

/// Locate T with ∑ swept angles = 2π by stepping both beams at `dt` and
/// bisecting the step in which the event function changes sign.
pub fn find_meeting_time(setup: &PairSetup, control: &RunControl) -> Result<f64> {
    setup.validate()?;
    control.validate()?;
    let integrators = [setup.integrator(0)?, setup.integrator(1)?];
    let knots = interior_breakpoints(&setup.field, 0.0, control.t_max);
    let mut knot_iter = knots.iter().copied().peekable();
    let mut states = setup.initial_states();
    let mut t = 0.0;
    loop {
        if t >= control.t_max {
            return Err(Error::NoMeeting {
                t_max: control.t_max,
                swept: swept_sum(&states),
            });
        }
        let next_knot = knot_iter.peek().copied().unwrap_or(f64::INFINITY);
        let t_next = (t + control.dt).min(next_knot).min(control.t_max);
        if !(t_next > t) {
            return Err(Error::StepUnderflow { dt: control.dt, t });
        }
        let next = [integrators[0].step(&states[0], t_next)?, integrators[1].step(&states[1], t_next)?];
        if swept_sum(&next) - TAU >= 0.0 {
            return bisect_event(&integrators, &states, t_next, control.event_tol);
        }
        states = next;
        t = t_next;
        if t_next == next_knot {
            knot_iter.next();
            states = [
                integrators[0].cross_breakpoint(&states[0])?,
                integrators[1].cross_breakpoint(&states[1])?,
            ];
        }
    }
}

fn bisect_event(
    integrators: &[BeamIntegrator<'_>; 2],
    start: &[BeamState; 2],
    t_hi: f64,
    tol: f64,
) -> Result<f64> {
    let g = |t: f64| -> Result<f64> {
        if t == start[0].t {
            return Ok(swept_sum(start) - TAU);
        }
        let s = [integrators[0].step(&start[0], t)?, integrators[1].step(&start[1], t)?];
        Ok(swept_sum(&s) - TAU)
    };
    let (mut lo, mut hi) = (start[0].t, t_hi);
    let mut best = hi;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid)?;
        best = mid;
        if gm.abs() <= 0.01 * tol {
            break;
        }
        if gm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(best)
}

/// Find the meeting time and integrate both beams on a grid landing
/// exactly on it.
///
/// The landing pass uses a uniform subdivision of each smooth segment of
/// [0, T], which can differ from the search pass by the integrator's
/// truncation error; a Newton correction on T absorbs that.
pub fn run_beam_pair(setup: &PairSetup, control: &RunControl) -> Result<BeamPairRun> {
    let mut meeting = find_meeting_time(setup, control)?;
    let integrators = [setup.integrator(0)?, setup.integrator(1)?];
    let initial = setup.initial_states();
    let mut last_residual = f64::NAN;
    for _ in 0..6 {
        let (mut samples, segments) = integrate_segments(&integrators, &initial, meeting, control.dt)?;
        let beam2 = samples.pop().expect("two beams");
        let beam1 = samples.pop().expect("two beams");
        let end = [*beam1.last().expect("non-empty"), *beam2.last().expect("non-empty")];
        let residual = swept_sum(&end) - TAU;
        if residual.abs() <= control.event_tol {
            return Ok(BeamPairRun::from_parts(
                beam1,
                beam2,
                segments,
                setup.initial_angular_momenta(),
                meeting,
                control.dt,
                control.event_tol,
            ));
        }
        last_residual = residual;
        let rate = end[0].swept_rate() + end[1].swept_rate();
        if !(rate > 0.0) {
            break;
        }
        meeting -= residual / rate;
    }
    Err(Error::EventNotConverged {
        residual: last_residual,
        tolerance: control.event_tol,
    })
}

/// m r² ω + (e/2π) Φ(t), the quasistatic first integral of the torque equation.
pub fn quasistatic_canonical_invariant(particle: &ParticleConfig, state: &BeamState, flux: f64) -> f64 {
    state.angular_momentum(particle) + particle.charge_e * flux / (2.0 * PI)
}
