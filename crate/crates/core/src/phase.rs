//! WKB phase difference between the two beams, split into the
//! Aharonov–Bohm part e∮A·dr and the kinetic part ∫½mv² dt, plus the
//! closed-form predictions those integrals should reproduce.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::dynamics::{BeamPairRun, BeamPath, PairSetup, ParticleConfig};
use crate::error::{Error, Result};
use crate::fields::{FieldModel, FieldModelKind};
use crate::quadrature::cumulative_simpson;

/// Accumulated phases (radians, ħ = 1) with running partial sums on the
/// run's time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseLedger {
    pub phi_ab: f64,
    pub phi_kin: f64,
    pub phi_total: f64,
    pub ab_partials: Vec<f64>,
    pub kin_partials: Vec<f64>,
}

impl PhaseLedger {
    /// (ab, kin, total) divided by eΦ₀, or `None` when eΦ₀ = 0.
    pub fn in_units_of(&self, e_phi0: f64) -> Option<[f64; 3]> {
        if e_phi0 == 0.0 || !e_phi0.is_finite() {
            return None;
        }
        Some([self.phi_ab / e_phi0, self.phi_kin / e_phi0, self.phi_total / e_phi0])
    }
}

fn segmented_cumulative(run: &BeamPairRun, integrand: &[f64]) -> Result<Vec<f64>> {
    let times: Vec<f64> = run.times().collect();
    let mut out = vec![0.0; integrand.len()];
    let mut offset = 0.0;
    for seg in run.segments() {
        let h = (times[seg.end] - times[seg.start]) / seg.steps() as f64;
        let part = cumulative_simpson(&integrand[seg.start..=seg.end], h)?;
        for (k, v) in part.iter().enumerate() {
            out[seg.start + k] = offset + v;
        }
        offset = out[seg.end];
    }
    Ok(out)
}

fn ab_integrand(run: &BeamPairRun, field: &FieldModel, particle: &ParticleConfig) -> Result<Vec<f64>> {
    (0..run.len())
        .map(|i| {
            let side = run.side_of(i);
            let mut sum = 0.0;
            for beam in 0..2 {
                let s = &run.beam(beam)[i];
                sum += field.a_theta_at(s.r, s.t, side)? * s.r * s.swept_rate();
            }
            Ok(particle.charge_e * sum)
        })
        .collect()
}

fn kinetic_integrand(run: &BeamPairRun, particle: &ParticleConfig) -> Vec<f64> {
    run.beam1()
        .iter()
        .zip(run.beam2())
        .map(|(a, b)| a.kinetic_energy(particle) - b.kinetic_energy(particle))
        .collect()
}

/// e∫₀ᵀ [A_θ(r₁,t) r₁ ω̃₁ + A_θ(r₂,t) r₂ ω̃₂] dt with ω̃ the swept rate of
/// each beam, by composite Simpson per grid segment.
pub fn accumulate_ab_phase(run: &BeamPairRun, field: &FieldModel, particle: &ParticleConfig) -> Result<f64> {
    run.check_complete()?;
    let f = ab_integrand(run, field, particle)?;
    Ok(*segmented_cumulative(run, &f)?.last().expect("non-empty"))
}

/// ½m∫₀ᵀ [(v_r₁² + r₁²ω₁²) − (v_r₂² + r₂²ω₂²)] dt.
pub fn accumulate_kinetic_phase(run: &BeamPairRun, particle: &ParticleConfig) -> Result<f64> {
    run.check_complete()?;
    let f = kinetic_integrand(run, particle);
    Ok(*segmented_cumulative(run, &f)?.last().expect("non-empty"))
}

/// Both phase components with partial sums. The totals are the last
/// partials, so they agree exactly with the time series.
pub fn phase_ledger(run: &BeamPairRun, field: &FieldModel, particle: &ParticleConfig) -> Result<PhaseLedger> {
    run.check_complete()?;
    let ab_partials = segmented_cumulative(run, &ab_integrand(run, field, particle)?)?;
    let kin_partials = segmented_cumulative(run, &kinetic_integrand(run, particle))?;
    let phi_ab = *ab_partials.last().expect("non-empty");
    let phi_kin = *kin_partials.last().expect("non-empty");
    Ok(PhaseLedger {
        phi_ab,
        phi_kin,
        phi_total: phi_ab + phi_kin,
        ab_partials,
        kin_partials,
    })
}

/// Quasistatic AB phase rebuilt from the radii alone: the swept rates
/// follow from the canonical invariant,
/// ω̃ₖ = [L₀ₖ ∓ (e/2π)(Φ(t) − Φ(0))] / (m rₖ²), so
/// Δφ_AB = (e/2πm)∫Φ [L₀₁/r₁² + L₀₂/r₂² − (e/2π)(Φ − Φ(0))(1/r₁² − 1/r₂²)] dt.
pub fn general_path_ab_crosscheck(
    run: &BeamPairRun,
    field: &FieldModel,
    particle: &ParticleConfig,
) -> Result<f64> {
    if field.kind() != FieldModelKind::Quasistatic {
        return Err(Error::ModelMismatch(
            "the radius-only AB formula holds for the quasistatic model only".into(),
        ));
    }
    run.check_complete()?;
    let flux = field.flux();
    let phi_start = flux.value_at(0.0, crate::flux::Side::After);
    let [l1, l2] = run.initial_angular_momenta();
    let (e, m) = (particle.charge_e, particle.mass_m);
    let f: Vec<f64> = (0..run.len())
        .map(|i| {
            let (a, b) = (&run.beam1()[i], &run.beam2()[i]);
            let phi = flux.value_at(a.t, run.side_of(i));
            let shift = e / TAU * (phi - phi_start);
            let inv1 = 1.0 / (a.r * a.r);
            let inv2 = 1.0 / (b.r * b.r);
            e / (TAU * m) * phi * (l1 * inv1 + l2 * inv2 - shift * (inv1 - inv2))
        })
        .collect();
    Ok(*segmented_cumulative(run, &f)?.last().expect("non-empty"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Applicability {
    CircularQuasistatic,
    CircularGeneralField,
    StaticAnyPath,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormPrediction {
    pub applicability: Applicability,
    pub predicted_ab: Option<f64>,
    pub predicted_kin: Option<f64>,
    pub predicted_total: Option<f64>,
}

impl ClosedFormPrediction {
    pub const NONE: ClosedFormPrediction = ClosedFormPrediction {
        applicability: Applicability::None,
        predicted_ab: None,
        predicted_kin: None,
        predicted_total: None,
    };

    fn from_parts(applicability: Applicability, ab: f64, total: f64) -> Self {
        ClosedFormPrediction {
            applicability,
            predicted_ab: Some(ab),
            predicted_kin: Some(total - ab),
            predicted_total: Some(total),
        }
    }
}

/// Closed-form phases for a beam-pair setup, where one exists.
///
/// Circular paths with mirror-image starts: Δφ_AB is e times the time
/// average of the flux enclosed by the circle over [0, T] and
/// Δφ_tot = e Φ_enc(R, 0). Under the quasistatic model Φ_enc is the
/// solenoid flux itself. Static flux on any pair of mirror-image paths
/// gives (eΦ₀, 0, eΦ₀). Everything else has no closed form.
pub fn closed_form_prediction(setup: &PairSetup) -> ClosedFormPrediction {
    if !setup.is_symmetric() {
        return ClosedFormPrediction::NONE;
    }
    let e = setup.particle.charge_e;
    let field = &setup.field;
    let flux = field.flux();
    let period = setup.meeting_time_estimate();
    match (setup.path, field.kind()) {
        (BeamPath::Circular { .. }, FieldModelKind::Quasistatic) => {
            let phi0 = flux.value_at(0.0, crate::flux::Side::After);
            match flux.time_average(period) {
                Ok(avg) => ClosedFormPrediction::from_parts(Applicability::CircularQuasistatic, e * avg, e * phi0),
                Err(_) => ClosedFormPrediction::NONE,
            }
        }
        (BeamPath::Circular { radius }, FieldModelKind::ExactSinusoidal) => {
            let avg = field.a_theta_time_average(radius, period);
            let start = field.a_theta_at(radius, 0.0, crate::flux::Side::After);
            match (avg, start) {
                (Ok(avg), Ok(start)) => ClosedFormPrediction::from_parts(
                    Applicability::CircularGeneralField,
                    e * TAU * radius * avg,
                    e * TAU * radius * start,
                ),
                _ => ClosedFormPrediction::NONE,
            }
        }
        (BeamPath::Free { .. }, _) if flux.is_static() => {
            let phi0 = flux.value(0.0);
            ClosedFormPrediction::from_parts(Applicability::StaticAnyPath, e * phi0, e * phi0)
        }
        _ => ClosedFormPrediction::NONE,
    }
}
