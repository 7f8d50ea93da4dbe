//! Solenoid interior flux profiles Φ(t).
//!
//! Every profile is a closed analytic form with an exact derivative and an
//! exact antiderivative, so time averages used as oracles never go through
//! quadrature. Units are natural (ħ = 1); the flux is whatever unit the
//! caller uses for `e·Φ` to come out in radians.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which one-sided limit to take at a breakpoint of a piecewise profile.
///
/// Away from breakpoints both sides give the same value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Before,
    After,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FluxKind {
    Constant,
    LinearRamp,
    Sinusoidal,
    TrapezoidalPulse,
}

impl FluxKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FluxKind::Constant => "constant",
            FluxKind::LinearRamp => "linear_ramp",
            FluxKind::Sinusoidal => "sinusoidal",
            FluxKind::TrapezoidalPulse => "trapezoidal_pulse",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "constant" => Some(FluxKind::Constant),
            "linear_ramp" => Some(FluxKind::LinearRamp),
            "sinusoidal" => Some(FluxKind::Sinusoidal),
            "trapezoidal_pulse" => Some(FluxKind::TrapezoidalPulse),
            _ => None,
        }
    }
}

/// Interior flux of the solenoid as a function of time.
///
/// Build through the checked constructors; [`FluxProfile::validate`] is also
/// run by every consumer that accepts a profile from outside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FluxProfile {
    /// Φ(t) = Φ₀.
    Constant { phi0: f64 },
    /// Φ(t) = α t.
    LinearRamp { alpha: f64 },
    /// Φ(t) = Φ₀ cos(Ω t), so that Φ(0) = Φ₀.
    Sinusoidal { phi0: f64, omega_drive: f64 },
    /// Zero outside [t_on, t_off], linear ramps of width `ramp_width` just
    /// inside each end, and Φ₀ on the flat top in between.
    TrapezoidalPulse {
        phi0: f64,
        t_on: f64,
        t_off: f64,
        ramp_width: f64,
    },
}

impl FluxProfile {
    pub fn constant(phi0: f64) -> Result<Self> {
        let p = FluxProfile::Constant { phi0 };
        p.validate()?;
        Ok(p)
    }

    pub fn linear_ramp(alpha: f64) -> Result<Self> {
        let p = FluxProfile::LinearRamp { alpha };
        p.validate()?;
        Ok(p)
    }

    pub fn sinusoidal(phi0: f64, omega_drive: f64) -> Result<Self> {
        let p = FluxProfile::Sinusoidal { phi0, omega_drive };
        p.validate()?;
        Ok(p)
    }

    pub fn trapezoidal_pulse(phi0: f64, t_on: f64, t_off: f64, ramp_width: f64) -> Result<Self> {
        let p = FluxProfile::TrapezoidalPulse {
            phi0,
            t_on,
            t_off,
            ramp_width,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        fn finite(name: &'static str, v: f64) -> Result<()> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(name, format!("must be finite, got {v}")))
            }
        }
        match *self {
            FluxProfile::Constant { phi0 } => finite("flux.phi0", phi0),
            FluxProfile::LinearRamp { alpha } => finite("flux.alpha", alpha),
            FluxProfile::Sinusoidal { phi0, omega_drive } => {
                finite("flux.phi0", phi0)?;
                finite("flux.omega_drive", omega_drive)?;
                if omega_drive < 0.0 {
                    return Err(Error::invalid(
                        "flux.omega_drive",
                        format!("must be non-negative, got {omega_drive}"),
                    ));
                }
                Ok(())
            }
            FluxProfile::TrapezoidalPulse {
                phi0,
                t_on,
                t_off,
                ramp_width,
            } => {
                finite("flux.phi0", phi0)?;
                finite("flux.t_on", t_on)?;
                finite("flux.t_off", t_off)?;
                finite("flux.ramp_width", ramp_width)?;
                if t_on < 0.0 {
                    return Err(Error::invalid(
                        "flux.t_on",
                        format!("must be >= 0, got {t_on}"),
                    ));
                }
                if ramp_width < 0.0 {
                    return Err(Error::invalid(
                        "flux.ramp_width",
                        format!("must be >= 0, got {ramp_width}"),
                    ));
                }
                if t_on + ramp_width > t_off - ramp_width {
                    return Err(Error::invalid(
                        "flux.t_off",
                        format!(
                            "breakpoints out of order: need t_on + ramp_width <= t_off - ramp_width \
                             (t_on = {t_on}, t_off = {t_off}, ramp_width = {ramp_width})"
                        ),
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn kind(&self) -> FluxKind {
        match self {
            FluxProfile::Constant { .. } => FluxKind::Constant,
            FluxProfile::LinearRamp { .. } => FluxKind::LinearRamp,
            FluxProfile::Sinusoidal { .. } => FluxKind::Sinusoidal,
            FluxProfile::TrapezoidalPulse { .. } => FluxKind::TrapezoidalPulse,
        }
    }

    /// Flux amplitude Φ₀, when the profile has one.
    pub fn amplitude(&self) -> Option<f64> {
        match *self {
            FluxProfile::Constant { phi0 }
            | FluxProfile::Sinusoidal { phi0, .. }
            | FluxProfile::TrapezoidalPulse { phi0, .. } => Some(phi0),
            FluxProfile::LinearRamp { .. } => None,
        }
    }

    /// Drive angular frequency of a sinusoidal profile.
    pub fn drive_frequency(&self) -> Option<f64> {
        match *self {
            FluxProfile::Sinusoidal { omega_drive, .. } => Some(omega_drive),
            _ => None,
        }
    }

    pub fn is_static(&self) -> bool {
        match *self {
            FluxProfile::Constant { .. } => true,
            FluxProfile::LinearRamp { alpha } => alpha == 0.0,
            FluxProfile::Sinusoidal { phi0, omega_drive } => phi0 == 0.0 || omega_drive == 0.0,
            FluxProfile::TrapezoidalPulse { phi0, .. } => phi0 == 0.0,
        }
    }

    /// Φ(t). Right-continuous at the jumps of a zero-width pulse.
    pub fn value(&self, t: f64) -> f64 {
        self.value_at(t, Side::After)
    }

    /// One-sided limit of Φ at `t`.
    pub fn value_at(&self, t: f64, side: Side) -> f64 {
        match *self {
            FluxProfile::Constant { phi0 } => phi0,
            FluxProfile::LinearRamp { alpha } => alpha * t,
            FluxProfile::Sinusoidal { phi0, omega_drive } => phi0 * (omega_drive * t).cos(),
            FluxProfile::TrapezoidalPulse {
                phi0,
                t_on,
                t_off,
                ramp_width,
            } => {
                let up_end = t_on + ramp_width;
                let down_start = t_off - ramp_width;
                let inside_on = match side {
                    Side::After => t >= t_on,
                    Side::Before => t > t_on,
                };
                let inside_off = match side {
                    Side::After => t < t_off,
                    Side::Before => t <= t_off,
                };
                if !(inside_on && inside_off) {
                    0.0
                } else if t < up_end {
                    phi0 * (t - t_on) / ramp_width
                } else if t > down_start {
                    phi0 * (t_off - t) / ramp_width
                } else {
                    phi0
                }
            }
        }
    }

    /// Exact dΦ/dt.
    ///
    /// At the corners of a ramped pulse this returns the right derivative. A
    /// zero-width pulse has jumps at `t_on` and `t_off`; asking for the
    /// derivative there is an error and callers must use [`Self::derivative_at`].
    pub fn derivative(&self, t: f64) -> Result<f64> {
        if let FluxProfile::TrapezoidalPulse {
            t_on,
            t_off,
            ramp_width,
            phi0,
        } = *self
        {
            if ramp_width == 0.0 && phi0 != 0.0 && (t == t_on || t == t_off) {
                return Err(Error::NonDifferentiable { t });
            }
        }
        Ok(self.derivative_at(t, Side::After))
    }

    /// One-sided derivative. Finite everywhere, including at pulse jumps
    /// where both sides are flat.
    pub fn derivative_at(&self, t: f64, side: Side) -> f64 {
        match *self {
            FluxProfile::Constant { .. } => 0.0,
            FluxProfile::LinearRamp { alpha } => alpha,
            FluxProfile::Sinusoidal { phi0, omega_drive } => {
                -phi0 * omega_drive * (omega_drive * t).sin()
            }
            FluxProfile::TrapezoidalPulse {
                phi0,
                t_on,
                t_off,
                ramp_width,
            } => {
                if ramp_width == 0.0 {
                    return 0.0;
                }
                let up_end = t_on + ramp_width;
                let down_start = t_off - ramp_width;
                let in_open = |lo: f64, hi: f64| match side {
                    Side::After => t >= lo && t < hi,
                    Side::Before => t > lo && t <= hi,
                };
                if in_open(t_on, up_end) {
                    phi0 / ramp_width
                } else if in_open(down_start, t_off) {
                    -phi0 / ramp_width
                } else {
                    0.0
                }
            }
        }
    }

    /// Φ(t⁺) − Φ(t⁻); nonzero only at the jumps of a zero-width pulse.
    pub fn jump_at(&self, t: f64) -> f64 {
        self.value_at(t, Side::After) - self.value_at(t, Side::Before)
    }

    /// Closed-form ∫₀ᵗ Φ(s) ds.
    pub fn integral_from_zero(&self, t: f64) -> f64 {
        match *self {
            FluxProfile::Constant { phi0 } => phi0 * t,
            FluxProfile::LinearRamp { alpha } => 0.5 * alpha * t * t,
            FluxProfile::Sinusoidal { phi0, omega_drive } => {
                if omega_drive == 0.0 {
                    phi0 * t
                } else {
                    phi0 * (omega_drive * t).sin() / omega_drive
                }
            }
            FluxProfile::TrapezoidalPulse {
                phi0,
                t_on,
                t_off,
                ramp_width: w,
            } => {
                // t_on >= 0 is enforced, so the pulse contributes nothing before 0.
                let up_end = t_on + w;
                let down_start = t_off - w;
                let flat = down_start - up_end;
                if t <= t_on {
                    0.0
                } else if t < up_end {
                    let s = t - t_on;
                    phi0 * s * s / (2.0 * w)
                } else if t < down_start {
                    phi0 * (0.5 * w + (t - up_end))
                } else if t < t_off {
                    let s = t - down_start;
                    phi0 * (0.5 * w + flat + s - s * s / (2.0 * w))
                } else {
                    phi0 * (w + flat)
                }
            }
        }
    }

    /// Closed-form (1/T) ∫₀ᵀ Φ(t) dt.
    pub fn time_average(&self, period: f64) -> Result<f64> {
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::Domain {
                what: "averaging window T",
                reason: format!("must be finite and > 0, got {period}"),
            });
        }
        Ok(self.integral_from_zero(period) / period)
    }

    /// Times where Φ or dΦ/dt is not smooth. Fixed-step integrators place
    /// grid points on these so every step sees a polynomial-smooth profile.
    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            FluxProfile::TrapezoidalPulse {
                t_on,
                t_off,
                ramp_width,
                ..
            } => {
                let mut knots = vec![t_on, t_on + ramp_width, t_off - ramp_width, t_off];
                knots.dedup();
                knots
            }
            _ => Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn all_profiles() -> Vec<FluxProfile> {
        vec![
            FluxProfile::constant(3.0).unwrap(),
            FluxProfile::linear_ramp(2.0).unwrap(),
            FluxProfile::sinusoidal(1.3, 2.0).unwrap(),
            FluxProfile::trapezoidal_pulse(1.0, 0.25, 0.75, 0.01).unwrap(),
            FluxProfile::trapezoidal_pulse(-0.7, 0.1, 0.9, 0.0).unwrap(),
        ]
    }

    #[test]
    fn values_match_definitions() {
        assert_eq!(FluxProfile::constant(3.0).unwrap().value(17.0), 3.0);
        assert_eq!(FluxProfile::linear_ramp(2.0).unwrap().value(1.5), 3.0);
        let pulse = FluxProfile::trapezoidal_pulse(1.0, 0.25, 0.75, 0.0).unwrap();
        assert_eq!(pulse.value(0.5), 1.0);
        assert_eq!(pulse.value(0.1), 0.0);
        assert_eq!(pulse.value(0.8), 0.0);
        let s = FluxProfile::sinusoidal(1.0, 2.0).unwrap();
        assert_eq!(s.value(0.0), 1.0);
    }

    #[test]
    fn derivatives_match_definitions() {
        let c = FluxProfile::constant(3.0).unwrap();
        assert_eq!(c.derivative(0.3).unwrap(), 0.0);
        let s = FluxProfile::sinusoidal(1.0, 2.0).unwrap();
        assert_eq!(s.derivative(0.0).unwrap(), 0.0);
        let l = FluxProfile::linear_ramp(2.0).unwrap();
        assert_eq!(l.derivative(9.0).unwrap(), 2.0);
    }

    #[test]
    fn zero_width_pulse_jump_is_not_differentiable() {
        let p = FluxProfile::trapezoidal_pulse(1.0, 0.25, 0.75, 0.0).unwrap();
        assert!(matches!(
            p.derivative(0.25),
            Err(Error::NonDifferentiable { .. })
        ));
        assert!(matches!(
            p.derivative(0.75),
            Err(Error::NonDifferentiable { .. })
        ));
        assert_eq!(p.derivative_at(0.25, Side::Before), 0.0);
        assert_eq!(p.derivative_at(0.25, Side::After), 0.0);
        assert_eq!(p.jump_at(0.25), 1.0);
        assert_eq!(p.jump_at(0.75), -1.0);
        assert_eq!(p.value_at(0.75, Side::Before), 1.0);
        assert_eq!(p.value_at(0.75, Side::After), 0.0);
    }

    #[test]
    fn ramped_pulse_one_sided_derivatives() {
        let p = FluxProfile::trapezoidal_pulse(2.0, 0.2, 0.8, 0.1).unwrap();
        assert_eq!(p.derivative_at(0.2, Side::Before), 0.0);
        assert_eq!(p.derivative_at(0.2, Side::After), 20.0);
        let top = 0.2 + 0.1;
        assert_eq!(p.derivative_at(top, Side::Before), 20.0);
        assert_eq!(p.derivative_at(top, Side::After), 0.0);
        assert_eq!(p.derivative_at(0.8, Side::Before), -20.0);
        assert_eq!(p.jump_at(0.2), 0.0);
        assert_eq!(p.breakpoints(), vec![0.2, 0.30000000000000004, 0.7000000000000001, 0.8]);
    }

    #[test]
    fn central_difference_is_second_order() {
        for p in all_profiles() {
            for &t in &[0.137, 0.4, 0.61, 1.9] {
                let err = |h: f64| {
                    let fd = (p.value(t + h) - p.value(t - h)) / (2.0 * h);
                    (fd - p.derivative(t).unwrap()).abs()
                };
                let (e1, e2) = (err(1e-3), err(5e-4));
                // Piecewise-linear pieces are differentiated exactly.
                if e1 > 1e-12 {
                    let ratio = e1 / e2;
                    assert!((ratio - 4.0).abs() < 0.1, "{p:?} t={t} ratio={ratio}");
                } else {
                    assert!(e2 < 1e-10);
                }
            }
        }
    }

    #[test]
    fn time_average_closed_forms() {
        let c = FluxProfile::constant(2.5).unwrap();
        assert_eq!(c.time_average(7.0).unwrap(), 2.5);
        let s = FluxProfile::sinusoidal(1.0, 2.0 * PI).unwrap();
        assert!(s.time_average(1.0).unwrap().abs() < 1e-15);
        let p = FluxProfile::trapezoidal_pulse(1.0, 0.25, 0.75, 0.0).unwrap();
        assert!((p.time_average(1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(c.time_average(0.0).is_err());
        assert!(c.time_average(-1.0).is_err());
    }

    #[test]
    fn ramp_correction_is_linear_in_width() {
        let t = 1.0;
        let w = 0.04;
        let a = FluxProfile::trapezoidal_pulse(1.5, 0.25, 0.75, w).unwrap();
        let b = FluxProfile::trapezoidal_pulse(1.5, 0.25, 0.75, w / 2.0).unwrap();
        let diff = a.time_average(t).unwrap() - b.time_average(t).unwrap();
        assert!((diff - (-1.5 * (w / 2.0) / t)).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(FluxProfile::trapezoidal_pulse(1.0, 0.5, 0.4, 0.0).is_err());
        assert!(FluxProfile::trapezoidal_pulse(1.0, 0.2, 0.4, 0.15).is_err());
        assert!(FluxProfile::trapezoidal_pulse(1.0, -0.1, 0.4, 0.0).is_err());
        assert!(FluxProfile::sinusoidal(1.0, -1.0).is_err());
        assert!(FluxProfile::constant(f64::NAN).is_err());
    }
}
