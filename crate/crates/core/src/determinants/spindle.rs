//! Spheres of constant positive curvature with two antipodal cone points of
//! equal order ("spindles" or "american footballs").

use std::f64::consts::PI;

use serde::Serialize;

use super::LogDet;
use crate::barnes::zprime0;
use crate::cone_terms::ConeOrder;
use crate::error::{Error, Result};
use crate::special_fn::{constants, LN_2PI};

/// Metric `(2b+2)^2 |z|^(2b) |dz|^2 / (|1 + mu z^(b+1)|^2 + K |z|^(2b+2))^2`.
///
/// Only integer `b`, or `mu = 0`, give a well-defined metric on the sphere.
/// Integrality is read from the exact angle of the order, never from the float.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpindleConfig {
    order: ConeOrder,
    mu: f64,
    curvature: f64,
}

impl SpindleConfig {
    pub fn new(order: ConeOrder, mu: f64, curvature: f64) -> Result<Self> {
        if !(mu >= 0.0) || !mu.is_finite() {
            return Err(Error::domain("mu", format!("must be finite and >= 0, got {mu}")));
        }
        if !(curvature > 0.0) || !curvature.is_finite() {
            return Err(Error::domain("curvature", format!("must be finite and > 0, got {curvature}")));
        }
        let integer = order.exact().is_some_and(|r| r.q() == 1);
        if mu != 0.0 && !integer {
            return Err(Error::config(
                "mu",
                format!("mu = {mu} requires an integer cone order, got beta = {}", order.beta()),
            ));
        }
        Ok(SpindleConfig { order, mu, curvature })
    }

    pub fn order(&self) -> ConeOrder {
        self.order
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn curvature(&self) -> f64 {
        self.curvature
    }
}

pub fn logdet_spindle(cfg: &SpindleConfig, tol: f64) -> Result<LogDet> {
    let a = cfg.order.angle_factor();
    let k = cfg.curvature;
    let zb = zprime0(cfg.order.barnes_arg(), tol)?;
    Ok(LogDet::from_parts(&[
        ("mu", -(a - 1.0 / a) / 6.0 * (cfg.mu * cfg.mu / k).ln_1p()),
        ("linear", a / 2.0),
        ("angle_log", -(a + 1.0 / a) / 3.0 * (a / k.sqrt()).ln()),
        ("barnes", -4.0 * zb),
        ("curvature", -k.ln()),
    ]))
}

/// Spindle normalized to area `4 pi`, i.e. curvature `beta + 1`.
pub fn logdet_spindle_area4pi(order: ConeOrder, mu: f64, tol: f64) -> Result<LogDet> {
    let a = order.angle_factor();
    SpindleConfig::new(order, mu, a)?;
    let zb = zprime0(order.barnes_arg(), tol)?;
    Ok(LogDet::from_parts(&[
        ("mu", -(a - 1.0 / a) / 6.0 * (mu * mu / a).ln_1p()),
        ("angle_log", -(1.0 + (a + 1.0 / a) / 6.0) * a.ln()),
        ("barnes", -4.0 * zb),
        ("linear", a / 2.0),
    ]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AsymptoticRegime {
    BetaToMinus1,
    BetaToInfinity,
}

/// Leading terms of the area-`4 pi` log-determinant as `beta -> -1+`
/// (remainder `O(beta + 1)`, `mu = 0` only) or `beta -> infinity`
/// (remainder `O(1/beta)`).
pub fn spindle_asymptotic(order: ConeOrder, mu: f64, regime: AsymptoticRegime) -> Result<f64> {
    let a = order.angle_factor();
    SpindleConfig::new(order, mu, a)?;
    let zp = constants().zeta_prime_minus1;
    Ok(match regime {
        AsymptoticRegime::BetaToMinus1 => {
            if mu != 0.0 {
                return Err(Error::domain("mu", "the beta -> -1 expansion needs mu = 0"));
            }
            -a.ln() / (6.0 * a) - (1.0 / 3.0 - 4.0 * zp) / a - a.ln() + LN_2PI - a / 6.0 * a.ln()
        }
        AsymptoticRegime::BetaToInfinity => {
            -(a - 1.0 / a) / 6.0 * (mu * mu / a).ln_1p() + (a + 1.0 / a) / 6.0 * a.ln()
                + (1.0 / 6.0 + 4.0 * zp) * a
                + LN_2PI
        }
    })
}

/// Distance between the two cone points, `(2/sqrt K) arctan(sqrt K / mu)`.
pub fn spindle_distance(cfg: &SpindleConfig) -> f64 {
    let s = cfg.curvature.sqrt();
    if cfg.mu == 0.0 {
        PI / s
    } else {
        2.0 / s * (s / cfg.mu).atan()
    }
}
