//! Spheres with a hyperbolic metric with cone points, and the determinant
//! of its pullback under `z -> mu z`.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use super::LogDet;
use crate::cone_terms::{c_beta, ConeOrder};
use crate::error::{Error, Result};
use crate::parallel::compensated_sum;
use crate::special_fn::constants;

/// Data of a curvature `-1` metric `e^(2 phi) |dz|^2` with cone points
/// `p_1, ..., p_(n-1)` in the plane and `p_n = infinity`.
///
/// `phi = beta_j ln|z - p_j| + phi_j + o(1)` near `p_j`, and
/// `phi = -(beta_n + 2) ln|z| + phi_n + o(1)` at infinity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperbolicSummary {
    pub orders: Vec<f64>,
    pub phi_consts: Vec<f64>,
    /// `int phi e^(2 phi) dA` over the plane.
    pub liouville_integral: f64,
}

impl HyperbolicSummary {
    fn checked_orders(&self) -> Result<Vec<ConeOrder>> {
        let n = self.orders.len();
        if n < 3 {
            return Err(Error::config("orders", format!("need at least 3 cone points, got {n}")));
        }
        if self.phi_consts.len() != n {
            return Err(Error::config(
                "phi_consts",
                format!("{} constants for {n} cone points", self.phi_consts.len()),
            ));
        }
        if !self.liouville_integral.is_finite() || self.phi_consts.iter().any(|p| !p.is_finite()) {
            return Err(Error::domain("phi_consts", "potential data must be finite"));
        }
        let orders = self.orders.iter().map(|&b| ConeOrder::new(b)).collect::<Result<Vec<_>>>()?;
        if !(self.degree() < -2.0) {
            return Err(Error::config(
                "orders",
                format!("a hyperbolic metric needs sum beta_j < -2, got {}", self.degree()),
            ));
        }
        Ok(orders)
    }

    /// `|beta| = sum beta_j`.
    pub fn degree(&self) -> f64 {
        compensated_sum(self.orders.iter().copied())
    }
}

pub fn logdet_hyperbolic_sphere(s: &HyperbolicSummary, tol: f64) -> Result<LogDet> {
    let orders = s.checked_orders()?;
    let n = orders.len();
    let an = orders[n - 1].angle_factor();
    let mut potential = vec![-(1.0 + 1.0 / an) * s.phi_consts[n - 1] / 6.0];
    for j in 0..n - 1 {
        potential.push(orders[j].beta() / orders[j].angle_factor() * s.phi_consts[j] / 6.0);
    }
    let mut c_terms = Vec::with_capacity(n);
    for &o in &orders {
        c_terms.push(-c_beta(o, tol)?);
    }
    Ok(LogDet::from_parts(&[
        ("area_log", (-2.0 - s.degree()).ln()),
        ("liouville", s.liouville_integral / (12.0 * PI)),
        ("potential", compensated_sum(potential)),
        ("c_terms", compensated_sum(c_terms)),
        ("constant", -LN_2 / 3.0 + 1.0 / 6.0 - 4.0 * constants().zeta_prime_minus1),
    ]))
}

/// `C = -2^(2/3) e^(6 zeta'(-1)) (det D_phi)^2 / (2 + |beta|)`.
pub fn pullback_constant_c(logdet_phi: f64, degree: f64) -> Result<f64> {
    if !(2.0 + degree < 0.0) {
        return Err(Error::domain("degree", format!("need |beta| < -2, got {degree}")));
    }
    let zp = constants().zeta_prime_minus1;
    Ok(-(2.0 * LN_2 / 3.0 + 6.0 * zp + 2.0 * logdet_phi).exp() / (2.0 + degree))
}

/// `ln C - ln(mu)/2 + (phi(0) + phi(1/mu))/4`.
pub fn logdet_pullback(c: f64, mu: f64, phi_at_0: f64, phi_at_inv_mu: f64) -> Result<f64> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::domain("c", format!("must be positive, got {c}")));
    }
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::domain("mu", format!("must be positive, got {mu}")));
    }
    Ok(c.ln() - 0.5 * mu.ln() + 0.25 * (phi_at_0 + phi_at_inv_mu))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary(orders: Vec<f64>) -> HyperbolicSummary {
        let n = orders.len();
        HyperbolicSummary {
            orders,
            phi_consts: vec![0.0; n],
            liouville_integral: 0.0,
        }
    }

    #[test]
    fn constant_part_only() {
        let s = summary(vec![-0.5, -0.75, -0.9]);
        let d = logdet_hyperbolic_sphere(&s, 1e-12).unwrap();
        let c: f64 = s.orders.iter().map(|&b| c_beta(ConeOrder::new(b).unwrap(), 1e-12).unwrap()).sum();
        let zp = constants().zeta_prime_minus1;
        let expected = (0.15f64).ln() - c - LN_2 / 3.0 + 1.0 / 6.0 - 4.0 * zp;
        assert!((d.total - expected).abs() < 1e-12);
        let sum: f64 = d.parts.iter().map(|p| p.value).sum();
        assert!((sum - d.total).abs() < 1e-13);
    }

    #[test]
    fn area_collapse() {
        let mut last = f64::INFINITY;
        for delta in [1e-2, 1e-4, 1e-6] {
            let s = summary(vec![-0.7, -0.7, -0.6 - delta]);
            let v = logdet_hyperbolic_sphere(&s, 1e-10).unwrap();
            assert!(v.total < last);
            last = v.total;
        }
    }

    #[test]
    fn validation() {
        assert_eq!(logdet_hyperbolic_sphere(&summary(vec![-0.9, -0.9]), 1e-10).unwrap_err().kind(), "config");
        assert_eq!(logdet_hyperbolic_sphere(&summary(vec![-0.5, -0.5, -1.0]), 1e-10).unwrap_err().kind(), "domain");
        assert_eq!(logdet_hyperbolic_sphere(&summary(vec![-0.5, -0.5, -0.5]), 1e-10).unwrap_err().kind(), "config");
        let mut s = summary(vec![-0.9, -0.9, -0.9]);
        s.phi_consts.pop();
        assert!(logdet_hyperbolic_sphere(&s, 1e-10).is_err());
    }

    #[test]
    fn pullback_constant() {
        let zp = constants().zeta_prime_minus1;
        let c = pullback_constant_c(0.0, -3.0).unwrap();
        assert!((c - 2f64.powf(2.0 / 3.0) * (6.0 * zp).exp()).abs() < 1e-15);
        let c2 = pullback_constant_c(LN_2, -3.0).unwrap();
        assert!((c2 / c - 4.0).abs() < 1e-14);
        assert!(pullback_constant_c(0.0, -2.0).is_err());
        for d in [-2.0001, -5.0, -100.0] {
            assert!(pullback_constant_c(-3.0, d).unwrap() > 0.0);
        }
    }

    #[test]
    fn pullback() {
        assert_eq!(logdet_pullback(1.0, 1.0, 0.0, 0.0).unwrap(), 0.0);
        let a = logdet_pullback(2.0, 0.3, 0.1, -0.4).unwrap();
        let b = logdet_pullback(2.0, 1.2, 0.1, -0.4).unwrap();
        assert!((a - b - LN_2).abs() < 1e-15);
        assert!(logdet_pullback(0.0, 1.0, 0.0, 0.0).is_err());
        assert!(logdet_pullback(1.0, -1.0, 0.0, 0.0).is_err());
    }
}
