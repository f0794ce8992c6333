//! Disks `|z| <= 1` with metric `|z|^(2 beta) e^(2 phi) |dz|^2`,
//! `phi = ln 2 - ln(1 + K |z|^(2 beta + 2))`, of curvature `(beta + 1)^2 K`.

use std::f64::consts::LN_2;

use serde::Serialize;

use super::LogDet;
use crate::barnes::zprime0;
use crate::cone_terms::{zeta_disk_prime0, ConeOrder};
use crate::error::{Error, Result};
use crate::special_fn::LN_2PI;

/// `K` at or below `-1 + K_GUARD` is rejected.
pub const K_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiskConfig {
    order: ConeOrder,
    k: f64,
}

impl DiskConfig {
    pub fn new(order: ConeOrder, k: f64) -> Result<Self> {
        if !k.is_finite() || !(k > -1.0 + K_GUARD) {
            return Err(Error::domain("k", format!("need K > -1, got {k}")));
        }
        Ok(DiskConfig { order, k })
    }

    pub fn order(&self) -> ConeOrder {
        self.order
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// `(beta + 1)^2 K`.
    pub fn curvature(&self) -> f64 {
        let a = self.order.angle_factor();
        a * a * self.k
    }
}

/// Dirichlet log-determinant of the constant-curvature disk.
pub fn logdet_disk(cfg: &DiskConfig, tol: f64) -> Result<LogDet> {
    let a = cfg.order.angle_factor();
    let k = cfg.k;
    let zb = zprime0(cfg.order.barnes_arg(), tol)?;
    Ok(LogDet::from_parts(&[
        ("barnes", -2.0 * zb),
        ("angle_log", -0.5 * a.ln()),
        ("curvature", (11.0 * k - 5.0) / (12.0 * (1.0 + k)) * a),
        ("constant", -0.5 * LN_2PI),
    ]))
}

/// Dirichlet log-determinant of the flat disk of radius `eps`:
/// `-ln(eps)/3 + ln(2)/3 - zeta_<'(0, 0)`.
pub fn logdet_flat_disk(eps: f64) -> Result<f64> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::domain("radius", format!("must be positive, got {eps}")));
    }
    let smooth = ConeOrder::integer(0)?;
    Ok(-eps.ln() / 3.0 + LN_2 / 3.0 - zeta_disk_prime0(smooth, 0.0)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone_terms::{rescale_logdet, zeta_disk_at0};
    use crate::special_fn::constants;

    fn zp() -> f64 {
        constants().zeta_prime_minus1
    }

    #[test]
    fn flat_disk_values() {
        let one = logdet_flat_disk(1.0).unwrap();
        assert!((one - (LN_2 / 3.0 - 2.0 * zp() - 5.0 / 12.0 - 0.5 * LN_2PI)).abs() < 1e-15);
        assert!((logdet_flat_disk(2.0).unwrap() - one + LN_2 / 3.0).abs() < 1e-15);
        let zeta0 = zeta_disk_at0(ConeOrder::integer(0).unwrap());
        assert_eq!(zeta0, 1.0 / 6.0);
        for r in [0.1, 3.0, 17.5] {
            let direct = logdet_flat_disk(r).unwrap();
            assert!((rescale_logdet(one, zeta0, r).unwrap() - direct).abs() < 1e-14);
        }
        assert!(logdet_flat_disk(0.0).is_err());
    }

    #[test]
    fn flat_case_is_the_radius_two_disk() {
        // K = 0 gives 4 |dz|^2 on |z| <= 1
        let d = logdet_disk(&DiskConfig::new(ConeOrder::integer(0).unwrap(), 0.0).unwrap(), 1e-12).unwrap();
        assert!((d.total - (-2.0 * zp() - 5.0 / 12.0 - 0.5 * LN_2PI)).abs() < 1e-15);
        assert!((d.total - logdet_flat_disk(2.0).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn hemisphere() {
        let d = logdet_disk(&DiskConfig::new(ConeOrder::integer(0).unwrap(), 1.0).unwrap(), 1e-12).unwrap();
        let expected = -2.0 * zp() + 0.25 - 0.5 * LN_2PI;
        assert!((d.total - expected).abs() < 1e-15);
        assert!((d.total + 0.338_096_245_803_770_9).abs() < 1e-15);
    }

    #[test]
    fn guard() {
        let o = ConeOrder::integer(0).unwrap();
        assert!(DiskConfig::new(o, -1.0).is_err());
        assert!(DiskConfig::new(o, -1.0 + 1e-10).is_err());
        assert!(DiskConfig::new(o, -1.0 + 1e-8).is_ok());
        assert!(DiskConfig::new(o, f64::INFINITY).is_err());
    }
}
