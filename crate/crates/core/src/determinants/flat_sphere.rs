//! Flat metrics `|z - p_1|^(2 beta_1) ... |z - p_n|^(2 beta_n) |dz|^2` on the
//! sphere with `sum beta_j = -2`, i.e. polyhedral surfaces.

use std::f64::consts::{LN_2, PI};

use serde::Serialize;

use super::LogDet;
use crate::barnes::{zprime_a0, zprime_a0_ir};
use crate::cone_terms::c_beta;
use crate::error::{Error, Result};
use crate::parallel::compensated_sum;
use crate::quadrature::{dist, flat_sphere_area, FlatSphereConfig};
use crate::special_fn::constants;

/// Which expression is used for `Z'_a(0)` in the per-point terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZPrimeDefinition {
    /// Through `zeta_B'(0; a, 1, 1)`, exact for rational orders.
    #[default]
    Barnes,
    /// Through the integral `J(a)`.
    Integral,
}

/// `(1/6) sum_j sum_(i != j) beta_i beta_j / (beta_j + 1) ln|p_i - p_j|`.
fn pair_logs(cfg: &FlatSphereConfig) -> f64 {
    let (p, o) = (cfg.points(), cfg.orders());
    let mut terms = Vec::with_capacity(p.len() * p.len());
    for j in 0..p.len() {
        for i in 0..p.len() {
            if i != j {
                terms.push(o[i].beta() * o[j].beta() / o[j].angle_factor() * dist(p[i], p[j]).ln());
            }
        }
    }
    compensated_sum(terms) / 6.0
}

/// `log(det D / A)` with the per-point constants `C(beta_j)`.
pub fn log_det_over_area(cfg: &FlatSphereConfig, tol: f64) -> Result<LogDet> {
    let mut c_terms = Vec::with_capacity(cfg.len());
    for &o in cfg.orders() {
        c_terms.push(-c_beta(o, tol)?);
    }
    Ok(LogDet::from_parts(&[
        ("pair_logs", pair_logs(cfg)),
        ("c_terms", compensated_sum(c_terms)),
        (
            "constant",
            -4.0 * constants().zeta_prime_minus1 - 4.0 * LN_2 / 3.0 + 1.0 / 6.0 - PI.ln(),
        ),
    ]))
}

/// `log(det D / A)` in terms of `Z'_(beta_j + 1)(0)`.
pub fn log_det_over_area_as(cfg: &FlatSphereConfig, def: ZPrimeDefinition, tol: f64) -> Result<LogDet> {
    let mut z_terms = Vec::with_capacity(cfg.len());
    for &o in cfg.orders() {
        let a = o.angle_factor();
        let z = match def {
            ZPrimeDefinition::Barnes => zprime_a0(o.barnes_arg(), tol)?,
            ZPrimeDefinition::Integral => zprime_a0_ir(a, tol)?,
        };
        z_terms.push(-(2.0 * z + 0.5 * a.ln()));
    }
    Ok(LogDet::from_parts(&[
        ("pair_logs", pair_logs(cfg)),
        ("z_terms", compensated_sum(z_terms)),
        ("constant", -LN_2),
    ]))
}

fn check_area(area: f64) -> Result<()> {
    if !(area > 0.0) || !area.is_finite() {
        return Err(Error::domain("area", format!("must be positive, got {area}")));
    }
    Ok(())
}

pub fn logdet_flat_sphere_with_area(cfg: &FlatSphereConfig, area: f64, tol: f64) -> Result<LogDet> {
    check_area(area)?;
    Ok(log_det_over_area(cfg, tol)?.with_part("log_area", area.ln()))
}

pub fn logdet_flat_sphere_as_with_area(
    cfg: &FlatSphereConfig,
    area: f64,
    def: ZPrimeDefinition,
    tol: f64,
) -> Result<LogDet> {
    check_area(area)?;
    Ok(log_det_over_area_as(cfg, def, tol)?.with_part("log_area", area.ln()))
}

/// `log det D`, with the area computed by quadrature to relative accuracy `tol`.
pub fn logdet_flat_sphere(cfg: &FlatSphereConfig, tol: f64) -> Result<LogDet> {
    let area = flat_sphere_area(cfg, tol)?.require("flat sphere area")?.value;
    logdet_flat_sphere_with_area(cfg, area, tol)
}

pub fn logdet_flat_sphere_as(cfg: &FlatSphereConfig, tol: f64) -> Result<LogDet> {
    let area = flat_sphere_area(cfg, tol)?.require("flat sphere area")?.value;
    logdet_flat_sphere_as_with_area(cfg, area, ZPrimeDefinition::Barnes, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> FlatSphereConfig {
        FlatSphereConfig::from_raw(vec![[0.0, 0.0], [1.0, 0.5], [-0.3, 2.0]], &[-0.5, -0.8, -0.7]).unwrap()
    }

    #[test]
    fn two_forms_agree() {
        let c = cfg();
        let a = log_det_over_area(&c, 1e-12).unwrap();
        let b = log_det_over_area_as(&c, ZPrimeDefinition::Barnes, 1e-12).unwrap();
        let i = log_det_over_area_as(&c, ZPrimeDefinition::Integral, 1e-12).unwrap();
        assert!((a.total - b.total).abs() < 1e-12, "{} {}", a.total, b.total);
        assert!((b.total - i.total).abs() < 1e-10);
    }

    #[test]
    fn relabeling() {
        let c = cfg();
        let a = log_det_over_area(&c, 1e-12).unwrap().total;
        let b = log_det_over_area(&c.permuted(&[2, 0, 1]).unwrap(), 1e-12).unwrap().total;
        assert!((a - b).abs() < 1e-13);
    }

    #[test]
    fn area_is_checked() {
        assert!(logdet_flat_sphere_with_area(&cfg(), 0.0, 1e-10).is_err());
        let d = logdet_flat_sphere_with_area(&cfg(), 2.0, 1e-10).unwrap();
        assert_eq!(d.part("log_area"), Some(LN_2));
    }
}
