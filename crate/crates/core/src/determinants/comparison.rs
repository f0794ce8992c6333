//! Conformal comparison of two metrics `m_phi = e^(2 phi) m_0` with cone
//! points, from user-supplied integrals of the conformal factor.
//!
//! Near a cone point `P_j` of order `beta_j` in a local parameter `z`,
//! `phi = beta_j ln|z| + phi_j(0) + o(1)` and the potential `psi` of `m_0`
//! satisfies `psi = psi_j(0) + o(1)` (or `alpha_j ln|z| + psi_j(0)` when
//! `m_0` is itself singular).

use std::f64::consts::PI;

use serde::Serialize;

use super::LogDet;
use crate::cone_terms::{c_beta, ConeOrder};
use crate::error::{Error, Result};
use crate::parallel::compensated_sum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingularPoint {
    pub order: ConeOrder,
    pub phi0: f64,
    pub psi0: f64,
}

/// Integrals entering the comparison of a singular metric `m_phi` with a
/// smooth `m_0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonData {
    /// `int K_phi phi dA_phi`
    pub bulk_phi: f64,
    /// `int K_0 phi dA_0`
    pub bulk_0: f64,
    /// `int phi d_n phi ds_0`
    pub boundary_quad: f64,
    /// `int k_0 phi ds_0`
    pub boundary_geo: f64,
    /// `int d_n phi ds_0`
    pub boundary_normal: f64,
    pub singularities: Vec<SingularPoint>,
    /// `(A_phi, A_0)` on closed surfaces.
    pub areas: Option<(f64, f64)>,
    pub has_boundary: bool,
}

impl ComparisonData {
    pub fn closed(bulk_phi: f64, bulk_0: f64, singularities: Vec<SingularPoint>, areas: Option<(f64, f64)>) -> Self {
        ComparisonData {
            bulk_phi,
            bulk_0,
            boundary_quad: 0.0,
            boundary_geo: 0.0,
            boundary_normal: 0.0,
            singularities,
            areas,
            has_boundary: false,
        }
    }

    pub fn with_boundary(
        bulk_phi: f64,
        bulk_0: f64,
        [boundary_quad, boundary_geo, boundary_normal]: [f64; 3],
        singularities: Vec<SingularPoint>,
    ) -> Self {
        ComparisonData {
            bulk_phi,
            bulk_0,
            boundary_quad,
            boundary_geo,
            boundary_normal,
            singularities,
            areas: None,
            has_boundary: true,
        }
    }

    fn validate(&self) -> Result<()> {
        check_common(
            [self.bulk_phi, self.bulk_0, self.boundary_quad, self.boundary_geo, self.boundary_normal],
            self.has_boundary,
            self.areas,
        )?;
        for s in &self.singularities {
            if !s.phi0.is_finite() || !s.psi0.is_finite() {
                return Err(Error::domain("singularities", "potential constants must be finite"));
            }
        }
        Ok(())
    }

    /// `ln(A_phi / A_0)` when both areas are known.
    pub fn log_area_ratio(&self) -> Option<f64> {
        self.areas.map(|(a_phi, a_0)| (a_phi / a_0).ln())
    }
}

fn check_common(values: [f64; 5], has_boundary: bool, areas: Option<(f64, f64)>) -> Result<()> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("integrals", "supplied integrals must be finite"));
    }
    if !has_boundary && values[2..].iter().any(|&v| v != 0.0) {
        return Err(Error::config("has_boundary", "boundary integrals given for a closed surface"));
    }
    if has_boundary && areas.is_some() {
        return Err(Error::config("areas", "area normalization only applies to closed surfaces"));
    }
    if let Some((a_phi, a_0)) = areas {
        if !(a_phi > 0.0 && a_0 > 0.0 && a_phi.is_finite() && a_0.is_finite()) {
            return Err(Error::domain("areas", format!("areas must be positive, got ({a_phi}, {a_0})")));
        }
    }
    Ok(())
}

fn boundary_part(quad: f64, geo: f64, normal: f64) -> f64 {
    -quad / (12.0 * PI) - geo / (6.0 * PI) - normal / (4.0 * PI)
}

/// `log(det D_phi / A_phi) - log(det D_0 / A_0)` on closed surfaces, and
/// `log det D_phi - log det D_0` with Dirichlet boundary conditions.
pub fn polyakov_compare(data: &ComparisonData, tol: f64) -> Result<LogDet> {
    data.validate()?;
    let singular = compensated_sum(data.singularities.iter().map(|s| {
        let b = s.order.beta();
        b * (s.phi0 / s.order.angle_factor() - s.psi0) / 6.0
    }));
    let mut c_terms = Vec::with_capacity(data.singularities.len());
    for s in &data.singularities {
        c_terms.push(-c_beta(s.order, tol)?);
    }
    let mut parts = vec![
        ("bulk", -(data.bulk_phi + data.bulk_0) / (12.0 * PI)),
        ("singular", singular),
        ("c_terms", compensated_sum(c_terms)),
    ];
    if data.has_boundary {
        parts.push(("boundary", boundary_part(data.boundary_quad, data.boundary_geo, data.boundary_normal)));
    }
    Ok(LogDet::from_parts(&parts))
}

/// `log det D_phi` from a known reference `log det D_0`, restoring the area
/// normalization on closed surfaces.
pub fn logdet_from_reference(reference: f64, data: &ComparisonData, tol: f64) -> Result<LogDet> {
    let mut d = polyakov_compare(data, tol)?.with_part("reference", reference);
    if !data.has_boundary {
        let ratio = data
            .log_area_ratio()
            .ok_or_else(|| Error::config("areas", "closed surfaces need (A_phi, A_0)"))?;
        d = d.with_part("log_area_ratio", ratio);
    }
    Ok(d)
}

/// A point carrying order `alpha` for `m_0` and `beta` for `m_phi`; either
/// may be zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoSingularPoint {
    pub alpha: ConeOrder,
    pub beta: ConeOrder,
    pub phi0: f64,
    pub psi0: f64,
}

/// Comparison data when both metrics have cone points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoSingularIntegrals {
    pub bulk_phi: f64,
    pub bulk_0: f64,
    pub boundary_quad: f64,
    pub boundary_geo: f64,
    pub boundary_normal: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoSingularData {
    pub integrals: TwoSingularIntegrals,
    pub points: Vec<TwoSingularPoint>,
    pub areas: Option<(f64, f64)>,
    pub has_boundary: bool,
}

impl TwoSingularData {
    /// The same pair of metrics with their roles exchanged: `phi -> -phi`,
    /// `alpha <-> beta`, `phi_j(0) <-> psi_j(0)`, and the boundary integrals
    /// transformed with `ds_phi = e^phi ds_0`, `k_phi = e^-phi (k_0 + d_n phi)`.
    pub fn swapped(&self) -> Self {
        let i = &self.integrals;
        TwoSingularData {
            integrals: TwoSingularIntegrals {
                bulk_phi: -i.bulk_0,
                bulk_0: -i.bulk_phi,
                boundary_quad: i.boundary_quad,
                boundary_geo: -i.boundary_geo - i.boundary_quad,
                boundary_normal: -i.boundary_normal,
            },
            points: self
                .points
                .iter()
                .map(|p| TwoSingularPoint {
                    alpha: p.beta,
                    beta: p.alpha,
                    phi0: p.psi0,
                    psi0: p.phi0,
                })
                .collect(),
            areas: self.areas.map(|(a, b)| (b, a)),
            has_boundary: self.has_boundary,
        }
    }
}

impl From<&ComparisonData> for TwoSingularData {
    fn from(d: &ComparisonData) -> Self {
        let zero = ConeOrder::integer(0).expect("order 0 is valid");
        TwoSingularData {
            integrals: TwoSingularIntegrals {
                bulk_phi: d.bulk_phi,
                bulk_0: d.bulk_0,
                boundary_quad: d.boundary_quad,
                boundary_geo: d.boundary_geo,
                boundary_normal: d.boundary_normal,
            },
            points: d
                .singularities
                .iter()
                .map(|s| TwoSingularPoint {
                    alpha: zero,
                    beta: s.order,
                    phi0: s.phi0,
                    psi0: s.psi0,
                })
                .collect(),
            areas: d.areas,
            has_boundary: d.has_boundary,
        }
    }
}

/// Comparison of two metrics that both have cone points, over the union of
/// their singular sets.
pub fn polyakov_compare_two_singular(data: &TwoSingularData, tol: f64) -> Result<LogDet> {
    let i = &data.integrals;
    check_common(
        [i.bulk_phi, i.bulk_0, i.boundary_quad, i.boundary_geo, i.boundary_normal],
        data.has_boundary,
        data.areas,
    )?;
    let mut singular = Vec::with_capacity(data.points.len());
    let mut c_terms = Vec::with_capacity(data.points.len());
    for p in &data.points {
        if !p.phi0.is_finite() || !p.psi0.is_finite() {
            return Err(Error::domain("points", "potential constants must be finite"));
        }
        let (a, b) = (p.alpha.beta(), p.beta.beta());
        singular.push(
            (b * (p.phi0 / p.beta.angle_factor() - p.psi0) - a * (p.psi0 / p.alpha.angle_factor() - p.phi0)) / 6.0,
        );
        c_terms.push(c_beta(p.alpha, tol)? - c_beta(p.beta, tol)?);
    }
    let mut parts = vec![
        ("bulk", -(i.bulk_phi + i.bulk_0) / (12.0 * PI)),
        ("singular", compensated_sum(singular)),
        ("c_terms", compensated_sum(c_terms)),
    ];
    if data.has_boundary {
        parts.push(("boundary", boundary_part(i.boundary_quad, i.boundary_geo, i.boundary_normal)));
    }
    Ok(LogDet::from_parts(&parts))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(beta: f64, phi0: f64, psi0: f64) -> SingularPoint {
        SingularPoint {
            order: ConeOrder::new(beta).unwrap(),
            phi0,
            psi0,
        }
    }

    #[test]
    fn smooth_identical_metrics() {
        let d = ComparisonData::closed(0.0, 0.0, vec![], Some((4.0, 4.0)));
        assert_eq!(polyakov_compare(&d, 1e-12).unwrap().total, 0.0);
        let d = ComparisonData::with_boundary(0.0, 0.0, [0.0; 3], vec![]);
        assert_eq!(polyakov_compare(&d, 1e-12).unwrap().total, 0.0);
    }

    #[test]
    fn boundary_fields_on_closed_surface_rejected() {
        let mut d = ComparisonData::closed(1.0, 2.0, vec![], None);
        d.boundary_geo = 0.5;
        assert_eq!(polyakov_compare(&d, 1e-12).unwrap_err().kind(), "config");
    }

    #[test]
    fn reduces_to_single_singular() {
        let d = ComparisonData::with_boundary(
            0.3,
            -1.2,
            [0.4, 0.1, -0.7],
            vec![pt(0.5, 0.2, -0.1), pt(-0.25, 1.5, 0.3)],
        );
        let one = polyakov_compare(&d, 1e-12).unwrap();
        let two = polyakov_compare_two_singular(&TwoSingularData::from(&d), 1e-12).unwrap();
        assert!((one.total - two.total).abs() < 1e-14);
    }

    #[test]
    fn antisymmetric() {
        let o = |b| ConeOrder::new(b).unwrap();
        let data = TwoSingularData {
            integrals: TwoSingularIntegrals {
                bulk_phi: 0.9,
                bulk_0: -0.4,
                boundary_quad: 1.3,
                boundary_geo: 0.2,
                boundary_normal: -0.6,
            },
            points: vec![
                TwoSingularPoint { alpha: o(0.5), beta: o(-0.3), phi0: 0.7, psi0: -0.2 },
                TwoSingularPoint { alpha: o(0.0), beta: o(2.0), phi0: -1.1, psi0: 0.4 },
            ],
            areas: None,
            has_boundary: true,
        };
        let fwd = polyakov_compare_two_singular(&data, 1e-12).unwrap().total;
        let back = polyakov_compare_two_singular(&data.swapped(), 1e-12).unwrap().total;
        assert!((fwd + back).abs() < 1e-12, "{fwd} {back}");
        let twice = data.swapped().swapped();
        assert_eq!(twice.points, data.points);
        assert!((twice.integrals.boundary_geo - data.integrals.boundary_geo).abs() < 1e-15);
    }

    #[test]
    fn equal_divisors_and_potentials_cancel() {
        let o = ConeOrder::new(0.4).unwrap();
        let data = TwoSingularData {
            integrals: TwoSingularIntegrals {
                bulk_phi: 0.0,
                bulk_0: 0.0,
                boundary_quad: 0.0,
                boundary_geo: 0.0,
                boundary_normal: 0.0,
            },
            points: vec![TwoSingularPoint { alpha: o, beta: o, phi0: 0.3, psi0: 0.3 }],
            areas: Some((1.0, 1.0)),
            has_boundary: false,
        };
        assert!(polyakov_compare_two_singular(&data, 1e-12).unwrap().total.abs() < 1e-15);
    }
}
