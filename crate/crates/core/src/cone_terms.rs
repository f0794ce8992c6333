//! Per-singularity quantities: the constant `C(beta)`, the zeta data of the
//! flat unit disk with one cone point, `zeta(0)` of a surface with cone
//! points, the heat-trace constant and the rescaling rule.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::barnes::{default_route, zprime0, BarnesArg, ZPrimeRoute};
use crate::error::{Error, Result};
use crate::parallel::compensated_sum;
use crate::special_fn::{constants, RationalOrder, LN_2PI};

/// Orders at or below `-1 + ANGLE_GUARD` are rejected.
pub const ANGLE_GUARD: f64 = 1e-9;

/// Order `beta > -1` of a conical point of angle `2 pi (beta + 1)`,
/// optionally carrying `beta + 1` as an exact fraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConeOrder {
    beta: f64,
    exact: Option<RationalOrder>,
}

fn check_beta(beta: f64) -> Result<()> {
    if !beta.is_finite() {
        return Err(Error::domain("beta", format!("cone order must be finite, got {beta}")));
    }
    if !(beta > -1.0 + ANGLE_GUARD) {
        return Err(Error::AngleTooSmall { beta });
    }
    Ok(())
}

impl ConeOrder {
    pub fn new(beta: f64) -> Result<Self> {
        check_beta(beta)?;
        Ok(ConeOrder { beta, exact: None })
    }

    /// `beta + 1 = p / q`.
    pub fn rational(p: u64, q: u64) -> Result<Self> {
        Self::from_angle(RationalOrder::new(p, q)?)
    }

    pub fn from_angle(r: RationalOrder) -> Result<Self> {
        let beta = if r.q() == 1 {
            r.p() as f64 - 1.0
        } else {
            (r.p() as f64 - r.q() as f64) / r.q() as f64
        };
        check_beta(beta)?;
        Ok(ConeOrder { beta, exact: Some(r) })
    }

    pub fn integer(n: i64) -> Result<Self> {
        if n < 0 {
            return Err(Error::AngleTooSmall { beta: n as f64 });
        }
        Self::from_angle(RationalOrder::integer(n as u64 + 1)?)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn exact(&self) -> Option<RationalOrder> {
        self.exact
    }

    /// `beta + 1`.
    pub fn angle_factor(&self) -> f64 {
        match self.exact {
            Some(r) => r.value(),
            None => self.beta + 1.0,
        }
    }

    pub fn barnes_arg(&self) -> BarnesArg {
        match self.exact {
            Some(r) => BarnesArg::Rational(r),
            None => BarnesArg::Real(self.beta + 1.0),
        }
    }
}

/// Terms of `C(beta) = 2 zeta_B'(0; beta+1, 1, 1) - 2 zeta'(-1)
/// - beta^2 ln(2) / (6 (beta+1)) - beta/12 + ln(beta+1) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CBetaBreakdown {
    pub barnes: f64,
    pub zeta: f64,
    pub log2: f64,
    pub linear: f64,
    pub log_angle: f64,
    pub total: f64,
    pub route: ZPrimeRoute,
}

pub fn c_beta_breakdown(order: ConeOrder, tol: f64) -> Result<CBetaBreakdown> {
    let arg = order.barnes_arg();
    let route = default_route(&arg);
    let b = order.beta;
    let a = order.angle_factor();
    let barnes = 2.0 * zprime0(arg, tol)?;
    let zeta = -2.0 * constants().zeta_prime_minus1;
    let log2 = -b * b / (6.0 * a) * LN_2;
    let linear = -b / 12.0;
    let log_angle = 0.5 * a.ln();
    let total = compensated_sum([barnes, zeta, log2, linear, log_angle]);
    Ok(CBetaBreakdown { barnes, zeta, log2, linear, log_angle, total, route })
}

/// `C(beta)`; the rational closed form is used when the order is exact.
pub fn c_beta(order: ConeOrder, tol: f64) -> Result<f64> {
    Ok(c_beta_breakdown(order, tol)?.total)
}

/// `zeta_<(0, beta) = (beta + 1 + 1/(beta + 1)) / 12`.
pub fn zeta_disk_at0(order: ConeOrder) -> f64 {
    let a = order.angle_factor();
    (a + 1.0 / a) / 12.0
}

/// `zeta_<'(0, beta) = 2 zeta_B'(0; beta+1, 1, 1) + 5 (beta+1)/12 + ln(beta+1)/2 + ln(2 pi)/2`.
pub fn zeta_disk_prime0(order: ConeOrder, tol: f64) -> Result<f64> {
    let a = order.angle_factor();
    let zb = zprime0(order.barnes_arg(), tol)?;
    Ok(compensated_sum([2.0 * zb, 5.0 * a / 12.0, 0.5 * a.ln(), 0.5 * LN_2PI]))
}

/// Compact surface with cone points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceTopology {
    pub euler_top: i32,
    pub orders: Vec<ConeOrder>,
    pub has_boundary: bool,
}

impl SurfaceTopology {
    pub fn new(euler_top: i32, orders: Vec<ConeOrder>, has_boundary: bool) -> Self {
        SurfaceTopology { euler_top, orders, has_boundary }
    }

    pub fn closed_sphere(orders: Vec<ConeOrder>) -> Self {
        Self::new(2, orders, false)
    }

    pub fn disk(orders: Vec<ConeOrder>) -> Self {
        Self::new(1, orders, true)
    }

    /// `|beta| = sum beta_j`.
    pub fn degree(&self) -> f64 {
        compensated_sum(self.orders.iter().map(|o| o.beta))
    }

    /// `chi(M) + |beta|`.
    pub fn euler_with_divisor(&self) -> f64 {
        self.euler_top as f64 + self.degree()
    }

    /// 1 on closed surfaces (constants), 0 with Dirichlet boundary.
    pub fn dim_kernel(&self) -> u32 {
        if self.has_boundary {
            0
        } else {
            1
        }
    }
}

/// `zeta(0) = chi(M, beta)/6 - sum_j (beta_j + 1 - 1/(beta_j + 1))/12 - dim ker`.
pub fn zeta0_surface(topo: &SurfaceTopology) -> f64 {
    heat_trace_a0(topo) - topo.dim_kernel() as f64
}

/// Constant term `a_0` of the heat-trace expansion, `zeta(0) + dim ker`.
pub fn heat_trace_a0(topo: &SurfaceTopology) -> f64 {
    let cone = compensated_sum(topo.orders.iter().map(|o| {
        let a = o.angle_factor();
        a - 1.0 / a
    }));
    topo.euler_with_divisor() / 6.0 - cone / 12.0
}

/// Log-determinant after scaling the metric by `r^2`: `logdet - 2 zeta0 ln r`.
pub fn rescale_logdet(logdet: f64, zeta0: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::domain("r", format!("scale must be positive, got {r}")));
    }
    Ok(logdet - 2.0 * zeta0 * r.ln())
}
