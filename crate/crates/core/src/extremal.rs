//! Parameter studies of the spindle of area `4 pi`: curve scans, the local
//! maximum at the round sphere, and its Taylor coefficients.

use serde::{Deserialize, Serialize};

use crate::cone_terms::{c_beta, ConeOrder};
use crate::determinants::logdet_spindle_area4pi;
use crate::error::{Error, Result};
use crate::parallel::{map_ordered, Execution};

/// Smallest admissible distance of a scanned order from `-1`.
pub const SCAN_GUARD: f64 = 1e-6;

/// `J(a)` tolerance used by the optimizer and the Taylor check.
const FINE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanParam {
    Beta,
    Mu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanTarget {
    /// `C(beta)`; `fixed_other` is ignored.
    CBeta,
    /// `exp(log det)` of the area-`4 pi` spindle.
    FixedAreaDet,
}

/// `steps` equally spaced values of `param` on `[start, stop]`, the other
/// spindle parameter held at `fixed_other`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanGrid {
    param: ScanParam,
    start: f64,
    stop: f64,
    steps: usize,
    fixed_other: f64,
}

impl ScanGrid {
    pub fn new(param: ScanParam, start: f64, stop: f64, steps: usize, fixed_other: f64) -> Result<Self> {
        if !start.is_finite() || !stop.is_finite() || !fixed_other.is_finite() {
            return Err(Error::config("grid", "bounds must be finite"));
        }
        if !(start < stop) {
            return Err(Error::config("grid", format!("need start < stop, got [{start}, {stop}]")));
        }
        if steps < 2 {
            return Err(Error::config("steps", format!("need at least 2 steps, got {steps}")));
        }
        let (beta_min, mu_min) = match param {
            ScanParam::Beta => (start, fixed_other),
            ScanParam::Mu => (fixed_other, start),
        };
        if !(beta_min > -1.0 + SCAN_GUARD) {
            return Err(Error::domain("beta", format!("scan reaches beta = {beta_min} <= -1 + {SCAN_GUARD}")));
        }
        if mu_min < 0.0 {
            return Err(Error::domain("mu", format!("must be >= 0, got {mu_min}")));
        }
        Ok(ScanGrid { param, start, stop, steps, fixed_other })
    }

    pub fn param(&self) -> ScanParam {
        self.param
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.steps - 1;
        (0..=n)
            .map(|i| {
                if i == n {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / n as f64
                }
            })
            .collect()
    }
}

/// Non-negative whole numbers become exact integer orders, so that `mu > 0`
/// is admissible for them; anything else is a real order.
pub fn order_from_value(beta: f64) -> Result<ConeOrder> {
    if beta >= 0.0 && beta.fract() == 0.0 && beta < 9.0e15 {
        ConeOrder::integer(beta as i64)
    } else {
        ConeOrder::new(beta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub param: f64,
    pub value: Option<f64>,
    /// Why the row was skipped.
    pub error: Option<String>,
}

pub fn scan_curve(target: ScanTarget, grid: &ScanGrid, tol: f64) -> Vec<ScanRow> {
    scan_curve_with(target, grid, tol, Execution::default())
}

/// Rows are evaluated independently and returned in grid order. A row whose
/// evaluation fails is kept with `value = None`.
pub fn scan_curve_with(target: ScanTarget, grid: &ScanGrid, tol: f64, exec: Execution) -> Vec<ScanRow> {
    let g = *grid;
    map_ordered(grid.values(), exec, move |x| {
        let (beta, mu) = match g.param {
            ScanParam::Beta => (x, g.fixed_other),
            ScanParam::Mu => (g.fixed_other, x),
        };
        let value = order_from_value(beta).and_then(|o| match target {
            ScanTarget::CBeta => c_beta(o, tol),
            ScanTarget::FixedAreaDet => logdet_spindle_area4pi(o, mu, tol).map(|d| d.det()),
        });
        match value {
            Ok(v) => ScanRow { param: x, value: Some(v), error: None },
            Err(e) => ScanRow { param: x, value: None, error: Some(e.to_string()) },
        }
    })
}

fn fixed_area_logdet(beta: f64) -> Result<f64> {
    Ok(logdet_spindle_area4pi(ConeOrder::new(beta)?, 0.0, FINE_TOL)?.total)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremumReport {
    pub location: f64,
    pub value: f64,
    pub second_derivative: f64,
    /// Central-difference slope at `location`.
    pub gradient: f64,
    pub method: String,
    /// Width of the final bracket.
    pub tolerance_achieved: f64,
    pub iterations: usize,
}

const MAX_ITERATIONS: usize = 300;

/// Local maximum of the area-`4 pi` log-determinant in `beta` at `mu = 0`,
/// by bracket expansion followed by golden-section search.
pub fn find_local_max(initial: f64, tol: f64) -> Result<ExtremumReport> {
    if !(initial > -0.5 && initial < 0.5) {
        return Err(Error::domain("initial", format!("must lie in (-0.5, 0.5), got {initial}")));
    }
    if !(tol > 0.0 && tol < 0.1) {
        return Err(Error::config("tol", format!("must lie in (0, 0.1), got {tol}")));
    }
    let f = fixed_area_logdet;
    let mut iterations = 0;

    // expand a bracket lo < mid < hi with f(mid) above both ends
    let step = 0.05;
    let (mut lo, mut mid, mut hi) = (initial - step, initial, initial + step);
    let (mut f_lo, mut f_mid, mut f_hi) = (f(lo)?, f(mid)?, f(hi)?);
    while !(f_mid >= f_lo && f_mid >= f_hi) {
        iterations += 1;
        if iterations > MAX_ITERATIONS || lo <= -0.95 {
            return Err(Error::Convergence {
                what: "maximum bracketing",
                error_estimate: hi - lo,
                tolerance: tol,
            });
        }
        if f_hi > f_mid {
            (lo, f_lo) = (mid, f_mid);
            (mid, f_mid) = (hi, f_hi);
            hi = mid + 1.6 * (mid - lo);
            f_hi = f(hi)?;
        } else {
            (hi, f_hi) = (mid, f_mid);
            (mid, f_mid) = (lo, f_lo);
            lo = (mid - 1.6 * (hi - mid)).max(-0.95);
            f_lo = f(lo)?;
        }
    }
    let _ = (f_lo, f_hi);

    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while b - a > tol {
        iterations += 1;
        if iterations > MAX_ITERATIONS {
            return Err(Error::Convergence {
                what: "golden-section search",
                error_estimate: b - a,
                tolerance: tol,
            });
        }
        if f1 >= f2 {
            b = x2;
            (x2, f2) = (x1, f1);
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            (x1, f1) = (x2, f2);
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
    }
    let location = if f1 >= f2 { x1 } else { x2 };
    let value = f(location)?;
    let h2 = 1e-3;
    let second_derivative = (f(location + h2)? - 2.0 * value + f(location - h2)?) / (h2 * h2);
    let h1 = 1e-5;
    let gradient = (f(location + h1)? - f(location - h1)?) / (2.0 * h1);
    Ok(ExtremumReport {
        location,
        value,
        second_derivative,
        gradient,
        method: "bracket expansion + golden-section search".to_string(),
        tolerance_achieved: b - a,
        iterations,
    })
}

/// Finite-difference Taylor coefficients of the area-`4 pi` log-determinant
/// at `beta = 0`, `mu = 0`. The `c*` fields are Richardson-extrapolated from
/// steps `h` and `h/2`; the `*_raw` fields use step `h` alone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TaylorCheck {
    pub h: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c1_raw: f64,
    pub c2_raw: f64,
    pub c3_raw: f64,
}

fn central_coefficients(h: f64, f0: f64) -> Result<[f64; 3]> {
    let f = fixed_area_logdet;
    let (p1, m1, p2, m2) = (f(h)?, f(-h)?, f(2.0 * h)?, f(-2.0 * h)?);
    Ok([
        (p1 - m1) / (2.0 * h),
        (p1 - 2.0 * f0 + m1) / (2.0 * h * h),
        (p2 - 2.0 * p1 + 2.0 * m1 - m2) / (12.0 * h * h * h),
    ])
}

pub fn taylor_check_at_zero(h: f64) -> Result<TaylorCheck> {
    if !(1e-4..=1e-2).contains(&h) {
        return Err(Error::domain("h", format!("step must lie in [1e-4, 1e-2], got {h}")));
    }
    let f0 = fixed_area_logdet(0.0)?;
    let coarse = central_coefficients(h, f0)?;
    let fine = central_coefficients(h / 2.0, f0)?;
    let rich = |i: usize| (4.0 * fine[i] - coarse[i]) / 3.0;
    Ok(TaylorCheck {
        h,
        c1: rich(0),
        c2: rich(1),
        c3: rich(2),
        c1_raw: coarse[0],
        c2_raw: coarse[1],
        c3_raw: coarse[2],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::determinants::round_sphere_logdet;
    use crate::special_fn::euler_gamma;

    #[test]
    fn grid_validation() {
        assert!(ScanGrid::new(ScanParam::Beta, 0.0, 0.0, 3, 0.0).is_err());
        assert!(ScanGrid::new(ScanParam::Beta, 0.0, 1.0, 1, 0.0).is_err());
        assert!(ScanGrid::new(ScanParam::Beta, -1.0, 1.0, 3, 0.0).is_err());
        assert!(ScanGrid::new(ScanParam::Mu, -1.0, 1.0, 3, 1.0).is_err());
        assert!(ScanGrid::new(ScanParam::Mu, 0.0, 1.0, 3, -1.5).is_err());
        let g = ScanGrid::new(ScanParam::Beta, -0.5, 0.5, 11, 0.0).unwrap();
        let v = g.values();
        assert_eq!(v.len(), 11);
        assert_eq!(v[5], 0.0);
        assert_eq!(v[10], 0.5);
    }

    #[test]
    fn scan_rows() {
        let g = ScanGrid::new(ScanParam::Beta, -0.5, 0.5, 5, 0.0).unwrap();
        let c = scan_curve(ScanTarget::CBeta, &g, 1e-12);
        assert!(c[2].value.unwrap().abs() < 1e-13);
        let d = scan_curve(ScanTarget::FixedAreaDet, &g, 1e-12);
        assert!((d[2].value.unwrap() - round_sphere_logdet().exp()).abs() < 1e-12);
        assert!(d.windows(2).all(|w| w[0].param < w[1].param));
    }

    #[test]
    fn inadmissible_rows_are_flagged() {
        // mu > 0 is only defined for integer orders
        let g = ScanGrid::new(ScanParam::Beta, 0.0, 2.0, 5, 0.5).unwrap();
        let rows = scan_curve(ScanTarget::FixedAreaDet, &g, 1e-10);
        let ok: Vec<bool> = rows.iter().map(|r| r.value.is_some()).collect();
        assert_eq!(ok, [true, false, true, false, true]);
        assert!(rows[1].error.as_deref().unwrap().contains("integer"));
    }

    #[test]
    fn sequential_matches_parallel() {
        let g = ScanGrid::new(ScanParam::Beta, -0.8, 3.0, 9, 0.0).unwrap();
        let s = scan_curve_with(ScanTarget::FixedAreaDet, &g, 1e-10, Execution::Sequential);
        let p = scan_curve_with(ScanTarget::FixedAreaDet, &g, 1e-10, Execution::Parallel);
        assert_eq!(s, p);
    }

    #[test]
    fn local_max_at_round_sphere() {
        let r = find_local_max(0.2, 1e-8).unwrap();
        assert!(r.location.abs() < 1e-6, "{r:?}");
        assert!((r.value - round_sphere_logdet()).abs() < 1e-10);
        let g = euler_gamma();
        assert!((r.second_derivative + 2.0 * (g / 3.0 + 1.0 / 9.0)).abs() < 1e-5);
        assert!(r.gradient.abs() < 1e-6);
        assert!(find_local_max(0.7, 1e-8).is_err());
    }

    #[test]
    fn taylor_coefficients() {
        let g = euler_gamma();
        let t = taylor_check_at_zero(1e-3).unwrap();
        assert!((t.c2 + g / 3.0 + 1.0 / 9.0).abs() < 1e-4, "{t:?}");
        assert!((t.c3 - g / 3.0 - 7.0 / 36.0).abs() < 1e-3, "{t:?}");
        assert!(t.c1.abs() < 1e-6);
        assert!(taylor_check_at_zero(0.1).is_err());
    }
}
