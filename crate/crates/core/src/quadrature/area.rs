//! Total area `A = int_C prod_j |z - p_j|^(2 beta_j) dA` of a flat metric
//! on the sphere with conical points `p_j`.
//!
//! The plane is split by a smooth partition of unity into
//! * one polar patch per cone point, where the radial substitution
//!   `rho = r_j s^(1/(2 beta_j + 2))` absorbs `rho^(2 beta_j + 1)` exactly,
//! * the bulk disk `|z| <= R` weighted by `1 - sum_j chi_j`,
//! * the exterior `|z| > R`, integrated in the chart `w = 1/z` where the
//!   degree condition `sum beta_j = -2` makes the integrand
//!   `prod_j |1 - p_j w|^(2 beta_j)` smooth.

use std::cell::Cell;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{integrate_adaptive, Domain, QuadratureOptions, QuadratureReport};
use crate::cone_terms::ConeOrder;
use crate::error::{Error, Result};
use crate::parallel::compensated_sum;

/// Points `p_j` in the plane with cone orders summing to `-2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlatSphereConfig {
    points: Vec<[f64; 2]>,
    orders: Vec<ConeOrder>,
}

pub const DEGREE_TOLERANCE: f64 = 1e-12;
pub const MIN_SEPARATION: f64 = 1e-10;

impl FlatSphereConfig {
    pub fn new(points: Vec<[f64; 2]>, orders: Vec<ConeOrder>) -> Result<Self> {
        if points.len() != orders.len() {
            return Err(Error::config(
                "orders",
                format!("{} points but {} orders", points.len(), orders.len()),
            ));
        }
        if points.len() < 3 {
            return Err(Error::config("points", format!("need at least 3 points, got {}", points.len())));
        }
        if points.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(Error::config("points", "coordinates must be finite"));
        }
        let degree = compensated_sum(orders.iter().map(|o| o.beta()));
        if (degree + 2.0).abs() > DEGREE_TOLERANCE {
            return Err(Error::config("orders", format!("orders must sum to -2, got {degree}")));
        }
        for i in 0..points.len() {
            for j in 0..i {
                if dist(points[i], points[j]) <= MIN_SEPARATION {
                    return Err(Error::config("points", format!("points {j} and {i} coincide")));
                }
            }
        }
        Ok(FlatSphereConfig { points, orders })
    }

    /// Seeded random configuration of `n` points in the disk `|z| < 3/2`,
    /// pairwise at least `0.4` apart, with orders within `spread` of `-2/n`.
    pub fn random(n: usize, spread: f64, seed: u64) -> Result<Self> {
        if n < 3 {
            return Err(Error::config("points", format!("need at least 3 points, got {n}")));
        }
        let mean = -2.0 / n as f64;
        if !(spread >= 0.0 && mean - spread > -1.0 + 0.05) {
            return Err(Error::config("spread", format!("orders must stay above -0.95, got spread {spread}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points: Vec<[f64; 2]> = Vec::with_capacity(n);
        while points.len() < n {
            let (r, t) = (1.5 * rng.gen::<f64>().sqrt(), 2.0 * PI * rng.gen::<f64>());
            let p = [r * t.cos(), r * t.sin()];
            if points.iter().all(|q| dist(p, *q) >= 0.4) {
                points.push(p);
            }
        }
        let shifts: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let avg = shifts.iter().sum::<f64>() / n as f64;
        let top = shifts.iter().map(|s| (s - avg).abs()).fold(0.0, f64::max).max(1e-300);
        let mut orders: Vec<f64> = shifts.iter().map(|s| mean + spread * (s - avg) / top).collect();
        orders[n - 1] = -2.0 - orders[..n - 1].iter().sum::<f64>();
        Self::from_raw(points, &orders)
    }

    /// Validate raw orders as well.
    pub fn from_raw(points: Vec<[f64; 2]>, orders: &[f64]) -> Result<Self> {
        let orders = orders.iter().map(|&b| ConeOrder::new(b)).collect::<Result<Vec<_>>>()?;
        Self::new(points, orders)
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn orders(&self) -> &[ConeOrder] {
        &self.orders
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `p_j -> c p_j` for complex `c = [re, im]`.
    pub fn scaled(&self, c: [f64; 2]) -> Result<Self> {
        let points = self
            .points
            .iter()
            .map(|p| [c[0] * p[0] - c[1] * p[1], c[0] * p[1] + c[1] * p[0]])
            .collect();
        Self::new(points, self.orders.clone())
    }

    pub fn rotated(&self, theta: f64) -> Result<Self> {
        self.scaled([theta.cos(), theta.sin()])
    }

    /// Reorder points and orders together: entry `i` of the result is entry
    /// `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.len() {
            return Err(Error::config("perm", "permutation length mismatch"));
        }
        let mut seen = vec![false; self.len()];
        for &i in perm {
            if i >= self.len() || seen[i] {
                return Err(Error::config("perm", "not a permutation"));
            }
            seen[i] = true;
        }
        Self::new(
            perm.iter().map(|&i| self.points[i]).collect(),
            perm.iter().map(|&i| self.orders[i]).collect(),
        )
    }

    /// Patch radius: half the distance to the nearest other point, capped at 1.
    pub(crate) fn patch_radii(&self) -> Vec<f64> {
        (0..self.len())
            .map(|j| {
                let nearest = (0..self.len())
                    .filter(|&k| k != j)
                    .map(|k| dist(self.points[j], self.points[k]))
                    .fold(f64::INFINITY, f64::min);
                (0.5 * nearest).min(1.0)
            })
            .collect()
    }

    /// Radius of the bulk disk; every patch lies in `|z| <= R/2`.
    pub(crate) fn bulk_radius(&self, radii: &[f64]) -> f64 {
        let reach = self
            .points
            .iter()
            .zip(radii)
            .map(|(p, r)| p[0].hypot(p[1]) + r)
            .fold(0.0, f64::max);
        2.0 * reach
    }

    /// `prod_j |z - p_j|^(2 beta_j)`, skipping index `skip`.
    pub(crate) fn density_except(&self, z: [f64; 2], skip: Option<usize>) -> f64 {
        let mut log = 0.0;
        for (k, (p, o)) in self.points.iter().zip(&self.orders).enumerate() {
            if Some(k) == skip {
                continue;
            }
            let dx = z[0] - p[0];
            let dy = z[1] - p[1];
            log += o.beta() * (dx * dx + dy * dy).ln();
        }
        log.exp()
    }

    pub(crate) fn density(&self, z: [f64; 2]) -> f64 {
        self.density_except(z, None)
    }

    /// `prod_j |1 - p_j w|^(2 beta_j)`.
    pub(crate) fn exterior_density(&self, w: [f64; 2]) -> f64 {
        let mut log = 0.0;
        for (p, o) in self.points.iter().zip(&self.orders) {
            let re = 1.0 - (p[0] * w[0] - p[1] * w[1]);
            let im = -(p[0] * w[1] + p[1] * w[0]);
            log += o.beta() * (re * re + im * im).ln();
        }
        log.exp()
    }
}

pub(crate) fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Smooth step: 1 on `t <= 1/2`, 0 on `t >= 1`.
pub(crate) fn cutoff(t: f64) -> f64 {
    if t <= 0.5 {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        let psi = |s: f64| (-1.0 / s).exp();
        let a = psi(1.0 - t);
        a / (a + psi(t - 0.5))
    }
}

struct Nested<'a> {
    rel_tol: f64,
    inner_failed: &'a Cell<bool>,
}

impl Nested<'_> {
    fn inner<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        // one failed inner integral already sinks the result
        if self.inner_failed.get() {
            return f64::NAN;
        }
        let opts = QuadratureOptions::new(1e-300).rel_tol(self.rel_tol / 10.0).max_subdivisions(400);
        match integrate_adaptive(f, Domain::Finite(0.0, 2.0 * PI), &opts) {
            Ok(r) => {
                if !r.converged {
                    self.inner_failed.set(true);
                }
                r.value
            }
            Err(_) => {
                self.inner_failed.set(true);
                f64::NAN
            }
        }
    }

    /// Outer integral over `[lo, hi]`; the reported error adds the inner
    /// relative error bound.
    fn outer<F: Fn(f64) -> f64>(&self, f: F, lo: f64, hi: f64) -> Result<QuadratureReport> {
        let opts = QuadratureOptions::new(1e-300).rel_tol(0.8 * self.rel_tol).max_subdivisions(400);
        let mut r = integrate_adaptive(f, Domain::Finite(lo, hi), &opts)?;
        r.error_estimate += r.value.abs() * self.rel_tol / 10.0;
        Ok(r)
    }
}

/// Smallest relative tolerance the nested rule can certify in double precision.
pub const MIN_AREA_TOL: f64 = 1e-13;

/// Total area, with `tol` a relative tolerance: a converged report satisfies
/// `error_estimate <= tol * value`. Tolerances below [`MIN_AREA_TOL`] fail
/// with a convergence error without integrating.
pub fn flat_sphere_area(cfg: &FlatSphereConfig, tol: f64) -> Result<QuadratureReport> {
    if !(tol > 0.0) || tol >= 1.0 {
        return Err(Error::config("tol", format!("relative tolerance must lie in (0, 1), got {tol}")));
    }
    if tol < MIN_AREA_TOL {
        return Err(Error::Convergence {
            what: "flat sphere area",
            error_estimate: MIN_AREA_TOL,
            tolerance: tol,
        });
    }
    let radii = cfg.patch_radii();
    let big_r = cfg.bulk_radius(&radii);
    let failed = Cell::new(false);
    let nested = Nested { rel_tol: tol, inner_failed: &failed };
    let mut pieces: Vec<QuadratureReport> = Vec::with_capacity(cfg.len() + 2);

    for (j, (&p, &r)) in cfg.points.iter().zip(&radii).enumerate() {
        let k = 2.0 * cfg.orders[j].beta() + 2.0;
        let scale = r.powf(k) / k;
        // rho(s) = r s^(1/k); cutoff active for s >= 2^-k
        let s_half = 0.5f64.powf(k);
        let radial = |s: f64| {
            if s == 0.0 {
                return 0.0;
            }
            let rho = r * s.powf(1.0 / k);
            let weight = cutoff(rho / r);
            if weight == 0.0 {
                return 0.0;
            }
            weight
                * nested.inner(|th| {
                    let z = [p[0] + rho * th.cos(), p[1] + rho * th.sin()];
                    cfg.density_except(z, Some(j))
                })
        };
        let mut inner_part = nested.outer(radial, 0.0, s_half)?;
        let outer_part = nested.outer(radial, s_half, 1.0)?;
        inner_part.value += outer_part.value;
        inner_part.error_estimate += outer_part.error_estimate;
        inner_part.evaluations += outer_part.evaluations;
        inner_part.converged &= outer_part.converged;
        inner_part.value *= scale;
        inner_part.error_estimate *= scale;
        pieces.push(inner_part);
    }

    let bulk = |rho: f64| {
        rho * nested.inner(|th| {
            let z = [rho * th.cos(), rho * th.sin()];
            let mask = 1.0
                - cfg
                    .points
                    .iter()
                    .zip(&radii)
                    .map(|(p, r)| cutoff(dist(z, *p) / r))
                    .sum::<f64>();
            if mask <= 0.0 {
                0.0
            } else {
                mask * cfg.density(z)
            }
        })
    };
    pieces.push(nested.outer(bulk, 0.0, big_r)?);

    let exterior = |sigma: f64| {
        sigma * nested.inner(|th| cfg.exterior_density([sigma * th.cos(), sigma * th.sin()]))
    };
    pieces.push(nested.outer(exterior, 0.0, 1.0 / big_r)?);

    let value = compensated_sum(pieces.iter().map(|p| p.value));
    let error_estimate = compensated_sum(pieces.iter().map(|p| p.error_estimate));
    let tolerance = tol * value.abs();
    Ok(QuadratureReport {
        value,
        error_estimate,
        evaluations: pieces.iter().map(|p| p.evaluations).sum(),
        converged: pieces.iter().all(|p| p.converged)
            && !failed.get()
            && value.is_finite()
            && error_estimate <= tolerance,
        tolerance,
    })
}
