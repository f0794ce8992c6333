//! Adaptive 1-D quadrature and the total area of flat metrics with conical
//! points.

mod area;
mod gk;
mod mc;

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parallel::compensated_sum;

pub use area::{flat_sphere_area, FlatSphereConfig};
pub(crate) use area::dist;
pub use mc::{flat_sphere_area_mc, flat_sphere_area_mc_with, MonteCarloEstimate};

/// Integration interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    Finite(f64, f64),
    /// `[a, +inf)`, mapped onto `[0, 1)` by `x = a + t / (1 - t)`.
    UpperHalfLine(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    /// Accept when the error is below `rel_tol * |value|` even if it exceeds
    /// `abs_tol`. Zero disables.
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Power exponent `alpha > -1` of an integrable `(x - a)^alpha` endpoint
    /// singularity at the left end.
    pub left_exponent: Option<f64>,
    /// Same for `(b - x)^alpha` at the right end of a finite interval.
    pub right_exponent: Option<f64>,
}

impl QuadratureOptions {
    pub fn new(abs_tol: f64) -> Self {
        QuadratureOptions {
            abs_tol,
            rel_tol: 0.0,
            max_subdivisions: 2000,
            left_exponent: None,
            right_exponent: None,
        }
    }

    pub fn rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n;
        self
    }

    pub fn left_exponent(mut self, alpha: f64) -> Self {
        self.left_exponent = Some(alpha);
        self
    }

    pub fn right_exponent(mut self, alpha: f64) -> Self {
        self.right_exponent = Some(alpha);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureReport {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// Effective tolerance the estimate was held to.
    pub tolerance: f64,
}

impl QuadratureReport {
    /// Turn a non-converged report into an error.
    pub fn require(self, what: &'static str) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::Convergence {
                what,
                error_estimate: self.error_estimate,
                tolerance: self.tolerance,
            })
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Segment {
    Plain,
    /// `x = a + len * u^p`, `u in [0, 1]`.
    LeftPower { a: f64, len: f64, p: f64 },
    /// `x = b - len * u^p`.
    RightPower { b: f64, len: f64, p: f64 },
    /// `x = a + t / (1 - t)`.
    HalfLine { a: f64 },
}

impl Segment {
    #[inline]
    fn eval<F: Fn(f64) -> f64>(&self, f: &F, t: f64) -> f64 {
        match *self {
            Segment::Plain => f(t),
            Segment::LeftPower { a, len, p } => {
                let up = t.powf(p);
                f(a + len * up) * len * p * up / t
            }
            Segment::RightPower { b, len, p } => {
                let up = t.powf(p);
                f(b - len * up) * len * p * up / t
            }
            Segment::HalfLine { a } => {
                let s = 1.0 - t;
                f(a + t / s) / (s * s)
            }
        }
    }
}

struct Panel {
    segment: usize,
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    order: u64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    // Largest error first; ties resolved by creation order for determinism.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.order.cmp(&self.order))
    }
}

fn check_exponent(alpha: Option<f64>, name: &'static str) -> Result<Option<f64>> {
    match alpha {
        Some(a) if !(a > -1.0) || !a.is_finite() => Err(Error::config(
            name,
            format!("endpoint exponent must exceed -1, got {a}"),
        )),
        other => Ok(other),
    }
}

fn build_segments(domain: Domain, opts: &QuadratureOptions) -> Result<Vec<(Segment, f64, f64)>> {
    let left = check_exponent(opts.left_exponent, "left_exponent")?;
    let right = check_exponent(opts.right_exponent, "right_exponent")?;
    match domain {
        Domain::Finite(a, b) => {
            if !(a < b) || !a.is_finite() || !b.is_finite() {
                return Err(Error::config("domain", format!("need finite a < b, got [{a}, {b}]")));
            }
            match (left, right) {
                (None, None) => Ok(vec![(Segment::Plain, a, b)]),
                (Some(al), None) => Ok(vec![(
                    Segment::LeftPower { a, len: b - a, p: 1.0 / (al + 1.0) },
                    0.0,
                    1.0,
                )]),
                (None, Some(ar)) => Ok(vec![(
                    Segment::RightPower { b, len: b - a, p: 1.0 / (ar + 1.0) },
                    0.0,
                    1.0,
                )]),
                (Some(al), Some(ar)) => {
                    let half = 0.5 * (b - a);
                    Ok(vec![
                        (Segment::LeftPower { a, len: half, p: 1.0 / (al + 1.0) }, 0.0, 1.0),
                        (Segment::RightPower { b, len: half, p: 1.0 / (ar + 1.0) }, 0.0, 1.0),
                    ])
                }
            }
        }
        Domain::UpperHalfLine(a) => {
            if !a.is_finite() {
                return Err(Error::config("domain", "half-line start must be finite"));
            }
            if right.is_some() {
                return Err(Error::config("right_exponent", "no right endpoint on a half-line"));
            }
            match left {
                None => Ok(vec![(Segment::HalfLine { a }, 0.0, 1.0)]),
                Some(al) => Ok(vec![
                    (Segment::LeftPower { a, len: 1.0, p: 1.0 / (al + 1.0) }, 0.0, 1.0),
                    (Segment::HalfLine { a: a + 1.0 }, 0.0, 1.0),
                ]),
            }
        }
    }
}

/// Globally adaptive Gauss-Kronrod integration.
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate meets `max(abs_tol, rel_tol * |value|)` or the subdivision budget
/// is spent. A report with `converged = false` is returned in the latter case.
/// Invalid domains or options are configuration errors.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    domain: Domain,
    opts: &QuadratureOptions,
) -> Result<QuadratureReport> {
    if !(opts.abs_tol >= 0.0) || !(opts.rel_tol >= 0.0) || (opts.abs_tol == 0.0 && opts.rel_tol == 0.0) {
        return Err(Error::config("tol", "tolerances must be non-negative and not both zero"));
    }
    let segments = build_segments(domain, opts)?;
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0usize;
    let mut order = 0u64;
    let mut push = |heap: &mut BinaryHeap<Panel>, seg: usize, lo: f64, hi: f64, evaluations: &mut usize| {
        let s = segments[seg].0;
        let est = gk::gk15(&|t| s.eval(&f, t), lo, hi);
        *evaluations += 15;
        heap.push(Panel { segment: seg, lo, hi, value: est.value, error: est.error, order });
        order += 1;
        (est.value, est.error)
    };
    for (i, &(_, lo, hi)) in segments.iter().enumerate() {
        push(&mut heap, i, lo, hi, &mut evaluations);
    }

    let totals = |heap: &BinaryHeap<Panel>| {
        let mut panels: Vec<&Panel> = heap.iter().collect();
        panels.sort_by_key(|p| p.order);
        (
            compensated_sum(panels.iter().map(|p| p.value)),
            compensated_sum(panels.iter().map(|p| p.error)),
        )
    };

    let mut subdivisions = 0usize;
    let mut err_running: f64 = heap.iter().map(|p| p.error).sum();
    let mut val_running: f64 = heap.iter().map(|p| p.value).sum();
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * val_running.abs());
        if err_running <= target || subdivisions >= opts.max_subdivisions {
            let (value, error) = totals(&heap);
            let tolerance = opts.abs_tol.max(opts.rel_tol * value.abs());
            if error <= tolerance || subdivisions >= opts.max_subdivisions {
                return Ok(QuadratureReport {
                    value,
                    error_estimate: error,
                    evaluations,
                    converged: error <= tolerance && value.is_finite(),
                    tolerance,
                });
            }
            err_running = error;
            val_running = value;
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(worst.lo < mid && mid < worst.hi) {
            // Panel cannot be split further.
            heap.push(worst);
            let (value, error) = totals(&heap);
            return Ok(QuadratureReport {
                value,
                error_estimate: error,
                evaluations,
                converged: false,
                tolerance: opts.abs_tol.max(opts.rel_tol * value.abs()),
            });
        }
        let (v1, e1) = push(&mut heap, worst.segment, worst.lo, mid, &mut evaluations);
        let (v2, e2) = push(&mut heap, worst.segment, mid, worst.hi, &mut evaluations);
        subdivisions += 1;
        // Recompute from scratch occasionally to keep running sums honest.
        if subdivisions.is_multiple_of(64) {
            let (v, e) = totals(&heap);
            val_running = v;
            err_running = e;
        } else {
            val_running += v1 + v2 - worst.value;
            err_running += e1 + e2 - worst.error;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn exponential_on_half_line() {
        let r = integrate_adaptive(|x| (-x).exp(), Domain::UpperHalfLine(0.0), &QuadratureOptions::new(1e-12)).unwrap();
        assert!(r.converged);
        assert!((r.value - 1.0).abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn inverse_sqrt_with_declared_exponent() {
        let opts = QuadratureOptions::new(1e-12).left_exponent(-0.5);
        let r = integrate_adaptive(|x| 1.0 / x.sqrt(), Domain::Finite(0.0, 1.0), &opts).unwrap();
        assert!(r.converged);
        assert!((r.value - 2.0).abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn bose_integral() {
        let f = |x: f64| if x == 0.0 { 1.0 } else { x / x.exp_m1() };
        let r = integrate_adaptive(f, Domain::UpperHalfLine(0.0), &QuadratureOptions::new(1e-12)).unwrap();
        // oracle: sum 1/n^2 by direct summation plus integral tail
        let n = 100_000;
        let direct: f64 = (1..=n).rev().map(|k| 1.0 / (k as f64 * k as f64)).sum::<f64>() + 1.0 / n as f64
            - 0.5 / (n as f64 * n as f64);
        assert!((r.value - direct).abs() < 1e-11);
        assert!((r.value - PI * PI / 6.0).abs() < 1e-12);
    }

    #[test]
    fn both_endpoint_singularities() {
        // Beta(1/2, 1/3) = Gamma(1/2) Gamma(1/3) / Gamma(5/6)
        let opts = QuadratureOptions::new(1e-11).left_exponent(-0.5).right_exponent(-2.0 / 3.0);
        let r = integrate_adaptive(
            |x: f64| x.powf(-0.5) * (1.0 - x).powf(-2.0 / 3.0),
            Domain::Finite(0.0, 1.0),
            &opts,
        )
        .unwrap();
        let lg = crate::special_fn::log_gamma_unchecked;
        let exact = (lg(0.5) + lg(1.0 / 3.0) - lg(5.0 / 6.0)).exp();
        assert!(r.converged);
        assert!((r.value - exact).abs() < 1e-10, "{} vs {exact}", r.value);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        // Oscillatory integrand with too small a budget.
        let opts = QuadratureOptions::new(1e-14).max_subdivisions(3);
        let r = integrate_adaptive(|x: f64| (200.0 * x).sin(), Domain::Finite(0.0, 10.0), &opts).unwrap();
        assert!(!r.converged);
        assert!(r.require("test").is_err());
    }

    #[test]
    fn invalid_options_are_rejected() {
        assert!(integrate_adaptive(|x| x, Domain::Finite(1.0, 0.0), &QuadratureOptions::new(1e-8)).is_err());
        assert!(integrate_adaptive(|x| x, Domain::Finite(0.0, 1.0), &QuadratureOptions::new(0.0)).is_err());
        let bad = QuadratureOptions::new(1e-8).left_exponent(-1.0);
        assert!(integrate_adaptive(|x| x, Domain::Finite(0.0, 1.0), &bad).is_err());
    }

    #[test]
    fn deterministic_repeat() {
        let f = |x: f64| (x * x).cos() / (1.0 + x);
        let o = QuadratureOptions::new(1e-12);
        let a = integrate_adaptive(f, Domain::Finite(0.0, 7.0), &o).unwrap();
        let b = integrate_adaptive(f, Domain::Finite(0.0, 7.0), &o).unwrap();
        assert_eq!(a, b);
    }
}
