//! Closed-form log-determinants of the Friedrichs Laplacian.
//!
//! Every formula returns a [`LogDet`], whose labelled parts add up to the
//! total; the CLI exposes the parts with `--breakdown`.

mod comparison;
mod disk;
mod flat_sphere;
mod hyperbolic;
mod spindle;

use serde::Serialize;

use crate::parallel::compensated_sum;
use crate::special_fn::constants;

pub use comparison::{
    logdet_from_reference, polyakov_compare, polyakov_compare_two_singular, ComparisonData, SingularPoint,
    TwoSingularData, TwoSingularIntegrals, TwoSingularPoint,
};
pub use disk::{logdet_disk, logdet_flat_disk, DiskConfig};
pub use flat_sphere::{
    log_det_over_area, log_det_over_area_as, logdet_flat_sphere, logdet_flat_sphere_as, logdet_flat_sphere_as_with_area,
    logdet_flat_sphere_with_area, ZPrimeDefinition,
};
pub use hyperbolic::{logdet_hyperbolic_sphere, logdet_pullback, pullback_constant_c, HyperbolicSummary};
pub use spindle::{
    logdet_spindle, logdet_spindle_area4pi, spindle_asymptotic, spindle_distance, AsymptoticRegime, SpindleConfig,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogDetPart {
    pub label: &'static str,
    pub value: f64,
}

/// A log-determinant together with the terms it was assembled from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogDet {
    pub total: f64,
    pub parts: Vec<LogDetPart>,
}

impl LogDet {
    pub(crate) fn from_parts(parts: &[(&'static str, f64)]) -> Self {
        let parts: Vec<LogDetPart> = parts.iter().map(|&(label, value)| LogDetPart { label, value }).collect();
        LogDet {
            total: compensated_sum(parts.iter().map(|p| p.value)),
            parts,
        }
    }

    pub(crate) fn with_part(mut self, label: &'static str, value: f64) -> Self {
        self.parts.push(LogDetPart { label, value });
        self.total = compensated_sum(self.parts.iter().map(|p| p.value));
        self
    }

    pub fn part(&self, label: &str) -> Option<f64> {
        self.parts.iter().find(|p| p.label == label).map(|p| p.value)
    }

    /// `det = exp(total)`.
    pub fn det(&self) -> f64 {
        self.total.exp()
    }
}

/// `log det` of the round unit sphere: `1/2 - 4 zeta'(-1)`.
pub fn round_sphere_logdet() -> f64 {
    0.5 - 4.0 * constants().zeta_prime_minus1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parts_add_up() {
        let d = LogDet::from_parts(&[("a", 1.0), ("b", 1e-17), ("c", -1.0)]).with_part("d", 0.25);
        assert_eq!(d.total, 0.25 + 1e-17);
        assert_eq!(d.part("b"), Some(1e-17));
        assert_eq!(d.part("zzz"), None);
    }

    #[test]
    fn round_sphere_value() {
        assert!((round_sphere_logdet() - 1.161_684_574_801_803_7).abs() < 1e-14);
    }
}
