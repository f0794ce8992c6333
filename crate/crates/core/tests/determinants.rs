use std::f64::consts::{LN_2, PI};

use conedet::cone_terms::{
    rescale_logdet, zeta0_surface, zeta_disk_at0, zeta_disk_prime0, ConeOrder, SurfaceTopology,
};
use conedet::determinants::*;
use conedet::special_fn::{zeta_prime_minus1, LN_2PI};

const TOL: f64 = 1e-12;

fn spindle(n: i64, mu: f64, k: f64) -> f64 {
    let cfg = SpindleConfig::new(ConeOrder::integer(n).unwrap(), mu, k).unwrap();
    logdet_spindle(&cfg, TOL).unwrap().total
}

/// Integrals of `phi` for the unit-curvature spindle against the round sphere.
fn spindle_comparison(order: ConeOrder, mu: f64) -> ComparisonData {
    let b = order.beta();
    let a = order.angle_factor();
    let bulk = 2.0 * PI * b * (mu * mu).ln_1p() - 4.0 * PI * b + 4.0 * PI * (b + 2.0) * a.ln();
    let points = vec![
        SingularPoint { order, phi0: (2.0 * a).ln(), psi0: LN_2 },
        SingularPoint { order, phi0: (2.0 * a / (1.0 + mu * mu)).ln(), psi0: LN_2 },
    ];
    ComparisonData::closed(bulk, 0.0, points, Some((4.0 * PI * a, 4.0 * PI)))
}

#[test]
fn spindle_by_comparison_formula() {
    let cases = [
        (ConeOrder::integer(1).unwrap(), 0.0),
        (ConeOrder::integer(1).unwrap(), 0.5),
        (ConeOrder::integer(2).unwrap(), 3.0),
        (ConeOrder::integer(5).unwrap(), 0.2),
        (ConeOrder::rational(1, 3).unwrap(), 0.0),
        (ConeOrder::new(0.37).unwrap(), 0.0),
    ];
    for (order, mu) in cases {
        let via = logdet_from_reference(round_sphere_logdet(), &spindle_comparison(order, mu), TOL).unwrap();
        let direct = logdet_spindle(&SpindleConfig::new(order, mu, 1.0).unwrap(), TOL).unwrap();
        assert!((via.total - direct.total).abs() < 1e-12, "beta {} mu {mu}", order.beta());
    }
}

#[test]
fn spindle_rescaling_in_curvature() {
    // K -> 4 shrinks the metric by r = 1/2 and mu/sqrt(K) stays fixed
    let o = ConeOrder::integer(2).unwrap();
    let zeta0 = zeta0_surface(&SurfaceTopology::closed_sphere(vec![o, o]));
    let scaled = rescale_logdet(spindle(2, 3.0, 1.0), zeta0, 0.5).unwrap();
    assert!((scaled - spindle(2, 6.0, 4.0)).abs() < 1e-12);
}

#[test]
fn spindle_decreases_in_mu() {
    for n in [1, 2, 4] {
        let values: Vec<f64> = [0.0, 0.1, 0.5, 1.0, 2.0, 10.0].iter().map(|&mu| spindle(n, mu, 1.0)).collect();
        assert!(values.windows(2).all(|w| w[1] < w[0]), "{values:?}");
        let fixed: Vec<f64> = [0.0, 0.3, 3.0]
            .iter()
            .map(|&mu| logdet_spindle_area4pi(ConeOrder::integer(n).unwrap(), mu, TOL).unwrap().total)
            .collect();
        assert!(fixed.windows(2).all(|w| w[1] < w[0]));
    }
}

#[test]
fn fixed_area_beta_one() {
    let d = logdet_spindle_area4pi(ConeOrder::integer(1).unwrap(), 0.0, TOL).unwrap();
    assert!((d.total - spindle(1, 0.0, 2.0)).abs() < 1e-13);
    // 2^(1/6) e^(1 - 2 zeta'(-1)) at K = 1, moved to K = 2 by the rescaling rule
    let zp = zeta_prime_minus1();
    let expected = LN_2 / 6.0 + 1.0 - 2.0 * zp + (5.0 / 12.0 - 1.0) * LN_2;
    assert!((d.total - expected).abs() < 1e-13);
}

#[test]
fn disk_flat_case_follows_the_rescaling_chain() {
    // K = 0: the metric is 4 |z|^(2 beta) |dz|^2, i.e. |z|^(2 beta) |dz|^2 scaled by r = 2,
    // whose log det is 2 ln(2) zeta_<(0, beta) - zeta_<'(0, beta)
    for order in [
        ConeOrder::integer(0).unwrap(),
        ConeOrder::rational(1, 2).unwrap(),
        ConeOrder::rational(7, 3).unwrap(),
        ConeOrder::new(-0.8).unwrap(),
        ConeOrder::new(4.25).unwrap(),
    ] {
        let z0 = zeta_disk_at0(order);
        let unit = 2.0 * LN_2 * z0 - zeta_disk_prime0(order, TOL).unwrap();
        let chained = rescale_logdet(unit, z0, 2.0).unwrap();
        let direct = logdet_disk(&DiskConfig::new(order, 0.0).unwrap(), TOL).unwrap().total;
        assert!((chained - direct).abs() < 1e-12, "beta {}", order.beta());
    }
}

#[test]
fn disk_smooth_values() {
    let o = ConeOrder::integer(0).unwrap();
    let zp = zeta_prime_minus1();
    let flat = logdet_disk(&DiskConfig::new(o, 0.0).unwrap(), TOL).unwrap().total;
    assert!((flat - (-2.0 * zp - 5.0 / 12.0 - 0.5 * LN_2PI)).abs() < 1e-14);
    assert!((flat - logdet_flat_disk(2.0).unwrap()).abs() < 1e-14);
    assert!((logdet_flat_disk(1.0).unwrap() - flat - LN_2 / 3.0).abs() < 1e-14);
    let hemisphere = logdet_disk(&DiskConfig::new(o, 1.0).unwrap(), TOL).unwrap().total;
    assert!((hemisphere - (-0.338_096_245_803_770_88)).abs() < 1e-14);
}

#[test]
fn disk_rejects_bad_curvature() {
    let o = ConeOrder::integer(0).unwrap();
    for k in [-1.0, -2.0, f64::NAN] {
        assert_eq!(DiskConfig::new(o, k).unwrap_err().kind(), "domain");
    }
}

#[test]
fn hyperbolic_pullback_is_quadratic() {
    let s = HyperbolicSummary {
        orders: vec![-0.8, -0.9, -0.6, -0.5],
        phi_consts: vec![0.2, -0.3, 0.1, 0.4],
        liouville_integral: -1.7,
    };
    let d = logdet_hyperbolic_sphere(&s, TOL).unwrap();
    let c = pullback_constant_c(d.total, s.degree()).unwrap();
    let c_twice = pullback_constant_c(d.total + LN_2, s.degree()).unwrap();
    assert!((c_twice / c - 4.0).abs() < 1e-13);
    let l1 = logdet_pullback(c, 2.0, 0.1, 0.2).unwrap();
    let l2 = logdet_pullback(c_twice, 2.0, 0.1, 0.2).unwrap();
    assert!((l2 - l1 - 2.0 * LN_2).abs() < 1e-13);
}

#[test]
fn logdet_parts_sum() {
    let all = [
        logdet_spindle(&SpindleConfig::new(ConeOrder::integer(3).unwrap(), 1.5, 2.0).unwrap(), TOL).unwrap(),
        logdet_spindle_area4pi(ConeOrder::new(-0.4).unwrap(), 0.0, TOL).unwrap(),
        logdet_disk(&DiskConfig::new(ConeOrder::new(1.3).unwrap(), 0.6).unwrap(), TOL).unwrap(),
        polyakov_compare(&spindle_comparison(ConeOrder::integer(2).unwrap(), 1.0), TOL).unwrap(),
    ];
    for d in all {
        let sum: f64 = d.parts.iter().map(|p| p.value).sum();
        assert!((sum - d.total).abs() < 1e-13, "{d:?}");
    }
}
