//! Importance-sampled Monte-Carlo estimate of the flat-sphere area, used as
//! an independent oracle for the deterministic quadrature.
//!
//! The proposal is a mixture of
//! * per-point disks `|z - p_j| < r_j` with radial law `rho = r_j u^(1/(2 beta_j + 2))`,
//!   matching the `|z - p_j|^(2 beta_j)` singularity,
//! * the uniform disk `|z| <= R`,
//! * the tail `|z| > R` with `rho = R / sqrt(u)`, matching the `|z|^-4` decay,
//!
//! so the weight `density / proposal` is bounded everywhere.
//!
//! Samples are drawn in fixed-size chunks, each from its own ChaCha stream
//! keyed by `(seed, chunk index)`, and reduced in chunk order. The result is
//! therefore identical for sequential and parallel execution.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::area::{dist, FlatSphereConfig};
use crate::error::{Error, Result};
use crate::parallel::{compensated_sum, map_ordered, Execution};

pub const MIN_SAMPLES: u64 = 10_000;
const CHUNK: u64 = 1 << 15;
const PATCH_SHARE: f64 = 0.6;
const TAIL_SHARE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

struct Proposal<'a> {
    cfg: &'a FlatSphereConfig,
    radii: Vec<f64>,
    big_r: f64,
    patch_weight: f64,
    uniform_weight: f64,
}

impl Proposal<'_> {
    fn pdf(&self, z: [f64; 2]) -> f64 {
        let mut q = 0.0;
        for ((p, o), &r) in self.cfg.points().iter().zip(self.cfg.orders()).zip(&self.radii) {
            let rho = dist(z, *p);
            if rho < r {
                let k = 2.0 * o.beta() + 2.0;
                q += self.patch_weight * k * rho.powf(k - 2.0) / (2.0 * PI * r.powf(k));
            }
        }
        let m = z[0].hypot(z[1]);
        if m <= self.big_r {
            q += self.uniform_weight / (PI * self.big_r * self.big_r);
        } else {
            q += TAIL_SHARE * self.big_r * self.big_r / (PI * m.powi(4));
        }
        q
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> [f64; 2] {
        let pick: f64 = rng.gen();
        let theta = 2.0 * PI * rng.gen::<f64>();
        let u: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
        let n = self.cfg.len();
        if pick < PATCH_SHARE {
            let j = ((pick / PATCH_SHARE) * n as f64).floor().min((n - 1) as f64) as usize;
            let k = 2.0 * self.cfg.orders()[j].beta() + 2.0;
            let rho = self.radii[j] * u.powf(1.0 / k);
            let p = self.cfg.points()[j];
            [p[0] + rho * theta.cos(), p[1] + rho * theta.sin()]
        } else if pick < 1.0 - TAIL_SHARE {
            let rho = self.big_r * u.sqrt();
            [rho * theta.cos(), rho * theta.sin()]
        } else {
            let rho = self.big_r / u.sqrt();
            [rho * theta.cos(), rho * theta.sin()]
        }
    }
}

/// Parallel by default; see [`flat_sphere_area_mc_with`].
pub fn flat_sphere_area_mc(cfg: &FlatSphereConfig, samples: u64, seed: u64) -> Result<MonteCarloEstimate> {
    flat_sphere_area_mc_with(cfg, samples, seed, Execution::default())
}

pub fn flat_sphere_area_mc_with(
    cfg: &FlatSphereConfig,
    samples: u64,
    seed: u64,
    exec: Execution,
) -> Result<MonteCarloEstimate> {
    if samples < MIN_SAMPLES {
        return Err(Error::config("samples", format!("need at least {MIN_SAMPLES} samples, got {samples}")));
    }
    let radii = cfg.patch_radii();
    let big_r = cfg.bulk_radius(&radii);
    let proposal = Proposal {
        cfg,
        radii,
        big_r,
        patch_weight: PATCH_SHARE / cfg.len() as f64,
        uniform_weight: 1.0 - PATCH_SHARE - TAIL_SHARE,
    };
    let chunks: Vec<(u64, u64)> = (0..samples.div_ceil(CHUNK))
        .map(|c| (c, CHUNK.min(samples - c * CHUNK)))
        .collect();
    let partial = map_ordered(chunks, exec, |(index, count)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let mut values = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let z = proposal.sample(&mut rng);
            values.push(cfg.density(z) / proposal.pdf(z));
        }
        let mean = compensated_sum(values.iter().copied()) / count as f64;
        let m2 = compensated_sum(values.iter().map(|v| (v - mean) * (v - mean)));
        (count as f64, mean, m2)
    });
    // Chan et al. pairwise combination, in chunk order.
    let (mut n, mut mean, mut m2) = (0.0, 0.0, 0.0);
    for (nb, mb, m2b) in partial {
        let total = n + nb;
        let delta = mb - mean;
        mean += delta * nb / total;
        m2 += m2b + delta * delta * n * nb / total;
        n = total;
    }
    let variance = m2 / (n - 1.0);
    Ok(MonteCarloEstimate {
        estimate: mean,
        stderr: (variance / n).sqrt(),
        samples,
        seed,
    })
}
