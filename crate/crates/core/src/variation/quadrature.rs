use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::manifold::{sphere_volume, Sphere, SpherePoint};
use crate::rng::{self, Rng};

/// Uniform Monte Carlo over a sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureEstimate {
    pub estimate: f64,
    pub std_error: f64,
    /// `vol(S^k(r))`
    pub volume: f64,
    /// Sample variance of the integrand.
    pub variance: f64,
    pub accepted: usize,
    pub rejected: usize,
}

impl Quadrature {
    pub fn new(samples: usize, seed: u64) -> Self {
        Quadrature { samples, seed }
    }
}

/// `vol · mean(f)` over uniform points. Sample `i` draws its point, and
/// anything else `f` needs, from stream `i` of the seed. NaN values are
/// rejected; more than 1% rejections is an error.
pub fn integrate_over_sphere<F>(sphere: &Sphere, quad: &Quadrature, f: F) -> Result<QuadratureEstimate>
where
    F: Fn(&SpherePoint, &mut Rng) -> Result<f64> + Sync,
{
    if quad.samples == 0 {
        return Err(GeometryError::Precondition("quadrature needs at least one sample".into()));
    }
    let values: Vec<f64> = (0..quad.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(quad.seed, i as u64);
            let p = sphere.random_point_with(&mut rng);
            f(&p, &mut rng)
        })
        .collect::<Result<_>>()?;
    let good: Vec<f64> = values.iter().copied().filter(|v| !v.is_nan()).collect();
    let rejected = values.len() - good.len();
    if rejected * 100 > values.len() || good.is_empty() {
        return Err(GeometryError::TooManyRejections { rejected, total: values.len() });
    }
    let k = good.len() as f64;
    let mean = good.iter().sum::<f64>() / k;
    let variance = if good.len() > 1 {
        good.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0)
    } else {
        0.0
    };
    let volume = sphere_volume(sphere.dim(), sphere.radius());
    Ok(QuadratureEstimate {
        estimate: volume * mean,
        std_error: volume * (variance / k).sqrt(),
        volume,
        variance,
        accepted: good.len(),
        rejected,
    })
}
