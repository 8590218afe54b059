use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::fields::{hopf_field, singular_decomposition};
use crate::manifold::{Sphere, TOL_FD};
use crate::report::{CheckResult, VerificationReport};
use crate::rng;
use crate::variation::fiber::propagate_fiber_frame;
use crate::variation::field::{horizontal_constant_field, horizontal_project, stable_s3_field};
use crate::variation::integrand::{duschek_integrand_general, reduced_integrand, s3_stable_form};
use crate::variation::quadrature::{integrate_over_sphere, Quadrature};
use crate::variation::witness::{destabilizing_field, witness_residuals};

/// Tolerance on integrand ratios.
pub const RATIO_TOL: f64 = 1e-3;

const CLOSURE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StabilityMode {
    StableS3,
    Instability,
}

impl StabilityMode {
    pub fn for_dim(dim: usize) -> Self {
        if dim == 3 {
            StabilityMode::StableS3
        } else {
            StabilityMode::Instability
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            StabilityMode::StableS3 => "stable-S3",
            StabilityMode::Instability => "instability",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityOptions {
    /// Random variation fields in stable mode.
    pub fields: usize,
    /// Points per field in stable mode.
    pub points: usize,
    /// Samples along the fiber in instability mode.
    pub fiber_steps: usize,
    /// Monte Carlo samples for the `δ²Vol` estimate.
    pub mc_samples: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        StabilityOptions { fields: 100, points: 100, fiber_steps: 256, mc_samples: 2000, tol: RATIO_TOL, seed: 0 }
    }
}

fn validate(dim: usize, mode: StabilityMode) -> Result<()> {
    if dim < 3 || dim.is_multiple_of(2) {
        return Err(GeometryError::Precondition(format!(
            "the Hopf field needs an odd dimension >= 3, got {dim}"
        )));
    }
    if mode == StabilityMode::StableS3 && dim != 3 {
        return Err(GeometryError::Precondition("stable-S3 mode needs dim 3".into()));
    }
    Ok(())
}

/// Sign of the second variation of `ξ(S^dim)` for the Hopf field, certified
/// pointwise on the reduced integrand.
pub fn stability_verdict(dim: usize, mode: StabilityMode, opts: &StabilityOptions) -> Result<VerificationReport> {
    validate(dim, mode)?;
    let start = std::time::Instant::now();
    let mut report = VerificationReport::new("variation");
    report
        .param("dim", dim)
        .param("field", "hopf")
        .param("radius", 1.0)
        .param("mode", mode.name())
        .param("seed", opts.seed)
        .param("tol", opts.tol);
    report.note("‖∇̄⊥η̃‖ in the second variation integrand is read as a squared norm");
    match mode {
        StabilityMode::StableS3 => stable_mode(&mut report, opts)?,
        StabilityMode::Instability => instability_mode(&mut report, dim, opts)?,
    }
    report.wall_time = start.elapsed().as_secs_f64();
    Ok(report)
}

struct StableSample {
    margin: f64,
    ratio: f64,
    form_gap: f64,
    general_ratio: f64,
}

fn stable_mode(report: &mut VerificationReport, opts: &StabilityOptions) -> Result<()> {
    report.param("fields", opts.fields).param("points", opts.points);
    let s3 = Sphere::unit(4)?;
    let seed = rng::derive_seed(opts.seed, 1);
    let samples: Vec<StableSample> = (0..opts.fields)
        .into_par_iter()
        .map(|f| -> Result<Vec<StableSample>> {
            let v = stable_s3_field(rng::derive_seed(seed, f as u64), 3)?;
            let mut rng = rng::stream(seed, f as u64);
            (0..opts.points)
                .map(|_| {
                    let p = s3.random_point_with(&mut rng);
                    let sd = singular_decomposition(v.xi(), &p)?;
                    let r = reduced_integrand(&v, &p, Some(&sd))?;
                    let form = s3_stable_form(&v, &p)?;
                    Ok(StableSample {
                        margin: 0.5 * r.eta_sq - r.value,
                        ratio: r.ratio(),
                        form_gap: (form - r.value).abs() / (1.0 + r.value.abs()),
                        general_ratio: f64::NAN,
                    })
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let n = samples.len();
    let margin = samples.iter().map(|s| s.margin).fold(f64::NEG_INFINITY, f64::max).max(0.0);
    let min_ratio = samples.iter().map(|s| s.ratio).filter(|r| r.is_finite()).fold(f64::INFINITY, f64::min);
    let form_gap = samples.iter().map(|s| s.form_gap).fold(0.0, f64::max);
    let positive = samples.iter().all(|s| s.ratio > 0.0);
    report.push(CheckResult::new("integrand >= |eta|^2/2", n, margin, opts.tol));
    report.push(CheckResult::new("reduced integrand = S3 decomposition", n, form_gap, 1e-8));
    report.push(CheckResult::new("integrand > 0", n, if positive { 0.0 } else { 1.0 }, 0.0));
    report.datum("min_ratio", min_ratio).datum("samples", n);

    // the general integrand for comparison on a few points
    let v = stable_s3_field(seed, 3)?;
    let mut rng = rng::stream(seed, u64::MAX);
    let general: Vec<StableSample> = (0..opts.points.min(20))
        .map(|_| {
            let p = s3.random_point_with(&mut rng);
            let g = duschek_integrand_general(&v, &p)?;
            Ok(StableSample { margin: 0.0, ratio: 0.0, form_gap: 0.0, general_ratio: g.value / g.eta_sq })
        })
        .collect::<Result<_>>()?;
    let gmin = general.iter().map(|s| s.general_ratio).fold(f64::INFINITY, f64::min);
    report.datum("general_integrand_min_ratio", gmin);
    report.note(format!(
        "general integrand from the Sasaki connection has minimum ratio {gmin:.6} on the same family; \
         its connection term differs from the reduced form"
    ));

    let mc = integrate_over_sphere(&s3, &Quadrature::new(opts.mc_samples, rng::derive_seed(opts.seed, 2)), |p, _| {
        Ok(reduced_integrand(&v, p, None)?.value)
    })?;
    report.datum("second_variation", mc.estimate).datum("second_variation_std_error", mc.std_error);
    report.datum("witness", v.descriptor().to_string());
    let ok = report.passed();
    report.conclusion = Some(if ok { "stable" } else { "inconclusive" }.into());
    Ok(())
}

fn instability_mode(report: &mut VerificationReport, dim: usize, opts: &StabilityOptions) -> Result<()> {
    report.param("fiber_steps", opts.fiber_steps);
    let d = dim + 1;
    let m = dim / 2;
    let n = (dim - 1) as f64;
    let expected = (5.0 - 2.0 * n) / 2.0;
    let sphere = Sphere::unit(d)?;
    let xi = hopf_field(m, 1.0)?;
    let p0 = sphere.random_point(rng::derive_seed(opts.seed, 3));
    let fiber = propagate_fiber_frame(&p0, m, opts.fiber_steps)?;
    let k = 1;
    let eta = destabilizing_field(&fiber, k)?;
    let res = witness_residuals(&fiber, k, &eta)?;

    let ratios: Vec<(f64, f64)> = (0..fiber.len())
        .into_par_iter()
        .map(|j| {
            let q = sphere.point(fiber.point(j).clone())?;
            let r = reduced_integrand(&eta, &q, None)?;
            Ok((r.ratio(), r.value))
        })
        .collect::<Result<_>>()?;
    let dev = ratios.iter().map(|(r, _)| (r - expected).abs()).fold(0.0, f64::max);
    let worst = ratios.iter().map(|(r, _)| *r).fold(f64::NEG_INFINITY, f64::max);
    let samples = fiber.len();
    report.push(CheckResult::new("integrand ratio = (5-2n)/2", samples, dev, opts.tol));
    report.push(CheckResult::new("nabla_e0 eta = 0", samples, res.fiber_derivative, TOL_FD));
    report.push(CheckResult::new("horizontal gradients of eta^sigma = 0", samples, res.gradient, TOL_FD));
    report.push(CheckResult::new("eta = cos t e1 + sin t e2", samples, res.formula, CLOSURE_TOL));
    report.push(CheckResult::new("fiber frame table", samples, fiber.table_residual(), TOL_FD));
    report.push(CheckResult::new("fiber frame closure", samples, fiber.closure_residual(), CLOSURE_TOL));

    let q0 = sphere.point(fiber.point(0).clone())?;
    let g = duschek_integrand_general(&eta, &q0)?;
    report
        .datum("expected_ratio", expected)
        .datum("witness_ratio", ratios[0].0)
        .datum("max_ratio", worst)
        .datum("general_integrand_ratio", g.value / g.eta_sq)
        .datum("p0", fiber.p0().iter().copied().collect::<Vec<f64>>())
        .datum(
            "witness",
            format!("eta = cos t e_{} + sin t e_{} along the fiber through p0", 2 * k - 1, 2 * k),
        );
    report.note(format!(
        "general integrand from the Sasaki connection gives ratio {:.6} for the same field",
        g.value / g.eta_sq
    ));

    // δ²Vol: at each sample point, the witness built on the fiber through it
    let quad = Quadrature::new(opts.mc_samples, rng::derive_seed(opts.seed, 4));
    let mc = integrate_over_sphere(&sphere, &quad, |p, rng| {
        let w = crate::manifold::gaussian_vector(d, rng);
        let w = horizontal_project(p.coords(), &w);
        let v = horizontal_constant_field(&xi, w.normalize())?;
        Ok(reduced_integrand(&v, p, None)?.value)
    })?;
    report
        .datum("second_variation", mc.estimate)
        .datum("second_variation_std_error", mc.std_error)
        .datum("sphere_volume", mc.volume);

    let ok = report.passed();
    report.conclusion = Some(
        match (ok, worst < 0.0) {
            (true, true) => "unstable",
            (true, false) => "no destabilizing witness",
            _ => "inconclusive",
        }
        .into(),
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(seed: u64) -> StabilityOptions {
        StabilityOptions { fields: 4, points: 10, fiber_steps: 64, mc_samples: 200, tol: RATIO_TOL, seed }
    }

    #[test]
    fn verdicts() {
        let r = stability_verdict(3, StabilityMode::StableS3, &quick(1)).unwrap();
        assert!(r.passed(), "{}", r.to_json());
        assert_eq!(r.conclusion.as_deref(), Some("stable"));
        let r = stability_verdict(5, StabilityMode::Instability, &quick(2)).unwrap();
        assert!(r.passed(), "{}", r.to_json());
        assert_eq!(r.conclusion.as_deref(), Some("unstable"));
        assert!((r.data["witness_ratio"].as_f64().unwrap() + 1.5).abs() < 1e-3);
        let r = stability_verdict(3, StabilityMode::Instability, &quick(3)).unwrap();
        assert_eq!(r.conclusion.as_deref(), Some("no destabilizing witness"));
    }

    #[test]
    fn bad_dimensions() {
        assert!(stability_verdict(4, StabilityMode::Instability, &quick(1)).is_err());
        assert!(stability_verdict(5, StabilityMode::StableS3, &quick(1)).is_err());
    }
}
