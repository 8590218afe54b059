use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::fields::{hopf_field, FieldDescriptor};
use crate::manifold::{Sphere, VectorField};
use crate::variation::fiber::FiberFrame;
use crate::variation::field::{HorizontalConstant, VariationField};

/// `η = cos t·e_{2k−1} + sin t·e_{2k}` along the fiber, extended off it as
/// the horizontal projection of the constant `e_{2k−1}(0)`.
pub fn destabilizing_field(fiber: &FiberFrame, k: usize) -> Result<VariationField> {
    if k == 0 || k > fiber.pairs() {
        return Err(GeometryError::Precondition(format!("pair index must lie in 1..={}", fiber.pairs())));
    }
    let d = fiber.p0().len();
    let xi = hopf_field(d / 2 - 1, 1.0)?;
    let v = fiber.initial(2 * k - 1).clone();
    let mut params = BTreeMap::new();
    params.insert("pair".into(), k as f64);
    let descriptor = FieldDescriptor { name: "fiber-rotation".into(), params };
    Ok(VariationField::new(xi, Arc::new(HorizontalConstant::new(v)), descriptor))
}

/// How well the field realizes its description along the fiber.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessResiduals {
    /// `max |η(γ(t)) − (cos t·e_{2k−1} + sin t·e_{2k})|`
    pub formula: f64,
    /// `max |∇_{e₀}η|`
    pub fiber_derivative: f64,
    /// `max |e_α(η^σ)|` over horizontal `α, σ`
    pub gradient: f64,
    /// `max ||η| − 1|`
    pub norm: f64,
}

pub fn witness_residuals(fiber: &FiberFrame, k: usize, eta: &VariationField) -> Result<WitnessResiduals> {
    let s = Sphere::unit(fiber.p0().len())?;
    let h = 2 * fiber.pairs();
    let ext: Vec<_> = (1..=h).map(|a| fiber.extension(a)).collect();
    let mut out = WitnessResiduals { formula: 0.0, fiber_derivative: 0.0, gradient: 0.0, norm: 0.0 };
    for j in 0..fiber.len() {
        let t = fiber.param(j);
        let x = fiber.point(j);
        let e = fiber.frame(j);
        let val = eta.value(x)?;
        let want = &e[2 * k - 1] * t.cos() + &e[2 * k] * t.sin();
        out.formula = out.formula.max((&val - want).amax());
        out.norm = out.norm.max((val.norm() - 1.0).abs());
        let d0 = s.covariant_derivative_vec(eta, x, &e[0])?;
        out.fiber_derivative = out.fiber_derivative.max(d0.amax());
        for a in 1..=h {
            let da = s.covariant_derivative_vec(eta, x, &e[a])?;
            for (sig, ex) in ext.iter().enumerate() {
                // e_α⟨η, E_σ⟩ = ⟨∇_{e_α}η, E_σ⟩ + ⟨η, ∇_{e_α}E_σ⟩
                let de = s.covariant_derivative_vec(ex, x, &e[a])?;
                let g = da.dot(&e[sig + 1]) + val.dot(&de);
                out.gradient = out.gradient.max(g.abs());
            }
        }
    }
    Ok(out)
}
