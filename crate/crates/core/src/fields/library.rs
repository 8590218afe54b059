//! Concrete unit vector fields: the Hopf field, meridian fields, and a
//! wrapper that hides a field's Jacobian so callers can exercise the
//! finite-difference path.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{GeometryError, Result};
use crate::manifold::{Matrix, Sphere, SpherePoint, TangentVector, Vector, VectorField};

/// Polar caps of this angular radius are excluded for meridian fields.
pub const POLAR_CAP: f64 = 1e-4;

/// Name and parameters of a field, for reports.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FieldDescriptor {
    pub name: String,
    pub params: BTreeMap<String, f64>,
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        if !self.params.is_empty() {
            let parts: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            write!(f, "({})", parts.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Clone)]
enum Kind {
    Hopf,
    Meridian { axis: Vector },
    Custom(Arc<dyn VectorField + Send + Sync>),
}

/// A unit tangent vector field on a sphere.
#[derive(Clone)]
pub struct UnitVectorField {
    sphere: Sphere,
    kind: Kind,
    analytic: bool,
    descriptor: FieldDescriptor,
}

impl fmt::Debug for UnitVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UnitVectorField")
            .field("sphere", &self.sphere)
            .field("descriptor", &self.descriptor)
            .field("analytic", &self.analytic)
            .finish()
    }
}

/// Standard complex structure `(x1, y1, x2, y2, ...) -> (-y1, x1, -y2, x2, ...)`.
pub fn complex_structure(v: &Vector) -> Vector {
    let mut out = Vector::zeros(v.len());
    for k in (0..v.len()).step_by(2) {
        out[k] = -v[k + 1];
        out[k + 1] = v[k];
    }
    out
}

/// Matrix of [`complex_structure`].
pub fn complex_structure_matrix(dim: usize) -> Matrix {
    let mut j = Matrix::zeros(dim, dim);
    for k in (0..dim).step_by(2) {
        j[(k, k + 1)] = -1.0;
        j[(k + 1, k)] = 1.0;
    }
    j
}

/// Hopf field `ξ(p) = J p / r` on `S^{2m+1}(r)`.
pub fn hopf_field(m: usize, radius: f64) -> Result<UnitVectorField> {
    if m < 1 {
        return Err(GeometryError::InvalidSphere("Hopf field needs m >= 1".into()));
    }
    let sphere = Sphere::new(2 * m + 2, radius)?;
    let mut params = BTreeMap::new();
    params.insert("m".into(), m as f64);
    params.insert("radius".into(), radius);
    Ok(UnitVectorField {
        sphere,
        kind: Kind::Hopf,
        analytic: true,
        descriptor: FieldDescriptor { name: "hopf".into(), params },
    })
}

/// Field of unit tangents to the meridians through `±r·axis`, pointing
/// towards `+r·axis`.
pub fn meridian_field(sphere: Sphere, axis: Vector) -> Result<UnitVectorField> {
    if axis.len() != sphere.ambient_dim() {
        return Err(GeometryError::DimensionMismatch {
            expected: sphere.ambient_dim(),
            got: axis.len(),
        });
    }
    let n = axis.norm();
    if (n - 1.0).abs() > 1e-9 {
        return Err(GeometryError::NotUnit(n));
    }
    let mut params = BTreeMap::new();
    params.insert("radius".into(), sphere.radius());
    Ok(UnitVectorField {
        sphere,
        kind: Kind::Meridian { axis },
        analytic: true,
        descriptor: FieldDescriptor { name: "meridian".into(), params },
    })
}

impl UnitVectorField {
    /// Wrap an arbitrary field. Unit length is the caller's responsibility
    /// and is checked by the test suite, not here.
    pub fn custom(
        sphere: Sphere,
        name: &str,
        field: Arc<dyn VectorField + Send + Sync>,
    ) -> UnitVectorField {
        UnitVectorField {
            sphere,
            kind: Kind::Custom(field),
            analytic: true,
            descriptor: FieldDescriptor { name: name.into(), params: BTreeMap::new() },
        }
    }

    /// Same field with its Jacobian hidden: all derivatives go through finite
    /// differences.
    pub fn numeric(&self) -> UnitVectorField {
        let mut out = self.clone();
        out.analytic = false;
        out.descriptor.name = format!("{}-fd", self.descriptor.name);
        out
    }

    pub fn sphere(&self) -> &Sphere {
        &self.sphere
    }

    pub fn descriptor(&self) -> &FieldDescriptor {
        &self.descriptor
    }

    pub fn is_hopf(&self) -> bool {
        matches!(self.kind, Kind::Hopf)
    }

    /// False once [`UnitVectorField::numeric`] has hidden the Jacobian.
    pub fn uses_jacobian(&self) -> bool {
        self.analytic
    }

    /// Axis of a meridian field.
    pub fn axis(&self) -> Option<&Vector> {
        match &self.kind {
            Kind::Meridian { axis } => Some(axis),
            _ => None,
        }
    }

    /// Polar angle of `p` measured from `+r·axis`, for meridian fields.
    pub fn polar_angle(&self, p: &SpherePoint) -> Option<f64> {
        self.axis().map(|a| {
            let c = (a.dot(p.coords()) / self.sphere.radius()).clamp(-1.0, 1.0);
            c.acos()
        })
    }

    /// `ξ(p)` as a tangent vector.
    pub fn at(&self, p: &SpherePoint) -> Result<TangentVector> {
        let v = self.value(p.coords())?;
        self.sphere.tangent(p, v)
    }

    fn meridian_parts(&self, axis: &Vector, x: &Vector) -> Result<(Vector, f64)> {
        let x2 = x.norm_squared();
        let u = axis - x * (axis.dot(x) / x2);
        let un = u.norm();
        // |u| = sin of the angle between x and the axis
        if un < POLAR_CAP.sin() {
            return Err(GeometryError::SingularLocus(format!(
                "point within {POLAR_CAP:e} rad of a pole of the meridian field"
            )));
        }
        Ok((u, un))
    }
}

impl VectorField for UnitVectorField {
    fn value(&self, x: &Vector) -> Result<Vector> {
        match &self.kind {
            Kind::Hopf => Ok(complex_structure(x) / self.sphere.radius()),
            Kind::Meridian { axis } => {
                let (u, un) = self.meridian_parts(axis, x)?;
                Ok(u / un)
            }
            Kind::Custom(f) => f.value(x),
        }
    }

    fn jacobian(&self, x: &Vector) -> Option<Result<Matrix>> {
        if !self.analytic {
            return None;
        }
        match &self.kind {
            Kind::Hopf => {
                Some(Ok(complex_structure_matrix(x.len()) / self.sphere.radius()))
            }
            Kind::Meridian { axis } => Some(self.meridian_parts(axis, x).map(|(u, un)| {
                let d = x.len();
                let x2 = x.norm_squared();
                let ax = axis.dot(x);
                // Du = -x a^T/|x|^2 - (<a,x>/|x|^2) I + 2<a,x> x x^T/|x|^4
                let du = -(x * axis.transpose()) / x2 - Matrix::identity(d, d) * (ax / x2)
                    + (x * x.transpose()) * (2.0 * ax / (x2 * x2));
                let xi = &u / un;
                (Matrix::identity(d, d) - &xi * xi.transpose()) * du / un
            })),
            Kind::Custom(f) => f.jacobian(x),
        }
    }
}
