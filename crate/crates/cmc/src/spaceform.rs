//! Model geometry of the three simply connected space forms.
//!
//! Points live on explicit embeddings: flat 3-space for c = 0, the round
//! sphere of radius 1/sqrt(c) in 4-space for c > 0, and the upper sheet of
//! the hyperboloid <x,x> = -1/|c| in Minkowski 4-space for c < 0. With these
//! models every geodesic, distance and distance gradient is closed-form, so
//! there are no chart singularities to work around.

use serde::{Deserialize, Serialize};

use crate::error::{CmcError, Result};

/// Tolerance for the model constraint at construction time.
pub const MODEL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Model {
    Euclidean,
    Sphere,
    Hyperbolic,
}

/// A simply connected 3-manifold of constant sectional curvature `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceForm {
    c: f64,
    k: f64,
    model: Model,
}

impl SpaceForm {
    pub fn new(c: f64) -> Self {
        let model = if c > 0.0 {
            Model::Sphere
        } else if c < 0.0 {
            Model::Hyperbolic
        } else {
            Model::Euclidean
        };
        SpaceForm {
            c,
            k: c.abs().sqrt(),
            model,
        }
    }

    pub fn curvature(&self) -> f64 {
        self.c
    }

    /// sqrt(|c|); zero in the flat case.
    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn model(&self) -> Model {
        self.model
    }

    /// Generalized sine: radius of a geodesic circle of geodesic radius `x`.
    pub fn sn(&self, x: f64) -> f64 {
        match self.model {
            Model::Euclidean => x,
            Model::Sphere => (self.k * x).sin() / self.k,
            Model::Hyperbolic => (self.k * x).sinh() / self.k,
        }
    }

    /// Generalized cosine, the derivative of `sn`.
    pub fn cs(&self, x: f64) -> f64 {
        match self.model {
            Model::Euclidean => 1.0,
            Model::Sphere => (self.k * x).cos(),
            Model::Hyperbolic => (self.k * x).cosh(),
        }
    }

    /// Generalized tangent sn/cs.
    pub fn tn(&self, x: f64) -> f64 {
        self.sn(x) / self.cs(x)
    }

    /// Generalized cotangent cs/sn; principal curvature of a geodesic sphere
    /// of radius `x` with respect to the inward normal.
    pub fn ct(&self, x: f64) -> f64 {
        self.cs(x) / self.sn(x)
    }

    /// Inverse of `ct` on the range where a geodesic circle of that parallel
    /// curvature exists: 1/lam (flat, lam > 0), atan(k/lam)/k (sphere,
    /// lam > 0), atanh(k/lam)/k (hyperbolic, lam > k).
    pub fn inv_ct(&self, lam: f64) -> Option<f64> {
        match self.model {
            Model::Euclidean => (lam > 0.0).then(|| 1.0 / lam),
            Model::Sphere => (lam > 0.0).then(|| (self.k / lam).atan() / self.k),
            Model::Hyperbolic => (lam > self.k).then(|| (self.k / lam).atanh() / self.k),
        }
    }

    /// Upper end of the validity interval for the radial distance r.
    pub fn max_r(&self) -> f64 {
        match self.model {
            Model::Sphere => std::f64::consts::FRAC_PI_2 / self.k,
            _ => f64::INFINITY,
        }
    }

    /// The comparison function and its first two derivatives:
    /// (r^2/2, r, 1) flat, (cosh kr, k sinh kr, k^2 cosh kr) hyperbolic,
    /// (cos kr, -k sin kr, -k^2 cos kr) spherical.
    pub fn f_eval(&self, r: f64) -> Result<(f64, f64, f64)> {
        if r < 0.0 {
            return Err(CmcError::OutOfDomain(format!("negative radius r = {r}")));
        }
        match self.model {
            Model::Euclidean => Ok((0.5 * r * r, r, 1.0)),
            Model::Hyperbolic => {
                let k = self.k;
                Ok(((k * r).cosh(), k * (k * r).sinh(), k * k * (k * r).cosh()))
            }
            Model::Sphere => {
                if r >= self.max_r() {
                    return Err(CmcError::OutOfDomain(format!(
                        "r = {r} >= pi/(2 sqrt(c)) = {}",
                        self.max_r()
                    )));
                }
                let k = self.k;
                Ok(((k * r).cos(), -k * (k * r).sin(), -k * k * (k * r).cos()))
            }
        }
    }

    /// Ambient bilinear form of the embedding: Euclidean in 3 or 4
    /// dimensions, Minkowski with signature (-,+,+,+) for c < 0.
    pub fn dot(&self, u: &[f64; 4], v: &[f64; 4]) -> f64 {
        match self.model {
            Model::Euclidean => u[0] * v[0] + u[1] * v[1] + u[2] * v[2],
            Model::Sphere => u[0] * v[0] + u[1] * v[1] + u[2] * v[2] + u[3] * v[3],
            Model::Hyperbolic => -u[0] * v[0] + u[1] * v[1] + u[2] * v[2] + u[3] * v[3],
        }
    }

    /// Residual of the defining model constraint at `x`; zero on the model.
    pub fn model_residual(&self, x: &[f64; 4]) -> f64 {
        match self.model {
            Model::Euclidean => x[3],
            Model::Sphere => self.dot(x, x) - 1.0 / self.c,
            Model::Hyperbolic => self.dot(x, x) + 1.0 / (self.k * self.k),
        }
    }

    /// Rescale `x` back onto the model surface (no-op in the flat case).
    pub fn renormalize(&self, x: [f64; 4]) -> [f64; 4] {
        match self.model {
            Model::Euclidean => [x[0], x[1], x[2], 0.0],
            Model::Sphere => {
                let n = self.dot(&x, &x).sqrt() * self.k;
                [x[0] / n, x[1] / n, x[2] / n, x[3] / n]
            }
            Model::Hyperbolic => {
                let n = (-self.dot(&x, &x)).sqrt() * self.k;
                [x[0] / n, x[1] / n, x[2] / n, x[3] / n]
            }
        }
    }

    /// Project `w` onto the tangent space of the model at `base`.
    pub fn project_tangent(&self, base: &[f64; 4], w: &[f64; 4]) -> [f64; 4] {
        match self.model {
            Model::Euclidean => [w[0], w[1], w[2], 0.0],
            _ => {
                // <base,base> = 1/c in both curved models, so the normal
                // component of w is c <w,base> base.
                let t = self.c * self.dot(w, base);
                [
                    w[0] - t * base[0],
                    w[1] - t * base[1],
                    w[2] - t * base[2],
                    w[3] - t * base[3],
                ]
            }
        }
    }

    /// Canonical reference point: the origin, or the pole (1/k, 0, 0, 0).
    pub fn base_point(&self) -> AmbientPoint {
        match self.model {
            Model::Euclidean => AmbientPoint {
                coords: [0.0, 0.0, 0.0, 0.0],
            },
            _ => AmbientPoint {
                coords: [1.0 / self.k, 0.0, 0.0, 0.0],
            },
        }
    }

    /// Geodesic distance between two points of the model.
    ///
    /// Chordal formulas keep full precision near r = 0 in the curved models.
    pub fn distance(&self, p: &AmbientPoint, q: &AmbientPoint) -> Result<f64> {
        let d = sub(&q.coords, &p.coords);
        match self.model {
            Model::Euclidean => Ok(self.dot(&d, &d).sqrt()),
            Model::Sphere => {
                if self.c * self.dot(&p.coords, &q.coords) <= -1.0 + MODEL_TOL {
                    return Err(CmcError::AntipodalPoints);
                }
                let chord = self.dot(&d, &d).sqrt();
                let arg = (self.k * chord / 2.0).clamp(-1.0, 1.0);
                Ok(2.0 / self.k * arg.asin())
            }
            Model::Hyperbolic => {
                let chord2 = self.dot(&d, &d).max(0.0);
                Ok(2.0 / self.k * (self.k * chord2.sqrt() / 2.0).asinh())
            }
        }
    }

    /// Unit tangent at `x` along the geodesic from `p` through `x`, i.e. the
    /// gradient of the distance function r = dist(p, .) at `x`.
    pub fn grad_r(&self, p: &AmbientPoint, x: &AmbientPoint) -> Result<TangentVec> {
        match self.model {
            Model::Euclidean => {
                let d = sub(&x.coords, &p.coords);
                let n = self.dot(&d, &d).sqrt();
                if n < MODEL_TOL {
                    return Err(CmcError::DegenerateBase);
                }
                Ok(TangentVec {
                    base: x.clone(),
                    dir: scale(&d, 1.0 / n),
                })
            }
            _ => {
                let cos_like = self.c * self.dot(&p.coords, &x.coords);
                if self.model == Model::Sphere && cos_like <= -1.0 + MODEL_TOL {
                    return Err(CmcError::AntipodalPoints);
                }
                if (cos_like - 1.0).abs() < MODEL_TOL * MODEL_TOL {
                    return Err(CmcError::DegenerateBase);
                }
                // minus the tangential projection of p points away from p
                let w = neg(&self.project_tangent(&x.coords, &p.coords));
                let n2 = self.dot(&w, &w);
                if n2 <= 0.0 || n2.sqrt() < MODEL_TOL / self.k {
                    return Err(CmcError::DegenerateBase);
                }
                Ok(TangentVec {
                    base: x.clone(),
                    dir: scale(&w, 1.0 / n2.sqrt()),
                })
            }
        }
    }

    /// Point reached after geodesic time `t` from `v.base` with unit initial
    /// velocity `v.dir`. One formula covers all models:
    /// cs(t) base + sn(t) dir.
    pub fn exp_map(&self, v: &TangentVec, t: f64) -> AmbientPoint {
        // the bilinear form itself loses ~eps * |x|^2 digits to cancellation
        // far from the pole, so the unit check scales with the coordinates
        debug_assert!(
            (self.dot(&v.dir, &v.dir) - 1.0).abs()
                < 1e-10 * (1.0 + v.dir.iter().map(|x| x * x).sum::<f64>())
        );
        let a = self.cs(t);
        let b = self.sn(t);
        let x = [
            a * v.base.coords[0] + b * v.dir[0],
            a * v.base.coords[1] + b * v.dir[1],
            a * v.base.coords[2] + b * v.dir[2],
            a * v.base.coords[3] + b * v.dir[3],
        ];
        AmbientPoint {
            coords: self.renormalize(x),
        }
    }

    /// Build a tangent vector at `base`, projecting and normalizing `dir`.
    pub fn unit_tangent(&self, base: &AmbientPoint, dir: &[f64; 4]) -> Result<TangentVec> {
        let w = self.project_tangent(&base.coords, dir);
        let n2 = self.dot(&w, &w);
        if n2 <= MODEL_TOL {
            return Err(CmcError::InvalidGeometry(
                "direction has no tangential component".into(),
            ));
        }
        Ok(TangentVec {
            base: base.clone(),
            dir: scale(&w, 1.0 / n2.sqrt()),
        })
    }
}

/// A point on the embedding model of a space form.
///
/// Flat model: (x, y, z, 0). Sphere: a 4-vector of norm 1/sqrt(c).
/// Hyperboloid: a future-pointing 4-vector with <x,x> = -1/|c|, time first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmbientPoint {
    coords: [f64; 4],
}

impl AmbientPoint {
    /// Validating constructor; enforces the model constraint to 1e-12.
    pub fn new(sf: &SpaceForm, coords: [f64; 4]) -> Result<Self> {
        let p = AmbientPoint { coords };
        let res = sf.model_residual(&coords).abs();
        if res > MODEL_TOL * (1.0 + coords.iter().map(|x| x * x).sum::<f64>()) {
            return Err(CmcError::InvalidGeometry(format!(
                "point violates the model constraint by {res}"
            )));
        }
        if sf.model() == Model::Hyperbolic && coords[0] <= 0.0 {
            return Err(CmcError::InvalidGeometry(
                "hyperboloid point must have positive time coordinate".into(),
            ));
        }
        Ok(p)
    }

    pub fn euclidean(x: f64, y: f64, z: f64) -> Self {
        AmbientPoint {
            coords: [x, y, z, 0.0],
        }
    }

    /// Unchecked constructor for internally generated points.
    pub(crate) fn from_raw(coords: [f64; 4]) -> Self {
        AmbientPoint { coords }
    }

    pub fn coords(&self) -> &[f64; 4] {
        &self.coords
    }
}

/// A tangent vector attached to a point of the model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentVec {
    pub base: AmbientPoint,
    pub dir: [f64; 4],
}

impl TangentVec {
    /// Validating constructor: in the curved models `dir` must be orthogonal
    /// to the base point under the ambient bilinear form.
    pub fn new(sf: &SpaceForm, base: AmbientPoint, dir: [f64; 4]) -> Result<Self> {
        if sf.model() != Model::Euclidean {
            let ortho = sf.dot(&dir, base.coords()).abs();
            if ortho > MODEL_TOL * (1.0 + dir.iter().map(|x| x * x).sum::<f64>()) {
                return Err(CmcError::InvalidGeometry(format!(
                    "direction is not tangent to the model (inner product {ortho})"
                )));
            }
        }
        Ok(TangentVec { base, dir })
    }
}

pub(crate) fn sub(a: &[f64; 4], b: &[f64; 4]) -> [f64; 4] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

pub(crate) fn scale(a: &[f64; 4], t: f64) -> [f64; 4] {
    [a[0] * t, a[1] * t, a[2] * t, a[3] * t]
}

pub(crate) fn neg(a: &[f64; 4]) -> [f64; 4] {
    [-a[0], -a[1], -a[2], -a[3]]
}
