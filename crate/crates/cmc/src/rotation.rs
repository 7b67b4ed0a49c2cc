//! Rotation surfaces in space forms: meridian profiles, principal
//! curvatures, curvature invariants, surface sampling and meshing.
//!
//! A profile is a unit-speed curve (rho(s), z(s)) in a fixed totally
//! geodesic 2-plane through the rotation axis, with turning angle phi(s):
//!     rho' = cos(phi),  z' = sin(phi) / cs_c(rho),
//!     phi' = mu(s) + c tn_c(rho) sin(phi),
//! where rho is the distance to the axis and z the arclength parameter of
//! the axis. The principal curvature along parallels is then
//! lambda = ct_c(rho) sin(phi), which the integrator preserves up to its
//! own order whenever lambda + mu = 2H is the constant mean curvature
//! contract of the input data. The unit normal convention is
//!     nu = -sin(phi) e_rho + cos(phi) e_z,
//! which points toward the axis at a symmetric start circle (phi = pi/2)
//! and makes a = sgn(lambda - H) = +1 the catenoid-like branch.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{CmcError, Result};
use crate::spaceform::{AmbientPoint, Model, SpaceForm, TangentVec};

/// Curvature data source for a profile: s -> (lambda(s), mu(s)).
pub type CurvatureFn = Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>;

/// Ambient position of the chart point (rho, z, theta).
pub fn chart_position(sf: &SpaceForm, rho: f64, z: f64, theta: f64) -> [f64; 4] {
    let (st, ct) = theta.sin_cos();
    match sf.model() {
        Model::Euclidean => [rho * ct, rho * st, z, 0.0],
        Model::Sphere => {
            let k = sf.k();
            let (srho, crho) = (k * rho).sin_cos();
            let (sz, cz) = (k * z).sin_cos();
            [crho * cz / k, srho * ct / k, srho * st / k, crho * sz / k]
        }
        Model::Hyperbolic => {
            let k = sf.k();
            let (srho, crho) = ((k * rho).sinh(), (k * rho).cosh());
            let (sz, cz) = ((k * z).sinh(), (k * z).cosh());
            [crho * cz / k, srho * ct / k, srho * st / k, crho * sz / k]
        }
    }
}

/// Orthonormal chart frame (e_rho, e_z, e_theta) at (rho, z, theta).
pub fn chart_frame(sf: &SpaceForm, rho: f64, z: f64, theta: f64) -> ([f64; 4], [f64; 4], [f64; 4]) {
    let (st, ct) = theta.sin_cos();
    match sf.model() {
        Model::Euclidean => (
            [ct, st, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [-st, ct, 0.0, 0.0],
        ),
        Model::Sphere => {
            let k = sf.k();
            let (srho, crho) = (k * rho).sin_cos();
            let (sz, cz) = (k * z).sin_cos();
            (
                [-srho * cz, crho * ct, crho * st, -srho * sz],
                [-sz, 0.0, 0.0, cz],
                [0.0, -st, ct, 0.0],
            )
        }
        Model::Hyperbolic => {
            let k = sf.k();
            let (srho, crho) = ((k * rho).sinh(), (k * rho).cosh());
            let (sz, cz) = ((k * z).sinh(), (k * z).cosh());
            (
                [srho * cz, crho * ct, crho * st, srho * sz],
                [sz, 0.0, 0.0, cz],
                [0.0, -st, ct, 0.0],
            )
        }
    }
}

/// One profile state (rho, z, phi).
pub type ProfileState = [f64; 3];

fn profile_rhs(sf: &SpaceForm, mu: f64, y: &ProfileState) -> ProfileState {
    let (sphi, cphi) = y[2].sin_cos();
    [
        cphi,
        sphi / sf.cs(y[0]),
        mu + sf.curvature() * sf.tn(y[0]) * sphi,
    ]
}

fn rk4_profile(sf: &SpaceForm, curv: &CurvatureFn, s: f64, y: &ProfileState, h: f64) -> ProfileState {
    let mu = |s: f64| curv(s).1;
    let k1 = profile_rhs(sf, mu(s), y);
    let y2 = [
        y[0] + 0.5 * h * k1[0],
        y[1] + 0.5 * h * k1[1],
        y[2] + 0.5 * h * k1[2],
    ];
    let k2 = profile_rhs(sf, mu(s + 0.5 * h), &y2);
    let y3 = [
        y[0] + 0.5 * h * k2[0],
        y[1] + 0.5 * h * k2[1],
        y[2] + 0.5 * h * k2[2],
    ];
    let k3 = profile_rhs(sf, mu(s + 0.5 * h), &y3);
    let y4 = [y[0] + h * k3[0], y[1] + h * k3[1], y[2] + h * k3[2]];
    let k4 = profile_rhs(sf, mu(s + h), &y4);
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        y[2] + h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
    ]
}

/// A densely integrated profile over [0, s_end], evaluable anywhere in the
/// range (and on [-s_end, 0] by reflection through the plane z = 0 when
/// `mirrored` is set). Off-grid evaluation takes a single integrator step
/// from the nearest stored state, so it is smooth and keeps the integrator
/// order between knots.
#[derive(Clone)]
pub struct DenseProfile {
    pub sf: SpaceForm,
    /// Mean curvature of the surface the profile generates.
    pub h: f64,
    pub ds: f64,
    pub mirrored: bool,
    states: Vec<ProfileState>,
    curv: CurvatureFn,
}

impl std::fmt::Debug for DenseProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DenseProfile")
            .field("sf", &self.sf)
            .field("h", &self.h)
            .field("ds", &self.ds)
            .field("mirrored", &self.mirrored)
            .field("n_states", &self.states.len())
            .finish()
    }
}

impl DenseProfile {
    /// Integrate the meridian frame system from `start` with curvature data
    /// `curv` until s_max (inclusive up to one step of overshoot).
    pub fn integrate(
        sf: &SpaceForm,
        h: f64,
        start: ProfileState,
        curv: CurvatureFn,
        s_max: f64,
        ds: f64,
        mirrored: bool,
    ) -> Result<Self> {
        if ds <= 0.0 || ds.is_nan() {
            return Err(CmcError::OutOfDomain(format!(
                "ds must be positive, got {ds}"
            )));
        }
        let n_steps = (s_max / ds).ceil().max(1.0) as usize;
        let mut states = Vec::with_capacity(n_steps + 1);
        let mut y = start;
        states.push(y);
        let hemisphere = std::f64::consts::FRAC_PI_2;
        for i in 0..n_steps {
            let s = i as f64 * ds;
            let y_next = rk4_profile(sf, &curv, s, &y, ds);
            if y_next[0] <= 1e-9 && y_next[0] < y[0] {
                return Err(CmcError::AxisCollision(s + ds));
            }
            if sf.model() == Model::Sphere && sf.k() * y_next[0] >= hemisphere {
                return Err(CmcError::OutOfDomain(format!(
                    "profile left the hemisphere of validity at s = {}",
                    s + ds
                )));
            }
            y = y_next;
            states.push(y);
        }
        Ok(DenseProfile {
            sf: *sf,
            h,
            ds,
            mirrored,
            states,
            curv,
        })
    }

    pub fn s_end(&self) -> f64 {
        (self.states.len() - 1) as f64 * self.ds
    }

    pub fn s_min(&self) -> f64 {
        if self.mirrored {
            -self.s_end()
        } else {
            0.0
        }
    }

    /// Profile state (rho, z, phi) at arclength s.
    pub fn eval(&self, s: f64) -> ProfileState {
        if s < 0.0 && self.mirrored {
            let y = self.eval_forward(-s);
            return [y[0], -y[1], std::f64::consts::PI - y[2]];
        }
        self.eval_forward(s)
    }

    fn eval_forward(&self, s: f64) -> ProfileState {
        let n = self.states.len() - 1;
        let mut i = (s / self.ds).floor() as usize;
        if i > n {
            i = n;
        }
        let h = s - i as f64 * self.ds;
        if h.abs() < 1e-15 {
            return self.states[i];
        }
        rk4_profile(&self.sf, &self.curv, i as f64 * self.ds, &self.states[i], h)
    }

    /// (lambda, mu) of the generated surface at arclength s.
    pub fn curvatures(&self, s: f64) -> (f64, f64) {
        (self.curv)(s.abs())
    }

    /// Parallel-circle radius function w(s) = sn_c(rho(s)).
    pub fn parallel_radius(&self, s: f64) -> f64 {
        self.sf.sn(self.eval(s)[0])
    }

    /// d/ds of the parallel-circle radius, cs_c(rho) cos(phi).
    pub fn parallel_radius_prime(&self, s: f64) -> f64 {
        let y = self.eval(s);
        self.sf.cs(y[0]) * y[2].cos()
    }

    /// Ambient surface point at (s, theta).
    pub fn position(&self, s: f64, theta: f64) -> AmbientPoint {
        let y = self.eval(s);
        AmbientPoint::from_raw(chart_position(&self.sf, y[0], y[1], theta))
    }

    /// Unit normal at (s, theta) under the profile normal convention.
    pub fn normal(&self, s: f64, theta: f64) -> TangentVec {
        let y = self.eval(s);
        let (e_rho, e_z, _) = chart_frame(&self.sf, y[0], y[1], theta);
        let (sphi, cphi) = y[2].sin_cos();
        let dir = [
            -sphi * e_rho[0] + cphi * e_z[0],
            -sphi * e_rho[1] + cphi * e_z[1],
            -sphi * e_rho[2] + cphi * e_z[2],
            -sphi * e_rho[3] + cphi * e_z[3],
        ];
        TangentVec {
            base: self.position(s, theta),
            dir,
        }
    }

    /// Unit meridian tangent at (s, theta).
    pub fn meridian_tangent(&self, s: f64, theta: f64) -> TangentVec {
        let y = self.eval(s);
        let (e_rho, e_z, _) = chart_frame(&self.sf, y[0], y[1], theta);
        let (sphi, cphi) = y[2].sin_cos();
        let dir = [
            cphi * e_rho[0] + sphi * e_z[0],
            cphi * e_rho[1] + sphi * e_z[1],
            cphi * e_rho[2] + sphi * e_z[2],
            cphi * e_rho[3] + sphi * e_z[3],
        ];
        TangentVec {
            base: self.position(s, theta),
            dir,
        }
    }

    /// Residual of the parallel-curvature relation lambda = ct_c(rho) sin(phi)
    /// at s; a consistency diagnostic for the integrated frame.
    pub fn lambda_residual(&self, s: f64) -> f64 {
        let y = self.eval(s);
        let (lam, _) = self.curvatures(s);
        self.sf.ct(y[0]) * y[2].sin() - lam
    }

    /// Sampled plain-data profile over [s_lo, s_hi] with n points.
    pub fn to_plain(&self, s_lo: f64, s_hi: f64, n: usize) -> MeridianProfile {
        let n = n.max(2);
        let mut mp = MeridianProfile {
            c: self.sf.curvature(),
            h: self.h,
            s_grid: Vec::with_capacity(n),
            rho: Vec::with_capacity(n),
            z: Vec::with_capacity(n),
            phi: Vec::with_capacity(n),
            lambda: Vec::with_capacity(n),
            mu: Vec::with_capacity(n),
        };
        for i in 0..n {
            let s = s_lo + (s_hi - s_lo) * i as f64 / (n - 1) as f64;
            let y = self.eval(s);
            let (lam, mu) = self.curvatures(s);
            mp.s_grid.push(s);
            mp.rho.push(y[0]);
            mp.z.push(y[1]);
            mp.phi.push(y[2]);
            mp.lambda.push(lam);
            mp.mu.push(mu);
        }
        mp
    }
}

/// Arclength-sampled profile curve with frame and principal curvatures.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeridianProfile {
    pub c: f64,
    #[serde(rename = "H")]
    pub h: f64,
    pub s_grid: Vec<f64>,
    pub rho: Vec<f64>,
    pub z: Vec<f64>,
    pub phi: Vec<f64>,
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
}

/// A surface of revolution: a profile rotated through [0, 2pi) about the
/// canonical axis (the z-axis, and the geodesic through the pole in the
/// curved models).
#[derive(Debug, Clone)]
pub struct RotationSurface {
    pub dense: DenseProfile,
    pub s_lo: f64,
    pub s_hi: f64,
}

impl RotationSurface {
    pub fn new(dense: DenseProfile, s_lo: f64, s_hi: f64) -> Self {
        RotationSurface { dense, s_lo, s_hi }
    }

    pub fn sf(&self) -> &SpaceForm {
        &self.dense.sf
    }
}

/// Principal curvatures from the substitution variable u > 0:
/// lambda = H + a/u along parallels, mu = H - a/u along the meridian.
pub fn principal_from_u(u: f64, a: i8, h: f64) -> Result<(f64, f64)> {
    if u <= 0.0 || u.is_nan() {
        return Err(CmcError::NonPositiveU(u));
    }
    let lam = h + a as f64 / u;
    Ok((lam, 2.0 * h - lam))
}

/// Squared norm of the traceless second fundamental form,
/// (lambda1 - H)^2 + (lambda2 - H)^2 = |A|^2 - 2 H^2.
pub fn phi_norm_sq(lambda1: f64, lambda2: f64, h: f64) -> Result<f64> {
    let mean = 0.5 * (lambda1 + lambda2);
    if (mean - h).abs() > 1e-10 {
        return Err(CmcError::InconsistentMeanCurvature { got: mean, h });
    }
    Ok((lambda1 - h).powi(2) + (lambda2 - h).powi(2))
}

/// Product of the principal curvatures from (H, |Phi|^2):
/// lambda1 lambda2 = H^2 - |Phi|^2 / 2.
pub fn gauss_product(h: f64, phi_sq: f64) -> f64 {
    h * h - 0.5 * phi_sq
}

/// One fully populated surface point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurfaceSample {
    pub i_s: usize,
    pub i_theta: usize,
    pub s: f64,
    pub theta: f64,
    pub pos: [f64; 4],
    pub nu: [f64; 4],
    /// Distance to the designated center point.
    pub r: f64,
    /// f'(r) <nu, grad r>.
    pub grad_nu_f: f64,
    /// Principal curvature along the parallel circle.
    pub lambda1: f64,
    /// Principal curvature along the meridian.
    pub lambda2: f64,
    pub phi_sq: f64,
    #[serde(rename = "K")]
    pub k_gauss: f64,
    #[serde(rename = "H")]
    pub h: f64,
}

/// Sample the surface on an n_s x n_theta grid, populating every field.
///
/// In the spherical model every sample must satisfy r < pi/(2 sqrt(c));
/// the first offending sample is reported as a DomainViolation.
pub fn sample(
    surface: &RotationSurface,
    center: &AmbientPoint,
    n_s: usize,
    n_theta: usize,
) -> Result<Vec<SurfaceSample>> {
    let n_s = n_s.max(2);
    let n_theta = n_theta.max(3);
    let mut out = Vec::with_capacity(n_s * n_theta);
    for i in 0..n_s {
        let s = surface.s_lo + (surface.s_hi - surface.s_lo) * i as f64 / (n_s - 1) as f64;
        for j in 0..n_theta {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n_theta as f64;
            out.push(sample_at(surface, center, s, theta, i, j)?);
        }
    }
    Ok(out)
}

/// Populate a single sample at (s, theta).
pub fn sample_at(
    surface: &RotationSurface,
    center: &AmbientPoint,
    s: f64,
    theta: f64,
    i_s: usize,
    i_theta: usize,
) -> Result<SurfaceSample> {
    let sf = surface.sf();
    let dense = &surface.dense;
    let pos = dense.position(s, theta);
    let nu = dense.normal(s, theta);
    let r = sf.distance(center, &pos)?;
    if sf.model() == Model::Sphere && r >= sf.max_r() {
        return Err(CmcError::DomainViolation { s, theta, r });
    }
    let (_, f1, _) = sf.f_eval(r)?;
    let grad_nu_f = if r < 1e-12 {
        0.0
    } else {
        let grad = sf.grad_r(center, &pos)?;
        f1 * sf.dot(&nu.dir, &grad.dir)
    };
    let (lam, mu) = dense.curvatures(s);
    let h = dense.h;
    let phi_sq = (lam - h).powi(2) + (mu - h).powi(2);
    Ok(SurfaceSample {
        i_s,
        i_theta,
        s,
        theta,
        pos: *pos.coords(),
        nu: nu.dir,
        r,
        grad_nu_f,
        lambda1: lam,
        lambda2: mu,
        phi_sq,
        k_gauss: sf.curvature() + lam * mu,
        h,
    })
}

/// Reconstruct a unit-speed meridian profile from prescribed principal
/// curvature functions, starting on the symmetry circle: phi(0) = pi/2 and
/// axis distance rho0 solving lambda(0) = ct_c(rho0).
pub fn reconstruct_meridian(
    sf: &SpaceForm,
    lambda: impl Fn(f64) -> f64 + Send + Sync + 'static,
    mu: impl Fn(f64) -> f64 + Send + Sync + 'static,
    s_max: f64,
    ds: f64,
) -> Result<DenseProfile> {
    // CMC contract: lambda + mu must be a constant 2H
    let h = 0.5 * (lambda(0.0) + mu(0.0));
    for i in 0..=16 {
        let s = s_max * i as f64 / 16.0;
        let sum = lambda(s) + mu(s);
        if (sum - 2.0 * h).abs() > 1e-8 {
            return Err(CmcError::InconsistentMeanCurvature {
                got: 0.5 * sum,
                h,
            });
        }
    }
    let lam0 = lambda(0.0);
    let rho0 = sf.inv_ct(lam0).ok_or_else(|| {
        CmcError::InvalidGeometry(format!(
            "no axis distance realizes parallel curvature lambda(0) = {lam0} in this model"
        ))
    })?;
    let curv: CurvatureFn = Arc::new(move |s: f64| (lambda(s), mu(s)));
    DenseProfile::integrate(
        sf,
        h,
        [rho0, 0.0, std::f64::consts::FRAC_PI_2],
        curv,
        s_max,
        ds,
        false,
    )
}

/// Triangle mesh of a surface of revolution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TriMesh {
    pub vertices: Vec<[f64; 4]>,
    pub triangles: Vec<[u32; 3]>,
    pub normals: Option<Vec<[f64; 4]>>,
}

impl TriMesh {
    /// Flat 3-space area of a triangle (chordal area in the curved models).
    pub fn triangle_area(&self, t: &[u32; 3]) -> f64 {
        let a = &self.vertices[t[0] as usize];
        let b = &self.vertices[t[1] as usize];
        let c = &self.vertices[t[2] as usize];
        let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2], b[3] - a[3]];
        let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2], c[3] - a[3]];
        let uu: f64 = u.iter().map(|x| x * x).sum();
        let vv: f64 = v.iter().map(|x| x * x).sum();
        let uv: f64 = u.iter().zip(&v).map(|(x, y)| x * y).sum();
        0.5 * (uu * vv - uv * uv).max(0.0).sqrt()
    }

    pub fn total_area(&self) -> f64 {
        self.triangles.iter().map(|t| self.triangle_area(t)).sum()
    }
}

/// Build a triangle mesh with n_s profile rings and n_theta vertices per
/// ring; watertight along the angular seam. A ring that degenerates to a
/// point (a cap apex) is collapsed to a single pole vertex with a triangle
/// fan, so no degenerate triangles are emitted.
pub fn mesh(surface: &RotationSurface, n_s: usize, n_theta: usize) -> TriMesh {
    assert!(n_s >= 2, "n_s must be at least 2");
    assert!(n_theta >= 3, "n_theta must be at least 3");
    let dense = &surface.dense;
    let mut vertices = Vec::new();
    let mut normals = Vec::new();
    let mut ring_start = Vec::with_capacity(n_s);
    let mut ring_is_pole = Vec::with_capacity(n_s);
    for i in 0..n_s {
        let s = surface.s_lo + (surface.s_hi - surface.s_lo) * i as f64 / (n_s - 1) as f64;
        let pole = dense.parallel_radius(s).abs() < 1e-9;
        ring_start.push(vertices.len() as u32);
        ring_is_pole.push(pole);
        let count = if pole { 1 } else { n_theta };
        for j in 0..count {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n_theta as f64;
            vertices.push(*dense.position(s, theta).coords());
            normals.push(dense.normal(s, theta).dir);
        }
    }
    let mut triangles = Vec::new();
    for i in 0..n_s - 1 {
        let (a0, b0) = (ring_start[i], ring_start[i + 1]);
        match (ring_is_pole[i], ring_is_pole[i + 1]) {
            (false, false) => {
                for j in 0..n_theta as u32 {
                    let jn = (j + 1) % n_theta as u32;
                    triangles.push([a0 + j, b0 + j, b0 + jn]);
                    triangles.push([a0 + j, b0 + jn, a0 + jn]);
                }
            }
            (true, false) => {
                for j in 0..n_theta as u32 {
                    let jn = (j + 1) % n_theta as u32;
                    triangles.push([a0, b0 + j, b0 + jn]);
                }
            }
            (false, true) => {
                for j in 0..n_theta as u32 {
                    let jn = (j + 1) % n_theta as u32;
                    triangles.push([a0 + j, b0, a0 + jn]);
                }
            }
            (true, true) => {}
        }
    }
    TriMesh {
        vertices,
        triangles,
        normals: Some(normals),
    }
}
