//! Independent finite-difference oracles used as ground truth in tests and
//! verification runs: second fundamental form of a parametric patch, and
//! second derivatives of the comparison function along surface geodesics.
//!
//! Nothing here shares code with the frame-based curvature pipeline; the
//! whole point is that the two routes disagree only at discretization
//! order.

use crate::error::{CmcError, Result};
use crate::rotation::{DenseProfile, RotationSurface};
use crate::spaceform::{AmbientPoint, Model, SpaceForm};

/// Default central-difference step, balancing truncation and rounding.
pub const FD_STEP: f64 = 1e-5;

/// Curvatures of a parametric patch extracted by finite differences.
#[derive(Debug, Clone, Copy)]
pub struct FdCurvatures {
    pub lambda1: f64,
    pub lambda2: f64,
    pub h: f64,
    pub phi_sq: f64,
}

fn sub4(a: &[f64; 4], b: &[f64; 4]) -> [f64; 4] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

fn scale4(a: &[f64; 4], t: f64) -> [f64; 4] {
    [a[0] * t, a[1] * t, a[2] * t, a[3] * t]
}

/// Euclidean 4-space cross product of three vectors (index-lowered form).
fn cross4(u: &[f64; 4], v: &[f64; 4], w: &[f64; 4]) -> [f64; 4] {
    let minor = |c0: usize, c1: usize, c2: usize| -> f64 {
        u[c0] * (v[c1] * w[c2] - v[c2] * w[c1]) - u[c1] * (v[c0] * w[c2] - v[c2] * w[c0])
            + u[c2] * (v[c0] * w[c1] - v[c1] * w[c0])
    };
    [
        minor(1, 2, 3),
        -minor(0, 2, 3),
        minor(0, 1, 3),
        -minor(0, 1, 2),
    ]
}

fn cross3(u: &[f64; 4], v: &[f64; 4]) -> [f64; 4] {
    [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
        0.0,
    ]
}

/// Unit normal of the surface spanned by tangents (ta, tb) at the model
/// point x, under the ambient bilinear form of the space form.
fn patch_normal(sf: &SpaceForm, x: &[f64; 4], ta: &[f64; 4], tb: &[f64; 4]) -> Result<[f64; 4]> {
    let raw = match sf.model() {
        Model::Euclidean => cross3(ta, tb),
        Model::Sphere => cross4(ta, tb, x),
        Model::Hyperbolic => {
            // solve B(nu, .) = 0 against ta, tb, x: the Euclidean cross of
            // the raw vectors gives G nu, and G = diag(-1,1,1,1) is its own
            // inverse
            let g = cross4(ta, tb, x);
            [-g[0], g[1], g[2], g[3]]
        }
    };
    let n2 = sf.dot(&raw, &raw);
    if n2 <= 1e-30 {
        return Err(CmcError::DegenerateMetric(n2));
    }
    Ok(scale4(&raw, 1.0 / n2.sqrt()))
}

/// Principal curvatures of a parametric patch by central finite differences
/// of the embedding (step `h_fd`), as eigenvalues of the shape operator.
/// The normal is oriented so that its inner product with `orient` is
/// nonnegative; pass the surface normal convention you want to compare
/// against.
pub fn second_fundamental_form_fd(
    sf: &SpaceForm,
    patch: &dyn Fn(f64, f64) -> [f64; 4],
    at: (f64, f64),
    orient: &[f64; 4],
    h_fd: f64,
) -> Result<FdCurvatures> {
    let (a, b) = at;
    let h = h_fd;
    let x = patch(a, b);
    let xa_p = patch(a + h, b);
    let xa_m = patch(a - h, b);
    let xb_p = patch(a, b + h);
    let xb_m = patch(a, b - h);
    let ta = scale4(&sub4(&xa_p, &xa_m), 0.5 / h);
    let tb = scale4(&sub4(&xb_p, &xb_m), 0.5 / h);

    let e = sf.dot(&ta, &ta);
    let f = sf.dot(&ta, &tb);
    let g = sf.dot(&tb, &tb);
    let det_i = e * g - f * f;
    if det_i < 1e-12 {
        return Err(CmcError::DegenerateMetric(det_i));
    }

    let mut nu = patch_normal(sf, &x, &ta, &tb)?;
    if sf.dot(&nu, orient) < 0.0 {
        nu = scale4(&nu, -1.0);
    }

    let h2 = h * h;
    let xaa = {
        let mut v = [0.0; 4];
        for i in 0..4 {
            v[i] = (xa_p[i] - 2.0 * x[i] + xa_m[i]) / h2;
        }
        v
    };
    let xbb = {
        let mut v = [0.0; 4];
        for i in 0..4 {
            v[i] = (xb_p[i] - 2.0 * x[i] + xb_m[i]) / h2;
        }
        v
    };
    let xab = {
        let pp = patch(a + h, b + h);
        let pm = patch(a + h, b - h);
        let mp = patch(a - h, b + h);
        let mm = patch(a - h, b - h);
        let mut v = [0.0; 4];
        for i in 0..4 {
            v[i] = (pp[i] - pm[i] - mp[i] + mm[i]) / (4.0 * h2);
        }
        v
    };

    // the model-normal component of the flat second derivative is killed by
    // projecting on nu, so these are the honest second-fundamental-form
    // coefficients in every model
    let l = sf.dot(&xaa, &nu);
    let m = sf.dot(&xab, &nu);
    let n = sf.dot(&xbb, &nu);

    // shape operator I^-1 II
    let s11 = (g * l - f * m) / det_i;
    let s12 = (g * m - f * n) / det_i;
    let s21 = (e * m - f * l) / det_i;
    let s22 = (e * n - f * m) / det_i;
    let tr = s11 + s22;
    let det = s11 * s22 - s12 * s21;
    let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
    let lambda1 = 0.5 * (tr + disc);
    let lambda2 = 0.5 * (tr - disc);
    let mean = 0.5 * tr;
    Ok(FdCurvatures {
        lambda1,
        lambda2,
        h: mean,
        phi_sq: (lambda1 - mean).powi(2) + (lambda2 - mean).powi(2),
    })
}

/// Which principal direction a geodesic starts in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrincipalDir {
    /// Along the parallel circle (curvature lambda1).
    Parallel,
    /// Along the meridian (curvature lambda2).
    Meridian,
}

/// Surface geodesic in the (s, theta) chart of a rotation surface, where
/// the induced metric is ds^2 + w(s)^2 dtheta^2 with w the parallel radius:
///     s'' = w w' theta'^2,   theta'' = -2 (w'/w) s' theta'.
fn geodesic_rhs(prof: &DenseProfile, y: &[f64; 4]) -> [f64; 4] {
    let w = prof.parallel_radius(y[0]);
    let wp = prof.parallel_radius_prime(y[0]);
    [
        y[2],
        y[3],
        w * wp * y[3] * y[3],
        -2.0 * (wp / w) * y[2] * y[3],
    ]
}

fn rk4_geodesic(prof: &DenseProfile, y: &[f64; 4], h: f64) -> [f64; 4] {
    let add = |y: &[f64; 4], k: &[f64; 4], t: f64| {
        [
            y[0] + t * k[0],
            y[1] + t * k[1],
            y[2] + t * k[2],
            y[3] + t * k[3],
        ]
    };
    let k1 = geodesic_rhs(prof, y);
    let k2 = geodesic_rhs(prof, &add(y, &k1, 0.5 * h));
    let k3 = geodesic_rhs(prof, &add(y, &k2, 0.5 * h));
    let k4 = geodesic_rhs(prof, &add(y, &k3, h));
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        y[2] + h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
        y[3] + h / 6.0 * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3]),
    ]
}

/// Value of f(r(.)) at the point reached after geodesic time t from
/// (s0, theta0) in the given principal direction.
fn f_along_geodesic(
    surface: &RotationSurface,
    center: &AmbientPoint,
    s0: f64,
    theta0: f64,
    dir: PrincipalDir,
    t: f64,
) -> Result<f64> {
    let prof = &surface.dense;
    let sf = &prof.sf;
    let y_end = match dir {
        // meridians are geodesics: walk the profile directly
        PrincipalDir::Meridian => [s0 + t, theta0, 1.0, 0.0],
        PrincipalDir::Parallel => {
            let w0 = prof.parallel_radius(s0);
            let mut y = [s0, theta0, 0.0, 1.0 / w0];
            let n = 24usize;
            let h = t / n as f64;
            if h != 0.0 {
                for _ in 0..n {
                    y = rk4_geodesic(prof, &y, h);
                }
            }
            y
        }
    };
    let pos = prof.position(y_end[0], y_end[1]);
    let r = sf.distance(center, &pos)?;
    Ok(sf.f_eval(r)?.0)
}

/// Second derivative of f along the surface geodesic through (s0, theta0)
/// in a principal direction, by a fourth-order five-point stencil. This is
/// the independent route to Hess_Sigma f(e_i, e_i).
pub fn hess_f_fd(
    surface: &RotationSurface,
    center: &AmbientPoint,
    s0: f64,
    theta0: f64,
    dir: PrincipalDir,
    h_fd: f64,
) -> Result<f64> {
    let h = h_fd;
    let f = |t: f64| f_along_geodesic(surface, center, s0, theta0, dir, t);
    let fm2 = f(-2.0 * h)?;
    let fm1 = f(-h)?;
    let f0 = f(0.0)?;
    let fp1 = f(h)?;
    let fp2 = f(2.0 * h)?;
    Ok((-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h))
}
