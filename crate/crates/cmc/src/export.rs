//! File formats: OBJ meshes, CSV tables and JSON reports.
//!
//! CSV floats are written with 17 significant digits so that a re-parse
//! recovers the exact double; JSON goes through serde_json, whose shortest
//! round-trip representation has the same property. Both are deterministic
//! byte-for-byte for identical inputs.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::delaunay::{first_integral_residual, USolution};
use crate::error::Result;
use crate::freeboundary::{BoundaryCurvature, FreeBoundaryPiece, GaussBonnetAudit, PieceKind};
use crate::pinch::PinchReport;
use crate::rotation::{SurfaceSample, TriMesh};
use crate::spaceform::{Model, SpaceForm};

/// 17 significant digits: enough to reproduce any f64 exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Chart projection used when writing 4-coordinate models to OBJ:
/// central (gnomonic) projection for the sphere, Klein-ball projection for
/// the hyperboloid. Both send x to (x1, x2, x3) / (k x0) and are defined on
/// the whole working domain r < pi/(2k) (sphere) or everywhere (hyperboloid).
pub fn project_vertex(sf: &SpaceForm, v: &[f64; 4]) -> [f64; 3] {
    match sf.model() {
        Model::Euclidean => [v[0], v[1], v[2]],
        _ => {
            let t = sf.k() * v[0];
            [v[1] / t, v[2] / t, v[3] / t]
        }
    }
}

pub fn obj_string(mesh: &TriMesh, sf: &SpaceForm) -> String {
    let mut out = String::with_capacity(mesh.vertices.len() * 64);
    for v in &mesh.vertices {
        let p = project_vertex(sf, v);
        out.push_str(&format!(
            "v {} {} {}\n",
            fmt_f64(p[0]),
            fmt_f64(p[1]),
            fmt_f64(p[2])
        ));
    }
    for t in &mesh.triangles {
        out.push_str(&format!("f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1));
    }
    out
}

pub fn write_obj(path: &Path, mesh: &TriMesh, sf: &SpaceForm) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(obj_string(mesh, sf).as_bytes())?;
    Ok(())
}

/// CSV header: s,u,uprime,lambda,mu,residual.
pub fn usolution_csv(sol: &USolution) -> String {
    let mut out = String::from("s,u,uprime,lambda,mu,residual\n");
    for i in 0..sol.s_grid.len() {
        let (lam, mu) = sol.params.curvatures(sol.u[i]);
        let res = first_integral_residual(sol.u[i], sol.uprime[i], &sol.params);
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_f64(sol.s_grid[i]),
            fmt_f64(sol.u[i]),
            fmt_f64(sol.uprime[i]),
            fmt_f64(lam),
            fmt_f64(mu),
            fmt_f64(res)
        ));
    }
    out
}

/// CSV header: s,theta,r,lambda1,lambda2,H,phi_sq,K,grad_nu_f.
pub fn samples_csv(samples: &[SurfaceSample]) -> String {
    let mut out = String::from("s,theta,r,lambda1,lambda2,H,phi_sq,K,grad_nu_f\n");
    for s in samples {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            fmt_f64(s.s),
            fmt_f64(s.theta),
            fmt_f64(s.r),
            fmt_f64(s.lambda1),
            fmt_f64(s.lambda2),
            fmt_f64(s.h),
            fmt_f64(s.phi_sq),
            fmt_f64(s.k_gauss),
            fmt_f64(s.grad_nu_f)
        ));
    }
    out
}

/// Machine-readable summary of a free-boundary piece.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PieceReport {
    pub c: f64,
    #[serde(rename = "H")]
    pub h: f64,
    pub u0: Option<f64>,
    pub a: Option<i8>,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub s_star: f64,
    /// [|r - R|, |<nu, grad r>|] at the boundary.
    pub residuals: [f64; 2],
    pub kappa_g: f64,
    pub gauss_bonnet: GaussBonnetSummary,
    pub kind: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaussBonnetSummary {
    pub interior: f64,
    pub boundary: f64,
    pub chi: i32,
    pub defect: f64,
}

pub fn piece_report(
    piece: &FreeBoundaryPiece,
    kappa: &BoundaryCurvature,
    audit: &GaussBonnetAudit,
) -> PieceReport {
    let (u0, a, kind) = match &piece.kind {
        PieceKind::Annulus { params } => (Some(params.u0), Some(params.a), "annulus".to_string()),
        PieceKind::Cap => (None, None, "cap".to_string()),
    };
    PieceReport {
        c: piece.sf.curvature(),
        h: piece.h,
        u0,
        a,
        big_r: piece.big_r,
        s_star: piece.s_star,
        residuals: [piece.residual_r, piece.residual_ortho],
        kappa_g: kappa.analytic,
        gauss_bonnet: GaussBonnetSummary {
            interior: audit.interior,
            boundary: audit.boundary,
            chi: audit.chi,
            defect: audit.defect,
        },
        kind,
    }
}

/// JSON schema of a pinching report: summary fields plus the equality set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PinchReportJson {
    pub params: PinchParamsJson,
    pub n_samples: usize,
    pub min_margin: f64,
    pub argmin: ArgminJson,
    pub equality_points: Vec<ArgminJson>,
    pub umbilic: String,
    pub verdict: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PinchParamsJson {
    pub c: f64,
    #[serde(rename = "H")]
    pub h: f64,
    pub tol_eq: f64,
    pub tol_umb: f64,
    pub tol_r: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArgminJson {
    pub s: f64,
    pub theta: f64,
}

pub fn pinch_report_json(report: &PinchReport, c: f64, h: f64) -> PinchReportJson {
    let at = |idx: usize| ArgminJson {
        s: report.samples[idx].base.s,
        theta: report.samples[idx].base.theta,
    };
    PinchReportJson {
        params: PinchParamsJson {
            c,
            h,
            tol_eq: report.tols.tol_eq,
            tol_umb: report.tols.tol_umb,
            tol_r: report.tols.tol_r,
        },
        n_samples: report.samples.len(),
        min_margin: report.min_margin,
        argmin: at(report.argmin),
        equality_points: report.equality_points.iter().map(|&i| at(i)).collect(),
        umbilic: report.umbilic.tag().to_string(),
        verdict: format!("{:?}", report.verdict),
    }
}

pub fn write_string(path: &Path, contents: &str) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(contents.as_bytes())?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let s = serde_json::to_string_pretty(value)?;
    write_string(path, &(s + "\n"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digit_floats_round_trip() {
        for &x in &[
            1.0,
            std::f64::consts::PI,
            1.0 / 3.0,
            -2.2250738585072014e-308,
            6.02e23,
        ] {
            let s = fmt_f64(x);
            let y: f64 = s.parse().unwrap();
            assert_eq!(x.to_bits(), y.to_bits(), "{s}");
        }
    }

    #[test]
    fn obj_projection_is_identity_in_the_flat_model() {
        let sf = SpaceForm::new(0.0);
        let p = project_vertex(&sf, &[1.0, 2.0, 3.0, 0.0]);
        assert_eq!(p, [1.0, 2.0, 3.0]);
        // Klein projection lands inside the unit ball
        let sf = SpaceForm::new(-1.0);
        let x = [1.25_f64.cosh(), 1.25_f64.sinh(), 0.0, 0.0];
        let p = project_vertex(&sf, &x);
        let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        assert!(n < 1.0 && (p[0] - 1.25_f64.tanh()).abs() < 1e-14);
    }
}
