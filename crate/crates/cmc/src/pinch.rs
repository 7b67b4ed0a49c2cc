//! Pointwise evaluation of the pinching hypothesis
//!     (1/2) |Phi|^2 (grad_nu f)^2 <= (f'' + H grad_nu f)^2,
//! the symmetric bilinear form L = f'' g + A grad_nu f with its determinant
//! identity, the minimum-distance locus, and classification verdicts.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::oracle::PrincipalDir;
use crate::rotation::SurfaceSample;
use crate::spaceform::SpaceForm;

/// Detection tolerances, all configurable; defaults sit two orders above
/// the integrator error budgets.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Tolerances {
    /// Equality detection on the pinching margin.
    pub tol_eq: f64,
    /// Umbilic detection on |Phi|^2.
    pub tol_umb: f64,
    /// Minimum-distance locus thickness.
    pub tol_r: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol_eq: 1e-6,
            tol_umb: 1e-8,
            tol_r: 1e-8,
        }
    }
}

/// Pinching quantities of one surface sample.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PinchSample {
    pub base: SurfaceSample,
    /// (1/2) |Phi|^2 (grad_nu f)^2.
    pub lhs: f64,
    /// (f'' + H grad_nu f)^2.
    pub rhs: f64,
    /// rhs - lhs; nonnegative wherever the hypothesis holds.
    pub margin: f64,
    pub det_l: f64,
    pub tr_l: f64,
    /// f'' + H grad_nu f = tr L / 2.
    pub trace_half: f64,
    /// Diagonal of L in the principal frame:
    /// (f'' + lambda1 grad_nu f, f'' + lambda2 grad_nu f).
    pub hess_sigma_diag: (f64, f64),
}

/// Evaluate every pinching quantity at a sample.
pub fn pinch_values(s: &SurfaceSample, sf: &SpaceForm) -> Result<PinchSample> {
    let (_, _, f2) = sf.f_eval(s.r)?;
    let g = s.grad_nu_f;
    let lhs = 0.5 * s.phi_sq * g * g;
    let trace_half = f2 + s.h * g;
    let rhs = trace_half * trace_half;
    let d1 = f2 + s.lambda1 * g;
    let d2 = f2 + s.lambda2 * g;
    Ok(PinchSample {
        base: s.clone(),
        lhs,
        rhs,
        margin: rhs - lhs,
        det_l: d1 * d2,
        tr_l: 2.0 * trace_half,
        trace_half,
        hess_sigma_diag: (d1, d2),
    })
}

/// Diagonal entry of L in a principal direction: f'' + lambda_i grad_nu f.
/// In a space form this equals the Hessian of f on the surface evaluated on
/// that principal direction.
pub fn hess_sigma_f(s: &SurfaceSample, sf: &SpaceForm, direction: PrincipalDir) -> Result<f64> {
    let (_, _, f2) = sf.f_eval(s.r)?;
    let lam = match direction {
        PrincipalDir::Parallel => s.lambda1,
        PrincipalDir::Meridian => s.lambda2,
    };
    Ok(f2 + lam * s.grad_nu_f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    SphericalCapConsistent,
    DelaunayConsistent,
    HypothesisViolated,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Topology {
    Disk,
    Annulus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignClass {
    AllNonpositive,
    AllNonnegative,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LocusShape {
    SingleCluster,
    Ring,
    Scattered,
}

/// Umbilic set of a sampled surface: everything, or clusters of flat
/// sample indices (possibly empty).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum UmbilicSet {
    TotallyUmbilical,
    Clusters(Vec<Vec<usize>>),
}

impl UmbilicSet {
    pub fn tag(&self) -> &'static str {
        match self {
            UmbilicSet::TotallyUmbilical => "total",
            UmbilicSet::Clusters(c) if c.is_empty() => "none",
            UmbilicSet::Clusters(_) => "isolated",
        }
    }
}

/// Full pinching report over a sampled surface grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PinchReport {
    pub samples: Vec<PinchSample>,
    pub n_s: usize,
    pub n_theta: usize,
    pub tols: Tolerances,
    pub min_margin: f64,
    /// Flat index of the sample attaining the minimum margin.
    pub argmin: usize,
    /// Flat indices with |margin| <= tol_eq.
    pub equality_points: Vec<usize>,
    pub umbilic: UmbilicSet,
    /// Flat indices attaining the minimum of r within tol_r.
    pub min_r_locus: Vec<usize>,
    pub locus_shape: LocusShape,
    pub verdict: Verdict,
}

/// Build a report from a full sample grid (row-major over s then theta).
pub fn build_report(
    samples: &[SurfaceSample],
    sf: &SpaceForm,
    n_s: usize,
    n_theta: usize,
    tols: Tolerances,
    topology: Topology,
) -> Result<PinchReport> {
    assert_eq!(samples.len(), n_s * n_theta, "grid shape mismatch");
    let mut ps = Vec::with_capacity(samples.len());
    for s in samples {
        ps.push(pinch_values(s, sf)?);
    }
    let (argmin, min_margin) = ps
        .iter()
        .enumerate()
        .map(|(i, p)| (i, p.margin))
        .fold((0, f64::INFINITY), |acc, (i, m)| {
            if m < acc.1 {
                (i, m)
            } else {
                acc
            }
        });
    let equality_points: Vec<usize> = ps
        .iter()
        .enumerate()
        .filter(|(_, p)| p.margin.abs() <= tols.tol_eq)
        .map(|(i, _)| i)
        .collect();
    let umbilic = umbilic_detect(samples, n_s, n_theta, tols.tol_umb);
    let (min_r_locus, locus_shape) = min_r_locus(samples, n_s, n_theta, tols.tol_r);
    let mut report = PinchReport {
        samples: ps,
        n_s,
        n_theta,
        tols,
        min_margin,
        argmin,
        equality_points,
        umbilic,
        min_r_locus,
        locus_shape,
        verdict: Verdict::Inconclusive,
    };
    report.verdict = classify(&report, topology);
    Ok(report)
}

/// Classification verdict from a complete report. The verdicts are
/// consistency qualifiers for necessary numerical conditions, not proofs.
pub fn classify(report: &PinchReport, topology: Topology) -> Verdict {
    if report.min_margin < -report.tols.tol_eq {
        return Verdict::HypothesisViolated;
    }
    match topology {
        Topology::Disk => Verdict::SphericalCapConsistent,
        Topology::Annulus => {
            if !report.equality_points.is_empty() {
                Verdict::DelaunayConsistent
            } else {
                Verdict::Inconclusive
            }
        }
    }
}

/// Signs of the principal diagonal of L across all samples.
pub fn sign_analysis(report: &PinchReport, c: f64) -> SignClass {
    let tol = report.tols.tol_eq;
    let mut max_d = f64::NEG_INFINITY;
    let mut min_d = f64::INFINITY;
    for p in &report.samples {
        max_d = max_d.max(p.hess_sigma_diag.0).max(p.hess_sigma_diag.1);
        min_d = min_d.min(p.hess_sigma_diag.0).min(p.hess_sigma_diag.1);
    }
    // for c > 0 the expected outcome is AllNonpositive, for c <= 0
    // AllNonnegative; test the expected side first so the degenerate
    // all-zero case lands on the conventional answer
    if c > 0.0 {
        if max_d <= tol {
            SignClass::AllNonpositive
        } else if min_d >= -tol {
            SignClass::AllNonnegative
        } else {
            SignClass::Mixed
        }
    } else if min_d >= -tol {
        SignClass::AllNonnegative
    } else if max_d <= tol {
        SignClass::AllNonpositive
    } else {
        SignClass::Mixed
    }
}

fn chord2(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    (0..4).map(|i| (a[i] - b[i]) * (a[i] - b[i])).sum()
}

/// Connected clusters of the flat index set under grid adjacency
/// (neighboring s rows, theta wrapping around).
fn clusters_of(indices: &[usize], n_s: usize, n_theta: usize) -> Vec<Vec<usize>> {
    use std::collections::{HashSet, VecDeque};
    let set: HashSet<usize> = indices.iter().copied().collect();
    let mut seen: HashSet<usize> = HashSet::new();
    let mut out = Vec::new();
    for &start in indices {
        if seen.contains(&start) {
            continue;
        }
        let mut cluster = Vec::new();
        let mut queue = VecDeque::new();
        queue.push_back(start);
        seen.insert(start);
        while let Some(idx) = queue.pop_front() {
            cluster.push(idx);
            let (i, j) = (idx / n_theta, idx % n_theta);
            let mut neighbors = vec![
                (i, (j + 1) % n_theta),
                (i, (j + n_theta - 1) % n_theta),
            ];
            if i > 0 {
                neighbors.push((i - 1, j));
            }
            if i + 1 < n_s {
                neighbors.push((i + 1, j));
            }
            for (ni, nj) in neighbors {
                let nidx = ni * n_theta + nj;
                if set.contains(&nidx) && seen.insert(nidx) {
                    queue.push_back(nidx);
                }
            }
        }
        cluster.sort_unstable();
        out.push(cluster);
    }
    out
}

/// Samples attaining the minimum of r within tol_r, and the shape of that
/// locus: a closed ring of parallels (annulus/neck case), a single cluster
/// (disk/apex case), or scattered clusters.
pub fn min_r_locus(
    samples: &[SurfaceSample],
    n_s: usize,
    n_theta: usize,
    tol_r: f64,
) -> (Vec<usize>, LocusShape) {
    let r_min = samples.iter().map(|s| s.r).fold(f64::INFINITY, f64::min);
    let locus: Vec<usize> = samples
        .iter()
        .enumerate()
        .filter(|(_, s)| s.r <= r_min + tol_r)
        .map(|(i, _)| i)
        .collect();
    // a full theta ring at some s row is a neck circle, unless the ring is
    // geometrically a point (all positions coincide, e.g. a cap apex)
    let mut is_ring = false;
    for i in 0..n_s {
        let row: Vec<usize> = (0..n_theta).map(|j| i * n_theta + j).collect();
        if row.iter().all(|idx| locus.contains(idx)) {
            let p0 = &samples[row[0]].pos;
            let degenerate = row
                .iter()
                .all(|&idx| chord2(&samples[idx].pos, p0).sqrt() <= 10.0 * tol_r.max(1e-12));
            if !degenerate {
                is_ring = true;
                break;
            }
        }
    }
    let shape = if is_ring {
        LocusShape::Ring
    } else if clusters_of(&locus, n_s, n_theta).len() <= 1 {
        LocusShape::SingleCluster
    } else {
        LocusShape::Scattered
    };
    (locus, shape)
}

/// Umbilic detection: clusters of samples with |Phi|^2 <= tol_umb, or the
/// whole surface.
pub fn umbilic_detect(
    samples: &[SurfaceSample],
    n_s: usize,
    n_theta: usize,
    tol_umb: f64,
) -> UmbilicSet {
    let flagged: Vec<usize> = samples
        .iter()
        .enumerate()
        .filter(|(_, s)| s.phi_sq <= tol_umb)
        .map(|(i, _)| i)
        .collect();
    if flagged.len() == samples.len() {
        UmbilicSet::TotallyUmbilical
    } else {
        UmbilicSet::Clusters(clusters_of(&flagged, n_s, n_theta))
    }
}
