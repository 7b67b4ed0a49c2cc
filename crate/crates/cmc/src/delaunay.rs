//! The governing ODE of rotation CMC surfaces and its complete solution
//! pipeline: first integral, determination of the constant C, discriminant,
//! and the closed-form solution branches, together with a fixed-step
//! fourth-order numeric integrator used as an independent route.
//!
//! The working variable is u = w^2 = 1/|lambda - H|, where lambda is the
//! principal curvature along parallels. u obeys
//!     (1/4) u'^2 + (c + H^2) u^2 - (C - 2H) u + 1 = 0,
//! with C fixed by the symmetric initial data u(0) = u0, u'(0) = 0.

use serde::{Deserialize, Serialize};

use crate::error::{CmcError, Result};

/// Breakdown floor: below this u the curvature lambda = H + a/u diverges
/// beyond double-precision usefulness.
pub const U_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// c + H^2 > 0: u oscillates between the two roots of the quadratic.
    Oscillatory,
    /// c + H^2 < 0: u grows like cosh away from its minimum.
    Hyperbolic,
    /// c + H^2 = 0: u is a parabola in s.
    Parabolic,
}

/// Full parameter record determining one meridian solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelaunayParams {
    pub c: f64,
    #[serde(rename = "H")]
    pub h: f64,
    pub n: u32,
    /// Sign of lambda - H, constant along one solution.
    pub a: i8,
    pub u0: f64,
    /// First-integral constant, determined by (c, H, u0).
    #[serde(rename = "C")]
    pub big_c: f64,
    pub branch: Branch,
    /// Phase constant of the oscillatory closed form; cos D = 0.
    #[serde(rename = "D")]
    pub d_phase: Option<f64>,
}

impl DelaunayParams {
    /// c + H^2, the quantity whose sign selects the branch.
    pub fn q(&self) -> f64 {
        self.c + self.h * self.h
    }

    /// Discriminant C^2 - 4HC - 4c of the defining quadratic.
    pub fn discriminant(&self) -> f64 {
        self.big_c * self.big_c - 4.0 * self.h * self.big_c - 4.0 * self.c
    }

    /// lambda(s) and mu(s) from u(s).
    pub fn curvatures(&self, u: f64) -> (f64, f64) {
        let lam = self.h + self.a as f64 / u;
        (lam, 2.0 * self.h - lam)
    }
}

/// Build the parameter record for given ambient curvature, mean curvature
/// and initial value u0 > 0. The sign a defaults to +1; flip it with
/// [`DelaunayParams::a`] when the opposite branch of lambda - H is wanted.
pub fn make_params(c: f64, h: f64, u0: f64) -> Result<DelaunayParams> {
    if u0 <= 0.0 || u0.is_nan() {
        return Err(CmcError::NonPositiveU0(u0));
    }
    let q = c + h * h;
    let big_c = 2.0 * h + (q * u0 * u0 + 1.0) / u0;
    let branch = if q > 0.0 {
        Branch::Oscillatory
    } else if q < 0.0 {
        Branch::Hyperbolic
    } else {
        Branch::Parabolic
    };
    let params = DelaunayParams {
        c,
        h,
        n: 2,
        a: 1,
        u0,
        big_c,
        branch,
        d_phase: (branch == Branch::Oscillatory).then_some(-std::f64::consts::FRAC_PI_2),
    };
    debug_assert!(
        params.discriminant() >= -1e-12 * (1.0 + big_c * big_c),
        "discriminant must be nonnegative"
    );
    Ok(params)
}

fn check_branch(params: &DelaunayParams) -> Result<()> {
    let q = params.q();
    let ok = match params.branch {
        Branch::Oscillatory => q > 0.0,
        Branch::Hyperbolic => q < 0.0,
        Branch::Parabolic => q == 0.0,
    };
    if ok {
        Ok(())
    } else {
        Err(CmcError::BranchMismatch)
    }
}

/// Closed-form u(s).
///
/// The amplitude is stored with the sign of u0 - (C-2H)/(2(c+H^2)), which
/// makes u(0) = u0 and u'(0) = 0 hold whether u0 sits at the lower or the
/// upper turning point.
pub fn u_closed(params: &DelaunayParams, s: f64) -> Result<f64> {
    check_branch(params)?;
    let q = params.q();
    match params.branch {
        Branch::Oscillatory => {
            let m = (params.big_c - 2.0 * params.h) / (2.0 * q);
            let amp = params.u0 - m;
            Ok(m + amp * (2.0 * q.sqrt() * s).cos())
        }
        Branch::Hyperbolic => {
            let m = (params.big_c - 2.0 * params.h) / (2.0 * q);
            let amp = params.u0 - m;
            Ok(m + amp * (2.0 * (-q).sqrt() * s).cosh())
        }
        Branch::Parabolic => {
            let cm2h = params.big_c - 2.0 * params.h;
            Ok(1.0 / cm2h + cm2h * s * s)
        }
    }
}

/// Derivative of the closed form, for residual checks and reconstruction.
pub fn u_closed_prime(params: &DelaunayParams, s: f64) -> Result<f64> {
    check_branch(params)?;
    let q = params.q();
    match params.branch {
        Branch::Oscillatory => {
            let m = (params.big_c - 2.0 * params.h) / (2.0 * q);
            let w = 2.0 * q.sqrt();
            Ok(-(params.u0 - m) * w * (w * s).sin())
        }
        Branch::Hyperbolic => {
            let m = (params.big_c - 2.0 * params.h) / (2.0 * q);
            let w = 2.0 * (-q).sqrt();
            Ok((params.u0 - m) * w * (w * s).sinh())
        }
        Branch::Parabolic => Ok(2.0 * (params.big_c - 2.0 * params.h) * s),
    }
}

/// Period of the oscillatory branch, pi / sqrt(c + H^2).
pub fn period(params: &DelaunayParams) -> Option<f64> {
    (params.branch == Branch::Oscillatory).then(|| std::f64::consts::PI / params.q().sqrt())
}

/// Left-hand side of the first-order ODE; vanishes on true solutions.
pub fn first_integral_residual(u: f64, uprime: f64, params: &DelaunayParams) -> f64 {
    0.25 * uprime * uprime + params.q() * u * u - (params.big_c - 2.0 * params.h) * u + 1.0
}

/// Residual of the general-dimension governing ODE
/// w'' + w (c + H^2 + a(2-n) H w^-n + (1-n) w^-2n).
///
/// At n = 2 the a-dependent term has coefficient zero and the residual
/// reduces to w'' + w (c + H^2 - w^-4).
pub fn ode_residual_general_n(w: f64, wpp: f64, c: f64, h: f64, n: u32, a: i8) -> Result<f64> {
    if w <= 0.0 || w.is_nan() {
        return Err(CmcError::NonPositiveW(w));
    }
    assert!(n >= 2, "dimension n must be at least 2");
    let nf = n as f64;
    let wn = w.powi(-(n as i32));
    Ok(wpp + w * (c + h * h + (a as f64) * (2.0 - nf) * h * wn + (1.0 - nf) * wn * wn))
}

/// Attained range of u along the solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum URange {
    Bounded { u_min: f64, u_max: f64 },
    UnboundedAbove { u_min: f64 },
}

/// Range of u: the two quadratic roots on the oscillatory branch, or
/// [u0, infinity) on the other two (u0 is the minimum there).
pub fn u_range(params: &DelaunayParams) -> URange {
    match params.branch {
        Branch::Oscillatory => {
            let m = (params.big_c - 2.0 * params.h) / (2.0 * params.q());
            let other = 2.0 * m - params.u0;
            URange::Bounded {
                u_min: params.u0.min(other),
                u_max: params.u0.max(other),
            }
        }
        _ => URange::UnboundedAbove { u_min: params.u0 },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolutionSource {
    ClosedForm,
    Numeric,
}

/// A sampled solution u(s) with its derivative.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct USolution {
    pub params: DelaunayParams,
    pub s_grid: Vec<f64>,
    pub u: Vec<f64>,
    pub uprime: Vec<f64>,
    pub source: SolutionSource,
}

/// Dense numeric solution of w'' + w (c + H^2 - w^-4) = 0 with
/// w(0) = sqrt(u0), w'(0) = 0. Evaluation anywhere in range takes one
/// Runge-Kutta step from the nearest stored state, so it is smooth and
/// accurate to the integrator order between grid points.
#[derive(Debug, Clone)]
pub struct UDense {
    pub params: DelaunayParams,
    pub ds: f64,
    states: Vec<[f64; 2]>,
}

fn w_rhs(params: &DelaunayParams, y: &[f64; 2]) -> [f64; 2] {
    let w = y[0];
    let w4 = w * w * w * w;
    [y[1], -w * (params.q() - 1.0 / w4)]
}

fn rk4_w(params: &DelaunayParams, y: &[f64; 2], h: f64) -> [f64; 2] {
    let k1 = w_rhs(params, y);
    let y2 = [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]];
    let k2 = w_rhs(params, &y2);
    let y3 = [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]];
    let k3 = w_rhs(params, &y3);
    let y4 = [y[0] + h * k3[0], y[1] + h * k3[1]];
    let k4 = w_rhs(params, &y4);
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

impl UDense {
    pub fn s_end(&self) -> f64 {
        (self.states.len() - 1) as f64 * self.ds
    }

    /// (u, u') at |s|; the solution is even in s.
    pub fn eval(&self, s: f64) -> (f64, f64) {
        let s_abs = s.abs();
        let n = self.states.len() - 1;
        let mut i = (s_abs / self.ds).floor() as usize;
        if i > n {
            i = n;
        }
        let h = s_abs - i as f64 * self.ds;
        let y = if h.abs() < 1e-15 {
            self.states[i]
        } else {
            rk4_w(&self.params, &self.states[i], h)
        };
        let sign = if s < 0.0 { -1.0 } else { 1.0 };
        (y[0] * y[0], 2.0 * y[0] * y[1] * sign)
    }
}

/// Integrate the second-order governing ODE numerically.
pub fn u_numeric_dense(params: &DelaunayParams, s_max: f64, ds: f64) -> Result<UDense> {
    if ds <= 0.0 || ds.is_nan() {
        return Err(CmcError::OutOfDomain(format!("ds must be positive, got {ds}")));
    }
    if params.u0 <= 0.0 || params.u0.is_nan() {
        return Err(CmcError::NonPositiveU0(params.u0));
    }
    let n_steps = (s_max / ds).ceil() as usize;
    let mut states = Vec::with_capacity(n_steps + 1);
    let mut y = [params.u0.sqrt(), 0.0];
    states.push(y);
    for i in 0..n_steps {
        y = rk4_w(params, &y, ds);
        // w <= 0 means the stepper jumped across the curvature blow-up
        if y[0] <= 0.0 || y[0] * y[0] <= U_FLOOR || y[0].is_nan() {
            return Err(CmcError::Breakdown((i + 1) as f64 * ds));
        }
        states.push(y);
    }
    Ok(UDense {
        params: *params,
        ds,
        states,
    })
}

/// Numeric solution sampled on its own integration grid.
pub fn u_numeric(params: &DelaunayParams, s_max: f64, ds: f64) -> Result<USolution> {
    let dense = u_numeric_dense(params, s_max, ds)?;
    let n = dense.states.len();
    let mut s_grid = Vec::with_capacity(n);
    let mut u = Vec::with_capacity(n);
    let mut uprime = Vec::with_capacity(n);
    for (i, y) in dense.states.iter().enumerate() {
        s_grid.push(i as f64 * ds);
        u.push(y[0] * y[0]);
        uprime.push(2.0 * y[0] * y[1]);
    }
    Ok(USolution {
        params: *params,
        s_grid,
        u,
        uprime,
        source: SolutionSource::Numeric,
    })
}

/// Closed-form solution sampled on a uniform grid of n_points over [0, s_max].
pub fn u_closed_solution(params: &DelaunayParams, s_max: f64, n_points: usize) -> Result<USolution> {
    let n = n_points.max(2);
    let mut s_grid = Vec::with_capacity(n);
    let mut u = Vec::with_capacity(n);
    let mut uprime = Vec::with_capacity(n);
    for i in 0..n {
        let s = s_max * i as f64 / (n - 1) as f64;
        s_grid.push(s);
        u.push(u_closed(params, s)?);
        uprime.push(u_closed_prime(params, s)?);
    }
    Ok(USolution {
        params: *params,
        s_grid,
        u,
        uprime,
        source: SolutionSource::ClosedForm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn make_params_examples() {
        let p = make_params(0.0, 0.0, 1.0).unwrap();
        assert_eq!(p.branch, Branch::Parabolic);
        assert!((p.big_c - 1.0).abs() < 1e-15);

        let p = make_params(0.0, 1.0, 1.0).unwrap();
        assert!((p.big_c - 4.0).abs() < 1e-15);
        assert!(p.discriminant().abs() < 1e-12);

        let p = make_params(1.0, 0.0, 1.0).unwrap();
        assert!((p.big_c - 2.0).abs() < 1e-15);
        assert!(p.discriminant().abs() < 1e-12);

        assert!(matches!(
            make_params(0.0, 0.0, 0.0),
            Err(CmcError::NonPositiveU0(_))
        ));
    }

    #[test]
    fn params_invariants() {
        for &(c, h, u0) in &[
            (0.0, 0.0, 1.0),
            (0.0, 1.0, 0.5),
            (1.0, 0.0, 2.0),
            (-1.0, 2.0, 0.8),
            (-1.0, 0.5, 1.5),
            (-1.0, 1.0, 0.7),
        ] {
            let p = make_params(c, h, u0).unwrap();
            // u0 is a root of (c+H^2)u^2 - (C-2H)u + 1
            let res = p.q() * u0 * u0 - (p.big_c - 2.0 * h) * u0 + 1.0;
            assert!(res.abs() < 1e-12, "algebraic relation, res={res}");
            assert!(p.discriminant() >= -1e-12);
            let want = if p.q() > 0.0 {
                Branch::Oscillatory
            } else if p.q() < 0.0 {
                Branch::Hyperbolic
            } else {
                Branch::Parabolic
            };
            assert_eq!(p.branch, want);
            if p.branch == Branch::Oscillatory {
                assert!(p.d_phase.unwrap().cos().abs() < 1e-15);
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        // catenoid
        let p = make_params(0.0, 0.0, 1.0).unwrap();
        for &s in &[0.0, 0.5, 1.0, 2.0] {
            assert!((u_closed(&p, s).unwrap() - (1.0 + s * s)).abs() < 1e-14);
        }
        // first integral vanishes on it
        let r = first_integral_residual(1.0 + 4.0, 2.0 * 2.0, &p);
        assert!(r.abs() < 1e-14);

        // zero-discriminant constant solution
        let p = make_params(1.0, 0.0, 1.0).unwrap();
        for &s in &[0.0, 1.0, 7.3] {
            assert!((u_closed(&p, s).unwrap() - 1.0).abs() < 1e-12);
        }

        // initial conditions on every branch
        for &(c, h, u0) in &[(1.0, 0.5, 2.0), (-2.0, 0.5, 1.0), (-1.0, 1.0, 0.6)] {
            let p = make_params(c, h, u0).unwrap();
            assert!((u_closed(&p, 0.0).unwrap() - u0).abs() < 1e-12);
            assert!(u_closed_prime(&p, 0.0).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_satisfies_first_integral_everywhere() {
        for &(c, h, u0) in &[
            (0.0, 0.0, 1.0),
            (0.0, 1.0, 0.4),
            (1.0, 0.3, 1.7),
            (-1.0, 2.0, 0.9),
            (-2.0, 0.7, 1.3),
            (-1.0, 1.0, 0.8),
        ] {
            let p = make_params(c, h, u0).unwrap();
            for i in 0..40 {
                let s = i as f64 * 0.07;
                let u = u_closed(&p, s).unwrap();
                let up = u_closed_prime(&p, s).unwrap();
                let res = first_integral_residual(u, up, &p);
                assert!(
                    res.abs() < 1e-10 * (1.0 + u * u),
                    "c={c} H={h} u0={u0} s={s}: residual {res}"
                );
            }
        }
    }

    #[test]
    fn residual_is_sensitive_to_perturbations() {
        let p = make_params(0.0, 0.0, 1.0).unwrap();
        let s = 1.3;
        let u = 1.0 + s * s;
        let res = first_integral_residual(u + 1e-3, 2.0 * s, &p);
        // linear sensitivity: -(C-2H) * du = -1e-3
        assert!((res + 1e-3).abs() < 1e-5);
        let res0 = first_integral_residual(p.u0, 0.0, &p);
        assert!(res0.abs() < 1e-12);
    }

    #[test]
    fn numeric_matches_closed_form() {
        // parabolic
        let p = make_params(0.0, 0.0, 1.0).unwrap();
        let sol = u_numeric(&p, 2.0, 1e-4).unwrap();
        let mut worst = 0.0f64;
        for (i, &s) in sol.s_grid.iter().enumerate() {
            worst = worst.max((sol.u[i] - (1.0 + s * s)).abs());
        }
        assert!(worst < 1e-8, "catenoid sup deviation {worst}");

        // constant solution stays put over a long run
        let p = make_params(1.0, 0.0, 1.0).unwrap();
        let sol = u_numeric(&p, 10.0, 1e-3).unwrap();
        let worst = sol.u.iter().map(|u| (u - 1.0).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-9, "constant sup deviation {worst}");
    }

    #[test]
    fn oscillation_period_matches_the_closed_form() {
        // c = -1, H = 2 gives c + H^2 = 3 and period pi/sqrt(3)
        let p = make_params(-1.0, 2.0, 0.9).unwrap();
        let t = period(&p).unwrap();
        assert!((t - PI / 3f64.sqrt()).abs() < 1e-14);
        let dense = u_numeric_dense(&p, 2.0 * t, 1e-4).unwrap();
        for &s in &[0.0, 0.3, 0.7, 1.1] {
            let (u1, _) = dense.eval(s);
            let (u2, _) = dense.eval(s + t);
            assert!((u1 - u2).abs() < 1e-6, "period deviation {}", (u1 - u2).abs());
        }
    }

    #[test]
    fn numeric_values_stay_in_range() {
        for &(c, h, u0) in &[(1.0, 0.0, 2.0), (0.0, 1.0, 0.5), (-1.0, 2.0, 0.9)] {
            let p = make_params(c, h, u0).unwrap();
            let sol = u_numeric(&p, 3.0, 1e-4).unwrap();
            match u_range(&p) {
                URange::Bounded { u_min, u_max } => {
                    for &u in &sol.u {
                        assert!(u >= u_min - 1e-8 && u <= u_max + 1e-8);
                    }
                }
                URange::UnboundedAbove { u_min } => {
                    for &u in &sol.u {
                        assert!(u >= u_min - 1e-8);
                    }
                }
            }
        }
    }

    #[test]
    fn u_range_examples() {
        let p = make_params(0.0, 1.0, 1.0).unwrap();
        match u_range(&p) {
            URange::Bounded { u_min, u_max } => {
                assert!((u_min - 1.0).abs() < 1e-12 && (u_max - 1.0).abs() < 1e-12);
            }
            _ => panic!("expected bounded"),
        }

        let p = make_params(1.0, 0.0, 2.0).unwrap();
        assert!((p.big_c - 2.5).abs() < 1e-15);
        match u_range(&p) {
            URange::Bounded { u_min, u_max } => {
                assert!((u_min - 0.5).abs() < 1e-12 && (u_max - 2.0).abs() < 1e-12);
            }
            _ => panic!("expected bounded"),
        }

        let p = make_params(0.0, 0.0, 1.0).unwrap();
        match u_range(&p) {
            URange::UnboundedAbove { u_min } => assert!((u_min - 1.0).abs() < 1e-15),
            _ => panic!("expected unbounded"),
        }
    }

    #[test]
    fn curvature_pairs_sum_to_2h() {
        let p = make_params(-1.0, 2.0, 0.9).unwrap();
        for i in 0..50 {
            let u = u_closed(&p, i as f64 * 0.05).unwrap();
            let (lam, mu) = p.curvatures(u);
            assert!((lam + mu - 2.0 * p.h).abs() < 1e-12);
        }
    }

    #[test]
    fn general_n_residual() {
        // n = 2: the a-term coefficient is exactly zero
        for &a in &[1i8, -1] {
            let r = ode_residual_general_n(1.3, 0.7, 0.5, 2.0, 2, a).unwrap();
            let w: f64 = 1.3;
            let expect = 0.7 + w * (0.5 + 4.0 - w.powi(-4));
            assert_eq!(r, expect);
        }

        // n = 3, H = 0, c = 0: residual = w'' - 2 w^-5
        let w: f64 = 1.7;
        let r = ode_residual_general_n(w, 0.0, 0.0, 0.0, 3, 1).unwrap();
        assert!((r + 2.0 * w.powi(-5)).abs() < 1e-15);

        // constant solution w = ((n-1)/c)^(1/2n) for H = 0, c = 1
        for &n in &[2u32, 3, 5] {
            let wbar = ((n as f64 - 1.0) / 1.0).powf(1.0 / (2.0 * n as f64));
            let r = ode_residual_general_n(wbar, 0.0, 1.0, 0.0, n, 1).unwrap();
            assert!(r.abs() < 1e-12, "n={n}: residual {r}");
        }

        assert!(matches!(
            ode_residual_general_n(0.0, 0.0, 1.0, 0.0, 2, 1),
            Err(CmcError::NonPositiveW(_))
        ));
    }

    #[test]
    fn breakdown_is_reported() {
        // starting at the upper turning point with u_max = 1e12 puts the
        // lower turning point at 1/u_max = 1e-12, far below the floor
        let p = make_params(1.0, 0.0, 1e12).unwrap();
        let res = u_numeric(&p, 2.0, 1e-4);
        assert!(matches!(res, Err(CmcError::Breakdown(_))));
    }
}
