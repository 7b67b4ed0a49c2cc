//! Command-line runner tying construction, verification and export into
//! reproducible runs: `delaunay` solves the governing meridian ODE and
//! writes solution tables, `freeboundary` shoots or builds free-boundary
//! pieces with their verification reports, and `verify` re-checks stored
//! artifacts from first principles.
//!
//! Exit codes: 0 success, 10 domain/parameter errors, 11 curvature
//! breakdown, 12 I/O or serialization, 13 no contact / no bracket /
//! no such cap, 20 verification failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use cmc::delaunay::{self, first_integral_residual};
use cmc::error::CmcError;
use cmc::export;
use cmc::freeboundary::{
    boundary_geodesic_curvature, gauss_bonnet_audit, shoot, solve_for_r, spherical_cap,
    FreeBoundaryPiece, ShootConfig,
};
use cmc::pinch::{build_report, Tolerances};
use cmc::rotation::{mesh, reconstruct_meridian, sample, RotationSurface};
use cmc::spaceform::SpaceForm;

#[derive(Parser)]
#[command(
    name = "cmc",
    about = "Constant mean curvature surfaces of revolution in space forms",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the governing meridian ODE and export the solution
    Delaunay(DelaunayArgs),
    /// Construct free-boundary pieces in a geodesic ball
    Freeboundary(FreeboundaryArgs),
    /// Re-run invariant checks on stored artifacts
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
struct DelaunayArgs {
    /// Ambient sectional curvature
    #[arg(long = "c", allow_hyphen_values = true)]
    c: Option<f64>,
    /// Mean curvature
    #[arg(long = "H", allow_hyphen_values = true)]
    h: Option<f64>,
    /// Initial value u(0) > 0; a comma-separated list sweeps
    #[arg(long = "u0", value_delimiter = ',')]
    u0: Option<Vec<f64>>,
    /// Sign of lambda - H
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    a: i8,
    /// Arclength range of the solution
    #[arg(long = "s-max", default_value_t = 5.0)]
    s_max: f64,
    /// Integrator step
    #[arg(long, default_value_t = 1e-4)]
    ds: f64,
    /// Rows in the exported tables
    #[arg(long = "n-out", default_value_t = 2001)]
    n_out: usize,
    /// Also export an OBJ mesh of the reconstructed surface
    #[arg(long)]
    mesh: bool,
    /// Mesh resolution along the profile
    #[arg(long = "n-s", default_value_t = 64)]
    n_s: usize,
    /// Mesh resolution around the axis
    #[arg(long = "n-theta", default_value_t = 64)]
    n_theta: usize,
    /// Output directory (default: CMCLAB_OUT or .)
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON run configuration overriding these flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads for parameter sweeps
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args, Debug, Clone)]
struct FreeboundaryArgs {
    #[command(subcommand)]
    cap: Option<FreeboundarySub>,
    /// Ambient sectional curvature
    #[arg(long = "c", allow_hyphen_values = true)]
    c: Option<f64>,
    /// Mean curvature
    #[arg(long = "H", allow_hyphen_values = true)]
    h: Option<f64>,
    /// Initial value u(0) > 0
    #[arg(long = "u0")]
    u0: Option<f64>,
    /// Sign of lambda - H
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    a: i8,
    /// Integrator step
    #[arg(long, default_value_t = 1e-4)]
    ds: f64,
    /// Give up shooting past this arclength
    #[arg(long = "s-max", default_value_t = 10.0)]
    s_max: f64,
    /// Reject contacts with ball radius above this bound
    #[arg(long = "R-max")]
    r_max: Option<f64>,
    /// Solve for the u0 whose contact radius is this target
    #[arg(long = "solve-r")]
    solve_r: Option<f64>,
    /// Return the n-th orthogonal contact instead of the first
    #[arg(long = "contact-index", default_value_t = 0)]
    contact_index: usize,
    /// Report every contact up to s-max
    #[arg(long = "all-contacts")]
    all_contacts: bool,
    /// Sample grid along the profile
    #[arg(long = "n-s", default_value_t = 41)]
    n_s: usize,
    /// Sample grid around the axis
    #[arg(long = "n-theta", default_value_t = 16)]
    n_theta: usize,
    /// Equality-detection tolerance of the pinching report
    #[arg(long = "tol-eq", default_value_t = 1e-6)]
    tol_eq: f64,
    /// Output directory (default: CMCLAB_OUT or .)
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON run configuration overriding these flags
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone)]
enum FreeboundarySub {
    /// Construct a totally umbilical cap meeting the ball orthogonally
    Cap(CapArgs),
}

#[derive(Args, Debug, Clone)]
struct CapArgs {
    #[arg(long = "c", allow_hyphen_values = true)]
    c: Option<f64>,
    #[arg(long = "H", allow_hyphen_values = true)]
    h: Option<f64>,
    /// Ball radius
    #[arg(long = "R")]
    big_r: Option<f64>,
    #[arg(long = "n-s", default_value_t = 41)]
    n_s: usize,
    #[arg(long = "n-theta", default_value_t = 16)]
    n_theta: usize,
    #[arg(long = "tol-eq", default_value_t = 1e-6)]
    tol_eq: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct VerifyArgs {
    /// Directory holding the artifacts to re-check
    dir: PathBuf,
}

/// Values loadable from a --config JSON file; present fields override the
/// corresponding flags.
#[derive(Debug, Clone, Default, Deserialize)]
struct RunConfig {
    c: Option<f64>,
    #[serde(rename = "H")]
    h: Option<f64>,
    u0: Option<serde_json::Value>,
    a: Option<i8>,
    s_max: Option<f64>,
    ds: Option<f64>,
    n_out: Option<usize>,
    n_s: Option<usize>,
    n_theta: Option<usize>,
    #[serde(rename = "R")]
    big_r: Option<f64>,
    r_max: Option<f64>,
    solve_r: Option<f64>,
    tol_eq: Option<f64>,
    mesh: Option<bool>,
    out: Option<PathBuf>,
    jobs: Option<usize>,
}

fn load_config(path: &Option<PathBuf>) -> Result<RunConfig, CmcError> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            Ok(serde_json::from_str(&text)?)
        }
    }
}

fn out_dir(flag: &Option<PathBuf>) -> PathBuf {
    flag.clone()
        .or_else(|| std::env::var_os("CMCLAB_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn exit_code_of(err: &CmcError) -> u8 {
    match err {
        CmcError::Breakdown(_) => 11,
        CmcError::Io(_) | CmcError::Json(_) | CmcError::Parse(_) => 12,
        CmcError::NoContact(_) | CmcError::NoBracket | CmcError::NoSuchCap(_) => 13,
        _ => 10,
    }
}

fn require<T: Copy>(v: Option<T>, flag: &str) -> Result<T, CmcError> {
    v.ok_or_else(|| CmcError::Parse(format!("missing required value --{flag}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Delaunay(args) => cmd_delaunay(args),
        Cmd::Freeboundary(args) => cmd_freeboundary(args),
        Cmd::Verify(args) => cmd_verify(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_of(&e))
        }
    }
}

fn cmd_delaunay(mut args: DelaunayArgs) -> Result<ExitCode, CmcError> {
    let cfg = load_config(&args.config)?;
    if let Some(v) = cfg.c {
        args.c = Some(v);
    }
    if let Some(v) = cfg.h {
        args.h = Some(v);
    }
    if let Some(v) = &cfg.u0 {
        args.u0 = Some(parse_u0_list(v)?);
    }
    if let Some(v) = cfg.a {
        args.a = v;
    }
    if let Some(v) = cfg.s_max {
        args.s_max = v;
    }
    if let Some(v) = cfg.ds {
        args.ds = v;
    }
    if let Some(v) = cfg.n_out {
        args.n_out = v;
    }
    if let Some(v) = cfg.mesh {
        args.mesh = v;
    }
    if let Some(v) = cfg.n_s {
        args.n_s = v;
    }
    if let Some(v) = cfg.n_theta {
        args.n_theta = v;
    }
    if let Some(v) = cfg.out {
        args.out = Some(v);
    }
    if let Some(v) = cfg.jobs {
        args.jobs = v;
    }

    let c = require(args.c, "c")?;
    let h = require(args.h, "H")?;
    let u0s = args
        .u0
        .clone()
        .ok_or_else(|| CmcError::Parse("missing required value --u0".into()))?;
    let dir = out_dir(&args.out);
    std::fs::create_dir_all(&dir)?;

    if u0s.len() == 1 {
        run_delaunay_once(&args, c, h, u0s[0], &dir)?;
        return Ok(ExitCode::SUCCESS);
    }
    // parameter sweep: one subdirectory per u0, parallel at the job level
    let jobs = args.jobs.max(1);
    let errors = std::sync::Mutex::new(Vec::<CmcError>::new());
    std::thread::scope(|scope| {
        for chunk in u0s.chunks(u0s.len().div_ceil(jobs)) {
            let args = &args;
            let errors = &errors;
            let dir = &dir;
            scope.spawn(move || {
                for &u0 in chunk {
                    let sub = dir.join(format!("u0_{u0}"));
                    let r = std::fs::create_dir_all(&sub)
                        .map_err(CmcError::from)
                        .and_then(|_| run_delaunay_once(args, c, h, u0, &sub));
                    if let Err(e) = r {
                        errors.lock().unwrap().push(e);
                    }
                }
            });
        }
    });
    match errors.into_inner().unwrap().into_iter().next() {
        Some(e) => Err(e),
        None => Ok(ExitCode::SUCCESS),
    }
}

fn parse_u0_list(v: &serde_json::Value) -> Result<Vec<f64>, CmcError> {
    match v {
        serde_json::Value::Number(n) => Ok(vec![n.as_f64().unwrap()]),
        serde_json::Value::Array(xs) => xs
            .iter()
            .map(|x| {
                x.as_f64()
                    .ok_or_else(|| CmcError::Parse("u0 entries must be numbers".into()))
            })
            .collect(),
        _ => Err(CmcError::Parse("u0 must be a number or an array".into())),
    }
}

fn run_delaunay_once(args: &DelaunayArgs, c: f64, h: f64, u0: f64, dir: &Path) -> Result<(), CmcError> {
    let mut params = delaunay::make_params(c, h, u0)?;
    params.a = args.a;
    let dense = delaunay::u_numeric_dense(&params, args.s_max, args.ds)?;
    // resample the numeric solution on the export grid
    let n = args.n_out.max(2);
    let mut sol = delaunay::USolution {
        params,
        s_grid: Vec::with_capacity(n),
        u: Vec::with_capacity(n),
        uprime: Vec::with_capacity(n),
        source: delaunay::SolutionSource::Numeric,
    };
    for i in 0..n {
        let s = args.s_max * i as f64 / (n - 1) as f64;
        let (u, up) = dense.eval(s);
        sol.s_grid.push(s);
        sol.u.push(u);
        sol.uprime.push(up);
    }
    export::write_json(&dir.join("usolution.json"), &sol)?;
    export::write_string(&dir.join("usolution.csv"), &export::usolution_csv(&sol))?;

    if args.mesh {
        let sf = SpaceForm::new(c);
        let a = args.a;
        let lam = move |s: f64| h + a as f64 / delaunay::u_closed(&params, s).unwrap();
        let mu = move |s: f64| h - a as f64 / delaunay::u_closed(&params, s).unwrap();
        let prof = reconstruct_meridian(&sf, lam, mu, args.s_max, args.ds)?;
        let surf = RotationSurface::new(prof, 0.0, args.s_max);
        let m = mesh(&surf, args.n_s.max(2), args.n_theta.max(3));
        export::write_obj(&dir.join("mesh.obj"), &m, &sf)?;
    }
    Ok(())
}

fn cmd_freeboundary(mut args: FreeboundaryArgs) -> Result<ExitCode, CmcError> {
    if let Some(FreeboundarySub::Cap(cap)) = args.cap.clone() {
        return cmd_cap(cap);
    }
    let cfg = load_config(&args.config)?;
    if let Some(v) = cfg.c {
        args.c = Some(v);
    }
    if let Some(v) = cfg.h {
        args.h = Some(v);
    }
    if let Some(v) = &cfg.u0 {
        args.u0 = parse_u0_list(v)?.first().copied();
    }
    if let Some(v) = cfg.a {
        args.a = v;
    }
    if let Some(v) = cfg.ds {
        args.ds = v;
    }
    if let Some(v) = cfg.s_max {
        args.s_max = v;
    }
    if let Some(v) = cfg.r_max {
        args.r_max = Some(v);
    }
    if let Some(v) = cfg.solve_r {
        args.solve_r = Some(v);
    }
    if let Some(v) = cfg.n_s {
        args.n_s = v;
    }
    if let Some(v) = cfg.n_theta {
        args.n_theta = v;
    }
    if let Some(v) = cfg.tol_eq {
        args.tol_eq = v;
    }
    if let Some(v) = cfg.out {
        args.out = Some(v);
    }

    let c = require(args.c, "c")?;
    let h = require(args.h, "H")?;
    let sf = SpaceForm::new(c);
    let dir = out_dir(&args.out);
    std::fs::create_dir_all(&dir)?;
    let shoot_cfg = ShootConfig {
        ds: args.ds,
        s_max: args.s_max,
        contact_index: args.contact_index,
    };

    let piece = if let Some(target) = args.solve_r {
        let sol = solve_for_r(&sf, h, args.a, target, 0.05, 20.0, 40, &shoot_cfg)?;
        export::write_json(&dir.join("solve_r.json"), &sol)?;
        shoot(&sf, h, sol.u0, args.a, &shoot_cfg)?
    } else {
        let u0 = require(args.u0, "u0")?;
        if args.all_contacts {
            let pieces =
                cmc::freeboundary::shoot_contacts(&sf, h, u0, args.a, &shoot_cfg, usize::MAX)?;
            let radii: Vec<f64> = pieces.iter().map(|p| p.big_r).collect();
            export::write_json(&dir.join("contacts.json"), &radii)?;
            pieces
                .into_iter()
                .nth(args.contact_index)
                .ok_or(CmcError::NoContact(args.s_max))?
        } else {
            shoot(&sf, h, u0, args.a, &shoot_cfg)?
        }
    };
    if let Some(r_max) = args.r_max {
        if piece.big_r > r_max {
            return Err(CmcError::OutOfDomain(format!(
                "contact radius R = {} exceeds --R-max {r_max}",
                piece.big_r
            )));
        }
    }
    write_piece_bundle(&piece, &dir, args.n_s, args.n_theta, args.tol_eq)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_cap(mut args: CapArgs) -> Result<ExitCode, CmcError> {
    let cfg = load_config(&args.config)?;
    if let Some(v) = cfg.c {
        args.c = Some(v);
    }
    if let Some(v) = cfg.h {
        args.h = Some(v);
    }
    if let Some(v) = cfg.big_r {
        args.big_r = Some(v);
    }
    if let Some(v) = cfg.n_s {
        args.n_s = v;
    }
    if let Some(v) = cfg.n_theta {
        args.n_theta = v;
    }
    if let Some(v) = cfg.tol_eq {
        args.tol_eq = v;
    }
    if let Some(v) = cfg.out {
        args.out = Some(v);
    }
    let c = require(args.c, "c")?;
    let h = require(args.h, "H")?;
    let big_r = require(args.big_r, "R")?;
    let sf = SpaceForm::new(c);
    let dir = out_dir(&args.out);
    std::fs::create_dir_all(&dir)?;
    let piece = spherical_cap(&sf, h, big_r)?;
    write_piece_bundle(&piece, &dir, args.n_s, args.n_theta, args.tol_eq)?;
    Ok(ExitCode::SUCCESS)
}

fn write_piece_bundle(
    piece: &FreeBoundaryPiece,
    dir: &Path,
    n_s: usize,
    n_theta: usize,
    tol_eq: f64,
) -> Result<(), CmcError> {
    let sf = piece.sf;
    let kappa = boundary_geodesic_curvature(piece, 8);
    let audit = gauss_bonnet_audit(piece, 2000);
    let report = export::piece_report(piece, &kappa, &audit);
    export::write_json(&dir.join("piece.json"), &report)?;

    let surf = piece.surface();
    let n_s = n_s.max(2) | 1; // odd grid keeps the symmetry circle sampled
    let samples = sample(&surf, &piece.center, n_s, n_theta.max(3))?;
    export::write_string(&dir.join("samples.csv"), &export::samples_csv(&samples))?;

    let tols = Tolerances {
        tol_eq,
        ..Default::default()
    };
    let pinch = build_report(&samples, &sf, n_s, n_theta.max(3), tols, piece.topology())?;
    export::write_json(
        &dir.join("pinch.json"),
        &export::pinch_report_json(&pinch, sf.curvature(), piece.h),
    )?;

    let m = mesh(&surf, n_s, n_theta.max(3));
    export::write_obj(&dir.join("mesh.obj"), &m, &sf)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct Checker {
    failures: usize,
    checks: usize,
}

impl Checker {
    fn new() -> Self {
        Checker {
            failures: 0,
            checks: 0,
        }
    }

    fn check(&mut self, name: &str, measured: f64, tol: f64) {
        self.checks += 1;
        if measured.is_finite() && measured <= tol {
            println!("PASS {name}: measured {measured:.3e} (tol {tol:.1e})");
        } else {
            self.failures += 1;
            println!("FAIL {name}: measured {measured:.3e} (tol {tol:.1e})");
        }
    }

    fn check_bool(&mut self, name: &str, ok: bool, detail: &str) {
        self.checks += 1;
        if ok {
            println!("PASS {name}: {detail}");
        } else {
            self.failures += 1;
            println!("FAIL {name}: {detail}");
        }
    }
}

fn parse_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), CmcError> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| CmcError::Parse(format!("{}: empty file", path.display())))?
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Result<Vec<f64>, _> = line
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|e| CmcError::Parse(format!("{} line {}: {e}", path.display(), i + 2)))
            })
            .collect();
        rows.push(row?);
    }
    Ok((header, rows))
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, CmcError> {
    let dir = &args.dir;
    if !dir.is_dir() {
        return Err(CmcError::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("{} is not a directory", dir.display()),
        )));
    }
    let mut ck = Checker::new();

    let usol_json = dir.join("usolution.json");
    if usol_json.exists() {
        let sol: delaunay::USolution = serde_json::from_str(&std::fs::read_to_string(&usol_json)?)?;
        verify_usolution(&mut ck, dir, &sol)?;
    }

    let piece_json = dir.join("piece.json");
    if piece_json.exists() {
        let report: export::PieceReport =
            serde_json::from_str(&std::fs::read_to_string(&piece_json)?)?;
        verify_piece(&mut ck, dir, &report)?;
    }

    if ck.checks == 0 {
        return Err(CmcError::Parse(format!(
            "no verifiable artifacts found in {}",
            dir.display()
        )));
    }
    if ck.failures == 0 {
        println!("verify: {} checks passed", ck.checks);
        Ok(ExitCode::SUCCESS)
    } else {
        println!("verify: {} of {} checks failed", ck.failures, ck.checks);
        Ok(ExitCode::from(20))
    }
}

fn verify_usolution(ck: &mut Checker, dir: &Path, sol: &delaunay::USolution) -> Result<(), CmcError> {
    let p = &sol.params;
    // the stored constant must satisfy its defining algebraic relation
    let alg = (p.q() * p.u0 * p.u0 - (p.big_c - 2.0 * p.h) * p.u0 + 1.0).abs();
    ck.check("usolution.params.algebraic_relation", alg, 1e-10);
    ck.check(
        "usolution.params.discriminant_nonnegative",
        -p.discriminant(),
        1e-10,
    );

    let (header, rows) = parse_csv(&dir.join("usolution.csv"))?;
    ck.check_bool(
        "usolution.csv.header",
        header == ["s", "u", "uprime", "lambda", "mu", "residual"],
        &format!("{header:?}"),
    );
    let mut worst_res = 0.0f64;
    let mut worst_stored = 0.0f64;
    let mut worst_cmc = 0.0f64;
    for row in &rows {
        let (s, u, up, lam, mu, stored) = (row[0], row[1], row[2], row[3], row[4], row[5]);
        let _ = s;
        let res = first_integral_residual(u, up, p);
        worst_res = worst_res.max(res.abs());
        worst_stored = worst_stored.max((res - stored).abs());
        worst_cmc = worst_cmc.max((lam + mu - 2.0 * p.h).abs());
    }
    ck.check("usolution.first_integral", worst_res, 1e-8);
    ck.check("usolution.residual_column_reproduced", worst_stored, 1e-12);
    ck.check("usolution.cmc_contract", worst_cmc, 1e-10);
    Ok(())
}

fn verify_piece(ck: &mut Checker, dir: &Path, report: &export::PieceReport) -> Result<(), CmcError> {
    ck.check("piece.residual_r", report.residuals[0], 1e-8);
    ck.check("piece.residual_orthogonality", report.residuals[1], 1e-8);
    ck.check_bool(
        "piece.kappa_g_positive",
        report.kappa_g > 1e-6,
        &format!("kappa_g = {}", report.kappa_g),
    );
    ck.check("piece.gauss_bonnet_defect", report.gauss_bonnet.defect.abs(), 1e-3);
    let sf = SpaceForm::new(report.c);
    ck.check_bool(
        "piece.ball_radius_in_domain",
        report.big_r < sf.max_r(),
        &format!("R = {}, bound {}", report.big_r, sf.max_r()),
    );

    let samples_csv = dir.join("samples.csv");
    if samples_csv.exists() {
        let (header, rows) = parse_csv(&samples_csv)?;
        ck.check_bool(
            "samples.csv.header",
            header
                == [
                    "s", "theta", "r", "lambda1", "lambda2", "H", "phi_sq", "K", "grad_nu_f"
                ],
            &format!("{header:?}"),
        );
        let mut worst_det = 0.0f64;
        let mut worst_phi = 0.0f64;
        let mut worst_k = 0.0f64;
        let mut worst_cmc = 0.0f64;
        let mut worst_domain = 0.0f64;
        let mut min_margin = f64::INFINITY;
        let mut all_umb = true;
        let mut any_umb = false;
        for row in &rows {
            let (r, l1, l2, h, phi_sq, k, g) =
                (row[2], row[3], row[4], row[5], row[6], row[7], row[8]);
            let (_, _, f2) = sf.f_eval(r)?;
            let det = (f2 + l1 * g) * (f2 + l2 * g);
            let ident = (f2 + h * g).powi(2) - 0.5 * phi_sq * g * g;
            worst_det = worst_det.max((det - ident).abs());
            worst_phi = worst_phi.max((phi_sq - ((l1 - h).powi(2) + (l2 - h).powi(2))).abs());
            worst_k = worst_k.max((k - (report.c + l1 * l2)).abs());
            worst_cmc = worst_cmc.max((l1 + l2 - 2.0 * h).abs());
            worst_domain = worst_domain.max(r - report.big_r);
            min_margin = min_margin.min((f2 + h * g).powi(2) - 0.5 * phi_sq * g * g);
            if phi_sq <= 1e-8 {
                any_umb = true;
            } else {
                all_umb = false;
            }
        }
        ck.check("samples.determinant_identity", worst_det, 1e-10);
        ck.check("samples.phi_sq_identity", worst_phi, 1e-12);
        ck.check("samples.gauss_equation", worst_k, 1e-10);
        ck.check("samples.cmc_contract", worst_cmc, 1e-8);
        ck.check("samples.contained_in_ball", worst_domain, 1e-8);

        let pinch_json = dir.join("pinch.json");
        if pinch_json.exists() {
            let pinch: export::PinchReportJson =
                serde_json::from_str(&std::fs::read_to_string(&pinch_json)?)?;
            ck.check(
                "pinch.min_margin_reproduced",
                (pinch.min_margin - min_margin).abs(),
                1e-12,
            );
            let umb = if all_umb {
                "total"
            } else if any_umb {
                "isolated"
            } else {
                "none"
            };
            ck.check_bool(
                "pinch.umbilic_status",
                pinch.umbilic == umb,
                &format!("stored {}, recomputed {}", pinch.umbilic, umb),
            );
            let verdict_ok = match pinch.verdict.as_str() {
                "HypothesisViolated" => min_margin < -pinch.params.tol_eq,
                "SphericalCapConsistent" => {
                    min_margin >= -pinch.params.tol_eq && report.kind == "cap"
                }
                "DelaunayConsistent" => {
                    min_margin >= -pinch.params.tol_eq && report.kind == "annulus"
                }
                "Inconclusive" => true,
                _ => false,
            };
            ck.check_bool(
                "pinch.verdict_consistent",
                verdict_ok,
                &format!("verdict {}, min margin {min_margin:.3e}", pinch.verdict),
            );
        }
    }
    Ok(())
}
