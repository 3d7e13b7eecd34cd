//! Command-line surface: `selfcheck`, `classic`, `solve`, `sweep`.
//!
//! Exit codes: 0 success, 1 selfcheck failure, 2 solver failure,
//! 3 invalid or inadmissible parameters.

mod config;
mod svg;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use config::{tag, FileConfig};
use pointnls::{
    continue_sweep, mass_curve, selfcheck, solve_classic, solve_ground, Error as CoreError,
    GroundState, RadialGrid,
};

#[derive(Parser)]
#[command(name = "pointnls", version, about = "Ground states of the 2D NLS with a point interaction")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the analytic identity suite and print one PASS/FAIL line per check.
    Selfcheck {
        /// Grid nodes for the quadrature identities (default 524288).
        #[arg(long = "grid-n")]
        grid_n: Option<usize>,
        /// Truncation radius.
        #[arg(long = "grid-r")]
        grid_r: Option<f64>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Test hook: multiply K0 by (1 + eps) inside the oracle comparison.
        #[arg(long = "perturb-k0", hide = true, default_value_t = 0.0)]
        perturb_k0: f64,
    },
    /// Solve the classical limit profile for one nonlinearity power.
    Classic {
        #[arg(long)]
        p: Option<f64>,
        #[arg(long = "grid-n")]
        grid_n: Option<usize>,
        #[arg(long = "grid-r")]
        grid_r: Option<f64>,
        #[arg(long = "out-dir")]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Solve the interacting ground state at a single frequency.
    Solve {
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long = "grid-n")]
        grid_n: Option<usize>,
        #[arg(long = "grid-r")]
        grid_r: Option<f64>,
        #[arg(long = "out-dir")]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Continuation sweep over a log-spaced frequency range plus stability
    /// classification.
    Sweep {
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long = "omega-min")]
        omega_min: Option<f64>,
        #[arg(long = "omega-max")]
        omega_max: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long = "grid-n")]
        grid_n: Option<usize>,
        #[arg(long = "grid-r")]
        grid_r: Option<f64>,
        #[arg(long = "out-dir")]
        out_dir: Option<PathBuf>,
        #[arg(long = "emit-svg")]
        emit_svg: bool,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

const EXIT_SELFCHECK: u8 = 1;
const EXIT_SOLVER: u8 = 2;
const EXIT_INVALID: u8 = 3;

fn solver_exit(e: &CoreError) -> u8 {
    match e {
        CoreError::BetaTooSmall { .. }
        | CoreError::Domain(_)
        | CoreError::Invalid(_)
        | CoreError::Grid(_) => EXIT_INVALID,
        _ => EXIT_SOLVER,
    }
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_INVALID,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.cmd {
        Cmd::Selfcheck { grid_n, grid_r, config, perturb_k0 } => {
            cmd_selfcheck(grid_n, grid_r, config, perturb_k0)
        }
        Cmd::Classic { p, grid_n, grid_r, out_dir, config } => {
            cmd_classic(p, grid_n, grid_r, out_dir, config)
        }
        Cmd::Solve { alpha, p, omega, grid_n, grid_r, out_dir, config } => {
            cmd_solve(alpha, p, omega, grid_n, grid_r, out_dir, config)
        }
        Cmd::Sweep {
            alpha,
            p,
            omega_min,
            omega_max,
            points,
            grid_n,
            grid_r,
            out_dir,
            emit_svg,
            config,
        } => cmd_sweep(
            alpha, p, omega_min, omega_max, points, grid_n, grid_r, out_dir, emit_svg, config,
        ),
    }
}

struct Common {
    alpha: f64,
    grid_n: usize,
    grid_r: f64,
    out_dir: PathBuf,
}

fn merge_common(
    file: &FileConfig,
    alpha: Option<f64>,
    grid_n: Option<usize>,
    grid_r: Option<f64>,
    out_dir: Option<PathBuf>,
) -> anyhow::Result<Common> {
    Ok(Common {
        alpha: file.merge_f64(alpha, "alpha")?.unwrap_or(0.0),
        grid_n: file.merge_usize(grid_n, "grid-n")?.unwrap_or(4096),
        grid_r: file.merge_f64(grid_r, "grid-r")?.unwrap_or(40.0),
        out_dir: file.merge_path(out_dir, "out-dir").unwrap_or_else(|| PathBuf::from(".")),
    })
}

fn cmd_selfcheck(
    grid_n: Option<usize>,
    grid_r: Option<f64>,
    config: Option<PathBuf>,
    perturb_k0: f64,
) -> ExitCode {
    let file = match FileConfig::load(config.as_deref()) {
        Ok(f) => f,
        Err(e) => return fail(EXIT_INVALID, e),
    };
    let n = match file.merge_usize(grid_n, "grid-n") {
        Ok(v) => v.unwrap_or(selfcheck::DEFAULT_N),
        Err(e) => return fail(EXIT_INVALID, e),
    };
    let r = match file.merge_f64(grid_r, "grid-r") {
        Ok(v) => v.unwrap_or(selfcheck::DEFAULT_R),
        Err(e) => return fail(EXIT_INVALID, e),
    };
    let lines = match selfcheck::run_suite(n, r, perturb_k0) {
        Ok(l) => l,
        Err(e) => return fail(EXIT_INVALID, e),
    };
    let mut all_pass = true;
    println!("identity suite (n = {n}, r_max = {r}):");
    for l in &lines {
        all_pass &= l.pass;
        println!(
            "  {}  {:<38} error = {:.3e}  (tol {:.1e})",
            if l.pass { "PASS" } else { "FAIL" },
            l.name,
            l.error,
            l.tol
        );
    }
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_SELFCHECK)
    }
}

fn cmd_classic(
    p: Option<f64>,
    grid_n: Option<usize>,
    grid_r: Option<f64>,
    out_dir: Option<PathBuf>,
    config: Option<PathBuf>,
) -> ExitCode {
    let file = match FileConfig::load(config.as_deref()) {
        Ok(f) => f,
        Err(e) => return fail(EXIT_INVALID, e),
    };
    let common = match merge_common(&file, None, grid_n, grid_r, out_dir) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_INVALID, e),
    };
    let p = match file.merge_f64(p, "p") {
        Ok(Some(p)) => p,
        Ok(None) => return fail(EXIT_INVALID, "--p is required"),
        Err(e) => return fail(EXIT_INVALID, e),
    };
    let grid = match RadialGrid::new(common.grid_n, common.grid_r) {
        Ok(g) => g,
        Err(e) => return fail(EXIT_INVALID, e),
    };
    let cp = match solve_classic(p, &grid) {
        Ok(cp) => cp,
        Err(e) => return fail(solver_exit(&e), e),
    };
    let base = format!("classic_p{}", tag(p));
    if let Err(e) = write_files(&common.out_dir, &base, |w| cp.write_profile_csv(w), &cp.to_json_string()) {
        return fail(EXIT_SOLVER, e);
    }
    println!(
        "classic p = {p}: u0 = {:.8}, mass = {:.8}, action_infty = {:.8}",
        cp.u0, cp.mass, cp.action_infty
    );
    println!("wrote {base}.csv and {base}.json in {}", common.out_dir.display());
    ExitCode::SUCCESS
}

/// Write `<base>.csv` and `<base>.json`; extensions are appended rather than
/// substituted because the base name may carry dotted parameter tags.
fn write_files<F>(dir: &std::path::Path, base: &str, csv: F, json: &str) -> std::io::Result<()>
where
    F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
{
    fs::create_dir_all(dir)?;
    let mut buf = Vec::new();
    csv(&mut buf)?;
    fs::write(dir.join(format!("{base}.csv")), buf)?;
    fs::write(dir.join(format!("{base}.json")), json)?;
    Ok(())
}

fn cmd_solve(
    alpha: Option<f64>,
    p: Option<f64>,
    omega: Option<f64>,
    grid_n: Option<usize>,
    grid_r: Option<f64>,
    out_dir: Option<PathBuf>,
    config: Option<PathBuf>,
) -> ExitCode {
    let file = match FileConfig::load(config.as_deref()) {
        Ok(f) => f,
        Err(e) => return fail(EXIT_INVALID, e),
    };
    let common = match merge_common(&file, alpha, grid_n, grid_r, out_dir) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_INVALID, e),
    };
    let p = match file.merge_f64(p, "p") {
        Ok(Some(p)) => p,
        Ok(None) => return fail(EXIT_INVALID, "--p is required"),
        Err(e) => return fail(EXIT_INVALID, e),
    };
    let omega = match file.merge_f64(omega, "omega") {
        Ok(Some(w)) => w,
        Ok(None) => return fail(EXIT_INVALID, "--omega is required"),
        Err(e) => return fail(EXIT_INVALID, e),
    };
    let grid = match RadialGrid::new(common.grid_n, common.grid_r) {
        Ok(g) => g,
        Err(e) => return fail(EXIT_INVALID, e),
    };
    let gs = match solve_ground(common.alpha, p, omega, &grid, None) {
        Ok(gs) => gs,
        Err(e) => return fail(solver_exit(&e), e),
    };
    let base = format!("ground_a{}_p{}_w{}", tag(common.alpha), tag(p), tag(omega));
    if let Err(e) =
        write_files(&common.out_dir, &base, |w| gs.profile.write_profile_csv(w), &gs.to_json_string())
    {
        return fail(EXIT_SOLVER, e);
    }
    println!(
        "ground state alpha = {}, p = {p}, omega = {omega}: action = {:.8}, mass = {:.8}, \
         nehari = {:.2e}, pohozaev = {:.2e}, iters = {}",
        common.alpha, gs.action, gs.mass_physical, gs.nehari_residual, gs.pohozaev_residual,
        gs.newton_iters
    );
    println!("wrote {base}.csv and {base}.json in {}", common.out_dir.display());
    ExitCode::SUCCESS
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    alpha: Option<f64>,
    p: Option<f64>,
    omega_min: Option<f64>,
    omega_max: Option<f64>,
    points: Option<usize>,
    grid_n: Option<usize>,
    grid_r: Option<f64>,
    out_dir: Option<PathBuf>,
    emit_svg: bool,
    config: Option<PathBuf>,
) -> ExitCode {
    let file = match FileConfig::load(config.as_deref()) {
        Ok(f) => f,
        Err(e) => return fail(EXIT_INVALID, e),
    };
    let common = match merge_common(&file, alpha, grid_n, grid_r, out_dir) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_INVALID, e),
    };
    let emit_svg = file.merge_bool(emit_svg, "emit-svg");
    let p = match file.merge_f64(p, "p") {
        Ok(Some(p)) => p,
        Ok(None) => return fail(EXIT_INVALID, "--p is required"),
        Err(e) => return fail(EXIT_INVALID, e),
    };
    let (omega_min, omega_max) = match (
        file.merge_f64(omega_min, "omega-min"),
        file.merge_f64(omega_max, "omega-max"),
    ) {
        (Ok(Some(a)), Ok(Some(b))) => (a, b),
        (Ok(_), Ok(_)) => return fail(EXIT_INVALID, "--omega-min and --omega-max are required"),
        (Err(e), _) | (_, Err(e)) => return fail(EXIT_INVALID, e),
    };
    let points = match file.merge_usize(points, "points") {
        Ok(Some(n)) => n,
        Ok(None) => return fail(EXIT_INVALID, "--points is required"),
        Err(e) => return fail(EXIT_INVALID, e),
    };
    if points < 3 {
        return fail(EXIT_INVALID, "sweep needs at least 3 points");
    }
    if !(omega_min > 0.0 && omega_max > omega_min) {
        return fail(EXIT_INVALID, "need 0 < omega-min < omega-max");
    }
    let grid = match RadialGrid::new(common.grid_n, common.grid_r) {
        Ok(g) => g,
        Err(e) => return fail(EXIT_INVALID, e),
    };
    let ratio = omega_max / omega_min;
    let omegas: Vec<f64> = (0..points)
        .map(|i| omega_min * ratio.powf(i as f64 / (points - 1) as f64))
        .collect();

    let sweep = match continue_sweep(common.alpha, p, &omegas, &grid) {
        Ok(s) => s,
        Err(e) => return fail(solver_exit(&e), e),
    };
    let converged: Vec<&GroundState> = sweep.iter().filter_map(|pt| pt.state.as_ref().ok()).collect();
    let n_failed = sweep.len() - converged.len();
    if converged.len() < 3 {
        return fail(
            EXIT_SOLVER,
            format!("only {} of {} frequencies converged", converged.len(), sweep.len()),
        );
    }
    let owned: Vec<GroundState> = converged.iter().map(|gs| (*gs).clone()).collect();
    let curve = match mass_curve(&owned) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_SOLVER, e),
    };

    // merged CSV: converged rows from the curve, failed rows annotated
    let base = format!("masscurve_a{}_p{}", tag(common.alpha), tag(p));
    if let Err(e) = fs::create_dir_all(&common.out_dir) {
        return fail(EXIT_SOLVER, e);
    }
    let mut csv = String::from(
        "omega,beta,mass,mass_rescaled,f0,action,dmass,dmass_asymptotic,classification\n",
    );
    let mut row = 0usize;
    let ff = pointnls::radial::fmt_float;
    for pt in &sweep {
        match &pt.state {
            Ok(_) => {
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    ff(curve.omegas[row]),
                    ff(curve.beta[row]),
                    ff(curve.mass[row]),
                    ff(curve.mass_rescaled[row]),
                    ff(curve.f0[row]),
                    ff(curve.action[row]),
                    ff(curve.dmass[row]),
                    ff(curve.dmass_asymptotic[row]),
                    curve.classification[row]
                ));
                row += 1;
            }
            Err(_) => {
                csv.push_str(&format!(
                    "{},nan,nan,nan,nan,nan,nan,nan,failed\n",
                    ff(pt.omega)
                ));
            }
        }
    }
    if let Err(e) = fs::write(common.out_dir.join(format!("{base}.csv")), csv) {
        return fail(EXIT_SOLVER, e);
    }

    // per-point JSON diagnostics
    for pt in &sweep {
        if let Ok(gs) = &pt.state {
            let jb = common.out_dir.join(format!(
                "ground_a{}_p{}_w{}.json",
                tag(common.alpha),
                tag(p),
                tag(pt.omega)
            ));
            if let Err(e) = fs::write(jb, gs.to_json_string()) {
                return fail(EXIT_SOLVER, e);
            }
        }
    }

    if emit_svg {
        if let Err(e) =
            fs::write(common.out_dir.join(format!("{base}.svg")), svg::mass_curve_svg(&curve))
        {
            return fail(EXIT_SOLVER, e);
        }
    }

    let n_st = curve.classification.iter().filter(|c| **c == pointnls::StabilityClass::Stable).count();
    let n_un = curve.classification.iter().filter(|c| **c == pointnls::StabilityClass::Unstable).count();
    let n_in = curve.classification.len() - n_st - n_un;
    println!(
        "sweep alpha = {}, p = {p}, omega in [{omega_min}, {omega_max}], {} points \
         ({} stable, {} unstable, {} inconclusive, {} failed)",
        common.alpha,
        points,
        n_st,
        n_un,
        n_in,
        n_failed
    );
    let intervals = curve.sign_change_intervals();
    if intervals.is_empty() {
        println!("dmass sign changes: none");
    } else {
        for (a, b) in &intervals {
            println!("dmass sign change in omega interval ({a:.6}, {b:.6})");
        }
    }
    println!("wrote {base}.csv in {}", common.out_dir.display());
    ExitCode::SUCCESS
}
