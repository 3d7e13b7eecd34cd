//! Ground-state solvers in the rescaled frame.
//!
//! The classical limit profile solves `-Δu + u = u^p` (shooting plus a
//! Newton polish). The interacting problem keeps the regular part `f` as the
//! unknown: the total field is `φ = f + (E(f)/β) G₁` where `E` is a linear
//! functional recovering `f(0)`, and Newton iterates on
//!
//! ```text
//!     F(f) = (-Δ+1) f - max(φ, 0)^p = 0.
//! ```
//!
//! `E` is taken as the discrete duality functional `E(f) = ⟨f, (-Δ+1) G₁⟩_w`
//! rather than a pointwise extrapolation: with that choice the discrete
//! Nehari identity `K̃(φ) = 0` and the action rewrite
//! `S̃ = (p-1)/(2(p+1))·‖φ‖_{p+1}^{p+1}` hold exactly at the Newton fixed
//! point, so both become solver diagnostics with no discretization floor.
//! The Jacobian is tridiagonal plus the rank-one coupling `(D g₁/β) ⊗ E`,
//! solved by elimination with a Sherman–Morrison correction.

use std::io::Write as IoWrite;

use crate::error::{Error, Result};
use crate::pointop::{GreenRef, OperatorParams};
use crate::radial::{fmt_float, RadialField, RadialGrid};
use crate::tridiag::TridiagLu;
use crate::BETA_GUARD;

use std::f64::consts::PI;

const MAX_NEWTON_ITERS: usize = 50;
const MAX_HALVINGS: usize = 8;
const NEWTON_TOL: f64 = 1e-10;
/// Residual level at which a stagnating classic polish is accepted; the
/// sup-norm floor of the assembled residual grows like `ε·‖f‖/h²`, which
/// overtakes `NEWTON_TOL` on grids finer than n ≈ 16000 at R = 40.
const STAGNATION_TOL: f64 = 1e-8;

/// A ground-state candidate in the rescaled frame.
#[derive(Debug, Clone)]
pub struct Profile {
    pub grid: RadialGrid,
    /// Regular part `f̃` at the nodes.
    pub f: RadialField,
    /// Coupling-functional value, the discrete `f̃(0)`.
    pub f0: f64,
    /// `β_α(ω) = β_α̃(1)`.
    pub beta: f64,
    /// Singular coefficient `c = f0/β`.
    pub c: f64,
    pub omega: f64,
    pub p: f64,
    pub alpha: f64,
}

/// Converged profile with solver diagnostics.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub profile: Profile,
    pub action: f64,
    pub nehari_residual: f64,
    pub pohozaev_residual: f64,
    pub mass_rescaled: f64,
    pub mass_physical: f64,
    pub energy: f64,
    pub newton_iters: usize,
    pub converged: bool,
}

/// Positive radial ground state of the limiting equation `-Δu + u = u^p`.
#[derive(Debug, Clone)]
pub struct ClassicProfile {
    pub grid: RadialGrid,
    pub u: RadialField,
    /// Shooting parameter `u(0)`.
    pub u0: f64,
    /// `d̃(∞)`, the action of the limit profile.
    pub action_infty: f64,
    pub mass: f64,
}

/// One frequency of a continuation sweep.
#[derive(Debug)]
pub struct SweepPoint {
    pub omega: f64,
    pub state: Result<GroundState>,
}

/// Precomputed per-grid data for the interacting solver.
struct GroundCtx {
    g1: Vec<f64>,
    /// Duality coupling functional: `evec·f = ⟨f, (-Δ+1)G₁⟩_w ≈ f(0)`.
    evec: Vec<f64>,
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
}

impl GroundCtx {
    fn new(grid: &RadialGrid) -> Result<Self> {
        let g1 = GreenRef::new(1.0)?.sample(grid)?.values;
        let ag1 = grid.apply_helmholtz_raw(1.0, &g1);
        let evec: Vec<f64> = ag1.iter().zip(grid.weights()).map(|(a, w)| a * w).collect();
        let (lower, diag, upper) = grid.helmholtz_coeffs(1.0);
        Ok(Self { g1, evec, lower, diag, upper })
    }

    fn apply_a(&self, grid: &RadialGrid, f: &[f64]) -> Vec<f64> {
        grid.apply_helmholtz_raw(1.0, f)
    }

    fn coupling(&self, f: &[f64]) -> f64 {
        dot(&self.evec, f)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn clamped_power(phi: f64, p: f64) -> f64 {
    if phi > 0.0 {
        phi.powf(p)
    } else {
        0.0
    }
}

/// Newton residual `F(f) = A f - max(φ,0)^p` and the sup norm bookkeeping.
fn newton_residual(ctx: &GroundCtx, grid: &RadialGrid, beta: f64, p: f64, f: &[f64]) -> (Vec<f64>, f64) {
    let c = ctx.coupling(f) / beta;
    let mut af = ctx.apply_a(grid, f);
    for i in 0..f.len() {
        let phi = f[i] + c * ctx.g1[i];
        af[i] -= clamped_power(phi, p);
    }
    (af, c)
}

struct NewtonOutcome {
    f: Vec<f64>,
    iters: usize,
    converged: bool,
}

/// Damped Newton iteration on the regular part. `beta = +∞` (passed as
/// `None`) freezes the singular coefficient at zero for the classic polish.
fn newton_iterate(
    grid: &RadialGrid,
    ctx: &GroundCtx,
    beta: Option<f64>,
    p: f64,
    seed: Vec<f64>,
    accept_stagnation: bool,
) -> Result<NewtonOutcome> {
    let n = grid.n();
    let beta_val = beta.unwrap_or(f64::INFINITY);
    let mut f = seed;
    let mut residual = f64::INFINITY;
    for iter in 0..MAX_NEWTON_ITERS {
        let (fres, c) = newton_residual(ctx, grid, beta_val, p, &f);
        residual = sup_norm(&fres);
        if residual <= NEWTON_TOL * (1.0 + sup_norm(&f)) {
            return Ok(NewtonOutcome { f, iters: iter, converged: true });
        }

        // J = (A - D) - (1/β) (D g₁) ⊗ evec, D = diag(p·max(φ,0)^{p-1})
        let mut diag = ctx.diag.clone();
        let mut dg1 = vec![0.0; n];
        for i in 0..n {
            let phi = f[i] + c * ctx.g1[i];
            let d = p * clamped_power(phi, p - 1.0);
            diag[i] -= d;
            dg1[i] = d * ctx.g1[i];
        }
        let lu = TridiagLu::factor(&ctx.lower, &diag, &ctx.upper)
            .ok_or_else(|| Error::Degenerate("singular Newton Jacobian".into()))?;
        let neg_f: Vec<f64> = fres.iter().map(|v| -v).collect();
        let t1 = lu.solve(&neg_f);
        let delta = if beta_val.is_finite() {
            let u: Vec<f64> = dg1.iter().map(|v| v / beta_val).collect();
            let t2 = lu.solve(&u);
            let denom = 1.0 - dot(&ctx.evec, &t2);
            if denom.abs() < 1e-14 {
                return Err(Error::Degenerate("rank-one correction singular".into()));
            }
            let scale = dot(&ctx.evec, &t1) / denom;
            t1.iter().zip(&t2).map(|(a, b)| a + scale * b).collect::<Vec<f64>>()
        } else {
            t1
        };

        // step halving until the sup residual decreases
        let mut lam = 1.0;
        let mut improved = false;
        let mut fnew = f.clone();
        for _ in 0..=MAX_HALVINGS {
            for i in 0..n {
                fnew[i] = f[i] + lam * delta[i];
            }
            let (fres_new, _) = newton_residual(ctx, grid, beta_val, p, &fnew);
            if sup_norm(&fres_new) < residual {
                improved = true;
                break;
            }
            lam *= 0.5;
        }
        if !improved && accept_stagnation && residual <= STAGNATION_TOL * (1.0 + sup_norm(&f)) {
            return Ok(NewtonOutcome { f, iters: iter, converged: true });
        }
        f = fnew;
    }
    Err(Error::NoConvergence { iters: MAX_NEWTON_ITERS, residual })
}

/// Shooting classification for one central value.
enum Shot {
    Overshoot,
    Undershoot,
    /// Reached `r_max` with `u > 0` and `u' < 0` throughout.
    Decayed,
}

fn shoot(p: f64, grid: &RadialGrid, u0: f64, record: Option<&mut Vec<f64>>) -> Shot {
    let h = grid.h();
    let a = (u0 - u0.powf(p)) / 4.0;
    let odd_pow = |x: f64| x.signum() * x.abs().powf(p);
    let rk4 = |rr: f64, u: f64, up: f64, hh: f64| -> (f64, f64) {
        let rhs = |rr: f64, u: f64, up: f64| (up, -up / rr + u - odd_pow(u));
        let (k1u, k1p) = rhs(rr, u, up);
        let (k2u, k2p) = rhs(rr + 0.5 * hh, u + 0.5 * hh * k1u, up + 0.5 * hh * k1p);
        let (k3u, k3p) = rhs(rr + 0.5 * hh, u + 0.5 * hh * k2u, up + 0.5 * hh * k2p);
        let (k4u, k4p) = rhs(rr + hh, u + hh * k3u, up + hh * k3p);
        (
            u + hh / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u),
            up + hh / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
        )
    };

    // start radius: inside the central dive scale r* ≈ √(u0/|a|), so the
    // even expansion u ≈ u0 + a r² is accurate there; supercritical probes
    // with r* below the mesh are integrated up to the first node with steps
    // tied to r*
    let r_dive = (u0 / a.abs().max(1e-300)).sqrt();
    let r_first = 0.5 * h;
    let r0s = r_first.min(r_dive / 16.0);
    let mut u = u0 + a * r0s * r0s;
    let mut up = 2.0 * a * r0s;
    let mut rr = r0s;
    if u <= 0.0 {
        return Shot::Overshoot;
    }
    let pre_step = (r_dive / 16.0).min(0.25 * h);
    let mut guard = 0usize;
    while rr < r_first {
        let hh = pre_step.min(r_first - rr);
        let (un, upn) = rk4(rr, u, up, hh);
        u = un;
        up = upn;
        rr += hh;
        if u < 0.0 {
            return Shot::Overshoot;
        }
        if up > 0.0 {
            return Shot::Undershoot;
        }
        guard += 1;
        if guard > 2_000_000 {
            return Shot::Overshoot; // unresolvable dive: far above critical
        }
    }

    let mut rec = record;
    if let Some(rec) = rec.as_deref_mut() {
        rec.push(u.max(0.0));
    }
    for step in 0..grid.n() - 1 {
        let r = r_first + step as f64 * h;
        // stiffness-tied substeps for steep segments
        let stiff = (1.0 + p * u.abs().powf(p - 1.0)).sqrt();
        let nsub = ((4.0 * h * stiff).ceil() as usize).clamp(1, 256);
        let hh = h / nsub as f64;
        let mut rr = r;
        let mut finished = None;
        for _ in 0..nsub {
            let (un, upn) = rk4(rr, u, up, hh);
            u = un;
            up = upn;
            rr += hh;
            if u < 0.0 {
                finished = Some(Shot::Overshoot);
                break;
            }
            if up > 0.0 {
                finished = Some(Shot::Undershoot);
                break;
            }
        }
        if let Some(rec) = rec.as_deref_mut() {
            rec.push(u.max(0.0));
        }
        if let Some(shot) = finished {
            return shot;
        }
    }
    Shot::Decayed
}

/// Ground state of the limiting equation by bisection shooting on `u(0)`,
/// re-polished by the Newton solver with the singular coefficient frozen at
/// zero.
pub fn solve_classic(p: f64, grid: &RadialGrid) -> Result<ClassicProfile> {
    if !(p > 1.0 && p <= 8.0) {
        return Err(Error::Domain(format!("solve_classic needs p in (1, 8], got {p}")));
    }
    let (mut lo, mut hi) = (1.001f64, 100.0f64);
    if !matches!(shoot(p, grid, hi, None), Shot::Overshoot) {
        return Err(Error::Bracket(format!("u0 = {hi} does not overshoot")));
    }
    if matches!(shoot(p, grid, lo, None), Shot::Overshoot) {
        return Err(Error::Bracket(format!("u0 = {lo} already overshoots")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        match shoot(p, grid, mid, None) {
            Shot::Overshoot => hi = mid,
            _ => lo = mid,
        }
        if hi - lo <= 1e-13 * lo {
            break;
        }
    }
    let u0 = 0.5 * (lo + hi);
    let mut traj = Vec::with_capacity(grid.n());
    shoot(p, grid, u0, Some(&mut traj));
    traj.resize(grid.n(), 0.0);

    let ctx = GroundCtx::new(grid)?;
    let out = newton_iterate(grid, &ctx, None, p, traj, true)?;
    let u = RadialField { values: out.f };
    let mass = grid.inner(&u, &u)?;
    let grad = grid.dirichlet_form(&u, &u)?;
    let lp1 = grid
        .lp_norm(&u, p + 1.0)?
        .powf(p + 1.0);
    let action_infty = 0.5 * (grad + mass) - lp1 / (p + 1.0);
    Ok(ClassicProfile { grid: grid.clone(), u, u0, action_infty, mass })
}

impl Profile {
    /// Total field `φ̃_i = f_i + c·G₁(r_i)`.
    pub fn total_field(&self) -> Result<RadialField> {
        let g1 = GreenRef::new(1.0)?.sample(&self.grid)?;
        Ok(RadialField {
            values: self
                .f
                .values
                .iter()
                .zip(&g1.values)
                .map(|(f, g)| f + self.c * g)
                .collect(),
        })
    }

    /// `‖φ̃‖²_{H̃} = ‖∇f‖² + ‖f‖² + β c²` with the stencil's exact forms.
    pub fn h_norm_sq(&self) -> Result<f64> {
        let grad = self.grid.dirichlet_form(&self.f, &self.f)?;
        let mass = self.grid.inner(&self.f, &self.f)?;
        Ok(grad + mass + self.beta * self.c * self.c)
    }

    /// Action `S̃` and Nehari functional `K̃` of the profile.
    pub fn functional_values(&self) -> Result<(f64, f64)> {
        let h = self.h_norm_sq()?;
        let phi = self.total_field()?;
        let lp1 = self.grid.lp_norm(&phi, self.p + 1.0)?.powf(self.p + 1.0);
        Ok((0.5 * h - lp1 / (self.p + 1.0), h - lp1))
    }

    /// Rescaled mass `‖φ̃‖²_{L²}`, with the `c²` diagonal taken from the
    /// closed form `(G₁,G₁) = 1/(4π)`.
    pub fn mass_rescaled(&self) -> Result<f64> {
        let g1 = GreenRef::new(1.0)?.sample(&self.grid)?;
        let ff = self.grid.inner(&self.f, &self.f)?;
        let fg = self.grid.inner(&self.f, &g1)?;
        Ok(ff + 2.0 * self.c * fg + self.c * self.c / (4.0 * PI))
    }

    /// CSV columns `r,f,phi`.
    pub fn write_profile_csv<W: IoWrite>(&self, mut w: W) -> std::io::Result<()> {
        let phi = self
            .total_field()
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e.to_string()))?;
        writeln!(w, "r,f,phi")?;
        for i in 0..self.grid.n() {
            writeln!(
                w,
                "{},{},{}",
                fmt_float(self.grid.nodes()[i]),
                fmt_float(self.f.values[i]),
                fmt_float(phi.values[i])
            )?;
        }
        Ok(())
    }
}

/// Scale `(f, c)` by `λ₀ = (‖φ̃‖²_{H̃}/‖φ̃‖_{p+1}^{p+1})^{1/(p-1)}` so the
/// result sits on the Nehari manifold.
pub fn nehari_rescale(prof: &Profile) -> Result<Profile> {
    let h = prof.h_norm_sq()?;
    let phi = prof.total_field()?;
    let lp1 = prof.grid.lp_norm(&phi, prof.p + 1.0)?.powf(prof.p + 1.0);
    if lp1 <= 0.0 || h <= 0.0 {
        return Err(Error::Degenerate("nehari_rescale of the zero profile".into()));
    }
    let lam0 = (h / lp1).powf(1.0 / (prof.p - 1.0));
    let mut out = prof.clone();
    for v in &mut out.f.values {
        *v *= lam0;
    }
    out.f0 *= lam0;
    out.c *= lam0;
    Ok(out)
}

fn check_solver_inputs(params: &OperatorParams, p: f64, omega: f64) -> Result<f64> {
    if !(p > 1.0 && p <= 8.0) {
        return Err(Error::Domain(format!("solve_ground needs p in (1, 8], got {p}")));
    }
    let beta = params.beta(omega)?;
    if beta < BETA_GUARD {
        return Err(Error::BetaTooSmall {
            alpha: params.alpha,
            omega,
            beta,
            guard: BETA_GUARD,
            omega_min: params.omega_min(BETA_GUARD),
        });
    }
    Ok(beta)
}

/// Solve the rescaled stationary equation at one frequency. `seed` defaults
/// to the classical profile; every seed is passed through the Nehari
/// rescaling before Newton starts (without it the first iterate at large
/// `p` overshoots the basin).
pub fn solve_ground(
    alpha: f64,
    p: f64,
    omega: f64,
    grid: &RadialGrid,
    seed: Option<&Profile>,
) -> Result<GroundState> {
    let params = OperatorParams::new(alpha)?;
    let beta = check_solver_inputs(&params, p, omega)?;
    let ctx = GroundCtx::new(grid)?;

    let seed_values = match seed {
        Some(prof) => {
            if prof.grid == *grid {
                prof.f.values.clone()
            } else {
                grid.restrict_from(&prof.grid, &prof.f)?.values
            }
        }
        None => solve_classic(p, grid)?.u.values,
    };
    solve_ground_with_ctx(&ctx, alpha, p, omega, beta, grid, seed_values)
}

fn solve_ground_with_ctx(
    ctx: &GroundCtx,
    alpha: f64,
    p: f64,
    omega: f64,
    beta: f64,
    grid: &RadialGrid,
    seed: Vec<f64>,
) -> Result<GroundState> {
    // Nehari prescaling of the seed, using the seed's own implied coefficient
    let seed = {
        let f0 = ctx.coupling(&seed);
        let c = f0 / beta;
        let prof = Profile {
            grid: grid.clone(),
            f: RadialField { values: seed },
            f0,
            beta,
            c,
            omega,
            p,
            alpha,
        };
        nehari_rescale(&prof)?.f.values
    };

    let out = newton_iterate(grid, ctx, Some(beta), p, seed, false)?;
    let f0 = ctx.coupling(&out.f);
    let c = f0 / beta;

    // positivity of the converged total field
    for (i, (fv, gv)) in out.f.iter().zip(&ctx.g1).enumerate() {
        let phi = fv + c * gv;
        if phi <= 0.0 {
            return Err(Error::PositivityViolation { node: i, value: phi });
        }
    }

    let profile = Profile {
        grid: grid.clone(),
        f: RadialField { values: out.f },
        f0,
        beta,
        c,
        omega,
        p,
        alpha,
    };
    let (action, nehari) = profile.functional_values()?;
    let h_norm = profile.h_norm_sq()?;
    let mass_rescaled = profile.mass_rescaled()?;
    let mass_physical = omega.powf((3.0 - p) / (p - 1.0)) * mass_rescaled;
    let energy = omega.powf(2.0 / (p - 1.0)) * (action - 0.5 * mass_rescaled);

    let mut gs = GroundState {
        profile,
        action,
        nehari_residual: nehari.abs() / h_norm,
        pohozaev_residual: 0.0,
        mass_rescaled,
        mass_physical,
        energy,
        newton_iters: out.iters,
        converged: out.converged,
    };
    gs.pohozaev_residual = crate::stability::pohozaev_residual(&gs);
    Ok(gs)
}

/// Warm-started continuation over an ascending frequency list: the largest
/// frequency is seeded by the classical profile, then the branch is traced
/// downward, each solve seeded by the previous converged regular part.
/// Failures are recorded per frequency; only a fully failed sweep is an
/// error.
pub fn continue_sweep(
    alpha: f64,
    p: f64,
    omegas: &[f64],
    grid: &RadialGrid,
) -> Result<Vec<SweepPoint>> {
    if omegas.is_empty() {
        return Err(Error::Invalid("empty omega list".into()));
    }
    if omegas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid("omega list must be strictly ascending".into()));
    }
    let params = OperatorParams::new(alpha)?;
    for &omega in omegas {
        check_solver_inputs(&params, p, omega)?;
    }
    let ctx = GroundCtx::new(grid)?;
    let classic = solve_classic(p, grid)?;

    let mut points: Vec<Option<SweepPoint>> = (0..omegas.len()).map(|_| None).collect();
    let mut seed = classic.u.values.clone();
    for idx in (0..omegas.len()).rev() {
        let omega = omegas[idx];
        let beta = params.beta(omega)?;
        let state = solve_ground_with_ctx(&ctx, alpha, p, omega, beta, grid, seed.clone());
        if let Ok(gs) = &state {
            seed = gs.profile.f.values.clone();
        }
        points[idx] = Some(SweepPoint { omega, state });
    }
    let points: Vec<SweepPoint> = points.into_iter().map(|p| p.unwrap()).collect();
    if points.iter().all(|pt| pt.state.is_err()) {
        return Err(Error::SweepAllFailed);
    }
    Ok(points)
}

impl GroundState {
    /// Diagnostics as a flat JSON object with deterministic formatting.
    pub fn to_json_string(&self) -> String {
        let p = &self.profile;
        format!(
            concat!(
                "{{\n",
                "  \"alpha\": {},\n",
                "  \"p\": {},\n",
                "  \"omega\": {},\n",
                "  \"beta\": {},\n",
                "  \"f0\": {},\n",
                "  \"action\": {},\n",
                "  \"nehari_residual\": {},\n",
                "  \"pohozaev_residual\": {},\n",
                "  \"mass_rescaled\": {},\n",
                "  \"mass_physical\": {},\n",
                "  \"energy\": {},\n",
                "  \"newton_iters\": {},\n",
                "  \"converged\": {}\n",
                "}}\n"
            ),
            fmt_float(p.alpha),
            fmt_float(p.p),
            fmt_float(p.omega),
            fmt_float(p.beta),
            fmt_float(p.f0),
            fmt_float(self.action),
            fmt_float(self.nehari_residual),
            fmt_float(self.pohozaev_residual),
            fmt_float(self.mass_rescaled),
            fmt_float(self.mass_physical),
            fmt_float(self.energy),
            self.newton_iters,
            self.converged
        )
    }
}

impl ClassicProfile {
    pub fn to_json_string(&self) -> String {
        format!(
            "{{\n  \"u0\": {},\n  \"mass\": {},\n  \"action_infty\": {}\n}}\n",
            fmt_float(self.u0),
            fmt_float(self.mass),
            fmt_float(self.action_infty)
        )
    }

    /// CSV columns `r,u`.
    pub fn write_profile_csv<W: IoWrite>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "r,u")?;
        for i in 0..self.grid.n() {
            writeln!(w, "{},{}", fmt_float(self.grid.nodes()[i]), fmt_float(self.u.values[i]))?;
        }
        Ok(())
    }
}
