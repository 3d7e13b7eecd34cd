//! Stability classification along an ω-branch.
//!
//! The slope criterion classifies the standing wave at `ω` as stable when
//! `d/dω ‖φ_ω‖²_{L²} > 0` and unstable when it is negative. The mass
//! derivative is estimated by centered differences on the log-ω grid with a
//! Richardson-style truncation estimate supplying an honest inconclusive
//! band. The large-ω expansion
//!
//! ```text
//!     d/dω ‖φ_ω‖² ≈ ω^{2(2-p)/(p-1)} [ (3-p)/(p-1)·m̃ + f̃(0)²/(2(p-1)πβ²) ]
//! ```
//!
//! is exposed separately as a cross-check. Linearized-operator diagnostics
//! (nondegeneracy of `L̃_ω` and coercivity of `S″(φ)` on the mass
//! constraint) run as a dense symmetric pencil in the real radial sector.

use std::fmt;
use std::io::Write as IoWrite;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::groundstate::GroundState;
use crate::pointop::GreenRef;
use crate::radial::{fmt_float, RadialGrid};

use std::f64::consts::PI;

/// Dense eigensolves are refused above this grid size.
pub const PENCIL_MAX_N: usize = 2048;
/// Grid used when a converged state must be coarsened for the eigensolve.
pub const PENCIL_DEFAULT_N: usize = 1024;

/// Relative residual of the Pohozaev identity
/// `‖φ̃‖² = f̃(0)²/(4πβ²) + (2/(p+1))‖φ̃‖_{p+1}^{p+1}`.
pub fn pohozaev_residual(gs: &GroundState) -> f64 {
    let prof = &gs.profile;
    let mass = match prof.mass_rescaled() {
        Ok(m) => m,
        Err(_) => return f64::NAN,
    };
    let phi = match prof.total_field() {
        Ok(phi) => phi,
        Err(_) => return f64::NAN,
    };
    let lp1 = match prof.grid.lp_norm(&phi, prof.p + 1.0) {
        Ok(v) => v.powf(prof.p + 1.0),
        Err(_) => return f64::NAN,
    };
    let singular = prof.f0 * prof.f0 / (4.0 * PI * prof.beta * prof.beta);
    (mass - singular - 2.0 / (prof.p + 1.0) * lp1).abs() / mass
}

/// Large-ω closed form for the mass slope (the `O(β^{-3})` remainder
/// dropped).
pub fn asymptotic_dmass(gs: &GroundState) -> f64 {
    let p = gs.profile.p;
    let omega = gs.profile.omega;
    let beta = gs.profile.beta;
    let f0 = gs.profile.f0;
    omega.powf(2.0 * (2.0 - p) / (p - 1.0))
        * ((3.0 - p) / (p - 1.0) * gs.mass_rescaled + f0 * f0 / (2.0 * (p - 1.0) * PI * beta * beta))
}

/// `|∂_ω f̃(0)|·ω·β^{3/2}` at the interior sweep points; bounded along the
/// branch when the derivative obeys its `C/(ωβ^{3/2})` envelope.
pub fn domega_f0_ratio(states: &[GroundState]) -> Result<Vec<f64>> {
    if states.len() < 3 {
        return Err(Error::Invalid(format!(
            "domega_f0_ratio needs at least 3 states, got {}",
            states.len()
        )));
    }
    let mut out = Vec::with_capacity(states.len() - 2);
    for i in 1..states.len() - 1 {
        let dw = states[i + 1].profile.omega - states[i - 1].profile.omega;
        let df0 = states[i + 1].profile.f0 - states[i - 1].profile.f0;
        let omega = states[i].profile.omega;
        let beta = states[i].profile.beta;
        out.push((df0 / dw).abs() * omega * beta.powf(1.5));
    }
    Ok(out)
}

/// Stability classification of one branch point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityClass {
    Stable,
    Unstable,
    Inconclusive,
}

impl fmt::Display for StabilityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StabilityClass::Stable => "stable",
            StabilityClass::Unstable => "unstable",
            StabilityClass::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

/// ω-sweep summary: masses, slope estimates, classifications.
#[derive(Debug, Clone)]
pub struct MassCurve {
    pub alpha: f64,
    pub p: f64,
    pub omegas: Vec<f64>,
    pub mass: Vec<f64>,
    pub mass_rescaled: Vec<f64>,
    pub f0: Vec<f64>,
    pub beta: Vec<f64>,
    pub action: Vec<f64>,
    pub dmass: Vec<f64>,
    pub dmass_asymptotic: Vec<f64>,
    /// 10× the Richardson truncation estimate backing the classification.
    pub threshold: Vec<f64>,
    pub classification: Vec<StabilityClass>,
}

/// Centered differences of `mass` with respect to ω on a (possibly
/// non-uniform) log grid, one-sided at the ends, plus the 10× Richardson
/// threshold from comparing single- and double-width stencils.
fn dmass_with_threshold(omegas: &[f64], mass: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let m = omegas.len();
    let ln: Vec<f64> = omegas.iter().map(|w| w.ln()).collect();
    let mut d = vec![0.0; m];
    let mut thr = vec![f64::NAN; m];
    for i in 0..m {
        let slope = if i == 0 {
            (mass[1] - mass[0]) / (ln[1] - ln[0])
        } else if i == m - 1 {
            (mass[m - 1] - mass[m - 2]) / (ln[m - 1] - ln[m - 2])
        } else {
            (mass[i + 1] - mass[i - 1]) / (ln[i + 1] - ln[i - 1])
        };
        d[i] = slope / omegas[i];
        if i >= 2 && i + 2 < m {
            let wide = (mass[i + 2] - mass[i - 2]) / (ln[i + 2] - ln[i - 2]);
            let narrow = (mass[i + 1] - mass[i - 1]) / (ln[i + 1] - ln[i - 1]);
            thr[i] = 10.0 * ((narrow - wide) / 3.0).abs() / omegas[i];
        }
    }
    // clamp the ends to the nearest interior estimate
    let first = thr.iter().position(|t| t.is_finite()).unwrap_or(0);
    let last = thr.iter().rposition(|t| t.is_finite()).unwrap_or(m - 1);
    let (f_val, l_val) = (thr[first], thr[last]);
    for (i, t) in thr.iter_mut().enumerate() {
        if !t.is_finite() {
            *t = if i < first { f_val } else { l_val };
        }
        if !t.is_finite() {
            *t = 0.0;
        }
    }
    (d, thr)
}

/// Build the mass curve from one (α, p) sweep of converged states in
/// ascending ω order (at least 3 points).
pub fn mass_curve(states: &[GroundState]) -> Result<MassCurve> {
    if states.len() < 3 {
        return Err(Error::Invalid(format!(
            "mass_curve needs at least 3 states, got {}",
            states.len()
        )));
    }
    let alpha = states[0].profile.alpha;
    let p = states[0].profile.p;
    for gs in states {
        if (gs.profile.alpha - alpha).abs() > 1e-12 || (gs.profile.p - p).abs() > 1e-12 {
            return Err(Error::Invalid("mass_curve states must share (alpha, p)".into()));
        }
    }
    let omegas: Vec<f64> = states.iter().map(|gs| gs.profile.omega).collect();
    if omegas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid("mass_curve needs strictly ascending omega".into()));
    }
    let mass: Vec<f64> = states.iter().map(|gs| gs.mass_physical).collect();
    let (dmass, threshold) = dmass_with_threshold(&omegas, &mass);
    let classification = dmass
        .iter()
        .zip(&threshold)
        .map(|(d, t)| {
            if *d > *t {
                StabilityClass::Stable
            } else if *d < -*t {
                StabilityClass::Unstable
            } else {
                StabilityClass::Inconclusive
            }
        })
        .collect();
    Ok(MassCurve {
        alpha,
        p,
        omegas,
        mass,
        mass_rescaled: states.iter().map(|gs| gs.mass_rescaled).collect(),
        f0: states.iter().map(|gs| gs.profile.f0).collect(),
        beta: states.iter().map(|gs| gs.profile.beta).collect(),
        action: states.iter().map(|gs| gs.action).collect(),
        dmass,
        dmass_asymptotic: states.iter().map(asymptotic_dmass).collect(),
        threshold,
        classification,
    })
}

impl MassCurve {
    /// Intervals `(ω_i, ω_{i+1})` where the slope estimate changes sign.
    pub fn sign_change_intervals(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for i in 0..self.dmass.len() - 1 {
            if self.dmass[i].signum() != self.dmass[i + 1].signum() {
                out.push((self.omegas[i], self.omegas[i + 1]));
            }
        }
        out
    }

    /// CSV with header
    /// `omega,beta,mass,mass_rescaled,f0,action,dmass,dmass_asymptotic,classification`.
    pub fn write_csv<W: IoWrite>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "omega,beta,mass,mass_rescaled,f0,action,dmass,dmass_asymptotic,classification")?;
        for i in 0..self.omegas.len() {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                fmt_float(self.omegas[i]),
                fmt_float(self.beta[i]),
                fmt_float(self.mass[i]),
                fmt_float(self.mass_rescaled[i]),
                fmt_float(self.f0[i]),
                fmt_float(self.action[i]),
                fmt_float(self.dmass[i]),
                fmt_float(self.dmass_asymptotic[i]),
                self.classification[i]
            )?;
        }
        Ok(())
    }
}

/// Spectral diagnostics of the linearized operator at one state.
#[derive(Debug, Clone)]
pub struct LinearizedReport {
    pub omega: f64,
    /// Smallest `|θ|` of the pencil `⟨L̃v, w⟩ = θ ⟨v, w⟩_{H̃}`.
    pub smallest_abs_eig: f64,
    /// Smallest pencil eigenvalue restricted to the discrete L²-orthogonal
    /// complement of `φ̃`.
    pub coercivity_eig: f64,
    /// `n + 1`: grid values plus the independent singular coefficient.
    pub dims: usize,
}

impl LinearizedReport {
    pub fn to_json_string(&self) -> String {
        format!(
            "{{\n  \"omega\": {},\n  \"smallest_abs_eig\": {},\n  \"coercivity_eig\": {},\n  \"dims\": {}\n}}\n",
            fmt_float(self.omega),
            fmt_float(self.smallest_abs_eig),
            fmt_float(self.coercivity_eig),
            self.dims
        )
    }
}

/// Symmetric H¹ Gram matrix of the grid (Dirichlet form plus mass), the
/// `g`-block of the H̃ metric.
fn h1_gram(grid: &RadialGrid) -> DMatrix<f64> {
    let n = grid.n();
    let h = grid.h();
    let two_pi_over_h = 2.0 * PI / h;
    let mut s = DMatrix::zeros(n, n);
    for i in 0..n {
        let rp = (i + 1) as f64 * h;
        let rm = i as f64 * h;
        s[(i, i)] = two_pi_over_h * (rm + rp) + grid.weights()[i];
        if i + 1 < n {
            s[(i, i + 1)] = -two_pi_over_h * rp;
            s[(i + 1, i)] = -two_pi_over_h * rp;
        }
    }
    s
}

/// Assemble the pencil `(A, B)` of `⟨L̃v, w⟩` against the H̃ Gram over
/// `v = g + d G₁` (grid vector `g`, free coefficient `d`).
fn assemble_pencil(
    grid: &RadialGrid,
    beta: f64,
    p: f64,
    phi: &[f64],
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = grid.n();
    let g1 = GreenRef::new(1.0)?.sample(grid)?.values;
    let m = n + 1;
    let s = h1_gram(grid);
    let mut a = DMatrix::zeros(m, m);
    let mut b = DMatrix::zeros(m, m);
    a.view_mut((0, 0), (n, n)).copy_from(&s);
    b.view_mut((0, 0), (n, n)).copy_from(&s);
    b[(n, n)] = beta;
    a[(n, n)] = beta;
    let mut corner = 0.0;
    for i in 0..n {
        let wphi = grid.weights()[i] * p * phi[i].abs().powf(p - 1.0);
        a[(i, i)] -= wphi;
        a[(i, n)] -= wphi * g1[i];
        a[(n, i)] -= wphi * g1[i];
        corner += wphi * g1[i] * g1[i];
    }
    a[(n, n)] -= corner;
    Ok((a, b))
}

/// All eigenvalues of the symmetric pencil `A x = θ B x` with `B` SPD.
fn pencil_eigenvalues(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<Vec<f64>> {
    let chol = nalgebra::Cholesky::new(b.clone())
        .ok_or_else(|| Error::Degenerate("H-metric Gram matrix not positive definite".into()))?;
    let l = chol.l();
    // C = L⁻¹ A L⁻ᵀ
    let m1 = l
        .solve_lower_triangular(a)
        .ok_or_else(|| Error::Degenerate("singular Cholesky factor".into()))?;
    let m2t = l
        .solve_lower_triangular(&m1.transpose())
        .ok_or_else(|| Error::Degenerate("singular Cholesky factor".into()))?;
    let mut c = m2t.transpose();
    // symmetrize against rounding before the symmetric eigensolver
    c = (&c + c.transpose()) * 0.5;
    let eig = c.symmetric_eigen();
    Ok(eig.eigenvalues.iter().copied().collect())
}

/// Project the pencil onto the orthogonal complement of `constraint` via a
/// Householder reflector and return the reduced matrices.
fn deflate(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    constraint: &DVector<f64>,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let m = constraint.len();
    let mut v = constraint.normalize();
    let sign = if v[0] >= 0.0 { 1.0 } else { -1.0 };
    v[0] += sign;
    let v = v.normalize();
    let reflect = |mat: &DMatrix<f64>| -> DMatrix<f64> {
        // H M H with H = I - 2vvᵀ
        let mv = mat * &v;
        let vm = mat.tr_mul(&v); // Mᵀ v = (v' M)' for symmetric M equals Mv
        let vmv = v.dot(&mv);
        let mut out = mat.clone();
        for i in 0..m {
            for j in 0..m {
                out[(i, j)] += -2.0 * v[i] * vm[j] - 2.0 * mv[i] * v[j] + 4.0 * vmv * v[i] * v[j];
            }
        }
        out
    };
    let ha = reflect(a);
    let hb = reflect(b);
    // drop the first row/column (the constraint direction maps to ±e₁)
    (
        ha.view((1, 1), (m - 1, m - 1)).into_owned(),
        hb.view((1, 1), (m - 1, m - 1)).into_owned(),
    )
}

/// Pencil diagnostics on the state's own grid (must have `n ≤ PENCIL_MAX_N`).
pub fn linearized_report_on_grid(gs: &GroundState) -> Result<LinearizedReport> {
    let grid = &gs.profile.grid;
    let n = grid.n();
    if n > PENCIL_MAX_N {
        return Err(Error::Invalid(format!(
            "grid too large for the dense eigensolve: n = {n} > {PENCIL_MAX_N}"
        )));
    }
    let phi = gs.profile.total_field()?.values;
    let beta = gs.profile.beta;
    let p = gs.profile.p;
    let (a, b) = assemble_pencil(grid, beta, p, &phi)?;

    let eigs = pencil_eigenvalues(&a, &b)?;
    let smallest_abs_eig = eigs.iter().fold(f64::INFINITY, |m, e| m.min(e.abs()));

    // L²-orthogonality to φ̃: grid part pairs with w_i φ_i, the coefficient
    // direction with (G₁, φ̃)
    let g1 = GreenRef::new(1.0)?.sample(grid)?;
    let mut constraint = DVector::zeros(n + 1);
    for i in 0..n {
        constraint[i] = grid.weights()[i] * phi[i];
    }
    constraint[n] = g1
        .values
        .iter()
        .zip(&phi)
        .zip(grid.weights())
        .map(|((g, ph), w)| g * ph * w)
        .sum();
    let (ar, br) = deflate(&a, &b, &constraint);
    let eigs_r = pencil_eigenvalues(&ar, &br)?;
    let coercivity_eig = eigs_r.iter().fold(f64::INFINITY, |m, e| m.min(*e));

    Ok(LinearizedReport {
        omega: gs.profile.omega,
        smallest_abs_eig,
        coercivity_eig,
        dims: n + 1,
    })
}

/// Pencil diagnostics, coarsening the state onto a `PENCIL_DEFAULT_N` grid
/// (restriction plus a Newton re-polish) when its own grid is too large for
/// a dense eigensolve.
pub fn linearized_report(gs: &GroundState) -> Result<LinearizedReport> {
    if gs.profile.grid.n() <= PENCIL_MAX_N {
        return linearized_report_on_grid(gs);
    }
    let coarse = RadialGrid::new(PENCIL_DEFAULT_N, gs.profile.grid.r_max())?;
    let repolished = crate::groundstate::solve_ground(
        gs.profile.alpha,
        gs.profile.p,
        gs.profile.omega,
        &coarse,
        Some(&gs.profile),
    )?;
    linearized_report_on_grid(&repolished)
}
