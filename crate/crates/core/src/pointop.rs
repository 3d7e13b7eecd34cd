//! Point-interaction operator algebra.
//!
//! The self-adjoint extension `-Δ_α` has the single negative eigenvalue
//! `e_α = -4·exp(-4πα - 2γ)` with eigenfunction `χ_α ∝ G_{-e_α}`, and the
//! coupling scalar
//!
//! ```text
//!     β_α(λ) = α + γ/(2π) + ln(√λ/2)/(2π) = ln(λ/(-e_α))/(4π),
//! ```
//!
//! positive exactly when `λ > -e_α`. `G_λ(r) = K₀(√λ r)/(2π)` is the free
//! Green function; its pairwise inner products have the closed form
//! `(G_λ, G_μ) = (ln λ - ln μ)/(4π(λ - μ))` with value `1/(4πλ)` on the
//! diagonal.

use crate::error::{Error, Result};
use crate::radial::{RadialField, RadialGrid};
use crate::specfun::{bessel_k0, bessel_k1};
use crate::EULER_GAMMA;

use std::f64::consts::PI;

/// Interaction strength `α` with the derived eigenvalue `e_α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorParams {
    pub alpha: f64,
    pub e_alpha: f64,
}

impl OperatorParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::Domain(format!("alpha must be finite, got {alpha}")));
        }
        let e_alpha = -4.0 * (-4.0 * PI * alpha - 2.0 * EULER_GAMMA).exp();
        Ok(Self { alpha, e_alpha })
    }

    /// `β_α(λ) = ln(λ/(-e_α))/(4π)`; positive iff `λ > -e_α`.
    pub fn beta(&self, lambda: f64) -> Result<f64> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::Domain(format!("beta needs lambda > 0, got {lambda}")));
        }
        Ok((lambda / -self.e_alpha).ln() / (4.0 * PI))
    }

    /// The same scalar from the defining form `α + γ/(2π) + ln(√λ/2)/(2π)`.
    pub fn beta_direct(&self, lambda: f64) -> Result<f64> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::Domain(format!("beta needs lambda > 0, got {lambda}")));
        }
        Ok(self.alpha + EULER_GAMMA / (2.0 * PI) + (lambda.sqrt() / 2.0).ln() / (2.0 * PI))
    }

    /// Smallest `ω` with `β_α(ω) ≥ guard`.
    pub fn omega_min(&self, guard: f64) -> f64 {
        -self.e_alpha * (4.0 * PI * guard).exp()
    }
}

/// The Green function `G_λ(r) = K₀(√λ r)/(2π)`, evaluated lazily.
#[derive(Debug, Clone, Copy)]
pub struct GreenRef {
    pub lambda: f64,
}

impl GreenRef {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::Domain(format!("GreenRef needs lambda > 0, got {lambda}")));
        }
        Ok(Self { lambda })
    }

    pub fn value(&self, r: f64) -> Result<f64> {
        green_value(self.lambda, r)
    }

    pub fn sample(&self, grid: &RadialGrid) -> Result<RadialField> {
        let mut values = Vec::with_capacity(grid.n());
        for &r in grid.nodes() {
            values.push(green_value(self.lambda, r)?);
        }
        Ok(RadialField { values })
    }

    /// Radial derivative `∂_r G_λ(r) = -(√λ/2π) K₁(√λ r)`.
    pub fn deriv(&self, r: f64) -> Result<f64> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::Domain(format!("green deriv needs r > 0, got {r}")));
        }
        let s = self.lambda.sqrt();
        Ok(-s * bessel_k1(s * r)? / (2.0 * PI))
    }
}

/// `G_λ(r) = K₀(√λ r)/(2π)`.
pub fn green_value(lambda: f64, r: f64) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) || !(r.is_finite() && r > 0.0) {
        return Err(Error::Domain(format!(
            "green_value needs lambda > 0 and r > 0, got ({lambda}, {r})"
        )));
    }
    Ok(bessel_k0(lambda.sqrt() * r)? / (2.0 * PI))
}

/// Closed-form `(G_λ, G_μ)_{L²}`. A three-term expansion of
/// `(ln λ - ln μ)/(λ - μ)` takes over near the diagonal, where the direct
/// quotient cancels catastrophically.
pub fn green_inner(lambda: f64, mu: f64) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) || !(mu.is_finite() && mu > 0.0) {
        return Err(Error::Domain(format!(
            "green_inner needs positive arguments, got ({lambda}, {mu})"
        )));
    }
    let d = (lambda - mu) / mu;
    if d.abs() <= 1e-6 {
        // ln(1+d)/d = 1 - d/2 + d²/3 - ...
        Ok((1.0 - 0.5 * d + d * d / 3.0) / (4.0 * PI * mu))
    } else {
        Ok((lambda.ln() - mu.ln()) / (4.0 * PI * (lambda - mu)))
    }
}

/// Normalized eigenfunction `χ_α = G_{-e_α}/‖G_{-e_α}‖` sampled on the grid;
/// normalization uses the grid's own quadrature so the discrete norm is 1.
pub fn chi_alpha(params: &OperatorParams, grid: &RadialGrid) -> Result<RadialField> {
    let g = GreenRef::new(-params.e_alpha)?.sample(grid)?;
    let norm = grid.lp_norm(&g, 2.0)?;
    Ok(RadialField { values: g.values.iter().map(|v| v / norm).collect() })
}

/// Resolvent `(-Δ_α + λ)^{-1} g`: the free tridiagonal solve plus the
/// rank-one Green correction `((g, G_λ)/β_α(λ)) G_λ`.
pub fn apply_resolvent(
    params: &OperatorParams,
    lambda: f64,
    g: &RadialField,
    grid: &RadialGrid,
) -> Result<RadialField> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Domain(format!("apply_resolvent needs lambda > 0, got {lambda}")));
    }
    let beta = params.beta(lambda)?;
    if beta.abs() < 1e-12 {
        return Err(Error::SingularResolvent(beta.abs()));
    }
    let free = grid.solve_helmholtz(lambda, g)?;
    let glam = GreenRef::new(lambda)?.sample(grid)?;
    let coeff = grid.inner(g, &glam)? / beta;
    let values = free
        .values
        .iter()
        .zip(&glam.values)
        .map(|(u, gg)| u + coeff * gg)
        .collect();
    Ok(RadialField { values })
}

/// Quadratic form `‖∇f‖² + ω‖f‖² + β_α(ω) c²` of the energy space, with the
/// gradient term evaluated as the stencil's exact Dirichlet form.
pub fn h1_alpha_norm_sq(
    params: &OperatorParams,
    omega: f64,
    f: &RadialField,
    c: f64,
    grid: &RadialGrid,
) -> Result<f64> {
    let beta = params.beta(omega)?;
    if beta <= 0.0 {
        return Err(Error::Domain(format!(
            "h1_alpha_norm_sq needs omega > -e_alpha = {}, got omega = {omega}",
            -params.e_alpha
        )));
    }
    let grad = grid.dirichlet_form(f, f)?;
    let mass = grid.inner(f, f)?;
    Ok(grad + omega * mass + beta * c * c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const E0: f64 = 1.2609470067487736; // -e_alpha at alpha = 0

    #[test]
    fn eigenvalue_closed_form() {
        let p = OperatorParams::new(0.0).unwrap();
        assert!((p.e_alpha + E0).abs() < 1e-14);
        // recompute from alpha at a few values
        for alpha in [-0.3, 0.0, 0.17, 1.0] {
            let p = OperatorParams::new(alpha).unwrap();
            let expect = -4.0 * (-4.0 * PI * alpha - 2.0 * EULER_GAMMA).exp();
            assert!(((p.e_alpha - expect) / expect).abs() < 1e-14);
        }
        assert!(OperatorParams::new(f64::NAN).is_err());
    }

    #[test]
    fn beta_two_formulas_agree() {
        for alpha in [-0.2, 0.0, 0.4] {
            let p = OperatorParams::new(alpha).unwrap();
            let mut lambda = 1e-6;
            while lambda <= 1e12 {
                let a = p.beta(lambda).unwrap();
                let b = p.beta_direct(lambda).unwrap();
                assert!((a - b).abs() < 1e-13, "alpha={alpha} lambda={lambda}");
                lambda *= 10.0;
            }
            // sign change exactly at -e_alpha
            assert!(p.beta(-p.e_alpha).unwrap().abs() < 1e-15);
            assert!(p.beta(-p.e_alpha * 1.01).unwrap() > 0.0);
            assert!(p.beta(-p.e_alpha * 0.99).unwrap() < 0.0);
        }
    }

    #[test]
    fn beta_reference_value() {
        // alpha = 0, lambda = 4·(-e_0): beta = ln(4)/(4π)
        let p = OperatorParams::new(0.0).unwrap();
        let b = p.beta(4.0 * E0).unwrap();
        assert!((b - 0.1103178000763258).abs() < 1e-13);
    }

    #[test]
    fn green_scaling_and_reference() {
        let v11 = green_value(1.0, 1.0).unwrap();
        assert!((v11 - 0.0670081205084971).abs() < 1e-12);
        // G_λ(r) = G₁(√λ r)
        let a = green_value(4.0, 1.0).unwrap();
        let b = green_value(1.0, 2.0).unwrap();
        assert!((a - b).abs() < 1e-15);
        assert!(green_value(-1.0, 1.0).is_err());
        assert!(green_value(1.0, 0.0).is_err());
    }

    #[test]
    fn green_small_r_log_law() {
        // G_λ(r) + (ln(√λ r/2) + γ)/(2π) → 0 as r → 0
        let lambda = 3.0;
        for r in [1e-4, 1e-6, 1e-8] {
            let g = green_value(lambda, r).unwrap();
            let log_part = -((lambda.sqrt() * r / 2.0).ln() + EULER_GAMMA) / (2.0 * PI);
            assert!((g - log_part).abs() < 1e-6 * g, "r={r}");
        }
    }

    #[test]
    fn green_inner_closed_forms() {
        let diag = green_inner(1.0, 1.0).unwrap();
        assert!((diag - 1.0 / (4.0 * PI)).abs() < 1e-15);
        let off = green_inner(4.0, 1.0).unwrap();
        assert!((off - 0.0367726000254419).abs() < 1e-13);
        // continuity across the diagonal
        let close = green_inner(1.0 + 1e-8, 1.0).unwrap();
        assert!(((close - diag) / diag).abs() < 1e-7);
        // series and log branches agree where the implementation switches
        let d = 1.2e-6;
        let lam = 1.0 + d;
        let log_branch = green_inner(lam, 1.0).unwrap(); // |d| > cutoff: log route
        let series = (1.0 - 0.5 * d + d * d / 3.0) / (4.0 * PI);
        assert!(((log_branch - series) / diag).abs() < 1e-10);
    }

    #[test]
    fn green_inner_matches_quadrature() {
        // 2D radial quadrature of G₄·G₁ on a fine grid
        let grid = RadialGrid::new(1 << 16, 40.0).unwrap();
        let g4 = GreenRef::new(4.0).unwrap().sample(&grid).unwrap();
        let g1 = GreenRef::new(1.0).unwrap().sample(&grid).unwrap();
        let q = grid.inner(&g4, &g1).unwrap();
        let exact = green_inner(4.0, 1.0).unwrap();
        assert!(((q - exact) / exact).abs() < 1e-5);
    }

    #[test]
    fn chi_alpha_normalized_and_proportional() {
        let grid = RadialGrid::new(4096, 40.0).unwrap();
        let p = OperatorParams::new(0.0).unwrap();
        let chi = chi_alpha(&p, &grid).unwrap();
        assert!((grid.lp_norm(&chi, 2.0).unwrap() - 1.0).abs() < 1e-10);
        // pointwise ratio to G_{-e_0} constant across the grid
        let g = GreenRef::new(E0).unwrap().sample(&grid).unwrap();
        let ratio0 = chi.values[0] / g.values[0];
        for i in (0..grid.n()).step_by(97) {
            if g.values[i] > 1e-280 {
                assert!((chi.values[i] / g.values[i] - ratio0).abs() < 1e-10 * ratio0);
            }
        }
        // analytic pre-normalization norm: ‖G_{-e_α}‖² = 1/(4π(-e_α))
        let analytic = 1.0 / (4.0 * PI * E0);
        let q = grid.inner(&g, &g).unwrap();
        assert!(((q - analytic) / analytic).abs() < 1e-3);
    }

    #[test]
    fn resolvent_eigenpair() {
        // (-Δ_α - e_α) χ_α = 0, so the resolvent at λ = 1 - e_α maps χ_α to
        // (λ + e_α)^{-1} χ_α = χ_α
        let p = OperatorParams::new(0.0).unwrap();
        let lambda = 1.0 + E0;
        let mut resid = [0.0f64; 2];
        for (k, n) in [4096usize, 8192].iter().enumerate() {
            let grid = RadialGrid::new(*n, 40.0).unwrap();
            let chi = chi_alpha(&p, &grid).unwrap();
            let out = apply_resolvent(&p, lambda, &chi, &grid).unwrap();
            let diff = RadialField {
                values: out.values.iter().zip(&chi.values).map(|(a, b)| a - b).collect(),
            };
            resid[k] = grid.lp_norm(&diff, 2.0).unwrap();
        }
        assert!(resid[0] <= 1e-3, "residual {}", resid[0]);
        assert!(resid[0] / resid[1] >= 3.0, "refinement ratio {}", resid[0] / resid[1]);
    }

    #[test]
    fn resolvent_limits() {
        let grid = RadialGrid::new(1024, 30.0).unwrap();
        // g = 0 → 0
        let p = OperatorParams::new(0.0).unwrap();
        let zero = grid.zero_field();
        let out = apply_resolvent(&p, 2.0, &zero, &grid).unwrap();
        assert!(out.values.iter().all(|v| *v == 0.0));
        // large alpha: beta large, rank-one term negligible → free resolvent
        let pfar = OperatorParams::new(200.0).unwrap();
        let g = grid.sample(|r| (-r * r).exp());
        let with = apply_resolvent(&pfar, 2.0, &g, &grid).unwrap();
        let free = grid.solve_helmholtz(2.0, &g).unwrap();
        let nf = grid.lp_norm(&free, 2.0).unwrap();
        let diff = RadialField {
            values: with.values.iter().zip(&free.values).map(|(a, b)| a - b).collect(),
        };
        assert!(grid.lp_norm(&diff, 2.0).unwrap() < 1e-3 * nf);
        // singular parameter guard
        assert!(matches!(
            apply_resolvent(&p, E0, &g, &grid),
            Err(Error::SingularResolvent(_))
        ));
    }

    #[test]
    fn resolvent_then_operator_returns_input() {
        // (-Δ_α + λ) applied to the resolvent output: act with (-Δ + λ) on
        // the regular part u - c_q G_λ (c_q the computed rank-one weight)
        let p = OperatorParams::new(0.0).unwrap();
        let grid = RadialGrid::new(4096, 40.0).unwrap();
        let lambda = 2.0;
        let g = grid.sample(|r| (-r * r / 2.0).exp());
        let beta = p.beta(lambda).unwrap();
        let glam = GreenRef::new(lambda).unwrap().sample(&grid).unwrap();
        let coeff = grid.inner(&g, &glam).unwrap() / beta;
        let u = apply_resolvent(&p, lambda, &g, &grid).unwrap();
        let regular = RadialField {
            values: u.values.iter().zip(&glam.values).map(|(a, b)| a - coeff * b).collect(),
        };
        let back = grid.apply_helmholtz(lambda, &regular).unwrap();
        // the free part solves exactly; compare away from the origin where
        // the G_λ subtraction is well-conditioned
        let ng = grid.lp_norm(&g, 2.0).unwrap();
        let mut worst = 0.0f64;
        for (i, r) in grid.nodes().iter().enumerate() {
            if *r < 0.5 || *r > 20.0 {
                continue;
            }
            worst = worst.max((back.values[i] - g.values[i]).abs());
        }
        assert!(worst <= 1e-3 * ng, "worst {worst}");
    }

    #[test]
    fn x_grad_g1_weak_identity() {
        // ⟨(-Δ+1)f, r ∂_r G₁⟩ = -2 (f, G₁) for f = e^{-r²}
        let grid = RadialGrid::new(4096, 40.0).unwrap();
        let gref = GreenRef::new(1.0).unwrap();
        let mut lhs = 0.0;
        let mut rhs = 0.0;
        for (i, &r) in grid.nodes().iter().enumerate() {
            let w = grid.weights()[i];
            let af = (5.0 - 4.0 * r * r) * (-r * r).exp(); // (-Δ+1) e^{-r²}
            lhs += w * af * r * gref.deriv(r).unwrap();
            rhs += w * (-r * r).exp() * gref.value(r).unwrap();
        }
        rhs *= -2.0;
        assert!(((lhs - rhs) / rhs).abs() < 1e-4);
    }

    #[test]
    fn quadratic_form_values() {
        let grid = RadialGrid::new(4096, 40.0).unwrap();
        // pure singular part: f = 0, c = 1, ω = e·(-e_α) → β = 1/(4π)
        let p = OperatorParams::new(0.0).unwrap();
        let zero = grid.zero_field();
        let omega = std::f64::consts::E * E0;
        let v = h1_alpha_norm_sq(&p, omega, &zero, 1.0, &grid).unwrap();
        assert!((v - 1.0 / (4.0 * PI)).abs() < 1e-13);
        // Gaussian with c = 0 at ω = 1 (alpha chosen so ω = 1 is admissible):
        // ‖∇f‖² + ‖f‖² = π + π = 2π
        let pa = OperatorParams::new(0.1).unwrap();
        let f = grid.sample(|r| (-r * r / 2.0).exp());
        let v = h1_alpha_norm_sq(&pa, 1.0, &f, 0.0, &grid).unwrap();
        assert!((v - 2.0 * PI).abs() < 1e-5);
        // inadmissible omega
        assert!(h1_alpha_norm_sq(&p, 1.0, &f, 0.0, &grid).is_err());
    }

    proptest! {
        #[test]
        fn green_inner_symmetric(a in 1e-3f64..1e3, b in 1e-3f64..1e3) {
            let x = green_inner(a, b).unwrap();
            let y = green_inner(b, a).unwrap();
            prop_assert!((x - y).abs() <= 1e-14 * x.abs().max(y.abs()));
        }

        #[test]
        fn beta_monotone(a in 1e-3f64..1e6, factor in 1.01f64..10.0) {
            let p = OperatorParams::new(0.0).unwrap();
            prop_assert!(p.beta(a * factor).unwrap() > p.beta(a).unwrap());
        }

        #[test]
        fn quadratic_form_scaling(s in 0.2f64..4.0) {
            let grid = RadialGrid::new(256, 12.0).unwrap();
            let p = OperatorParams::new(0.0).unwrap();
            let f = grid.sample(|r| (-r).exp());
            let fs = RadialField { values: f.values.iter().map(|v| v * s).collect() };
            let omega = 2.0 * E0;
            let v1 = h1_alpha_norm_sq(&p, omega, &f, 0.7, &grid).unwrap();
            let v2 = h1_alpha_norm_sq(&p, omega, &fs, 0.7 * s, &grid).unwrap();
            prop_assert!((v2 - s * s * v1).abs() < 1e-10 * v2.abs().max(1.0));
        }
    }
}
