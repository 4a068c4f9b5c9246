//! Pointwise metric quantities of the reduction.
//!
//! For an invariant metric ω = i∂∂̄(u₀ + φ) the operators below evaluate, on
//! the grid,
//!
//! * the Monge-Ampère density ratio  ωⁿ/ω₀ⁿ = w(u')u'' / (w(u₀')u₀''),
//! * the ω-Laplacian of an invariant function,  Δ_ω g = (w(u')g')' / (w(u')u''),
//! * the gradient norm  |∇g|_ω = |g'| / sqrt(u'').
//!
//! Interior stencils are centered; truncation boundaries use one-sided
//! stencils of the same order.  Background derivatives are analytic, only φ
//! is differenced.  Profiles that leave the Kähler cone are rejected, never
//! clamped.

use crate::error::{CoreError, Result};
use crate::profile::Profile;

/// Default tolerance on |φ'| at the truncation boundaries.
pub const ASYMPTOTIC_TOL: f64 = 1e-3;

/// Finite-difference order used by the measurement operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StencilOrder {
    #[default]
    Second,
    Fourth,
}

/// First derivative of grid samples; one-sided stencils at the ends.
pub fn deriv1(f: &[f64], h: f64, order: StencilOrder) -> Vec<f64> {
    let n = f.len();
    let mut d = vec![0.0; n];
    match order {
        StencilOrder::Second => {
            for i in 1..n - 1 {
                d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
            }
            d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
            d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
        }
        StencilOrder::Fourth => {
            for i in 2..n - 2 {
                d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
            }
            d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4])
                / (12.0 * h);
            d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h);
            d[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4]
                + 3.0 * f[n - 5])
                / (12.0 * h);
            d[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4]
                - f[n - 5])
                / (12.0 * h);
        }
    }
    d
}

/// Second derivative of grid samples; one-sided stencils at the ends.
pub fn deriv2(f: &[f64], h: f64, order: StencilOrder) -> Vec<f64> {
    let n = f.len();
    let h2 = h * h;
    let mut d = vec![0.0; n];
    match order {
        StencilOrder::Second => {
            for i in 1..n - 1 {
                d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
            }
            d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
            d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
        }
        StencilOrder::Fourth => {
            for i in 2..n - 2 {
                d[i] = (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2])
                    / (12.0 * h2);
            }
            d[0] = (45.0 * f[0] - 154.0 * f[1] + 214.0 * f[2] - 156.0 * f[3] + 61.0 * f[4]
                - 10.0 * f[5])
                / (12.0 * h2);
            d[1] = (10.0 * f[0] - 15.0 * f[1] - 4.0 * f[2] + 14.0 * f[3] - 6.0 * f[4] + f[5])
                / (12.0 * h2);
            d[n - 1] = (45.0 * f[n - 1] - 154.0 * f[n - 2] + 214.0 * f[n - 3] - 156.0 * f[n - 4]
                + 61.0 * f[n - 5]
                - 10.0 * f[n - 6])
                / (12.0 * h2);
            d[n - 2] = (10.0 * f[n - 1] - 15.0 * f[n - 2] - 4.0 * f[n - 3] + 14.0 * f[n - 4]
                - 6.0 * f[n - 5]
                + f[n - 6])
                / (12.0 * h2);
        }
    }
    d
}

/// u' and u'' at the nodes: analytic background plus differenced φ.
pub fn u_derivs(prof: &Profile, order: StencilOrder) -> (Vec<f64>, Vec<f64>) {
    let h = prof.bg.grid.h;
    let dphi = deriv1(&prof.phi, h, order);
    let ddphi = deriv2(&prof.phi, h, order);
    let up = prof.bg.u0_p.iter().zip(&dphi).map(|(a, b)| a + b).collect();
    let upp = prof.bg.u0_pp.iter().zip(&ddphi).map(|(a, b)| a + b).collect();
    (up, upp)
}

/// Positivity and admissibility: u'' > 0 everywhere, u' strictly inside the
/// moment interval, and |φ'| at the truncation boundaries below `asym_tol`.
pub fn check_admissible(prof: &Profile, asym_tol: f64) -> Result<()> {
    let (a, b) = prof.bg.model.moment_interval;
    let (up, upp) = u_derivs(prof, StencilOrder::Second);
    for (i, (&p, &q)) in up.iter().zip(&upp).enumerate() {
        if !(q > 0.0) {
            return Err(CoreError::NonKahler(format!(
                "u'' = {q:e} at x = {}",
                prof.bg.grid.nodes[i]
            )));
        }
        if !(p > a && p < b) {
            return Err(CoreError::NonKahler(format!(
                "moment coordinate u' = {p} outside ({a}, {b}) at x = {}",
                prof.bg.grid.nodes[i]
            )));
        }
    }
    let h = prof.bg.grid.h;
    let n = prof.phi.len();
    let left = (-3.0 * prof.phi[0] + 4.0 * prof.phi[1] - prof.phi[2]) / (2.0 * h);
    let right = (3.0 * prof.phi[n - 1] - 4.0 * prof.phi[n - 2] + prof.phi[n - 3]) / (2.0 * h);
    if left.abs() > asym_tol || right.abs() > asym_tol {
        return Err(CoreError::NonKahler(format!(
            "boundary slope |φ'| = {:e} exceeds asymptotic tolerance {asym_tol:e}",
            left.abs().max(right.abs())
        )));
    }
    Ok(())
}

/// Monge-Ampère density ratio ωⁿ/ω₀ⁿ at the nodes.
pub fn ma_density(prof: &Profile, order: StencilOrder) -> Result<Vec<f64>> {
    check_admissible(prof, ASYMPTOTIC_TOL)?;
    let (up, upp) = u_derivs(prof, order);
    let m = &prof.bg.model;
    Ok((0..up.len())
        .map(|i| m.ma_weight(up[i]) * upp[i] / prof.bg.w0[i])
        .collect())
}

/// ω-Laplacian of invariant samples g.  Annihilates constants; at second
/// order the interior discretization is in flux form, so the divergence
/// theorem holds up to boundary fluxes.
pub fn laplacian(prof: &Profile, g: &[f64], order: StencilOrder) -> Result<Vec<f64>> {
    check_admissible(prof, ASYMPTOTIC_TOL)?;
    if g.len() != prof.phi.len() {
        return Err(CoreError::InvalidInput("laplacian: length mismatch".into()));
    }
    let m = &prof.bg.model;
    let h = prof.bg.grid.h;
    let n = g.len();
    let (up, upp) = u_derivs(prof, order);
    let mut out = vec![0.0; n];
    match order {
        StencilOrder::Second => {
            let u = prof.u_values();
            for i in 1..n - 1 {
                // Exact midpoint slopes of u give the flux coefficients.
                let w_r = m.ma_weight((u[i + 1] - u[i]) / h);
                let w_l = m.ma_weight((u[i] - u[i - 1]) / h);
                let flux = w_r * (g[i + 1] - g[i]) - w_l * (g[i] - g[i - 1]);
                out[i] = flux / (h * h * m.ma_weight(up[i]) * upp[i]);
            }
            let gp = deriv1(g, h, order);
            let gpp = deriv2(g, h, order);
            for &i in &[0, n - 1] {
                out[i] = gpp[i] / upp[i] + m.ma_weight_prime(up[i]) / m.ma_weight(up[i]) * gp[i];
            }
        }
        StencilOrder::Fourth => {
            let gp = deriv1(g, h, order);
            let gpp = deriv2(g, h, order);
            for i in 0..n {
                out[i] = gpp[i] / upp[i] + m.ma_weight_prime(up[i]) / m.ma_weight(up[i]) * gp[i];
            }
        }
    }
    Ok(out)
}

/// Pointwise |∇g|_ω = |g'| / sqrt(u'').
pub fn gradient_norm(prof: &Profile, g: &[f64], order: StencilOrder) -> Result<Vec<f64>> {
    check_admissible(prof, ASYMPTOTIC_TOL)?;
    if g.len() != prof.phi.len() {
        return Err(CoreError::InvalidInput("gradient_norm: length mismatch".into()));
    }
    let (_, upp) = u_derivs(prof, order);
    let gp = deriv1(g, prof.bg.grid.h, order);
    Ok(gp.iter().zip(&upp).map(|(d, q)| d.abs() / q.sqrt()).collect())
}
