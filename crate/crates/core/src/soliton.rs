//! Shooting oracle for the reduced Ricci-soliton equation.
//!
//! Setting the modified Ricci potential to zero and absorbing its additive
//! constant into a gauge of u reduces the soliton equation to the scalar ODE
//!
//! ```text
//!     u'' = e^{n·x − u − λ·u'} / w(u'),        u'(−∞) = a,  u'(+∞) = b,
//! ```
//!
//! integrated from the left end with a three-term asymptotic expansion
//! u = a·x + c₁ e^{γx} + c₂ e^{2γx}, γ = n − a,
//! c₁ = e^{−λa}/(w(a)γ²), c₂ = −(c₁²/4)(1 + γ(λ + w'(a)/w(a))).
//! The boundary defect at the right end is measured by the tail-corrected
//! mismatch (u' + u''/γ⁺) − b with γ⁺ = b − n, which cancels the leading
//! e^{−γ⁺x} tail of on-shell solutions.  The coefficient λ is found by a
//! bracketing scan and bisection on the mismatch, with one secant polish.
//!
//! On the Kähler-Einstein models the equation degenerates at λ = 0 to the
//! Einstein equation; on ℂP¹ the solution is u = 2 log(1 + eˣ/2) in this
//! gauge, which the tests compare against in closed form.

use std::io::Write as _;
use std::path::Path;
use std::sync::Arc;

use crate::background::Background;
use crate::error::{CoreError, Result};
use crate::geometry::{self, StencilOrder};
use crate::grid::Grid;
use crate::model::ModelDescriptor;
use crate::profile::Profile;

/// Shooting solution of the reduced soliton equation.
#[derive(Debug, Clone)]
pub struct SolitonProfile {
    /// Vector-field coefficient solving the boundary matching condition.
    pub lambda_star: f64,
    /// Soliton potential relative to u₀, on the requested grid; the profile's
    /// background carries `lambda_star` as its field coefficient.
    pub profile: Profile,
    /// Sup of the soliton-equation defect of the sampled profile, evaluated
    /// with an independent fourth-order discretization.
    pub residual_sup: f64,
    /// Boundary mismatch at the returned coefficient.
    pub mismatch: f64,
}

/// Reference-file header accompanying the sampled profile.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct SolitonHeader {
    pub version: u32,
    pub model: crate::model::ModelKind,
    pub lambda_star: f64,
    pub num_points: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub residual_sup: f64,
    pub mismatch: f64,
    pub mismatch_tol: f64,
}

struct ShotSolution {
    /// u at the grid nodes.
    u: Vec<f64>,
    mismatch: f64,
}

fn ode_rhs(model: &ModelDescriptor, lambda: f64, x: f64, u: f64, up: f64) -> Result<f64> {
    let expo = model.dim_n as f64 * x - u - lambda * up;
    if expo > 700.0 {
        return Err(CoreError::IntegrationBlowUp { lambda, x });
    }
    Ok(expo.exp() / model.ma_weight(up))
}

/// Integrate the soliton ODE across the grid with classical RK4 at
/// `substeps` sub-steps per grid cell, starting from the asymptotic series.
fn integrate(
    model: &ModelDescriptor,
    lambda: f64,
    grid: &Grid,
    substeps: usize,
) -> Result<ShotSolution> {
    let (a, b) = model.moment_interval;
    let n = model.dim_n as f64;
    let gamma = n - a;
    let gamma_plus = b - n;
    debug_assert!(gamma > 0.0 && gamma_plus > 0.0);
    let w_a = model.ma_weight(a);
    let c1 = (-lambda * a).exp() / (w_a * gamma * gamma);
    let c2 = -(c1 * c1 / 4.0)
        * (1.0 + gamma * (lambda + model.ma_weight_prime(a) / w_a));
    let x0 = grid.x_min;
    let e1 = (gamma * x0).exp();
    let third_term = (c2 * e1 * e1).abs();
    if third_term > 1e-9 {
        return Err(CoreError::AsymptoticsInvalid(format!(
            "series tail {third_term:e} at x_min = {x0}; move the boundary left"
        )));
    }
    let mut u = a * x0 + c1 * e1 + c2 * e1 * e1;
    let mut up = a + c1 * gamma * e1 + 2.0 * c2 * gamma * e1 * e1;
    let h = grid.h / substeps as f64;
    let mut samples = Vec::with_capacity(grid.num_points);
    samples.push(u);
    for cell in 0..grid.num_points - 1 {
        let x_cell = grid.nodes[cell];
        for k in 0..substeps {
            let x = x_cell + k as f64 * h;
            let k1u = up;
            let k1p = ode_rhs(model, lambda, x, u, up)?;
            let k2u = up + 0.5 * h * k1p;
            let k2p = ode_rhs(model, lambda, x + 0.5 * h, u + 0.5 * h * k1u, up + 0.5 * h * k1p)?;
            let k3u = up + 0.5 * h * k2p;
            let k3p = ode_rhs(model, lambda, x + 0.5 * h, u + 0.5 * h * k2u, up + 0.5 * h * k2p)?;
            let k4u = up + h * k3p;
            let k4p = ode_rhs(model, lambda, x + h, u + h * k3u, up + h * k3p)?;
            u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            up += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
            if !u.is_finite() || !up.is_finite() || up > b + 2.0 || up < a - 0.5 {
                return Err(CoreError::IntegrationBlowUp { lambda, x });
            }
        }
        samples.push(u);
    }
    let x_end = grid.x_max;
    let upp_end = ode_rhs(model, lambda, x_end, u, up)?;
    let mismatch = (up + upp_end / gamma_plus) - b;
    Ok(ShotSolution { u: samples, mismatch })
}

/// One shooting trial: the profile relative to u₀ on `grid` (background built
/// with the trial coefficient) and the boundary mismatch.
pub fn solve_soliton_ode(
    model: &ModelDescriptor,
    lambda_trial: f64,
    grid: &Grid,
) -> Result<(Profile, f64)> {
    let shot = integrate(model, lambda_trial, grid, 8)?;
    let trial_model = model.with_field_coeff(lambda_trial);
    let bg = Background::new(trial_model, grid.clone());
    let phi: Vec<f64> = shot
        .u
        .iter()
        .zip(&bg.u0)
        .map(|(u, u0)| u - u0)
        .collect();
    Ok((Profile::new(bg, phi)?, shot.mismatch))
}

/// Soliton-equation defect of a sampled profile, with independent
/// fourth-order stencils: sup over nodes of
/// log(w(u')u'') − (n·x − u − λu') minus its profile mean (the gauge
/// constant of the reduction).
pub fn ode_residual_fourth_order(prof: &Profile) -> Result<f64> {
    let bg = &prof.bg;
    let model = &bg.model;
    let lambda = model.field_coeff;
    let n = model.dim_n as f64;
    let (up, upp) = geometry::u_derivs(prof, StencilOrder::Fourth);
    let u = prof.u_values();
    let npts = u.len();
    let mut res = Vec::with_capacity(npts);
    for i in 0..npts {
        if !(upp[i] > 0.0) {
            return Err(CoreError::NonKahler(format!(
                "u'' <= 0 at x = {}",
                bg.grid.nodes[i]
            )));
        }
        let r = (model.ma_weight(up[i]) * upp[i]).ln()
            - (n * bg.grid.nodes[i] - u[i] - lambda * up[i]);
        res.push(r);
    }
    let mean = res.iter().sum::<f64>() / npts as f64;
    Ok(res.iter().fold(0.0_f64, |m, r| m.max((r - mean).abs())))
}

/// Find the soliton coefficient by bracketing scan plus bisection on the
/// boundary mismatch, with one secant polish, then sample the profile.
pub fn find_soliton(
    model: &ModelDescriptor,
    grid: &Grid,
    bracket: (f64, f64),
    mismatch_tol: f64,
) -> Result<SolitonProfile> {
    let scan_points = 9;
    let (lo_b, hi_b) = bracket;
    let mut evals: Vec<(f64, f64)> = Vec::new();
    for i in 0..scan_points {
        let l = lo_b + (hi_b - lo_b) * i as f64 / (scan_points - 1) as f64;
        if let Ok(shot) = integrate(model, l, grid, 8) {
            evals.push((l, shot.mismatch));
        }
    }
    let pair = evals
        .windows(2)
        .find(|w| w[0].1 * w[1].1 <= 0.0)
        .map(|w| (w[0], w[1]));
    let ((mut lo, mut m_lo), (mut hi, mut m_hi)) = pair.ok_or(CoreError::NoBracket {
        low: lo_b,
        high: hi_b,
    })?;
    let mut best = if m_lo.abs() < m_hi.abs() { (lo, m_lo) } else { (hi, m_hi) };
    for _ in 0..200 {
        if best.1.abs() <= mismatch_tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let m_mid = integrate(model, mid, grid, 8)?.mismatch;
        if m_mid.abs() < best.1.abs() {
            best = (mid, m_mid);
        }
        if m_lo * m_mid <= 0.0 {
            hi = mid;
            m_hi = m_mid;
        } else {
            lo = mid;
            m_lo = m_mid;
        }
    }
    // One secant polish on the collapsed bracket.
    if m_hi != m_lo {
        let sec = hi - m_hi * (hi - lo) / (m_hi - m_lo);
        if sec.is_finite() && sec > lo_b && sec < hi_b {
            if let Ok(shot) = integrate(model, sec, grid, 8) {
                if shot.mismatch.abs() < best.1.abs() {
                    best = (sec, shot.mismatch);
                }
            }
        }
    }
    let (lambda_star, mismatch) = best;
    let (profile, _) = solve_soliton_ode(model, lambda_star, grid)?;
    let residual_sup = ode_residual_fourth_order(&profile)?;
    Ok(SolitonProfile { lambda_star, profile, residual_sup, mismatch })
}

/// Write the reference profile as `<base>.csv` (x, phi) plus `<base>.json`
/// (header with the coefficient, grid and tolerances).
pub fn write_reference(sol: &SolitonProfile, base: &Path, mismatch_tol: f64) -> Result<()> {
    let grid = &sol.profile.bg.grid;
    let header = SolitonHeader {
        version: 1,
        model: sol.profile.bg.model.kind,
        lambda_star: sol.lambda_star,
        num_points: grid.num_points,
        x_min: grid.x_min,
        x_max: grid.x_max,
        residual_sup: sol.residual_sup,
        mismatch: sol.mismatch,
        mismatch_tol,
    };
    let json = serde_json::to_string_pretty(&header)
        .map_err(|e| CoreError::InvalidInput(format!("header serialization: {e}")))?;
    std::fs::write(base.with_extension("json"), json)?;
    let mut csv = std::io::BufWriter::new(std::fs::File::create(base.with_extension("csv"))?);
    writeln!(csv, "x,phi")?;
    for (x, phi) in grid.nodes.iter().zip(&sol.profile.phi) {
        writeln!(csv, "{x:e},{phi:e}")?;
    }
    Ok(())
}

/// Read a reference profile written by [`write_reference`].
pub fn read_reference(base: &Path) -> Result<(SolitonHeader, Vec<f64>, Vec<f64>)> {
    let json = std::fs::read_to_string(base.with_extension("json"))?;
    let header: SolitonHeader = serde_json::from_str(&json)
        .map_err(|e| CoreError::InvalidInput(format!("header parse: {e}")))?;
    let csv = std::fs::read_to_string(base.with_extension("csv"))?;
    let mut xs = Vec::new();
    let mut phis = Vec::new();
    for (idx, line) in csv.lines().enumerate() {
        if idx == 0 {
            continue;
        }
        let mut parts = line.split(',');
        let x: f64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| CoreError::InvalidInput(format!("bad csv line {idx}")))?;
        let phi: f64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| CoreError::InvalidInput(format!("bad csv line {idx}")))?;
        xs.push(x);
        phis.push(phi);
    }
    Ok((header, xs, phis))
}

/// Rebuild the profile of a reference file on its own grid.
pub fn reference_profile(header: &SolitonHeader, phis: Vec<f64>) -> Result<Profile> {
    let model = match header.model {
        crate::model::ModelKind::Cp1 => ModelDescriptor::cp1(),
        crate::model::ModelKind::CpnRadial => ModelDescriptor::cpn_radial(2)?,
        crate::model::ModelKind::Hirzebruch1 => ModelDescriptor::hirzebruch1(),
    }
    .with_field_coeff(header.lambda_star);
    let grid = Grid::uniform(header.x_min, header.x_max, header.num_points)?;
    let bg: Arc<Background> = Background::new(model, grid);
    Profile::new(bg, phis)
}
