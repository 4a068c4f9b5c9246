//! Normalized Kähler-Ricci flow at the potential level.
//!
//! The evolution is the reduced form of
//!
//! ```text
//!     ∂φ/∂t = log(ωⁿ/ω₀ⁿ) + φ + f₀ = N(φ),
//! ```
//!
//! a quasilinear parabolic equation whose linearization is Δ_ω + 1.  The
//! diffusion coefficient 1/u'' grows like e^{|x|} toward the truncation
//! boundaries, so the default stepper is a two-stage linearly implicit
//! Rosenbrock method (L-stable, second order) with the exact tridiagonal
//! Jacobian of the discrete right-hand side; an explicit Heun scheme with a
//! parabolic stability cap is available for narrow domains.  Steps are
//! rejected and halved when the local error estimate exceeds tolerance or the
//! iterate leaves the Kähler cone.
//!
//! The additive constant of φ is pure gauge but grows like e^t under N; the
//! run loop projects it out after every accepted step (all recorded
//! diagnostics are invariant under φ ↦ φ + c).

use std::sync::Arc;

use crate::background::Background;
use crate::error::{CoreError, Result};
use crate::geometry::{self, StencilOrder};
use crate::numerics::{linear_fit, tridiag_solve, SymTridiag};
use crate::potentials;
use crate::profile::Profile;

/// Time stepping scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowScheme {
    /// Two-stage linearly implicit Rosenbrock (W-method), L-stable, order 2.
    Rosenbrock,
    /// Explicit Heun with a parabolic stability cap; practical only on
    /// narrow truncation windows.
    ExplicitRk2,
}

#[derive(Debug, Clone)]
pub struct FlowConfig {
    pub scheme: FlowScheme,
    /// Relative local-error tolerance.
    pub err_tol: f64,
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    /// Diagnostic sampling interval.
    pub cadence: f64,
    /// Hölder exponent of the seminorm monitor.
    pub holder_alpha: f64,
    /// Stencil order for diagnostics.
    pub order: StencilOrder,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            scheme: FlowScheme::Rosenbrock,
            err_tol: 1e-7,
            dt_init: 1e-4,
            dt_min: 1e-12,
            dt_max: 0.25,
            cadence: 0.25,
            holder_alpha: 0.5,
            order: StencilOrder::Second,
        }
    }
}

/// State of one flow trajectory.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub t: f64,
    pub prof: Profile,
    pub dt_last: f64,
}

/// Per-sample values of all monitored functionals and norms.
#[derive(Debug, Clone, serde::Serialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub k_energy: f64,
    pub u_mod_sup: f64,
    pub f_sup: f64,
    pub grad_f_sup: f64,
    pub lap_f_sup: f64,
    /// Normalizing constant of the sup-normalized density identity
    /// ω̃ⁿ = e^{−ψ̃ + f − f₀ + c} ω₀ⁿ; non-positive in exact arithmetic.
    pub c_norm: f64,
    pub holder_seminorm: f64,
    pub j_value: f64,
}

impl DiagnosticsRecord {
    pub const CSV_HEADER: &'static str =
        "t,k_energy,u_mod_sup,f_sup,grad_f_sup,lap_f_sup,c_norm,holder_seminorm,j_value";

    pub fn field(&self, key: DiagnosticsField) -> f64 {
        match key {
            DiagnosticsField::KEnergy => self.k_energy,
            DiagnosticsField::UModSup => self.u_mod_sup,
            DiagnosticsField::FSup => self.f_sup,
            DiagnosticsField::GradFSup => self.grad_f_sup,
            DiagnosticsField::LapFSup => self.lap_f_sup,
            DiagnosticsField::CNorm => self.c_norm,
            DiagnosticsField::HolderSeminorm => self.holder_seminorm,
            DiagnosticsField::JValue => self.j_value,
        }
    }
}

/// Named diagnostic series, matching the CSV columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticsField {
    KEnergy,
    UModSup,
    FSup,
    GradFSup,
    LapFSup,
    CNorm,
    HolderSeminorm,
    JValue,
}

/// Exponential-fit result for one diagnostic series.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RateFit {
    pub rate: f64,
    pub amplitude: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
    /// rate > 0 and r² ≥ 0.99.
    pub decaying: bool,
}

/// Output of a flow run: states and diagnostics at the sample times plus
/// post-run flags.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub states: Vec<FlowState>,
    pub records: Vec<DiagnosticsRecord>,
    /// Largest increase of the K-energy between consecutive samples.
    pub max_k_energy_increase: f64,
    /// Largest c_norm over all samples.
    pub max_c_norm: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

/// Discrete right-hand side N(φ) = log(w(u')u''/w₀u₀'') + φ + f₀ with the
/// reflection closure φ' = 0 at the truncation nodes.  Errors if the state
/// left the Kähler cone.
fn flow_rhs(bg: &Background, phi: &[f64]) -> Result<Vec<f64>> {
    let n = phi.len();
    let h = bg.grid.h;
    let m = &bg.model;
    let (a, b) = m.moment_interval;
    let mut out = vec![0.0; n];
    for i in 0..n {
        let (dp, ddp) = if i == 0 {
            (0.0, 2.0 * (phi[1] - phi[0]) / (h * h))
        } else if i == n - 1 {
            (0.0, 2.0 * (phi[n - 2] - phi[n - 1]) / (h * h))
        } else {
            (
                (phi[i + 1] - phi[i - 1]) / (2.0 * h),
                (phi[i + 1] - 2.0 * phi[i] + phi[i - 1]) / (h * h),
            )
        };
        let up = bg.u0_p[i] + dp;
        let upp = bg.u0_pp[i] + ddp;
        if !(upp > 0.0) {
            return Err(CoreError::NonKahler(format!(
                "u'' = {upp:e} at x = {}",
                bg.grid.nodes[i]
            )));
        }
        if !(up > a && up < b) {
            return Err(CoreError::NonKahler(format!(
                "u' = {up} outside ({a}, {b}) at x = {}",
                bg.grid.nodes[i]
            )));
        }
        out[i] = (m.ma_weight(up) * upp / bg.w0[i]).ln() + phi[i] + bg.f0[i];
    }
    Ok(out)
}

/// Exact tridiagonal Jacobian of the discrete right-hand side.
fn flow_jacobian(bg: &Background, phi: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let n = phi.len();
    let h = bg.grid.h;
    let m = &bg.model;
    let mut lower = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    for i in 0..n {
        let (dp, ddp) = if i == 0 {
            (0.0, 2.0 * (phi[1] - phi[0]) / (h * h))
        } else if i == n - 1 {
            (0.0, 2.0 * (phi[n - 2] - phi[n - 1]) / (h * h))
        } else {
            (
                (phi[i + 1] - phi[i - 1]) / (2.0 * h),
                (phi[i + 1] - 2.0 * phi[i] + phi[i - 1]) / (h * h),
            )
        };
        let up = bg.u0_p[i] + dp;
        let upp = bg.u0_pp[i] + ddp;
        let wratio = m.ma_weight_prime(up) / m.ma_weight(up);
        if i == 0 {
            diag[i] = -2.0 / (h * h * upp) + 1.0;
            upper[i] = 2.0 / (h * h * upp);
        } else if i == n - 1 {
            diag[i] = -2.0 / (h * h * upp) + 1.0;
            lower[i] = 2.0 / (h * h * upp);
        } else {
            lower[i] = -wratio / (2.0 * h) + 1.0 / (h * h * upp);
            diag[i] = -2.0 / (h * h * upp) + 1.0;
            upper[i] = wratio / (2.0 * h) + 1.0 / (h * h * upp);
        }
    }
    (lower, diag, upper)
}

const ROS_GAMMA: f64 = 1.707_106_781_186_547_5; // 1 + 1/sqrt(2), L-stable

/// One trial step: returns the candidate φ and the local error estimate.
fn attempt_step(
    bg: &Background,
    phi: &[f64],
    dt: f64,
    scheme: FlowScheme,
) -> Result<(Vec<f64>, f64)> {
    let n = phi.len();
    match scheme {
        FlowScheme::Rosenbrock => {
            let rhs0 = flow_rhs(bg, phi)?;
            let (jl, jd, ju) = flow_jacobian(bg, phi);
            let ml: Vec<f64> = jl.iter().map(|v| -ROS_GAMMA * dt * v).collect();
            let md: Vec<f64> = jd.iter().map(|v| 1.0 - ROS_GAMMA * dt * v).collect();
            let mu: Vec<f64> = ju.iter().map(|v| -ROS_GAMMA * dt * v).collect();
            let k1 = tridiag_solve(&ml, &md, &mu, &rhs0);
            let stage: Vec<f64> = (0..n).map(|i| phi[i] + dt * k1[i]).collect();
            let rhs1 = flow_rhs(bg, &stage)?;
            let r2: Vec<f64> = (0..n).map(|i| rhs1[i] - 2.0 * k1[i]).collect();
            let k2 = tridiag_solve(&ml, &md, &mu, &r2);
            let out: Vec<f64> = (0..n)
                .map(|i| phi[i] + dt * (1.5 * k1[i] + 0.5 * k2[i]))
                .collect();
            flow_rhs(bg, &out)?; // positivity of the accepted state
            let err = (0..n)
                .map(|i| (0.5 * dt * (k1[i] + k2[i])).abs())
                .fold(0.0_f64, f64::max);
            Ok((out, err))
        }
        FlowScheme::ExplicitRk2 => {
            let rhs0 = flow_rhs(bg, phi)?;
            let k1 = rhs0;
            let stage: Vec<f64> = (0..n).map(|i| phi[i] + dt * k1[i]).collect();
            let k2 = flow_rhs(bg, &stage)?;
            let out: Vec<f64> = (0..n)
                .map(|i| phi[i] + 0.5 * dt * (k1[i] + k2[i]))
                .collect();
            flow_rhs(bg, &out)?;
            let err = (0..n)
                .map(|i| (0.5 * dt * (k2[i] - k1[i])).abs())
                .fold(0.0_f64, f64::max);
            Ok((out, err))
        }
    }
}

/// Parabolic stability cap for the explicit scheme, from the current maximal
/// diffusion coefficient of the w(u')u''-linearization.
fn explicit_stability_cap(bg: &Background, phi: &[f64]) -> f64 {
    let h = bg.grid.h;
    let mut min_upp = f64::INFINITY;
    for i in 1..phi.len() - 1 {
        let ddp = (phi[i + 1] - 2.0 * phi[i] + phi[i - 1]) / (h * h);
        min_upp = min_upp.min(bg.u0_pp[i] + ddp);
    }
    min_upp = min_upp.min(bg.u0_pp[0]).min(bg.u0_pp[phi.len() - 1]);
    0.9 * 0.5 * h * h * min_upp.max(0.0)
}

/// One accepted flow step of at most `dt`; rejected trials halve the step.
pub fn step(state: &FlowState, dt: f64, cfg: &FlowConfig) -> Result<FlowState> {
    if !(dt > 0.0) {
        return Err(CoreError::InvalidInput("step: dt must be positive".into()));
    }
    let bg = &state.prof.bg;
    let mut dt_try = dt.min(cfg.dt_max);
    if cfg.scheme == FlowScheme::ExplicitRk2 {
        dt_try = dt_try.min(explicit_stability_cap(bg, &state.prof.phi));
    }
    let scale = state.prof.sup_norm().max(1.0);
    loop {
        if dt_try < cfg.dt_min {
            return Err(CoreError::StepSizeUnderflow { t: state.t, dt: dt_try });
        }
        match attempt_step(bg, &state.prof.phi, dt_try, cfg.scheme) {
            Ok((phi, err)) if err <= cfg.err_tol * scale => {
                let prof = Profile { bg: bg.clone(), phi };
                return Ok(FlowState { t: state.t + dt_try, prof, dt_last: dt_try });
            }
            _ => {
                dt_try *= 0.5;
            }
        }
    }
}

/// All diagnostics of one state.
pub fn diagnostics(prof: &Profile, t: f64, cfg: &FlowConfig) -> Result<DiagnosticsRecord> {
    let rep = potentials::modified_ricci_potential(prof, cfg.order)?;
    let sup = |v: &[f64]| v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let grad = geometry::gradient_norm(prof, &rep.f, cfg.order)?;
    let lap = geometry::laplacian(prof, &rep.f, cfg.order)?;
    let rec = DiagnosticsRecord {
        t,
        k_energy: potentials::k_energy(prof, cfg.order)?,
        u_mod_sup: sup(&rep.u_mod),
        f_sup: sup(&rep.f),
        grad_f_sup: sup(&grad),
        lap_f_sup: sup(&lap),
        c_norm: sup_normalized_constant(prof),
        holder_seminorm: holder_seminorm(prof, cfg.holder_alpha),
        j_value: potentials::j_functional(prof, cfg.order)?,
    };
    let all = [
        rec.k_energy,
        rec.u_mod_sup,
        rec.f_sup,
        rec.grad_f_sup,
        rec.lap_f_sup,
        rec.c_norm,
        rec.holder_seminorm,
        rec.j_value,
    ];
    if all.iter().any(|v| !v.is_finite()) {
        return Err(CoreError::InvalidInput(format!(
            "non-finite diagnostics at t = {t}"
        )));
    }
    Ok(rec)
}

/// Normalizing constant c of ω̃ⁿ = e^{−ψ̃ + f − f₀ + c} ω₀ⁿ with
/// ψ̃ = φ − sup φ: c = log V − log ∫ e^{−ψ̃ − f₀} ω₀ⁿ.  Since ψ̃ ≤ 0 the
/// integral dominates V and c ≤ 0 up to quadrature roundoff.
pub fn sup_normalized_constant(prof: &Profile) -> f64 {
    let bg = &prof.bg;
    let sup_phi = prof.phi.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v));
    let weighted: Vec<f64> = prof
        .phi
        .iter()
        .zip(&bg.f0)
        .zip(&bg.w0)
        .map(|((p, f0), w)| (-(p - sup_phi) - f0).exp() * w)
        .collect();
    let integral = bg.model.angular_volume * bg.grid.trapezoid(&weighted);
    (bg.model.volume() / integral).ln()
}

/// Integrate the flow to `t_end`, sampling diagnostics at the configured
/// cadence.  The additive gauge constant of φ is projected out after every
/// accepted step.
pub fn run(prof0: &Profile, t_end: f64, cfg: &FlowConfig) -> Result<RunOutput> {
    geometry::check_admissible(&prof0, geometry::ASYMPTOTIC_TOL)?;
    if !(t_end > 0.0) {
        return Err(CoreError::InvalidInput("run: t_end must be positive".into()));
    }
    let bg = prof0.bg.clone();
    let mut state = FlowState { t: 0.0, prof: prof0.clone(), dt_last: cfg.dt_init };
    let mut states = vec![state.clone()];
    let mut records = vec![diagnostics(&state.prof, 0.0, cfg)?];
    let mut dt_ctrl = cfg.dt_init;
    let mut accepted = 0usize;
    let mut rejected = 0usize;
    let mut sample_idx = 1usize;
    let scale_err = |prof: &Profile| prof.sup_norm().max(1.0);

    while state.t < t_end - 1e-12 {
        let t_next_sample = (sample_idx as f64 * cfg.cadence).min(t_end);
        let dt_req = dt_ctrl.min(cfg.dt_max).min(t_next_sample - state.t);
        let mut dt_try = dt_req;
        if cfg.scheme == FlowScheme::ExplicitRk2 {
            dt_try = dt_try.min(explicit_stability_cap(&bg, &state.prof.phi));
        }
        if dt_try < cfg.dt_min {
            return Err(CoreError::StepSizeUnderflow { t: state.t, dt: dt_try });
        }
        match attempt_step(&bg, &state.prof.phi, dt_try, cfg.scheme) {
            Ok((mut phi, err)) if err <= cfg.err_tol * scale_err(&state.prof) => {
                // gauge projection: remove the additive constant
                let mean = phi.iter().sum::<f64>() / phi.len() as f64;
                for v in &mut phi {
                    *v -= mean;
                }
                accepted += 1;
                let t_new = state.t + dt_try;
                state = FlowState {
                    t: t_new,
                    prof: Profile { bg: bg.clone(), phi },
                    dt_last: dt_try,
                };
                let err_rel = err / (cfg.err_tol * scale_err(&state.prof));
                let factor = (0.9 / err_rel.max(1e-30).sqrt()).clamp(0.2, 5.0);
                dt_ctrl = (dt_try * factor).min(cfg.dt_max);
                if (state.t - t_next_sample).abs() < 1e-9 {
                    states.push(state.clone());
                    records.push(diagnostics(&state.prof, state.t, cfg)?);
                    sample_idx += 1;
                }
            }
            _ => {
                rejected += 1;
                dt_ctrl = dt_try * 0.5;
                if dt_ctrl < cfg.dt_min {
                    return Err(CoreError::StepSizeUnderflow { t: state.t, dt: dt_ctrl });
                }
            }
        }
    }

    let mut max_inc = f64::NEG_INFINITY;
    for w in records.windows(2) {
        max_inc = max_inc.max(w[1].k_energy - w[0].k_energy);
    }
    let max_c_norm = records.iter().fold(f64::NEG_INFINITY, |m, r| m.max(r.c_norm));
    Ok(RunOutput {
        states,
        records,
        max_k_energy_increase: max_inc,
        max_c_norm,
        accepted_steps: accepted,
        rejected_steps: rejected,
    })
}

/// Pullback of the state by the one-parameter group of the model field:
/// translation by s = λ·t via the gauge action.  Identity when λ = 0.
pub fn gauge_pullback_exp_tx(state: &FlowState) -> Result<Profile> {
    let lambda = state.prof.bg.model.field_coeff;
    potentials::gauge_act_potential(&state.prof, lambda * state.t)
}

/// Discrete α-Hölder seminorm of the sup-normalized potential over node
/// pairs, with the ω₀-distance of the reduction.
pub fn holder_seminorm(prof: &Profile, alpha: f64) -> f64 {
    let arc = &prof.bg.arc;
    let psi = &prof.phi;
    let n = psi.len();
    let mut best = 0.0_f64;
    for i in 0..n {
        for j in i + 1..n {
            let d = arc[j] - arc[i];
            let q = (psi[j] - psi[i]).abs() / d.powf(alpha);
            if q > best {
                best = q;
            }
        }
    }
    best
}

/// Discrete C² norm ‖φ‖∞ + ‖φ'‖∞ + ‖φ''‖∞.
pub fn c2_norm(prof: &Profile) -> f64 {
    let h = prof.bg.grid.h;
    let sup = |v: &[f64]| v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let d1 = geometry::deriv1(&prof.phi, h, StencilOrder::Second);
    let d2 = geometry::deriv2(&prof.phi, h, StencilOrder::Second);
    sup(&prof.phi) + sup(&d1) + sup(&d2)
}

/// Parabolic smoothing experiment report.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SmoothingReport {
    pub c2_t0: Vec<f64>,
    pub c2_t1: Vec<f64>,
    pub c2_t2: Vec<f64>,
    pub spread_t0: f64,
    pub spread_t1: f64,
    /// spread_t1 within the configured bound.
    pub pass: bool,
}

/// Runs each rough profile to t = 2 and compares discrete C² norms at
/// t ∈ {0, 1, 2}.  Passes when the t = 1 norms vary across the family by at
/// most `spread_bound` (the t = 0 norms are reported for contrast).
pub fn smoothing_experiment(
    family: &[Profile],
    cfg: &FlowConfig,
    spread_bound: f64,
) -> Result<SmoothingReport> {
    if family.is_empty() {
        return Err(CoreError::InvalidInput("smoothing_experiment: empty family".into()));
    }
    let mut c2_t0 = Vec::new();
    let mut c2_t1 = Vec::new();
    let mut c2_t2 = Vec::new();
    for prof in family {
        c2_t0.push(c2_norm(prof));
        let mut cfg_run = cfg.clone();
        cfg_run.cadence = 1.0;
        let out = run(prof, 2.0, &cfg_run)?;
        let find = |t: f64| -> &FlowState {
            out.states
                .iter()
                .min_by(|a, b| {
                    (a.t - t).abs().partial_cmp(&(b.t - t).abs()).unwrap()
                })
                .unwrap()
        };
        c2_t1.push(c2_norm(&find(1.0).prof));
        c2_t2.push(c2_norm(&find(2.0).prof));
    }
    let spread = |v: &[f64]| {
        let max = v.iter().fold(f64::NEG_INFINITY, |m, x| m.max(*x));
        let min = v.iter().fold(f64::INFINITY, |m, x| m.min(*x));
        max / min.max(1e-300)
    };
    let spread_t0 = spread(&c2_t0);
    let spread_t1 = spread(&c2_t1);
    Ok(SmoothingReport {
        c2_t0,
        c2_t1,
        c2_t2,
        spread_t0,
        spread_t1,
        pass: spread_t1 <= spread_bound,
    })
}

/// Least-squares exponential fit of a diagnostic series on a time window.
pub fn rate_fit(
    records: &[DiagnosticsRecord],
    key: DiagnosticsField,
    window: (f64, f64),
) -> Result<RateFit> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.t >= window.0 - 1e-12 && r.t <= window.1 + 1e-12)
        .map(|r| (r.t, r.field(key)))
        .collect();
    if pts.len() < 10 {
        return Err(CoreError::InvalidInput(format!(
            "rate_fit window [{}, {}] has {} samples; need at least 10",
            window.0,
            window.1,
            pts.len()
        )));
    }
    if pts.iter().any(|&(_, v)| !(v > 0.0)) {
        return Err(CoreError::NonPositiveValues);
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let (slope, intercept, r_squared) = linear_fit(&xs, &ys);
    let rate = -slope;
    Ok(RateFit {
        rate,
        amplitude: intercept.exp(),
        r_squared,
        window,
        decaying: rate > 0.0 && r_squared >= 0.99,
    })
}

/// Damped Newton solve of the stationary equation N(φ) = 0 (the
/// Kähler-Einstein potential when the model has no vector field).
pub fn stationary_profile(bg: Arc<Background>, tol: f64, max_iter: usize) -> Result<Profile> {
    let n = bg.grid.num_points;
    let mut phi = vec![0.0; n];
    for _ in 0..max_iter {
        let rhs = flow_rhs(&bg, &phi)?;
        let norm = rhs.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if norm <= tol {
            return Profile::new(bg, phi);
        }
        let (jl, jd, ju) = flow_jacobian(&bg, &phi);
        let neg: Vec<f64> = rhs.iter().map(|v| -v).collect();
        let delta = tridiag_solve(&jl, &jd, &ju, &neg);
        let mut alpha = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let trial: Vec<f64> = (0..n).map(|i| phi[i] + alpha * delta[i]).collect();
            if let Ok(r) = flow_rhs(&bg, &trial) {
                let t_norm = r.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
                if t_norm < norm {
                    phi = trial;
                    improved = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !improved {
            return Err(CoreError::InvalidInput(
                "stationary solve stalled; no descent direction".into(),
            ));
        }
    }
    let rhs = flow_rhs(&bg, &phi)?;
    let norm = rhs.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if norm <= tol {
        Profile::new(bg, phi)
    } else {
        Err(CoreError::InvalidInput(format!(
            "stationary solve did not reach tolerance: residual {norm:e}"
        )))
    }
}

/// Smallest eigenvalues of −Δ_ω (generalized, weighted by the volume
/// density) at a profile, with the flux discretization and reflection ends.
pub fn linearized_spectrum(prof: &Profile, count: usize) -> Result<Vec<f64>> {
    let (tri, _) = laplacian_pencil(prof)?;
    Ok(tri.smallest_eigenvalues(count))
}

/// Eigenfunction of −Δ_ω for an eigenvalue estimate, on the nodes.
pub fn linearized_mode(prof: &Profile, eigenvalue: f64) -> Result<Vec<f64>> {
    let (tri, m_sqrt) = laplacian_pencil(prof)?;
    let y = tri.eigenvector(eigenvalue);
    let mut v: Vec<f64> = y.iter().zip(&m_sqrt).map(|(a, s)| a / s).collect();
    let norm = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    for x in &mut v {
        *x /= norm;
    }
    Ok(v)
}

/// Symmetrized pencil M^{-1/2} A M^{-1/2} of the generalized problem
/// A v = μ M v, A = −(w v')' in flux form, M = diag(w(u')u'').
fn laplacian_pencil(prof: &Profile) -> Result<(SymTridiag, Vec<f64>)> {
    geometry::check_admissible(prof, geometry::ASYMPTOTIC_TOL)?;
    let bg = &prof.bg;
    let m = &bg.model;
    let h = bg.grid.h;
    let n = prof.phi.len();
    let u = prof.u_values();
    let (up, upp) = geometry::u_derivs(prof, StencilOrder::Second);
    // midpoint flux coefficients
    let w_half: Vec<f64> = (0..n - 1)
        .map(|i| m.ma_weight((u[i + 1] - u[i]) / h))
        .collect();
    let mass: Vec<f64> = (0..n).map(|i| m.ma_weight(up[i]) * upp[i] * h).collect();
    let m_sqrt: Vec<f64> = mass.iter().map(|v| v.sqrt()).collect();
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n - 1];
    for i in 0..n {
        let wl = if i > 0 { w_half[i - 1] } else { 0.0 };
        let wr = if i + 1 < n { w_half[i] } else { 0.0 };
        diag[i] = (wl + wr) / (h * mass[i]);
    }
    for i in 0..n - 1 {
        off[i] = -w_half[i] / (h * m_sqrt[i] * m_sqrt[i + 1]);
    }
    Ok((SymTridiag { diag, off }, m_sqrt))
}
