//! Per-(model, grid) tabulated reference data.
//!
//! The reference potential and its analytic derivatives are sampled once; the
//! additive constant of the reference Ricci potential f₀ is fixed by the
//! discrete normalization ∫ e^{−f₀} ω₀ⁿ = V on this grid, so that the
//! sup-normalized density identity c_j ≤ 0 holds at the quadrature level.

use std::sync::Arc;

use crate::grid::Grid;
use crate::model::ModelDescriptor;

/// Reference data for one model on one grid: u₀ with analytic derivatives,
/// the reference volume density, the normalized reference Ricci potential and
/// the cumulative ω₀-arclength used by the Hölder seminorm.
#[derive(Debug, Clone)]
pub struct Background {
    pub model: ModelDescriptor,
    pub grid: Grid,
    pub u0: Vec<f64>,
    pub u0_p: Vec<f64>,
    pub u0_pp: Vec<f64>,
    /// Reference density w(u₀')·u₀'' (the ω₀ⁿ density in x).
    pub w0: Vec<f64>,
    /// Reference Ricci potential, discretely normalized.
    pub f0: Vec<f64>,
    /// Cumulative ω₀-distance along the reduction coordinate,
    /// d₀(x_i, x_j) = |arc[i] − arc[j]| with ds = sqrt(u₀''/2) dx.
    pub arc: Vec<f64>,
}

impl Background {
    pub fn new(model: ModelDescriptor, grid: Grid) -> Arc<Self> {
        let n = grid.num_points;
        let mut u0 = Vec::with_capacity(n);
        let mut u0_p = Vec::with_capacity(n);
        let mut u0_pp = Vec::with_capacity(n);
        let mut w0 = Vec::with_capacity(n);
        let mut f0 = Vec::with_capacity(n);
        for &x in &grid.nodes {
            u0.push(model.u0(x));
            u0_p.push(model.u0_p(x));
            u0_pp.push(model.u0_pp(x));
            w0.push(model.ma_weight(model.u0_p(x)) * model.u0_pp(x));
            f0.push(model.f0_raw(x));
        }
        // Fix the f₀ constant: A · ∫ e^{−f₀} w₀ dx = V.
        let weighted: Vec<f64> = f0
            .iter()
            .zip(&w0)
            .map(|(f, w)| (-f).exp() * w)
            .collect();
        let c0 = (model.angular_volume * grid.trapezoid(&weighted) / model.volume()).ln();
        for f in &mut f0 {
            *f += c0;
        }
        let mut arc = Vec::with_capacity(n);
        let mut acc = 0.0;
        arc.push(0.0);
        for i in 1..n {
            let a = (u0_pp[i - 1] / 2.0).sqrt();
            let b = (u0_pp[i] / 2.0).sqrt();
            acc += 0.5 * grid.h * (a + b);
            arc.push(acc);
        }
        Arc::new(Self { model, grid, u0, u0_p, u0_pp, w0, f0, arc })
    }

    /// Discrete volume A·∫ w₀ dx of the reference metric on this grid; equal
    /// to the analytic volume up to truncation tails.
    pub fn volume_discrete(&self) -> f64 {
        self.model.angular_volume * self.grid.trapezoid(&self.w0)
    }
}
