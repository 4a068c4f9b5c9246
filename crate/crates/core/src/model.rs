//! Symmetry-reduced Fano models.
//!
//! Each model is a U(n)-invariant (radial) Kähler geometry on the open dense
//! orbit, written in the log-fiber coordinate x = log |Z|².  An invariant
//! metric is ω = i∂∂̄ u(x) with u convex; the moment coordinate p = u'(x)
//! fills a fixed open interval (a, b) determined by the Kähler class, and the
//! volume density relative to dx and the orbit directions is
//!
//!     ωⁿ  ↔  w(u'(x)) · u''(x) dx,     w(p) = p^{n-1},
//!
//! so that V = angular_volume · ∫_a^b w(p) dp.  The three shipped models:
//!
//! * `Cp1`         — ℂP¹, ω₀ = 2·ω_FS, u₀ = 2 log(1+eˣ), interval (0, 2).
//! * `CpnRadial`   — ℂPⁿ, ω₀ = (n+1)·ω_FS, u₀ = (n+1) log(1+eˣ),
//!                   interval (0, n+1).
//! * `Hirzebruch1` — the one-point blow-up of ℂP² (first Hirzebruch surface),
//!                   u₀ = x + 2 log(1+eˣ), interval (1, 3); carries the
//!                   radial holomorphic field of the Koiso soliton.
//!
//! All anticanonical data (interval endpoints, angular volume, total volume)
//! is fixed by intersection theory in the 2π-convention and cross-checked by
//! quadrature in the test suite.  The soliton vector-field coefficient of the
//! Hirzebruch model is the root of the invariant-theoretic integral
//! ∫_a^b (p − n) w(p) e^{λp} dp, computed at construction.

use crate::error::{CoreError, Result};
use crate::numerics::simpson;

const TWO_PI: f64 = std::f64::consts::TAU;

/// Enum-like tag of the supported symmetry-reduced models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ModelKind {
    Cp1,
    CpnRadial,
    Hirzebruch1,
}

/// A symmetry-reduced Fano model: dimensions, moment interval, Monge-Ampère
/// weight, orbit volume and the holomorphic vector-field coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelDescriptor {
    pub kind: ModelKind,
    /// Complex dimension n.
    pub dim_n: u32,
    /// Closure of the image of the moment coordinate p = u'(x).
    pub moment_interval: (f64, f64),
    /// Total measure of the orbit directions: V = angular_volume · ∫ w dp.
    pub angular_volume: f64,
    /// Coefficient λ of the holomorphic field X: X acts on invariant
    /// functions as λ d/dx and exp(tX) translates x by λt.  Zero on the
    /// Kähler-Einstein models.
    pub field_coeff: f64,
}

impl ModelDescriptor {
    /// ℂP¹ with the anticanonical Fubini-Study reference.
    pub fn cp1() -> Self {
        Self {
            kind: ModelKind::Cp1,
            dim_n: 1,
            moment_interval: (0.0, 2.0),
            angular_volume: TWO_PI,
            field_coeff: 0.0,
        }
    }

    /// ℂPⁿ under the full U(n) (radial) reduction, 1 <= n <= 6.
    pub fn cpn_radial(n: u32) -> Result<Self> {
        if n == 0 || n > 6 {
            return Err(CoreError::InvalidInput(format!(
                "cpn_radial supports 1 <= n <= 6, got {n}"
            )));
        }
        Ok(Self {
            kind: ModelKind::CpnRadial,
            dim_n: n,
            moment_interval: (0.0, (n + 1) as f64),
            angular_volume: n as f64 * TWO_PI.powi(n as i32),
            field_coeff: 0.0,
        })
    }

    /// First Hirzebruch surface (one-point blow-up of ℂP²).  The field
    /// coefficient is set to the soliton value, the root of
    /// ∫ (p − 2) p e^{λp} dp over (1, 3).
    pub fn hirzebruch1() -> Self {
        let mut m = Self {
            kind: ModelKind::Hirzebruch1,
            dim_n: 2,
            moment_interval: (1.0, 3.0),
            angular_volume: 2.0 * TWO_PI * TWO_PI,
            field_coeff: 0.0,
        };
        m.field_coeff = m
            .soliton_coefficient_futaki()
            .expect("hirzebruch1 soliton coefficient bracket");
        m
    }

    /// Same model with an overridden vector-field coefficient (used by the
    /// shooting oracle to probe trial values).
    pub fn with_field_coeff(&self, lambda: f64) -> Self {
        let mut m = self.clone();
        m.field_coeff = lambda;
        m
    }

    /// Reduced Monge-Ampère weight w(p) = p^{n-1}.
    pub fn ma_weight(&self, p: f64) -> f64 {
        match self.dim_n {
            1 => 1.0,
            2 => p,
            k => p.powi(k as i32 - 1),
        }
    }

    /// dw/dp.
    pub fn ma_weight_prime(&self, p: f64) -> f64 {
        match self.dim_n {
            1 => 0.0,
            2 => 1.0,
            k => (k - 1) as f64 * p.powi(k as i32 - 2),
        }
    }

    /// Total volume V = ∫ ωⁿ of the class, in closed form.
    pub fn volume(&self) -> f64 {
        let n = self.dim_n;
        match self.kind {
            // 2π · (2 - 0)
            ModelKind::Cp1 => 4.0 * std::f64::consts::PI,
            // n(2π)ⁿ · (n+1)ⁿ/n = (2π(n+1))ⁿ
            ModelKind::CpnRadial => (TWO_PI * (n + 1) as f64).powi(n as i32),
            // 2(2π)² · (3² - 1²)/2 = 8 (2π)², matching c₁² = 8 on Bl_p ℂP².
            ModelKind::Hirzebruch1 => 8.0 * TWO_PI * TWO_PI,
        }
    }

    /// Reference potential u₀(x); analytic, stable at large |x|.
    pub fn u0(&self, x: f64) -> f64 {
        let sp = softplus(x);
        match self.kind {
            ModelKind::Cp1 => 2.0 * sp,
            ModelKind::CpnRadial => (self.dim_n + 1) as f64 * sp,
            ModelKind::Hirzebruch1 => x + 2.0 * sp,
        }
    }

    /// u₀'(x).
    pub fn u0_p(&self, x: f64) -> f64 {
        let s = sigmoid(x);
        match self.kind {
            ModelKind::Cp1 => 2.0 * s,
            ModelKind::CpnRadial => (self.dim_n + 1) as f64 * s,
            ModelKind::Hirzebruch1 => 1.0 + 2.0 * s,
        }
    }

    /// u₀''(x).
    pub fn u0_pp(&self, x: f64) -> f64 {
        let s = sigmoid(x);
        let v = s * (1.0 - s);
        match self.kind {
            ModelKind::Cp1 => 2.0 * v,
            ModelKind::CpnRadial => (self.dim_n + 1) as f64 * v,
            ModelKind::Hirzebruch1 => 2.0 * v,
        }
    }

    /// Reference Ricci potential up to an additive constant:
    /// f₀ = log(w(u₀')u₀'') − n·x + u₀ + const.  The Fubini-Study references
    /// are Einstein, so their f₀ is constant; the Hirzebruch reference is not.
    pub fn f0_raw(&self, x: f64) -> f64 {
        match self.kind {
            ModelKind::Cp1 | ModelKind::CpnRadial => 0.0,
            ModelKind::Hirzebruch1 => (1.0 + 2.0 * sigmoid(x)).ln(),
        }
    }

    /// The invariant-theoretic obstruction integral
    /// G(λ) = ∫_a^b (p − n) w(p) e^{λp} dp.  Its root is the soliton
    /// coefficient; G(0) = 0 exactly on the Kähler-Einstein models.
    pub fn futaki_integral(&self, lambda: f64) -> f64 {
        let (a, b) = self.moment_interval;
        let n = self.dim_n as f64;
        simpson(a, b, 4096, |p| (p - n) * self.ma_weight(p) * (lambda * p).exp())
    }

    /// Root of the obstruction integral: the coefficient of the soliton
    /// vector field in this reduction.  Independent of any metric; serves as
    /// a closed-form cross-check of the shooting oracle.
    pub fn soliton_coefficient_futaki(&self) -> Result<f64> {
        // Scan for a sign change, then bisect to roundoff.
        let lo_scan = -3.0;
        let hi_scan = 3.0;
        let steps = 120;
        let mut prev_l = lo_scan;
        let mut prev_g = self.futaki_integral(prev_l);
        let mut bracket = None;
        for i in 1..=steps {
            let l = lo_scan + (hi_scan - lo_scan) * i as f64 / steps as f64;
            let g = self.futaki_integral(l);
            if prev_g == 0.0 {
                return Ok(prev_l);
            }
            if prev_g * g <= 0.0 {
                bracket = Some((prev_l, l, prev_g, g));
                break;
            }
            prev_l = l;
            prev_g = g;
        }
        let (mut lo, mut hi, mut glo, _) = bracket.ok_or(CoreError::NoBracket {
            low: lo_scan,
            high: hi_scan,
        })?;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            let gm = self.futaki_integral(mid);
            if glo * gm <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
                glo = gm;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// log(1 + eˣ), stable for large |x|.
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// 1/(1 + e⁻ˣ), stable for large |x|.
fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}
