//! Discretized invariant Kähler potentials.
//!
//! A `Profile` stores φ relative to the reference potential u₀ on the grid of
//! its `Background`.  The Kähler condition (u₀ + φ)'' > 0 together with the
//! moment-interval constraint is checked by the geometry operators, not at
//! construction.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::background::Background;
use crate::error::{CoreError, Result};

#[derive(Debug, Clone)]
pub struct Profile {
    pub bg: Arc<Background>,
    pub phi: Vec<f64>,
}

impl Profile {
    pub fn new(bg: Arc<Background>, phi: Vec<f64>) -> Result<Self> {
        if phi.len() != bg.grid.num_points {
            return Err(CoreError::InvalidInput(format!(
                "profile length {} does not match grid size {}",
                phi.len(),
                bg.grid.num_points
            )));
        }
        if phi.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::InvalidInput("profile has non-finite entries".into()));
        }
        Ok(Self { bg, phi })
    }

    pub fn zero(bg: Arc<Background>) -> Self {
        let n = bg.grid.num_points;
        Self { bg, phi: vec![0.0; n] }
    }

    pub fn from_fn<F: Fn(f64) -> f64>(bg: Arc<Background>, f: F) -> Self {
        let phi = bg.grid.nodes.iter().map(|&x| f(x)).collect();
        Self { bg, phi }
    }

    /// Localized bump amplitude·sech²((x−center)/width).
    pub fn bump(bg: Arc<Background>, amplitude: f64, center: f64, width: f64) -> Self {
        Self::from_fn(bg, |x| {
            let s = (x - center) / width;
            amplitude / s.cosh().powi(2)
        })
    }

    /// Mollified kink: amplitude·tanh((x−center)/width)·exp(−((x−center)/envelope)²).
    /// Values stay uniformly bounded by |amplitude| while the second
    /// derivative grows like amplitude/width².
    pub fn kink(
        bg: Arc<Background>,
        amplitude: f64,
        center: f64,
        width: f64,
        envelope: f64,
    ) -> Self {
        Self::from_fn(bg, |x| {
            let d = x - center;
            amplitude * (d / width).tanh() * (-(d / envelope) * (d / envelope)).exp()
        })
    }

    /// Seeded random superposition of a few localized modes, rescaled until
    /// admissible.  Deterministic for a fixed seed.
    pub fn random_modes(bg: Arc<Background>, seed: u64, amplitude: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let modes: Vec<(f64, f64, f64)> = (0..4)
            .map(|_| {
                let a: f64 = rng.gen_range(-1.0..1.0);
                let c: f64 = rng.gen_range(-3.0..3.0);
                let w: f64 = rng.gen_range(1.5..3.0);
                (a, c, w)
            })
            .collect();
        let mut scale = amplitude;
        for _ in 0..40 {
            let prof = Self::from_fn(bg.clone(), |x| {
                modes
                    .iter()
                    .map(|&(a, c, w)| scale * a / ((x - c) / w).cosh().powi(2))
                    .sum()
            });
            if crate::geometry::check_admissible(&prof, crate::geometry::ASYMPTOTIC_TOL).is_ok() {
                return prof;
            }
            scale *= 0.5;
        }
        Self::zero(bg)
    }

    /// φ shifted by an additive constant (pure gauge).
    pub fn shifted(&self, c: f64) -> Self {
        let phi = self.phi.iter().map(|v| v + c).collect();
        Self { bg: self.bg.clone(), phi }
    }

    /// Full potential u = u₀ + φ at the nodes.
    pub fn u_values(&self) -> Vec<f64> {
        self.bg.u0.iter().zip(&self.phi).map(|(a, b)| a + b).collect()
    }

    pub fn sup_norm(&self) -> f64 {
        self.phi.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::model::ModelDescriptor;

    fn bg() -> Arc<Background> {
        Background::new(ModelDescriptor::cp1(), Grid::uniform(-20.0, 20.0, 128).unwrap())
    }

    #[test]
    fn length_mismatch_rejected() {
        assert!(Profile::new(bg(), vec![0.0; 5]).is_err());
    }

    #[test]
    fn random_modes_deterministic_and_admissible() {
        let a = Profile::random_modes(bg(), 7, 0.4);
        let b = Profile::random_modes(bg(), 7, 0.4);
        assert_eq!(a.phi, b.phi);
        assert!(crate::geometry::check_admissible(&a, 1e-3).is_ok());
        let c = Profile::random_modes(bg(), 8, 0.4);
        assert_ne!(a.phi, c.phi);
    }
}
