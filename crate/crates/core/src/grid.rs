use crate::error::{CoreError, Result};

/// Uniform grid on the truncated reduction coordinate x in [x_min, x_max].
///
/// The noncompact log-fiber coordinate is truncated; all discrete operators
/// assume uniform spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub num_points: usize,
    pub h: f64,
    pub nodes: Vec<f64>,
}

impl Grid {
    pub const MIN_POINTS: usize = 16;

    pub fn uniform(x_min: f64, x_max: f64, num_points: usize) -> Result<Self> {
        if !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(CoreError::InvalidInput(format!(
                "grid bounds must satisfy x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if num_points < Self::MIN_POINTS {
            return Err(CoreError::InvalidInput(format!(
                "grid needs at least {} points, got {num_points}",
                Self::MIN_POINTS
            )));
        }
        let h = (x_max - x_min) / (num_points - 1) as f64;
        let nodes = (0..num_points).map(|i| x_min + i as f64 * h).collect();
        Ok(Self { x_min, x_max, num_points, h, nodes })
    }

    /// Trapezoid quadrature of node values over the grid.
    pub fn trapezoid(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.num_points);
        let inner: f64 = values[1..values.len() - 1].iter().sum();
        self.h * (0.5 * (values[0] + values[values.len() - 1]) + inner)
    }
}
