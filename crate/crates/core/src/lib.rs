//! Numerical laboratory for the normalized Kähler-Ricci flow on
//! symmetry-reduced Fano models.
//!
//! The crate integrates the potential-level flow
//!
//! ```text
//!     ∂φ/∂t = log(ωⁿ/ω₀ⁿ) + φ + f₀,        ω = ω₀ + i∂∂̄φ,
//! ```
//!
//! on U(n)-invariant models reduced to one space dimension, evaluates the
//! scalar potentials (Ricci potential, Hamiltonian, modified Ricci potential)
//! and energy functionals (Aubin-Yau J, gauge-orbit infimum, modified Mabuchi
//! K-energy, Moser-Trudinger gap), and provides an independent shooting
//! oracle for the reduced Ricci-soliton equation together with convergence
//! diagnostics (Perelman-type monitors, Hölder seminorms, exponential rate
//! fits).

pub mod background;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod grid;
pub mod model;
pub mod numerics;
pub mod potentials;
pub mod profile;
pub mod soliton;

pub use background::Background;
pub use error::{CoreError, Result};
pub use flow::{
    gauge_pullback_exp_tx, holder_seminorm, rate_fit, smoothing_experiment, stationary_profile,
    DiagnosticsRecord, FlowConfig, FlowScheme, FlowState, RateFit, RunOutput, SmoothingReport,
};
pub use geometry::{check_admissible, gradient_norm, laplacian, ma_density, StencilOrder};
pub use grid::Grid;
pub use model::{ModelDescriptor, ModelKind};
pub use potentials::{
    gauge_act_potential, hamiltonian, j_functional, j_g, k_energy, k_energy_variation, mt_scan,
    modified_ricci_potential, ricci_potential, EnergyReport, MtRow, MtScanReport, PotentialReport,
};
pub use profile::Profile;
pub use soliton::{find_soliton, solve_soliton_ode, SolitonProfile};
