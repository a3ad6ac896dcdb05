//! Numerical toolkit for Hermitian geometry.
//!
//! The crate computes Chern-connection curvatures of Hermitian metrics given
//! as component evaluators on complex charts, the pointwise invariants of
//! holomorphic maps between such manifolds, and checks the ∂∂̄-Bochner
//! identities for `log W_ℓ` and `U_ℓ` by comparing a purely finite-difference
//! left-hand side against a curvature/jet right-hand side.
//!
//! Module map:
//!
//! - [`wirtinger`]: finite-difference Wirtinger jets (∂, ∂̄, ∂∂̄, ∂∂).
//! - [`geometry`]: metrics, the Chern curvature tensor and its traces, and
//!   curvature sign probes over random frames.
//! - [`maps`]: holomorphic maps, pullback metrics, normalized frames and the
//!   scalars `W_ℓ`, `U_ℓ`, `σ_ℓ`, `‖∧^ℓ∂f‖₀`.
//! - [`bochner`]: normalized scenes, both Bochner identities, connection
//!   coefficients, `∇V_ℓ` and the `Ψ` trace.
//! - [`global`]: Kähler / Gauduchon checks, Schwarz-type estimates on grids,
//!   rigidity witnesses and the torus integral inequality.
//! - [`registry`]: the built-in metrics and maps, constructed from named
//!   parameters.
//! - [`scenes`]: named (domain, target, map) triples with evaluation points.

pub mod bochner;
pub mod error;
pub mod geometry;
pub mod global;
pub mod linalg;
pub mod maps;
pub mod registry;
pub mod scenes;
pub mod tensor;
pub mod weierstrass;
pub mod wirtinger;

pub use error::{Error, Result};

pub use bochner::{BochnerReport, ConnectionCoeffs, NormalizedScene};
pub use geometry::{CurvatureTensor, FrameSample, MetricField, MetricJet, ProbeKind};
pub use global::{EstimateReport, GridKind, GridSpec, IntegralReport};
pub use maps::{HolomorphicMapField, MapScalars, NormalizedFrame};
pub use wirtinger::{ChartPoint, FdConfig, ScalarJet2};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
