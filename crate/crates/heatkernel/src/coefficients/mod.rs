//! Local heat-kernel densities `a₀(x)` and `a₁(x)` for
//! `P = -(g^{μν} u ∂_μ∂_ν + v^μ ∂_μ + w)`.

mod densities;
pub mod geometry;
mod jet;
mod pipeline;

pub use densities::{
    a0_local, a0_projector_case, a1_local_invariant, a1_local_raw, a1_scalar_symbol, change_variables,
    check_projector_symbol, gauge_transform, linear_coordinate_change, normalized_symbol, selfadjoint_from,
    vector_projector_symbol, GaugeJet, SelfAdjointData,
};
pub use geometry::{scalar_curvature, scalar_curvature_from_riemann};
pub use jet::{InvariantCoefficients, OperatorCoefficients, PointJet};
pub use pipeline::{a1_local_pipeline, first_order_terms};
