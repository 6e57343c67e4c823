//! Linear-algebra and closed-form analysis of the scheduling protocol.

pub mod charpoly;
pub mod coloring;
pub mod eigen;
pub mod fairness;
pub mod fixed_point;
pub mod matrices;

pub use charpoly::{char_poly_eval, lambda2_approx, mu, perturbation_roots, PerturbationRoot};
pub use coloring::{chromatic_number, coloring_from_slots, prediction_coloring, state_coloring, Coloring, ColoringVerdict};
pub use eigen::{analyse, eigen_residual, eigenvalues_of, SpectralReport};
pub use fairness::{check_fairness, prediction_fairness, state_fairness, FairnessReport, FairnessWitness};
pub use fixed_point::{
    default_arrangement, fixed_point_multiclique, fixed_point_single_clique, fixed_point_two_clique,
    predict_fixed_point, AffineRatio, Arrangement, FixedPointPrediction, PredictionKind, ThetaRange,
};
pub use matrices::{build_clique_system, column_sums, shift, u_block, CliqueSystem};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("eigenvalue iteration did not converge")]
    EigenNoConvergence,
    #[error("unsupported arrangement: {0}")]
    UnsupportedArrangement(String),
    #[error("assumption violated: {0}")]
    AssumptionViolated(String),
    #[error("{nodes} nodes exceed the exact chromatic number limit of {limit}")]
    TooLargeForExactChromatic { nodes: usize, limit: usize },
}
