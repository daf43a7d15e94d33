//! Classical surrogates for circuit correlators.

pub mod iqp;
pub mod propagation;
pub mod rmps;

pub use iqp::{
    iqp_anticommuting_set, iqp_expansion_terms, iqp_surrogate_correlator, iqp_surrogate_correlators,
    iqp_surrogate_detailed, iqp_truncated_prob, IqpEvaluation, IqpSpec, PropagationTerm,
};
pub use propagation::{pauli_propagate, pauli_propagate_detailed, PropagationReport};
pub use rmps::{
    rmps_correlator_variance, rmps_marginal_variance, rmps_mc_estimate, rmps_mc_truncated_prob, rmps_renyi2_max,
    rmps_transfer_product, rmps_truncated_prob_variance, RmpsParams, SiteOp, TransitionMatrix,
};
