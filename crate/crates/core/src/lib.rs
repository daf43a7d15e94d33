//! Correlator Fourier analysis, classical surrogates and variance calculus for
//! quantum circuit Born machines at desk scale.
//!
//! Conventions shared by every module:
//! - rotations are `R_P(θ) = exp(-i θ/2 P)`;
//! - qubit 0 is the most significant bit of a basis index, and subset and
//!   Pauli masks use the same bit positions.

pub mod algebra;
pub mod ansatz;
pub mod discrepancy;
pub mod error;
pub mod fourier;
pub mod hamiltonian;
pub mod losses;
pub mod pauli;
pub mod rng;
pub mod statevector;
pub mod stats;
pub mod surrogates;
pub mod training;
pub mod variance;

pub use algebra::{algebra_intersection, lie_closure, named_dla, DlaKind, OperatorAlgebra};
pub use ansatz::{build_ansatz, AnsatzKind, AnsatzSpec, IqpLayout};
pub use discrepancy::{discrepancy_report, DiscrepancyReport};
pub use error::{Error, Result};
pub use fourier::{
    correlation_spectrum, decompose, empirical_correlators, parity_kernel, reconstruct, rfc_sample, CorrelatorVector,
    EstimatorMode, PseudoDistribution, RfcPolicy, SubsetIndex, TruncationSpec,
};
pub use hamiltonian::{
    build_hamiltonian, ground_state, load_binary_csv, BinaryDataset, GroundStateResult, Hamiltonian, LatticeSpec, Model,
};
pub use losses::{distance, KernelSpec, LossSpec, PreparedLoss};
pub use pauli::{pauli_product, Pauli, PauliString, Phase};
pub use statevector::{born_distribution, simulate, z_correlator, Circuit, Gate, StateVector};
pub use stats::McEstimate;
pub use training::{
    deploy_evaluate, init_from_data, mse_k, train, GradientMethod, InitKind, Optimizer, SurrogateKind, TrainConfig,
    TrainResult,
};
