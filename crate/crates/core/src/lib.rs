//! Two-level dynamics under hyperbolic-secant pulses and phase-alternated
//! pulse trains, with classical and quantum Fisher information for
//! resonance-frequency estimation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod composite;
pub mod error;
pub mod estimation;
pub mod fisher;
pub mod ode;
pub mod propagator;
pub mod special;

pub use composite::{
    rescale_pulse, same_phase_power, sequence_jet_direct, sequence_probabilities,
    sequence_propagator, sequence_propagator_chebyshev, sequence_propagator_direct, AnalyticPhase,
    Backend, SequenceSpec,
};
pub use error::{Error, Result};
pub use estimation::{
    argmin_estimator, log_likelihood, mle_estimator, run_experiment, simulate_counts,
    simulate_scan, variance_report, EstimationReport, Estimator, ExperimentReport, ScanProtocol,
};
pub use fisher::{
    classical_fisher_binary, classical_fisher_from_state, classical_fisher_single_closed,
    crb_variance, curvature_on_resonance, fisher_from_jet, fisher_on_resonance_composite,
    fisher_report, fwhm, quantum_fisher_pure, FisherMethod, FisherReport, ProbabilityProfile,
};
pub use num_complex::Complex64 as C64;
pub use ode::{integrate_pulse, integrate_sequence, IntegrationConfig};
pub use propagator::{
    cayley_klein, cayley_klein_jet, propagator_detuning_derivative, transition_probabilities,
    PropagatorJet, PulseParams, RosenZenerParams, Su2Propagator,
};
