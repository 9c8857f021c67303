//! Numerical checks of the convergence certificates and of the behaviours
//! that motivate the slingshot schedules (divergence, cycling, tightness).

mod certificate;
mod divergence;
mod expansion;
mod tightness;

pub use certificate::{
    certificate_coefficient, check_two_step_progress, coefficient_monotone_in_mu, two_step_trajectories,
    verify_two_step_certificate, CertificateReport, ProgressReport, TwoStep,
};
pub use divergence::{check_cycling_counterexamples, check_divergence_witness, CyclingCase, DivergenceWitness, WitnessKind};
pub use expansion::{check_hamiltonian_equivalence, check_second_order_expansion};
pub use tightness::{lower_bound_tightness, quadratic_lower_bound_tightness, TightnessReport};
