//! Central-moment expansion of the quenched QFI around the clean Hamiltonian.

pub mod chain;
pub mod kernels;
pub mod report;
pub mod terms;

pub use kernels::{build_kernels, KernelTensors, Kernels};
pub use report::{
    clean_qfi, optimize_resilience, predicted_marker, report_from_terms, robustness_report, tilde_g1, tilde_g2,
    tilde_g3, Classification, Expectation, RobustnessReport, EPS_CLASS,
};
pub use terms::{build_expansion, dyson_order, expand_generator, second_order_from_tensors, ExpansionTerms};
