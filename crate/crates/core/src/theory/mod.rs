//! Entropy bounds and exact enumeration checks of the theoretical claims.

pub mod appendix_b;
pub mod bounds;
pub mod checks;
pub mod mi;
pub mod prop3;
pub mod prop4;

pub use appendix_b::{appendix_b_distribution, appendix_b_experiment, appendix_b_mi, AppendixBMi, AppendixBResult};
pub use bounds::{
    binary_entropy, e_max, fano_bound, invert_reverse_fano, reverse_fano, theorem1_eta, theorem1_kappa, theorem1_terms,
    EMax, Theorem1Terms, E_MAX_UPPER,
};
pub use checks::{check_condition1, check_well_behaved, check_well_behaved_tol, Condition1, WellBehaved};
pub use mi::{conditional_mi, exact_fidelity, output_conditional_mi, ExactFidelity, ExplanationFunction, GraphDistribution, MiTarget};
pub use prop3::{prop3_enumerate, Prop3Row, Prop3Table};
pub use prop4::{isotonic_increasing, PROP4_TOLERANCE, prop4_alphas, prop4_monotonicity, prop4_setup, Prop4Row, Prop4Table};
