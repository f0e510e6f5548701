//! Exponent calculators, inequality ratios and the test-function machinery
//! behind the blow-up argument.

pub mod bump;
pub mod exponents;
pub mod inequalities;
pub mod lower_bound;

pub use bump::{sublaplacian_fd, test_function_eval, Bump, BumpSpec, TestFunctionValue};
pub use exponents::{
    blowup_sign_exponent, critical_exponent, gamma_tilde, global_existence_threshold, gn_theta,
    lifespan_exponent, regularity_exponent, ExponentQuery,
};
pub use inequalities::{family_maxima, gn_ratio, hls_ratio, random_family, FamilyMaxima, SmoothSample};
pub use lower_bound::{data_lower_bound_check, lower_bound_fit, LowerBoundCheck, LowerBoundFit};
