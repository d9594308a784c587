//! Packing density, counting functions, volume entropy and the bounds that
//! relate them.

mod bounds;
mod counting;
mod curves;
mod entropy;
mod packing;

pub use bounds::{
    delta_xi_hdim, rho_lower_bound, two_curve_lower_bound, word_count_lower_bound, xi_of_delta, BoundaryInvariants,
    TwoCurveBound,
};
pub use counting::{counting_function, counting_function_with_budget, default_basepoint, radius_grid, CountingTable};
pub use curves::{cyclically_related, two_curve_pair, two_curve_pair_with_budget, CurvePair, DEFAULT_LOOP_BUDGET};
pub use entropy::{entropy_estimate, EntropyEstimate, DEFAULT_WINDOW_FRACTION};
pub use packing::{distance_to_sigma, packing_density, PackingEstimate};
