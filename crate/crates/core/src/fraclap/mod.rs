//! Fractional Laplacians on the `⟨x⟩^{−q}` family and on grid functions.

mod closed;
mod expansion;
mod grid;
mod quadrature;

pub use closed::{fourier_transform_polydecay, value_at_origin, vanishing_theta};
pub use expansion::{integer_laplacian_coeffs, japanese, norm, DecayExpansion, PolyDecayFunction, PowerSum};
pub use grid::{frequency, FftPlan, spectral_apply, squared_frequencies, GridFunction};
pub use quadrature::{
    decay_exponent, fractional_laplacian_radial, normalization, pointwise_bound_check, singular_quadrature_apply,
    DecayFit, DECAY_SLACK,
};
