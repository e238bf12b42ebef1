//! Tomographic analysis of 2D paraxial beam modes.
//!
//! The library computes symplectic, optical, and Fresnel tomograms of
//! Hermite-Gauss beams and of arbitrary sampled complex fields, the Shannon
//! entropies of those tomograms, the position-momentum entropic uncertainty
//! sum, and the nonnegative consistency surface `R(theta1, theta2)` built
//! from conjugate pairs of optical entropies.
//!
//! Layering:
//!
//! - [`numerics`]: Hermite polynomials, Gauss-Hermite rules, the closed
//!   Hermite-Gaussian integral, chirped 1D quadrature.
//! - [`beam`]: analytic modes, sampled fields, Fourier transform, free-space
//!   propagation, and the text field format.
//! - [`tomography`]: the three tomogram families, their conversions, and 1D
//!   reconstruction from a tomogram sampler.
//! - [`entropy`]: tomographic entropies, the entropic bound, R surfaces.

pub mod beam;
pub mod entropy;
pub mod error;
pub mod numerics;
pub mod tomography;

pub use beam::{
    fourier_transform, free_space_propagate, hg_amplitude, hg_amplitude_1d, inner_product,
    parse_field, sample, write_field, GridAxis, GridSpec, HgMode, SampledField, SpectralField,
};
pub use entropy::{
    fresnel_entropy, optical_entropy, position_momentum_entropy_sum, r_function, r_surface_scan,
    tomographic_entropy, EntropyValue, PositionMomentumEntropy, RSurface, ENTROPY_BOUND, LN_PI_E,
};
pub use error::{Error, Result};
pub use numerics::{
    gauss_hermite_rule, hermite_gaussian_integral, hermite_poly, oscillatory_line_integral,
    QuadratureSpec,
};
pub use tomography::{
    closed_form_intermediates, fresnel_tomogram, hg_tomogram_1d, homogeneity_check,
    optical_tomogram, propagation_geometry, reconstruct_correlation_1d, symplectic_tomogram_hg,
    symplectic_tomogram_numeric, tomogram_csv, tomogram_value, AxisIntermediates, BeamSource,
    OpticalAngles, PropagationGeometry, TomogramQuery, NU_EPS,
};
