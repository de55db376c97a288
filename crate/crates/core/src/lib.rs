//! Diffraction of aperiodic point sets, computed two ways: closed forms
//! from recursions and renewal identities, and empirical estimates from
//! sampled configurations. The two routes are meant to be compared on the
//! same grids, so the shared types live here and everything re-exports
//! through the crate root.

pub mod comb;
pub mod error;
pub mod export;
pub mod fourier;
pub mod gue;
pub mod hermitian;
pub mod palm;
pub mod renewal;
pub mod stochastic;
pub mod substitution;
pub mod tm_spectrum;

pub use num_complex::Complex64;

pub use comb::{
    atom_ratio_test, atom_slope_estimate, binned_pair_spectrum, binned_periodogram, fejer_density,
    lattice_autocorrelation, lattice_autocorrelation_spaced, nyquist_oversample, pair_correlation,
    pair_grid, pair_transform, periodogram, periodogram_direct, smooth, wiener_sigma, AutocorrCoeffs,
    EmpiricalDensity, KGrid, PairCorrelation, SpectralMeasure, WeightedComb,
};
pub use error::{Error, Result};
pub use export::{
    validate_envelope, AtomRow, Comparison, Envelope, OutputFormat, Series, ENVELOPE_SCHEMA,
    SCHEMA_VERSION,
};
pub use gue::{
    gue_diffraction_empirical, gue_ensemble, gue_eigenvalue_points, gue_matrix,
    gue_spectral_density, semicircle_radius,
};
pub use hermitian::hermitian_eigenvalues;
pub use palm::{
    average_autocorr, boundary_term_check, campbell_pairing, empirical_autocorr,
    empirical_autocorr_alt, marked_poisson_autocorr, palm_intensity_estimate, polar_decompose,
    quadratic_form, sample_ensemble, ComplexCorrelation, GroundProcess, MarkLaw,
    MarkedProcessModel, PolarForm, RotatedConfiguration,
};
pub use renewal::{
    fibonacci_tiling_density, renewal_autocorr_binned, renewal_diffraction, renewal_measure,
    renewal_relation_residual, renewal_sample, DiffractionResult, RenewalContent,
    RenewalRealization, RenewalSeries, WaitingTime, DEFAULT_BURN_IN_GAPS,
};
pub use stochastic::{
    bernoulli_analytic, bernoulli_comb, bernoullise, dimer_analytic, dimer_factor, dimer_sample,
    entropy, factor_analytic, iid_sign_field, ledrappier_sample, row_average_autocorrelation,
    signs_to_weights, three_point_average, DimerWord, LedrappierPatch, RandomSource,
};
pub use substitution::{
    fibonacci_bragg, pd_block_map, reduce_signs, rs_value, tm_two_sided, tm_value, FibonacciChain,
    RsCorrelations, SubstitutionRule, TmAutocorrelation, GOLDEN_RATIO, SQRT5,
};
pub use tm_spectrum::{
    cantor_function, riesz_density, tm_distribution, volterra_step, DistributionFunction,
};
