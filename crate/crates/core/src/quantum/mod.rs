//! Quantum tomograms of pure states and their inverse maps.

mod amplitude;
mod box_well;
mod closed_form;
mod state;
mod wavefunction;
mod wigner;

pub use amplitude::{
    amplitude_generating, coherent_amplitude, hermite_amplitude, momentum_amplitude, position_amplitude, tomogram_amplitude,
    TomogramAmplitude,
};
pub use box_well::{box_tomogram, box_tomogram_stationary_phase, box_unit_energy_hbar};
pub use closed_form::{
    cat_interference, cat_interference_phase, cat_tomogram, coherent_tomogram, hermite_tomogram, superposition_cross_term,
    superposition_tomogram,
};
pub use state::{cat_norm, coherent_centre, parse_state, CustomState, Parity, StateKind, StateSpec, Window, CUSTOM_NORM_TOL};
pub use wavefunction::{
    representation, state_tomogram, tomogram_from_wavefunction, wavefunction_tomogram_value, Representation, CUSTOM_MASS_TOL,
};
pub use wigner::{
    density_from_tomogram, density_grid_from_tomogram, density_matrix, required_nu_slices, tomogram_from_wigner, wigner_from_density,
    wigner_from_tomogram, wigner_grid_from_density, wigner_grid_from_tomogram, HERMITIAN_TOL,
};
