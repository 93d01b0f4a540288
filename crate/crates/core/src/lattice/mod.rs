//! Positive projections, the lattice operations they induce, peripheral
//! spectra and their cyclicity.

pub mod cone;
pub mod frobenius;
pub mod markov;
pub mod peripheral;

pub use cone::{induced_lattice_ops, verify_lattice_isomorphism, verify_positive_projection, ConeOrder, InducedLattice};
pub use frobenius::{frobenius_oracle, strongly_connected_components, FrobeniusComponent, FrobeniusPrediction};
pub use markov::{markov_power_mechanism, CompositionOperator};
pub use peripheral::{
    check_cyclicity, cyclicity_report, default_k_max, peripheral_spectrum, peripheral_spectrum_default, Cyclicity,
    PeripheralSpectrum, TOL_ANGLE, TOL_RADIUS_REL,
};
