//! Tight-binding chain with a harmonic imaginary potential.
//!
//! The chain `H = -J sum (|l><l+1| + h.c.) - i V sum l^2 |l><l| + i omega`
//! is anti-PT symmetric. Exactly one pair of its levels is (nearly) real;
//! every other level decays, so long-time dynamics collapse onto a two-level
//! system spanned by `|g>` and `|e>`, which a linear-field pi pulse swaps.
//!
//! - [`chain`]: parameters, Hamiltonian, parity and the anti-PT residual
//! - [`spectral`]: analytic Hermite-Gaussian ladder and numeric eigenmodes
//! - [`dynamics`]: RK4 and eigen-expansion propagation, fidelities, `P(t)`
//! - [`quench`]: the pi-pulse protocol

pub mod chain;
pub mod dynamics;
pub mod error;
pub mod quadrature;
pub mod quench;
pub mod spectral;

pub use chain::{anti_pt_residual, apply_parity, build_hamiltonian, ChainParams, Hamiltonian, SiteState};
pub use dynamics::{
    dirac_probability, expansion_coefficients, fidelity, make_initial_state, propagate,
    run_convergence_experiment, run_probability_experiment, ExpansionCoefficients, InitialProfile,
    IntegratorConfig, Method, ObservableSeries, StablePair, TargetSource,
};
pub use error::{Error, Result};
pub use quench::{
    impulse_parity, pulse_amplitude, quenched_hamiltonian, run_switch_experiment, PulseMode,
    PulseSchedule, QuenchPlan, SwitchOutcome, SwitchReport, TwoLevel,
};
pub use spectral::{
    analytic_energy, analytic_wavefunction, biorthogonality_matrix, dirac_overlap, eigenvalues,
    hermite_polynomial, numeric_spectrum, Branch, EigenMode, LadderLabel, Spectrum,
};

pub use num_complex::Complex64;
