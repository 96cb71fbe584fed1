//! Simulation and audit toolkit for a single qubit dephasing in a
//! non-Markovian bosonic bath while being steered by instantaneous coherent
//! pulses.
//!
//! The bath has an Ohmic-class spectral density J(ω) = ω^s e^{-ω} (cutoff
//! units). For Ohmicity s > 2 the dephasing rate γ(t) turns negative for a
//! while, and the purity lost early can partially revive. That revival makes
//! a simple control idea attractive: park the state near a pole while the
//! flux is lossy, kick it onto the equator exactly when the rate changes
//! sign, and let the revival inflate the coherence back to unity. Whether
//! this idea survives contact with the actual physics depends on a modeling
//! assumption that this crate makes easy to test: does the dissipator stay
//! fixed when the control Hamiltonian acts?
//!
//! The crate therefore ships three propagators (free, fixed-dissipator
//! controlled, exact microscopic controlled), complete-positivity audits
//! that expose where the fixed-dissipator composition stops being a quantum
//! channel (Choi spectrum, Bloch-ball excursions, accessible-set checks),
//! the single-pulse coherence optimizer with an exhaustive grid-search
//! verifier, and a discretized-bath oracle that reproduces the closed forms
//! from nothing but coherent-state algebra. The `dephase` binary exposes all
//! of it as CSV/JSON/SVG emitting subcommands.
//!
//! Units: ħ = 1 and ω_c = 1 throughout; every time is dimensionless.

pub mod bloch;
pub mod cli;
pub mod error;
pub mod maps;
pub mod numerics;
pub mod optimizer;
pub mod oracle;
pub mod report;
pub mod spectral;
pub mod svg;

pub use bloch::{BlochVector, DensityMatrix2, Trajectory};
pub use error::{Error, Result};
pub use maps::{ControlProtocol, Mode, QubitMap};
pub use oracle::DiscretizedEnv;
pub use spectral::SpectralParams;
