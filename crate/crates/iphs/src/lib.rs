//! Modeling and simulation of irreversible port-Hamiltonian systems.
//!
//! An irreversible port-Hamiltonian system is generated jointly by a
//! Hamiltonian H and an entropy function S over a constant skew-symmetric
//! structure matrix J. Its drift γ {S, H}_J J ∂H/∂x conserves H while
//! producing entropy at the rate σ_int = γ {S, H}²_J ≥ 0, and the port
//! maps derived in [`embedding`] extend this structure to the system
//! boundary: the resulting input/output pair satisfies the exact balance
//! identities
//!
//! ```text
//! dH/dt = yᵀu            (losslessness)
//! dS/dt = τᵀy + σ_int + σ_port,   σ_int, σ_port ≥ 0
//! ```
//!
//! which [`system::IphsSystem::balance`] evaluates pointwise and
//! [`integrate::simulate`] audits along trajectories.
//!
//! The built-in [`models`] implement two-compartment heat conduction with
//! a thermostat in both the affine (legacy) and irreversible-port
//! formulations.

pub mod bracket;
pub mod embedding;
pub mod error;
pub mod field;
pub mod integrate;
pub mod models;
pub mod system;

pub use bracket::{is_skew, poisson_bracket, port_structure, PortMatrix, StructureMatrix};
pub use embedding::{
    derive_irreversible_port, extend_irreversible, extend_reversible, restrict_reversible,
    DerivedPort, ExtendedState, IrreversibleExtension, ReversibleExtension, ReversiblePhs,
};
pub use error::{Error, Result};
pub use field::{check_gradient, GradientCheck, ScalarField};
pub use integrate::{
    balance_report, rk4_step, simulate, BalanceReport, InputSignal, SimOptions, SimulationError,
    Trajectory,
};
pub use models::{
    builtin, ideal_gas_temperature, two_compartment_drift, two_compartment_irreversible,
    two_compartment_legacy, BuiltinModel, TwoCompartmentParams,
};
pub use system::{BalanceSample, GammaFn, IphsSystem, IrreversiblePort, LegacyPort, PortMap};
