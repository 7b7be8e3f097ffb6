//! Simulation of RF-assisted three-body Förster resonances in a chain of
//! three Rb Rydberg atoms and of the CCΦ gate built on them.
//!
//! Everything numerical is generic over [`scalar::Scalar`] (`f32`, `f64`);
//! the aliases below fix `f64`, which the Rydberg energy scale needs.
//! Units: energies MHz (frequency units), time µs, field V/cm, distance µm.

pub mod atomic_data;
pub mod collective_basis;
pub mod dynamics;
pub mod error;
pub mod fidelity;
pub mod floquet;
pub mod gate_engine;
pub mod hamiltonian;
pub mod linalg;
pub mod matrix_elements;
pub mod ode;
pub mod optimizer;
pub mod scalar;
pub mod special;
pub mod units;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Real = f64;
pub type Constants = atomic_data::AtomicConstants<Real>;
pub type Basis = collective_basis::BasisSet<Real>;
pub type Drive = hamiltonian::FieldDrive<Real>;
pub type Model = hamiltonian::HamiltonianModel<Real>;
pub type Hamiltonian = hamiltonian::AssembledHamiltonian<Real>;
pub type Schedule = gate_engine::PulseSchedule<Real>;
pub type Setup = gate_engine::GateSetup<Real>;
pub type Gate = gate_engine::GateResult<Real>;
pub type Report = fidelity::FidelityReport<Real>;
