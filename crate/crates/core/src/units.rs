//! Physical constants and the conversions between working units.
//!
//! Working units: level energies in GHz, Hamiltonian entries in MHz, fields in
//! V/cm, times in µs, distances in µm, dipoles in atomic units.

/// Hartree energy in MHz.
pub const HARTREE_MHZ: f64 = 6.579_683_920_502e9;
/// Atomic unit of electric field in V/cm.
pub const AU_FIELD_V_PER_CM: f64 = 5.142_206_747_63e9;
/// Bohr radius in µm.
pub const BOHR_UM: f64 = 5.291_772_109_03e-5;

pub fn ghz_to_hartree(e: f64) -> f64 {
    e * 1e3 / HARTREE_MHZ
}

pub fn um_to_bohr(r: f64) -> f64 {
    r / BOHR_UM
}
