//! Symbolic Pauli algebra: strings, real operator expansions, coupling graphs.

mod coupling;
mod expansion;
mod string;

pub use coupling::{is_entangling, max_coupling, CouplingGraph, EntanglingVerdict, MaxCoupling};
pub use expansion::{HamExpansion, ZERO_TOLERANCE};
pub use string::{Pauli, PauliString};
