//! Exact desk-scale simulator of an optical Josephson junction.
//!
//! Two trapped condensates are coupled by Bragg-outcoupled atoms traveling
//! through a ring waveguide. Within the fixed-total-number sector this
//! reduces to a two-mode Josephson Hamiltonian, which the crate simulates
//! exactly (dense eigendecomposition, no time stepping). On top of that
//! sit the twin-Fock phase-measurement protocol and its closed-form
//! coefficient formulas, the interference collapse/revival readout, a
//! full trap+ring model used to validate the adiabatic elimination of the
//! waveguide modes, and the three-level Bragg ladder with its effective
//! two-photon coupling.
//!
//! Everything is a pure function over immutable inputs; values are safe to
//! share across threads.

pub mod bragg;
pub mod error;
pub mod fock;
pub mod interference;
pub mod linalg;
pub mod ode;
pub mod protocol;
pub mod ring;
pub mod selftest;

pub use error::{Error, Result};

pub use ndarray;
pub use num_complex;
