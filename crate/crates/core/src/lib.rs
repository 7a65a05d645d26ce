//! Sequentially generated tensor-network states as explicit quantum circuits.

pub mod circuit;
pub mod error;
pub mod exec;
pub mod families;
pub mod io;
pub mod lattice;
pub mod lightcone;
pub mod linalg;
pub mod network;
pub mod photonic;
pub mod rng;
pub mod schedule;
pub mod statevector;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Exec;
pub use num_complex::Complex64 as C64;
