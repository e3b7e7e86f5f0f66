//! Localization physics of the Aubry-André-Harper chain under a rapidly
//! oscillating flux: the high-frequency effective Hamiltonian, tridiagonal
//! eigensolvers, real- and dual-space inverse participation ratios and
//! parameter scans.

pub mod cli;
pub mod dual;
pub mod error;
pub mod model;
pub mod oracle;
pub mod scan;
pub mod floquet;
pub mod specfun;
pub mod spectra;

pub use error::{Error, Result};
