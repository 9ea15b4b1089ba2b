//! Exact and Monte Carlo coefficient moments of whole-plane SLE and
//! Lévy–Loewner maps, the Beliaev–Smirnov equation with its explicit
//! solutions, and the integral-means spectra of these maps.

pub mod bs_pde;
pub mod closed_forms;
mod error;
pub mod levy;
pub mod mc;
pub mod scalars;
pub mod spectra;
pub mod words;

pub use error::{Error, Result};
pub use levy::{Kappa, LevySymbol};
pub use mc::{Driver, McConfig, McEstimate, McTable};
pub use scalars::{Poly, RatFunc, Scalar};
pub use words::{CoeffFamily, FamilyKind, Word};
