//! Exact p-adic analysis: capped-precision Q_p arithmetic, the analytic
//! diffeomorphism group of Z_p as truncated power series, Haar integration,
//! Witt vectors, Tate-curve theta functions and a small log-theta lattice.

pub mod diffgroup;
pub mod error;
pub mod integrate;
pub mod lattice;
pub mod padic;
pub mod ramified;
pub mod series;
pub mod theta;
pub mod witt;

pub use error::{Error, Result};
pub use padic::{PadicNumber, PrimeContext};
pub use series::TruncSeries;
