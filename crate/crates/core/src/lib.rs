//! Exact computations for Frobenius algebras, quantum potentials and
//! nilpotent orbits of Hodge-Tate variations of Hodge structure.

pub mod asymptotics;
pub mod doc;
pub mod error;
pub mod forms;
pub mod frobenius;
pub mod hodge;
pub mod matrix;
pub mod quantum;
pub mod rational;
pub mod report;
pub mod series;
pub mod subspace;
pub mod zseries;

pub use error::{Error, Result};
pub use matrix::{Mat, SeriesMatrix};
pub use rational::Rat;
pub use series::{Monomial, QSeries};
