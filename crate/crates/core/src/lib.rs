//! Numerical laboratory for radial fractional Orlicz maximal operators on
//! upper Ahlfors measures.
//!
//! Measures are finite atomic discretizations, functions are values on the
//! atoms, and maximal operators are suprema over explicit cube families.
//! The [`verify`] module runs one experiment per inequality and the
//! [`runner`] turns a flat config into CSV reports.

pub mod config;
pub mod cubes;
pub mod error;
pub mod grid;
pub mod luxemburg;
pub mod maximal;
pub mod measure;
pub mod quadrature;
pub mod runner;
pub mod verify;
pub mod young;

pub use config::Config;
pub use cubes::Cube;
pub use error::{Error, Result};
pub use maximal::{CubeFamilySpec, MaximalField, Operator};
pub use measure::{AtomicMeasure, MuFunction};
pub use young::YoungFunction;
