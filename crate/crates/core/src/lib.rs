//! Dunkl operators for finite reflection groups and the Dunkl
//! Ornstein-Uhlenbeck semigroup, with exact symbolic and quadrature paths.

pub mod error;
pub mod inequalities;
pub mod kernel;
pub mod numeric;
pub mod poly;
pub mod quadrature;
pub mod rational;
pub mod rootsys;
pub mod semigroup;
pub mod spectral;

pub use error::{Error, Result};
pub use poly::{PolyVector, Polynomial};
pub use rational::Rational;
pub use rootsys::{GroupKind, GroupSpec, RootSystem};
