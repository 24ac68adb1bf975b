//! Exact Cuntz-semigroup computations for splitting interval algebras.

pub mod cusemigroup;
pub mod document;
pub mod element;
pub mod entourage;
pub mod error;
pub mod extnat;
pub mod lifting;
pub mod morphism;
pub mod pl;
pub mod rational;
pub mod sample;
pub mod spectrum;
pub mod tower;

pub use cusemigroup::RankFunction;
pub use element::{CuElement, Target};
pub use error::{Error, Result};
pub use extnat::ExtNat;
pub use rational::Q;
pub use spectrum::{LevelSet, Shape, SpectrumPoint};
