//! Heat kernels and heat-equation solutions on homogeneous trees.
//!
//! The numerical core is generic over [`Real`] (`f32` / `f64`); exact tree
//! combinatorics use big rationals. Concrete `f64` aliases live at the crate
//! root for callers that do not care about the scalar type.

pub mod asymptotics;
pub mod caloric;
pub mod error;
pub mod heat_tree;
pub mod logval;
pub mod scalar;
pub mod special_fn;
pub mod spectral;
pub mod tree_geom;

pub use error::{Error, Result};
pub use logval::LogVal;
pub use scalar::Real;

pub type LogVal64 = LogVal<f64>;
pub type ZKernelTable64 = special_fn::ZKernelTable<f64>;
pub type HeatProfile64 = heat_tree::HeatProfile<f64>;
pub type RadialFn64 = tree_geom::RadialFn<f64>;
pub type FiniteFn64 = tree_geom::FiniteFn<f64>;
