//! Concrete spaces: analytic Minkowski space and finite causal sets.

pub mod causal_set;
pub mod json;
pub mod longest_path;
pub mod minkowski;
pub mod sprinkle;

pub use causal_set::{CausalSet, Diamond};
pub use json::{assemble_space, build_space, parse_space, SpaceDocument};
pub use longest_path::{longest_path_tau, Link, LongestPaths};
pub use minkowski::{minkowski_le, minkowski_ll, minkowski_tau, MinkowskiDiamond, MinkowskiSpace, Region};
pub use sprinkle::{sprinkle, SprinkleConfig};
