//! Inverse curvature flows of convex radial graphs in the round sphere `S^{n+1}`,
//! quermassintegral bookkeeping along the flow, Alexandrov-Fenchel type
//! functionals, and stereographic transfer of the limiting curvature bounds.

pub mod cli;
pub mod config;
pub mod error;
pub mod flow;
pub mod functionals;
pub mod geometry;
pub mod numerics;
pub mod profile;
pub mod stereo;
pub mod suite;
pub mod symfunc;

pub use error::{Error, Result};
