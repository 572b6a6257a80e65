//! Prescribed spacetime-mean-curvature flows of graphs in null cones, STCMC
//! foliations above a MOTS, and barrier certificates.

pub mod background;
pub mod barriers;
pub mod base;
pub mod cli;
pub mod config;
pub mod error;
pub mod flow;
pub mod foliation;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod stability;
pub mod validate;

pub use error::{Error, Result};
