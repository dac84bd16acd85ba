//! Hyperbolicity diagnostics and Morse-lemma experiments on finite graph
//! metrics.
//!
//! The crate measures coarse-geometric quantities exactly on finite graphs:
//! Gromov products and four-point hyperbolicity constants (`metric`), tree
//! balls, hyperbolic tessellation patches and control graphs (`graphs`),
//! discrete quasi-geodesics with mesh-length and taut replacements
//! (`quasi_geodesics`), the analytic neighborhood bounds they are tested
//! against (`bounds`), center-displacement quasi-isometries
//! (`quasi_isometries`), geodesic richness checks (`richness`), and
//! reproducible experiment drivers behind the `hypermorse` binary
//! (`experiments`).
//!
//! Every runnable capability has a worked example under `examples/`; start
//! with `cargo run -p hypermorse --example hyperbolicity`.

#![forbid(unsafe_code)]

pub mod bounds;
pub mod error;
pub mod experiments;
pub mod graphs;
pub mod metric;
pub mod quasi_geodesics;
pub mod quasi_isometries;
pub mod rational;
pub mod richness;

pub use error::{Error, Result};
