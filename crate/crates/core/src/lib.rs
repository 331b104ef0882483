//! Long-range percolation on the hierarchical group `Ω_N`.
//!
//! The crate is `no_std` (it needs `alloc`) and covers the algorithmic side of
//! the toolkit:
//!
//! * [`hier`]: exact ultrametric arithmetic on the truncated ball `B_k(0)`.
//! * [`model`]: closed-form connection laws and the bounds built on them.
//! * [`sampler`]: exact shell-binomial sampling of the random graph and
//!   monotone thinning between connectivity profiles.
//! * [`cluster`]: union-find components, per-ball clusters and densities,
//!   annulus cutsets, skipping edges, diameters.
//! * [`renorm`]: Monte Carlo iteration of the density renormalization map.
//! * [`electrical`]: effective resistance with unit resistors, flow energy and
//!   cutset lower bounds.
//! * [`walk`]: simple random walks on clusters.
//! * [`classify`] and [`sweep`]: finite-depth growth classification and
//!   coupled sweeps over the polynomial exponent.
//!
//! IO, file formats and the command line live in the `hierperc` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod classify;
pub mod cluster;
pub mod electrical;
mod error;
pub mod graph;
pub mod hier;
pub mod model;
pub mod renorm;
pub mod rng;
pub mod sampler;
pub mod sweep;
pub mod walk;

pub use error::{Error, Result};
pub use graph::{Adjacency, Edge, PercolationGraph, SampleConfig};
pub use hier::{hdist, AnnulusSpec, BallSpec, HAddress, Hierarchy};
pub use model::{AnalysisParams, ConnectivityProfile, ScheduleProfile};
