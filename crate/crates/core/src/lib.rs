//! Random-walk crawlers for directed graphs and the estimators that turn
//! their samples into node-label distributions.
//!
//! The crate covers four layers:
//!
//! * [`graph`]: immutable ground-truth graphs, exact label distributions,
//!   largest strongly connected component, synthetic power-law graphs.
//! * [`walk`]: the DUFS sampler and its special cases (FS, DURW, uniform
//!   node sampling) plus the SingleRW/MultiRW baselines, under either
//!   in-edge visibility scenario and exact budget accounting.
//! * [`estimate`]: the edge-based estimator, the hybrid estimator family
//!   (gradient MLE, EM, non-recursive closed form), the variance
//!   reduction rule and the known-mean-degree MVUE.
//! * [`analysis`]: empirical and closed-form NRMSE, head/tail summaries,
//!   joint-degree error grids and the top-decile attribute task.
//!
//! Everything here is `no_std` + `alloc`; file formats, the CLI and the
//! parallel experiment harness live in the `dufs` crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod error;
pub mod estimate;
pub mod graph;
mod math;
pub mod powerlaw;
pub mod walk;

pub use error::{Error, Result};
pub use graph::{DirectedGraph, GroundTruth, Label, LabelKind, NodeIndex, NodeRecord};
