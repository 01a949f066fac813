//! Optimal classification forests: the algorithmic core.
//!
//! This crate holds everything that is pure computation: the complete binary
//! tree index algebra, decision trees and majority-vote forests, the
//! solver-agnostic mixed-integer model together with its feasibility auditor,
//! the forest formulation builder, an exhaustive oracle for tiny instances,
//! CART / random-forest baselines, a kernel SVM used to score training
//! subsets, min-max scaling and cross-validation fold plans.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the external
//! solver adapter, the experiment harness and the command line live in the
//! `ocf` companion crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod baselines;
pub mod dataset;
pub mod error;
pub mod folds;
pub mod formulation;
pub mod milp;
pub mod oracle;
pub mod rng;
pub mod sampling;
pub mod synthetic;
pub mod topology;
pub mod tree;

pub use dataset::{Dataset, MinMaxScaler, Provenance};
pub use error::{Error, Result};
pub use milp::{MilpModel, Relation, VarId, VarKind};
pub use topology::{Ancestors, NodeIndex, TreeTopology};
pub use tree::{DecisionTree, Forest, Leaf, Split};

/// Binary class label. Always `0` or `1`.
pub type Class = u8;
