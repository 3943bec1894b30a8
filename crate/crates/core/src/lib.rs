//! Algorithmic-complexity estimation and minimal-information-loss sparsification.
//!
//! - [`ctm`]: Turing-machine enumeration and Coding Theorem Method tables.
//! - [`bdm`]: Block Decomposition Method and block entropy.
//! - [`graph`]: simple graphs and the measures used to evaluate sparsifiers.
//! - [`mils`]: information contributions and deletion of the least informative elements.
//! - [`baselines`]: random deletion, spanning trees, transitive reduction, spectral sampling.
//! - [`eca`]: elementary cellular automata and region coarse-graining.

pub mod baselines;
pub mod bdm;
pub mod ctm;
pub mod eca;
pub mod graph;
pub mod mils;
pub mod rng;
