//! Prize-collecting TSP and Steiner tree: LP relaxations, splitting-off,
//! anchored tree decompositions, pipage rounding and the resulting
//! approximation algorithms, plus exact oracles for small instances.

pub mod algorithms;
pub mod cuts;
pub mod decomposition;
pub mod graph;
pub mod instance;
pub mod lp;
pub mod oracle;
pub mod rational;
pub mod rounding;
pub mod splitting;
pub mod tour;

pub use rational::Rational;
