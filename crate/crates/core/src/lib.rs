//! Exact combinatorial optimization on trees: k-submodular minimization by max-flow, steepest
//! descent for 2-separable L-convex objectives, and half-integral minimum-cost multiflows.

pub mod cli;
pub mod flow;
pub mod gen;
pub mod io;
pub mod ksubmod;
pub mod lconvex;
pub mod multiflow;
pub mod oracles;
pub mod rational;
pub mod trees;
