//! Exact solvers for degree-constrained spanning tree problems.
//!
//! Given a graph and a set D(v) of allowed degrees for every vertex, decide
//! whether a spanning tree exists whose degrees all lie in their sets, and
//! optionally find the cheapest one. Bounded (deg ≤ b(v)) and specified
//! (deg = d(v)) constraints reduce to the set form.
//!
//! Four engines are provided, each parameterized by a structural witness:
//! a tree decomposition, a path decomposition, a linear arrangement (via its
//! cutwidth), or an NLC expression. The first three are one-sided Monte Carlo
//! algorithms built on Cut&Count; the NLC engine is deterministic and handles
//! unweighted instances. [`oracle`] holds exhaustive reference solvers.

pub mod cutcount;
pub mod decomp;
pub mod instance;
pub mod io;
pub mod oracle;
pub mod engine;
pub mod gen;
pub mod harness;
pub mod par;
