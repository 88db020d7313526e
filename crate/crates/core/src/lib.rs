//! Massey products, unitriangular groups and the cohomology computations around them.

pub mod modarith;
pub mod unigroup;
pub mod conjact;
pub mod cohom;
pub mod massey;
pub mod brauer;
