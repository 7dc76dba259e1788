//! Construction and exact verification of finite involutive set-theoretic
//! solutions of the Yang-Baxter equation, their permutation groups, the
//! left braces on those groups, and the structure group.

pub mod abgroup;
pub mod perm;
pub mod solution;
pub mod family;
pub mod retraction;
pub mod permgroup;
pub mod wreath;
pub mod lattice;
pub mod brace;
pub mod structgroup;
pub mod format;
