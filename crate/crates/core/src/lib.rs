//! Exact structure-constant algebras and their automorphism groups.

pub mod field;
pub mod linalg;
pub mod poly;
pub mod algebra;
pub mod graded;
pub mod perm;
pub mod constructions;
pub mod autgroup;
