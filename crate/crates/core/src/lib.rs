//! Congruence quotients of Bianchi groups: quadratic integer arithmetic,
//! exact Dirichlet domains, glued triangulations, homology and coset
//! enumeration.

// index loops read closer to the matrix and table formulas they implement
#![allow(clippy::needless_range_loop)]

pub mod fpgroups;
pub mod geometry;
pub mod homology;
pub mod ring;
pub mod simplify;
pub mod triangulation;
