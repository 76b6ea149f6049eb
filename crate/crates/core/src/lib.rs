//! Numerical toolkit for SU(2) representation varieties of knot exteriors,
//! their pillowcase images, shearing maps, splice representations and a
//! small surgery-triangle calculus.

pub mod charvar;
pub mod knot_groups;
pub mod pillowcase;
pub mod shear;
pub mod solver;
pub mod splice_solver;
pub mod su2;
pub mod surgery_calculus;
pub mod svg;
