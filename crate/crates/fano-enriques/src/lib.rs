//! Exact Hilbert series, torsion baskets and cyclic quotients of Fano
//! threefolds with a torsion polarisation.

pub mod catalog;
pub mod enumeration;
pub mod exact;
pub mod gradedrings;
pub mod hilbert;
pub mod orbifold;
pub mod quotient;
pub mod series;
