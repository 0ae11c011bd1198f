pub mod expr;
pub mod fourier;
pub mod geometry;
pub mod flow;
pub mod search;
pub mod constructions;
pub mod certify;
