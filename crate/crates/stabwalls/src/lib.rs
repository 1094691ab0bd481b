//! Exact computation of numerical nu-walls and lambda-walls for tilt-type
//! stability conditions on Picard rank one threefolds, with worked examples
//! on projective 3-space.

pub mod chern;
pub mod exactpoly;
pub mod geometry;
pub mod walls;
pub mod enumerate;
