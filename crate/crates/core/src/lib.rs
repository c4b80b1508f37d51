//! Exact laboratory for isolated hypersurface singularities, their miniversal
//! unfoldings and real discriminants, and toric embedded resolution of plane
//! branches through their value semigroups.

pub mod kernel;
pub mod milnor;
pub mod critmap;
pub mod morselab;
pub mod discriminant;
pub mod pipeline;
pub mod semitoric;
