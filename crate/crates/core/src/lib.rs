//! Edge-disjoint triangle packings and fractional triangle covers of bounded weight.

pub mod certificate;
pub mod charge;
pub mod cover;
pub mod generate;
pub mod graph;
pub mod io;
pub mod oracles;
pub mod order2;
pub mod packing;
pub mod rounding;
pub mod structure;
pub mod verify;
