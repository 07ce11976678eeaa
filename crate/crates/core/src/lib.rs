pub mod certify;
pub mod cli;
pub mod interval;
pub mod model;
pub mod potential;
pub mod regions;
pub mod solver;
