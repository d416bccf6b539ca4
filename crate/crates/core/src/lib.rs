pub mod bump;
pub mod chain;
pub mod charts;
pub mod correspondence;
pub mod current;
pub mod error;
pub mod exterior;
pub mod form;
pub mod gauss;
pub mod geometry;
pub mod integrate;
pub mod intersection;
pub mod lebesgue;
pub mod limit;
pub mod oracles;
pub mod poly;
pub mod runner;
pub mod scalar;
pub mod scenario;
pub mod smoothing;
