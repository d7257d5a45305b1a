//! Exact tiling engine for ribbon L-tetromino tilings of deficient squares.

pub mod count;
pub mod dimers;
pub mod geometry;
pub mod projection;
pub mod propagation;
mod search;
pub mod solver;
pub mod structure;
pub mod tiles;
pub mod verify;

pub use count::{BigCount, Count};
