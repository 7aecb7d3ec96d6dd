//! The pendulum observer and Lorenz synchronization case studies.

pub mod lorenz;
pub mod pendulum;
pub mod performance;

pub use performance::{performance, Performance};
