//! Numerical building blocks.

pub mod barnes;
pub mod dilog;
pub mod gamma;
pub mod hyp2f1;
pub mod ode;
pub mod quad;
