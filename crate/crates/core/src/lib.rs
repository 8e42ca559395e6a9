//! Numerics for modular transformations of isomonodromic tau functions on
//! the once-punctured torus.
//!
//! The modules follow the objects involved: [`specfun`] for theta, eta,
//! Weierstrass, hypergeometric and Barnes functions; [`charvar`] for
//! monodromy data and the S-duality coordinate maps; [`trinion`] for the
//! three-point parametrices; [`flow`] for the NAECM flow; [`modular`] for
//! the connection constant, generating functions and kernels.

pub mod charvar;
pub mod context;
pub mod error;
pub mod flow;
pub mod mat2;
pub mod modular;
pub mod numerics;
pub mod specfun;
pub mod trinion;
pub mod verify;

pub use context::{PrecisionContext, WorkingPrecision};
pub use error::{Error, Result};
pub use mat2::Mat2;
pub use num_complex::Complex64;
pub use numerics::dilog::CutSide;
pub use specfun::HalfPlanePoint;
