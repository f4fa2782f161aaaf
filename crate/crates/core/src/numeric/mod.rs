//! Numerical building blocks: adaptive quadrature, special functions,
//! interpolation and root finding.

pub mod interp;
pub mod quad;
pub mod roots;
pub mod special;

pub use interp::Hermite;
pub use quad::{integrate, integrate_panels, integrate_pieces, Estimate, Tolerance};
pub use roots::brent;
pub use special::LogNormal;
