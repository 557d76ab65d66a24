//! Quadrature and special functions used by the distribution families.

mod quad;
mod zeta;

pub use quad::{integrate, Quadrature};
pub use zeta::hurwitz_zeta;
