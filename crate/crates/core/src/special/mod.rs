//! Special functions of real argument.

pub mod bessel;
pub mod gamma;
pub mod legendre;
