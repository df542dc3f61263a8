//! Generic numerical building blocks.

pub mod fit;
pub mod quadrature;
pub mod richardson;
pub mod roots;
pub mod sum;
