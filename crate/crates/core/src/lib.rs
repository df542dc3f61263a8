//! Gibbons–Hawking metrics `g = f g_β + f⁻¹α²` on `C_β × R × S¹` with a cone
//! angle `2πβ` along the edge, built from the Green's function of the cone
//! with pole at `p = (1, 0, 0)`.
//!
//! Everything is generic over the scalar (`T: Scalar`, any `num_traits::Float`
//! with the usual bounds); the `f64` aliases below are what most callers want.
//!
//! ```
//! use conewedge::{Field, Point};
//! let f = Field::reflection(2).unwrap();
//! let x = Point::new(2.0, 0.3, 0.1).unwrap();
//! assert!(f.value(&x).unwrap() > 0.0);
//! ```

// `!(x > 0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Quadrature nodes and series coefficients are kept as tabulated.
#![allow(clippy::excessive_precision)]
#![allow(clippy::needless_range_loop)]

pub mod asymptotics;
pub mod chart;
pub mod cone_space;
pub mod curvature;
pub mod energy;
pub mod error;
pub mod gh_metric;
pub mod greens;
pub mod jet;
pub mod linalg;
pub mod models;
pub mod numerics;
pub mod scalar;
pub mod special;

pub use chart::C;
pub use cone_space::{ConeAngle, ConePoint};
pub use error::{Error, Result};
pub use greens::{Method, PoleLocation, PotentialField, SeriesParams, SeriesRoute};
pub use scalar::Scalar;

pub type Angle = ConeAngle<f64>;
pub type Point = ConePoint<f64>;
pub type Field = PotentialField<f64>;
pub type Complex64 = C<f64>;
pub type Series = SeriesParams<f64>;
