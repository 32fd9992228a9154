//! Self-contained numerical kernels shared by the physics modules:
//! adaptive quadrature over real intervals with complex integrands, a
//! polar-domain product rule, Bessel functions J0/J1, and bracketed root
//! finding. All operations are pure and safe for concurrent use.

pub mod bessel;
pub mod quadrature;
pub mod roots;

pub use bessel::{bessel_j0, bessel_j1};
pub use quadrature::{
    gaussian_truncation_radius, integrate_1d, integrate_1d_real, integrate_polar, Quadrature,
    QuadratureSpec, GAUSSIAN_TAIL_FLOOR,
};
pub use roots::find_root;
