//! Complex analysis of the arc `Γ = {e^{iθ} : |θ| ≤ πy}`: the exterior
//! conformal maps, the Szegő kernel of the exterior, orthonormal polynomials
//! for the arclength inner product, Faber polynomials, and the explicit
//! inequalities relating them.

mod bounds;
mod kernel;
mod laurent;
mod maps;
mod polys;
mod quadrature;

pub use bounds::{bound_suite, BoundSuite, SuiteConfig};
pub use kernel::{boundary_kernel, reproduce, szego_kernel, szego_kernel_at_infinity, ExtPoint};
pub use laurent::{faber_poly, phi_inverse_series, phi_series, LaurentSeries};
pub use maps::{
    phi_inverse, phi_inverse_prime, phi_map, phi_prime, sqrt_phi_inverse_prime, sqrt_phi_prime, ArcGeometry,
    ON_ARC_GAP,
};
pub use polys::{eval_poly, gram_schmidt_leading_coeffs, leading_coeffs, random_unit_polynomial, OrthoPolyTable};
pub use quadrature::{
    arc_inner_product, gauss_legendre, integrate, GaussRule, integrate_smoothed, Quadrature, QUAD_MAX_NODES, QUAD_RELTOL,
};
