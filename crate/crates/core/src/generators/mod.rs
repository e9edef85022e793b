//! Ground-truth fields.

pub mod analytic;
pub mod distance;
pub mod fmm;

pub use analytic::{
    gen_circle_distance_gradient, gen_constant, gen_rotational_2d, gen_vortex, gen_vortex_line, provenance,
};
pub use distance::{
    circle_polyline, ellipsoid_signed_distance, gen_distance_field_2d, gen_ellipsoid_distance, parabola_polyline,
    polyline_band,
};
pub use fmm::{fast_marching, fast_marching_masked, FastMarching, Seeds};
