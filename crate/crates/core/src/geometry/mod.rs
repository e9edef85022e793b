//! Line geometry, field classification, shape operators and degree.

pub mod degree;
pub mod field;
pub mod lines;
pub mod shape;

pub use degree::{jacobian_degree, DegreeReport};
pub use field::{classify_field, Classification, FieldClass};
pub use lines::{classify_line_family, coplanar, Coplanarity, Line, LineFamilyClass, LineFamilyTag};
pub use shape::{
    curvature_profile_2d, shape_operator, umbilic_check, CurvatureProfile, ShapeOperator, ShapeOperatorField,
    UmbilicReport,
};
