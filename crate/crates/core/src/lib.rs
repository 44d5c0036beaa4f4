//! Arithmetic of the principal congruence surfaces `X(N)` and the crossing
//! numbers of their systoles.
//!
//! Systoles of `X(N)` correspond to trace-`N` elements of SL₂(ℤ), hence to
//! classes of indefinite binary quadratic forms of discriminant `N² − 4`.
//! The modules build up from exact integer arithmetic:
//!
//! - [`arith`]: factorization, squarefreeness, Kronecker symbols.
//! - [`forms`]: reduction cycles, class numbers, automorphs.
//! - [`dirichlet`]: `L(χ_D, 1)` with a certified tail, class number formula.
//! - [`surface`]: index, genus, cusps and systoles of `X(N)`.
//! - [`geodesics`]: intersection numbers of modular geodesics.
//! - [`census`]: crossing bounds, exponent tables and curve-system tools.
//! - [`oracle`]: slow reference computations.
//!
//! Floating-point routines are generic over [`num_traits::Float`]; the
//! aliases below fix the common choices.

pub mod arith;
pub mod census;
pub mod dirichlet;
pub mod error;
pub mod forms;
pub mod geodesics;
pub mod matrix;
pub mod oracle;
pub mod surd;
pub mod surface;

pub use census::{
    crossing_bound, exponent_table, find_subfamily, proposition_lower_bound,
    section4_scaling_check, subfamily_average, CurveSystemMatrix, ExponentRow,
};
pub use dirichlet::{l_value, verify_class_number_formula, LValueEstimate};
pub use error::{Error, Result};
pub use forms::{class_number, fundamental_unit, reduce, ClassCensus, FormClassCycle, QuadForm};
pub use geodesics::{intersection_matrix, total_intersections, IntersectionMatrix};
pub use matrix::Mat2;
pub use surface::{cusps, genus, index, schmutz_schaller_lift, systole_count, systole_length};

/// Exact rationals for subfamily averages and crossing-parameter windows.
pub type Rational = num_rational::Ratio<i128>;

/// `L(χ_D, 1)` estimate in double precision.
pub type LValue = LValueEstimate<f64>;

/// `L(χ_D, 1)` estimate in single precision.
pub type LValue32 = LValueEstimate<f32>;
