//! Andreev's theorem for compact hyperbolic polyhedra with non-obtuse dihedral angles.

pub mod angles;
pub mod complex;
pub mod minkowski;
pub mod realize;
pub mod scalar;
pub mod whitehead;

pub use angles::{check_conditions, feasible, AngleAssignment};
pub use complex::{AbstractPolyhedron, DualComplex};
pub use minkowski::Realization;
pub use realize::{realize, realize_with_report, SolverConfig};

/// Exact rational, used for angles in units of π.
pub type Rational = num_rational::BigRational;
pub type MVec64 = minkowski::MVec<f64>;
pub type MVec32 = minkowski::MVec<f32>;
pub type Lorentz64 = minkowski::Lorentz<f64>;
