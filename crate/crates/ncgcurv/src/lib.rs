//! Exact symbolic engine for the Levi-Civita connection, Riemann/Ricci/scalar
//! curvature, connection Laplacians and Weitzenbock residues of
//! frame-presented noncommutative differential structures, together with a
//! twist-deformation verification suite carried out as polynomial identities
//! in a formal unit-circle phase.
//!
//! The computational spine:
//!
//! * [`scalar`] — the exact coefficient field Q(i, sqrt2)(L);
//! * [`algebra`] — graded basis-presented coefficient *-algebras;
//! * [`forms`] — the frame tensor calculus (braiding, junk projection,
//!   exterior derivative, inner products, contractions);
//! * [`levi_civita`] — the per-degree-block exact solver for the unique
//!   Hermitian torsion-free braided-bimodule connection;
//! * [`curvature`] — Riemann, Ricci and scalar curvature;
//! * [`dirac`] — Clifford modules, the Dirac operator, the connection
//!   Laplacian and the Weitzenbock residue;
//! * [`deformation`] — the twist comparison maps and the identity suite;
//! * [`geometries`] — built-in geometries, the loader and the validator.

#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod blocks;
pub mod curvature;
pub mod deformation;
pub mod dirac;
pub mod forms;
pub mod geometries;
pub mod levi_civita;
pub mod matrix;
pub mod par;
pub mod report;
pub mod scalar;
pub mod verify;

pub use algebra::{AlgebraElement, AlgebraSpec, BasisKey, Degree, Mode};
pub use forms::{Calculus, FrameSpec, Tensor};
pub use geometries::{builtin, builtin_names, GeometrySpec};
pub use levi_civita::{solve_levi_civita, Connection};
pub use scalar::Scalar;
