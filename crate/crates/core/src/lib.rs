//! Exact-arithmetic engine for the graded Lie algebra of infinitesimal
//! automorphisms of a non-degenerate CR quadric.
//!
//! The quadric `Q_H = { Im w = H(z,z) }` in `C^{n+k}` is cut out by a pack of
//! `k` Hermitian `n x n` matrices. Its symmetry algebra is built two
//! independent ways:
//!
//! * directly, by solving the polynomial-coefficient constraint systems for
//!   weighted vector fields tangent to the quadric ([`quadric`]), and
//! * abstractly, by Tanaka's maximal prolongation of the nonpositive
//!   truncation ([`prolong`]).
//!
//! The [`theorem`] module constructs the canonical map between the two and
//! certifies, in exact rational arithmetic, that it is a graded Lie algebra
//! isomorphism.

pub mod fields;
pub mod forms;
pub mod linalg;
pub mod poly;
pub mod prolong;
pub mod quadric;
pub mod report;
pub mod scalar;
pub mod theorem;

pub use fields::PolyVectorField;
pub use forms::HermitianFormPack;
pub use quadric::GradedAlgebraTable;
pub use theorem::VerificationReport;
