//! Exact-arithmetic computation of the Dieudonné module
//! `lim_{m,n} H²_m(X, W_n O_X)[F^m]` for rational double point (RDP)
//! singularities in characteristic p ∈ {2, 3, 5}, and identification of the
//! associated finite group scheme `Picloc^{loc,loc}`.
//!
//! Module layout:
//! * [`algebra`] — F_p scalars, sparse Laurent polynomials in the coordinate
//!   rings of RDP hypersurfaces, and the RDP equation catalog.
//! * [`witt`] — truncated Witt vectors with structure laws derived from ghost
//!   components.
//! * [`cohomology`] — the Čech model of `H²_m(X, W_n O_X)`: class normal
//!   forms, Frobenius kernels on bounded boxes, and the layered lifting
//!   algorithm that computes the Dieudonné module.
//! * [`dieudonne`] — finite modules over `D = W(F_p){F,V}/(FV − p)` and
//!   identification against the group-scheme catalog.
//! * [`dnr`] — the closed-form combinatorial model of `G_n^r` for `D_n^r`
//!   singularities in characteristic 2.
//! * [`reporting`] — machine-verified reproduction of the reference tables.
//!
//! All arithmetic is exact; no floating point is used anywhere.

pub mod algebra;
pub mod cohomology;
pub mod dieudonne;
pub mod dnr;
pub mod error;
pub mod reporting;
pub mod witt;

pub use algebra::{Family, LaurentPoly, RdpEquation};
pub use cohomology::{Box, CohClass, DieuPresentation};
pub use dieudonne::{DieuModule, GroupSchemeId};
pub use error::Error;
pub use witt::{WittLaws, WittVec};
