//! Computable Siegel domains of the second kind.
//!
//! A Siegel domain `D(Ω, Q) = { (z, u) ∈ C^N × C^M : Im z − Q(u, u) ∈ Ω }`
//! is described by a regular open convex cone `Ω ⊂ R^N` and an Ω-positive
//! Hermitian map `Q : C^M × C^M → C^N`. This crate makes the standard
//! analytic objects attached to such a domain computable:
//!
//! * the cone, its dual, and its characteristic integral ([`cone`]);
//! * the Hermitian map, the associated symplectic forms `ω_ξ`, Gaussian
//!   integrals, and degeneracy subspaces `N_ξ` ([`hermitian`]);
//! * the generalized Heisenberg group acting affinely on the domain
//!   ([`group`]);
//! * holomorphic multipliers on that group and their classification
//!   ([`multiplier`]);
//! * concrete irreducible representation models on holomorphic functions,
//!   with explicit intertwiners between them ([`representation`]);
//! * the Bergman kernel of the weighted L² model by dual-cone quadrature,
//!   and the Bergman metric ([`bergman`]);
//! * a cross-checked decision procedure for multiplicity-freeness of the
//!   restriction to the subgroup attached to a real form `W ⊂ C^M`
//!   ([`mf`]).
//!
//! Configuration files for the CLI binary are parsed and validated by
//! [`config`].
//!
//! Conventions used throughout: `Q(u, v)` is linear in `u` and
//! conjugate-linear in `v`; `h(u, v) = Σ_n u_n conj(v_n)`; complex vectors
//! are column vectors over `f64` components.

pub mod bergman;
pub mod cone;
pub mod config;
pub mod error;
pub mod group;
pub mod hermitian;
pub mod linalg;
pub mod mf;
pub mod multiplier;
pub mod quadrature;
pub mod representation;

pub use bergman::{KernelQuadrature, KernelValue, MetricBlocks};
pub use cone::Cone;
pub use config::{ConeSpec, NormalizedConfig, PointSpec, QuadratureSpec, SiegelConfig, TwistSpec, Violation};
pub use error::{Result, SiegelError};
pub use group::{DomainPoint, GroupElement, SiegelDomain};
pub use hermitian::{HermitianMap, RealForm};
pub use mf::{
    check_i_orbit, check_ii, check_iii_numeric, check_iv, check_v, mf_report, random_instance,
    sample_dual_interior, sample_s_point, sigma_w, CheckI, CheckII, CheckIII, CheckIV, CheckV,
    Instance, MfReport,
};
pub use multiplier::{
    bundles_equivalent, classify_fn, classify_multiplier, cocycle_defect, CoboundaryTwist,
    MultiplierSpec,
};
pub use representation::{
    apply_pi_c, apply_v, coherent_defect, coherent_uniqueness_nullity, eigenfunction_gw,
    hbar_minus_generators, phi, phi_defect, positivity_value, psi_intertwining_scalar, psi_st,
    v_equivalent, v_fn, CoherentFunction, FockFn, GwEigenfunction, HoloFn,
};

/// Complex scalar used everywhere in this crate.
pub type C64 = num_complex::Complex64;
/// Dynamically sized complex column vector.
pub type CVec = nalgebra::DVector<C64>;
/// Dynamically sized complex matrix.
pub type CMat = nalgebra::DMatrix<C64>;
/// Dynamically sized real column vector.
pub type RVec = nalgebra::DVector<f64>;
/// Dynamically sized real matrix.
pub type RMat = nalgebra::DMatrix<f64>;
