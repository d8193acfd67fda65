//! Ω-positive Hermitian maps `Q : C^M × C^M → C^N`, the real forms
//! `W ⊂ C^M` they interact with, and derived objects: `H(ξ)`, Gaussian
//! integrals, degeneracy subspaces `N_ξ`, and the symplectic forms `ω_ξ`.
//!
//! Component convention: `Q(u, v)_k = v^* H_k u`, linear in the first
//! argument and conjugate-linear in the second, with each `H_k` Hermitian.
//! Ω-positivity means `Q(u, u) ∈ closure(Ω) ∖ {0}` for every `u ≠ 0`; the
//! decision rule is `H(η) := Σ_k η_k H_k` positive semidefinite for every
//! extreme ray `η` of the dual description of `closure(Ω)` (the rows of
//! `A⁻¹`) together with `Σ_η H(η)` positive definite.

use crate::cone::{Cone, Functional};
use crate::error::{Result, SiegelError};
use crate::linalg;
use crate::{C64, CMat, CVec, RMat, RVec};
use rand::Rng;

/// Ratio below which eigenvalues and singular values count as zero.
const RANK_TOL: f64 = 1e-9;

/// The standard Hermitian pairing `h(u, v) = Σ_n u_n conj(v_n)`.
pub fn h_inner(u: &CVec, v: &CVec) -> C64 {
    v.dotc(u)
}

#[derive(Debug, Clone)]
pub struct HermitianMap {
    n: usize,
    m: usize,
    components: Vec<CMat>,
}

/// Outcome of the Ω-positivity decision. On failure `witness` is a unit
/// vector `u` with `Q(u, u) ∉ closure(Ω) ∖ {0}`.
#[derive(Debug, Clone)]
pub struct PositivityCheck {
    pub positive: bool,
    pub witness: Option<CVec>,
}

impl HermitianMap {
    /// Build from the component matrices `H_1, …, H_N`, each `M × M`
    /// Hermitian. With `m == 0` the component list may be empty.
    pub fn new(n: usize, m: usize, components: Vec<CMat>) -> Result<HermitianMap> {
        if n == 0 {
            return Err(SiegelError::InvalidInput(
                "Hermitian map needs at least one component".into(),
            ));
        }
        let components = if m == 0 && components.is_empty() {
            vec![CMat::zeros(0, 0); n]
        } else {
            components
        };
        if components.len() != n {
            return Err(SiegelError::DimensionMismatch {
                what: "Hermitian component count",
                expected: n,
                got: components.len(),
            });
        }
        for (k, h) in components.iter().enumerate() {
            if h.nrows() != m || h.ncols() != m {
                return Err(SiegelError::DimensionMismatch {
                    what: "Hermitian component size",
                    expected: m,
                    got: h.nrows().max(h.ncols()),
                });
            }
            let defect = linalg::hermitian_defect(h);
            if defect > 1e-12 * (1.0 + linalg::max_abs(h)) {
                return Err(SiegelError::InvalidInput(format!(
                    "component {k} is not Hermitian (defect {defect:.3e})"
                )));
            }
        }
        Ok(HermitianMap { n, m, components })
    }

    /// A map that is identically zero in `u` (the tube-domain case `M = 0`).
    pub fn tube(n: usize) -> HermitianMap {
        HermitianMap::new(n, 0, Vec::new()).expect("n ≥ 1")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn component(&self, k: usize) -> &CMat {
        &self.components[k]
    }

    /// `Q(u, v) ∈ C^N` with `Q(u, v)_k = v^* H_k u`.
    pub fn eval(&self, u: &CVec, v: &CVec) -> Result<CVec> {
        self.check_vec(u)?;
        self.check_vec(v)?;
        Ok(CVec::from_iterator(
            self.n,
            self.components.iter().map(|h| v.dotc(&(h * u))),
        ))
    }

    /// `Q(u, u)`, which is a real vector for Hermitian components.
    pub fn eval_diag(&self, u: &CVec) -> Result<RVec> {
        let q = self.eval(u, u)?;
        Ok(RVec::from_iterator(self.n, q.iter().map(|z| z.re)))
    }

    /// `H(ξ) = Σ_k ξ_k H_k`.
    pub fn h_of_xi(&self, xi: &Functional) -> Result<CMat> {
        if xi.len() != self.n {
            return Err(SiegelError::DimensionMismatch {
                what: "functional length",
                expected: self.n,
                got: xi.len(),
            });
        }
        let mut h = CMat::zeros(self.m, self.m);
        for (k, comp) in self.components.iter().enumerate() {
            h += comp * C64::new(xi[k], 0.0);
        }
        Ok(h)
    }

    /// Decide Ω-positivity against `cone`, producing a violating unit
    /// vector on failure.
    pub fn is_omega_positive(&self, cone: &Cone) -> Result<PositivityCheck> {
        if cone.dim() != self.n {
            return Err(SiegelError::DimensionMismatch {
                what: "cone dimension",
                expected: self.n,
                got: cone.dim(),
            });
        }
        if self.m == 0 {
            return Ok(PositivityCheck {
                positive: true,
                witness: None,
            });
        }
        let inv = cone.inverse_matrix();
        let mut sum = CMat::zeros(self.m, self.m);
        for j in 0..self.n {
            let eta = inv.row(j).transpose();
            let h_eta = self.h_of_xi(&eta)?;
            let (vals, vecs) = linalg::hermitian_eigen(&h_eta);
            let scale = vals.iter().fold(1.0f64, |a, &v| a.max(v.abs()));
            if vals[0] < -RANK_TOL * scale {
                return Ok(PositivityCheck {
                    positive: false,
                    witness: Some(vecs.column(0).into_owned()),
                });
            }
            sum += h_eta;
        }
        let (vals, vecs) = linalg::hermitian_eigen(&sum);
        let scale = vals.iter().fold(1.0f64, |a, &v| a.max(v.abs()));
        if vals[0] <= RANK_TOL * scale {
            return Ok(PositivityCheck {
                positive: false,
                witness: Some(vecs.column(0).into_owned()),
            });
        }
        Ok(PositivityCheck {
            positive: true,
            witness: None,
        })
    }

    /// Sampled fallback for the positivity decision: draws random unit
    /// vectors and returns the first `u` with `Q(u, u)` outside
    /// `closure(Ω) ∖ {0}`, if any.
    pub fn sampled_positivity_witness(
        &self,
        cone: &Cone,
        rng: &mut impl Rng,
        samples: usize,
    ) -> Result<Option<CVec>> {
        if self.m == 0 {
            return Ok(None);
        }
        for _ in 0..samples {
            let mut u = CVec::from_fn(self.m, |_, _| {
                C64::new(
                    rng.sample(rand_distr::StandardNormal),
                    rng.sample(rand_distr::StandardNormal),
                )
            });
            let norm = u.norm();
            if norm < 1e-12 {
                continue;
            }
            u /= C64::new(norm, 0.0);
            let q = self.eval_diag(&u)?;
            if !cone.contains(&q, false)? || q.amax() < 1e-12 {
                return Ok(Some(u));
            }
        }
        Ok(None)
    }

    /// Gaussian integral `I_Q(ξ) = ∫_{C^M} e^{−2⟨ξ, Q(u,u)⟩} dλ(u)
    /// = π^M / (2^M det H(ξ))`, requiring `H(ξ)` positive definite.
    pub fn gaussian_integral(&self, xi: &Functional) -> Result<f64> {
        let h = self.h_of_xi(xi)?;
        if self.m == 0 {
            return Ok(1.0);
        }
        let (vals, _) = linalg::hermitian_eigen(&h);
        let scale = vals.iter().fold(1.0f64, |a, &v| a.max(v.abs()));
        if vals[0] <= RANK_TOL * scale {
            return Err(SiegelError::Divergent(
                "Gaussian integral requires H(ξ) positive definite".into(),
            ));
        }
        let mut value = 1.0;
        for &lambda in vals.iter() {
            value *= std::f64::consts::PI / (2.0 * lambda);
        }
        Ok(value)
    }

    /// Orthonormal basis of `N_ξ = ker H(ξ)` for positive semidefinite
    /// `H(ξ)`; errors with [`SiegelError::NotASubspace`] when `H(ξ)` has a
    /// genuinely negative eigenvalue.
    pub fn null_space(&self, xi: &Functional) -> Result<CMat> {
        Ok(self.split_eigenspaces(xi)?.0)
    }

    /// Orthonormal basis of `N_ξ^⊥`, the `h`-orthogonal complement of
    /// `N_ξ` (the positive eigenspace of `H(ξ)`).
    pub fn null_space_complement(&self, xi: &Functional) -> Result<CMat> {
        Ok(self.split_eigenspaces(xi)?.1)
    }

    fn split_eigenspaces(&self, xi: &Functional) -> Result<(CMat, CMat)> {
        let h = self.h_of_xi(xi)?;
        if self.m == 0 {
            return Ok((CMat::zeros(0, 0), CMat::zeros(0, 0)));
        }
        let (vals, vecs) = linalg::hermitian_eigen(&h);
        let scale = vals.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        let cutoff = RANK_TOL * scale.max(1e-300);
        if vals[0] < -cutoff && scale > 0.0 {
            return Err(SiegelError::NotASubspace(format!(
                "H(ξ) is indefinite (λ_min = {:.3e}, λ_max scale = {:.3e})",
                vals[0], scale
            )));
        }
        let mut kernel = Vec::new();
        let mut range = Vec::new();
        for k in 0..self.m {
            let col = vecs.column(k).into_owned();
            if vals[k].abs() <= cutoff {
                kernel.push(col);
            } else {
                range.push(col);
            }
        }
        let pack = |cols: Vec<CVec>| {
            if cols.is_empty() {
                CMat::zeros(self.m, 0)
            } else {
                CMat::from_columns(&cols)
            }
        };
        Ok((pack(kernel), pack(range)))
    }

    /// The real symplectic-type form `ω_ξ(u, v) = ⟨ξ, 4 Im Q(u, v)⟩`.
    pub fn omega(&self, xi: &Functional, u: &CVec, v: &CVec) -> Result<f64> {
        if xi.len() != self.n {
            return Err(SiegelError::DimensionMismatch {
                what: "functional length",
                expected: self.n,
                got: xi.len(),
            });
        }
        let q = self.eval(u, v)?;
        Ok(4.0 * (0..self.n).map(|k| xi[k] * q[k].im).sum::<f64>())
    }

    fn check_vec(&self, u: &CVec) -> Result<()> {
        if u.len() != self.m {
            return Err(SiegelError::DimensionMismatch {
                what: "vector length",
                expected: self.m,
                got: u.len(),
            });
        }
        Ok(())
    }
}

/// A real form `W ⊂ C^M`: the real span of a C-basis `f_1, …, f_M`, so
/// that `C^M = W ⊕ i W` as real vector spaces.
#[derive(Debug, Clone)]
pub struct RealForm {
    basis: CMat,
    inverse: CMat,
}

impl RealForm {
    /// The standard real form `R^M ⊂ C^M`.
    pub fn standard(m: usize) -> RealForm {
        RealForm {
            basis: CMat::identity(m, m),
            inverse: CMat::identity(m, m),
        }
    }

    /// Real form spanned by the columns of `basis`, which must be a
    /// C-basis of `C^M`.
    pub fn new(basis: CMat) -> Result<RealForm> {
        let m = basis.nrows();
        if basis.ncols() != m {
            return Err(SiegelError::DimensionMismatch {
                what: "real-form basis",
                expected: m,
                got: basis.ncols(),
            });
        }
        if m == 0 {
            return Ok(RealForm {
                basis: CMat::zeros(0, 0),
                inverse: CMat::zeros(0, 0),
            });
        }
        if linalg::rank(&basis, RANK_TOL) != m {
            return Err(SiegelError::InvalidInput(
                "real-form vectors are not C-linearly independent".into(),
            ));
        }
        let inverse = basis.clone().try_inverse().ok_or_else(|| {
            SiegelError::InvalidInput("real-form basis is not invertible".into())
        })?;
        Ok(RealForm { basis, inverse })
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    /// The basis vector `f_α`.
    pub fn vector(&self, alpha: usize) -> CVec {
        self.basis.column(alpha).into_owned()
    }

    pub fn basis_matrix(&self) -> &CMat {
        &self.basis
    }

    /// Complex coordinates of `u` over the basis `{f_α}`.
    pub fn coords(&self, u: &CVec) -> CVec {
        &self.inverse * u
    }

    /// `u = w + i w'` with `w, w' ∈ W`; returns `(w, w')` as vectors in
    /// `C^M`.
    pub fn decompose(&self, u: &CVec) -> (CVec, CVec) {
        let c = self.coords(u);
        let re = CVec::from_iterator(c.len(), c.iter().map(|z| C64::new(z.re, 0.0)));
        let im = CVec::from_iterator(c.len(), c.iter().map(|z| C64::new(z.im, 0.0)));
        (&self.basis * re, &self.basis * im)
    }

    /// The conjugation fixing `W`: `u = w + i w' ↦ w − i w'`.
    pub fn conjugate(&self, u: &CVec) -> CVec {
        let c = self.coords(u);
        let cc = CVec::from_iterator(c.len(), c.iter().map(|z| z.conj()));
        &self.basis * cc
    }

    /// Whether `u ∈ W` (all coordinates real within `tol`).
    pub fn contains(&self, u: &CVec, tol: f64) -> bool {
        self.coords(u).iter().all(|z| z.im.abs() <= tol)
    }

    /// The element of `W` with real coordinates `t` over `{f_α}`.
    pub fn from_real_coords(&self, t: &RVec) -> CVec {
        &self.basis * CVec::from_iterator(t.len(), t.iter().map(|&x| C64::new(x, 0.0)))
    }
}

/// The imaginary parts `Im Q(f_α, f_β)` over a real form, with the
/// maximizing pair as certificate.
#[derive(Debug, Clone)]
pub struct ImQOnW {
    /// `(α, β, Im Q(f_α, f_β))` in row-major pair order.
    pub entries: Vec<(usize, usize, RVec)>,
    pub all_zero: bool,
    pub max_norm: f64,
    /// Pair attaining `max_norm` (first in row-major order), absent when
    /// every entry vanishes.
    pub witness: Option<(usize, usize)>,
}

/// Tolerance under which `Im Q(W, W)` counts as zero.
pub const IM_Q_TOL: f64 = 1e-10;

/// Evaluate `Im Q(f_α, f_β)` on all basis pairs of the real form.
pub fn im_q_on_w(q: &HermitianMap, w: &RealForm) -> Result<ImQOnW> {
    let m = q.m();
    if w.dim() != m {
        return Err(SiegelError::DimensionMismatch {
            what: "real-form dimension",
            expected: m,
            got: w.dim(),
        });
    }
    let mut entries = Vec::with_capacity(m * m);
    let mut max_norm = 0.0f64;
    let mut witness = None;
    for alpha in 0..m {
        for beta in 0..m {
            let val = q.eval(&w.vector(alpha), &w.vector(beta))?;
            let im = RVec::from_iterator(q.n(), val.iter().map(|z| z.im));
            let norm = im.amax();
            if norm > max_norm {
                max_norm = norm;
                witness = Some((alpha, beta));
            }
            entries.push((alpha, beta, im));
        }
    }
    let all_zero = max_norm < IM_Q_TOL;
    Ok(ImQOnW {
        entries,
        all_zero,
        max_norm,
        witness: if all_zero { None } else { witness },
    })
}

/// Real basis (as complex vectors) of `W^{⊥, ω_ξ} = { u : ω_ξ(u, w) = 0
/// for all w ∈ W }`, the ω_ξ-orthogonal of the real form.
pub fn symplectic_perp(q: &HermitianMap, xi: &Functional, w: &RealForm) -> Result<Vec<CVec>> {
    let m = q.m();
    if w.dim() != m {
        return Err(SiegelError::DimensionMismatch {
            what: "real-form dimension",
            expected: m,
            got: w.dim(),
        });
    }
    if m == 0 {
        return Ok(Vec::new());
    }
    let real_basis = linalg::real_basis_of_cm(m);
    let mut constraints = RMat::zeros(m, 2 * m);
    for alpha in 0..m {
        let f_alpha = w.vector(alpha);
        for (j, b) in real_basis.iter().enumerate() {
            constraints[(alpha, j)] = q.omega(xi, b, &f_alpha)?;
        }
    }
    let kernel = linalg::null_space_real(&constraints, RANK_TOL);
    Ok((0..kernel.ncols())
        .map(|c| linalg::to_complex(&kernel.column(c).into_owned()))
        .collect())
}
