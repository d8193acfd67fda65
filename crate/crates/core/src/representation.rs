//! Concrete irreducible models for the Heisenberg group and the maps joining
//! them: the action `π_c` on holomorphic functions of the domain, the
//! Fock-type model `V_{ξ,c}` on functions of the fiber variable, the
//! intertwiners `Φ_ξ` and `Ψ_{s,t}`, coherent eigenfunctions with their
//! uniqueness certificate, joint eigenfunctions for the real-form subgroup,
//! and the equivalence test between `V_{ξ,s}` and `V_{ξ,t}`.
//!
//! Invariants:
//! - function carriers are finite-parameter families (polynomials times
//!   exponentials of affine-plus-Gaussian phases); no Hilbert-space
//!   completion is represented, every identity is checked pointwise;
//! - differential operators act through Richardson-extrapolated central
//!   differences at base step 1e-4 along one-parameter subgroups;
//! - `Ψ_{s,t}` integrates over the nondegenerate directions only, with the
//!   Gaussian measure normalized to total mass one.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cone::Functional;
use crate::error::{Result, SiegelError};
use crate::group::{act, invert, DomainPoint, GroupElement, SiegelDomain};
use crate::hermitian::{h_inner, im_q_on_w, HermitianMap, RealForm};
use crate::linalg;
use crate::quadrature::{gauss_hermite, tensor_indices};
use crate::{C64, CMat, CVec, RVec};

const I: C64 = C64::new(0.0, 1.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Bilinear pairing of a real functional with a complex vector, Σ ξₖ zₖ.
fn pair(xi: &RVec, z: &CVec) -> C64 {
    xi.iter()
        .zip(z.iter())
        .map(|(&x, w)| C64::new(x, 0.0) * w)
        .sum()
}

/// Holomorphic function on the domain, carried as an evaluation closure.
#[derive(Clone)]
pub struct HoloFn(Arc<dyn Fn(&DomainPoint) -> C64 + Send + Sync>);

impl HoloFn {
    pub fn new<F>(f: F) -> HoloFn
    where
        F: Fn(&DomainPoint) -> C64 + Send + Sync + 'static,
    {
        HoloFn(Arc::new(f))
    }

    pub fn constant(v: C64) -> HoloFn {
        HoloFn::new(move |_| v)
    }

    pub fn eval(&self, p: &DomainPoint) -> C64 {
        (self.0)(p)
    }
}

/// Entire function of the fiber variable `u ∈ C^M`. Polynomial carriers
/// remember their degree so quadrature routines can refuse inputs outside
/// their exactness range; closures of unknown degree carry `None`.
#[derive(Clone)]
pub struct FockFn {
    f: Arc<dyn Fn(&CVec) -> C64 + Send + Sync>,
    degree: Option<u32>,
}

impl FockFn {
    pub fn new<F>(f: F) -> FockFn
    where
        F: Fn(&CVec) -> C64 + Send + Sync + 'static,
    {
        FockFn {
            f: Arc::new(f),
            degree: None,
        }
    }

    pub fn constant(v: C64) -> FockFn {
        FockFn {
            f: Arc::new(move |_| v),
            degree: Some(0),
        }
    }

    /// The coordinate function u ↦ u_α.
    pub fn coordinate(alpha: usize) -> FockFn {
        FockFn {
            f: Arc::new(move |u: &CVec| u[alpha]),
            degree: Some(1),
        }
    }

    /// Polynomial Σ coeff·u^exps with one exponent per coordinate.
    pub fn poly(terms: Vec<(Vec<u32>, C64)>) -> FockFn {
        let degree = terms
            .iter()
            .map(|(e, _)| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0);
        FockFn {
            f: Arc::new(move |u: &CVec| {
                terms
                    .iter()
                    .map(|(exps, coeff)| {
                        let mono: C64 = exps
                            .iter()
                            .enumerate()
                            .map(|(i, &e)| u[i].powu(e))
                            .product();
                        coeff * mono
                    })
                    .sum()
            }),
            degree: Some(degree),
        }
    }

    pub fn eval(&self, u: &CVec) -> C64 {
        (self.f)(u)
    }

    pub fn degree(&self) -> Option<u32> {
        self.degree
    }
}

/// π_c(g)f(p) = e^{h(c,u₀)}·f(g⁻¹·p) for g = n(x₀,u₀).
///
/// The action preserves height, so for interior p the pulled-back point is
/// interior too; the membership check guards against p outside the domain.
pub fn apply_pi_c(
    domain: &SiegelDomain,
    c: &CVec,
    g: &GroupElement,
    f: &HoloFn,
    p: &DomainPoint,
) -> Result<C64> {
    let back = act(domain.q(), &invert(g), p)?;
    if !domain.contains(&back)? {
        return Err(SiegelError::OutsideDomain(
            "pi_c pullback left the domain; the input point is not interior".into(),
        ));
    }
    Ok(h_inner(c, &g.u).exp() * f.eval(&back))
}

/// V_{ξ,c}(g)F evaluated at u, for g = n(x₀,u₀) factored as n(x₀,0)·n(0,u₀):
///
///   e^{−i⟨ξ,x₀⟩}·e^{2i Im h(c,u₀)}·e^{−⟨ξ,Q(u₀,u₀)⟩}·e^{2⟨ξ,Q(u,u₀)⟩}·F(u−u₀).
pub fn apply_v(
    q: &HermitianMap,
    xi: &Functional,
    c: &CVec,
    g: &GroupElement,
    f: &FockFn,
    u: &CVec,
) -> Result<C64> {
    let scalar = v_prefactor(q, xi, c, g)?;
    let gauss = pair(xi, &q.eval(u, &g.u)?);
    let shifted = u - &g.u;
    Ok(scalar * (2.0 * gauss).exp() * f.eval(&shifted))
}

/// The u-independent part of V_{ξ,c}(n(x₀,u₀)).
fn v_prefactor(q: &HermitianMap, xi: &Functional, c: &CVec, g: &GroupElement) -> Result<C64> {
    if xi.len() != q.n() {
        return Err(SiegelError::DimensionMismatch {
            what: "functional xi",
            expected: q.n(),
            got: xi.len(),
        });
    }
    let central = -I * pair(xi, &g.x.map(|t| C64::new(t, 0.0)));
    let phase = 2.0 * I * h_inner(c, &g.u).im;
    let damp = -pair(xi, &q.eval(&g.u, &g.u)?);
    Ok((central + phase + damp).exp())
}

/// V_{ξ,c}(g)F as a function, for feeding back into other operators.
pub fn v_fn(
    q: &HermitianMap,
    xi: &Functional,
    c: &CVec,
    g: &GroupElement,
    f: &FockFn,
) -> Result<FockFn> {
    let scalar = v_prefactor(q, xi, c, g)?;
    let hxi_u0 = q.h_of_xi(xi)? * &g.u;
    let u0 = g.u.clone();
    let inner = f.clone();
    Ok(FockFn::new(move |u: &CVec| {
        // 2⟨ξ,Q(u,u₀)⟩ = 2·u₀^*H(ξ)u computed from the cached H(ξ)u₀.
        let gauss = 2.0 * u.dot(&hxi_u0.map(|w| w.conj()));
        scalar * gauss.exp() * inner.eval(&(u - &u0))
    }))
}

/// Φ_ξF(z,u) = e^{h(u,c) + i⟨ξ,z⟩}·F(u), mapping the Fock model into
/// holomorphic functions on the domain.
pub fn phi(xi: &Functional, c: &CVec, f: &FockFn) -> HoloFn {
    let xi = xi.clone();
    let c = c.clone();
    let f = f.clone();
    HoloFn::new(move |p: &DomainPoint| {
        (h_inner(&p.u, &c) + I * pair(&xi, &p.z)).exp() * f.eval(&p.u)
    })
}

/// Relative failure of the intertwining identity
/// π_c(g)(Φ_ξF) = Φ_ξ(V_{ξ,c}(g)F) at one point.
pub fn phi_defect(
    domain: &SiegelDomain,
    xi: &Functional,
    c: &CVec,
    g: &GroupElement,
    f: &FockFn,
    p: &DomainPoint,
) -> Result<f64> {
    let lhs = apply_pi_c(domain, c, g, &phi(xi, c, f), p)?;
    let rhs = phi(xi, c, &v_fn(domain.q(), xi, c, g, f)?).eval(p);
    Ok((lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(1.0))
}

/// The joint eigenfunction shape e^{−i⟨ν,z⟩}·e^{h(u,c)} for the lowering
/// subalgebra, with its derived linear functional ν̃(x,u) = ⟨ν,x⟩ + 2 Im h(c,u).
#[derive(Clone, Debug)]
pub struct CoherentFunction {
    pub nu: Functional,
    pub c: CVec,
}

impl CoherentFunction {
    pub fn new(nu: Functional, c: CVec) -> CoherentFunction {
        CoherentFunction { nu, c }
    }

    pub fn eval(&self, p: &DomainPoint) -> C64 {
        (-I * pair(&self.nu, &p.z) + h_inner(&p.u, &self.c)).exp()
    }

    pub fn holo(&self) -> HoloFn {
        let me = self.clone();
        HoloFn::new(move |p| me.eval(p))
    }

    /// ν̃ evaluated on a real Lie-algebra element carried as group data.
    pub fn nu_tilde(&self, a: &GroupElement) -> f64 {
        self.nu.dot(&a.x) + 2.0 * h_inner(&self.c, &a.u).im
    }
}

/// d/dt π_c(exp(t·a))f(p) at t = 0 by Richardson-extrapolated central
/// differences; exp(t·a) = n(t·x, t·u) since Im Q(u,u) = 0.
fn dpi_along(
    domain: &SiegelDomain,
    c: &CVec,
    a: &GroupElement,
    f: &HoloFn,
    p: &DomainPoint,
) -> Result<C64> {
    const STEP: f64 = 1e-4;
    let value = |t: f64| apply_pi_c(domain, c, &a.scaled(t), f, p);
    let diff = |h: f64| -> Result<C64> { Ok((value(h)? - value(-h)?) / C64::new(2.0 * h, 0.0)) };
    let d_full = diff(STEP)?;
    let d_half = diff(STEP / 2.0)?;
    Ok((4.0 * d_half - d_full) / 3.0)
}

/// Complexified generators a = a₁ + i·a₂ of the lowering subalgebra: the
/// central directions (eₖ, 0) and, for each fiber direction u₀ ∈ {e_α, ie_α},
/// the pair (0, u₀) + i·(0, −iu₀).
pub fn hbar_minus_generators(n: usize, m: usize) -> Vec<(GroupElement, GroupElement)> {
    let mut gens = Vec::with_capacity(n + 2 * m);
    for k in 0..n {
        let mut x = RVec::zeros(n);
        x[k] = 1.0;
        gens.push((
            GroupElement::central(x, m),
            GroupElement::identity(n, m),
        ));
    }
    for alpha in 0..m {
        for dir in [ONE, I] {
            let mut u = CVec::zeros(m);
            u[alpha] = dir;
            let a1 = GroupElement::translation(n, u.clone());
            let a2 = GroupElement::translation(n, u.map(|w| -I * w));
            gens.push((a1, a2));
        }
    }
    gens
}

/// |dπ_c(a₁ + i·a₂)f(p) − i⟨ν̃, a₁ + i·a₂⟩f(p)| / |f(p)| for the coherent
/// function f; vanishes (to finite-difference accuracy) exactly when
/// a₁ + i·a₂ lies in the lowering subalgebra.
pub fn coherent_defect(
    domain: &SiegelDomain,
    coh: &CoherentFunction,
    a1: &GroupElement,
    a2: &GroupElement,
    p: &DomainPoint,
) -> Result<f64> {
    let f = coh.holo();
    let d = dpi_along(domain, &coh.c, a1, &f, p)? + I * dpi_along(domain, &coh.c, a2, &f, p)?;
    let eigen = I * C64::new(coh.nu_tilde(a1), coh.nu_tilde(a2)) * coh.eval(p);
    Ok((d - eigen).norm() / coh.eval(p).norm())
}

/// −i⟨ξ,[a,ā]⟩ = 8⟨ξ,Q(u,u)⟩ for a = (0,u) + i·(0,−iu): nonnegative for ξ
/// in the closed dual cone, strictly positive for interior ξ and u ≠ 0.
pub fn positivity_value(q: &HermitianMap, xi: &Functional, u: &CVec) -> Result<f64> {
    Ok(8.0 * xi.dot(&q.eval_diag(u)?))
}

/// All monomial exponent vectors in `nvars` variables of total degree ≤ cap.
fn multi_indices(nvars: usize, cap: u32) -> Vec<Vec<u32>> {
    fn rec(nvars: usize, budget: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == nvars {
            out.push(prefix.clone());
            return;
        }
        for e in 0..=budget {
            prefix.push(e);
            rec(nvars, budget - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(nvars, cap, &mut Vec::new(), &mut out);
    out
}

/// Dimension of the space of functions P(z,u)·f_coherent, with P polynomial
/// of total degree ≤ `cap`, annihilated by every defect functional
/// dπ_c(a)·− i⟨ν̃,a⟩ over the lowering generators at sampled points.
///
/// Returns the numerical nullity (singular values below 1e-6 of the largest);
/// the eigenfunction equation forces nullity 1, spanned by f itself.
pub fn coherent_uniqueness_nullity(
    domain: &SiegelDomain,
    coh: &CoherentFunction,
    cap: u32,
    seed: u64,
) -> Result<usize> {
    let n = domain.n();
    let m = domain.m();
    let exps = multi_indices(n + m, cap);
    let gens = hbar_minus_generators(n, m);
    let points = (2 * exps.len()).div_ceil(gens.len()) + 2;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for _ in 0..points {
        let x = RVec::from_iterator(n, (0..n).map(|_| rng.random_range(-0.8..0.8)));
        let u = CVec::from_iterator(
            m,
            (0..m).map(|_| C64::new(rng.random_range(-0.8..0.8), rng.random_range(-0.8..0.8))),
        );
        let p = domain.act(&GroupElement::new(x, u), &domain.reference_point())?;
        for (a1, a2) in &gens {
            let mut row = CVec::zeros(exps.len());
            for (j, e) in exps.iter().enumerate() {
                let member = monomial_times(coh, e.clone(), n);
                let d = dpi_along(domain, &coh.c, a1, &member, &p)?
                    + I * dpi_along(domain, &coh.c, a2, &member, &p)?;
                let eigen = I * C64::new(coh.nu_tilde(a1), coh.nu_tilde(a2)) * member.eval(&p);
                row[j] = d - eigen;
            }
            rows.push(row);
        }
    }

    let mut mat = CMat::zeros(rows.len(), exps.len());
    for (i, row) in rows.iter().enumerate() {
        mat.set_row(i, &row.transpose());
    }
    Ok(exps.len() - linalg::rank(&mat, 1e-6))
}

/// z^a·u^b times the coherent function, exponents packed z-first.
fn monomial_times(coh: &CoherentFunction, exps: Vec<u32>, n: usize) -> HoloFn {
    let coh = coh.clone();
    HoloFn::new(move |p: &DomainPoint| {
        let mut mono = ONE;
        for (k, &e) in exps.iter().enumerate() {
            let var = if k < n { p.z[k] } else { p.u[k - n] };
            mono *= var.powu(e);
        }
        mono * coh.eval(p)
    })
}

/// True iff V_{ξ,s} and V_{ξ,t} are equivalent: s − t orthogonal (for the
/// Hermitian form h) to the null space N_ξ of H(ξ).
pub fn v_equivalent(q: &HermitianMap, xi: &Functional, s: &CVec, t: &CVec) -> Result<bool> {
    let null_basis = q.null_space(xi)?;
    let d = s - t;
    let scale = d.norm().max(1.0);
    for j in 0..null_basis.ncols() {
        let nj = CVec::from_column_slice(null_basis.column(j).as_slice());
        if h_inner(&d, &nj).norm() > 1e-9 * scale {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Gauss–Hermite order for `psi_st`; exact for polynomial integrands through
/// degree 79 per axis, far above the supported carrier degrees.
pub const PSI_ORDER: usize = 40;

/// Ψ_{s,t}F(u) = ∫ F(v)·e^{2i Im h(t−s,v)}·e^{2⟨ξ,Q(u,v)⟩}·e^{−2⟨ξ,Q(v,v)⟩} dλ_ξ(v),
/// integrating over the nondegenerate directions N_ξ^⊥, with dλ_ξ normalized
/// so the pure Gaussian has mass one.
///
/// With s = t this is the reproducing identity of the Fock model: Ψ F = F on
/// polynomials.
pub fn psi_st(
    q: &HermitianMap,
    xi: &Functional,
    s: &CVec,
    t: &CVec,
    f: &FockFn,
    u: &CVec,
) -> Result<C64> {
    if q.m() > 2 {
        return Err(SiegelError::Capability(format!(
            "psi_st supports at most 2 fiber dimensions, got {}",
            q.m()
        )));
    }
    if let Some(d) = f.degree() {
        if d > 6 {
            return Err(SiegelError::Capability(format!(
                "psi_st accepts polynomial carriers of degree at most 6, got {d}"
            )));
        }
    }

    let basis = q.null_space_complement(xi)?;
    let r = basis.ncols();
    if r == 0 {
        // The measure degenerates to the point mass at the origin.
        return Ok(f.eval(&CVec::zeros(q.m())));
    }

    let hxi = q.h_of_xi(xi)?;
    let gram = basis.adjoint() * &hxi * &basis;
    let (vals, vecs) = linalg::hermitian_eigen(&gram);
    if vals[0] <= 1e-12 * vals[vals.len() - 1].abs().max(1.0) {
        return Err(SiegelError::Precondition(
            "H(xi) is not positive definite on the complement of its null space".into(),
        ));
    }
    // Columns map Gauss–Hermite coordinates to v with 2⟨ξ,Q(v,v)⟩ = |x̂|²+|ŷ|².
    let mut map = basis * vecs;
    for j in 0..r {
        let factor = C64::new(1.0 / (2.0 * vals[j]).sqrt(), 0.0);
        for i in 0..map.nrows() {
            map[(i, j)] *= factor;
        }
    }

    let rule = gauss_hermite(PSI_ORDER);
    let hxi_u = &hxi * u;
    let phase = t - s;
    let mut total = C64::new(0.0, 0.0);
    tensor_indices(2 * r, rule.len(), |idx| {
        let mut v = CVec::zeros(q.m());
        let mut weight = 1.0;
        for j in 0..r {
            let x = rule.nodes[idx[j]];
            let y = rule.nodes[idx[r + j]];
            weight *= rule.weights[idx[j]] * rule.weights[idx[r + j]];
            v += map.column(j) * C64::new(x, y);
        }
        // 2⟨ξ,Q(u,v)⟩ = 2·v^*H(ξ)u.
        let gauss = 2.0
            * v.iter()
                .zip(hxi_u.iter())
                .map(|(vi, hi)| vi.conj() * hi)
                .sum::<C64>();
        let osc = 2.0 * I * h_inner(&phase, &v).im;
        total += C64::new(weight, 0.0) * f.eval(&v) * (gauss + osc).exp();
    });
    Ok(total / C64::new(std::f64::consts::PI.powi(r as i32), 0.0))
}

/// The scalar e^{i Im h(s−t, w_ξ)} relating Ψ_{s,t}∘V_{ξ,s}(n(0,w)) to
/// V_{ξ,t}(n(0,w))∘Ψ_{s,t}, with w_ξ the h-orthogonal projection of w onto
/// N_ξ. For interior ξ the projection vanishes and the scalar is 1.
pub fn psi_intertwining_scalar(
    q: &HermitianMap,
    xi: &Functional,
    s: &CVec,
    t: &CVec,
    w: &CVec,
) -> Result<C64> {
    let null_basis = q.null_space(xi)?;
    let w_xi = &null_basis * (null_basis.adjoint() * w);
    let d = s - t;
    Ok((I * h_inner(&d, &w_xi).im).exp())
}

/// Joint eigenfunction of π_0 restricted to the subgroup G^W with its
/// character, available exactly when Im Q(W,W) = 0.
#[derive(Debug, Clone)]
pub struct GwEigenfunction {
    q: HermitianMap,
    w: RealForm,
    pub xi: Functional,
    pub s: CVec,
    /// Largest verification defect |π_0(g)f − χ(g)f|/|f| observed at
    /// construction.
    pub max_defect: f64,
}

impl GwEigenfunction {
    /// f(z,u) = e^{−i⟨ξ,z⟩}·e^{−⟨ξ,Q(u,ū^W)⟩ + ½(h(u,s) − h(s,ū^W))}.
    pub fn eval(&self, p: &DomainPoint) -> C64 {
        let ubar = self.w.conjugate(&p.u);
        let quu = self.q.eval(&p.u, &ubar).expect("shapes fixed at construction");
        let log = -I * pair(&self.xi, &p.z) - pair(&self.xi, &quu)
            + 0.5 * (h_inner(&p.u, &self.s) - h_inner(&self.s, &ubar));
        log.exp()
    }

    pub fn holo(&self) -> HoloFn {
        let me = self.clone();
        HoloFn::new(move |p| me.eval(p))
    }

    /// χ(n(x₀,w₀)) = e^{i⟨ξ,x₀⟩ + i Im h(s,w₀)} for elements of G^W.
    pub fn character(&self, g: &GroupElement) -> Result<C64> {
        if !self.w.contains(&g.u, 1e-9 * (1.0 + g.u.norm())) {
            return Err(SiegelError::InvalidInput(
                "character is defined on G^W only: the fiber part must lie in W".into(),
            ));
        }
        let phase = self.xi.dot(&g.x) + h_inner(&self.s, &g.u).im;
        Ok((I * C64::new(phase, 0.0)).exp())
    }
}

/// Build the G^W eigenfunction and verify the eigen-identity at randomly
/// sampled group elements and interior points.
///
/// Errors with a precondition violation when Im Q(W,W) ≠ 0 (the domain is
/// then not multiplicity-free and no such eigenfunction exists).
pub fn eigenfunction_gw(
    domain: &SiegelDomain,
    w: &RealForm,
    xi: &Functional,
    s: &CVec,
) -> Result<GwEigenfunction> {
    let report = im_q_on_w(domain.q(), w)?;
    if !report.all_zero {
        return Err(SiegelError::Precondition(format!(
            "Im Q(W,W) != 0 (max {:.3e}): G^W admits no joint eigenfunction of this shape",
            report.max_norm
        )));
    }

    let mut out = GwEigenfunction {
        q: domain.q().clone(),
        w: w.clone(),
        xi: xi.clone(),
        s: s.clone(),
        max_defect: 0.0,
    };

    let n = domain.n();
    let m = domain.m();
    let f = out.holo();
    let zero_c = CVec::zeros(m);
    let mut rng = ChaCha8Rng::seed_from_u64(0xE16E);
    for _ in 0..20 {
        let x = RVec::from_iterator(n, (0..n).map(|_| rng.random_range(-1.0..1.0)));
        let coords = RVec::from_iterator(m, (0..m).map(|_| rng.random_range(-1.0..1.0)));
        let g = GroupElement::new(x, w.from_real_coords(&coords));
        let p = {
            let h = GroupElement::new(
                RVec::from_iterator(n, (0..n).map(|_| rng.random_range(-1.0..1.0))),
                CVec::from_iterator(
                    m,
                    (0..m)
                        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))),
                ),
            );
            domain.act(&h, &domain.reference_point())?
        };
        let lhs = apply_pi_c(domain, &zero_c, &g, &f, &p)?;
        let rhs = out.character(&g)? * out.eval(&p);
        let defect = (lhs - rhs).norm() / out.eval(&p).norm();
        out.max_defect = out.max_defect.max(defect);
    }
    if out.max_defect > 1e-9 {
        return Err(SiegelError::Numerical(format!(
            "eigenfunction verification failed: defect {:.3e} exceeds 1e-9",
            out.max_defect
        )));
    }
    Ok(out)
}
