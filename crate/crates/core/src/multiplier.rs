//! Holomorphic multipliers for the Heisenberg action: the canonical family
//! `m_c`, affine-exponential coboundary twists, cocycle checking, and a
//! finite-difference classifier that recovers `c` from black-box values.
//!
//! Invariants:
//! - every multiplier value is nonzero (all specs are exponentials);
//! - an untwisted spec depends on the group element only, never on the point;
//! - twisting by a coboundary never changes the classified parameter.

use crate::error::{Result, SiegelError};
use crate::group::{act, compose, DomainPoint, GroupElement, SiegelDomain};
use crate::hermitian::{h_inner, HermitianMap};
use crate::{C64, CVec};

/// Bilinear pairing Σ aₖ zₖ (no conjugation), the holomorphic dual pairing.
fn bilinear(a: &CVec, z: &CVec) -> C64 {
    a.iter().zip(z.iter()).map(|(x, y)| x * y).sum()
}

/// Zero-free affine exponential f(z,u) = exp(⟨a,z⟩ + ⟨b,u⟩ + const).
///
/// Dividing f(g·p) by f(p) produces a coboundary: a multiplier that is
/// trivial as a line-bundle datum. Twisting by one must leave every
/// classification result unchanged.
#[derive(Clone, Debug)]
pub struct CoboundaryTwist {
    pub a: CVec,
    pub b: CVec,
    pub constant: C64,
}

impl CoboundaryTwist {
    pub fn new(a: CVec, b: CVec, constant: C64) -> CoboundaryTwist {
        CoboundaryTwist { a, b, constant }
    }

    /// log f(p), exact (no branch ambiguity: the exponent itself).
    pub fn log_eval(&self, p: &DomainPoint) -> Result<C64> {
        if self.a.len() != p.z.len() || self.b.len() != p.u.len() {
            return Err(SiegelError::DimensionMismatch {
                what: "coboundary twist coefficients",
                expected: p.z.len() + p.u.len(),
                got: self.a.len() + self.b.len(),
            });
        }
        Ok(bilinear(&self.a, &p.z) + bilinear(&self.b, &p.u) + self.constant)
    }

    /// Pointwise product of the underlying functions: coefficients add.
    pub fn compose(&self, other: &CoboundaryTwist) -> CoboundaryTwist {
        CoboundaryTwist {
            a: &self.a + &other.a,
            b: &self.b + &other.b,
            constant: self.constant + other.constant,
        }
    }
}

/// A representable multiplier: the canonical character `m_c(n(x₀,u₀)) =
/// e^{h(c,u₀)}`, optionally twisted by a coboundary.
///
/// Every equivalence class of multipliers on the domain contains exactly one
/// canonical representative, so this family is complete up to coboundary.
#[derive(Clone, Debug)]
pub struct MultiplierSpec {
    pub c: CVec,
    pub twist: Option<CoboundaryTwist>,
}

impl MultiplierSpec {
    pub fn canonical(c: CVec) -> MultiplierSpec {
        MultiplierSpec { c, twist: None }
    }

    pub fn twisted(c: CVec, twist: CoboundaryTwist) -> MultiplierSpec {
        MultiplierSpec {
            c,
            twist: Some(twist),
        }
    }

    /// log m(g, p) = h(c,u₀) + log f(g·p) − log f(p).
    pub fn log_eval(&self, q: &HermitianMap, g: &GroupElement, p: &DomainPoint) -> Result<C64> {
        if self.c.len() != g.u.len() {
            return Err(SiegelError::DimensionMismatch {
                what: "multiplier parameter c",
                expected: g.u.len(),
                got: self.c.len(),
            });
        }
        let mut v = h_inner(&self.c, &g.u);
        if let Some(t) = &self.twist {
            let gp = act(q, g, p)?;
            v += t.log_eval(&gp)? - t.log_eval(p)?;
        }
        Ok(v)
    }

    /// m(g, p), always nonzero.
    pub fn eval(&self, q: &HermitianMap, g: &GroupElement, p: &DomainPoint) -> Result<C64> {
        Ok(self.log_eval(q, g, p)?.exp())
    }

    /// Pointwise product of multipliers: parameters add, twists compose.
    pub fn product(&self, other: &MultiplierSpec) -> MultiplierSpec {
        let twist = match (&self.twist, &other.twist) {
            (None, None) => None,
            (Some(t), None) | (None, Some(t)) => Some(t.clone()),
            (Some(s), Some(t)) => Some(s.compose(t)),
        };
        MultiplierSpec {
            c: &self.c + &other.c,
            twist,
        }
    }
}

/// Relative failure of the cocycle identity at (g, g', p):
/// |m(gg', p) − m(g, g'·p)·m(g', p)| / |m(gg', p)|.
///
/// Identically zero (up to roundoff) for every representable spec.
pub fn cocycle_defect(
    spec: &MultiplierSpec,
    q: &HermitianMap,
    g: &GroupElement,
    g2: &GroupElement,
    p: &DomainPoint,
) -> Result<f64> {
    let lhs = spec.eval(q, &compose(q, g, g2)?, p)?;
    let rhs = spec.eval(q, g, &act(q, g2, p)?)? * spec.eval(q, g2, p)?;
    Ok((lhs - rhs).norm() / lhs.norm())
}

/// Recover the canonical parameter of a representable spec; coboundary
/// twists drop out. See [`classify_fn`] for the black-box version.
pub fn classify_multiplier(spec: &MultiplierSpec, domain: &SiegelDomain) -> Result<CVec> {
    classify_fn(domain, |g, p| spec.eval(domain.q(), g, p))
}

/// Tolerance for deciding that two classified parameters name the same
/// bundle.
pub const BUNDLE_TOL: f64 = 1e-8;

/// True iff the parameters agree coordinatewise within [`BUNDLE_TOL`];
/// distinct canonical parameters always give inequivalent bundles.
pub fn bundles_equivalent(c: &CVec, c2: &CVec) -> bool {
    c.len() == c2.len()
        && c.iter()
            .zip(c2.iter())
            .all(|(x, y)| (x - y).norm() <= BUNDLE_TOL)
}

/// Classify a black-box multiplier by finite differences at the reference
/// point p₀ = (i·(barycenter of Ω), 0).
///
/// For each α the derivative of log m along n(0, t·e_α) and n(0, t·i e_α)
/// at t = 0 yields D₁ and D₂ with c_α = (D₁ + i·D₂)/2; contributions of any
/// coboundary factor cancel in that combination. Central differences at
/// step 1e-5 with one Richardson extrapolation; the log follows a
/// continuous branch along each path.
///
/// For m = 0 (no fiber coordinates) returns the empty vector: every bundle
/// is trivial.
pub fn classify_fn<F>(domain: &SiegelDomain, m: F) -> Result<CVec>
where
    F: Fn(&GroupElement, &DomainPoint) -> Result<C64>,
{
    let n = domain.n();
    let mm = domain.m();
    let p0 = domain.reference_point();

    let at_id = m(&GroupElement::identity(n, mm), &p0)?;
    if (at_id - C64::new(1.0, 0.0)).norm() > 1e-9 {
        return Err(SiegelError::InvalidInput(format!(
            "multiplier is not normalized: m(identity, p0) = {at_id}, want 1"
        )));
    }

    let mut c = CVec::zeros(mm);
    for alpha in 0..mm {
        let mut real_dir = CVec::zeros(mm);
        real_dir[alpha] = C64::new(1.0, 0.0);
        let mut imag_dir = CVec::zeros(mm);
        imag_dir[alpha] = C64::new(0.0, 1.0);

        let d1 = path_derivative(|t| {
            m(
                &GroupElement::translation(n, real_dir.map(|w| w * t)),
                &p0,
            )
        })?;
        let d2 = path_derivative(|t| {
            m(
                &GroupElement::translation(n, imag_dir.map(|w| w * t)),
                &p0,
            )
        })?;
        c[alpha] = (d1 + C64::new(0.0, 1.0) * d2) / 2.0;
    }
    Ok(c)
}

const CLASSIFY_STEP: f64 = 1e-5;

/// d/dt log f(t) at t = 0 for f(0) = 1, by Richardson-extrapolated central
/// differences with branch-tracked logs.
fn path_derivative<F>(f: F) -> Result<C64>
where
    F: Fn(f64) -> Result<C64>,
{
    let diff = |h: f64| -> Result<C64> {
        Ok((tracked_log(&f, h)? - tracked_log(&f, -h)?) / C64::new(2.0 * h, 0.0))
    };
    let d_full = diff(CLASSIFY_STEP)?;
    let d_half = diff(CLASSIFY_STEP / 2.0)?;
    Ok((4.0 * d_half - d_full) / 3.0)
}

/// log f(t) on the branch continuous along [0, t], starting from
/// log f(0) = 0. Walks the path in a few substeps and unwraps the phase;
/// a jump too large to unwrap reliably is reported as an error.
fn tracked_log<F>(f: &F, t: f64) -> Result<C64>
where
    F: Fn(f64) -> Result<C64>,
{
    const SUBSTEPS: usize = 4;
    let mut prev = C64::new(0.0, 0.0);
    for k in 1..=SUBSTEPS {
        let s = t * (k as f64) / (SUBSTEPS as f64);
        let v = f(s)?;
        if !v.is_finite() || v.norm() < 1e-300 {
            return Err(SiegelError::Numerical(format!(
                "multiplier vanished or overflowed along the classification path at t = {s:e}"
            )));
        }
        let mut l = v.ln();
        let jumps = ((prev.im - l.im) / std::f64::consts::TAU).round();
        l.im += jumps * std::f64::consts::TAU;
        if (l.im - prev.im).abs() > std::f64::consts::FRAC_PI_2 {
            return Err(SiegelError::Numerical(format!(
                "log branch moved by {:.3} rad in one substep at t = {s:e}; \
                 the multiplier oscillates too fast for step {CLASSIFY_STEP:e}, use a smaller step",
                (l.im - prev.im).abs()
            )));
        }
        prev = l;
    }
    Ok(prev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::Cone;
    use crate::CMat;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cv(parts: &[(f64, f64)]) -> CVec {
        CVec::from_iterator(parts.len(), parts.iter().map(|&(re, im)| C64::new(re, im)))
    }

    /// N = 2, M = 2, Q(u,v) = (v̄₁u₁, v̄₂u₂) over the orthant.
    fn test_domain() -> SiegelDomain {
        let h1 = CMat::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        );
        let h2 = CMat::from_row_slice(
            2,
            2,
            &[
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
            ],
        );
        SiegelDomain::new(
            Cone::orthant(2).unwrap(),
            HermitianMap::new(2, 2, vec![h1, h2]).unwrap(),
        )
        .unwrap()
    }

    fn random_element(rng: &mut ChaCha8Rng, n: usize, m: usize) -> GroupElement {
        let x = crate::RVec::from_iterator(n, (0..n).map(|_| rng.random_range(-1.0..1.0)));
        let u = CVec::from_iterator(
            m,
            (0..m).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))),
        );
        GroupElement::new(x, u)
    }

    /// Random interior point, reached by letting a random element act on the
    /// reference point (the action preserves the domain).
    fn random_point(rng: &mut ChaCha8Rng, domain: &SiegelDomain) -> DomainPoint {
        let g = random_element(rng, domain.n(), domain.m());
        domain.act(&g, &domain.reference_point()).unwrap()
    }

    fn sample_twist() -> CoboundaryTwist {
        CoboundaryTwist::new(
            cv(&[(0.3, -0.2), (0.0, 0.5)]),
            cv(&[(-0.4, 0.1), (0.2, 0.2)]),
            C64::new(0.7, -1.1),
        )
    }

    #[test]
    fn trivial_spec_is_constant_one() {
        let domain = test_domain();
        let spec = MultiplierSpec::canonical(CVec::zeros(2));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let g = random_element(&mut rng, 2, 2);
            let p = random_point(&mut rng, &domain);
            let v = spec.eval(domain.q(), &g, &p).unwrap();
            assert!((v - C64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn canonical_value_by_hand() {
        // M = 1, c = 1, u₀ = 1, Q(u,v) = v̄u: m = e^{1·conj(1)} = e.
        let h = CMat::from_element(1, 1, C64::new(1.0, 0.0));
        let domain =
            SiegelDomain::new(Cone::orthant(1).unwrap(), HermitianMap::new(1, 1, vec![h]).unwrap())
                .unwrap();
        let spec = MultiplierSpec::canonical(cv(&[(1.0, 0.0)]));
        let g = GroupElement::translation(1, cv(&[(1.0, 0.0)]));
        let v = spec
            .eval(domain.q(), &g, &domain.reference_point())
            .unwrap();
        assert!((v - C64::new(std::f64::consts::E, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn constant_twist_cancels() {
        let domain = test_domain();
        let c = cv(&[(1.0, 2.0), (-0.5, 0.0)]);
        let plain = MultiplierSpec::canonical(c.clone());
        let shifted = MultiplierSpec::twisted(
            c,
            CoboundaryTwist::new(CVec::zeros(2), CVec::zeros(2), C64::new(5.0, 0.0)),
        );
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let g = random_element(&mut rng, 2, 2);
            let p = random_point(&mut rng, &domain);
            let a = plain.eval(domain.q(), &g, &p).unwrap();
            let b = shifted.eval(domain.q(), &g, &p).unwrap();
            assert!((a - b).norm() < 1e-12 * a.norm());
        }
    }

    #[test]
    fn cocycle_identity_holds() {
        let domain = test_domain();
        let specs = [
            MultiplierSpec::canonical(cv(&[(1.0, 2.0), (0.0, -1.0)])),
            MultiplierSpec::twisted(cv(&[(0.5, -0.3), (1.5, 0.2)]), sample_twist()),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for spec in &specs {
            for _ in 0..50 {
                let g = random_element(&mut rng, 2, 2);
                let g2 = random_element(&mut rng, 2, 2);
                let p = random_point(&mut rng, &domain);
                let defect = cocycle_defect(spec, domain.q(), &g, &g2, &p).unwrap();
                assert!(defect < 1e-10, "defect {defect}");
            }
            // g' = identity: exact.
            let g = random_element(&mut rng, 2, 2);
            let p = random_point(&mut rng, &domain);
            let id = GroupElement::identity(2, 2);
            let defect = cocycle_defect(spec, domain.q(), &g, &id, &p).unwrap();
            assert!(defect < 1e-14);
        }
    }

    #[test]
    fn product_of_specs_multiplies_values() {
        let domain = test_domain();
        let s1 = MultiplierSpec::twisted(cv(&[(1.0, 0.0), (0.0, 1.0)]), sample_twist());
        let s2 = MultiplierSpec::canonical(cv(&[(-0.5, 0.25), (2.0, 0.0)]));
        let prod = s1.product(&s2);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let g = random_element(&mut rng, 2, 2);
            let p = random_point(&mut rng, &domain);
            let lhs = prod.eval(domain.q(), &g, &p).unwrap();
            let rhs =
                s1.eval(domain.q(), &g, &p).unwrap() * s2.eval(domain.q(), &g, &p).unwrap();
            assert!((lhs - rhs).norm() < 1e-12 * lhs.norm());
        }
    }

    #[test]
    fn classify_recovers_untwisted_parameter() {
        let domain = test_domain();
        let c = cv(&[(3.0, -1.0), (0.5, 2.5)]);
        let got = classify_multiplier(&MultiplierSpec::canonical(c.clone()), &domain).unwrap();
        for alpha in 0..2 {
            assert!((got[alpha] - c[alpha]).norm() < 1e-8);
        }
    }

    #[test]
    fn classify_sees_through_twists() {
        let domain = test_domain();
        let c = cv(&[(-1.25, 0.75), (2.0, -2.0)]);
        let spec = MultiplierSpec::twisted(c.clone(), sample_twist());
        let got = classify_multiplier(&spec, &domain).unwrap();
        for alpha in 0..2 {
            assert!(
                (got[alpha] - c[alpha]).norm() < 1e-6,
                "alpha {alpha}: got {}, want {}",
                got[alpha],
                c[alpha]
            );
        }
        assert!(bundles_equivalent(&got, &c) || (got[0] - c[0]).norm() > 1e-8);

        // Pure twist classifies as the trivial bundle.
        let pure = MultiplierSpec::twisted(CVec::zeros(2), sample_twist());
        let got = classify_multiplier(&pure, &domain).unwrap();
        assert!(got.iter().all(|w| w.norm() < 1e-6));
    }

    #[test]
    fn classify_tube_case_is_empty() {
        let domain = SiegelDomain::new(Cone::orthant(2).unwrap(), HermitianMap::tube(2)).unwrap();
        let got =
            classify_multiplier(&MultiplierSpec::canonical(CVec::zeros(0)), &domain).unwrap();
        assert_eq!(got.len(), 0);
    }

    #[test]
    fn classify_rejects_unnormalized_functions() {
        let domain = test_domain();
        let err = classify_fn(&domain, |_, _| Ok(C64::new(2.0, 0.0))).unwrap_err();
        assert!(matches!(err, SiegelError::InvalidInput(_)));
    }

    #[test]
    fn bundle_equivalence_tolerance() {
        let c = cv(&[(0.0, 0.0), (1.0, 1.0)]);
        assert!(bundles_equivalent(&c, &c));
        let mut shifted = c.clone();
        shifted[0] += C64::new(1e-3, 0.0);
        assert!(!bundles_equivalent(&c, &shifted));
        let mut near = c.clone();
        near[1] += C64::new(0.0, 1e-9);
        assert!(bundles_equivalent(&c, &near));
    }
}
