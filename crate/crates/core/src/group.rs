//! The generalized Heisenberg group `G = R^N × C^M` attached to a
//! Hermitian map `Q`, acting affinely on the Siegel domain `D(Ω, Q)`.
//!
//! Elements are written `n(x, u)`. The action on points is
//!
//! ```text
//! n(x₀, u₀) · (z, u) = (z + x₀ + 2 i Q(u, u₀) + i Q(u₀, u₀), u + u₀)
//! ```
//!
//! and the group law making this a left action is
//!
//! ```text
//! n(x, u) · n(x', u') = n(x + x' + 2 Im Q(u, u'), u + u').
//! ```
//!
//! The group is 2-step nilpotent with bracket
//! `[(x, u), (x', u')] = (4 Im Q(u, u'), 0)`; the exponential map is the
//! identity on the `(x, u)` data, so Baker–Campbell–Hausdorff reads
//! `compose(exp a, exp b) = exp(a + b + ½ [a, b])`. The action preserves
//! the height `Im z − Q(u, u)` exactly, hence maps the domain onto itself.

use crate::cone::Cone;
use crate::error::{Result, SiegelError};
use crate::hermitian::HermitianMap;
use crate::{C64, CVec, RVec};

/// Group element `n(x, u)` with `x ∈ R^N`, `u ∈ C^M`. The same data
/// parameterizes the Lie algebra through the exponential map.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    pub x: RVec,
    pub u: CVec,
}

impl GroupElement {
    pub fn new(x: RVec, u: CVec) -> GroupElement {
        GroupElement { x, u }
    }

    pub fn identity(n: usize, m: usize) -> GroupElement {
        GroupElement {
            x: RVec::zeros(n),
            u: CVec::zeros(m),
        }
    }

    /// Central element `n(x, 0)`.
    pub fn central(x: RVec, m: usize) -> GroupElement {
        GroupElement {
            x,
            u: CVec::zeros(m),
        }
    }

    /// `n(0, u)`.
    pub fn translation(n: usize, u: CVec) -> GroupElement {
        GroupElement {
            x: RVec::zeros(n),
            u,
        }
    }

    pub fn scaled(&self, t: f64) -> GroupElement {
        GroupElement {
            x: &self.x * t,
            u: &self.u * C64::new(t, 0.0),
        }
    }
}

/// Point `(z, u)` of `C^N × C^M`.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainPoint {
    pub z: CVec,
    pub u: CVec,
}

impl DomainPoint {
    pub fn new(z: CVec, u: CVec) -> DomainPoint {
        DomainPoint { z, u }
    }
}

/// `g · g'` under the group law `n(x + x' + 2 Im Q(u, u'), u + u')`.
pub fn compose(q: &HermitianMap, g: &GroupElement, g2: &GroupElement) -> Result<GroupElement> {
    let quu = q.eval(&g.u, &g2.u)?;
    let twist = RVec::from_iterator(q.n(), quu.iter().map(|c| 2.0 * c.im));
    Ok(GroupElement {
        x: &g.x + &g2.x + twist,
        u: &g.u + &g2.u,
    })
}

/// `g⁻¹ = n(−x, −u)`.
pub fn invert(g: &GroupElement) -> GroupElement {
    GroupElement {
        x: -&g.x,
        u: -&g.u,
    }
}

/// Lie bracket `[(x, u), (x', u')] = (4 Im Q(u, u'), 0)`.
pub fn bracket(q: &HermitianMap, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
    let quu = q.eval(&a.u, &b.u)?;
    Ok(GroupElement {
        x: RVec::from_iterator(q.n(), quu.iter().map(|c| 4.0 * c.im)),
        u: CVec::zeros(q.m()),
    })
}

/// The affine action of `g` on a point, with no domain membership check.
pub fn act(q: &HermitianMap, g: &GroupElement, p: &DomainPoint) -> Result<DomainPoint> {
    let cross = q.eval(&p.u, &g.u)?;
    let self_term = q.eval(&g.u, &g.u)?;
    let i = C64::new(0.0, 1.0);
    let x0 = CVec::from_iterator(g.x.len(), g.x.iter().map(|&x| C64::new(x, 0.0)));
    let z = &p.z + x0 + cross * (2.0 * i) + self_term * i;
    Ok(DomainPoint {
        z,
        u: &p.u + &g.u,
    })
}

/// The Siegel domain `D(Ω, Q) = { (z, u) : Im z − Q(u, u) ∈ Ω }`.
#[derive(Debug, Clone)]
pub struct SiegelDomain {
    cone: Cone,
    q: HermitianMap,
}

impl SiegelDomain {
    pub fn new(cone: Cone, q: HermitianMap) -> Result<SiegelDomain> {
        if cone.dim() != q.n() {
            return Err(SiegelError::DimensionMismatch {
                what: "cone dimension vs Hermitian map",
                expected: q.n(),
                got: cone.dim(),
            });
        }
        Ok(SiegelDomain { cone, q })
    }

    pub fn cone(&self) -> &Cone {
        &self.cone
    }

    pub fn q(&self) -> &HermitianMap {
        &self.q
    }

    pub fn n(&self) -> usize {
        self.q.n()
    }

    pub fn m(&self) -> usize {
        self.q.m()
    }

    /// `Im z − Q(u, u)`.
    pub fn height(&self, p: &DomainPoint) -> Result<RVec> {
        let qd = self.q.eval_diag(&p.u)?;
        Ok(RVec::from_iterator(
            p.z.len(),
            p.z.iter().zip(qd.iter()).map(|(z, q)| z.im - q),
        ))
    }

    pub fn contains(&self, p: &DomainPoint) -> Result<bool> {
        if p.z.len() != self.n() || p.u.len() != self.m() {
            return Err(SiegelError::DimensionMismatch {
                what: "point dimensions",
                expected: self.n(),
                got: p.z.len(),
            });
        }
        self.cone.contains(&self.height(p)?, true)
    }

    /// Checked constructor for interior points.
    pub fn point(&self, z: CVec, u: CVec) -> Result<DomainPoint> {
        let p = DomainPoint::new(z, u);
        if !self.contains(&p)? {
            return Err(SiegelError::OutsideDomain(format!(
                "height {:?} is not interior to the cone",
                self.height(&p)?
            )));
        }
        Ok(p)
    }

    /// `(i · A·(1, …, 1), 0)`, an interior base point.
    pub fn reference_point(&self) -> DomainPoint {
        let bary = self.cone.barycenter();
        DomainPoint {
            z: CVec::from_iterator(bary.len(), bary.iter().map(|&y| C64::new(0.0, y))),
            u: CVec::zeros(self.m()),
        }
    }

    /// Action of `g` on an interior point; the result stays interior
    /// because the height is preserved exactly.
    pub fn act(&self, g: &GroupElement, p: &DomainPoint) -> Result<DomainPoint> {
        act(&self.q, g, p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::CMat;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cvec(entries: &[(f64, f64)]) -> CVec {
        CVec::from_iterator(entries.len(), entries.iter().map(|&(re, im)| C64::new(re, im)))
    }

    fn scalar_domain() -> SiegelDomain {
        let cone = Cone::orthant(1).unwrap();
        let q = HermitianMap::new(1, 1, vec![CMat::identity(1, 1)]).unwrap();
        SiegelDomain::new(cone, q).unwrap()
    }

    fn random_element(rng: &mut impl Rng, n: usize, m: usize) -> GroupElement {
        GroupElement::new(
            RVec::from_fn(n, |_, _| rng.random_range(-2.0..2.0)),
            CVec::from_fn(m, |_, _| {
                C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))
            }),
        )
    }

    #[test]
    fn action_example() {
        // n(0, 1) · (i, 0) = (2i, 1) for H₁ = [1].
        let dom = scalar_domain();
        let g = GroupElement::translation(1, cvec(&[(1.0, 0.0)]));
        let p = DomainPoint::new(cvec(&[(0.0, 1.0)]), cvec(&[(0.0, 0.0)]));
        let moved = dom.act(&g, &p).unwrap();
        assert!((moved.z[0] - C64::new(0.0, 2.0)).norm() < 1e-15);
        assert!((moved.u[0] - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn composition_example_noncommutative() {
        // x-parts of n(0,1)·n(0,i) and n(0,i)·n(0,1) differ by ±4.
        let dom = scalar_domain();
        let a = GroupElement::translation(1, cvec(&[(1.0, 0.0)]));
        let b = GroupElement::translation(1, cvec(&[(0.0, 1.0)]));
        let ab = compose(dom.q(), &a, &b).unwrap();
        let ba = compose(dom.q(), &b, &a).unwrap();
        assert!((ab.x[0] + 2.0).abs() < 1e-15);
        assert!((ba.x[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn inverse_and_identity() {
        let dom = scalar_domain();
        let g = GroupElement::new(RVec::from_row_slice(&[0.7]), cvec(&[(1.0, -0.5)]));
        let e = compose(dom.q(), &g, &invert(&g)).unwrap();
        assert!(e.x.amax() < 1e-15);
        assert!(e.u.iter().all(|c| c.norm() < 1e-15));
    }

    #[test]
    fn group_law_is_compatible_with_action() {
        // act(compose(g, g'), p) = act(g, act(g', p)) pins the sign of the
        // 2 Im Q(u, u') twist; verify over random data.
        let h1 = CMat::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(0.2, 0.3),
                C64::new(0.2, -0.3),
                C64::new(0.8, 0.0),
            ],
        );
        let h2 = CMat::from_row_slice(
            2,
            2,
            &[
                C64::new(0.5, 0.0),
                C64::new(0.0, -0.6),
                C64::new(0.0, 0.6),
                C64::new(1.5, 0.0),
            ],
        );
        let q = HermitianMap::new(2, 2, vec![h1, h2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let g = random_element(&mut rng, 2, 2);
            let g2 = random_element(&mut rng, 2, 2);
            let p = DomainPoint::new(
                CVec::from_fn(2, |_, _| {
                    C64::new(rng.random_range(-1.0..1.0), rng.random_range(1.0..3.0))
                }),
                CVec::from_fn(2, |_, _| {
                    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                }),
            );
            let via_compose = act(&q, &compose(&q, &g, &g2).unwrap(), &p).unwrap();
            let via_action = act(&q, &g, &act(&q, &g2, &p).unwrap()).unwrap();
            let dz = (&via_compose.z - &via_action.z).norm();
            let du = (&via_compose.u - &via_action.u).norm();
            assert!(dz < 1e-12 && du < 1e-12);
        }
    }

    #[test]
    fn bch_for_two_step_nilpotent() {
        // compose(exp a, exp b) = exp(a + b + ½[a, b]).
        let q = HermitianMap::new(1, 2, vec![CMat::identity(2, 2)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let a = random_element(&mut rng, 1, 2);
            let b = random_element(&mut rng, 1, 2);
            let lhs = compose(&q, &a, &b).unwrap();
            let br = bracket(&q, &a, &b).unwrap();
            let rhs = GroupElement::new(&a.x + &b.x + &br.x * 0.5, &a.u + &b.u);
            assert!((&lhs.x - &rhs.x).amax() < 1e-12);
            assert!((&lhs.u - &rhs.u).norm() < 1e-12);
        }
    }

    #[test]
    fn height_is_preserved_exactly() {
        let dom = scalar_domain();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let g = random_element(&mut rng, 1, 1);
            let u = cvec(&[(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))]);
            let qd = dom.q().eval_diag(&u).unwrap();
            let z = cvec(&[(rng.random_range(-1.0..1.0), qd[0] + rng.random_range(0.1..2.0))]);
            let p = dom.point(z, u).unwrap();
            let before = dom.height(&p).unwrap();
            let after = dom.height(&dom.act(&g, &p).unwrap()).unwrap();
            assert!((before - after).amax() < 1e-13);
        }
    }

    #[test]
    fn domain_membership() {
        let dom = scalar_domain();
        // Im z − |u|² = 2 − 1 = 1 > 0.
        assert!(dom
            .point(cvec(&[(0.0, 2.0)]), cvec(&[(1.0, 0.0)]))
            .is_ok());
        // Im z − |u|² = 1 − 1 = 0: boundary.
        assert!(matches!(
            dom.point(cvec(&[(0.0, 1.0)]), cvec(&[(1.0, 0.0)])),
            Err(SiegelError::OutsideDomain(_))
        ));
        let r = dom.reference_point();
        assert!(dom.contains(&r).unwrap());
    }
}
