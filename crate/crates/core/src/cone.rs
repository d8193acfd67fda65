//! Regular convex cones in `R^N` described by an invertible generator
//! matrix.
//!
//! A simplicial cone is `Ω = { A t : t ∈ R^N, t > 0 }` for an invertible
//! `A` whose columns are the generators; the positive orthant is the case
//! `A = I`. The open dual cone is `Ω* = { ξ : ⟨ξ, y⟩ > 0 for all
//! y ∈ closure(Ω) ∖ {0} } = { ξ : Aᵀ ξ > 0 }`.
//!
//! Invariants kept by construction:
//! * `A` is invertible (guarded by a conditioning check);
//! * membership tests are exact linear algebra plus a scale-aware
//!   tolerance `1e-12 · (1 + max |coordinate|)`;
//! * the characteristic integral `I(ξ) = ∫_Ω e^{−2⟨ξ,y⟩} dy` is the closed
//!   form `|det A| · Π_k 1 / (2⟨ξ, a_k⟩)` and diverges exactly on the
//!   complement of the open dual cone.

use crate::error::{Result, SiegelError};
use crate::{RMat, RVec};

/// Linear functional on `R^N`, paired with vectors by the standard dot
/// product.
pub type Functional = RVec;

/// Membership tolerance scaled to the tested coordinates.
fn coord_tol(coords: &RVec) -> f64 {
    1e-12 * (1.0 + coords.amax())
}

#[derive(Debug, Clone)]
pub struct Cone {
    generators: RMat,
    inverse: RMat,
    abs_det: f64,
    orthant: bool,
}

impl Cone {
    /// The positive orthant in `R^n`.
    pub fn orthant(n: usize) -> Result<Cone> {
        if n == 0 {
            return Err(SiegelError::InvalidInput("cone dimension must be ≥ 1".into()));
        }
        Ok(Cone {
            generators: RMat::identity(n, n),
            inverse: RMat::identity(n, n),
            abs_det: 1.0,
            orthant: true,
        })
    }

    /// Simplicial cone spanned by the columns of `generators`.
    pub fn simplicial(generators: RMat) -> Result<Cone> {
        let n = generators.nrows();
        if n == 0 || generators.ncols() != n {
            return Err(SiegelError::InvalidInput(format!(
                "generator matrix must be square and nonempty, got {}×{}",
                generators.nrows(),
                generators.ncols()
            )));
        }
        let sv = generators.clone().singular_values();
        let smax = sv.iter().fold(0.0f64, |a, &s| a.max(s));
        let smin = sv.iter().fold(f64::INFINITY, |a, &s| a.min(s));
        if smax == 0.0 || smin <= 1e-12 * smax {
            return Err(SiegelError::InvalidInput(
                "generator matrix is singular or too ill-conditioned".into(),
            ));
        }
        let inverse = generators
            .clone()
            .try_inverse()
            .ok_or_else(|| SiegelError::InvalidInput("generator matrix is singular".into()))?;
        let abs_det = generators.determinant().abs();
        Ok(Cone {
            generators,
            inverse,
            abs_det,
            orthant: false,
        })
    }

    pub fn dim(&self) -> usize {
        self.generators.nrows()
    }

    pub fn is_orthant(&self) -> bool {
        self.orthant
    }

    /// Generator matrix `A` (columns are the extreme rays).
    pub fn generator_matrix(&self) -> &RMat {
        &self.generators
    }

    /// `A⁻¹`; its rows are the extreme rays of the dual description of the
    /// closure.
    pub fn inverse_matrix(&self) -> &RMat {
        &self.inverse
    }

    pub fn abs_det(&self) -> f64 {
        self.abs_det
    }

    /// An interior point, the sum of the generators `A · (1, …, 1)`.
    pub fn barycenter(&self) -> RVec {
        let n = self.dim();
        &self.generators * RVec::from_element(n, 1.0)
    }

    /// Membership of `y` in the open cone (`strict`) or its closure.
    pub fn contains(&self, y: &RVec, strict: bool) -> Result<bool> {
        self.check_dim(y, "cone membership")?;
        let t = &self.inverse * y;
        let tol = coord_tol(&t);
        Ok(if strict {
            t.iter().all(|&c| c > tol)
        } else {
            t.iter().all(|&c| c >= -tol)
        })
    }

    /// Membership of `ξ` in the open dual cone (`strict`) or its closure.
    pub fn dual_contains(&self, xi: &Functional, strict: bool) -> Result<bool> {
        self.check_dim(xi, "dual cone membership")?;
        let s = self.generators.transpose() * xi;
        let tol = coord_tol(&s);
        Ok(if strict {
            s.iter().all(|&c| c > tol)
        } else {
            s.iter().all(|&c| c >= -tol)
        })
    }

    /// Characteristic integral `I(ξ) = ∫_Ω e^{−2⟨ξ,y⟩} dy`.
    ///
    /// Diverges (an error) unless `ξ` lies in the open dual cone.
    pub fn char_integral(&self, xi: &Functional) -> Result<f64> {
        self.check_dim(xi, "characteristic integral")?;
        if !self.dual_contains(xi, true)? {
            return Err(SiegelError::Divergent(
                "characteristic integral requires ξ in the open dual cone".into(),
            ));
        }
        let s = self.generators.transpose() * xi;
        let mut value = self.abs_det;
        for &sk in s.iter() {
            value /= 2.0 * sk;
        }
        Ok(value)
    }

    fn check_dim(&self, v: &RVec, what: &'static str) -> Result<()> {
        if v.len() != self.dim() {
            return Err(SiegelError::DimensionMismatch {
                what,
                expected: self.dim(),
                got: v.len(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature;

    fn simplicial_example() -> Cone {
        // Rows [[1, 1], [0, 1]]: columns (generators) are (1, 0) and (1, 1).
        Cone::simplicial(RMat::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0])).unwrap()
    }

    /// Independent quadrature route for the characteristic integral:
    /// tensorized Gauss–Legendre in the generator coordinates over a box
    /// truncating the exponential tail at `e^{−16}` per axis.
    fn char_integral_by_quadrature(cone: &Cone, xi: &RVec, nodes: usize) -> f64 {
        let n = cone.dim();
        let s = cone.generator_matrix().transpose() * xi;
        let rules: Vec<quadrature::Rule> = (0..n)
            .map(|k| quadrature::gauss_legendre_on(nodes, 0.0, 16.0 / (2.0 * s[k])))
            .collect();
        let mut total = 0.0;
        quadrature::tensor_indices(n, nodes, |idx| {
            let mut w = 1.0;
            let mut expo = 0.0;
            for k in 0..n {
                w *= rules[k].weights[idx[k]];
                expo += s[k] * rules[k].nodes[idx[k]];
            }
            total += w * (-2.0 * expo).exp();
        });
        total * cone.abs_det()
    }

    #[test]
    fn orthant_membership() {
        let cone = Cone::orthant(2).unwrap();
        assert!(cone
            .contains(&RVec::from_row_slice(&[1.0, 2.0]), true)
            .unwrap());
        assert!(!cone
            .contains(&RVec::from_row_slice(&[1.0, 0.0]), true)
            .unwrap());
        assert!(cone
            .contains(&RVec::from_row_slice(&[1.0, 0.0]), false)
            .unwrap());
        assert!(!cone
            .contains(&RVec::from_row_slice(&[-1e-6, 1.0]), false)
            .unwrap());
    }

    #[test]
    fn simplicial_membership_and_dual() {
        let cone = simplicial_example();
        // A⁻¹ (2, 1) = (1, 1) > 0.
        assert!(cone
            .contains(&RVec::from_row_slice(&[2.0, 1.0]), true)
            .unwrap());
        // (1, 0) is a generator: boundary, not interior.
        assert!(!cone
            .contains(&RVec::from_row_slice(&[1.0, 0.0]), true)
            .unwrap());
        assert!(cone
            .contains(&RVec::from_row_slice(&[1.0, 0.0]), false)
            .unwrap());
        // Aᵀ (1, 0) = (1, 1) > 0.
        assert!(cone
            .dual_contains(&RVec::from_row_slice(&[1.0, 0.0]), true)
            .unwrap());
        // ⟨ξ, a₂⟩ = 0 for ξ = (1, −1): boundary of the dual.
        assert!(!cone
            .dual_contains(&RVec::from_row_slice(&[1.0, -1.0]), true)
            .unwrap());
        assert!(cone
            .dual_contains(&RVec::from_row_slice(&[1.0, -1.0]), false)
            .unwrap());
    }

    #[test]
    fn char_integral_closed_forms() {
        // Half line, ξ = 1: ∫_0^∞ e^{−2y} dy = 1/2.
        let half_line = Cone::orthant(1).unwrap();
        let got = half_line
            .char_integral(&RVec::from_row_slice(&[1.0]))
            .unwrap();
        assert!((got - 0.5).abs() < 1e-15);

        // Simplicial example at ξ = (1, 1): |det A| = 1, ⟨ξ, a₁⟩ = 1,
        // ⟨ξ, a₂⟩ = 2, so I = 1/(2·1) · 1/(2·2) = 1/8.
        let cone = simplicial_example();
        let got = cone
            .char_integral(&RVec::from_row_slice(&[1.0, 1.0]))
            .unwrap();
        assert!((got - 0.125).abs() < 1e-15);
    }

    #[test]
    fn char_integral_matches_quadrature_oracle() {
        let cone = simplicial_example();
        for xi in [
            RVec::from_row_slice(&[1.0, 1.0]),
            RVec::from_row_slice(&[2.0, -0.5]),
            RVec::from_row_slice(&[0.7, 0.9]),
        ] {
            let closed = cone.char_integral(&xi).unwrap();
            let quad = char_integral_by_quadrature(&cone, &xi, 80);
            assert!(
                (closed - quad).abs() <= 1e-3 * closed.abs(),
                "ξ={xi:?}: closed {closed} vs quadrature {quad}"
            );
        }
        let orthant = Cone::orthant(3).unwrap();
        let xi = RVec::from_row_slice(&[1.0, 2.0, 0.5]);
        let closed = orthant.char_integral(&xi).unwrap();
        let quad = char_integral_by_quadrature(&orthant, &xi, 60);
        assert!((closed - quad).abs() <= 1e-3 * closed);
    }

    #[test]
    fn char_integral_diverges_off_the_open_dual() {
        let cone = Cone::orthant(2).unwrap();
        for xi in [
            RVec::from_row_slice(&[1.0, 0.0]),
            RVec::from_row_slice(&[1.0, -1.0]),
        ] {
            match cone.char_integral(&xi) {
                Err(SiegelError::Divergent(_)) => {}
                other => panic!("expected divergence for ξ={xi:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn char_integral_homogeneity() {
        // I(tξ) = t^{−N} I(ξ).
        let cone = simplicial_example();
        let xi = RVec::from_row_slice(&[1.3, 0.4]);
        let base = cone.char_integral(&xi).unwrap();
        for t in [0.5, 2.0, 7.5] {
            let scaled = cone.char_integral(&(&xi * t)).unwrap();
            assert!((scaled - base * t.powi(-2)).abs() < 1e-12 * base.max(scaled));
        }
    }

    #[test]
    fn duality_pairing_is_positive() {
        let cone = simplicial_example();
        let xi = RVec::from_row_slice(&[1.0, 0.2]);
        assert!(cone.dual_contains(&xi, true).unwrap());
        for t in [
            RVec::from_row_slice(&[1.0, 0.0]),
            RVec::from_row_slice(&[0.0, 1.0]),
            RVec::from_row_slice(&[0.3, 2.5]),
        ] {
            let y = cone.generator_matrix() * t;
            assert!(xi.dot(&y) > 0.0);
        }
    }

    #[test]
    fn rejects_singular_generators() {
        let err = Cone::simplicial(RMat::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]));
        assert!(matches!(err, Err(SiegelError::InvalidInput(_))));
    }
}
