//! Gaussian quadrature rules generated by the Golub–Welsch eigenvalue
//! method.
//!
//! Nodes are the eigenvalues of the symmetric tridiagonal Jacobi matrix of
//! the orthogonal-polynomial recurrence; the weight at a node is
//! `μ₀ · q₀²` where `q₀` is the first component of the corresponding
//! normalized eigenvector and `μ₀` the total mass of the weight function.
//! With `n` nodes each rule integrates polynomials of degree `≤ 2n − 1`
//! against its weight exactly (up to roundoff).

use nalgebra::DMatrix;

/// Nodes and weights of a one-dimensional quadrature rule, ascending in
/// the node coordinate.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// `Σ_i w_i f(x_i)`.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Golub–Welsch: eigen-decompose the Jacobi matrix with diagonal `diag`
/// and off-diagonal `offdiag`.
fn golub_welsch(diag: &[f64], offdiag: &[f64], mu0: f64) -> Rule {
    let n = diag.len();
    assert!(n > 0, "empty quadrature rule");
    let mut j = DMatrix::<f64>::zeros(n, n);
    for (i, &d) in diag.iter().enumerate() {
        j[(i, i)] = d;
    }
    for (i, &e) in offdiag.iter().enumerate() {
        j[(i, i + 1)] = e;
        j[(i + 1, i)] = e;
    }
    let eig = j.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let q0 = eig.eigenvectors[(0, k)];
            (eig.eigenvalues[k], mu0 * q0 * q0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Rule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

/// Gauss–Laguerre rule: `∫_0^∞ e^{−s} f(s) ds ≈ Σ w_i f(s_i)`.
pub fn gauss_laguerre(n: usize) -> Rule {
    let diag: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + 1.0).collect();
    let offdiag: Vec<f64> = (1..n).map(|k| k as f64).collect();
    golub_welsch(&diag, &offdiag, 1.0)
}

/// Gauss–Hermite rule: `∫_R e^{−x²} f(x) dx ≈ Σ w_i f(x_i)`.
pub fn gauss_hermite(n: usize) -> Rule {
    let diag = vec![0.0; n];
    let offdiag: Vec<f64> = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
    golub_welsch(&diag, &offdiag, std::f64::consts::PI.sqrt())
}

/// Gauss–Legendre rule on `[−1, 1]`: `∫_{−1}^{1} f ≈ Σ w_i f(x_i)`.
pub fn gauss_legendre(n: usize) -> Rule {
    let diag = vec![0.0; n];
    let offdiag: Vec<f64> = (1..n)
        .map(|k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        })
        .collect();
    golub_welsch(&diag, &offdiag, 2.0)
}

/// Gauss–Legendre rule rescaled to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> Rule {
    let base = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    Rule {
        nodes: base.nodes.iter().map(|&x| mid + half * x).collect(),
        weights: base.weights.iter().map(|&w| w * half).collect(),
    }
}

/// Iterate over the multi-indices of a tensor grid with `axes` axes of
/// `len` entries each, calling `f` with the current multi-index.
pub fn tensor_indices(axes: usize, len: usize, mut f: impl FnMut(&[usize])) {
    let mut idx = vec![0usize; axes];
    if axes == 0 {
        f(&idx);
        return;
    }
    loop {
        f(&idx);
        let mut axis = 0;
        loop {
            idx[axis] += 1;
            if idx[axis] < len {
                break;
            }
            idx[axis] = 0;
            axis += 1;
            if axis == axes {
                return;
            }
        }
    }
}
