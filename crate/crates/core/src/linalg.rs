//! Small dense linear-algebra helpers shared by the geometric modules:
//! Hermitian checks and eigendecompositions, SVD-based ranks and null
//! spaces, and realification of complex data.

use crate::{C64, CMat, CVec, RMat, RVec};

/// `max_{ij} |m_{ij} − conj(m_{ji})|`.
pub fn hermitian_defect(m: &CMat) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest absolute entry of a complex matrix.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues (ascending) and matching eigenvector columns of a
/// Hermitian matrix.
pub fn hermitian_eigen(m: &CMat) -> (RVec, CMat) {
    assert_eq!(m.nrows(), m.ncols());
    if m.nrows() == 0 {
        return (RVec::zeros(0), CMat::zeros(0, 0));
    }
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = RVec::from_iterator(m.nrows(), order.iter().map(|&k| eig.eigenvalues[k]));
    let vecs = CMat::from_columns(
        &order
            .iter()
            .map(|&k| eig.eigenvectors.column(k).into_owned())
            .collect::<Vec<_>>(),
    );
    (vals, vecs)
}

/// Positive semidefiniteness of a Hermitian matrix within a relative
/// eigenvalue tolerance.
pub fn is_psd(m: &CMat, rel_tol: f64) -> bool {
    if m.nrows() == 0 {
        return true;
    }
    let (vals, _) = hermitian_eigen(m);
    let scale = vals.iter().fold(0.0f64, |a, &v| a.max(v.abs())).max(1.0);
    vals[0] >= -rel_tol * scale
}

/// Strict positive definiteness of a Hermitian matrix.
pub fn is_pd(m: &CMat, rel_tol: f64) -> bool {
    if m.nrows() == 0 {
        return true;
    }
    let (vals, _) = hermitian_eigen(m);
    let scale = vals.iter().fold(0.0f64, |a, &v| a.max(v.abs())).max(1.0);
    vals[0] > rel_tol * scale
}

/// Rank of a complex matrix, counting singular values above
/// `rel_tol · σ_max`.
pub fn rank(m: &CMat, rel_tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().singular_values();
    let smax = sv.iter().fold(0.0f64, |a, &s| a.max(s));
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

/// Rank of a real matrix, counting singular values above `rel_tol · σ_max`.
pub fn rank_real(m: &RMat, rel_tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().singular_values();
    let smax = sv.iter().fold(0.0f64, |a, &s| a.max(s));
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

/// Orthonormal basis (columns) of the null space of a real matrix, using
/// right singular vectors with `σ ≤ rel_tol · σ_max`. A zero (or empty)
/// matrix yields the full identity basis of the domain.
pub fn null_space_real(m: &RMat, rel_tol: f64) -> RMat {
    let ncols = m.ncols();
    if m.nrows() == 0 || ncols == 0 {
        return RMat::identity(ncols, ncols);
    }
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("svd requested v_t");
    let smax = svd.singular_values.iter().fold(0.0f64, |a, &s| a.max(s));
    let mut cols: Vec<RVec> = Vec::new();
    for k in 0..ncols {
        let s = if k < svd.singular_values.len() {
            svd.singular_values[k]
        } else {
            0.0
        };
        if smax == 0.0 || s <= rel_tol * smax {
            if k < v_t.nrows() {
                cols.push(v_t.row(k).transpose());
            }
        }
    }
    // Directions beyond the number of computed singular triples (wide
    // kernels of tall-thin transposes) are already covered because v_t is
    // square (ncols × ncols) in nalgebra's thin SVD only when requested;
    // guard for the rectangular case.
    if v_t.nrows() < ncols {
        // Complete with an orthonormal complement of the row space.
        let mut proj = RMat::identity(ncols, ncols);
        for r in 0..v_t.nrows() {
            let row = v_t.row(r).transpose();
            proj -= &row * row.transpose();
        }
        let extra = orthonormal_columns_real(&proj, 1e-9);
        for c in 0..extra.ncols() {
            cols.push(extra.column(c).into_owned());
        }
    }
    if cols.is_empty() {
        RMat::zeros(ncols, 0)
    } else {
        RMat::from_columns(&cols)
    }
}

/// Orthonormal basis of the column space of a real matrix.
pub fn orthonormal_columns_real(m: &RMat, rel_tol: f64) -> RMat {
    if m.nrows() == 0 || m.ncols() == 0 {
        return RMat::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("svd requested u");
    let smax = svd.singular_values.iter().fold(0.0f64, |a, &s| a.max(s));
    let mut cols: Vec<RVec> = Vec::new();
    for k in 0..svd.singular_values.len() {
        if smax > 0.0 && svd.singular_values[k] > rel_tol * smax {
            cols.push(u.column(k).into_owned());
        }
    }
    if cols.is_empty() {
        RMat::zeros(m.nrows(), 0)
    } else {
        RMat::from_columns(&cols)
    }
}

/// Whether `v` lies in the column space of the orthonormal basis `on`,
/// up to `rel_tol` relative to `‖v‖`.
pub fn in_span_real(on: &RMat, v: &RVec, rel_tol: f64) -> bool {
    let norm = v.norm();
    if norm == 0.0 {
        return true;
    }
    let residual = v - on * (on.transpose() * v);
    residual.norm() <= rel_tol * norm
}

/// Realify a complex vector in `C^M` to `R^{2M}` as `[Re; Im]`.
pub fn to_real(v: &CVec) -> RVec {
    let m = v.len();
    RVec::from_fn(2 * m, |i, _| if i < m { v[i].re } else { v[i - m].im })
}

/// Inverse of [`to_real`].
pub fn to_complex(v: &RVec) -> CVec {
    assert!(v.len() % 2 == 0);
    let m = v.len() / 2;
    CVec::from_fn(m, |i, _| C64::new(v[i], v[i + m]))
}

/// The standard real basis `e_1, …, e_M, i e_1, …, i e_M` of `C^M` viewed
/// as a real vector space.
pub fn real_basis_of_cm(m: usize) -> Vec<CVec> {
    let mut out = Vec::with_capacity(2 * m);
    for k in 0..m {
        let mut v = CVec::zeros(m);
        v[k] = C64::new(1.0, 0.0);
        out.push(v);
    }
    for k in 0..m {
        let mut v = CVec::zeros(m);
        v[k] = C64::new(0.0, 1.0);
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cm(rows: usize, cols: usize, entries: &[(f64, f64)]) -> CMat {
        let data: Vec<C64> = entries.iter().map(|&(re, im)| C64::new(re, im)).collect();
        CMat::from_row_slice(rows, cols, &data)
    }

    #[test]
    fn hermitian_defect_detects_asymmetry() {
        let h = CMat::from_row_slice(
            2,
            2,
            &[
                C64::new(2.0, 0.0),
                C64::new(0.0, 1.0),
                C64::new(0.0, -1.0),
                C64::new(3.0, 0.0),
            ],
        );
        assert!(hermitian_defect(&h) < 1e-15);
        let mut bad = h.clone();
        bad[(0, 1)] = C64::new(0.5, 1.0);
        assert!(hermitian_defect(&bad) > 0.4);
    }

    #[test]
    fn eigen_sorted_and_psd_checks() {
        let h = cm(2, 2, &[(2.0, 0.0), (0.0, 1.0), (0.0, -1.0), (2.0, 0.0)]);
        let (vals, vecs) = hermitian_eigen(&h);
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 3.0).abs() < 1e-12);
        let recon = &vecs
            * CMat::from_diagonal(&CVec::from_iterator(
                2,
                vals.iter().map(|&v| C64::new(v, 0.0)),
            ))
            * vecs.adjoint();
        assert!(max_abs(&(recon - h)) < 1e-12);
        assert!(is_psd(&cm(1, 1, &[(0.0, 0.0)]), 1e-12));
        assert!(!is_pd(&cm(1, 1, &[(0.0, 0.0)]), 1e-12));
    }

    #[test]
    fn real_null_space_and_span() {
        // x + y = 0 in R²: kernel is the line spanned by (1, −1).
        let m = RMat::from_row_slice(1, 2, &[1.0, 1.0]);
        let ns = null_space_real(&m, 1e-12);
        assert_eq!(ns.ncols(), 1);
        assert!((ns[(0, 0)] + ns[(1, 0)]).abs() < 1e-12);
        let on = orthonormal_columns_real(&ns, 1e-12);
        assert!(in_span_real(
            &on,
            &RVec::from_row_slice(&[2.0, -2.0]),
            1e-9
        ));
        assert!(!in_span_real(&on, &RVec::from_row_slice(&[1.0, 1.0]), 1e-9));
    }

    #[test]
    fn realification_round_trip() {
        let v = CVec::from_row_slice(&[C64::new(1.0, -2.0), C64::new(0.5, 3.0)]);
        assert_eq!(to_complex(&to_real(&v)), v);
        assert_eq!(real_basis_of_cm(2).len(), 4);
    }
}
