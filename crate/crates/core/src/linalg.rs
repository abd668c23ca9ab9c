//! Dense linear-algebra helpers shared by every module: complex matrix
//! aliases, the real Frobenius pairing, projection onto su(n), and the
//! rank-revealing SVD that all span/rank certificates go through.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type RMat = DMatrix<f64>;

/// Below this the largest singular value is treated as an exact zero matrix.
pub const ZERO_MATRIX_FLOOR: f64 = 1e-13;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `Re tr(A† B)`, evaluated entrywise so that the result is bitwise symmetric
/// in its arguments.
pub fn frobenius_dot(a: &CMat, b: &CMat) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| x.re * y.re + x.im * y.im)
        .sum()
}

pub fn frobenius_norm(a: &CMat) -> f64 {
    frobenius_dot(a, a).sqrt()
}

pub fn trace(a: &CMat) -> C64 {
    a.diagonal().iter().copied().sum()
}

/// Orthogonal projection of an arbitrary complex matrix onto su(n) with
/// respect to `Re tr(A† B)`: anti-Hermitian part, then remove the trace.
pub fn project_su(m: &CMat) -> CMat {
    let n = m.nrows();
    let mut ah = (m - m.adjoint()) * c(0.5, 0.0);
    let shift = trace(&ah) / c(n as f64, 0.0);
    for i in 0..n {
        ah[(i, i)] -= shift;
    }
    ah
}

/// Anti-Hermiticity residual `‖A† + A‖`.
pub fn anti_hermitian_residual(m: &CMat) -> f64 {
    frobenius_norm(&(m.adjoint() + m))
}

/// Unitarity residual `‖U†U − I‖`.
pub fn unitarity_residual(m: &CMat) -> f64 {
    let n = m.nrows();
    frobenius_norm(&(m.adjoint() * m - CMat::identity(n, n)))
}

/// Real and imaginary parts of all entries, column-major, as one real vector.
pub fn flatten_complex(m: &CMat) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * m.len());
    for z in m.iter() {
        out.push(z.re);
        out.push(z.im);
    }
    out
}

/// Stack row vectors into a matrix. An empty list yields a `0 × width` matrix.
pub fn stack_rows(rows: &[Vec<f64>], width: usize) -> RMat {
    let mut m = RMat::zeros(rows.len(), width);
    for (i, r) in rows.iter().enumerate() {
        debug_assert_eq!(r.len(), width);
        for (j, v) in r.iter().enumerate() {
            m[(i, j)] = *v;
        }
    }
    m
}

/// Outcome of a rank-revealing decomposition, with the full singular-value
/// list kept for reporting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankReport {
    pub rank: usize,
    /// Singular values, descending.
    pub singular_values: Vec<f64>,
    pub cutoff: f64,
}

impl RankReport {
    /// Largest singular value that was discarded, relative to the largest one.
    pub fn relative_tail(&self) -> f64 {
        match (self.singular_values.first(), self.singular_values.get(self.rank)) {
            (Some(&top), Some(&tail)) if top > 0.0 => tail / top,
            _ => 0.0,
        }
    }

    /// Smallest kept singular value relative to the largest one.
    pub fn relative_gap(&self) -> f64 {
        if self.rank == 0 {
            return 0.0;
        }
        self.singular_values[self.rank - 1] / self.singular_values[0]
    }
}

pub fn singular_values(m: &RMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Numerical rank with the relative cutoff `rel_tol · σ_max`.
pub fn numerical_rank(m: &RMat, rel_tol: f64) -> RankReport {
    let sv = singular_values(m);
    let top = sv.first().copied().unwrap_or(0.0);
    let cutoff = rel_tol * top;
    let rank = if top <= ZERO_MATRIX_FLOOR {
        0
    } else {
        sv.iter().filter(|&&s| s > cutoff).count()
    };
    RankReport { rank, singular_values: sv, cutoff }
}

/// Orthonormal basis of the numerical kernel of `m` (vectors of length
/// `m.ncols()`), using the same relative cutoff as [`numerical_rank`].
pub fn null_space(m: &RMat, rel_tol: f64) -> Vec<DVector<f64>> {
    let cols = m.ncols();
    if cols == 0 {
        return Vec::new();
    }
    // pad with zero rows so the SVD returns a full right basis
    let rows = m.nrows().max(cols);
    let mut padded = RMat::zeros(rows, cols);
    padded.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let top = svd.singular_values.max();
    let cutoff = if top <= ZERO_MATRIX_FLOOR { f64::INFINITY } else { rel_tol * top };
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= cutoff)
        .map(|(i, _)| v_t.row(i).transpose())
        .collect()
}

/// Moore–Penrose pseudo-inverse applied to `rhs`, discarding singular values
/// below `rel_tol · σ_max`.
pub fn pinv_solve(m: &RMat, rhs: &DVector<f64>, rel_tol: f64) -> DVector<f64> {
    let svd = m.clone().svd(true, true);
    let top = svd.singular_values.max();
    let cutoff = rel_tol * top;
    let u = svd.u.expect("left vectors requested");
    let v_t = svd.v_t.expect("right vectors requested");
    let mut out = DVector::zeros(m.ncols());
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff && s > 0.0 {
            let coeff = u.column(i).dot(rhs) / s;
            out += v_t.row(i).transpose() * coeff;
        }
    }
    out
}

/// Eigen-decomposition of a Hermitian matrix: ascending real eigenvalues and
/// the unitary matrix of eigenvectors (columns).
pub fn hermitian_eigen(h: &CMat) -> (Vec<f64>, CMat) {
    let eig = SymmetricEigen::new(h.clone());
    let mut order: Vec<usize> = (0..h.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = CMat::zeros(h.nrows(), h.ncols());
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vecs)
}

/// Nearest unitary matrix (polar factor), then rescaled by a phase so the
/// determinant is one. Assumes the input is already close to SU(n).
pub fn project_special_unitary(m: &CMat) -> CMat {
    let n = m.nrows();
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("left vectors requested") * svd.v_t.expect("right vectors requested");
    let det = u.determinant();
    let phase = C64::from_polar(1.0, -det.arg() / n as f64);
    u * phase
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_zero_matrix_is_zero() {
        let m = RMat::zeros(3, 4);
        assert_eq!(numerical_rank(&m, 1e-8).rank, 0);
        assert_eq!(null_space(&m, 1e-8).len(), 4);
    }

    #[test]
    fn rank_and_kernel_are_complementary() {
        let m = RMat::from_row_slice(2, 4, &[1.0, 2.0, 3.0, 4.0, 2.0, 4.0, 6.0, 8.0]);
        let r = numerical_rank(&m, 1e-8);
        assert_eq!(r.rank, 1);
        let ker = null_space(&m, 1e-8);
        assert_eq!(ker.len(), 3);
        for v in &ker {
            assert!((&m * v).norm() < 1e-12);
        }
    }

    #[test]
    fn pinv_gives_minimal_norm_solution() {
        // x + y = 2 has minimal-norm solution (1, 1)
        let m = RMat::from_row_slice(1, 2, &[1.0, 1.0]);
        let x = pinv_solve(&m, &DVector::from_vec(vec![2.0]), 1e-12);
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn projection_is_idempotent_and_lands_in_su() {
        let m = CMat::from_fn(3, 3, |i, j| c(i as f64 - 2.0 * j as f64, (i * j) as f64 + 0.5));
        let p = project_su(&m);
        assert!(anti_hermitian_residual(&p) < 1e-15);
        assert!(trace(&p).norm() < 1e-15);
        assert!(frobenius_norm(&(project_su(&p) - &p)) < 1e-15);
    }
}
