//! Kostant's maximal torus in apposition for SU(n).
//!
//! `T` is the diagonal torus. `T′` is the centralizer of the scaled cyclic
//! shift `Λ_n = C·(E_{n,1} + Σ_k E_{k,k+1})` with `C = exp(iπ(n−1)/n)`, so that
//! `det Λ_n = 1`. Their Lie algebras are orthogonal and meet only in zero.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie_core::{
    adjoint_unchecked, AlgebraElement, GroupContext, GroupElement, Sampler,
    ToleranceConfig,
};
use crate::linalg::{c, frobenius_dot, frobenius_norm, numerical_rank, pinv_solve, CMat, RMat};
use crate::phase_space::{moment_map, PhasePoint};

/// `Λ_n`.
pub fn lambda_matrix(n: usize) -> Result<GroupElement> {
    if n < 2 {
        return Err(Error::Domain(format!("matrix size must be at least 2, got {n}")));
    }
    let scale = nalgebra::Complex::from_polar(1.0, std::f64::consts::PI * (n - 1) as f64 / n as f64);
    let mut m = CMat::zeros(n, n);
    m[(n - 1, 0)] = scale;
    for k in 0..n - 1 {
        m[(k, k + 1)] = scale;
    }
    GroupElement::new(m)
}

/// The pair of orthogonal tori `(𝒯, 𝒯′)` for SU(n).
#[derive(Debug, Clone)]
pub struct AppositionFrame {
    n: usize,
    lambda: GroupElement,
    t_basis: Vec<AlgebraElement>,
    tprime_basis: Vec<AlgebraElement>,
}

/// Residuals of the frame invariants.
#[derive(Debug, Clone, Serialize)]
pub struct FrameCertificate {
    pub n: usize,
    pub lambda_unitarity: f64,
    pub lambda_det_defect: f64,
    pub lambda_min_eigen_gap: f64,
    pub t_dim: usize,
    pub tprime_dim: usize,
    /// Largest `|⟨u, v⟩|` over `u ∈ 𝒯`, `v ∈ 𝒯′`.
    pub cross_gram_max: f64,
    /// Largest `|⟨v_a, v_b⟩ − δ_ab|` over the `𝒯′` basis.
    pub tprime_orthonormality: f64,
    /// Largest `‖Λ v Λ⁻¹ − v‖` over the `𝒯′` basis.
    pub tprime_fixed_defect: f64,
    pub stacked_rank: usize,
}

impl FrameCertificate {
    pub fn passes(&self) -> bool {
        let r = self.n - 1;
        self.lambda_unitarity < 1e-12
            && self.lambda_det_defect < 1e-12
            && self.lambda_min_eigen_gap > 1e-8
            && self.t_dim == r
            && self.tprime_dim == r
            && self.cross_gram_max < 1e-12
            && self.tprime_orthonormality < 1e-12
            && self.tprime_fixed_defect < 1e-12
            && self.stacked_rank == 2 * r
    }
}

impl AppositionFrame {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambda(&self) -> &GroupElement {
        &self.lambda
    }

    /// Orthonormal basis of the diagonal Cartan subalgebra.
    pub fn t_basis(&self) -> &[AlgebraElement] {
        &self.t_basis
    }

    /// Orthonormal basis of the centralizer of `Λ_n`.
    pub fn tprime_basis(&self) -> &[AlgebraElement] {
        &self.tprime_basis
    }

    /// Element of `𝒯′` with the given coordinates.
    pub fn tprime_element(&self, coeffs: &[f64]) -> AlgebraElement {
        let mut m = CMat::zeros(self.n, self.n);
        for (b, &w) in self.tprime_basis.iter().zip(coeffs) {
            m += b.mat() * c(w, 0.0);
        }
        AlgebraElement::from_raw(m)
    }

    pub fn certify(&self) -> FrameCertificate {
        let ctx_n = self.n;
        let lam = self.lambda.mat();
        let mut cross = 0.0f64;
        for u in &self.t_basis {
            for v in &self.tprime_basis {
                cross = cross.max(frobenius_dot(u.mat(), v.mat()).abs());
            }
        }
        let mut ortho = 0.0f64;
        let mut fixed = 0.0f64;
        for (a, va) in self.tprime_basis.iter().enumerate() {
            for (b, vb) in self.tprime_basis.iter().enumerate() {
                let want = if a == b { 1.0 } else { 0.0 };
                ortho = ortho.max((frobenius_dot(va.mat(), vb.mat()) - want).abs());
            }
            fixed = fixed.max(frobenius_norm(&(adjoint_unchecked(&self.lambda, va).mat() - va.mat())));
        }
        let rows: Vec<Vec<f64>> = self
            .t_basis
            .iter()
            .chain(&self.tprime_basis)
            .map(|e| crate::linalg::flatten_complex(e.mat()))
            .collect();
        let stacked = numerical_rank(&crate::linalg::stack_rows(&rows, 2 * ctx_n * ctx_n), 1e-10);
        let eig = lam.clone().eigenvalues_complex();
        let mut gap = f64::INFINITY;
        for i in 0..eig.len() {
            for j in (i + 1)..eig.len() {
                gap = gap.min((eig[i] - eig[j]).norm());
            }
        }
        FrameCertificate {
            n: self.n,
            lambda_unitarity: crate::linalg::unitarity_residual(lam),
            lambda_det_defect: (lam.determinant() - c(1.0, 0.0)).norm(),
            lambda_min_eigen_gap: gap,
            t_dim: self.t_basis.len(),
            tprime_dim: self.tprime_basis.len(),
            cross_gram_max: cross,
            tprime_orthonormality: ortho,
            tprime_fixed_defect: fixed,
            stacked_rank: stacked.rank,
        }
    }
}

trait ComplexEigen {
    fn eigenvalues_complex(self) -> Vec<nalgebra::Complex<f64>>;
}

impl ComplexEigen for CMat {
    fn eigenvalues_complex(self) -> Vec<nalgebra::Complex<f64>> {
        // Λ_n is unitary, hence normal: its eigenvalues are those of the
        // Hermitian pair (Λ + Λ†)/2, (Λ − Λ†)/2i evaluated on a common basis.
        // A generic real combination separates them.
        let h = (&self + self.adjoint()) * c(0.5, 0.0)
            + (&self - self.adjoint()) * c(0.0, -0.5) * c(0.318_309_886, 0.0);
        let (_, vecs) = crate::linalg::hermitian_eigen(&h);
        (0..self.nrows())
            .map(|k| {
                let v = vecs.column(k);
                (v.adjoint() * &self * v)[(0, 0)]
            })
            .collect()
    }
}

/// Build `(𝒯, 𝒯′)` and certify that `𝒯′` has the expected dimension.
pub fn build_frame(n: usize, tol: &ToleranceConfig) -> Result<AppositionFrame> {
    let ctx = GroupContext::new(n)?;
    let lambda = lambda_matrix(n)?;
    let fixed = ctx.operator_matrix(|e| &adjoint_unchecked(&lambda, e) - e);
    let tprime_basis: Vec<AlgebraElement> = crate::linalg::null_space(&fixed, tol.tau_rank)
        .iter()
        .map(|v| ctx.from_coords(v.as_slice()))
        .collect();
    if tprime_basis.len() != n - 1 {
        return Err(Error::Construction(format!(
            "centralizer of the cyclic element has dimension {} instead of {}",
            tprime_basis.len(),
            n - 1
        )));
    }
    let t_basis = ctx.basis()[ctx.dim_g() - (n - 1)..].to_vec();
    Ok(AppositionFrame { n, lambda, t_basis, tprime_basis })
}

/// Whether `g` lies in the regular part of the diagonal torus.
pub fn in_regular_torus(g: &GroupElement, tol: &ToleranceConfig) -> bool {
    let m = g.mat();
    let n = m.nrows();
    let mut off = 0.0f64;
    for r in 0..n {
        for s in 0..n {
            if r != s {
                off = off.max(m[(r, s)].norm());
            }
        }
    }
    if off > tol.tau_struct {
        return false;
    }
    for r in 0..n {
        for s in (r + 1)..n {
            if (m[(r, r)] - m[(s, s)]).norm() <= tol.tau_eig {
                return false;
            }
        }
    }
    true
}

/// Minimal-norm solution of `J − g⁻¹Jg = ζ` for `g` in the diagonal torus.
///
/// The operator `id − Ad_{g⁻¹}` has kernel `𝒯` when `g` is regular, so the
/// solution is only fixed modulo `𝒯`; the pseudo-inverse picks the
/// representative orthogonal to it.
pub fn solve_moment_equation(
    g: &GroupElement,
    zeta: &AlgebraElement,
    tol: &ToleranceConfig,
) -> Result<AlgebraElement> {
    crate::error::check_size(g.size(), zeta.size())?;
    let ctx = GroupContext::new(g.size())?;
    let g_inv = g.inverse();
    let op: RMat = ctx.operator_matrix(|e| e - &adjoint_unchecked(&g_inv, e));
    let rhs: DVector<f64> = ctx.coords(zeta);
    let sol = pinv_solve(&op, &rhs, tol.tau_rank);
    let j = ctx.from_coords(sol.as_slice());
    let residual = moment_residual(g, &j, zeta);
    const BOUND: f64 = 1e-10;
    if !(residual <= BOUND) {
        return Err(Error::Solvability { residual, bound: BOUND });
    }
    Ok(j)
}

/// `‖J − g⁻¹Jg − ζ‖`
pub fn moment_residual(g: &GroupElement, j: &AlgebraElement, zeta: &AlgebraElement) -> f64 {
    let x = PhasePoint::new(g.clone(), j.clone()).expect("sizes checked by caller");
    (&moment_map(&x) - zeta).norm()
}

/// Random element of the regular diagonal torus.
pub fn random_regular_torus(ctx: &GroupContext, sampler: &mut Sampler, tol: &ToleranceConfig) -> GroupElement {
    loop {
        let phases: Vec<f64> = (0..ctx.n() - 1).map(|_| sampler.uniform(-std::f64::consts::PI, std::f64::consts::PI)).collect();
        let last = -phases.iter().sum::<f64>();
        let all: Vec<f64> = phases.into_iter().chain(std::iter::once(last)).collect();
        let g = GroupElement::from_diagonal_phases(&all).expect("phases sum to zero");
        if in_regular_torus(&g, &ToleranceConfig { tau_eig: 1e-3, ..*tol }) {
            return g;
        }
    }
}

/// Random regular element of `𝒯′`.
pub fn random_regular_tprime(frame: &AppositionFrame, sampler: &mut Sampler, tol: &ToleranceConfig) -> AlgebraElement {
    loop {
        let coeffs: Vec<f64> = (0..frame.n - 1).map(|_| sampler.normal()).collect();
        let z = frame.tprime_element(&coeffs);
        if crate::lie_core::min_eigenvalue_gap(&z) > 1e-3_f64.max(tol.tau_eig) {
            return z;
        }
    }
}

/// Dimension of the centralizer of the moment-equation solution pair; the
/// Lie algebra of `G_{(g, J)}`.
pub fn solution_isotropy(g: &GroupElement, j: &AlgebraElement, tol: &ToleranceConfig) -> Result<usize> {
    use crate::lie_core::{joint_centralizer_dim, Constraint};
    joint_centralizer_dim(&[Constraint::Group(g), Constraint::Algebra(j)], tol)
}

/// Exploratory sampling on the leaves `Φ⁻¹(𝒪)`, `𝒪` regular: solves the
/// moment equation at random `(g, ζ) ∈ T_reg × 𝒯′_reg` and reports how many
/// of the resulting points lie in the principal stratum `M_**`. No claim is
/// attached to the outcome.
pub fn explore_leaf_intersection(
    n: usize,
    samples: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<(usize, usize)> {
    let ctx = GroupContext::new(n)?;
    let frame = build_frame(n, tol)?;
    let mut sampler = Sampler::new(seed);
    let mut hits = 0;
    for _ in 0..samples {
        let g = random_regular_torus(&ctx, &mut sampler, tol);
        let zeta = random_regular_tprime(&frame, &mut sampler, tol);
        let j = solve_moment_equation(&g, &zeta, tol)?;
        // move along the leaf with a random gauge-free shift in 𝒯
        let shift: Vec<f64> = (0..n - 1).map(|_| sampler.normal()).collect();
        let mut jm = j.mat().clone();
        for (b, &w) in frame.t_basis().iter().zip(&shift) {
            jm += b.mat() * c(w, 0.0);
        }
        let x = PhasePoint::new(g, AlgebraElement::from_raw(jm))?;
        if crate::reduction_lab::classify(&x, tol)?.in_m_star_star {
            hits += 1;
        }
    }
    Ok((hits, samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn lambda_examples() {
        let l2 = lambda_matrix(2).unwrap();
        let want = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(0.0, 0.0)]);
        assert!(frobenius_norm(&(l2.mat() - want)) < 1e-15);
        let l3 = lambda_matrix(3).unwrap();
        let cst = nalgebra::Complex::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        assert!((l3.mat()[(2, 0)] - cst).norm() < 1e-15);
        assert!((l3.mat()[(0, 1)] - cst).norm() < 1e-15);
        assert!((l3.mat().determinant() - c(1.0, 0.0)).norm() < 1e-14);
        assert!(lambda_matrix(1).is_err());
    }

    #[test]
    fn lambda_eigenvalues_are_distinct() {
        // eigenvalues are C·ω^k with ω = e^{2πi/n}
        for n in 2..=6 {
            let l = lambda_matrix(n).unwrap();
            let mut eig = l.mat().clone().eigenvalues_complex();
            eig.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
            let cst = std::f64::consts::PI * (n - 1) as f64 / n as f64;
            let mut want: Vec<nalgebra::Complex<f64>> = (0..n)
                .map(|k| nalgebra::Complex::from_polar(1.0, cst + 2.0 * std::f64::consts::PI * k as f64 / n as f64))
                .collect();
            want.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
            for (a, b) in eig.iter().zip(&want) {
                assert!((a - b).norm() < 1e-10, "n={n}");
            }
        }
    }

    #[test]
    fn su2_frame_is_the_offdiagonal_line() {
        let f = build_frame(2, &tol()).unwrap();
        assert_eq!(f.tprime_basis().len(), 1);
        let v = f.tprime_basis()[0].mat();
        // proportional to [[0, i], [i, 0]]
        let s = v[(0, 1)] / c(0.0, 1.0);
        assert!(s.im.abs() < 1e-14 && (s.re.abs() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
        assert!((v[(1, 0)] - v[(0, 1)]).norm() < 1e-14);
        assert!(v[(0, 0)].norm() < 1e-14);
    }

    #[test]
    fn frame_invariants_hold() {
        for n in 2..=5 {
            let cert = build_frame(n, &tol()).unwrap().certify();
            assert!(cert.passes(), "{cert:?}");
        }
    }

    #[test]
    fn moment_equation_zero_rhs() {
        let g = GroupElement::from_diagonal_phases(&[0.4, 1.1, -1.5]).unwrap();
        let j = solve_moment_equation(&g, &AlgebraElement::zero(3), &tol()).unwrap();
        assert!(j.norm() < 1e-15);
    }

    #[test]
    fn moment_equation_solutions() {
        for n in 2..=5 {
            let ctx = GroupContext::new(n).unwrap();
            let frame = build_frame(n, &tol()).unwrap();
            let mut s = Sampler::new(n as u64);
            for _ in 0..10 {
                let g = random_regular_torus(&ctx, &mut s, &tol());
                let zeta = random_regular_tprime(&frame, &mut s, &tol());
                let j = solve_moment_equation(&g, &zeta, &tol()).unwrap();
                assert!(moment_residual(&g, &j, &zeta) < 1e-10);
                // no component along the kernel 𝒯
                for u in frame.t_basis() {
                    assert!(frobenius_dot(u.mat(), j.mat()).abs() < 1e-10);
                }
                // shifting along 𝒯 leaves the residual unchanged
                let shifted = &j + &(&frame.t_basis()[0] * 1.3);
                assert!((moment_residual(&g, &shifted, &zeta) - moment_residual(&g, &j, &zeta)).abs() < 1e-12);
                assert_eq!(solution_isotropy(&g, &j, &tol()).unwrap(), 0);
            }
        }
    }

    #[test]
    fn su2_solution_is_the_rotated_slice_matrix() {
        use crate::su2_model::{slice_point, SliceCoords};
        let (q, x) = (0.9, 1.4);
        let g = GroupElement::from_diagonal_phases(&[q, -q]).unwrap();
        let zeta = AlgebraElement::new(CMat::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(0.0, x), c(0.0, x), c(0.0, 0.0)],
        ))
        .unwrap();
        let j = solve_moment_equation(&g, &zeta, &tol()).unwrap();
        // g·J_slice·g⁻¹ with p = 0, not J_slice itself
        let slice = slice_point(SliceCoords::new(q, 0.0, x).unwrap()).unwrap();
        let rotated = g.mat() * slice.j().mat() * g.mat().adjoint();
        assert!(frobenius_norm(&(j.mat() - rotated)) < 1e-10);
        assert!(frobenius_norm(&(j.mat() - slice.j().mat())) > 0.1);
        let y = PhasePoint::new(g, j).unwrap();
        assert!(crate::reduction_lab::classify(&y, &tol()).unwrap().in_m_star);
    }

    #[test]
    fn unsolvable_rhs_is_rejected() {
        // ζ ∈ 𝒯 is orthogonal to the image of id − Ad_{g⁻¹}
        let g = GroupElement::from_diagonal_phases(&[0.3, -0.3]).unwrap();
        let zeta = AlgebraElement::from_diagonal_phases(&[1.0, -1.0]).unwrap();
        assert!(matches!(solve_moment_equation(&g, &zeta, &tol()), Err(Error::Solvability { .. })));
    }

    #[test]
    fn regular_torus_membership() {
        let g = GroupElement::from_diagonal_phases(&[0.3, -0.3]).unwrap();
        assert!(in_regular_torus(&g, &tol()));
        assert!(!in_regular_torus(&GroupElement::identity(2), &tol()));
        let ctx = GroupContext::new(2).unwrap();
        assert!(!in_regular_torus(&crate::lie_core::random_group(&ctx, 1), &tol()));
    }

    #[test]
    fn leaf_exploration_runs() {
        let (hits, total) = explore_leaf_intersection(3, 20, 5, &tol()).unwrap();
        assert_eq!(total, 20);
        assert!(hits <= total);
    }
}
