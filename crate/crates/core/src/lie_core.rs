//! su(n) and SU(n) as dense complex matrices.
//!
//! The invariant inner product is fixed to `⟨X, Y⟩ = −Re tr(XY)`, which on
//! anti-Hermitian matrices coincides with the Frobenius product `Re tr(X†Y)`.
//! All rank statements (centralizers, isotropy) go through a real matrix
//! written in the orthonormal basis returned by [`GroupContext::basis`] and a
//! relative singular-value cutoff.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{check_size, Error, Result};
use crate::linalg::{
    self, anti_hermitian_residual, c, frobenius_dot, frobenius_norm, hermitian_eigen,
    numerical_rank, project_special_unitary, trace, unitarity_residual, CMat, RankReport, RMat,
};

/// Numerical thresholds used throughout the lab.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToleranceConfig {
    /// Structural residual bound (anti-Hermiticity, unitarity, det).
    pub tau_struct: f64,
    /// Relative singular-value cutoff for numerical rank.
    pub tau_rank: f64,
    /// Finite-difference step.
    pub h_fd: f64,
    /// Bound on the finite-difference versus analytic gradient mismatch.
    pub tau_fd: f64,
    /// Bound on conservation residuals along flows.
    pub tau_cons: f64,
    /// Eigenvalue-gap threshold for regularity.
    pub tau_eig: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            tau_struct: 1e-10,
            tau_rank: 1e-8,
            h_fd: 1e-5,
            tau_fd: 1e-6,
            tau_cons: 1e-10,
            tau_eig: 1e-8,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("tau_struct", self.tau_struct),
            ("tau_rank", self.tau_rank),
            ("h_fd", self.h_fd),
            ("tau_fd", self.tau_fd),
            ("tau_cons", self.tau_cons),
            ("tau_eig", self.tau_eig),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be finite and positive, got {v}")));
            }
        }
        if self.tau_struct >= self.tau_fd {
            return Err(Error::Config("tau_struct must be smaller than tau_fd".into()));
        }
        Ok(())
    }
}

/// The ambient group SU(n) together with an orthonormal basis of su(n).
#[derive(Debug, Clone)]
pub struct GroupContext {
    n: usize,
    basis: Vec<AlgebraElement>,
}

impl GroupContext {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("matrix size must be at least 2, got {n}")));
        }
        Ok(Self { n, basis: build_basis(n) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `n² − 1`
    pub fn dim_g(&self) -> usize {
        self.n * self.n - 1
    }

    /// `n − 1`
    pub fn rank_r(&self) -> usize {
        self.n - 1
    }

    /// Dimension of the phase space `SU(n) × su(n)`.
    pub fn dim_m(&self) -> usize {
        2 * self.dim_g()
    }

    /// Orthonormal basis of su(n): off-diagonal real and imaginary
    /// generators first, then the normalized diagonal (Cartan) generators.
    pub fn basis(&self) -> &[AlgebraElement] {
        &self.basis
    }

    /// Coordinates `⟨e_a, X⟩` in the orthonormal basis.
    pub fn coords(&self, x: &AlgebraElement) -> DVector<f64> {
        DVector::from_iterator(self.dim_g(), self.basis.iter().map(|e| inner_unchecked(e, x)))
    }

    pub fn from_coords(&self, coords: &[f64]) -> AlgebraElement {
        debug_assert_eq!(coords.len(), self.dim_g());
        let mut m = CMat::zeros(self.n, self.n);
        for (e, &w) in self.basis.iter().zip(coords) {
            m += e.mat() * c(w, 0.0);
        }
        AlgebraElement(m)
    }

    /// Real matrix of a linear map su(n) → su(n) in the orthonormal basis.
    pub fn operator_matrix(&self, map: impl Fn(&AlgebraElement) -> AlgebraElement) -> RMat {
        let d = self.dim_g();
        let mut m = RMat::zeros(d, d);
        for (col, e) in self.basis.iter().enumerate() {
            let image = map(e);
            for (row, f) in self.basis.iter().enumerate() {
                m[(row, col)] = inner_unchecked(f, &image);
            }
        }
        m
    }
}

fn build_basis(n: usize) -> Vec<AlgebraElement> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(n * n - 1);
    for j in 0..n {
        for k in (j + 1)..n {
            let mut re = CMat::zeros(n, n);
            re[(j, k)] = c(s, 0.0);
            re[(k, j)] = c(-s, 0.0);
            out.push(AlgebraElement(re));
            let mut im = CMat::zeros(n, n);
            im[(j, k)] = c(0.0, s);
            im[(k, j)] = c(0.0, s);
            out.push(AlgebraElement(im));
        }
    }
    for m in 1..n {
        let norm = ((m * (m + 1)) as f64).sqrt();
        let mut d = CMat::zeros(n, n);
        for i in 0..m {
            d[(i, i)] = c(0.0, 1.0 / norm);
        }
        d[(m, m)] = c(0.0, -(m as f64) / norm);
        out.push(AlgebraElement(d));
    }
    out
}

/// An element of su(n): anti-Hermitian and traceless.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement(CMat);

impl AlgebraElement {
    /// Validates both invariants against `tol` (scaled by `max(1, ‖mat‖)`).
    pub fn with_tolerance(mat: CMat, tol: f64) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::Structure("algebra element must be square".into()));
        }
        let scale = frobenius_norm(&mat).max(1.0);
        let ah = anti_hermitian_residual(&mat);
        if !(ah <= tol * scale) {
            return Err(Error::Structure(format!("not anti-Hermitian (residual {ah:.3e})")));
        }
        let tr = trace(&mat).norm();
        if !(tr <= tol * scale) {
            return Err(Error::Structure(format!("not traceless (|tr| = {tr:.3e})")));
        }
        Ok(Self(mat))
    }

    pub fn new(mat: CMat) -> Result<Self> {
        Self::with_tolerance(mat, ToleranceConfig::default().tau_struct)
    }

    /// Orthogonal projection of any square complex matrix onto su(n).
    pub fn project(mat: &CMat) -> Self {
        Self(linalg::project_su(mat))
    }

    /// Diagonal element `diag(i·θ₁, …, i·θ_n)`.
    pub fn from_diagonal_phases(thetas: &[f64]) -> Result<Self> {
        let m = CMat::from_diagonal(&DVector::from_iterator(
            thetas.len(),
            thetas.iter().map(|&t| c(0.0, t)),
        ));
        Self::new(m)
    }

    pub(crate) fn from_raw(mat: CMat) -> Self {
        Self(mat)
    }

    pub fn zero(n: usize) -> Self {
        Self(CMat::zeros(n, n))
    }

    pub fn mat(&self) -> &CMat {
        &self.0
    }

    pub fn into_mat(self) -> CMat {
        self.0
    }

    pub fn size(&self) -> usize {
        self.0.nrows()
    }

    /// `√⟨X, X⟩`
    pub fn norm(&self) -> f64 {
        frobenius_norm(&self.0)
    }

    /// Largest of the anti-Hermiticity and trace residuals.
    pub fn structure_residual(&self) -> f64 {
        anti_hermitian_residual(&self.0).max(trace(&self.0).norm())
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: Self) -> AlgebraElement {
        AlgebraElement(&self.0 + &rhs.0)
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: Self) -> AlgebraElement {
        AlgebraElement(&self.0 - &rhs.0)
    }
}

impl Mul<f64> for &AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: f64) -> AlgebraElement {
        AlgebraElement(&self.0 * c(rhs, 0.0))
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        AlgebraElement(-&self.0)
    }
}

/// An element of SU(n).
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement(CMat);

impl GroupElement {
    pub fn with_tolerance(mat: CMat, tol: f64) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::Structure("group element must be square".into()));
        }
        let u = unitarity_residual(&mat);
        if !(u <= tol) {
            return Err(Error::Structure(format!("not unitary (residual {u:.3e})")));
        }
        let d = (mat.determinant() - c(1.0, 0.0)).norm();
        if !(d <= tol) {
            return Err(Error::Structure(format!("determinant differs from 1 by {d:.3e}")));
        }
        Ok(Self(mat))
    }

    pub fn new(mat: CMat) -> Result<Self> {
        Self::with_tolerance(mat, ToleranceConfig::default().tau_struct)
    }

    /// Diagonal element `diag(e^{iθ₁}, …, e^{iθ_n})`; the phases must sum to
    /// a multiple of 2π.
    pub fn from_diagonal_phases(thetas: &[f64]) -> Result<Self> {
        let m = CMat::from_diagonal(&DVector::from_iterator(
            thetas.len(),
            thetas.iter().map(|&t| nalgebra::Complex::from_polar(1.0, t)),
        ));
        Self::new(m)
    }

    pub(crate) fn from_raw(mat: CMat) -> Self {
        Self(mat)
    }

    pub fn identity(n: usize) -> Self {
        Self(CMat::identity(n, n))
    }

    /// The central element `e^{2πik/n}·I`.
    pub fn central(n: usize, k: usize) -> Self {
        let phase = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        Self(CMat::identity(n, n) * nalgebra::Complex::from_polar(1.0, phase))
    }

    pub fn mat(&self) -> &CMat {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.nrows()
    }

    /// Inverse, computed as the conjugate transpose.
    pub fn inverse(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// Group product, re-projected onto SU(n).
    pub fn compose(&self, rhs: &GroupElement) -> Self {
        Self(project_special_unitary(&(&self.0 * &rhs.0)))
    }

    pub fn structure_residual(&self) -> f64 {
        unitarity_residual(&self.0).max((self.0.determinant() - c(1.0, 0.0)).norm())
    }
}

fn inner_unchecked(x: &AlgebraElement, y: &AlgebraElement) -> f64 {
    // −Re tr(XY) = Re tr(X†Y) for anti-Hermitian X
    frobenius_dot(&x.0, &y.0)
}

/// `⟨X, Y⟩ = −Re tr(XY)`.
pub fn inner(x: &AlgebraElement, y: &AlgebraElement) -> Result<f64> {
    check_size(x.size(), y.size())?;
    Ok(inner_unchecked(x, y))
}

pub(crate) fn bracket_unchecked(x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
    AlgebraElement(&x.0 * &y.0 - &y.0 * &x.0)
}

/// Commutator `XY − YX`.
pub fn lie_bracket(x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
    check_size(x.size(), y.size())?;
    Ok(bracket_unchecked(x, y))
}

/// Matrix exponential through the eigen-decomposition of the Hermitian
/// matrix `iX`, followed by a polar re-projection onto SU(n).
pub fn group_exp(x: &AlgebraElement) -> Result<GroupElement> {
    let scale = x.norm().max(1.0);
    let res = anti_hermitian_residual(&x.0);
    if res > ToleranceConfig::default().tau_struct * scale {
        return Err(Error::Structure(format!(
            "exponential needs an anti-Hermitian argument (residual {res:.3e})"
        )));
    }
    Ok(GroupElement(exp_unchecked(&x.0)))
}

pub(crate) fn exp_unchecked(x: &CMat) -> CMat {
    let n = x.nrows();
    let h = x * c(0.0, 1.0);
    // symmetrize so the eigen-solver sees an exactly Hermitian input
    let h = (&h + h.adjoint()) * c(0.5, 0.0);
    let (values, vecs) = hermitian_eigen(&h);
    // exp(X) = exp(−i·H) with H = iX
    let phases = CMat::from_diagonal(&DVector::from_iterator(
        n,
        values.iter().map(|&l| nalgebra::Complex::from_polar(1.0, -l)),
    ));
    project_special_unitary(&(&vecs * phases * vecs.adjoint()))
}

/// `η X η⁻¹`
pub fn adjoint(eta: &GroupElement, x: &AlgebraElement) -> Result<AlgebraElement> {
    check_size(eta.size(), x.size())?;
    Ok(adjoint_unchecked(eta, x))
}

pub(crate) fn adjoint_unchecked(eta: &GroupElement, x: &AlgebraElement) -> AlgebraElement {
    AlgebraElement(&eta.0 * &x.0 * eta.0.adjoint())
}

/// Dimension of ker(ad_J) on su(n), from the singular values of the real
/// matrix of ad_J.
pub fn centralizer_dim_algebra(j: &AlgebraElement, tol: &ToleranceConfig) -> Result<usize> {
    let ctx = GroupContext::new(j.size())?;
    Ok(centralizer_report(&ctx, j, tol).0)
}

pub(crate) fn centralizer_report(
    ctx: &GroupContext,
    j: &AlgebraElement,
    tol: &ToleranceConfig,
) -> (usize, RankReport) {
    let ad = ctx.operator_matrix(|e| bracket_unchecked(j, e));
    let rep = numerical_rank(&ad, tol.tau_rank);
    (ctx.dim_g() - rep.rank, rep)
}

/// Orthonormal basis of the centralizer ker(ad_J) ⊂ su(n).
pub fn centralizer_basis(
    ctx: &GroupContext,
    j: &AlgebraElement,
    tol: &ToleranceConfig,
) -> Vec<AlgebraElement> {
    let ad = ctx.operator_matrix(|e| bracket_unchecked(j, e));
    linalg::null_space(&ad, tol.tau_rank)
        .iter()
        .map(|v| ctx.from_coords(v.as_slice()))
        .collect()
}

/// An element whose infinitesimal stabilizer enters a joint centralizer.
#[derive(Debug, Clone, Copy)]
pub enum Constraint<'a> {
    Group(&'a GroupElement),
    Algebra(&'a AlgebraElement),
}

impl Constraint<'_> {
    fn size(&self) -> usize {
        match self {
            Constraint::Group(g) => g.size(),
            Constraint::Algebra(x) => x.size(),
        }
    }

    fn defect(&self, y: &AlgebraElement) -> CMat {
        match self {
            Constraint::Group(g) => &y.0 * &g.0 - &g.0 * &y.0,
            Constraint::Algebra(x) => &y.0 * &x.0 - &x.0 * &y.0,
        }
    }
}

/// Kernel dimension of the stacked map `Y ↦ ([Y, item])_items`, with the
/// underlying rank report.
pub fn joint_centralizer(
    items: &[Constraint<'_>],
    tol: &ToleranceConfig,
) -> Result<(usize, RankReport)> {
    let first = items
        .first()
        .ok_or_else(|| Error::Precondition("joint centralizer of an empty list".into()))?;
    let n = first.size();
    for it in items {
        check_size(n, it.size())?;
    }
    let ctx = GroupContext::new(n)?;
    let rows_per_item = 2 * n * n;
    let mut m = RMat::zeros(rows_per_item * items.len(), ctx.dim_g());
    for (col, e) in ctx.basis().iter().enumerate() {
        for (k, it) in items.iter().enumerate() {
            for (r, v) in linalg::flatten_complex(&it.defect(e)).into_iter().enumerate() {
                m[(k * rows_per_item + r, col)] = v;
            }
        }
    }
    let rep = numerical_rank(&m, tol.tau_rank);
    Ok((ctx.dim_g() - rep.rank, rep))
}

/// Lie-level isotropy dimension of a family of group and algebra elements.
pub fn joint_centralizer_dim(items: &[Constraint<'_>], tol: &ToleranceConfig) -> Result<usize> {
    joint_centralizer(items, tol).map(|(d, _)| d)
}

/// Eigenvalues of the Hermitian matrix `iJ`, ascending.
pub fn spectrum(j: &AlgebraElement) -> Vec<f64> {
    let h = &j.0 * c(0.0, 1.0);
    hermitian_eigen(&((&h + h.adjoint()) * c(0.5, 0.0))).0
}

/// Smallest gap between consecutive eigenvalues of `iJ`.
pub fn min_eigenvalue_gap(j: &AlgebraElement) -> f64 {
    spectrum(j).windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

/// True iff all eigenvalue gaps of `iJ` exceed `tau_eig`.
pub fn is_regular(j: &AlgebraElement, tol: &ToleranceConfig) -> bool {
    min_eigenvalue_gap(j) > tol.tau_eig
}

/// Seedable, platform-independent sampler for algebra and group elements.
///
/// Independent streams for parallel work are obtained with
/// [`Sampler::for_sample`], a counter-based split of one master seed.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn for_sample(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index.wrapping_add(1));
        Self { rng }
    }

    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        rand::Rng::random_range(&mut self.rng, lo..hi)
    }

    /// Standard-normal coefficients on the orthonormal basis.
    pub fn algebra(&mut self, ctx: &GroupContext) -> AlgebraElement {
        let coeffs: Vec<f64> = (0..ctx.dim_g()).map(|_| self.normal()).collect();
        ctx.from_coords(&coeffs)
    }

    pub fn group(&mut self, ctx: &GroupContext) -> GroupElement {
        let x = self.algebra(ctx);
        GroupElement(exp_unchecked(&x.0))
    }
}

pub fn random_algebra(ctx: &GroupContext, seed: u64) -> AlgebraElement {
    Sampler::new(seed).algebra(ctx)
}

pub fn random_group(ctx: &GroupContext, seed: u64) -> GroupElement {
    Sampler::new(seed).group(ctx)
}

pub fn orthonormal_basis(ctx: &GroupContext) -> Vec<AlgebraElement> {
    ctx.basis().to_vec()
}
