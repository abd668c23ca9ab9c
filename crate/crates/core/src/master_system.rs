//! The unreduced master system: invariant Hamiltonians `φ(J)`, their exact
//! flows `(e^{t·dφ(J)} g, J)`, and the constants-of-motion map
//! `Ψ(g, J) = (g⁻¹Jg, J)` into the double `su(n) × su(n)`.

use std::sync::Arc;

use crate::error::{check_size, Result};
use crate::lie_core::{
    adjoint_unchecked, bracket_unchecked, exp_unchecked, AlgebraElement, GroupContext,
    GroupElement,
};
use crate::linalg::{c, frobenius_dot, frobenius_norm, numerical_rank, CMat, RankReport, RMat};
use crate::lie_core::ToleranceConfig;
use crate::phase_space::{act, eval_unchecked, Observable, PhasePoint, TangentVector};
use crate::words::{i_power_part, DoubleLetter, PhaseLetter, TraceSum, Word};

/// A function on the double, built from trace words in `X` and `Y`.
pub type DoubleObservable = TraceSum<DoubleLetter>;

/// A point `(X, Y)` of `su(n) × su(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DoublePoint {
    pub x: AlgebraElement,
    pub y: AlgebraElement,
}

impl DoublePoint {
    pub fn new(x: AlgebraElement, y: AlgebraElement) -> Result<Self> {
        check_size(x.size(), y.size())?;
        Ok(Self { x, y })
    }

    pub fn size(&self) -> usize {
        self.x.size()
    }

    /// Diagonal conjugation `(ηXη⁻¹, ηYη⁻¹)`.
    pub fn conjugate(&self, eta: &GroupElement) -> Result<Self> {
        check_size(self.size(), eta.size())?;
        Ok(Self { x: adjoint_unchecked(eta, &self.x), y: adjoint_unchecked(eta, &self.y) })
    }

    /// Frobenius distance on both slots.
    pub fn distance(&self, other: &DoublePoint) -> f64 {
        let dx = frobenius_norm(&(self.x.mat() - other.x.mat()));
        let dy = frobenius_norm(&(self.y.mat() - other.y.mat()));
        dx.hypot(dy)
    }

    fn resolve<'a>(&'a self, l: &'a DoubleLetter) -> &'a CMat {
        match l {
            DoubleLetter::X => self.x.mat(),
            DoubleLetter::Y => self.y.mat(),
            DoubleLetter::Fixed(m) => m,
        }
    }
}

/// The invariant Hamiltonian `C_k(J) = Re[i^k tr(J^k)]`, `k ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InvariantHamiltonian {
    k: usize,
}

impl InvariantHamiltonian {
    pub fn new(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(crate::Error::Domain(format!("Casimir degree must be at least 2, got {k}")));
        }
        Ok(Self { k })
    }

    /// The generators `C_2, …, C_n` of the invariant ring of su(n).
    pub fn generators(ctx: &GroupContext) -> Vec<Self> {
        (2..=ctx.n()).map(|k| Self { k }).collect()
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    fn word<L: crate::words::Letter>(&self, letter: L) -> Word<L> {
        let (part, sign) = i_power_part(self.k);
        Word::new(vec![letter; self.k], part, sign).expect("degree is at least 2")
    }

    /// `C_k ∘ π₂` as a phase-space observable.
    pub fn observable(&self) -> Observable {
        Observable::single(self.word(PhaseLetter::J))
    }

    /// `C_k` read on one slot of the double.
    pub fn on_double(&self, slot: DoubleLetter) -> DoubleObservable {
        DoubleObservable::single(self.word(slot))
    }

    pub fn value(&self, j: &AlgebraElement) -> f64 {
        let w = self.word(DoubleLetter::X);
        w.eval_with(|l| match l {
            DoubleLetter::X => j.mat(),
            _ => unreachable!("Casimir words only use one letter"),
        })
    }
}

/// Gradient `dφ(J)` of the invariant function: the su(n)-projection of
/// `k·i^k·J^{k−1}` with the real-part convention.
pub fn d_phi(h: &InvariantHamiltonian, j: &AlgebraElement) -> AlgebraElement {
    let n = j.size();
    let mut power = CMat::identity(n, n);
    for _ in 0..(h.k - 1) {
        power *= j.mat();
    }
    let (part, sign) = i_power_part(h.k);
    AlgebraElement::from_raw(part.gradient(&(power * c(h.k as f64, 0.0)), sign))
}

/// Exact flow `(exp(t·dφ(J₀))·g₀, J₀)`; the momentum is carried over unchanged.
pub fn flow(x0: &PhasePoint, h: &InvariantHamiltonian, t: f64) -> PhasePoint {
    if t == 0.0 {
        return x0.clone();
    }
    let dphi = d_phi(h, x0.j());
    let g = exp_unchecked(&(dphi.mat() * c(t, 0.0))) * x0.g().mat();
    let g = crate::linalg::project_special_unitary(&g);
    PhasePoint::new(GroupElement::from_raw(g), x0.j().clone()).expect("sizes agree")
}

/// `Ψ(g, J) = (g⁻¹Jg, J)`.
pub fn psi(x: &PhasePoint) -> DoublePoint {
    DoublePoint { x: x.j_tilde(), y: x.j().clone() }
}

/// Largest deviation of `Ψ` along the flow of `h` over `t_grid`.
pub fn verify_psi_flow_invariance(x0: &PhasePoint, h: &InvariantHamiltonian, t_grid: &[f64]) -> f64 {
    let base = psi(x0);
    t_grid.iter().map(|&t| psi(&flow(x0, h, t)).distance(&base)).fold(0.0, f64::max)
}

/// `‖Ψ(η·x) − η·Ψ(x)‖`.
pub fn verify_psi_equivariance(x: &PhasePoint, eta: &GroupElement) -> Result<f64> {
    let lhs = psi(&act(eta, x)?);
    let rhs = psi(x).conjugate(eta)?;
    Ok(lhs.distance(&rhs))
}

pub fn eval_double(f: &DoubleObservable, z: &DoublePoint) -> f64 {
    f.terms().iter().map(|w| w.eval_with(|l| z.resolve(l))).sum()
}

/// Gradients `(∇_X f, ∇_Y f)` of a function on the double.
pub fn double_gradient(f: &DoubleObservable, z: &DoublePoint) -> (AlgebraElement, AlgebraElement) {
    let n = z.size();
    let mut gx = CMat::zeros(n, n);
    let mut gy = CMat::zeros(n, n);
    for w in f.terms() {
        let exp = w.expand_with(|l| z.resolve(l));
        let mut ax = CMat::zeros(n, n);
        let mut ay = CMat::zeros(n, n);
        for (l, rest) in w.letters().iter().zip(&exp.rests) {
            match l {
                DoubleLetter::X => ax += rest,
                DoubleLetter::Y => ay += rest,
                DoubleLetter::Fixed(_) => {}
            }
        }
        gx += w.part().gradient(&ax, w.coeff());
        gy += w.part().gradient(&ay, w.coeff());
    }
    (AlgebraElement::from_raw(gx), AlgebraElement::from_raw(gy))
}

/// Product bracket `−{,}_𝒢 × {,}_𝒢` on the double:
/// `−⟨X, [∇_X f, ∇_X h]⟩ + ⟨Y, [∇_Y f, ∇_Y h]⟩`.
pub fn lp_double_bracket(f: &DoubleObservable, h: &DoubleObservable, z: &DoublePoint) -> f64 {
    let (fx, fy) = double_gradient(f, z);
    let (hx, hy) = double_gradient(h, z);
    -frobenius_dot(z.x.mat(), bracket_unchecked(&fx, &hx).mat())
        + frobenius_dot(z.y.mat(), bracket_unchecked(&fy, &hy).mat())
}

/// `f ∘ Ψ` as a phase-space observable: `X → g⁻¹·J·g`, `Y → J`.
pub fn pullback(f: &DoubleObservable) -> Observable {
    let terms = f
        .terms()
        .iter()
        .map(|w| {
            let mut letters = Vec::with_capacity(3 * w.len());
            for l in w.letters() {
                match l {
                    DoubleLetter::X => {
                        letters.extend([PhaseLetter::GInv, PhaseLetter::J, PhaseLetter::G])
                    }
                    DoubleLetter::Y => letters.push(PhaseLetter::J),
                    DoubleLetter::Fixed(m) => letters.push(PhaseLetter::Fixed(Arc::clone(m))),
                }
            }
            Word::new(letters, w.part(), w.coeff()).expect("nonempty")
        })
        .collect();
    Observable::new(terms)
}

/// `|{f∘Ψ, h∘Ψ}(x) − (−{,}_𝒢 × {,}_𝒢)(f, h)(Ψ(x))|`.
pub fn verify_psi_poisson(f: &DoubleObservable, h: &DoubleObservable, x: &PhasePoint) -> Result<f64> {
    let upstairs = crate::phase_space::poisson_bracket(&pullback(f), &pullback(h), x)?;
    let downstairs = lp_double_bracket(f, h, &psi(x));
    Ok((upstairs - downstairs).abs())
}

/// Jacobian of `Ψ` in right-trivialized coordinates: columns are the images
/// of `(e_a·g, 0)` then `(0, e_a)`; rows are coordinates of `(δX, δY)`.
pub fn dpsi_jacobian(ctx: &GroupContext, x: &PhasePoint) -> RMat {
    let d = ctx.dim_g();
    let mut m = RMat::zeros(2 * d, 2 * d);
    let conj = |a: &CMat| AlgebraElement::from_raw(x.g_inv() * a * x.g().mat());
    for (i, e) in ctx.basis().iter().enumerate() {
        // δg = e·g:  δ(g⁻¹Jg) = g⁻¹[J, e]g
        let dx = conj(bracket_unchecked(x.j(), e).mat());
        m.view_mut((0, i), (d, 1)).copy_from(&ctx.coords(&dx));
        // δJ = e:  δ(g⁻¹Jg) = g⁻¹ e g,  δY = e
        let dx = conj(e.mat());
        m.view_mut((0, d + i), (d, 1)).copy_from(&ctx.coords(&dx));
        m.view_mut((d, d + i), (d, 1)).copy_from(&ctx.coords(e));
    }
    m
}

/// The same Jacobian by central differences along the chart curves
/// `(e^{s·e_a} g, J)` and `(g, J + s·e_a)`.
pub fn dpsi_jacobian_fd(ctx: &GroupContext, x: &PhasePoint, h: f64) -> RMat {
    let d = ctx.dim_g();
    let zero = AlgebraElement::zero(ctx.n());
    let mut m = RMat::zeros(2 * d, 2 * d);
    let coords = |z: &DoublePoint| {
        let mut v: Vec<f64> = ctx.coords(&z.x).iter().copied().collect();
        v.extend(ctx.coords(&z.y).iter());
        v
    };
    for (i, e) in ctx.basis().iter().enumerate() {
        let dirs = [
            TangentVector { a: e.clone(), b: zero.clone() },
            TangentVector { a: zero.clone(), b: e.clone() },
        ];
        for (k, v) in dirs.iter().enumerate() {
            let plus = coords(&psi(&x.step(v, h)));
            let minus = coords(&psi(&x.step(v, -h)));
            for r in 0..2 * d {
                m[(r, k * d + i)] = (plus[r] - minus[r]) / (2.0 * h);
            }
        }
    }
    m
}

/// Numerical rank of `DΨ` at `x`.
pub fn dpsi_rank(x: &PhasePoint, tol: &ToleranceConfig) -> Result<RankReport> {
    let ctx = GroupContext::new(x.size())?;
    Ok(numerical_rank(&dpsi_jacobian(&ctx, x), tol.tau_rank))
}

/// `|C_k(X) − C_k(Y)|`, which vanishes on the image of `Ψ`.
pub fn casimir_difference_check(z: &DoublePoint, k: usize) -> Result<f64> {
    let h = InvariantHamiltonian::new(k)?;
    Ok((h.value(&z.x) - h.value(&z.y)).abs())
}

/// Covector of `P ∘ Ψ` at `x` via the chain rule `dP(Ψ(x)) · DΨ(x)`.
pub fn pullback_covector(
    ctx: &GroupContext,
    p: &DoubleObservable,
    x: &PhasePoint,
    jacobian: &RMat,
) -> Vec<f64> {
    let (gx, gy) = double_gradient(p, &psi(x));
    let mut row: Vec<f64> = ctx.coords(&gx).iter().copied().collect();
    row.extend(ctx.coords(&gy).iter());
    let row = nalgebra::RowDVector::from_vec(row);
    (row * jacobian).iter().copied().collect()
}

/// Value of `f ∘ Ψ` by direct substitution (no word expansion).
pub fn eval_pullback(f: &DoubleObservable, x: &PhasePoint) -> f64 {
    eval_double(f, &psi(x))
}

/// Value of an expanded pullback, for cross-checks.
pub fn eval_expanded(f: &DoubleObservable, x: &PhasePoint) -> f64 {
    eval_unchecked(&pullback(f), x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_core::{inner, random_algebra, Sampler};
    use crate::phase_space::{central_difference2, differential};

    fn point(n: usize, seed: u64) -> PhasePoint {
        let ctx = GroupContext::new(n).unwrap();
        let mut s = Sampler::new(seed);
        PhasePoint::new(s.group(&ctx), s.algebra(&ctx)).unwrap()
    }

    fn dobs(s: &str) -> DoubleObservable {
        s.parse().unwrap()
    }

    #[test]
    fn casimir_gradients() {
        for n in [2, 3, 4] {
            let ctx = GroupContext::new(n).unwrap();
            let j = random_algebra(&ctx, n as u64);
            let c2 = InvariantHamiltonian::new(2).unwrap();
            assert!((&d_phi(&c2, &j) - &(&j * 2.0)).norm() < 1e-13);
            assert!((c2.value(&j) - inner(&j, &j).unwrap()).abs() < 1e-12);
            for k in 2..=n + 1 {
                let h = InvariantHamiltonian::new(k).unwrap();
                let grad = d_phi(&h, &j);
                // analytic equals the generic observable gradient
                let x = PhasePoint::new(GroupElement::identity(n), j.clone()).unwrap();
                let via_words = crate::phase_space::grad2(&h.observable(), &x).unwrap();
                assert!((&grad - &via_words).norm() < 1e-12);
                for e in ctx.basis() {
                    let fd = central_difference2(|s| h.value(&(&j + &(e * s))), 1e-5);
                    assert!((inner(e, &grad).unwrap() - fd).abs() < 1e-6);
                }
                if k >= 3 {
                    assert_eq!(d_phi(&h, &AlgebraElement::zero(n)).norm(), 0.0);
                }
                let eta = crate::lie_core::random_group(&ctx, 77);
                let lhs = d_phi(&h, &adjoint_unchecked(&eta, &j));
                let rhs = adjoint_unchecked(&eta, &grad);
                assert!((&lhs - &rhs).norm() < 1e-10);
            }
        }
        assert!(InvariantHamiltonian::new(1).is_err());
    }

    #[test]
    fn casimirs_are_real_and_invariant() {
        let ctx = GroupContext::new(3).unwrap();
        let j = random_algebra(&ctx, 3);
        let eta = crate::lie_core::random_group(&ctx, 4);
        for k in 2..=5 {
            let h = InvariantHamiltonian::new(k).unwrap();
            // the discarded part of i^k tr(J^k) vanishes for anti-Hermitian J
            let mut p = CMat::identity(3, 3);
            for _ in 0..k {
                p = p * j.mat();
            }
            let z = c(0.0, 1.0).powu(k as u32) * crate::linalg::trace(&p);
            assert!(z.im.abs() < 1e-12);
            assert!((h.value(&j) - h.value(&adjoint_unchecked(&eta, &j))).abs() < 1e-10);
        }
    }

    #[test]
    fn flow_examples() {
        let c2 = InvariantHamiltonian::new(2).unwrap();
        let x0 = point(3, 1);
        let same = flow(&x0, &c2, 0.0);
        assert!(frobenius_norm(&(same.g().mat() - x0.g().mat())) < 1e-14);
        assert_eq!(same.j(), x0.j());
        let c3 = InvariantHamiltonian::new(3).unwrap();
        let a = flow(&flow(&x0, &c3, 0.7), &c3, 1.9);
        let b = flow(&x0, &c3, 2.6);
        assert!(frobenius_norm(&(a.g().mat() - b.g().mat())) < 1e-10);
        // closed form: g(t) = diag(e^{2it}, e^{−2it})
        let j = AlgebraElement::from_diagonal_phases(&[1.0, -1.0]).unwrap();
        let x = PhasePoint::new(GroupElement::identity(2), j).unwrap();
        for t in [0.3, 1.0, 4.5] {
            let g = flow(&x, &c2, t);
            let want = GroupElement::from_diagonal_phases(&[2.0 * t, -2.0 * t]).unwrap();
            assert!(frobenius_norm(&(g.g().mat() - want.mat())) < 1e-13);
        }
    }

    #[test]
    fn flow_is_the_hamiltonian_vector_field() {
        // d/dt F(flow) = {F, H}
        let f: Observable = "Re tr(G J Ginv J) + Im tr(G G J)".parse().unwrap();
        for n in [2, 3] {
            let x = point(n, 50 + n as u64);
            for k in 2..=n {
                let h = InvariantHamiltonian::new(k).unwrap();
                let pb = crate::phase_space::poisson_bracket(&f, &h.observable(), &x).unwrap();
                let fd = crate::phase_space::central_difference(
                    |t| eval_unchecked(&f, &flow(&x, &h, t)),
                    1e-3,
                );
                assert!((pb - fd).abs() < 1e-8, "n={n} k={k}: {pb} vs {fd}");
            }
        }
    }

    #[test]
    fn psi_examples() {
        let ctx = GroupContext::new(3).unwrap();
        let j = random_algebra(&ctx, 8);
        let z = psi(&PhasePoint::new(GroupElement::identity(3), j.clone()).unwrap());
        assert_eq!(z.x, j);
        assert_eq!(z.y, j);
        let g = crate::lie_core::random_group(&ctx, 9);
        let z = psi(&PhasePoint::new(g, AlgebraElement::zero(3)).unwrap());
        assert_eq!(z.x.norm() + z.y.norm(), 0.0);
    }

    #[test]
    fn psi_is_constant_along_flows() {
        let grid: Vec<f64> = (0..=20).map(|i| 0.5 * i as f64).collect();
        assert_eq!(verify_psi_flow_invariance(&point(2, 3), &InvariantHamiltonian::new(2).unwrap(), &[0.0]), 0.0);
        for n in [2, 3] {
            let x = point(n, 40 + n as u64);
            for k in 2..=n {
                let h = InvariantHamiltonian::new(k).unwrap();
                assert!(verify_psi_flow_invariance(&x, &h, &grid) < 1e-10);
            }
        }
    }

    #[test]
    fn psi_equivariance() {
        let x = point(3, 10);
        assert!(verify_psi_equivariance(&x, &GroupElement::identity(3)).unwrap() < 1e-15);
        assert!(verify_psi_equivariance(&x, &GroupElement::central(3, 2)).unwrap() < 1e-13);
        let ctx = GroupContext::new(3).unwrap();
        let eta = crate::lie_core::random_group(&ctx, 11);
        assert!(verify_psi_equivariance(&x, &eta).unwrap() < 1e-12);
    }

    #[test]
    fn double_bracket_examples() {
        let ctx = GroupContext::new(3).unwrap();
        let mut s = Sampler::new(12);
        let z = DoublePoint::new(s.algebra(&ctx), s.algebra(&ctx)).unwrap();
        let fx = dobs("Re tr(X X X)");
        let hy = dobs("Im tr(Y Y Y) + Re tr(Y Y)");
        assert_eq!(lp_double_bracket(&fx, &hy, &z), 0.0);
        let a = s.algebra(&ctx);
        let b = s.algebra(&ctx);
        let fa = DoubleObservable::linear(a.mat(), DoubleLetter::X);
        let fb = DoubleObservable::linear(b.mat(), DoubleLetter::X);
        let want = -inner(&z.x, &crate::lie_core::lie_bracket(&a, &b).unwrap()).unwrap();
        assert!((lp_double_bracket(&fa, &fb, &z) - want).abs() < 1e-13);
        let casimir = dobs("Re tr(X X)");
        for h in ["Re tr(X Y)", "Im tr(X X Y)", "Re tr(X Y X Y)"] {
            assert!(lp_double_bracket(&casimir, &dobs(h), &z).abs() < 1e-10);
        }
    }

    #[test]
    fn double_gradients_match_finite_differences() {
        let ctx = GroupContext::new(3).unwrap();
        let mut s = Sampler::new(13);
        let z = DoublePoint::new(s.algebra(&ctx), s.algebra(&ctx)).unwrap();
        let f = dobs("Re tr(X Y X Y Y) + 0.3 * Im tr(X X Y)");
        let (gx, gy) = double_gradient(&f, &z);
        for e in ctx.basis() {
            let fdx = central_difference2(
                |t| eval_double(&f, &DoublePoint { x: &z.x + &(e * t), y: z.y.clone() }),
                1e-5,
            );
            let fdy = central_difference2(
                |t| eval_double(&f, &DoublePoint { x: z.x.clone(), y: &z.y + &(e * t) }),
                1e-5,
            );
            assert!((inner(e, &gx).unwrap() - fdx).abs() < 1e-6);
            assert!((inner(e, &gy).unwrap() - fdy).abs() < 1e-6);
        }
    }

    #[test]
    fn psi_is_a_poisson_map() {
        let f = dobs("Re tr(X Y)");
        let h = dobs("Re tr(Y Y)");
        let x = point(2, 14);
        assert!(verify_psi_poisson(&f, &h, &x).unwrap() < 1e-8);
        assert!(verify_psi_poisson(&f, &f, &x).unwrap() < 1e-15);
        let f = dobs("Im tr(X X Y) + Re tr(X Y Y X)");
        let h = dobs("Re tr(X X X Y)");
        for n in [2, 3] {
            assert!(verify_psi_poisson(&f, &h, &point(n, 15)).unwrap() < 1e-8);
        }
    }

    #[test]
    fn pullback_agrees_with_direct_evaluation() {
        let f = dobs("Re tr(X Y X) + Im tr(Y X X Y)");
        let x = point(3, 16);
        assert!((eval_pullback(&f, &x) - eval_expanded(&f, &x)).abs() < 1e-12);
        // Hamiltonians realized as pullbacks: C_k ∘ π₂ = Ψ*(C_k(Y)), word for word
        for k in 2..=4 {
            let h = InvariantHamiltonian::new(k).unwrap();
            assert_eq!(pullback(&h.on_double(DoubleLetter::Y)), h.observable());
        }
    }

    #[test]
    fn analytic_jacobian_matches_finite_differences() {
        for n in [2, 3] {
            let ctx = GroupContext::new(n).unwrap();
            let x = point(n, 17);
            let a = dpsi_jacobian(&ctx, &x);
            let fd = dpsi_jacobian_fd(&ctx, &x, 1e-5);
            assert!((a - fd).amax() < 1e-6);
        }
    }

    #[test]
    fn jacobian_rank() {
        let tol = ToleranceConfig::default();
        assert_eq!(dpsi_rank(&point(2, 18), &tol).unwrap().rank, 5);
        assert_eq!(dpsi_rank(&point(3, 18), &tol).unwrap().rank, 14);
        let ctx = GroupContext::new(2).unwrap();
        let zero_j = PhasePoint::new(crate::lie_core::random_group(&ctx, 3), AlgebraElement::zero(2)).unwrap();
        assert_eq!(dpsi_rank(&zero_j, &tol).unwrap().rank, 3);
    }

    #[test]
    fn casimir_differences() {
        for n in [2, 3] {
            let x = point(n, 19);
            for k in 2..=n {
                assert!(casimir_difference_check(&psi(&x), k).unwrap() < 1e-10);
            }
        }
        let ctx = GroupContext::new(3).unwrap();
        let mut s = Sampler::new(20);
        let z = DoublePoint::new(s.algebra(&ctx), s.algebra(&ctx)).unwrap();
        assert!(casimir_difference_check(&z, 2).unwrap() > 1e-3);
        let same = DoublePoint::new(z.x.clone(), z.x.clone()).unwrap();
        assert_eq!(casimir_difference_check(&same, 3).unwrap(), 0.0);
    }

    #[test]
    fn chain_rule_covector_matches_expanded_differential() {
        let ctx = GroupContext::new(3).unwrap();
        let x = point(3, 21);
        let p = dobs("Re tr(X Y Y) + Im tr(X X Y Y)");
        let jac = dpsi_jacobian(&ctx, &x);
        let row = pullback_covector(&ctx, &p, &x, &jac);
        let direct = differential(&pullback(&p), &x).unwrap().flatten(&ctx);
        for (a, b) in row.iter().zip(&direct) {
            assert!((a - b).abs() < 1e-11);
        }
    }
}
