//! The phase space `M = SU(n) × su(n)` in right-trivialized form, trace-word
//! observables with exact su(n)-valued gradients, the canonical Poisson
//! bracket
//!
//! ```text
//! {F, H}(g, J) = ⟨∇₁F, d₂H⟩ − ⟨∇₁H, d₂F⟩ + ⟨J, [d₂F, d₂H]⟩,
//! ```
//!
//! the conjugation action and its moment map `Φ(g, J) = J − g⁻¹Jg`.

use crate::error::{check_size, Result};
use crate::lie_core::{
    adjoint_unchecked, bracket_unchecked, exp_unchecked, AlgebraElement, GroupContext,
    GroupElement,
};
use crate::linalg::{frobenius_dot, CMat};
use crate::words::{PhaseLetter, TraceSum, Word};

pub type TraceWord = Word<PhaseLetter>;
pub type Observable = TraceSum<PhaseLetter>;

/// A point `(g, J)` of the phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    g: GroupElement,
    j: AlgebraElement,
    g_inv: CMat,
}

impl PhasePoint {
    pub fn new(g: GroupElement, j: AlgebraElement) -> Result<Self> {
        check_size(g.size(), j.size())?;
        let g_inv = g.mat().adjoint();
        Ok(Self { g, j, g_inv })
    }

    pub fn g(&self) -> &GroupElement {
        &self.g
    }

    pub fn j(&self) -> &AlgebraElement {
        &self.j
    }

    pub fn size(&self) -> usize {
        self.g.size()
    }

    pub fn g_inv(&self) -> &CMat {
        &self.g_inv
    }

    /// `J̃ = g⁻¹Jg`
    pub fn j_tilde(&self) -> AlgebraElement {
        AlgebraElement::from_raw(&self.g_inv * self.j.mat() * self.g.mat())
    }

    /// Move along the right-trivialized tangent vector `v` with step `s`:
    /// `(e^{s·a} g, J + s·b)`.
    pub fn step(&self, v: &TangentVector, s: f64) -> PhasePoint {
        let g = exp_unchecked(&(v.a.mat() * crate::linalg::c(s, 0.0))) * self.g.mat();
        let j = self.j.mat() + v.b.mat() * crate::linalg::c(s, 0.0);
        PhasePoint::from_raw(GroupElement::from_raw(g), AlgebraElement::from_raw(j))
    }

    pub(crate) fn from_raw(g: GroupElement, j: AlgebraElement) -> Self {
        let g_inv = g.mat().adjoint();
        Self { g, j, g_inv }
    }

    fn resolve<'a>(&'a self, l: &'a PhaseLetter) -> &'a CMat {
        match l {
            PhaseLetter::G => self.g.mat(),
            PhaseLetter::GInv => &self.g_inv,
            PhaseLetter::J => self.j.mat(),
            PhaseLetter::Fixed(m) => m,
        }
    }
}

/// A tangent vector `(a·g, b)` at `(g, J)`, stored by its right-trivialized
/// components `a, b ∈ su(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    pub a: AlgebraElement,
    pub b: AlgebraElement,
}

impl TangentVector {
    pub fn new(a: AlgebraElement, b: AlgebraElement) -> Result<Self> {
        check_size(a.size(), b.size())?;
        Ok(Self { a, b })
    }

    /// Coordinates in the orthonormal basis, `a` first.
    pub fn flatten(&self, ctx: &GroupContext) -> Vec<f64> {
        let mut v: Vec<f64> = ctx.coords(&self.a).iter().copied().collect();
        v.extend(ctx.coords(&self.b).iter());
        v
    }
}

/// Differential of a function on `M` as the pair `(∇₁F, d₂F)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Differential {
    pub grad1: AlgebraElement,
    pub grad2: AlgebraElement,
}

impl Differential {
    /// Pairing with a tangent vector: `⟨a, ∇₁F⟩ + ⟨b, d₂F⟩`.
    pub fn apply(&self, v: &TangentVector) -> f64 {
        frobenius_dot(v.a.mat(), self.grad1.mat()) + frobenius_dot(v.b.mat(), self.grad2.mat())
    }

    /// Covector coordinates in the orthonormal basis.
    pub fn flatten(&self, ctx: &GroupContext) -> Vec<f64> {
        TangentVector { a: self.grad1.clone(), b: self.grad2.clone() }.flatten(ctx)
    }
}

/// Value of an observable.
pub fn eval(f: &Observable, x: &PhasePoint) -> Result<f64> {
    check_fixed_sizes(f, x.size())?;
    Ok(eval_unchecked(f, x))
}

pub(crate) fn eval_unchecked(f: &Observable, x: &PhasePoint) -> f64 {
    f.terms().iter().map(|w| w.eval_with(|l| x.resolve(l))).sum()
}

fn check_fixed_sizes(f: &Observable, n: usize) -> Result<()> {
    for w in f.terms() {
        for l in w.letters() {
            if let PhaseLetter::Fixed(m) = l {
                check_size(n, m.nrows())?;
            }
        }
    }
    Ok(())
}

/// Which derivative to accumulate during a cyclic expansion.
#[derive(Clone, Copy)]
enum Slot {
    /// `g ↦ e^{tX} g`
    Left,
    /// `g ↦ g e^{tX}`
    Right,
    /// `J ↦ J + tX`
    Momentum,
}

fn gradient(f: &Observable, x: &PhasePoint, slot: Slot) -> AlgebraElement {
    let n = x.size();
    let mut total = CMat::zeros(n, n);
    for w in f.terms() {
        let exp = w.expand_with(|l| x.resolve(l));
        let mut a = CMat::zeros(n, n);
        for (letter, rest) in w.letters().iter().zip(&exp.rests) {
            match (slot, letter) {
                // δg = Xg: tr(X g R)
                (Slot::Left, PhaseLetter::G) => a += x.g.mat() * rest,
                // δg⁻¹ = −g⁻¹X: tr(−X R g⁻¹)
                (Slot::Left, PhaseLetter::GInv) => a -= rest * &x.g_inv,
                // δg = gX: tr(X R g)
                (Slot::Right, PhaseLetter::G) => a += rest * x.g.mat(),
                // δg⁻¹ = −Xg⁻¹: tr(−X g⁻¹ R)
                (Slot::Right, PhaseLetter::GInv) => a -= &x.g_inv * rest,
                (Slot::Momentum, PhaseLetter::J) => a += rest,
                _ => {}
            }
        }
        total += w.part().gradient(&a, w.coeff());
    }
    AlgebraElement::from_raw(total)
}

/// Left derivative `∇₁F`: `⟨X, ∇₁F⟩ = d/dt F(e^{tX} g, J)` at `t = 0`.
pub fn grad1(f: &Observable, x: &PhasePoint) -> Result<AlgebraElement> {
    check_fixed_sizes(f, x.size())?;
    Ok(gradient(f, x, Slot::Left))
}

/// Right derivative `∇₁′F`: `⟨X, ∇₁′F⟩ = d/dt F(g e^{tX}, J)`. The bracket
/// does not use it; it equals `g⁻¹ (∇₁F) g`.
pub fn grad1_right(f: &Observable, x: &PhasePoint) -> Result<AlgebraElement> {
    check_fixed_sizes(f, x.size())?;
    Ok(gradient(f, x, Slot::Right))
}

/// Momentum derivative `d₂F`: `⟨X, d₂F⟩ = d/dt F(g, J + tX)`.
pub fn grad2(f: &Observable, x: &PhasePoint) -> Result<AlgebraElement> {
    check_fixed_sizes(f, x.size())?;
    Ok(gradient(f, x, Slot::Momentum))
}

pub fn differential(f: &Observable, x: &PhasePoint) -> Result<Differential> {
    check_fixed_sizes(f, x.size())?;
    Ok(differential_unchecked(f, x))
}

pub(crate) fn differential_unchecked(f: &Observable, x: &PhasePoint) -> Differential {
    Differential { grad1: gradient(f, x, Slot::Left), grad2: gradient(f, x, Slot::Momentum) }
}

/// Bracket of two functions given by their differentials at `x`.
pub fn bracket_of_differentials(df: &Differential, dh: &Differential, j: &AlgebraElement) -> f64 {
    frobenius_dot(df.grad1.mat(), dh.grad2.mat()) - frobenius_dot(dh.grad1.mat(), df.grad2.mat())
        + frobenius_dot(j.mat(), bracket_unchecked(&df.grad2, &dh.grad2).mat())
}

/// Canonical Poisson bracket `{F, H}(x)`.
pub fn poisson_bracket(f: &Observable, h: &Observable, x: &PhasePoint) -> Result<f64> {
    let df = differential(f, x)?;
    let dh = differential(h, x)?;
    Ok(bracket_of_differentials(&df, &dh, &x.j))
}

/// Hamiltonian vector field `V_H` with `{K, H} = dK(V_H)` for every `K`:
/// `ġ = (d₂H)·g`, `J̇ = [d₂H, J] − ∇₁H`.
pub fn hamiltonian_vector_field(dh: &Differential, j: &AlgebraElement) -> TangentVector {
    let b = &bracket_unchecked(&dh.grad2, j) - &dh.grad1;
    TangentVector { a: dh.grad2.clone(), b }
}

/// Diagonal conjugation `(ηgη⁻¹, ηJη⁻¹)`.
pub fn act(eta: &GroupElement, x: &PhasePoint) -> Result<PhasePoint> {
    check_size(eta.size(), x.size())?;
    let g = GroupElement::from_raw(eta.mat() * x.g.mat() * eta.mat().adjoint());
    Ok(PhasePoint::from_raw(g, adjoint_unchecked(eta, &x.j)))
}

/// `Φ(g, J) = J − g⁻¹Jg`.
pub fn moment_map(x: &PhasePoint) -> AlgebraElement {
    &x.j - &x.j_tilde()
}

/// The component `Φ_X = ⟨Φ(·), X⟩` of the moment map as an observable:
/// `−Re tr(J X) + Re tr(g⁻¹ J g X)`.
pub fn moment_component(x_dir: &AlgebraElement) -> Observable {
    use std::sync::Arc;
    let fixed = PhaseLetter::Fixed(Arc::new(x_dir.mat().clone()));
    let t1 = Word::new(vec![PhaseLetter::J, fixed.clone()], crate::words::Part::Re, -1.0);
    let t2 = Word::new(
        vec![PhaseLetter::GInv, PhaseLetter::J, PhaseLetter::G, fixed],
        crate::words::Part::Re,
        1.0,
    );
    Observable::new(vec![t1.expect("nonempty"), t2.expect("nonempty")])
}

/// `|{F, Φ_X}(x) − d/dt F(e^{tX}·x)|` with the derivative taken by a
/// fourth-order central difference with step `h`.
pub fn verify_moment_generates(
    f: &Observable,
    x_dir: &AlgebraElement,
    x: &PhasePoint,
    h: f64,
) -> Result<f64> {
    check_size(x.size(), x_dir.size())?;
    let phi_x = moment_component(x_dir);
    let lhs = poisson_bracket(f, &phi_x, x)?;
    let along = |s: f64| -> f64 {
        let eta = GroupElement::from_raw(exp_unchecked(&(x_dir.mat() * crate::linalg::c(s, 0.0))));
        let y = act(&eta, x).expect("sizes checked");
        eval_unchecked(f, &y)
    };
    let rhs = central_difference(along, h);
    Ok((lhs - rhs).abs())
}

/// Fourth-order central difference of a scalar function at zero.
pub fn central_difference(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    (8.0 * (f(h) - f(-h)) - (f(2.0 * h) - f(-2.0 * h))) / (12.0 * h)
}

/// Sixth-order central difference of a scalar function at zero.
pub fn central_difference6(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    (45.0 * (f(h) - f(-h)) - 9.0 * (f(2.0 * h) - f(-2.0 * h)) + (f(3.0 * h) - f(-3.0 * h))) / (60.0 * h)
}

/// Second-order central difference of a scalar function at zero.
pub fn central_difference2(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    (f(h) - f(-h)) / (2.0 * h)
}

/// Directional derivative of a scalar function on `M` along `v`, through the
/// chart `(e^{s·a} g, J + s·b)`, fourth order in `h`.
pub fn directional_derivative(
    f: impl Fn(&PhasePoint) -> f64,
    x: &PhasePoint,
    v: &TangentVector,
    h: f64,
) -> f64 {
    central_difference(|s| f(&x.step(v, s)), h)
}

/// Random observable with `terms` words of length `1..=max_len` over
/// `{G, Ginv, J}`, random parts and standard normal coefficients.
pub fn random_observable(sampler: &mut crate::lie_core::Sampler, max_len: usize, terms: usize) -> Observable {
    let words = (0..terms.max(1))
        .map(|_| {
            let len = 1 + (sampler.uniform(0.0, max_len.max(1) as f64) as usize).min(max_len.max(1) - 1);
            let letters = (0..len)
                .map(|_| match (sampler.uniform(0.0, 3.0) as usize).min(2) {
                    0 => PhaseLetter::G,
                    1 => PhaseLetter::GInv,
                    _ => PhaseLetter::J,
                })
                .collect();
            let part = if sampler.uniform(0.0, 1.0) < 0.5 { crate::words::Part::Re } else { crate::words::Part::Im };
            Word::new(letters, part, sampler.normal()).expect("nonempty word with finite coefficient")
        })
        .collect();
    Observable::new(words)
}

/// `|{F, H} + {H, F}|`
pub fn antisymmetry_defect(f: &Observable, h: &Observable, x: &PhasePoint) -> Result<f64> {
    Ok((poisson_bracket(f, h, x)? + poisson_bracket(h, f, x)?).abs())
}

/// `|{F·G, H} − F{G, H} − G{F, H}|`, with the left side obtained by
/// differentiating the pointwise product along `V_H` (sixth-order stencil).
pub fn leibniz_defect(f: &Observable, g: &Observable, h: &Observable, x: &PhasePoint, step: f64) -> Result<f64> {
    let dh = differential(h, x)?;
    check_fixed_sizes(f, x.size())?;
    check_fixed_sizes(g, x.size())?;
    let v = hamiltonian_vector_field(&dh, &x.j);
    let lhs = central_difference6(
        |s| {
            let y = x.step(&v, s);
            eval_unchecked(f, &y) * eval_unchecked(g, &y)
        },
        step,
    );
    let rhs = eval_unchecked(f, x) * poisson_bracket(g, h, x)? + eval_unchecked(g, x) * poisson_bracket(f, h, x)?;
    Ok((lhs - rhs).abs())
}

/// `|{F,{G,H}} + {G,{H,F}} + {H,{F,G}}|`. Each outer bracket is
/// `{A, K} = −dK(V_A)`, differentiated numerically (sixth order) with step `step`.
pub fn jacobi_defect(f: &Observable, g: &Observable, h: &Observable, x: &PhasePoint, step: f64) -> Result<f64> {
    let outer = |a: &Observable, b: &Observable, c: &Observable| -> Result<f64> {
        let va = hamiltonian_vector_field(&differential(a, x)?, &x.j);
        check_fixed_sizes(b, x.size())?;
        check_fixed_sizes(c, x.size())?;
        let k = |y: &PhasePoint| {
            bracket_of_differentials(&differential_unchecked(b, y), &differential_unchecked(c, y), &y.j)
        };
        Ok(-central_difference6(|s| k(&x.step(&va, s)), step))
    };
    Ok((outer(f, g, h)? + outer(g, h, f)? + outer(h, f, g)?).abs())
}
