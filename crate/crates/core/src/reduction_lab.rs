//! Upstairs certificates for the reduced system.
//!
//! Quotient statements are never materialized as charts. A family of tangent
//! vectors `V` at `x` spans, on `M/G`, a space of dimension
//! `rank([V; W]) − rank(W)` where `W` are the gauge directions
//! `(Y − Ad_g Y, [Y, J])`. Invariant functions are handled through their
//! differentials, which already annihilate `W`.

use serde::Serialize;

use crate::error::Result;
use crate::lie_core::{
    adjoint_unchecked, bracket_unchecked, centralizer_basis, is_regular, joint_centralizer,
    AlgebraElement, Constraint, GroupContext, ToleranceConfig,
};
use crate::linalg::{frobenius_dot, numerical_rank, stack_rows, RankReport};
use crate::master_system::{
    d_phi, double_gradient, dpsi_jacobian, psi, pullback, pullback_covector, DoubleObservable,
    DoublePoint, InvariantHamiltonian,
};
use crate::phase_space::{moment_map, poisson_bracket, PhasePoint};
use crate::words::{DoubleLetter, Part, Word};

pub use crate::phase_space::TangentVector;

/// A conjugation-invariant trace word on the double.
pub type InvariantWord = Word<DoubleLetter>;

/// Isotropy data of a phase-space point, at Lie-algebra level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StratumLabel {
    pub regular_j: bool,
    /// Joint centralizer of `{g, J}` is trivial.
    pub in_m_star: bool,
    /// `J` and `J̃` regular and joint centralizer of `{J̃, J}` trivial.
    pub in_m_star_star: bool,
    pub regular_moment: bool,
}

pub fn classify(x: &PhasePoint, tol: &ToleranceConfig) -> Result<StratumLabel> {
    let j_tilde = x.j_tilde();
    let regular_j = is_regular(x.j(), tol);
    let (dim_gj, _) = joint_centralizer(&[Constraint::Group(x.g()), Constraint::Algebra(x.j())], tol)?;
    let (dim_psi, _) =
        joint_centralizer(&[Constraint::Algebra(&j_tilde), Constraint::Algebra(x.j())], tol)?;
    let in_m_star = dim_gj == 0;
    let in_m_star_star = regular_j && is_regular(&j_tilde, tol) && dim_psi == 0;
    let label = StratumLabel {
        regular_j,
        in_m_star,
        in_m_star_star,
        regular_moment: is_regular(&moment_map(x), tol),
    };
    // anything commuting with g and J commutes with g⁻¹Jg
    debug_assert!(!label.in_m_star_star || (label.in_m_star && label.regular_j));
    Ok(label)
}

/// Infinitesimal generators of the conjugation action at `x`, one per basis
/// element `Y`: `(Y − gYg⁻¹, [Y, J])`.
pub fn gauge_directions(ctx: &GroupContext, x: &PhasePoint) -> Vec<TangentVector> {
    ctx.basis()
        .iter()
        .map(|y| TangentVector {
            a: y - &adjoint_unchecked(x.g(), y),
            b: bracket_unchecked(y, x.j()),
        })
        .collect()
}

/// The directions `(X_i, 0)` of the free flows at `x`, with `{X_i}` an
/// orthonormal basis of the centralizer of `J`. Requires `J` regular.
pub fn hamiltonian_directions(
    ctx: &GroupContext,
    x: &PhasePoint,
    tol: &ToleranceConfig,
) -> Result<Vec<TangentVector>> {
    let dirs = flow_directions(ctx, x, tol);
    if dirs.len() != ctx.rank_r() {
        return Err(crate::Error::Precondition(format!(
            "momentum is not regular: centralizer has dimension {} instead of {}",
            dirs.len(),
            ctx.rank_r()
        )));
    }
    Ok(dirs)
}

fn flow_directions(ctx: &GroupContext, x: &PhasePoint, tol: &ToleranceConfig) -> Vec<TangentVector> {
    let zero = AlgebraElement::zero(ctx.n());
    centralizer_basis(ctx, x.j(), tol)
        .into_iter()
        .map(|a| TangentVector { a, b: zero.clone() })
        .collect()
}

/// Dimension of the image of a family of tangent vectors on the quotient,
/// `rank([V; W]) − rank(W)`, with both rank reports.
#[derive(Debug, Clone, Serialize)]
pub struct SpanReport {
    pub span: usize,
    pub combined: RankReport,
    pub gauge: RankReport,
}

pub fn quotient_span(
    ctx: &GroupContext,
    vectors: &[TangentVector],
    gauge: &[TangentVector],
    tol: &ToleranceConfig,
) -> SpanReport {
    let width = 2 * ctx.dim_g();
    let gauge_rows: Vec<Vec<f64>> = gauge.iter().map(|v| v.flatten(ctx)).collect();
    let mut rows: Vec<Vec<f64>> = vectors.iter().map(|v| v.flatten(ctx)).collect();
    rows.extend(gauge_rows.iter().cloned());
    let combined = numerical_rank(&stack_rows(&rows, width), tol.tau_rank);
    let gauge = numerical_rank(&stack_rows(&gauge_rows, width), tol.tau_rank);
    SpanReport { span: combined.rank.saturating_sub(gauge.rank), combined, gauge }
}

/// Dimension of the span of the free-flow vector fields on the quotient.
/// On non-regular `J` the full centralizer is used instead of failing.
pub fn reduced_hamiltonian_span(x: &PhasePoint, tol: &ToleranceConfig) -> Result<SpanReport> {
    let ctx = GroupContext::new(x.size())?;
    let dirs = flow_directions(&ctx, x, tol);
    Ok(quotient_span(&ctx, &dirs, &gauge_directions(&ctx, x), tol))
}

/// Reduce a word to a canonical representative under cyclic rotation and
/// reversal. For anti-Hermitian letters `tr(reverse(w)) = ±conj tr(w)`, so
/// both real parts of a reversed word are already covered.
fn canonical(word: &[bool]) -> Vec<bool> {
    let rotations = |w: &[bool]| -> Vec<bool> {
        (0..w.len())
            .map(|s| w[s..].iter().chain(&w[..s]).copied().collect::<Vec<_>>())
            .min()
            .expect("nonempty word")
    };
    let reversed: Vec<bool> = word.iter().rev().copied().collect();
    rotations(word).min(rotations(&reversed))
}

/// All trace words in `X, Y` of length `1..=max_len`, deduplicated modulo
/// rotation and reversal, each with both `Re` and `Im` parts. The order is
/// deterministic: by length, then lexicographically with `X < Y`.
pub fn word_generators(max_len: usize) -> Vec<InvariantWord> {
    let mut out = Vec::new();
    for len in 1..=max_len {
        let mut seen = std::collections::BTreeSet::new();
        for mask in 0u64..(1u64 << len) {
            // bit set means Y; most significant letter first
            let w: Vec<bool> = (0..len).rev().map(|b| mask >> b & 1 == 1).collect();
            seen.insert(canonical(&w));
        }
        for w in seen {
            let letters: Vec<DoubleLetter> =
                w.iter().map(|&y| if y { DoubleLetter::Y } else { DoubleLetter::X }).collect();
            for part in [Part::Re, Part::Im] {
                out.push(Word::new(letters.clone(), part, 1.0).expect("nonempty"));
            }
        }
    }
    out
}

fn covector_rank(rows: &[Vec<f64>], width: usize, tol: &ToleranceConfig) -> RankReport {
    numerical_rank(&stack_rows(rows, width), tol.tau_rank)
}

/// Differentials `d(P∘Ψ)(x)` for each generator, as covector rows.
pub fn constants_covectors(ctx: &GroupContext, x: &PhasePoint, gens: &[InvariantWord]) -> Vec<Vec<f64>> {
    let jac = dpsi_jacobian(ctx, x);
    gens.iter()
        .map(|w| pullback_covector(ctx, &DoubleObservable::single(w.clone()), x, &jac))
        .collect()
}

/// Rank of the span of the differentials of the pulled-back invariants.
pub fn reduced_constants_span(
    x: &PhasePoint,
    gens: &[InvariantWord],
    tol: &ToleranceConfig,
) -> Result<RankReport> {
    let ctx = GroupContext::new(x.size())?;
    Ok(covector_rank(&constants_covectors(&ctx, x, gens), 2 * ctx.dim_g(), tol))
}

/// Rank of the constants span for every word length `1..=max_len`.
#[derive(Debug, Clone, Serialize)]
pub struct PlateauSweep {
    /// `(max_len, generator count, rank)` per length.
    pub ranks: Vec<(usize, usize, usize)>,
    /// Shortest length at which the final rank is reached.
    pub plateau_len: usize,
    pub plateau_rank: usize,
}

pub fn constants_span_sweep(x: &PhasePoint, max_len: usize, tol: &ToleranceConfig) -> Result<PlateauSweep> {
    let ctx = GroupContext::new(x.size())?;
    let all = word_generators(max_len);
    let rows = constants_covectors(&ctx, x, &all);
    let mut ranks = Vec::with_capacity(max_len);
    for len in 1..=max_len {
        let count = all.iter().take_while(|w| w.len() <= len).count();
        let rank = covector_rank(&rows[..count], 2 * ctx.dim_g(), tol).rank;
        ranks.push((len, count, rank));
    }
    let plateau_rank = ranks.last().map(|r| r.2).unwrap_or(0);
    let plateau_len = ranks.iter().find(|r| r.2 == plateau_rank).map(|r| r.0).unwrap_or(0);
    Ok(PlateauSweep { ranks, plateau_len, plateau_rank })
}

/// Whether the Hamiltonian differentials `d(C_k∘π₂)` lie in the span of the
/// constants' differentials: returns `(rank of constants, rank with the
/// Hamiltonians appended)`; containment means the two agree.
pub fn hamiltonians_in_constants(
    x: &PhasePoint,
    gens: &[InvariantWord],
    tol: &ToleranceConfig,
) -> Result<(usize, usize)> {
    let ctx = GroupContext::new(x.size())?;
    let mut rows = constants_covectors(&ctx, x, gens);
    let base = covector_rank(&rows, 2 * ctx.dim_g(), tol).rank;
    for h in InvariantHamiltonian::generators(&ctx) {
        rows.push(crate::phase_space::differential_unchecked(&h.observable(), x).flatten(&ctx));
    }
    Ok((base, covector_rank(&rows, 2 * ctx.dim_g(), tol).rank))
}

/// `|{C_k∘π₂, P∘Ψ}(x)|`.
pub fn centrality_check(x: &PhasePoint, k: usize, p: &InvariantWord) -> Result<f64> {
    let h = InvariantHamiltonian::new(k)?;
    let f = pullback(&DoubleObservable::single(p.clone()));
    Ok(poisson_bracket(&h.observable(), &f, x)?.abs())
}

/// Covector of `C_k ∘ Φ` at `x` by the chain rule through
/// `DΦ(a, b) = b − g⁻¹([J, a] + b) g`.
pub fn moment_casimir_covector(ctx: &GroupContext, x: &PhasePoint, h: &InvariantHamiltonian) -> Vec<f64> {
    let grad = d_phi(h, &moment_map(x));
    let conj = |m: &crate::linalg::CMat| x.g_inv() * m * x.g().mat();
    let mut row = Vec::with_capacity(2 * ctx.dim_g());
    for e in ctx.basis() {
        let d_phi_a = -conj(bracket_unchecked(x.j(), e).mat());
        row.push(frobenius_dot(grad.mat(), &d_phi_a));
    }
    for e in ctx.basis() {
        let d_phi_b = e.mat() - conj(e.mat());
        row.push(frobenius_dot(grad.mat(), &d_phi_b));
    }
    row
}

/// Rank of `{d(C_k∘Φ)(x)}_{k=2..n}` modulo gauge directions; `r` wherever
/// the moment value is regular.
pub fn leaf_codim_check(x: &PhasePoint, tol: &ToleranceConfig) -> Result<SpanReport> {
    let ctx = GroupContext::new(x.size())?;
    let width = 2 * ctx.dim_g();
    let gauge_rows: Vec<Vec<f64>> = gauge_directions(&ctx, x).iter().map(|v| v.flatten(&ctx)).collect();
    let mut rows: Vec<Vec<f64>> = InvariantHamiltonian::generators(&ctx)
        .iter()
        .map(|h| moment_casimir_covector(&ctx, x, h))
        .collect();
    rows.extend(gauge_rows.iter().cloned());
    let combined = numerical_rank(&stack_rows(&rows, width), tol.tau_rank);
    let gauge = numerical_rank(&stack_rows(&gauge_rows, width), tol.tau_rank);
    Ok(SpanReport { span: combined.rank.saturating_sub(gauge.rank), combined, gauge })
}

/// Span of invariant differentials on the double compared with the orbit
/// codimension.
#[derive(Debug, Clone, Serialize)]
pub struct DoubleSpanReport {
    pub rank: RankReport,
    pub orbit_dim: usize,
    /// `2·dim_g − orbit_dim`
    pub orbit_codim: usize,
}

pub fn invariant_span_double(
    z: &DoublePoint,
    gens: &[InvariantWord],
    tol: &ToleranceConfig,
) -> Result<DoubleSpanReport> {
    let ctx = GroupContext::new(z.size())?;
    let rows: Vec<Vec<f64>> = gens
        .iter()
        .map(|w| {
            let (gx, gy) = double_gradient(&DoubleObservable::single(w.clone()), z);
            let mut row: Vec<f64> = ctx.coords(&gx).iter().copied().collect();
            row.extend(ctx.coords(&gy).iter());
            row
        })
        .collect();
    let rank = covector_rank(&rows, 2 * ctx.dim_g(), tol);
    let (stab, _) = joint_centralizer(&[Constraint::Algebra(&z.x), Constraint::Algebra(&z.y)], tol)?;
    let orbit_dim = ctx.dim_g() - stab;
    Ok(DoubleSpanReport { rank, orbit_dim, orbit_codim: 2 * ctx.dim_g() - orbit_dim })
}

/// Compare `2r` with `dim(G) − r`: degenerate integrability requires the
/// number of Hamiltonians to be strictly below half the reduced dimension
/// of the leaves; equality means the system is merely Liouville integrable.
pub fn rank_deficiency(ctx: &GroupContext) -> std::cmp::Ordering {
    (2 * ctx.rank_r()).cmp(&(ctx.dim_g() - ctx.rank_r()))
}

/// Isotropy dimension of `Ψ(x)`, i.e. of the pair `{J̃, J}`.
pub fn psi_isotropy_dim(x: &PhasePoint, tol: &ToleranceConfig) -> Result<usize> {
    let z = psi(x);
    Ok(joint_centralizer(&[Constraint::Algebra(&z.x), Constraint::Algebra(&z.y)], tol)?.0)
}
