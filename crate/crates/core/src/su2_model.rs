//! The SU(2) reduction: a global gauge slice `(q, p, x)` on which the reduced
//! free motion becomes the two-particle trigonometric Sutherland model
//! `H = ½p² + x²/(8 sin²q)`.

use std::f64::consts::PI;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie_core::{joint_centralizer_dim, AlgebraElement, Constraint, GroupElement, ToleranceConfig};
use crate::linalg::{c, frobenius_norm, hermitian_eigen, CMat, C64};
use crate::master_system::{flow, InvariantHamiltonian};
use crate::phase_space::{act, central_difference, moment_map, PhasePoint};
use crate::reduction_lab::reduced_hamiltonian_span;

/// Coordinates on the gauge slice. `q ∈ (0, π)`, `x > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SliceCoords {
    pub q: f64,
    pub p: f64,
    pub x: f64,
}

impl SliceCoords {
    pub fn new(q: f64, p: f64, x: f64) -> Result<Self> {
        if !(q > 0.0 && q < PI) {
            return Err(Error::Domain(format!("q = {q} outside (0, π)")));
        }
        if !(x > 0.0) || !x.is_finite() || !p.is_finite() {
            return Err(Error::Domain(format!("need finite p and x > 0, got p = {p}, x = {x}")));
        }
        Ok(SliceCoords { q, p, x })
    }

    /// Largest coordinate difference.
    pub fn distance(&self, other: &SliceCoords) -> f64 {
        (self.q - other.q).abs().max((self.p - other.p).abs()).max((self.x - other.x).abs())
    }
}

fn e2iq(q: f64) -> C64 {
    C64::from_polar(1.0, 2.0 * q)
}

fn mat2(a: C64, b: C64, cc: C64, d: C64) -> CMat {
    CMat::from_row_slice(2, 2, &[a, b, cc, d])
}

/// The representative `(g, J)` of the orbit labelled by `c`.
pub fn slice_point(s: SliceCoords) -> Result<PhasePoint> {
    let s = SliceCoords::new(s.q, s.p, s.x)?;
    let g = GroupElement::from_diagonal_phases(&[s.q, -s.q])?;
    let ix = c(0.0, s.x);
    let j = mat2(
        c(0.0, s.p),
        ix / (e2iq(s.q) - c(1.0, 0.0)),
        ix / (e2iq(-s.q) - c(1.0, 0.0)),
        c(0.0, -s.p),
    );
    PhasePoint::new(g, AlgebraElement::with_tolerance(j, 1e-12)?)
}

/// `ix(E₁₂ + E₂₁)`, the moment value as commonly quoted for this slice.
pub fn printed_moment(x: f64) -> CMat {
    mat2(c(0.0, 0.0), c(0.0, x), c(0.0, x), c(0.0, 0.0))
}

/// The moment value actually attained on the slice,
/// `ix(e^{−2iq}E₁₂ + e^{2iq}E₂₁)`.
pub fn slice_moment(s: SliceCoords) -> CMat {
    let ix = c(0.0, s.x);
    mat2(c(0.0, 0.0), ix * e2iq(-s.q), ix * e2iq(s.q), c(0.0, 0.0))
}

/// `J̃ = g⁻¹Jg` in closed form.
pub fn printed_j_tilde(s: SliceCoords) -> CMat {
    let ix = c(0.0, s.x);
    let one = c(1.0, 0.0);
    mat2(
        c(0.0, s.p),
        ix * e2iq(-s.q) / (e2iq(s.q) - one),
        ix * e2iq(s.q) / (e2iq(-s.q) - one),
        c(0.0, -s.p),
    )
}

/// Residuals of the computed `Φ` and `J̃` against the closed forms.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PrintedMatch {
    pub moment_vs_printed: f64,
    pub moment_vs_slice_formula: f64,
    pub j_tilde: f64,
}

pub fn printed_match(s: SliceCoords) -> Result<PrintedMatch> {
    let y = slice_point(s)?;
    let phi = moment_map(&y);
    Ok(PrintedMatch {
        moment_vs_printed: frobenius_norm(&(phi.mat() - printed_moment(s.x))),
        moment_vs_slice_formula: frobenius_norm(&(phi.mat() - slice_moment(s))),
        j_tilde: frobenius_norm(&(y.j_tilde().mat() - printed_j_tilde(s))),
    })
}

pub fn sutherland_energy(s: SliceCoords) -> f64 {
    0.5 * s.p * s.p + s.x * s.x / (8.0 * s.q.sin().powi(2))
}

/// `−¼ Re tr(J²)`
pub fn trace_energy(y: &PhasePoint) -> f64 {
    let j = y.j().mat();
    -0.25 * (j * j).trace().re
}

/// The default slice grid: 39 values of `q`, 21 of `p` in `[−3, 3]` and five couplings.
#[derive(Debug, Clone, Serialize)]
pub struct SliceGrid {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub x: Vec<f64>,
}

impl Default for SliceGrid {
    fn default() -> Self {
        SliceGrid {
            q: (1..40).map(|k| k as f64 * PI / 40.0).collect(),
            p: (0..21).map(|k| -3.0 + 0.3 * k as f64).collect(),
            x: vec![0.5, 1.0, 2.0, 4.0, 8.0],
        }
    }
}

impl SliceGrid {
    /// `nq × np × nx` uniform grid over the interior of the slice.
    pub fn uniform(nq: usize, np: usize, xs: &[f64]) -> Self {
        SliceGrid {
            q: (1..=nq).map(|k| k as f64 * PI / (nq + 1) as f64).collect(),
            p: (0..np).map(|k| -3.0 + 6.0 * k as f64 / (np.max(2) - 1) as f64).collect(),
            x: xs.to_vec(),
        }
    }

    pub fn points(&self) -> Vec<SliceCoords> {
        let mut out = Vec::with_capacity(self.q.len() * self.p.len() * self.x.len());
        for &x in &self.x {
            for &q in &self.q {
                for &p in &self.p {
                    out.push(SliceCoords { q, p, x });
                }
            }
        }
        out
    }
}

/// Largest relative gap between `−¼ Re tr(J²)` and the Sutherland energy on
/// the grid, scaled by `max(1, H)`.
pub fn energy_identity_residual(grid: &SliceGrid) -> Result<f64> {
    let res: Result<Vec<f64>> = grid
        .points()
        .par_iter()
        .map(|&s| {
            let h = sutherland_energy(s);
            Ok((trace_energy(&slice_point(s)?) - h).abs() / h.max(1.0))
        })
        .collect();
    Ok(res?.into_iter().fold(0.0, f64::max))
}

/// Isotropy of `Ψ(y) = (J̃, J)` as a Lie algebra dimension.
pub fn psi_isotropy(s: SliceCoords, tol: &ToleranceConfig) -> Result<usize> {
    let y = slice_point(s)?;
    let jt = y.j_tilde();
    joint_centralizer_dim(&[Constraint::Algebra(&jt), Constraint::Algebra(y.j())], tol)
}

#[derive(Debug, Clone, Serialize)]
pub struct ExceptionalAudit {
    pub x: f64,
    pub isotropy_dim: usize,
    pub hamiltonian_span: usize,
    pub energy: f64,
    pub grid_min_energy: f64,
    pub is_grid_minimum: bool,
}

/// Audit of the point `(q, p) = (π/2, 0)`: isotropy, vanishing of the
/// reduced vector field and the minimum of the energy on the grid.
pub fn exceptional_point_audit(x_val: f64, tol: &ToleranceConfig) -> Result<ExceptionalAudit> {
    let s = SliceCoords::new(PI / 2.0, 0.0, x_val)?;
    let y = slice_point(s)?;
    let grid = SliceGrid { x: vec![x_val], ..SliceGrid::default() };
    let energy = sutherland_energy(s);
    let grid_min_energy = grid.points().into_iter().map(sutherland_energy).fold(f64::INFINITY, f64::min);
    Ok(ExceptionalAudit {
        x: x_val,
        isotropy_dim: psi_isotropy(s, tol)?,
        hamiltonian_span: reduced_hamiltonian_span(&y, tol)?.span,
        energy,
        grid_min_energy,
        is_grid_minimum: energy <= grid_min_energy,
    })
}

/// Gauge transformation `η` and slice coordinates with `act(η, y) = slice_point(c)`.
pub fn regauge_with(y: &PhasePoint, tol: &ToleranceConfig) -> Result<(GroupElement, SliceCoords)> {
    if y.size() != 2 {
        return Err(Error::Dimension { expected: 2, found: y.size() });
    }
    let g = y.g().mat();
    // −i(g − g†)/2 has eigenvalues ±sin q; the top one belongs to e^{iq}
    let h = (g - g.adjoint()) * c(0.0, -0.5);
    let (vals, vecs) = hermitian_eigen(&h);
    if vals[1] - vals[0] <= tol.tau_eig {
        return Err(Error::Gauge(format!("group element is central (eigenvalue gap {})", vals[1] - vals[0])));
    }
    let mut u = CMat::zeros(2, 2);
    u.set_column(0, &vecs.column(1));
    u.set_column(1, &vecs.column(0));
    let lam = (u.column(0).adjoint() * g * u.column(0))[(0, 0)];
    let q = lam.im.atan2(lam.re);
    let jd = u.adjoint() * y.j().mat() * &u;
    let w = jd[(0, 1)] * (e2iq(q) - c(1.0, 0.0)) / c(0.0, 1.0);
    let x = w.norm();
    if x <= tol.tau_struct {
        return Err(Error::Gauge("moment value vanishes".into()));
    }
    // diag(e^{iφ}, e^{−iφ}) multiplies the (1,2) entry by e^{2iφ}
    let phi = -0.5 * w.arg();
    let d = mat2(C64::from_polar(1.0, phi), c(0.0, 0.0), c(0.0, 0.0), C64::from_polar(1.0, -phi));
    let mut eta = d * u.adjoint();
    let det = eta.determinant();
    eta *= C64::from_polar(1.0, -0.5 * det.arg());
    let eta = GroupElement::with_tolerance(eta, 1e-10)?;
    let s = SliceCoords::new(q, jd[(0, 0)].im, x).map_err(|e| Error::Gauge(e.to_string()))?;
    let moved = act(&eta, y)?;
    let target = slice_point(s)?;
    let defect = frobenius_norm(&(moved.g().mat() - target.g().mat()))
        .max(frobenius_norm(&(moved.j().mat() - target.j().mat())));
    if defect > 1e-8 {
        return Err(Error::Gauge(format!("no gauge reaches the slice, defect {defect:.3e}")));
    }
    Ok((eta, s))
}

/// Slice coordinates of the orbit through `y`.
pub fn regauge_to_slice(y: &PhasePoint, tol: &ToleranceConfig) -> Result<SliceCoords> {
    regauge_with(y, tol).map(|(_, s)| s)
}

fn sutherland_rhs(x: f64, q: f64, p: f64) -> (f64, f64) {
    let sq = q.sin();
    (p, x * x * q.cos() / (4.0 * sq * sq * sq))
}

/// One classical Runge–Kutta step for the Sutherland equations.
pub fn rk4_step(x: f64, q: f64, p: f64, dt: f64) -> (f64, f64) {
    let (k1q, k1p) = sutherland_rhs(x, q, p);
    let (k2q, k2p) = sutherland_rhs(x, q + 0.5 * dt * k1q, p + 0.5 * dt * k1p);
    let (k3q, k3p) = sutherland_rhs(x, q + 0.5 * dt * k2q, p + 0.5 * dt * k2p);
    let (k4q, k4p) = sutherland_rhs(x, q + dt * k3q, p + dt * k3p);
    (
        q + dt / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q),
        p + dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
    )
}

/// Ratio between unreduced flow time of `C₂` and Sutherland time, from
/// `q̇ = p` at a generic slice point.
pub fn calibrate_time_scale(tol: &ToleranceConfig) -> Result<f64> {
    let s = SliceCoords::new(1.1, 0.7, 1.3)?;
    let y = slice_point(s)?;
    let c2 = InvariantHamiltonian::new(2)?;
    let h = 1e-4;
    let q_at = |t: f64| regauge_to_slice(&flow(&y, &c2, t), tol).map(|r| r.q).unwrap_or(f64::NAN);
    let dq = central_difference(q_at, h);
    if !dq.is_finite() || dq == 0.0 {
        return Err(Error::Gauge("time calibration left the slice".into()));
    }
    Ok(s.p / dq)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub q: f64,
    pub p: f64,
    pub q_oracle: f64,
    pub p_oracle: f64,
    pub energy: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DynamicsReport {
    pub start: SliceCoords,
    pub t_end: f64,
    pub steps: usize,
    /// Unreduced `C₂`-flow time per unit of Sutherland time.
    pub time_scale: f64,
    pub max_deviation: f64,
    pub oracle_energy_drift: f64,
    /// Sutherland time at which the trajectory left the slice, if it did.
    pub domain_exit: Option<f64>,
    pub samples: Vec<TrajectorySample>,
}

pub const TRAJECTORY_HEADER: &str = "t,q,p,q_oracle,p_oracle,energy,deviation";

impl DynamicsReport {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        for s in &self.samples {
            w.serialize(s).map_err(csv_err)?;
        }
        w.flush().map_err(|source| Error::Io { path: path.to_path_buf(), source })
    }
}

/// Exact free flow of `C₂` from the slice, gauged back at sample times and
/// compared with a fixed-step RK4 integration of the Sutherland equations.
pub fn reduced_dynamics(c0: SliceCoords, t_end: f64, steps: usize, tol: &ToleranceConfig) -> Result<DynamicsReport> {
    if !(t_end > 0.0) || steps == 0 {
        return Err(Error::Precondition(format!("need T > 0 and steps ≥ 1, got T = {t_end}, steps = {steps}")));
    }
    let y0 = slice_point(c0)?;
    let kappa = calibrate_time_scale(tol)?;
    let c2 = InvariantHamiltonian::new(2)?;
    let dt = t_end / steps as f64;
    let stride = (steps / 200).max(1);
    let e0 = sutherland_energy(c0);

    let mut oracle = Vec::with_capacity(steps / stride + 1);
    let (mut q, mut p) = (c0.q, c0.p);
    let mut drift = 0.0f64;
    for k in 0..=steps {
        if k % stride == 0 || k == steps {
            oracle.push((k as f64 * dt, q, p));
        }
        if k < steps {
            (q, p) = rk4_step(c0.x, q, p, dt);
            if q > 0.0 && q < PI {
                drift = drift.max((sutherland_energy(SliceCoords { q, p, x: c0.x }) - e0).abs());
            }
        }
    }

    let exact: Vec<Result<SliceCoords>> =
        oracle.par_iter().map(|&(t, _, _)| regauge_to_slice(&flow(&y0, &c2, kappa * t), tol)).collect();

    let mut samples = Vec::with_capacity(oracle.len());
    let mut domain_exit = None;
    let mut max_dev = 0.0f64;
    for (&(t, qo, po), s) in oracle.iter().zip(exact) {
        let s = match s {
            Ok(s) => s,
            Err(Error::Gauge(_)) => {
                domain_exit = Some(t);
                break;
            }
            Err(e) => return Err(e),
        };
        let deviation = (s.q - qo).abs().max((s.p - po).abs());
        max_dev = max_dev.max(deviation);
        samples.push(TrajectorySample {
            t,
            q: s.q,
            p: s.p,
            q_oracle: qo,
            p_oracle: po,
            energy: sutherland_energy(SliceCoords { q: qo, p: po, x: c0.x }),
            deviation,
        });
    }
    Ok(DynamicsReport {
        start: c0,
        t_end,
        steps,
        time_scale: kappa,
        max_deviation: max_dev,
        oracle_energy_drift: drift,
        domain_exit,
        samples,
    })
}

/// Maximum deviation between the gauged exact flow and the Sutherland oracle.
pub fn reduced_dynamics_match(c0: SliceCoords, t_end: f64, steps: usize, tol: &ToleranceConfig) -> Result<f64> {
    reduced_dynamics(c0, t_end, steps, tol).map(|r| r.max_deviation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_core::{GroupContext, Sampler};
    use crate::linalg::anti_hermitian_residual;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn random_coords(s: &mut Sampler) -> SliceCoords {
        SliceCoords::new(s.uniform(0.2, PI - 0.2), s.uniform(-2.0, 2.0), s.uniform(0.3, 3.0)).unwrap()
    }

    #[test]
    fn slice_point_at_quarter_turn() {
        let y = slice_point(SliceCoords::new(PI / 2.0, 0.0, 1.0).unwrap()).unwrap();
        assert!((y.g().mat()[(0, 0)] - c(0.0, 1.0)).norm() < 1e-15);
        assert!((y.g().mat()[(1, 1)] - c(0.0, -1.0)).norm() < 1e-15);
        // e^{iπ} − 1 = −2
        assert!((y.j().mat()[(0, 1)] - c(0.0, -0.5)).norm() < 1e-15);
        assert!((y.j().mat()[(1, 0)] - c(0.0, -0.5)).norm() < 1e-15);
        assert!(anti_hermitian_residual(y.j().mat()) < 1e-14);
    }

    #[test]
    fn slice_boundary_is_rejected() {
        assert!(slice_point(SliceCoords { q: 0.0, p: 0.0, x: 1.0 }).is_err());
        assert!(slice_point(SliceCoords { q: PI, p: 0.0, x: 1.0 }).is_err());
        assert!(SliceCoords::new(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn energy_examples() {
        assert!((sutherland_energy(SliceCoords::new(PI / 2.0, 0.0, 1.0).unwrap()) - 0.125).abs() < 1e-15);
        assert!((sutherland_energy(SliceCoords::new(PI / 4.0, 0.0, 2.0).unwrap()) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn energy_identity_on_grids() {
        assert!(energy_identity_residual(&SliceGrid::uniform(20, 20, &[0.5, 1.0, 2.0, 4.0, 8.0])).unwrap() < 1e-12);
        assert!(energy_identity_residual(&SliceGrid::default()).unwrap() < 1e-12);
    }

    #[test]
    fn closed_forms() {
        let mut s = Sampler::new(3);
        for _ in 0..20 {
            let m = printed_match(random_coords(&mut s)).unwrap();
            assert!(m.j_tilde < 1e-12);
            assert!(m.moment_vs_slice_formula < 1e-12);
        }
        // the two moment formulas agree only up to the residual torus
        let m = printed_match(SliceCoords::new(1.0, 0.3, 1.0).unwrap()).unwrap();
        assert!(m.moment_vs_printed > 0.1);
    }

    #[test]
    fn moment_is_conjugate_to_the_quoted_value() {
        let s = SliceCoords::new(0.8, -0.4, 1.7).unwrap();
        let eta = GroupElement::from_diagonal_phases(&[s.q, -s.q]).unwrap();
        let phi = moment_map(&slice_point(s).unwrap());
        let moved = eta.mat() * phi.mat() * eta.mat().adjoint();
        assert!(frobenius_norm(&(moved - printed_moment(s.x))) < 1e-12);
    }

    #[test]
    fn exceptional_point() {
        for (x, e) in [(1.0, 0.125), (2.0, 0.5)] {
            let a = exceptional_point_audit(x, &tol()).unwrap();
            assert_eq!((a.isotropy_dim, a.hamiltonian_span), (1, 0));
            assert!((a.energy - e).abs() < 1e-15);
            assert!(a.is_grid_minimum);
        }
        let mut s = Sampler::new(9);
        for _ in 0..20 {
            assert_eq!(psi_isotropy(random_coords(&mut s), &tol()).unwrap(), 0);
        }
        assert_eq!(psi_isotropy(SliceCoords::new(PI / 2.0, 0.1, 1.0).unwrap(), &tol()).unwrap(), 0);
        assert_eq!(psi_isotropy(SliceCoords::new(1.4, 0.0, 1.0).unwrap(), &tol()).unwrap(), 0);
    }

    #[test]
    fn regauge_round_trips() {
        let ctx = GroupContext::new(2).unwrap();
        let mut s = Sampler::new(11);
        for _ in 0..20 {
            let c0 = random_coords(&mut s);
            let y = slice_point(c0).unwrap();
            assert!(regauge_to_slice(&y, &tol()).unwrap().distance(&c0) < 1e-10);
            let eta = s.group(&ctx);
            let moved = act(&eta, &y).unwrap();
            let back = regauge_to_slice(&moved, &tol()).unwrap();
            assert!(back.distance(&c0) < 1e-10, "{back:?} vs {c0:?}");
            let (eta2, _) = regauge_with(&moved, &tol()).unwrap();
            let jd = act(&eta2, &moved).unwrap();
            assert!((jd.j().mat()[(0, 0)] * c(0.0, -1.0) - c(c0.p, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn regauge_rejects_central_or_zero_moment() {
        let y = PhasePoint::new(GroupElement::identity(2), AlgebraElement::from_diagonal_phases(&[1.0, -1.0]).unwrap())
            .unwrap();
        assert!(matches!(regauge_to_slice(&y, &tol()), Err(Error::Gauge(_))));
        let g = GroupElement::from_diagonal_phases(&[0.5, -0.5]).unwrap();
        let y = PhasePoint::new(g, AlgebraElement::from_diagonal_phases(&[1.0, -1.0]).unwrap()).unwrap();
        assert!(matches!(regauge_to_slice(&y, &tol()), Err(Error::Gauge(_))));
    }

    #[test]
    fn time_scale_is_a_half() {
        // q̇ = 2p along the C₂ flow with this inner product
        assert!((calibrate_time_scale(&tol()).unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn equilibrium_is_stationary() {
        let r = reduced_dynamics(SliceCoords::new(PI / 2.0, 0.0, 1.0).unwrap(), 2.0, 10_000, &tol()).unwrap();
        assert!(r.max_deviation < 1e-8, "{}", r.max_deviation);
        assert!(r.domain_exit.is_none());
    }

    #[test]
    fn dynamics_match_oracle() {
        let r = reduced_dynamics(SliceCoords::new(PI / 3.0, 0.0, 1.0).unwrap(), 2.0, 10_000, &tol()).unwrap();
        assert!(r.max_deviation < 1e-6, "{}", r.max_deviation);
        assert!(r.oracle_energy_drift < 1e-8);
        assert!(r.domain_exit.is_none());
        assert!(r.samples.len() > 100);
    }

    #[test]
    fn trajectory_csv() {
        let r = reduced_dynamics(SliceCoords::new(1.0, 0.2, 1.0).unwrap(), 0.5, 1000, &tol()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("traj.csv");
        r.write_csv(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().next().unwrap(), "t,q,p,q_oracle,p_oracle,energy,deviation");
        assert_eq!(text.lines().count(), r.samples.len() + 1);
    }
}
