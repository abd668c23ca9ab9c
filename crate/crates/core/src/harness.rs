//! Named, seeded, reproducible checks with JSON reports.
//!
//! Every check draws its random inputs from per-sample streams of the master
//! seed, so a report depends only on the check name and the configuration.
//! Samples run in parallel and are merged in sample order.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::apposition::{
    build_frame, moment_residual, random_regular_torus, random_regular_tprime, solution_isotropy,
    solve_moment_equation,
};
use crate::error::{Error, Result};
use crate::lie_core::{is_regular, AlgebraElement, GroupContext, GroupElement, Sampler, ToleranceConfig};
use crate::linalg::{frobenius_dot, frobenius_norm, numerical_rank, stack_rows};
use crate::master_system::{
    dpsi_jacobian, dpsi_jacobian_fd, dpsi_rank, verify_psi_flow_invariance, verify_psi_poisson, DoubleObservable,
    DoublePoint, InvariantHamiltonian,
};
use crate::phase_space::{act, antisymmetry_defect, jacobi_defect, leibniz_defect, random_observable, PhasePoint};
use crate::reduction_lab::{
    centrality_check, classify, constants_span_sweep, hamiltonians_in_constants, invariant_span_double,
    leaf_codim_check, psi_isotropy_dim, reduced_hamiltonian_span, word_generators, InvariantWord,
};
use crate::su2_model::{
    energy_identity_residual, exceptional_point_audit, printed_match, psi_isotropy, reduced_dynamics, slice_point,
    sutherland_energy, SliceCoords, SliceGrid,
};

/// Environment variable that may supply the seed instead of `--seed`.
pub const SEED_ENV: &str = "REDINT_SEED";

/// Registered check names, in execution order.
pub const CHECKS: [&str; 15] = [
    "bracket-axioms",
    "psi-poisson",
    "flow-conservation",
    "dpsi-rank",
    "strata-census",
    "reduced-ham-span",
    "reduced-const-span",
    "centrality",
    "leaf-codim",
    "invariant-span-double",
    "apposition",
    "moment-equation",
    "su2-energy",
    "su2-exceptional",
    "su2-dynamics",
];

/// Checks with plottable output.
pub const PLOTS: [&str; 2] = ["su2-dynamics", "reduced-const-span"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    pub seed: u64,
    pub samples: usize,
    /// Longest trace word; defaults to 4 for `n = 2` and 6 otherwise.
    pub max_word_len: Option<usize>,
    pub tolerances: ToleranceConfig,
    pub t_max: f64,
    pub output_path: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n: 2,
            seed: 0,
            samples: 50,
            max_word_len: None,
            tolerances: ToleranceConfig::default(),
            t_max: 10.0,
            output_path: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config(format!("n must be at least 2, got {}", self.n)));
        }
        if self.samples < 1 {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        if let Some(l) = self.max_word_len {
            if l < 2 {
                return Err(Error::Config(format!("max_word_len must be at least 2, got {l}")));
            }
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(Error::Config(format!("t_max must be positive and finite, got {}", self.t_max)));
        }
        self.tolerances.validate().map_err(|e| Error::Config(e.to_string()))
    }

    pub fn word_len(&self) -> usize {
        self.max_word_len.unwrap_or(if self.n == 2 { 4 } else { 6 })
    }
}

/// Values given on the command line; each one overrides the config file.
#[derive(Debug, Clone, Default)]
pub struct ConfigOverrides {
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub max_word_len: Option<usize>,
    pub t_max: Option<f64>,
    pub out: Option<PathBuf>,
}

/// Merge defaults, an optional JSON config file, flags and the seed
/// environment variable. Supplying the seed both through the environment
/// and through a flag or the file is a configuration error.
pub fn resolve_config(
    file: Option<&Path>,
    overrides: &ConfigOverrides,
    env_seed: Option<&str>,
) -> Result<ExperimentConfig> {
    let (mut cfg, file_has_seed) = match file {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            let value: serde_json::Value =
                serde_json::from_str(&text).map_err(|source| Error::Json { path: path.to_path_buf(), source })?;
            let has_seed = value.get("seed").is_some();
            let cfg = serde_json::from_value(value).map_err(|source| Error::Json { path: path.to_path_buf(), source })?;
            (cfg, has_seed)
        }
        None => (ExperimentConfig::default(), false),
    };
    if let Some(raw) = env_seed {
        if overrides.seed.is_some() || file_has_seed {
            return Err(Error::Config(format!("{SEED_ENV} is set and a seed was also given explicitly")));
        }
        cfg.seed = raw
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{SEED_ENV}={raw:?} is not an unsigned 64-bit integer")))?;
    }
    if let Some(v) = overrides.n {
        cfg.n = v;
    }
    if let Some(v) = overrides.seed {
        cfg.seed = v;
    }
    if let Some(v) = overrides.samples {
        cfg.samples = v;
    }
    if let Some(v) = overrides.max_word_len {
        cfg.max_word_len = Some(v);
    }
    if let Some(v) = overrides.t_max {
        cfg.t_max = v;
    }
    if let Some(v) = &overrides.out {
        cfg.output_path = Some(v.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Eq,
    Le,
    Ge,
}

/// An expected value together with where the expectation comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub relation: Relation,
    pub value: f64,
    pub provenance: String,
}

impl Expectation {
    pub fn holds(&self, observed: f64) -> bool {
        match self.relation {
            Relation::Eq => observed == self.value,
            Relation::Le => observed <= self.value,
            Relation::Ge => observed >= self.value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub check_name: String,
    pub n: usize,
    pub seed: u64,
    pub samples: usize,
    pub pass: bool,
    pub observed: BTreeMap<String, f64>,
    pub expected: BTreeMap<String, Expectation>,
    pub wall_time_ms: u64,
}

impl ExperimentReport {
    /// Names of expectations that are not met.
    pub fn failures(&self) -> Vec<&str> {
        self.expected
            .iter()
            .filter(|(k, e)| !self.observed.get(*k).is_some_and(|&v| e.holds(v)))
            .map(|(k, _)| k.as_str())
            .collect()
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports contain only plain data")
    }
}

#[derive(Default)]
struct Recorder {
    observed: BTreeMap<String, f64>,
    expected: BTreeMap<String, Expectation>,
}

impl Recorder {
    fn observe(&mut self, key: &str, value: f64) {
        self.observed.insert(key.to_string(), value);
    }

    fn check(&mut self, key: &str, value: f64, relation: Relation, bound: f64, provenance: &str) {
        self.observe(key, value);
        self.expected
            .insert(key.to_string(), Expectation { relation, value: bound, provenance: provenance.to_string() });
    }

    fn finish(self, name: &str, cfg: &ExperimentConfig, start: Instant) -> ExperimentReport {
        let mut report = ExperimentReport {
            check_name: name.to_string(),
            n: cfg.n,
            seed: cfg.seed,
            samples: cfg.samples,
            pass: false,
            observed: self.observed,
            expected: self.expected,
            wall_time_ms: start.elapsed().as_millis() as u64,
        };
        report.pass = report.failures().is_empty();
        report
    }
}

fn per_sample<T: Send>(
    cfg: &ExperimentConfig,
    count: usize,
    f: impl Fn(&mut Sampler) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    (0..count as u64)
        .into_par_iter()
        .map(|i| f(&mut Sampler::for_sample(cfg.seed, i)))
        .collect()
}

fn max(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

fn min_max(xs: &[usize]) -> (f64, f64) {
    let lo = xs.iter().copied().min().map_or(f64::NAN, |v| v as f64);
    let hi = xs.iter().copied().max().map_or(f64::NAN, |v| v as f64);
    (lo, hi)
}

fn random_point(ctx: &GroupContext, s: &mut Sampler) -> PhasePoint {
    PhasePoint::new(s.group(ctx), s.algebra(ctx)).expect("sizes agree")
}

fn random_invariant(s: &mut Sampler, gens: &[InvariantWord], terms: usize) -> DoubleObservable {
    let words = (0..terms)
        .map(|_| {
            let idx = (s.uniform(0.0, gens.len() as f64) as usize).min(gens.len() - 1);
            gens[idx].scaled(s.normal())
        })
        .collect();
    DoubleObservable::new(words)
}

/// A point of the torus-in-apposition family: `g` in the regular diagonal
/// torus, `J` solving the moment equation for a regular `ζ ∈ 𝒯′`.
fn apposition_point(ctx: &GroupContext, s: &mut Sampler, tol: &ToleranceConfig) -> Result<PhasePoint> {
    let frame = build_frame(ctx.n(), tol)?;
    let g = random_regular_torus(ctx, s, tol);
    let zeta = random_regular_tprime(&frame, s, tol);
    let j = solve_moment_equation(&g, &zeta, tol)?;
    PhasePoint::new(g, j)
}

/// Run one registered check.
pub fn run_check(name: &str, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let start = Instant::now();
    let mut rec = Recorder::default();
    let ctx = GroupContext::new(cfg.n)?;
    let tol = cfg.tolerances;
    let (dim_g, r) = (ctx.dim_g(), ctx.rank_r());
    let samples = cfg.samples;
    use Relation::*;

    match name {
        "bracket-axioms" => {
            let rows = per_sample(cfg, samples, |s| {
                let x = random_point(&ctx, s);
                let f = random_observable(s, 4, 2);
                let g = random_observable(s, 4, 2);
                let h = random_observable(s, 4, 2);
                Ok((
                    antisymmetry_defect(&f, &g, &x)?,
                    leibniz_defect(&f, &g, &h, &x, 1e-3)?,
                    jacobi_defect(&f, &g, &h, &x, 1e-3)?,
                ))
            })?;
            rec.check("antisymmetry_max", max(rows.iter().map(|r| r.0)), Le, 1e-14, "algebraic antisymmetry");
            rec.check(
                "leibniz_max",
                max(rows.iter().map(|r| r.1)),
                Le,
                1e-9,
                "product rule; derivative of the product along the Hamiltonian field",
            );
            rec.check(
                "jacobi_max",
                max(rows.iter().map(|r| r.2)),
                Le,
                1e-6,
                "Jacobi identity; inner bracket differentiated along exact Hamiltonian fields",
            );
        }
        "psi-poisson" => {
            let gens = word_generators(cfg.word_len().min(4));
            let defects = per_sample(cfg, samples, |s| {
                let x = random_point(&ctx, s);
                let f = random_invariant(s, &gens, 2);
                let h = random_invariant(s, &gens, 2);
                verify_psi_poisson(&f, &h, &x)
            })?;
            rec.check(
                "psi_poisson_defect_max",
                max(defects),
                Le,
                1e-8,
                "the constants-of-motion map intertwines the canonical bracket with the opposite-sign product Lie-Poisson bracket",
            );
        }
        "flow-conservation" => {
            let grid: Vec<f64> = (0..=20).map(|k| cfg.t_max * k as f64 / 20.0).collect();
            let drift = per_sample(cfg, samples, |s| {
                let x = random_point(&ctx, s);
                Ok(max(InvariantHamiltonian::generators(&ctx).iter().map(|h| verify_psi_flow_invariance(&x, h, &grid))))
            })?;
            rec.observe("t_max", cfg.t_max);
            rec.check(
                "psi_drift_max",
                max(drift),
                Le,
                1e-10,
                "the constants-of-motion map is constant along every invariant free flow",
            );
        }
        "dpsi-rank" => {
            let rows = per_sample(cfg, samples, |s| {
                let x = random_point(&ctx, s);
                let regular = is_regular(x.j(), &tol);
                let rank = dpsi_rank(&x, &tol)?.rank;
                let gap = (dpsi_jacobian(&ctx, &x) - dpsi_jacobian_fd(&ctx, &x, tol.h_fd)).amax();
                let x0 = PhasePoint::new(s.group(&ctx), AlgebraElement::zero(ctx.n()))?;
                Ok((regular, rank, gap, dpsi_rank(&x0, &tol)?.rank))
            })?;
            let ranks: Vec<usize> = rows.iter().filter(|r| r.0).map(|r| r.1).collect();
            let (lo, hi) = min_max(&ranks);
            let want = (2 * dim_g - r) as f64;
            let prov = "rank of the constants-of-motion map on regular momenta is dim M − rank G";
            rec.observe("regular_points", ranks.len() as f64);
            rec.check("rank_min", lo, Eq, want, prov);
            rec.check("rank_max", hi, Eq, want, prov);
            rec.check(
                "rank_at_zero_momentum_max",
                max(rows.iter().map(|r| r.3 as f64)),
                Eq,
                dim_g as f64,
                "at J = 0 only the momentum directions survive",
            );
            rec.check(
                "jacobian_fd_gap",
                max(rows.iter().map(|r| r.2)),
                Le,
                tol.tau_fd,
                "finite-difference Jacobian oracle",
            );
        }
        "strata-census" => {
            let rows = per_sample(cfg, samples, |s| {
                let x = random_point(&ctx, s);
                let label = classify(&x, &tol)?;
                let moved = classify(&act(&s.group(&ctx), &x)?, &tol)?;
                Ok((label, moved))
            })?;
            let pp = rows.iter().filter(|r| r.0.in_m_star_star).count() as f64 / samples as f64;
            rec.check(
                "m_star_star_fraction",
                pp,
                Eq,
                1.0,
                "the principal stratum is dense and open, so random points land in it",
            );
            rec.check(
                "containment_violations",
                rows.iter().filter(|r| r.0.in_m_star_star && !(r.0.in_m_star && r.0.regular_j)).count() as f64,
                Eq,
                0.0,
                "the principal stratum lies inside the free stratum",
            );
            rec.check(
                "gauge_mismatches",
                rows.iter().filter(|r| r.0 != r.1).count() as f64,
                Eq,
                0.0,
                "strata are unions of orbits",
            );
            let mut s = Sampler::for_sample(cfg.seed, u64::MAX);
            let ap = apposition_point(&ctx, &mut s, &tol)?;
            rec.check(
                "apposition_pair_free",
                classify(&ap, &tol)?.in_m_star as u8 as f64,
                Eq,
                1.0,
                "regular torus element with moment in the apposition torus has trivial isotropy",
            );
            let central = PhasePoint::new(GroupElement::identity(ctx.n()), s.algebra(&ctx))?;
            rec.check(
                "identity_point_free",
                classify(&central, &tol)?.in_m_star as u8 as f64,
                Eq,
                0.0,
                "at g = 1 the isotropy contains the centralizer of J",
            );
        }
        "reduced-ham-span" => {
            let rows = per_sample(cfg, samples, |s| {
                let x = random_point(&ctx, s);
                let label = classify(&x, &tol)?;
                let span = reduced_hamiltonian_span(&x, &tol)?.span;
                Ok((label, span, psi_isotropy_dim(&x, &tol)?))
            })?;
            let spans: Vec<usize> = rows.iter().filter(|r| r.0.in_m_star_star).map(|r| r.1).collect();
            let (lo, hi) = min_max(&spans);
            let prov = "the free Hamiltonian flows span an r-dimensional subspace on the principal stratum";
            rec.observe("principal_points", spans.len() as f64);
            rec.check("span_min", lo, Eq, r as f64, prov);
            rec.check("span_max", hi, Eq, r as f64, prov);

            let mut extra: Vec<PhasePoint> = Vec::new();
            let mut s = Sampler::for_sample(cfg.seed, u64::MAX);
            extra.push(apposition_point(&ctx, &mut s, &tol)?);
            if ctx.n() == 2 {
                let exceptional = slice_point(SliceCoords::new(PI / 2.0, 0.0, 1.0)?)?;
                let span = reduced_hamiltonian_span(&exceptional, &tol)?.span;
                rec.check(
                    "exceptional_deficit",
                    (r - span.min(r)) as f64,
                    Eq,
                    1.0,
                    "the free vector field vanishes on the quotient at the SU(2) energy minimum",
                );
                extra.push(exceptional);
            }
            let mut checked = 0usize;
            let mut violations = 0usize;
            let extra_rows: Result<Vec<_>> = extra
                .iter()
                .map(|x| {
                    Ok((classify(x, &tol)?, reduced_hamiltonian_span(x, &tol)?.span, psi_isotropy_dim(x, &tol)?))
                })
                .collect();
            for (label, span, iso) in rows.iter().cloned().chain(extra_rows?) {
                if label.regular_j && label.in_m_star {
                    checked += 1;
                    if r.saturating_sub(span) > iso {
                        violations += 1;
                    }
                }
            }
            rec.observe("deficit_bound_points", checked as f64);
            rec.check(
                "deficit_bound_violations",
                violations as f64,
                Eq,
                0.0,
                "span deficit is bounded by the isotropy of the constants-of-motion value",
            );
        }
        "reduced-const-span" => {
            let len = cfg.word_len();
            let gens = word_generators(len);
            let rows = per_sample(cfg, samples, |s| {
                let x = random_point(&ctx, s);
                if !classify(&x, &tol)?.in_m_star_star {
                    return Ok(None);
                }
                let sweep = constants_span_sweep(&x, len, &tol)?;
                let monotone = sweep.ranks.windows(2).all(|w| w[0].2 <= w[1].2);
                let (base, with_h) = hamiltonians_in_constants(&x, &gens, &tol)?;
                Ok(Some((sweep.plateau_rank, sweep.plateau_len, monotone, base == with_h)))
            })?;
            let rows: Vec<_> = rows.into_iter().flatten().collect();
            let ranks: Vec<usize> = rows.iter().map(|r| r.0).collect();
            let (lo, hi) = min_max(&ranks);
            let want = (dim_g - r) as f64;
            let prov = "the reduced constants of motion have functional dimension dim G − rank G";
            rec.observe("max_word_len", len as f64);
            rec.observe("principal_points", rows.len() as f64);
            rec.observe("plateau_len_max", rows.iter().map(|r| r.1).max().unwrap_or(0) as f64);
            rec.check("span_min", lo, Eq, want, prov);
            rec.check("span_max", hi, Eq, want, prov);
            rec.check(
                "monotonicity_violations",
                rows.iter().filter(|r| !r.2).count() as f64,
                Eq,
                0.0,
                "adding generators cannot lower the rank",
            );
            rec.check(
                "hamiltonians_outside_constants",
                rows.iter().filter(|r| !r.3).count() as f64,
                Eq,
                0.0,
                "the Hamiltonians are themselves constants of motion",
            );
            let gap = 2.0 * r as f64 - want;
            if ctx.n() == 2 {
                rec.check("rank_gap", gap, Eq, 0.0, "rank one gives only Liouville integrability");
            } else {
                rec.check("rank_gap", gap, Le, -1.0, "degenerate integrability needs r < (dim G − r)/2");
            }
        }
        "centrality" => {
            let gens = word_generators(cfg.word_len().min(4));
            let defects = per_sample(cfg, samples, |s| {
                let x = random_point(&ctx, s);
                let mut worst = 0.0f64;
                for k in 2..=ctx.n() {
                    for p in &gens {
                        worst = worst.max(centrality_check(&x, k, p)?);
                    }
                }
                Ok(worst)
            })?;
            rec.observe("generators", gens.len() as f64);
            rec.check(
                "centrality_max",
                max(defects),
                Le,
                1e-8,
                "the Hamiltonians Poisson-commute with every constant of motion",
            );
        }
        "leaf-codim" => {
            let rows = per_sample(cfg, samples, |s| {
                let x = random_point(&ctx, s);
                let label = classify(&x, &tol)?;
                if !(label.regular_moment && label.in_m_star) {
                    return Ok(None);
                }
                Ok(Some(leaf_codim_check(&x, &tol)?.span))
            })?;
            let spans: Vec<usize> = rows.into_iter().flatten().collect();
            let (lo, hi) = min_max(&spans);
            let prov = "Casimirs of the moment map are independent, so leaves have codimension r";
            rec.observe("regular_moment_points", spans.len() as f64);
            rec.check("codim_min", lo, Eq, r as f64, prov);
            rec.check("codim_max", hi, Eq, r as f64, prov);
            let mut s = Sampler::for_sample(cfg.seed, u64::MAX);
            let zero = PhasePoint::new(GroupElement::identity(ctx.n()), s.algebra(&ctx))?;
            rec.check(
                "codim_at_zero_moment",
                leaf_codim_check(&zero, &tol)?.span as f64,
                Eq,
                0.0,
                "homogeneous Casimirs have vanishing differential at zero",
            );
        }
        "invariant-span-double" => {
            let gens = word_generators(cfg.word_len());
            let rows = per_sample(cfg, samples, |s| {
                let z = DoublePoint::new(s.algebra(&ctx), s.algebra(&ctx))?;
                let rep = invariant_span_double(&z, &gens, &tol)?;
                Ok((rep.rank.rank, rep.orbit_codim))
            })?;
            let ranks: Vec<usize> = rows.iter().map(|r| r.0).collect();
            let (lo, hi) = min_max(&ranks);
            rec.check(
                "generic_codim_mismatches",
                rows.iter().filter(|r| r.0 != r.1).count() as f64,
                Eq,
                0.0,
                "invariants separate orbits generically: span equals orbit codimension",
            );
            rec.check("generic_rank_min", lo, Eq, dim_g as f64, "free orbits in the double have codimension dim G");
            rec.check("generic_rank_max", hi, Eq, dim_g as f64, "free orbits in the double have codimension dim G");
            let mut s = Sampler::for_sample(cfg.seed, u64::MAX);
            let x = s.algebra(&ctx);
            let diag = invariant_span_double(&DoublePoint::new(x.clone(), x.clone())?, &gens, &tol)?;
            rec.observe("diagonal_rank", diag.rank.rank as f64);
            rec.observe("diagonal_orbit_codim", diag.orbit_codim as f64);
            if ctx.n() == 2 {
                // tr X², tr Y², tr XY generate the invariants of su(2) × su(2)
                let zero = AlgebraElement::zero(2);
                let rows: Vec<Vec<f64>> = [(&x * 2.0, zero.clone()), (zero, &x * 2.0), (x.clone(), x.clone())]
                    .iter()
                    .map(|(a, b)| ctx.coords(a).iter().chain(ctx.coords(b).iter()).copied().collect())
                    .collect();
                let oracle = numerical_rank(&stack_rows(&rows, 2 * dim_g), tol.tau_rank).rank;
                rec.check(
                    "diagonal_rank_vs_oracle",
                    diag.rank.rank as f64,
                    Eq,
                    oracle as f64,
                    "differentials of the three quadratic generators at (X, X)",
                );
            }
            let origin = DoublePoint::new(AlgebraElement::zero(ctx.n()), AlgebraElement::zero(ctx.n()))?;
            rec.check(
                "rank_at_origin",
                invariant_span_double(&origin, &gens, &tol)?.rank.rank as f64,
                Eq,
                0.0,
                "homogeneous generators of degree at least two are critical at zero",
            );
        }
        "apposition" => {
            let cert = build_frame(ctx.n(), &tol)?.certify();
            let rr = r as f64;
            rec.check("lambda_unitarity", cert.lambda_unitarity, Le, 1e-12, "the cyclic element is unitary");
            rec.check("lambda_det_defect", cert.lambda_det_defect, Le, 1e-12, "the scale constant makes det = 1");
            rec.check("lambda_min_eigen_gap", cert.lambda_min_eigen_gap, Ge, 1e-8, "the cyclic element is regular");
            rec.check("t_dim", cert.t_dim as f64, Eq, rr, "maximal torus dimension");
            rec.check("tprime_dim", cert.tprime_dim as f64, Eq, rr, "centralizer of a regular element is a torus");
            rec.check("cross_gram_max", cert.cross_gram_max, Le, 1e-12, "the two tori are orthogonal");
            rec.check("tprime_orthonormality", cert.tprime_orthonormality, Le, 1e-12, "orthonormal basis");
            rec.check("tprime_fixed_defect", cert.tprime_fixed_defect, Le, 1e-12, "basis is fixed by the cyclic element");
            rec.check("stacked_rank", cert.stacked_rank as f64, Eq, 2.0 * rr, "the two tori meet only in zero");
        }
        "moment-equation" => {
            let frame = build_frame(ctx.n(), &tol)?;
            let rows = per_sample(cfg, samples, |s| {
                let g = random_regular_torus(&ctx, s, &tol);
                let zeta = random_regular_tprime(&frame, s, &tol);
                let j = solve_moment_equation(&g, &zeta, &tol)?;
                let res = moment_residual(&g, &j, &zeta);
                let kernel = max(frame.t_basis().iter().map(|u| frobenius_dot(u.mat(), j.mat()).abs()));
                let shifted = &j + &(&frame.t_basis()[0] * s.normal());
                let witness = (moment_residual(&g, &shifted, &zeta) - res).abs();
                Ok((res, solution_isotropy(&g, &j, &tol)?, kernel, witness))
            })?;
            rec.check(
                "residual_max",
                max(rows.iter().map(|r| r.0)),
                Le,
                1e-10,
                "every regular orbit meets the apposition torus",
            );
            rec.check(
                "isotropy_max",
                max(rows.iter().map(|r| r.1 as f64)),
                Eq,
                0.0,
                "solutions have trivial isotropy",
            );
            rec.check(
                "kernel_component_max",
                max(rows.iter().map(|r| r.2)),
                Le,
                1e-10,
                "minimal-norm representative is orthogonal to the kernel",
            );
            rec.check(
                "nonuniqueness_residual_change",
                max(rows.iter().map(|r| r.3)),
                Le,
                1e-12,
                "shifts along the diagonal torus also solve the equation",
            );
            let g = GroupElement::from_diagonal_phases(&frame_phases(ctx.n()))?;
            let j0 = solve_moment_equation(&g, &AlgebraElement::zero(ctx.n()), &tol)?;
            rec.check("zero_rhs_norm", j0.norm(), Le, 1e-14, "minimal-norm solution of the homogeneous equation");
        }
        "su2-energy" => {
            rec.check(
                "energy_identity_max",
                energy_identity_residual(&SliceGrid::default())?,
                Le,
                1e-12,
                "Sutherland energy equals −¼ tr J² on the slice",
            );
            rec.check(
                "energy_quarter_turn_x1",
                (sutherland_energy(SliceCoords::new(PI / 2.0, 0.0, 1.0)?) - 0.125).abs(),
                Le,
                1e-14,
                "closed-form energy 1/8",
            );
            rec.check(
                "energy_eighth_turn_x2",
                (sutherland_energy(SliceCoords::new(PI / 4.0, 0.0, 2.0)?) - 1.0).abs(),
                Le,
                1e-14,
                "closed-form energy 1",
            );
            let rows = per_sample(cfg, samples, |s| {
                let c = SliceCoords::new(s.uniform(0.05, PI - 0.05), s.uniform(-3.0, 3.0), s.uniform(0.5, 8.0))?;
                let m = printed_match(c)?;
                let phi = crate::phase_space::moment_map(&slice_point(c)?);
                let eta = GroupElement::from_diagonal_phases(&[c.q, -c.q])?;
                let rotated = eta.mat() * phi.mat() * eta.mat().adjoint();
                let conj = frobenius_norm(&(rotated - crate::su2_model::printed_moment(c.x)));
                Ok((m, conj))
            })?;
            rec.check(
                "j_tilde_max",
                max(rows.iter().map(|r| r.0.j_tilde)),
                Le,
                1e-12,
                "closed form of g⁻¹Jg on the slice",
            );
            rec.check(
                "moment_formula_max",
                max(rows.iter().map(|r| r.0.moment_vs_slice_formula)),
                Le,
                1e-12,
                "Φ = ix(e^{−2iq}E₁₂ + e^{2iq}E₂₁) by direct multiplication",
            );
            rec.check(
                "moment_conjugate_to_quoted_max",
                max(rows.iter().map(|r| r.1)),
                Le,
                1e-12,
                "Φ is conjugate to ix(E₁₂ + E₂₁) by diag(e^{iq}, e^{−iq})",
            );
            rec.observe("moment_vs_quoted_max", max(rows.iter().map(|r| r.0.moment_vs_printed)));
        }
        "su2-exceptional" => {
            for (x, e) in [(1.0, 0.125), (2.0, 0.5)] {
                let a = exceptional_point_audit(x, &tol)?;
                let tag = if x == 1.0 { "x1" } else { "x2" };
                rec.check(
                    &format!("isotropy_{tag}"),
                    a.isotropy_dim as f64,
                    Eq,
                    1.0,
                    "at the energy minimum J and J̃ are proportional, isotropy is a maximal torus",
                );
                rec.check(
                    &format!("hamiltonian_span_{tag}"),
                    a.hamiltonian_span as f64,
                    Eq,
                    0.0,
                    "the free vector field projects to zero at the minimum",
                );
                rec.check(
                    &format!("energy_{tag}"),
                    (a.energy - e).abs(),
                    Le,
                    1e-15,
                    "energy x²/8 at the minimum",
                );
                rec.check(
                    &format!("grid_minimum_{tag}"),
                    a.is_grid_minimum as u8 as f64,
                    Eq,
                    1.0,
                    "global minimum of the Sutherland energy",
                );
            }
            let iso = per_sample(cfg, samples, |s| {
                let c = SliceCoords::new(s.uniform(0.1, PI - 0.1), s.uniform(-2.0, 2.0), s.uniform(0.3, 4.0))?;
                psi_isotropy(c, &tol)
            })?;
            rec.check(
                "isotropy_off_minimum_max",
                max(iso.iter().map(|&d| d as f64)),
                Eq,
                0.0,
                "away from the minimum the isotropy of (J̃, J) is central",
            );
            let label = classify(&slice_point(SliceCoords::new(PI / 2.0, 0.0, 1.0)?)?, &tol)?;
            rec.check("minimum_free", label.in_m_star as u8 as f64, Eq, 1.0, "slice points have central isotropy");
            rec.check(
                "minimum_principal",
                label.in_m_star_star as u8 as f64,
                Eq,
                0.0,
                "the minimum lies outside the principal stratum",
            );
        }
        "su2-dynamics" => {
            let steps = dynamics_steps(cfg.t_max);
            let eq = reduced_dynamics(SliceCoords::new(PI / 2.0, 0.0, 1.0)?, cfg.t_max, steps, &tol)?;
            rec.check(
                "equilibrium_deviation",
                eq.max_deviation,
                Le,
                1e-8,
                "the energy minimum is an equilibrium",
            );
            let mut starts = vec![SliceCoords::new(PI / 3.0, 0.0, 1.0)?];
            starts.extend(per_sample(cfg, samples.min(5), |s| {
                SliceCoords::new(s.uniform(0.4, PI - 0.4), s.uniform(-1.0, 1.0), s.uniform(0.5, 2.0))
            })?);
            let runs: Result<Vec<_>> = starts.par_iter().map(|&c| reduced_dynamics(c, cfg.t_max, steps, &tol)).collect();
            let runs = runs?;
            rec.observe("t_max", cfg.t_max);
            rec.observe("steps", steps as f64);
            rec.observe("time_scale", runs[0].time_scale);
            rec.check(
                "deviation_max",
                max(runs.iter().map(|r| r.max_deviation)),
                Le,
                1e-6,
                "gauged free motion solves the canonical Sutherland equations",
            );
            rec.check(
                "oracle_energy_drift_max",
                max(runs.iter().map(|r| r.oracle_energy_drift)),
                Le,
                1e-8,
                "energy conservation of the reference integrator",
            );
            rec.check(
                "domain_exits",
                runs.iter().filter(|r| r.domain_exit.is_some()).count() as f64,
                Eq,
                0.0,
                "the singular potential keeps trajectories inside the slice",
            );
        }
        other => return Err(unknown_check(other)),
    }
    Ok(rec.finish(name, cfg, start))
}

fn frame_phases(n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|k| 0.7 * (k as f64 + 1.0)).collect();
    let mean = v.iter().sum::<f64>() / n as f64;
    v.iter_mut().for_each(|t| *t -= mean);
    v
}

fn dynamics_steps(t_max: f64) -> usize {
    10_000usize.max((2000.0 * t_max).ceil() as usize)
}

fn unknown_check(name: &str) -> Error {
    Error::Usage(format!("unknown check {name:?}; known checks: {}", CHECKS.join(", ")))
}

/// Reports of every check for `n = 2` and `n = 3`, in order.
pub fn run_all(cfg: &ExperimentConfig) -> Result<Vec<ExperimentReport>> {
    let mut out = Vec::with_capacity(2 * CHECKS.len());
    for n in [2, 3] {
        let sub = ExperimentConfig { n, ..cfg.clone() };
        for name in CHECKS {
            out.push(run_check(name, &sub)?);
        }
    }
    Ok(out)
}

/// Write reports as newline-delimited JSON.
pub fn write_reports(path: &Path, reports: &[ExperimentReport]) -> Result<()> {
    let mut text = String::new();
    for r in reports {
        text.push_str(&r.to_json_line());
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

#[derive(Serialize)]
struct SweepRow {
    max_word_len: usize,
    generators: usize,
    rank: usize,
}

/// Write the CSV behind a plot: the SU(2) trajectory for `su2-dynamics`, the
/// rank-versus-word-length sweep at the first principal sample point for
/// `reduced-const-span`.
pub fn emit_plot_data(check: &str, cfg: &ExperimentConfig, path: &Path) -> Result<()> {
    cfg.validate()?;
    let tol = cfg.tolerances;
    match check {
        "su2-dynamics" => {
            let c0 = SliceCoords::new(PI / 3.0, 0.0, 1.0)?;
            reduced_dynamics(c0, cfg.t_max, dynamics_steps(cfg.t_max), &tol)?.write_csv(path)
        }
        "reduced-const-span" => {
            let ctx = GroupContext::new(cfg.n)?;
            let mut i = 0u64;
            let x = loop {
                let x = random_point(&ctx, &mut Sampler::for_sample(cfg.seed, i));
                if classify(&x, &tol)?.in_m_star_star {
                    break x;
                }
                i += 1;
                if i > 1000 {
                    return Err(Error::Precondition("no principal point found".into()));
                }
            };
            let sweep = constants_span_sweep(&x, cfg.word_len(), &tol)?;
            let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
            let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
            for &(max_word_len, generators, rank) in &sweep.ranks {
                w.serialize(SweepRow { max_word_len, generators, rank }).map_err(csv_err)?;
            }
            w.flush().map_err(|source| Error::Io { path: path.to_path_buf(), source })
        }
        other if CHECKS.contains(&other) => {
            Err(Error::Usage(format!("check {other:?} has no plot data; plottable: {}", PLOTS.join(", "))))
        }
        other => Err(unknown_check(other)),
    }
}

/// Process exit status for an error: 2 for configuration problems, 3 for
/// usage problems, 1 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Json { .. } => 2,
        Error::Usage(_) | Error::Parse(_) => 3,
        _ => 1,
    }
}
