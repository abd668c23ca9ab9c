//! Acceptance suite: one PASS/FAIL line per criterion, sub-results indented.
//! Exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use redint::harness::{run_check, ExperimentConfig, ExperimentReport};
use redint::lie_core::{GroupContext, Sampler};
use redint::master_system::DoublePoint;
use redint::reduction_lab::{invariant_span_double, rank_deficiency, word_generators};
use redint::su2_model::{printed_match, SliceCoords};

struct Criterion {
    id: u32,
    title: &'static str,
    subs: Vec<(String, bool)>,
}

impl Criterion {
    fn new(id: u32, title: &'static str) -> Self {
        Criterion { id, title, subs: Vec::new() }
    }

    fn sub(&mut self, text: impl Into<String>, ok: bool) {
        self.subs.push((text.into(), ok));
    }

    fn report(&mut self, label: &str, r: &ExperimentReport, keys: &[&str]) {
        for k in keys {
            let v = r.observed.get(*k).copied().unwrap_or(f64::NAN);
            let e = &r.expected[*k];
            let rel = match e.relation {
                redint::harness::Relation::Eq => "=",
                redint::harness::Relation::Le => "≤",
                redint::harness::Relation::Ge => "≥",
            };
            self.sub(format!("{label} n={} {k}: {v:e} (want {rel} {:e})", r.n, e.value), e.holds(v));
        }
        self.sub(format!("{label} n={} report", r.n), r.pass);
    }

    fn passed(&self) -> bool {
        self.subs.iter().all(|s| s.1)
    }
}

fn cfg(n: usize, samples: usize) -> ExperimentConfig {
    ExperimentConfig { n, samples, seed: 20240101, ..Default::default() }
}

fn check(name: &str, n: usize, samples: usize) -> ExperimentReport {
    run_check(name, &cfg(n, samples)).unwrap_or_else(|e| panic!("{name} n={n}: {e}"))
}

fn bracket_axioms() -> Criterion {
    let mut c = Criterion::new(1, "bracket axioms");
    let t = Instant::now();
    for n in [2, 3] {
        let r = check("bracket-axioms", n, 100);
        c.report("bracket", &r, &["antisymmetry_max", "leibniz_max", "jacobi_max"]);
    }
    let secs = t.elapsed().as_secs_f64();
    c.sub(format!("runtime {secs:.2} s (want < 30 s)"), secs < 30.0);
    c
}

fn flow_invariance() -> Criterion {
    let mut c = Criterion::new(2, "constants of motion are conserved by every free flow");
    for n in [2, 3] {
        let r = run_check("flow-conservation", &ExperimentConfig { t_max: 10.0, ..cfg(n, 50) }).unwrap();
        c.report("flow", &r, &["psi_drift_max"]);
    }
    c
}

fn poisson_map() -> Criterion {
    let mut c = Criterion::new(3, "constants-of-motion map is Poisson");
    for n in [2, 3] {
        c.report("psi", &check("psi-poisson", n, 100), &["psi_poisson_defect_max"]);
    }
    c
}

fn dpsi_rank() -> Criterion {
    let mut c = Criterion::new(4, "rank of the constants-of-motion map");
    for n in [2, 3] {
        c.report("dpsi", &check("dpsi-rank", n, 50), &["rank_min", "rank_max", "rank_at_zero_momentum_max"]);
    }
    c
}

fn hamiltonian_span() -> Criterion {
    let mut c = Criterion::new(5, "reduced Hamiltonian span and deficit bound");
    for n in [2, 3] {
        c.report("ham", &check("reduced-ham-span", n, 50), &["span_min", "span_max", "deficit_bound_violations"]);
    }
    c
}

fn constants_span() -> Criterion {
    let mut c = Criterion::new(6, "reduced constants span, centrality and rank arithmetic");
    for (n, len) in [(2, 4), (3, 6)] {
        let r = run_check("reduced-const-span", &ExperimentConfig { max_word_len: Some(len), ..cfg(n, 50) }).unwrap();
        c.report("const", &r, &["span_min", "span_max", "rank_gap"]);
        c.report("centrality", &check("centrality", n, 50), &["centrality_max"]);
        let ord = rank_deficiency(&GroupContext::new(n).unwrap());
        let want = if n == 2 { std::cmp::Ordering::Equal } else { std::cmp::Ordering::Less };
        c.sub(format!("2r vs dim G − r at n={n}: {ord:?} (want {want:?})"), ord == want);
    }
    c
}

fn leaf_codim() -> Criterion {
    let mut c = Criterion::new(7, "symplectic leaves have codimension r");
    for n in [2, 3] {
        c.report("leaf", &check("leaf-codim", n, 50), &["codim_min", "codim_max"]);
    }
    c
}

fn invariant_span() -> Criterion {
    let mut c = Criterion::new(8, "invariant span on the double equals orbit codimension");
    for n in [2, 3] {
        let r = check("invariant-span-double", n, 50);
        c.report("double", &r, &["generic_rank_min", "generic_rank_max", "generic_codim_mismatches"]);
    }
    // diagonal degenerate case (X, X), X regular in su(2): stated value 4
    let ctx = GroupContext::new(2).unwrap();
    let x = Sampler::new(8).algebra(&ctx);
    let z = DoublePoint::new(x.clone(), x).unwrap();
    let rep = invariant_span_double(&z, &word_generators(4), &Default::default()).unwrap();
    c.sub(
        format!("diagonal n=2: rank {} (want 4 = 2·dim G − orbit dim {})", rep.rank.rank, rep.orbit_dim),
        rep.rank.rank == 4,
    );
    c
}

fn apposition() -> Criterion {
    let mut c = Criterion::new(9, "torus in apposition and the moment equation");
    for n in 2..=5 {
        c.report("frame", &check("apposition", n, 1), &["cross_gram_max", "stacked_rank"]);
        c.report("moment", &check("moment-equation", n, 50), &["residual_max", "isotropy_max"]);
    }
    c
}

fn su2() -> Criterion {
    let mut c = Criterion::new(10, "SU(2) slice and the Sutherland model");
    let r = check("su2-energy", 2, 50);
    c.report("energy", &r, &["energy_identity_max", "j_tilde_max"]);
    let mut s = Sampler::new(10);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let sc = SliceCoords::new(s.uniform(0.05, PI - 0.05), s.uniform(-3.0, 3.0), s.uniform(0.5, 8.0)).unwrap();
        worst = worst.max(printed_match(sc).unwrap().moment_vs_printed);
    }
    c.sub(format!("Φ vs ix(E₁₂ + E₂₁): {worst:e} (want ≤ 1e-12)"), worst <= 1e-12);
    let r = check("su2-exceptional", 2, 50);
    c.report(
        "exceptional",
        &r,
        &["isotropy_x1", "isotropy_x2", "isotropy_off_minimum_max", "hamiltonian_span_x1", "grid_minimum_x1"],
    );
    let r = run_check("su2-dynamics", &ExperimentConfig { t_max: 2.0, ..cfg(2, 5) }).unwrap();
    c.report("dynamics", &r, &["deviation_max", "equilibrium_deviation"]);
    c.sub(format!("dynamics steps {}", r.observed["steps"]), r.observed["steps"] >= 1e4);
    c
}

fn main() {
    let start = Instant::now();
    let suite: [fn() -> Criterion; 10] = [
        bracket_axioms,
        flow_invariance,
        poisson_map,
        dpsi_rank,
        hamiltonian_span,
        constants_span,
        leaf_codim,
        invariant_span,
        apposition,
        su2,
    ];
    let mut failed = 0;
    for f in suite {
        let mut c = f();
        let ok = c.passed();
        println!("{} [{:>2}] {}", if ok { "PASS" } else { "FAIL" }, c.id, c.title);
        for (text, sub_ok) in &c.subs {
            if !ok || !sub_ok {
                println!("       {} {text}", if *sub_ok { "ok  " } else { "FAIL" });
            }
        }
        if !ok {
            failed += 1;
        }
        c.subs.clear();
    }
    let secs = start.elapsed().as_secs_f64();
    println!("{} [--] total runtime {secs:.1} s (want < 300 s)", if secs < 300.0 { "PASS" } else { "FAIL" });
    println!("{failed} of 10 criteria failed");
    if failed > 0 || secs >= 300.0 {
        std::process::exit(1);
    }
}
