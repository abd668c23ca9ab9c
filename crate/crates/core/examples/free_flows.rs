//! Free motion generated by the invariant functions C_k(J), and the map
//! Ψ(g, J) = (g⁻¹Jg, J) that is constant along all of these flows.

use redint::lie_core::{GroupContext, Sampler};
use redint::master_system::{dpsi_rank, flow, psi, InvariantHamiltonian};
use redint::phase_space::PhasePoint;

fn main() -> redint::Result<()> {
    let tol = Default::default();
    for n in [2, 3] {
        let ctx = GroupContext::new(n)?;
        let mut rng = Sampler::new(n as u64);
        let x0 = PhasePoint::new(rng.group(&ctx), rng.algebra(&ctx))?;
        let z0 = psi(&x0);
        println!("SU({n}): dim M = {}, rank DΨ = {}", ctx.dim_m(), dpsi_rank(&x0, &tol)?.rank);
        for h in InvariantHamiltonian::generators(&ctx) {
            let mut worst = 0.0f64;
            for step in 0..=10 {
                let t = step as f64;
                worst = worst.max(psi(&flow(&x0, &h, t)).distance(&z0));
            }
            let moved = flow(&x0, &h, 10.0);
            let dg = (moved.g().mat() - x0.g().mat()).norm();
            println!("  C_{}: |g(10) − g(0)| = {dg:.3}, max |Ψ(t) − Ψ(0)| = {worst:.2e}", h.degree());
        }
    }
    Ok(())
}
