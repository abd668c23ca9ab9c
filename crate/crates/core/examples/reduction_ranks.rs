//! Rank certificates for the reduced system, computed upstairs modulo the
//! gauge directions of the conjugation action.

use redint::lie_core::{GroupContext, Sampler};
use redint::master_system::DoublePoint;
use redint::phase_space::PhasePoint;
use redint::reduction_lab::{
    classify, constants_span_sweep, invariant_span_double, leaf_codim_check, rank_deficiency,
    reduced_hamiltonian_span, word_generators,
};

fn main() -> redint::Result<()> {
    let tol = Default::default();
    for (n, len) in [(2, 4), (3, 6)] {
        let ctx = GroupContext::new(n)?;
        let mut rng = Sampler::new(7);
        let x = PhasePoint::new(rng.group(&ctx), rng.algebra(&ctx))?;
        println!("SU({n}) at a random point: {:?}", classify(&x, &tol)?);
        println!("  Hamiltonian span on the quotient: {}", reduced_hamiltonian_span(&x, &tol)?.span);
        let sweep = constants_span_sweep(&x, len, &tol)?;
        for (l, count, rank) in &sweep.ranks {
            println!("  words up to length {l}: {count:>3} generators, rank {rank}");
        }
        println!("  plateau {} reached at length {}", sweep.plateau_rank, sweep.plateau_len);
        println!("  leaf codimension: {}", leaf_codim_check(&x, &tol)?.span);
        println!("  2r vs dim G − r: {:?}", rank_deficiency(&ctx));

        let z = DoublePoint::new(rng.algebra(&ctx), rng.algebra(&ctx))?;
        let rep = invariant_span_double(&z, &word_generators(len), &tol)?;
        println!("  invariants on g × g: rank {} vs orbit codimension {}", rep.rank.rank, rep.orbit_codim);
    }
    Ok(())
}
