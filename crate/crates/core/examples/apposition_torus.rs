//! The maximal torus in apposition and the moment equation J − g⁻¹Jg = ζ.

use redint::apposition::{
    build_frame, moment_residual, random_regular_torus, random_regular_tprime, solution_isotropy, solve_moment_equation,
};
use redint::lie_core::{GroupContext, Sampler};

fn main() -> redint::Result<()> {
    let tol = Default::default();
    for n in 2..=5 {
        let frame = build_frame(n, &tol)?;
        let cert = frame.certify();
        println!(
            "n = {n}: dim T' = {}, cross Gram {:.1e}, stacked rank {}, certified {}",
            cert.tprime_dim, cert.cross_gram_max, cert.stacked_rank, cert.passes()
        );
        let ctx = GroupContext::new(n)?;
        let mut rng = Sampler::new(n as u64);
        let g = random_regular_torus(&ctx, &mut rng, &tol);
        let zeta = random_regular_tprime(&frame, &mut rng, &tol);
        let j = solve_moment_equation(&g, &zeta, &tol)?;
        println!(
            "       residual {:.1e}, isotropy dim {}",
            moment_residual(&g, &j, &zeta),
            solution_isotropy(&g, &j, &tol)?
        );
    }
    println!("Λ_3 =\n{}", build_frame(3, &tol)?.lambda().mat());
    Ok(())
}
