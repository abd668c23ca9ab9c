//! Trace-word observables on T*SU(3) and their canonical Poisson brackets.

use redint::lie_core::{GroupContext, Sampler};
use redint::phase_space::{
    antisymmetry_defect, grad1, grad2, jacobi_defect, leibniz_defect, poisson_bracket, Observable, PhasePoint,
};

fn main() -> redint::Result<()> {
    let ctx = GroupContext::new(3)?;
    let mut rng = Sampler::new(2024);
    let x = PhasePoint::new(rng.group(&ctx), rng.algebra(&ctx))?;

    let f: Observable = "Re tr(G J) + 0.5 * Im tr(G G Ginv J)".parse()?;
    let g: Observable = "Re tr(Ginv J J)".parse()?;
    let h: Observable = "-1 * Re tr(J J)".parse()?;

    println!("F = {}", f.to_expr()?);
    println!("|grad1 F| = {:.6}", grad1(&f, &x)?.norm());
    println!("|grad2 F| = {:.6}", grad2(&f, &x)?.norm());
    println!("{{F, G}} = {:+.12}", poisson_bracket(&f, &g, &x)?);
    println!("{{F, H}} = {:+.12}", poisson_bracket(&f, &h, &x)?);

    println!("antisymmetry defect {:.2e}", antisymmetry_defect(&f, &g, &x)?);
    println!("Leibniz defect      {:.2e}", leibniz_defect(&f, &g, &h, &x, 1e-3)?);
    println!("Jacobi defect       {:.2e}", jacobi_defect(&f, &g, &h, &x, 1e-3)?);
    Ok(())
}
