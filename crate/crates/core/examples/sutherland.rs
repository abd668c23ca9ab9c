//! SU(2): the gauge slice, the Sutherland Hamiltonian and the reduced
//! dynamics of free motion compared with a direct integration.

use std::f64::consts::PI;

use redint::lie_core::{GroupContext, Sampler};
use redint::phase_space::act;
use redint::su2_model::*;

fn main() -> redint::Result<()> {
    let tol = Default::default();
    let c = SliceCoords::new(PI / 3.0, 0.4, 1.0)?;
    let y = slice_point(c)?;
    println!("g =\n{}J =\n{}", y.g().mat(), y.j().mat());
    println!("H = {:.12} = −¼ tr J² = {:.12}", sutherland_energy(c), trace_energy(&y));

    let eta = Sampler::new(1).group(&GroupContext::new(2)?);
    println!("regauged from a random conjugate: {:?}", regauge_to_slice(&act(&eta, &y)?, &tol)?);

    for x in [1.0, 2.0] {
        println!("{:?}", exceptional_point_audit(x, &tol)?);
    }

    let run = reduced_dynamics(SliceCoords::new(PI / 3.0, 0.0, 1.0)?, 2.0, 10_000, &tol)?;
    println!(
        "time scale {:.9}, max deviation {:.2e}, oracle drift {:.2e}",
        run.time_scale, run.max_deviation, run.oracle_energy_drift
    );
    let path = std::env::temp_dir().join("sutherland_trajectory.csv");
    run.write_csv(&path)?;
    println!("trajectory written to {}", path.display());
    Ok(())
}
