//! Sample points on leaves through the apposition torus and count how many
//! fall in the principal stratum. Purely exploratory.

use redint::apposition::explore_leaf_intersection;

fn main() -> redint::Result<()> {
    let tol = Default::default();
    for n in 2..=4 {
        let (hits, total) = explore_leaf_intersection(n, 200, 11, &tol)?;
        println!("SU({n}): {hits}/{total} sampled leaf points are principal");
    }
    Ok(())
}
