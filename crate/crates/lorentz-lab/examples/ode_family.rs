//! Shooting for the conjectured general-p limit density: a family of slopes
//! around the critical one, the recovered constants, and validation against
//! the two closed-form cases.
//!
//! Run with: cargo run --release --example ode_family

use lorentz_lab::ode::{
    conjecture_density, energy_constraint_residual, figure1_family, find_critical_slope,
};

fn main() -> lorentz_lab::Result<()> {
    // the family picture: sub/super trajectories around c_{1,2} = 2
    let c = find_critical_slope(1.0, 2.0, (0.25, 4.0), 1e-8)?;
    println!("p=1, q=2: c = {:.8} (exact 2)", c.c_pq);
    for sol in figure1_family(1.0, 2.0, &[1.0, 1.5, 2.0, 2.5, 3.0]) {
        let sol = sol?;
        println!(
            "  slope {:.1}: {:?}, terminal G = {:.6}, support radius = {:.4}",
            sol.initial_slope,
            sol.classification,
            sol.terminal().g,
            sol.support_radius
        );
    }

    // Gaussian case p = q = 2: c = sqrt(2/pi), infinite support
    let c22 = find_critical_slope(2.0, 2.0, (0.25, 4.0), 1e-8)?;
    println!(
        "p=2, q=2: c = {:.8} (exact {:.8})",
        c22.c_pq,
        (2.0 / std::f64::consts::PI).sqrt()
    );

    // a genuinely new point of the conjecture
    let d = conjecture_density(1.5, 3.0)?;
    println!(
        "p=1.5, q=3: c = {:.8}, support radius = {:.5}, mass = {:.8}, energy residual = {:.2e}",
        d.critical.c_pq,
        d.critical.solution.support_radius,
        d.mass(),
        energy_constraint_residual(&d.critical.solution)
    );
    Ok(())
}
