//! Eigenvalues and norming constants of the closed-form operator, and the
//! observed convergence order of the shooting solver.
//!
//! cargo run --release --example forward_spectrum

use std::f64::consts::PI;

use halfinv::forward::{eigenenergies_with, EigenOptions};
use halfinv::oracle::h_gamma;
use halfinv::{eigensystem, BoundaryParam, GridSpec, Primitive};

fn main() -> Result<(), halfinv::Error> {
    let gamma = 0.5;
    let sigma = Primitive::example_gamma(gamma)?;
    let bc = BoundaryParam::Robin(h_gamma(gamma)?);

    let sys = eigensystem(&sigma, bc, 8, &GridSpec::unit(1025)?)?;
    println!(" n  lambda_n            lambda_n - pi n   alpha_n");
    for (n, (l, a)) in sys.lambdas.iter().zip(&sys.alphas).enumerate() {
        println!("{n:2}  {l:.12}  {:+.3e}        {a:.10}", l - PI * n as f64);
    }

    // lambda_0 = 0 here, where lambda = sqrt(E) converges at half the order of E
    println!("\nstep 1/256 -> 1/512, errors in E_n = lambda_n^2 and in lambda_n:");
    let opts = EigenOptions {
        tolerance: 1e-14,
        ..Default::default()
    };
    let coarse = eigenenergies_with(&sigma, bc, 6, &GridSpec::unit(257)?, &opts)?;
    let fine = eigenenergies_with(&sigma, bc, 6, &GridSpec::unit(513)?, &opts)?;
    let signed_sqrt = |e: f64| e.signum() * e.abs().sqrt();
    for n in 0..6 {
        let exact = PI * n as f64;
        let (gc, gf) = (coarse[n] - exact * exact, fine[n] - exact * exact);
        let (ec, ef) = (signed_sqrt(coarse[n]) - exact, signed_sqrt(fine[n]) - exact);
        println!(
            "{n:2}  E: {gc:+.3e} -> {gf:+.3e} (ratio {:5.2})   lambda: {ec:+.3e} -> {ef:+.3e} (ratio {:5.2})",
            gc / gf,
            ec / ef
        );
    }
    Ok(())
}
