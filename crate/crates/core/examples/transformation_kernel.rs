//! Transformation kernel of the half problem by both methods, and the mixed
//! data `phi_0` built from it.
//!
//! cargo run --release --example transformation_kernel

use std::f64::consts::PI;

use halfinv::transform::default_collocation_frequencies;
use halfinv::{collocation_kernel, goursat_kernel, phi0, GridSpec, Primitive, SampledFunction};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let half = GridSpec::new(129, 0.0, 0.5)?;
    let q0 = SampledFunction::from_fn(half.refined(2), |x| {
        0.8 * (2.0 * PI * x).cos() - 0.3 * (6.0 * PI * x).sin()
    });
    let sigma0 = Primitive::antiderivative_of(q0.clone())?;

    let goursat = goursat_kernel(&q0, &half)?;
    let colloc = collocation_kernel(&sigma0, &half, default_collocation_frequencies(&half))?;
    println!("sup |l_goursat - l_colloc| = {:.3e}", goursat.sup_distance(&colloc));

    // l(x, x) = -sigma_0(x) / 2
    let diag = goursat
        .diagonal()
        .iter()
        .zip(half.nodes())
        .map(|(l, x)| (l + 0.5 * sigma0.eval(x)).abs())
        .fold(0.0, f64::max);
    println!("max |l(x,x) + sigma_0(x)/2| = {diag:.3e}");

    let phi = phi0(&sigma0, &goursat)?;
    println!("||phi_0||_2 = {:.6}, bound ||q0||_2 / 2 = {:.6}", phi.l2_norm(), q0.l2_norm() / 2.0);
    for x in [0.0, 0.25, 0.5, 0.75, 1.0] {
        println!("phi_0({x:.2}) = {:+.6}", phi.eval(x));
    }
    Ok(())
}
