//! Full pipeline on a smooth potential: compute the spectrum of a known `q`,
//! hide the right half, and recover it from the left half plus the spectrum.
//!
//! cargo run --release --example half_inverse_roundtrip

use std::f64::consts::PI;

use halfinv::forward::EigenOptions;
use halfinv::{
    eigenvalues_with, reconstruct, BoundaryParam, GridSpec, Primitive, ReconstructConfig,
    SampledFunction, SpectralSequence, Tail,
};

const H: f64 = -0.3;

fn q(x: f64) -> f64 {
    0.3 * (2.0 * PI * x).cos() + 0.2 * (PI * x).sin() - 0.4 * x
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fine = GridSpec::unit(16385)?;
    let sigma = Primitive::antiderivative_of(SampledFunction::from_fn(fine, q))?;
    let opts = EigenOptions {
        tolerance: 1e-13,
        ..Default::default()
    };
    let count = 48;
    let lambdas = eigenvalues_with(&sigma, BoundaryParam::Robin(H), count, &fine, &opts)?;
    // lambda_n ~ pi n + c / n beyond the computed head
    let c = (count - 1) as f64 * (lambdas[count - 1] - PI * (count - 1) as f64);
    println!("lambda_0 = {:.8}, Coulomb constant c = {c:.6}", lambdas[0]);
    let spectrum = SpectralSequence::new(lambdas, Tail::Coulomb(c))?;

    let sigma0 = Primitive::antiderivative_of(SampledFunction::from_fn(
        GridSpec::new(1025, 0.0, 0.5)?,
        q,
    ))?;
    let result = reconstruct(&sigma0, &spectrum, &ReconstructConfig::default())?;
    let err = result.sigma.map(|x, v| v - sigma.eval(x));
    println!("max |sigma - sigma_true| = {:.3e}", err.max_abs());
    println!("h = {:.8} (true {H})", result.h);
    for x in [0.5, 0.625, 0.75, 0.875, 1.0] {
        println!("sigma({x:.3}) = {:+.8}  true {:+.8}", result.sigma.eval(x), sigma.eval(x));
    }
    println!("{:#?}", result.diagnostics);
    Ok(())
}
