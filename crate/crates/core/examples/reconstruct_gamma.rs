//! Half-inverse reconstruction for the closed-form family
//! `sigma(x) = 2 gamma / (1 - gamma x) - gamma` with harmonic spectrum.
//!
//! cargo run --release --example reconstruct_gamma -- 0.5

use std::time::Instant;

use halfinv::oracle::{h_gamma, sigma_gamma};
use halfinv::{reconstruct, Primitive, ReconstructConfig, SpectralSequence};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let gamma: f64 = std::env::args().nth(1).map_or(Ok(0.5), |s| s.parse())?;
    let sigma0 = Primitive::example_gamma(gamma)?;
    let start = Instant::now();
    let result = reconstruct(&sigma0, &SpectralSequence::harmonic(), &ReconstructConfig::default());
    let elapsed = start.elapsed();
    let result = match result {
        Ok(r) => r,
        Err(e) => {
            println!("gamma = {gamma}: {e}");
            return Ok(());
        }
    };

    let err = result
        .sigma
        .map(|x, v| v - sigma_gamma(gamma, x).unwrap())
        .max_abs();
    println!("gamma = {gamma}, {} nodes, {:.2?}", result.sigma.grid().n_points(), elapsed);
    println!("max |sigma - sigma_gamma| = {err:.3e}");
    println!("h = {:.8} (exact {:.8})", result.h, h_gamma(gamma)?);
    println!("{:#?}", result.diagnostics);
    if let Some(l) = &result.roundtrip_lambdas {
        for (n, v) in l.iter().enumerate() {
            println!("lambda_{n} - pi n = {:+.3e}", v - std::f64::consts::PI * n as f64);
        }
    }
    Ok(())
}
