//! A primitive with a jump: `sigma_0` is a step, so the potential on the left
//! half is a delta. Only pointwise values of `sigma` enter, so the forward
//! solver, the collocation kernel and the reconstruction all run unchanged.
//!
//! cargo run --release --example singular_step -- 0.3

use halfinv::{
    eigenvalues, reconstruct, BoundaryParam, GridSpec, KernelMethod, Primitive,
    ReconstructConfig, SampledFunction, SpectralSequence,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let jump: f64 = std::env::args().nth(1).map_or(Ok(0.3), |s| s.parse())?;
    let half = GridSpec::new(129, 0.0, 0.5)?;
    let sigma0 = Primitive::sampled(SampledFunction::from_fn(half, |x| {
        if x < 0.25 {
            0.0
        } else {
            jump
        }
    }));

    // a jump makes beta_n decay like 1/n, so the default (head + 8) is too short
    let config = ReconstructConfig {
        kernel: KernelMethod::Collocation,
        truncation: Some(64),
        ..Default::default()
    };
    let result = match reconstruct(&sigma0, &SpectralSequence::harmonic(), &config) {
        Ok(r) => r,
        Err(e) => {
            println!("jump = {jump}: {e}");
            return Ok(());
        }
    };
    println!("jump = {jump}: alpha_0 = {:.6}, h = {:.6}", result.report.alpha.at(0), result.h);
    for x in [0.0, 0.2, 0.3, 0.5, 0.6, 0.75, 0.9, 1.0] {
        println!("sigma({x:.2}) = {:+.6}", result.sigma.eval(x));
    }

    // the recovered operator should again have lambda_n = pi n
    let grid = GridSpec::unit(2049)?;
    let full = Primitive::sampled(result.sigma.resample(grid));
    let l = eigenvalues(&full, BoundaryParam::Robin(result.h), 8, &grid)?;
    for (n, v) in l.iter().enumerate() {
        println!("lambda_{n} - pi n = {:+.3e}", v - std::f64::consts::PI * n as f64);
    }
    println!("{:#?}", result.diagnostics);
    Ok(())
}
