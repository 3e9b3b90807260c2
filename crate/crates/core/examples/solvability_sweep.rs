//! Membership test across the solvability boundary of the closed-form family:
//! `alpha_0 = (1 - gamma) / 2` crosses zero at `gamma = 1`.
//!
//! cargo run --release --example solvability_sweep

use halfinv::basis::default_truncation;
use halfinv::glm::{mixed_data, KernelMethod};
use halfinv::{membership_check, Primitive, SpectralSequence};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spectrum = SpectralSequence::harmonic();
    let m = default_truncation(&spectrum);
    println!("{:>6} {:>10} {:>10} {:>9} {:>9}", "gamma", "alpha_0", "exact", "solvable", "marginal");
    for k in 0..=15 {
        let gamma = 0.1 * k as f64;
        let sigma0 = Primitive::example_gamma(gamma)?;
        let (phi, _, _) = mixed_data(&sigma0, 257, KernelMethod::Auto)?;
        let r = membership_check(&phi, &spectrum, m)?;
        println!(
            "{gamma:>6.2} {:>10.6} {:>10.6} {:>9} {:>9}",
            r.alpha.at(0),
            (1.0 - gamma) / 2.0,
            r.solvable,
            r.marginal
        );
    }
    Ok(())
}
