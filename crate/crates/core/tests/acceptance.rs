//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use halfinv::basis::default_truncation;
use halfinv::forward::{eigenenergies_with, EigenOptions};
use halfinv::glm::{mixed_data, KernelMethod, ReconstructionResult};
use halfinv::oracle::{h_gamma, sigma_gamma, trig_defect, trig_defect_bound};
use halfinv::transform::default_collocation_frequencies;
use halfinv::{
    collocation_kernel, goursat_kernel, local_existence_check, membership_check, phi0,
    reconstruct, BoundaryParam, GridSpec, Primitive, ReconstructConfig, SpectralSequence, Tail,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(id: usize, name: &str, outcome: &Outcome) {
    let tag = if outcome.pass { "PASS" } else { "FAIL" };
    println!("[{tag}] {id}. {name}: {}", outcome.detail);
}

fn half_grid() -> GridSpec {
    GridSpec::new(129, 0.0, 0.5).unwrap()
}

fn criterion_1() -> (Outcome, Option<ReconstructionResult>) {
    let gamma = 0.5;
    let sigma0 = Primitive::example_gamma(gamma).unwrap();
    let start = Instant::now();
    let result = reconstruct(&sigma0, &SpectralSequence::harmonic(), &ReconstructConfig::default());
    let elapsed = start.elapsed().as_secs_f64();
    let r = match result {
        Ok(r) => r,
        Err(e) => {
            return (
                Outcome {
                    pass: false,
                    detail: format!("reconstruction failed: {e}"),
                },
                None,
            )
        }
    };
    let sigma_err = r
        .sigma
        .map(|x, v| v - sigma_gamma(gamma, x).unwrap())
        .max_abs();
    let h_err = (r.h - h_gamma(gamma).unwrap()).abs();
    let spec_err = r.diagnostics.roundtrip_spectrum_error.unwrap_or(f64::INFINITY);
    let count = r.roundtrip_lambdas.as_ref().map_or(0, |l| l.len());
    let pass = sigma_err <= 1e-3
        && h_err <= 1e-3
        && count >= 11
        && spec_err <= 1e-4
        && elapsed <= 10.0;
    (
        Outcome {
            pass,
            detail: format!(
                "max|sigma - sigma_gamma| = {sigma_err:.2e}, |h + 1/2| = {h_err:.2e}, \
                 max_(n<={}) |lambda_n - pi n| = {spec_err:.2e}, {elapsed:.2} s",
                count.saturating_sub(1)
            ),
        },
        Some(r),
    )
}

fn criterion_2() -> Outcome {
    let harmonic = SpectralSequence::harmonic();
    let m = default_truncation(&harmonic);
    let mut worst = 0.0f64;
    let mut verdicts_ok = true;
    let mut lines = Vec::new();
    for k in 0..8 {
        let gamma = 0.1 + 0.2 * k as f64;
        let sigma0 = Primitive::example_gamma(gamma).unwrap();
        match mixed_data(&sigma0, 257, KernelMethod::Auto)
            .and_then(|(phi, _, _)| membership_check(&phi, &harmonic, m))
        {
            Ok(r) => {
                let a0 = r.alpha.at(0);
                worst = worst.max((a0 - (1.0 - gamma) / 2.0).abs());
                verdicts_ok &= r.solvable == (gamma < 1.0);
                lines.push(format!("{gamma:.1}:{a0:+.4}"));
            }
            Err(e) => {
                verdicts_ok = false;
                worst = f64::INFINITY;
                lines.push(format!("{gamma:.1}:error({e})"));
            }
        }
    }
    Outcome {
        pass: worst <= 1e-2 && verdicts_ok,
        detail: format!(
            "max|alpha_0 - (1-gamma)/2| = {worst:.2e}, verdicts {}; alpha_0 by gamma [{}]",
            if verdicts_ok { "correct" } else { "WRONG" },
            lines.join(" ")
        ),
    }
}

fn criterion_3() -> (Outcome, Option<ReconstructionResult>) {
    let (phi, _, _) = mixed_data(&Primitive::Zero, 257, KernelMethod::Auto).unwrap();
    let phi_err = phi.max_abs();
    match reconstruct(
        &Primitive::Zero,
        &SpectralSequence::harmonic(),
        &ReconstructConfig::default(),
    ) {
        Ok(r) => {
            let sigma_err = r.sigma.max_abs();
            let pass = phi_err <= 1e-6 && sigma_err <= 1e-5 && r.h.abs() <= 1e-6;
            (
                Outcome {
                    pass,
                    detail: format!(
                        "max|phi_0| = {phi_err:.2e}, max|sigma| = {sigma_err:.2e}, |h| = {:.2e}",
                        r.h.abs()
                    ),
                },
                Some(r),
            )
        }
        Err(e) => (
            Outcome {
                pass: false,
                detail: format!("reconstruction failed: {e}"),
            },
            None,
        ),
    }
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let half = half_grid();
    let fine = half.refined(2);
    let mut worst = 0.0f64;
    let mut failures = 0;
    for _ in 0..100 {
        let norm = 0.5 * rng.gen_range(0.5..=1.0);
        let q0 = common::random_trig(&mut rng, fine, norm);
        let sigma0 = Primitive::antiderivative_of(q0.clone()).unwrap();
        let ratio = goursat_kernel(&q0, &half)
            .and_then(|l| phi0(&sigma0, &l))
            .map(|p| p.l2_norm());
        match ratio {
            Ok(n) => {
                worst = worst.max(n);
                if n > 0.25 + 1e-3 {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    Outcome {
        pass: failures == 0,
        detail: format!("100 samples, max ||phi_0|| = {worst:.4}, violations {failures}"),
    }
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let half = half_grid();
    let fine = half.refined(2);
    let bound = 2.0 * 2f64.sqrt() / 3.0 + 1e-3;
    let mut worst_dev = 0.0f64;
    let mut min_alpha0 = f64::INFINITY;
    let mut failures = 0;
    for _ in 0..50 {
        let norm = 0.5 * rng.gen_range(0.5..=1.0);
        let q0 = common::random_trig(&mut rng, fine, norm);
        let len = rng.gen_range(1..=6);
        let mut mu: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
        mu[0] = mu[0].abs();
        let c = if rng.gen_bool(0.5) {
            rng.gen_range(-1.0..1.0)
        } else {
            0.0
        };
        let raw = spectrum_from(&mu, c);
        let scale = 0.25 * rng.gen_range(0.5..=1.0) / raw.mu_l2_norm();
        let mu: Vec<f64> = mu.iter().map(|m| m * scale).collect();
        let spectrum = spectrum_from(&mu, c * scale);
        if !local_existence_check(&q0, &spectrum) {
            failures += 1;
            continue;
        }
        let sigma0 = Primitive::antiderivative_of(q0).unwrap();
        let r = mixed_data(&sigma0, 257, KernelMethod::Auto).and_then(|(phi, _, _)| {
            membership_check(&phi, &spectrum, default_truncation(&spectrum))
        });
        match r {
            Ok(r) => {
                let dev = r.alpha.head()[1..]
                    .iter()
                    .map(|a| (a - 1.0).abs())
                    .fold(0.0, f64::max);
                worst_dev = worst_dev.max(dev);
                min_alpha0 = min_alpha0.min(r.alpha.at(0));
                if !r.solvable || dev > bound {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    Outcome {
        pass: failures == 0,
        detail: format!(
            "50 samples, all solvable: {}, max_(n>=1) |alpha_n - 1| = {worst_dev:.4} (bound {bound:.4}), min alpha_0 = {min_alpha0:.4}",
            failures == 0
        ),
    }
}

fn spectrum_from(mu: &[f64], c: f64) -> SpectralSequence {
    let head = mu
        .iter()
        .enumerate()
        .map(|(n, m)| PI * n as f64 + m)
        .collect();
    let tail = if c == 0.0 { Tail::ExactPi } else { Tail::Coulomb(c) };
    SpectralSequence::new(head, tail).unwrap()
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..10_000 {
        let a = rng.gen_range(-10.0..=10.0);
        let b = rng.gen_range(-10.0..=10.0);
        let slack = trig_defect(a, b) - trig_defect_bound(b);
        worst = worst.max(slack);
        if slack > 1e-12 {
            violations += 1;
        }
    }
    Outcome {
        pass: violations == 0,
        detail: format!("10^4 samples, violations {violations}, max(defect - b^2/sqrt 3) = {worst:.3e}"),
    }
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let half = half_grid();
    let fine = half.refined(2);
    let mut worst = 0.0f64;
    let mut errors = 0;
    for _ in 0..10 {
        let norm = rng.gen_range(0.5..=1.0);
        let q0 = common::random_trig(&mut rng, fine, norm);
        let sigma0 = Primitive::antiderivative_of(q0.clone()).unwrap();
        let a = goursat_kernel(&q0, &half);
        let b = collocation_kernel(&sigma0, &half, default_collocation_frequencies(&half));
        match (a, b) {
            (Ok(a), Ok(b)) => worst = worst.max(a.sup_distance(&b)),
            _ => errors += 1,
        }
    }
    Outcome {
        pass: errors == 0 && worst <= 1e-3,
        detail: format!("10 samples on 129 nodes, max sup|l_goursat - l_colloc| = {worst:.2e}, failures {errors}"),
    }
}

fn criterion_8(runs: &[(&str, &ReconstructionResult)]) -> Outcome {
    let mut pass = !runs.is_empty();
    let mut parts = Vec::new();
    for (name, r) in runs {
        let d = &r.diagnostics;
        let fact = d.factorization_defect.unwrap_or(f64::INFINITY);
        let ok = d.glm_residual <= 1e-6
            && d.positivity_margin > 0.0
            && d.h_spread <= 1e-4
            && fact <= 1e-4;
        pass &= ok;
        parts.push(format!(
            "{name}: residual {:.1e}, margin {:.4}, h_spread {:.1e}, factorization {:.1e}",
            d.glm_residual, d.positivity_margin, d.h_spread, fact
        ));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn criterion_9() -> Outcome {
    let sigma = Primitive::example_gamma(0.5).unwrap();
    let bc = BoundaryParam::Robin(h_gamma(0.5).unwrap());
    let opts = EigenOptions {
        tolerance: 1e-14,
        ..Default::default()
    };
    let energies = |n| eigenenergies_with(&sigma, bc, 6, &GridSpec::unit(n).unwrap(), &opts);
    let (coarse, fine) = match (energies(257), energies(513)) {
        (Ok(c), Ok(f)) => (c, f),
        (Err(e), _) | (_, Err(e)) => {
            return Outcome {
                pass: false,
                detail: format!("eigenvalue search failed: {e}"),
            }
        }
    };
    let signed_sqrt = |e: f64| e.signum() * e.abs().sqrt();
    // lambda_0 = 0: lambda = sqrt(E) has half the order of E there, so n = 0 is
    // judged on the energy and n >= 1 on lambda
    let e0 = (coarse[0] / fine[0]).abs();
    let l0 = (signed_sqrt(coarse[0]) / signed_sqrt(fine[0])).abs();
    let ratios: Vec<f64> = (1..6)
        .map(|n| {
            let exact = PI * n as f64;
            (coarse[n].sqrt() - exact).abs() / (fine[n].sqrt() - exact).abs()
        })
        .collect();
    let min_ratio = ratios.iter().copied().fold(e0, f64::min);
    Outcome {
        pass: min_ratio >= 12.0,
        detail: format!(
            "error ratios h=1/256 -> 1/512: n=0 energy {e0:.2} (lambda {l0:.2}), n=1..5 lambda [{}]",
            ratios
                .iter()
                .map(|r| format!("{r:.2}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    }
}

fn main() -> ExitCode {
    let (c1, r1) = criterion_1();
    report(1, "gamma = 1/2 roundtrip", &c1);
    let c2 = criterion_2();
    report(2, "solvability boundary sweep", &c2);
    let (c3, r3) = criterion_3();
    report(3, "unperturbed identity", &c3);
    let c4 = criterion_4();
    report(4, "phi_0 norm bound", &c4);
    let c5 = criterion_5();
    report(5, "local existence", &c5);
    let c6 = criterion_6();
    report(6, "trigonometric inequality", &c6);
    let c7 = criterion_7();
    report(7, "Goursat vs collocation kernels", &c7);
    let runs: Vec<(&str, &ReconstructionResult)> = [("gamma=1/2", &r1), ("zero", &r3)]
        .into_iter()
        .filter_map(|(n, r)| r.as_ref().map(|r| (n, r)))
        .collect();
    let mut c8 = criterion_8(&runs);
    c8.pass &= runs.len() == 2;
    report(8, "GLM self-consistency", &c8);
    let c9 = criterion_9();
    report(9, "forward solver order", &c9);

    let all = [&c1, &c2, &c3, &c4, &c5, &c6, &c7, &c8, &c9];
    let passed = all.iter().filter(|c| c.pass).count();
    println!("{passed}/{} criteria passed", all.len());
    if passed == all.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
