//! Nonharmonic cosine systems `{cos(lambda_n x)}`: the shift function `psi_Lambda`,
//! Gram-system expansions, and the solvability certificate for the mixed data.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, SampledFunction};
use crate::linalg::spd_solve;
use crate::model::{CoefficientSequence, SpectralSequence, Tail};

const GRAM_CONDITION_LIMIT: f64 = 1e8;
const TAIL_TOLERANCE: f64 = 1e-10;
/// A margin below this is reported as marginal.
pub const MARGINAL_ALPHA: f64 = 0.05;

/// `psi_Lambda(x) = sum_n [cos(lambda_n x) - cos(pi n x)]` on `grid`.
///
/// Head terms are summed directly. For a Coulomb tail `lambda_n = pi n + c/n`
/// each term is expanded to third order in `b = c x / n`; the three resulting
/// series have closed forms in `theta = pi x`, and the Taylor remainders are
/// summed until the bound on what is left drops below `1e-10`.
///
/// With a Coulomb tail the series jumps at `x = 2`; the value there is the limit
/// from `x < 2`.
pub fn psi_lambda(spectrum: &SpectralSequence, grid: &GridSpec) -> SampledFunction {
    let head = spectrum.head();
    let reach = grid.start().abs().max(grid.end().abs());
    let cutoff = match spectrum.tail() {
        Tail::ExactPi => 0,
        Tail::Coulomb(c) => coulomb_cutoff(c, reach, head.len()),
    };
    SampledFunction::from_fn(*grid, |x| {
        let mut s = 0.0;
        for (n, &lambda) in head.iter().enumerate() {
            s += (lambda * x).cos() - (PI * n as f64 * x).cos();
        }
        if let Tail::Coulomb(c) = spectrum.tail() {
            s += coulomb_tail(c, head.len(), cutoff, x);
        }
        s
    })
}

/// First `K` such that `sum_{n > K} (c L / n)^4 / 24 < TAIL_TOLERANCE`.
fn coulomb_cutoff(c: f64, reach: f64, head_len: usize) -> usize {
    let b4 = (c * reach).powi(4);
    // sum_{n > K} n^-4 <= 1 / (3 K^3)
    let k = (b4 / (72.0 * TAIL_TOLERANCE)).cbrt().ceil() as usize;
    k.max(head_len)
}

/// `sum_{n >= first} [cos(pi n x + c x / n) - cos(pi n x)]`.
fn coulomb_tail(c: f64, first: usize, cutoff: usize, x: f64) -> f64 {
    let theta = (PI * x).rem_euclid(2.0 * PI);
    // sum sin(n theta)/n jumps at theta = 0; away from the origin take the limit
    // from the side of smaller |x|, which is what the GLM corner x + t = 2 sees
    let s1 = if theta == 0.0 {
        -0.5 * PI * x.signum() * f64::from(u8::from(x != 0.0))
    } else {
        0.5 * (PI - theta)
    };
    let c2 = PI * PI / 6.0 - 0.5 * PI * theta + 0.25 * theta * theta;
    let s3 = PI * PI * theta / 6.0 - 0.25 * PI * theta * theta + theta.powi(3) / 12.0;
    let (mut h1, mut h2, mut h3) = (0.0, 0.0, 0.0);
    for n in 1..first {
        let nf = n as f64;
        let (sn, cn) = (nf * PI * x).sin_cos();
        h1 += sn / nf;
        h2 += cn / (nf * nf);
        h3 += sn / (nf * nf * nf);
    }
    let cx = c * x;
    let mut total = -cx * (s1 - h1) - 0.5 * cx * cx * (c2 - h2) + cx.powi(3) / 6.0 * (s3 - h3);
    for n in first..=cutoff {
        let a = PI * n as f64 * x;
        let b = cx / n as f64;
        let (sa, ca) = a.sin_cos();
        let exact = (a + b).cos() - ca;
        total += exact - (-b * sa - 0.5 * b * b * ca + b.powi(3) / 6.0 * sa);
    }
    total
}

/// `sin(w)/w` with the removable singularity filled in.
fn sinc(w: f64) -> f64 {
    if w.abs() < 1e-4 {
        let w2 = w * w;
        1.0 - w2 / 6.0 + w2 * w2 / 120.0
    } else {
        w.sin() / w
    }
}

/// `G_ij = \int_0^1 cos(lambda_i x) cos(lambda_j x) dx`, `i, j < m`, in closed form.
pub fn gram_matrix(spectrum: &SpectralSequence, m: usize) -> DMatrix<f64> {
    let l = spectrum.lambdas(m);
    DMatrix::from_fn(m, m, |i, j| 0.5 * (sinc(l[i] - l[j]) + sinc(l[i] + l[j])))
}

/// `\int_0^1 g cos(lambda x) dx` for the piecewise-linear interpolant of `g`,
/// integrated exactly cell by cell.
fn cosine_moment(g: &SampledFunction, lambda: f64) -> f64 {
    let grid = g.grid();
    let h = grid.step();
    let vals = g.values();
    let last = vals.len() - 1;
    let z = lambda * h;
    // half-hat moments: \int_0^h (1 - s/h) cos(lambda s) ds and the sine analogue
    let a = 0.5 * h * sinc(0.5 * z).powi(2);
    let b = if z.abs() < 1e-2 {
        h * (z / 6.0 - z.powi(3) / 120.0)
    } else {
        (z - z.sin()) / (lambda * z)
    };
    let mut sum = 0.0;
    for (i, &v) in vals.iter().enumerate() {
        let (s, c) = (lambda * grid.node(i)).sin_cos();
        let w = if i == 0 {
            c * a - s * b
        } else if i == last {
            c * a + s * b
        } else {
            2.0 * a * c
        };
        sum += v * w;
    }
    sum
}

/// `sum_j coefficients[j] cos(lambda_j x)` on `grid`.
pub fn synthesize(
    coefficients: &[f64],
    spectrum: &SpectralSequence,
    grid: &GridSpec,
) -> SampledFunction {
    let l = spectrum.lambdas(coefficients.len());
    SampledFunction::from_fn(*grid, |x| {
        coefficients
            .iter()
            .zip(&l)
            .map(|(c, lam)| c * (lam * x).cos())
            .sum()
    })
}

/// Truncated expansion `g ~ sum_{j<M} c_j cos(lambda_j x)` on `(0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expansion {
    pub coefficients: Vec<f64>,
    /// `L2(0,1)` misfit of the truncated sum.
    pub residual: f64,
    pub gram_condition: f64,
}

/// Least-squares expansion through the Gram system `G c = d`.
pub fn expand(g: &SampledFunction, spectrum: &SpectralSequence, m: usize) -> Result<Expansion> {
    let grid = g.grid();
    if grid.start() != 0.0 || grid.end() != 1.0 {
        return Err(Error::InvalidInput(
            "expansions are taken on [0, 1]".into(),
        ));
    }
    if m == 0 {
        return Err(Error::InvalidInput("truncation order must be positive".into()));
    }
    let gram = gram_matrix(spectrum, m);
    let l = spectrum.lambdas(m);
    let d = DVector::from_iterator(m, l.iter().map(|&lam| cosine_moment(g, lam)));
    let (sol, condition) = spd_solve(gram, &d);
    let coefficients: Vec<f64> = match sol {
        Some(c) if condition <= GRAM_CONDITION_LIMIT => c.iter().copied().collect(),
        _ => return Err(Error::IllConditioned { condition }),
    };
    let fit = synthesize(&coefficients, spectrum, grid);
    let misfit = g.map(|x, v| v - fit.eval(x));
    Ok(Expansion {
        coefficients,
        residual: misfit.l2_norm(),
        gram_condition: condition,
    })
}

/// Default truncation: the head plus 8 harmonic terms, at most 64.
pub fn default_truncation(spectrum: &SpectralSequence) -> usize {
    (spectrum.head().len() + 8).min(64)
}

/// Outcome of testing `phi_0` for membership in the admissible class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    /// `beta_n = alpha_n - 1`; zero beyond the head.
    pub beta: Vec<f64>,
    pub alpha: CoefficientSequence,
    pub min_alpha: f64,
    pub solvable: bool,
    pub marginal: bool,
    pub expansion_residual: f64,
    pub gram_condition: f64,
}

/// Expand `phi_0 - psi_Lambda - 1/2` in `{cos(lambda_n x)}` and read off
/// `alpha_n = 1 + beta_n`; solvable iff every head `alpha_n` is positive.
pub fn membership_check(
    phi0: &SampledFunction,
    spectrum: &SpectralSequence,
    m: usize,
) -> Result<MembershipReport> {
    let psi = psi_lambda(spectrum, phi0.grid());
    let g = SampledFunction::new(
        *phi0.grid(),
        phi0
            .values()
            .iter()
            .zip(psi.values())
            .map(|(p, s)| p - s - 0.5)
            .collect(),
    )?;
    let exp = expand(&g, spectrum, m)?;
    let alpha = CoefficientSequence::new(exp.coefficients.iter().map(|b| 1.0 + b).collect());
    let min_alpha = alpha.min_head();
    let solvable = min_alpha > 0.0;
    Ok(MembershipReport {
        beta: exp.coefficients,
        alpha,
        min_alpha,
        solvable,
        marginal: solvable && min_alpha < MARGINAL_ALPHA,
        expansion_residual: exp.residual,
        gram_condition: exp.gram_condition,
    })
}

/// Sufficient condition for solvability: `||q_0||_{L2(0,1/2)} <= 1/2` and
/// `||mu||_{l2} <= 1/4`. A `false` result proves nothing.
pub fn local_existence_check(q0: &SampledFunction, spectrum: &SpectralSequence) -> bool {
    q0.l2_norm() <= 0.5 && spectrum.mu_l2_norm() <= 0.25
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegularityClass {
    ConsistentWithW21,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub class: RegularityClass,
    /// Least-squares `c` in `beta_n ~ c / n`.
    pub fitted_c: f64,
    pub fit_residual: f64,
}

/// Heuristic: does the head of `beta` decay like `c/n`?
pub fn regularity_diagnostic(
    report: &MembershipReport,
    spectrum: &SpectralSequence,
) -> RegularityReport {
    let tail_ok = matches!(spectrum.tail(), Tail::ExactPi | Tail::Coulomb(_));
    let pairs: Vec<(f64, f64)> = report
        .beta
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, &b)| (1.0 / n as f64, b))
        .collect();
    let num: f64 = pairs.iter().map(|(r, b)| r * b).sum();
    let den: f64 = pairs.iter().map(|(r, _)| r * r).sum();
    let fitted_c = if den > 0.0 { num / den } else { 0.0 };
    let fit_residual = pairs
        .iter()
        .map(|(r, b)| (b - fitted_c * r).powi(2))
        .sum::<f64>()
        .sqrt();
    let norm = pairs.iter().map(|(_, b)| b * b).sum::<f64>().sqrt();
    let class = if tail_ok && fit_residual <= 0.1 * norm {
        RegularityClass::ConsistentWithW21
    } else {
        RegularityClass::Inconclusive
    };
    RegularityReport {
        class,
        fitted_c,
        fit_residual,
    }
}
