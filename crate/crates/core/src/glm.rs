//! Reconstruction: extend `phi` to `(0, 2)`, check positivity of `I + F_phi`,
//! solve the Gelfand-Levitan-Marchenko equation
//!
//! ```text
//! k(x,t) + f(x,t) + \int_0^x k(x,s) f(s,t) ds = 0,   f(x,t) = phi(x+t) + phi(|x-t|)
//! ```
//!
//! and read off `sigma(x) = 2 k(x,x) + 2 phi(0)` and the boundary constant `h`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{default_truncation, membership_check, psi_lambda, MembershipReport};
use crate::error::{Error, Result};
use crate::forward::{eigensystem, shoot, BoundaryParam};
use crate::grid::{trapezoid_weights, GridSpec, SampledFunction};
use crate::model::{Primitive, SpectralSequence};
use crate::transform::{
    collocation_kernel, default_collocation_frequencies, goursat_kernel_with_origin, phi0,
    KernelTriangle,
};

/// Proceed past the positivity gate only above this margin.
pub const POSITIVITY_THRESHOLD: f64 = 1e-8;
const BOUNDARY_EPS: f64 = 1e-10;

/// `phi` on `[0, 2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiExtension {
    pub samples: SampledFunction,
    pub phi_at_zero: f64,
}

impl PhiExtension {
    /// Constant `phi` on `[0, 2]`.
    pub fn constant(value: f64, grid: GridSpec) -> Self {
        Self {
            samples: SampledFunction::from_fn(grid, |_| value),
            phi_at_zero: value,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.samples.eval(x)
    }
}

/// `phi(x) = sum_n [alpha_n cos(lambda_n x) - cos(pi n x)] + 1/2` on `grid`.
///
/// The expansion stops at `m = beta.len()`. When the computed `beta_n` settle
/// onto `(a + b (-1)^n) / n^2` (the generic decay when `phi_0` has a slope at
/// either end of `[0, 1]`), the missing `sum_{n >= m}` of that model against
/// `cos(pi n x)` is added in closed form; it is otherwise an `O(1/m)` error at
/// the ends of the interval.
pub fn extend_phi(
    report: &MembershipReport,
    spectrum: &SpectralSequence,
    grid: &GridSpec,
) -> Result<PhiExtension> {
    if !report.solvable {
        return Err(Error::Unsolvable {
            report: Box::new(report.clone()),
            positivity_margin: None,
        });
    }
    let psi = psi_lambda(spectrum, grid);
    let m = report.beta.len();
    let lambdas = spectrum.lambdas(m);
    let tail = BetaTail::fit(&report.beta);
    let values = grid
        .nodes()
        .iter()
        .zip(psi.values())
        .map(|(&x, p)| {
            let series: f64 = report
                .beta
                .iter()
                .zip(&lambdas)
                .map(|(b, l)| b * (l * x).cos())
                .sum();
            series + tail.eval(m, x) + p + 0.5
        })
        .collect();
    Ok(PhiExtension {
        samples: SampledFunction::new(*grid, values)?,
        phi_at_zero: report.beta.iter().sum::<f64>() + tail.eval(m, 0.0) + 0.5,
    })
}

/// `beta_n ~ (a + b (-1)^n) / n^2` beyond the truncation.
#[derive(Debug, Clone, Copy, Default)]
struct BetaTail {
    a: f64,
    b: f64,
}

impl BetaTail {
    /// Each parity class is fitted on two windows of the upper half of `beta`
    /// and kept only if they agree to 10%; otherwise it is left at 0.
    fn fit(beta: &[f64]) -> Self {
        let m = beta.len();
        if m < 32 {
            return Self::default();
        }
        let level = |parity: usize| {
            let window = |r: std::ops::Range<usize>| {
                let ns: Vec<usize> = r.filter(|n| n % 2 == parity).collect();
                ns.iter().map(|&n| beta[n] * (n * n) as f64).sum::<f64>() / ns.len() as f64
            };
            let early = window(m / 2..3 * m / 4);
            let late = window(3 * m / 4..m);
            let agree = early * late > 0.0 && (early - late).abs() <= 0.1 * late.abs();
            if agree {
                late
            } else {
                0.0
            }
        };
        let (even, odd) = (level(0), level(1));
        Self {
            a: 0.5 * (even + odd),
            b: 0.5 * (even - odd),
        }
    }

    /// `sum_{n >= first} (a + b (-1)^n) cos(pi n x) / n^2`.
    fn eval(&self, first: usize, x: f64) -> f64 {
        if self.a == 0.0 && self.b == 0.0 {
            return 0.0;
        }
        self.a * inverse_square_cosine_tail(first, x)
            + self.b * inverse_square_cosine_tail(first, x + 1.0)
    }
}

/// `sum_{n >= first} cos(pi n x) / n^2`, `first >= 1`.
fn inverse_square_cosine_tail(first: usize, x: f64) -> f64 {
    let theta = (PI * x).rem_euclid(2.0 * PI);
    let full = PI * PI / 6.0 - 0.5 * PI * theta + 0.25 * theta * theta;
    let head: f64 = (1..first)
        .map(|n| (PI * n as f64 * x).cos() / (n * n) as f64)
        .sum();
    full - head
}

pub fn f_phi(phi: &PhiExtension, x: f64, t: f64) -> f64 {
    phi.eval(x + t) + phi.eval((x - t).abs())
}

fn f_table(phi: &PhiExtension, grid: &GridSpec) -> DMatrix<f64> {
    let nodes = grid.nodes();
    DMatrix::from_fn(nodes.len(), nodes.len(), |i, j| {
        f_phi(phi, nodes[i], nodes[j])
    })
}

/// Smallest eigenvalue of the symmetrised Nystrom matrix `I + W^{1/2} F W^{1/2}`.
pub fn positivity_check(phi: &PhiExtension, grid: &GridSpec) -> f64 {
    let w: Vec<f64> = grid.trapezoid_weights().iter().map(|v| v.sqrt()).collect();
    let f = f_table(phi, grid);
    let n = w.len();
    let m = DMatrix::from_fn(n, n, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        delta + w[i] * f[(i, j)] * w[j]
    });
    SymmetricEigen::new(m).eigenvalues.min()
}

/// Nystrom solution of the GLM equation, one dense solve per row `x_i`; the row
/// `x = 0` is `k(0,0) = -2 phi(0)`.
pub fn glm_solve(phi: &PhiExtension, grid: &GridSpec) -> Result<KernelTriangle> {
    let f = f_table(phi, grid);
    let h = grid.step();
    let n = grid.n_points();
    let mut rows: Vec<Vec<f64>> = (1..n)
        .into_par_iter()
        .map(|i| {
            let w = trapezoid_weights(i + 1, h);
            let a = DMatrix::from_fn(i + 1, i + 1, |j, m| {
                let delta = if j == m { 1.0 } else { 0.0 };
                delta + w[m] * f[(m, j)]
            });
            let b = DVector::from_fn(i + 1, |j, _| -f[(i, j)]);
            a.lu()
                .solve(&b)
                .filter(|x| x.iter().all(|v| v.is_finite()))
                .map(|x| x.iter().copied().collect())
                .ok_or(Error::SingularSystem { row: i })
        })
        .collect::<Result<_>>()?;
    rows.insert(0, vec![-2.0 * phi.phi_at_zero]);
    KernelTriangle::new(*grid, rows)
}

/// Largest `|k + f + \int_0^x k f| / (1 + |f|)` over node pairs, with the
/// integral by the trapezoid rule.
pub fn glm_residual(phi: &PhiExtension, kernel: &KernelTriangle) -> f64 {
    let grid = kernel.grid();
    let f = f_table(phi, grid);
    let h = grid.step();
    (1..grid.n_points())
        .into_par_iter()
        .map(|i| {
            let w = trapezoid_weights(i + 1, h);
            let row = kernel.row(i);
            (0..=i)
                .map(|j| {
                    let integral: f64 = (0..=i).map(|m| w[m] * row[m] * f[(m, j)]).sum();
                    (row[j] + f[(i, j)] + integral).abs() / (1.0 + f[(i, j)].abs())
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// `sigma(x) = 2 k(x,x) + 2 phi(0)`.
pub fn sigma_from_kernel(kernel: &KernelTriangle, phi: &PhiExtension) -> SampledFunction {
    let values = kernel
        .diagonal()
        .iter()
        .map(|d| 2.0 * d + 2.0 * phi.phi_at_zero)
        .collect();
    SampledFunction::new(*kernel.grid(), values).expect("diagonal matches grid")
}

/// `h = v(1)/u(1)` from the shot at `lambda_0`, and the largest pairwise
/// difference of the same ratio over `lambda_0, lambda_1, lambda_2`.
pub fn recover_h(
    sigma: &SampledFunction,
    spectrum: &SpectralSequence,
    grid: &GridSpec,
) -> Result<(f64, f64)> {
    let p = Primitive::sampled(sigma.clone());
    let values = (0..3)
        .map(|n| {
            let (u, v) = shoot(&p, spectrum.lambda_at(n), grid).end();
            if u.abs() < BOUNDARY_EPS {
                Err(Error::BoundaryDegenerate { index: n })
            } else {
                Ok(v / u)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((values[0], hi - lo))
}

/// Size of the factorization defect `(I + F)(I + K^T)(I + K) - I`.
///
/// The defect is an integral operator; its kernel
///
/// ```text
/// D = F + K + K^T + F K^T + F K + K^T K + F K^T K
/// ```
///
/// is evaluated at the `nodes x nodes` spot grid on `[0, 1]`, with every
/// composition integrated by the trapezoid rule on the kernel grid and split where
/// the triangular kernels switch on. The result is the Hilbert-Schmidt norm of the
/// sampled `D`, an upper bound for its operator norm on `L2(0, 1)`. The kernel grid
/// must contain the spot grid.
pub fn factorization_defect(
    phi: &PhiExtension,
    kernel: &KernelTriangle,
    nodes: usize,
) -> Result<f64> {
    let spots = GridSpec::unit(nodes)?;
    let grid = kernel.grid();
    let n = grid.n_points();
    if grid.start() != 0.0 || grid.end() != 1.0 || !(n - 1).is_multiple_of(nodes - 1) {
        return Err(Error::InvalidInput(format!(
            "spot grid of {nodes} nodes is not contained in the kernel grid of {n}"
        )));
    }
    let stride = (n - 1) / (nodes - 1);
    let h = grid.step();
    let f = f_table(phi, grid);
    // k(x_a, x_b) for b <= a
    let k = |a: usize, b: usize| kernel.value(a, b);
    let trap = |lo: usize, hi: usize, g: &dyn Fn(usize) -> f64| -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let inner: f64 = (lo + 1..hi).map(g).sum();
        h * (0.5 * (g(lo) + g(hi)) + inner)
    };

    let columns: Vec<Vec<f64>> = (0..nodes)
        .into_par_iter()
        .map(|jt| {
            let b = jt * stride;
            // (K^T K)(s, t) for every s on the kernel grid
            let ktk: Vec<f64> = (0..n)
                .map(|s| trap(s.max(b), n - 1, &|r| k(r, s) * k(r, b)))
                .collect();
            (0..nodes)
                .map(|ix| {
                    let a = ix * stride;
                    let triangular = if b <= a { k(a, b) } else { k(b, a) };
                    let fkt = trap(0, b, &|s| f[(a, s)] * k(b, s));
                    let fk = trap(b, n - 1, &|s| f[(a, s)] * k(s, b));
                    let fktk = trap(0, n - 1, &|s| f[(a, s)] * ktk[s]);
                    f[(a, b)] + triangular + fkt + fk + ktk[a] + fktk
                })
                .collect()
        })
        .collect();

    let w = spots.trapezoid_weights();
    let hs: f64 = columns
        .iter()
        .enumerate()
        .flat_map(|(j, col)| col.iter().enumerate().map(move |(i, d)| (i, j, d)))
        .map(|(i, j, d)| w[i] * w[j] * d * d)
        .sum();
    Ok(hs.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelMethod {
    /// Goursat when `sigma_0` has a usable derivative, collocation otherwise.
    #[default]
    Auto,
    Goursat,
    Collocation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReconstructConfig {
    /// Nodes on `[0, 1]`; `(n - 1)` must be divisible by 4 so the half grid is valid.
    pub n_points: usize,
    /// Expansion order; `None` uses [`default_truncation`].
    pub truncation: Option<usize>,
    pub kernel: KernelMethod,
    /// Eigenvalues checked in the forward roundtrip; 0 skips it.
    pub roundtrip_count: usize,
    /// Node count of the factorization check; 0 skips it.
    pub factorization_nodes: usize,
    /// Refinement of the shooting grid relative to the `sigma` grid.
    pub shooting_refinement: usize,
}

impl Default for ReconstructConfig {
    fn default() -> Self {
        Self {
            n_points: 257,
            truncation: None,
            kernel: KernelMethod::Auto,
            roundtrip_count: 11,
            factorization_nodes: 65,
            shooting_refinement: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub kernel_method: KernelMethod,
    pub truncation: usize,
    pub expansion_residual: f64,
    pub glm_residual: f64,
    pub positivity_margin: f64,
    pub h_spread: f64,
    /// `L2(0, 1/2)` distance between the recovered `sigma` and `sigma_0`.
    pub restriction_error: f64,
    pub roundtrip_spectrum_error: Option<f64>,
    pub roundtrip_alpha_error: Option<f64>,
    pub factorization_defect: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    pub sigma: SampledFunction,
    pub h: f64,
    pub report: MembershipReport,
    pub phi: PhiExtension,
    pub kernel: KernelTriangle,
    /// Eigenvalues of the reconstructed operator, when the roundtrip ran.
    pub roundtrip_lambdas: Option<Vec<f64>>,
    pub diagnostics: Diagnostics,
}

/// Grid on `[0, 1/2]` matching a `[0, 1]` grid of `n_points` nodes.
pub fn half_grid(n_points: usize) -> Result<GridSpec> {
    if n_points < 9 || !(n_points - 1).is_multiple_of(4) {
        return Err(Error::InvalidGrid(format!(
            "reconstruction needs n_points = 4k + 1 >= 9, got {n_points}"
        )));
    }
    GridSpec::new(n_points.div_ceil(2), 0.0, 0.5)
}

/// `l_0` on `half` by the requested method, with the method actually used.
pub fn kernel_l0(
    sigma0: &Primitive,
    half: &GridSpec,
    method: KernelMethod,
) -> Result<(KernelTriangle, KernelMethod)> {
    let derivative = || sigma0.derivative(half.refined(4));
    let colloc = || {
        collocation_kernel(sigma0, half, default_collocation_frequencies(half))
            .map(|k| (k, KernelMethod::Collocation))
    };
    match method {
        KernelMethod::Collocation => colloc(),
        KernelMethod::Goursat => {
            let (q0, h0) = derivative().ok_or_else(|| {
                Error::InvalidInput("Goursat kernel needs sigma_0 with a sampled derivative".into())
            })?;
            Ok((goursat_kernel_with_origin(&q0, h0, half)?, KernelMethod::Goursat))
        }
        KernelMethod::Auto => match derivative() {
            Some((q0, h0)) => match goursat_kernel_with_origin(&q0, h0, half) {
                Ok(k) => Ok((k, KernelMethod::Goursat)),
                Err(Error::NoConvergence { .. }) => colloc(),
                Err(e) => Err(e),
            },
            None => colloc(),
        },
    }
}

/// `phi_0` on `[0, 1]` together with the kernel that produced it.
pub fn mixed_data(
    sigma0: &Primitive,
    n_points: usize,
    method: KernelMethod,
) -> Result<(SampledFunction, KernelTriangle, KernelMethod)> {
    let half = half_grid(n_points)?;
    let (l0, used) = kernel_l0(sigma0, &half, method)?;
    let phi = phi0(sigma0, &l0)?;
    Ok((phi, l0, used))
}

/// The full half-inverse pipeline.
pub fn reconstruct(
    sigma0: &Primitive,
    spectrum: &SpectralSequence,
    config: &ReconstructConfig,
) -> Result<ReconstructionResult> {
    let grid = GridSpec::unit(config.n_points)?;
    let (phi0_samples, _, kernel_method) = mixed_data(sigma0, config.n_points, config.kernel)?;
    let truncation = config
        .truncation
        .unwrap_or_else(|| default_truncation(spectrum));
    let report = membership_check(&phi0_samples, spectrum, truncation)?;

    let phi = extend_phi(&report, spectrum, &grid.stretched(2))?;
    let margin = positivity_check(&phi, &grid);
    if margin <= POSITIVITY_THRESHOLD {
        return Err(Error::Unsolvable {
            report: Box::new(report),
            positivity_margin: Some(margin),
        });
    }
    let kernel = glm_solve(&phi, &grid)?;
    let sigma = sigma_from_kernel(&kernel, &phi);
    let shooting = grid.refined(config.shooting_refinement.max(1));
    let (h, h_spread) = recover_h(&sigma, spectrum, &shooting)?;

    let half = half_grid(config.n_points)?;
    let restriction_error =
        SampledFunction::from_fn(half, |x| sigma.eval(x) - sigma0.eval(x)).l2_norm();

    let (roundtrip_lambdas, roundtrip_spectrum_error, roundtrip_alpha_error) =
        if config.roundtrip_count > 0 {
            let sys = eigensystem(
                &Primitive::sampled(sigma.clone()),
                BoundaryParam::Robin(h),
                config.roundtrip_count,
                &shooting,
            )?;
            let spec_err = sys
                .lambdas
                .iter()
                .enumerate()
                .map(|(n, l)| (l - spectrum.lambda_at(n)).abs())
                .fold(0.0, f64::max);
            let alpha_err = sys
                .alphas
                .iter()
                .enumerate()
                .map(|(n, a)| (a - report.alpha.at(n)).abs())
                .fold(0.0, f64::max);
            (Some(sys.lambdas), Some(spec_err), Some(alpha_err))
        } else {
            (None, None, None)
        };

    let factorization_defect = if config.factorization_nodes > 0 {
        Some(factorization_defect(&phi, &kernel, config.factorization_nodes)?)
    } else {
        None
    };

    let diagnostics = Diagnostics {
        kernel_method,
        truncation,
        expansion_residual: report.expansion_residual,
        glm_residual: glm_residual(&phi, &kernel),
        positivity_margin: margin,
        h_spread,
        restriction_error,
        roundtrip_spectrum_error,
        roundtrip_alpha_error,
        factorization_defect,
    };
    Ok(ReconstructionResult {
        sigma,
        h,
        report,
        phi,
        kernel,
        roundtrip_lambdas,
        diagnostics,
    })
}
