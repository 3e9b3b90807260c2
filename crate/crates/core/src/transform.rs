//! Transformation-operator kernel `l_0(x, t)` on the half interval and the mixed
//! data function `phi_0`.
//!
//! Two constructions are provided. [`goursat_kernel`] solves the characteristic
//! (Goursat) integral equation by successive approximation and needs the potential
//! `q_0` as a function. [`collocation_kernel`] imposes the defining identity
//!
//! ```text
//! cos(lambda x) = y_0(x, lambda) + \int_0^x l(x, t) y_0(t, lambda) dt
//! ```
//!
//! at a family of frequencies and needs only pointwise values of `sigma_0`, so it
//! also covers primitives whose derivative is a distribution. On regular inputs
//! the two agree, which is how the second one is validated.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forward::SigmaTable;
use crate::grid::{trapezoid, GridSpec, SampledFunction};
use crate::linalg::spd_solve;
use crate::model::{Antiderivative, Primitive};

/// Samples of a kernel on the triangle `0 <= t <= x <= X`; row `i` holds
/// `k(x_i, t_j)` for `j = 0..=i`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTriangle {
    grid: GridSpec,
    rows: Vec<Vec<f64>>,
}

impl KernelTriangle {
    pub fn new(grid: GridSpec, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() != grid.n_points() || rows.iter().enumerate().any(|(i, r)| r.len() != i + 1)
        {
            return Err(Error::InvalidInput(
                "kernel rows must have lengths 1, 2, ..., n".into(),
            ));
        }
        Ok(Self { grid, rows })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> f64) -> Self {
        let rows = (0..grid.n_points())
            .map(|i| (0..=i).map(|j| f(grid.node(i), grid.node(j))).collect())
            .collect();
        Self { grid, rows }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.rows[i][j]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r[r.len() - 1]).collect()
    }

    fn row_eval(&self, i: usize, t: f64) -> f64 {
        let row = &self.rows[i];
        if i == 0 {
            return row[0];
        }
        let h = self.grid.step();
        let s = ((t - self.grid.start()) / h).clamp(0.0, i as f64);
        let j = (s.floor() as usize).min(i - 1);
        let w = s - j as f64;
        (1.0 - w) * row[j] + w * row[j + 1]
    }

    /// Interpolated value; `t` is clamped into `[0, x]`.
    pub fn eval(&self, x: f64, t: f64) -> f64 {
        let (i, s) = self.grid.locate(x);
        (1.0 - s) * self.row_eval(i, t) + s * self.row_eval(i + 1, t)
    }

    pub fn max_abs(&self) -> f64 {
        self.rows
            .iter()
            .flatten()
            .fold(0.0, |m: f64, v| m.max(v.abs()))
    }

    /// Largest pointwise difference; kernels on different grids are compared at
    /// the nodes of `self`.
    pub fn sup_distance(&self, other: &KernelTriangle) -> f64 {
        if self.grid == other.grid {
            self.rows
                .iter()
                .zip(&other.rows)
                .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
                .fold(0.0, f64::max)
        } else {
            let mut worst = 0.0f64;
            for (i, row) in self.rows.iter().enumerate() {
                let x = self.grid.node(i);
                for (j, v) in row.iter().enumerate() {
                    worst = worst.max((v - other.eval(x, self.grid.node(j))).abs());
                }
            }
            worst
        }
    }
}

const GOURSAT_MAX_ITERATIONS: usize = 50;
const GOURSAT_TOLERANCE: f64 = 1e-12;

/// Kernel `l_0` for `sigma_0 = \int_0^x q_0` (so `sigma_0(0) = 0`).
pub fn goursat_kernel(q0: &SampledFunction, grid: &GridSpec) -> Result<KernelTriangle> {
    goursat_kernel_with_origin(q0, 0.0, grid)
}

/// Kernel `l_0` for `sigma_0 = sigma0_at_zero + \int_0^x q_0`.
///
/// In characteristic variables `u = x + t`, `v = x - t`, `a(u, v) = l(x, t)` solves
///
/// ```text
/// a(u,v) = -h0 - 1/2 [\int_0^{u/2} q0 + \int_0^{v/2} q0] - h0 \int_0^v a(b,b) db
///          - 1/2 \int_0^v da \int_0^a q0((a-b)/2) a(a,b) db
///          - 1/4 \int_v^u da \int_0^v q0((a-b)/2) a(a,b) db
/// ```
///
/// with `h0 = sigma_0(0)`; the boundary conditions are `l(x,x) = -h0 - 1/2 \int_0^x q0`
/// and `(l_t - h0 l)(x, 0) = 0`. Both double integrals are discretised by the
/// trapezoid rule on the grid of step `h` in `(u, v)`.
pub fn goursat_kernel_with_origin(
    q0: &SampledFunction,
    sigma0_at_zero: f64,
    grid: &GridSpec,
) -> Result<KernelTriangle> {
    if grid.start() != 0.0 {
        return Err(Error::InvalidInput("kernel grid must start at 0".into()));
    }
    let anti = Antiderivative::new(q0.clone())?;
    let h0 = sigma0_at_zero;
    let n = grid.n_points();
    let h = grid.step();
    let top = 2 * (n - 1);

    let q_half: Vec<f64> = (0..=top).map(|k| q0.eval(0.5 * k as f64 * h)).collect();
    let sig_half: Vec<f64> = (0..=top).map(|k| anti.eval(0.5 * k as f64 * h)).collect();
    let width = |p: usize| p.min(top - p) + 1;
    let forcing: Vec<Vec<f64>> = (0..=top)
        .map(|p| {
            (0..width(p))
                .map(|m| -h0 - 0.5 * (sig_half[p] + sig_half[m]))
                .collect()
        })
        .collect();

    let mut a = forcing.clone();
    let mut change = f64::INFINITY;
    for _ in 0..GOURSAT_MAX_ITERATIONS {
        // s[p][m] = \int_0^{v_m} q a (u_p, .)
        let s: Vec<Vec<f64>> = a
            .iter()
            .enumerate()
            .map(|(p, row)| {
                let mut acc = Vec::with_capacity(row.len());
                acc.push(0.0);
                for m in 1..row.len() {
                    let g0 = q_half[p - (m - 1)] * row[m - 1];
                    let g1 = q_half[p - m] * row[m];
                    acc.push(acc[m - 1] + 0.5 * h * (g0 + g1));
                }
                acc
            })
            .collect();

        let half = top / 2;
        let mut inner = vec![0.0; half + 1];
        let mut diag = vec![0.0; half + 1];
        for m in 1..=half {
            inner[m] = inner[m - 1] + 0.5 * h * (s[m - 1][m - 1] + s[m][m]);
            diag[m] = diag[m - 1] + 0.5 * h * (a[m - 1][m - 1] + a[m][m]);
        }

        let mut next = forcing.clone();
        for m in 0..=half {
            let mut outer = 0.0;
            for p in m..=top - m {
                if p > m {
                    outer += 0.5 * h * (s[p - 1][m] + s[p][m]);
                }
                next[p][m] += -h0 * diag[m] - 0.5 * inner[m] - 0.25 * outer;
            }
        }

        change = next
            .iter()
            .zip(&a)
            .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()))
            .fold(0.0, f64::max);
        a = next;
        if change <= GOURSAT_TOLERANCE {
            let rows = (0..n)
                .map(|i| (0..=i).map(|j| a[i + j][i - j]).collect())
                .collect();
            return KernelTriangle::new(*grid, rows);
        }
    }
    Err(Error::NoConvergence {
        iterations: GOURSAT_MAX_ITERATIONS,
        change,
    })
}

const COLLOCATION_CONDITION_LIMIT: f64 = 1e8;
/// Target for `lambda_max * fine_step` when shooting the collocation solutions.
const COLLOCATION_PHASE_STEP: f64 = 0.005;

/// Default number of collocation frequencies: `lambda_M h = pi`, the grid Nyquist
/// frequency.
pub fn default_collocation_frequencies(grid: &GridSpec) -> usize {
    2 * (grid.n_points() - 1)
}

/// Per-frequency integrals of the hat functions against `y_0(., lambda)`.
struct FrequencyData {
    lambda: f64,
    /// `\int_cell (1 - tau) y_0`, `tau = (t - t_c)/h`
    left: Vec<f64>,
    /// `\int_cell tau y_0`
    right: Vec<f64>,
    /// `y_0` at the coarse nodes
    nodes: Vec<f64>,
}

struct Collocation {
    grid: GridSpec,
    data: Vec<FrequencyData>,
}

impl Collocation {
    fn new(sigma0: &Primitive, grid: &GridSpec, frequencies: usize) -> Self {
        let h = grid.step();
        let cells = grid.n_points() - 1;
        let lambdas: Vec<f64> = (0..=frequencies)
            .map(|k| PI * k as f64 / (2.0 * grid.end()))
            .collect();
        let lam_max = lambdas[lambdas.len() - 1];
        let mut r = ((lam_max * h / COLLOCATION_PHASE_STEP).ceil() as usize).max(4);
        r += r % 2;
        let fine = grid.refined(r);
        let table = SigmaTable::new(sigma0, &fine);
        let delta = fine.step();

        let data = lambdas
            .par_iter()
            .map(|&lambda| {
                let y = table.trajectory(lambda * lambda).u;
                let mut left = Vec::with_capacity(cells);
                let mut right = Vec::with_capacity(cells);
                for c in 0..cells {
                    let (mut l, mut rr) = (0.0, 0.0);
                    for j in 0..=r {
                        let w = if j == 0 || j == r {
                            1.0
                        } else if j % 2 == 1 {
                            4.0
                        } else {
                            2.0
                        };
                        let tau = j as f64 / r as f64;
                        let v = w * y[c * r + j];
                        l += (1.0 - tau) * v;
                        rr += tau * v;
                    }
                    left.push(l * delta / 3.0);
                    right.push(rr * delta / 3.0);
                }
                let nodes = (0..=cells).map(|i| y[i * r]).collect();
                FrequencyData {
                    lambda,
                    left,
                    right,
                    nodes,
                }
            })
            .collect();
        Self { grid: *grid, data }
    }

    /// Least-squares system of row `i` (unknowns `l(x_i, t_j)`, `j = 0..=i`).
    fn row_system(&self, i: usize) -> (DMatrix<f64>, DVector<f64>) {
        let x = self.grid.node(i);
        let a = DMatrix::from_fn(self.data.len(), i + 1, |k, j| {
            let d = &self.data[k];
            let mut v = 0.0;
            if j >= 1 {
                v += d.right[j - 1];
            }
            if j < i {
                v += d.left[j];
            }
            v
        });
        let b = DVector::from_fn(self.data.len(), |k, _| {
            let d = &self.data[k];
            (d.lambda * x).cos() - d.nodes[i]
        });
        (a, b)
    }
}

/// Kernel `l_0` from pointwise values of `sigma_0` by least-squares collocation of
/// the transformation identity at `lambda_k = pi k / (2X)`, `k = 0..=frequencies`.
///
/// Each row is represented by hat functions on its `t`-nodes; the hat integrals
/// against `y_0` are computed on a refined shooting grid.
pub fn collocation_kernel(
    sigma0: &Primitive,
    grid: &GridSpec,
    frequencies: usize,
) -> Result<KernelTriangle> {
    if grid.start() != 0.0 {
        return Err(Error::InvalidInput("kernel grid must start at 0".into()));
    }
    let n = grid.n_points();
    if frequencies < n {
        return Err(Error::InvalidInput(format!(
            "need at least {n} collocation frequencies, got {frequencies}"
        )));
    }
    let colloc = Collocation::new(sigma0, grid, frequencies);
    let mut rows: Vec<Vec<f64>> = (1..n)
        .into_par_iter()
        .map(|i| {
            let (a, b) = colloc.row_system(i);
            let normal = a.tr_mul(&a);
            let rhs = a.tr_mul(&b);
            match spd_solve(normal, &rhs) {
                (Some(x), cond) if cond <= COLLOCATION_CONDITION_LIMIT => {
                    Ok(x.iter().copied().collect())
                }
                (_, condition) => Err(Error::IllConditioned { condition }),
            }
        })
        .collect::<Result<_>>()?;
    rows.insert(0, vec![-sigma0.eval(0.0)]);
    KernelTriangle::new(*grid, rows)
}

/// Largest defect of the transformation identity over all rows `x_i > 0` and the
/// frequencies `lambda_k = pi k / (2X)`, `k = 0..=frequencies`.
pub fn identity_residual(
    sigma0: &Primitive,
    kernel: &KernelTriangle,
    frequencies: usize,
) -> f64 {
    let colloc = Collocation::new(sigma0, kernel.grid(), frequencies);
    (1..kernel.grid().n_points())
        .into_par_iter()
        .map(|i| {
            let (a, b) = colloc.row_system(i);
            let l = DVector::from_row_slice(kernel.row(i));
            (a * l - b).amax()
        })
        .reduce(|| 0.0, f64::max)
}

/// `phi_0(2x) = -sigma_0(x)/2 + \int_0^x l^2(x, t) dt`, on the doubled interval.
pub fn phi0(sigma0: &Primitive, kernel: &KernelTriangle) -> Result<SampledFunction> {
    let grid = kernel.grid();
    let h = grid.step();
    let values = kernel
        .rows()
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let sq: Vec<f64> = row.iter().map(|v| v * v).collect();
            -0.5 * sigma0.eval(grid.node(i)) + trapezoid(&sq, h)
        })
        .collect();
    let doubled = GridSpec::new(grid.n_points(), 2.0 * grid.start(), 2.0 * grid.end())?;
    SampledFunction::new(doubled, values)
}
