//! Direct spectral problem for `T(sigma, 0, h)`.
//!
//! The equation `-(y' - sigma y)' - sigma y' = lambda^2 y` is integrated as the
//! first-order system in `(u, v) = (y, y^[1])`:
//!
//! ```text
//! u' = sigma u + v
//! v' = -sigma (sigma u + v) - lambda^2 u
//! ```
//!
//! so `sigma` is only ever evaluated pointwise. The system depends on `lambda`
//! through `lambda^2` alone; eigenvalue searches run in the signed variable
//! `s` with `lambda^2 = s |s|`, which turns the double root of the characteristic
//! function at `lambda = 0` into a simple sign change.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{simpson, GridSpec};
use crate::model::Primitive;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryParam {
    /// `y^[1](1) = h y(1)`
    Robin(f64),
    /// `y(1) = 0`
    Dirichlet,
}

/// Solution of the initial value problem `u(0) = 1`, `v(0) = 0` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: GridSpec,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl Trajectory {
    pub fn end(&self) -> (f64, f64) {
        (self.u[self.u.len() - 1], self.v[self.v.len() - 1])
    }
}

/// `sigma` at the grid nodes and cell midpoints, reused across shots.
#[derive(Debug, Clone)]
pub(crate) struct SigmaTable {
    grid: GridSpec,
    nodes: Vec<f64>,
    mids: Vec<f64>,
}

impl SigmaTable {
    pub(crate) fn new(sigma: &Primitive, grid: &GridSpec) -> Self {
        let h = grid.step();
        let nodes = grid.nodes().iter().map(|&x| sigma.eval(x)).collect();
        let mids = (0..grid.n_points() - 1)
            .map(|i| sigma.eval(grid.node(i) + 0.5 * h))
            .collect();
        Self {
            grid: *grid,
            nodes,
            mids,
        }
    }

    /// Classical RK4 over the grid; `visit(i, u, v)` sees every node.
    pub(crate) fn integrate(&self, energy: f64, mut visit: impl FnMut(usize, f64, f64)) {
        let h = self.grid.step();
        let rhs = |s: f64, u: f64, v: f64| {
            let du = s * u + v;
            (du, -s * du - energy * u)
        };
        let (mut u, mut v) = (1.0, 0.0);
        visit(0, u, v);
        for i in 0..self.grid.n_points() - 1 {
            let (s0, sm, s1) = (self.nodes[i], self.mids[i], self.nodes[i + 1]);
            let (k1u, k1v) = rhs(s0, u, v);
            let (k2u, k2v) = rhs(sm, u + 0.5 * h * k1u, v + 0.5 * h * k1v);
            let (k3u, k3v) = rhs(sm, u + 0.5 * h * k2u, v + 0.5 * h * k2v);
            let (k4u, k4v) = rhs(s1, u + h * k3u, v + h * k3v);
            u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            visit(i + 1, u, v);
        }
    }

    pub(crate) fn endpoint(&self, energy: f64) -> (f64, f64) {
        let mut end = (1.0, 0.0);
        self.integrate(energy, |_, u, v| end = (u, v));
        end
    }

    pub(crate) fn trajectory(&self, energy: f64) -> Trajectory {
        let n = self.grid.n_points();
        let mut u = Vec::with_capacity(n);
        let mut v = Vec::with_capacity(n);
        self.integrate(energy, |_, a, b| {
            u.push(a);
            v.push(b);
        });
        Trajectory {
            grid: self.grid,
            u,
            v,
        }
    }
}

/// Integrate the quasi-derivative system at spectral parameter `lambda`.
pub fn shoot(sigma: &Primitive, lambda: f64, grid: &GridSpec) -> Trajectory {
    shoot_energy(sigma, lambda * lambda, grid)
}

/// As [`shoot`], parametrised by `E = lambda^2` (negative values allowed).
pub fn shoot_energy(sigma: &Primitive, energy: f64, grid: &GridSpec) -> Trajectory {
    SigmaTable::new(sigma, grid).trajectory(energy)
}

fn boundary_value(bc: BoundaryParam, (u, v): (f64, f64)) -> f64 {
    match bc {
        BoundaryParam::Robin(h) => v - h * u,
        BoundaryParam::Dirichlet => u,
    }
}

/// `Delta(lambda)`; `lambda^2` is an eigenvalue iff it vanishes.
pub fn characteristic(sigma: &Primitive, bc: BoundaryParam, lambda: f64, grid: &GridSpec) -> f64 {
    let table = SigmaTable::new(sigma, grid);
    boundary_value(bc, table.endpoint(lambda * lambda))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Bisection stops once the bracket is narrower than this (in `lambda`).
    pub tolerance: f64,
    /// Sub-intervals scanned per unit of window half-width `pi/2`.
    pub scan_density: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            scan_density: 8,
        }
    }
}

const WINDOW_EPS: f64 = 1e-6;
const ZERO_CLAMP: f64 = 1e-5;

fn signed_energy(s: f64) -> f64 {
    s * s.abs()
}

fn seed(bc: BoundaryParam, n: usize) -> f64 {
    match bc {
        BoundaryParam::Robin(_) => PI * n as f64,
        BoundaryParam::Dirichlet => PI * (n as f64 + 0.5),
    }
}

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut fa: f64, mut b: f64, tol: f64) -> f64 {
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn locate_root(
    table: &SigmaTable,
    bc: BoundaryParam,
    n: usize,
    opts: &EigenOptions,
) -> Result<f64> {
    let centre = seed(bc, n);
    let delta = |s: f64| boundary_value(bc, table.endpoint(signed_energy(s)));
    // window widened twice before giving up
    for widen in 1..=3usize {
        let half = widen as f64 * PI / 2.0 - WINDOW_EPS;
        let pieces = opts.scan_density * widen * 2;
        let lo = centre - half;
        let step = 2.0 * half / pieces as f64;
        let samples: Vec<(f64, f64)> = (0..=pieces)
            .map(|k| {
                let s = lo + k as f64 * step;
                (s, delta(s))
            })
            .collect();
        let best = samples
            .windows(2)
            .filter(|w| w[0].1 == 0.0 || (w[0].1 < 0.0) != (w[1].1 < 0.0))
            .min_by(|p, q| {
                let dp = (0.5 * (p[0].0 + p[1].0) - centre).abs();
                let dq = (0.5 * (q[0].0 + q[1].0) - centre).abs();
                dp.total_cmp(&dq)
            });
        if let Some(w) = best {
            if w[0].1 == 0.0 {
                return Ok(w[0].0);
            }
            return Ok(bisect(&delta, w[0].0, w[0].1, w[1].0, opts.tolerance));
        }
    }
    Err(Error::BracketFailure { index: n })
}

/// The first `count` values `lambda_n` (square roots of eigenvalues), increasing.
pub fn eigenvalues(
    sigma: &Primitive,
    bc: BoundaryParam,
    count: usize,
    grid: &GridSpec,
) -> Result<Vec<f64>> {
    eigenvalues_with(sigma, bc, count, grid, &EigenOptions::default())
}

pub fn eigenvalues_with(
    sigma: &Primitive,
    bc: BoundaryParam,
    count: usize,
    grid: &GridSpec,
    opts: &EigenOptions,
) -> Result<Vec<f64>> {
    let energies = eigenenergies_with(sigma, bc, count, grid, opts)?;
    let mut out = Vec::with_capacity(count);
    for (n, energy) in energies.into_iter().enumerate() {
        let lambda = if energy < 0.0 {
            if energy < -ZERO_CLAMP * ZERO_CLAMP {
                return Err(Error::NegativeEigenvalue { energy });
            }
            0.0
        } else {
            energy.sqrt()
        };
        if out.last().is_some_and(|&prev| lambda <= prev) {
            return Err(Error::BracketFailure { index: n });
        }
        out.push(lambda);
    }
    Ok(out)
}

/// The first `count` eigenvalues `E_n = lambda_n^2` as computed, without clamping
/// small negative values to zero.
pub fn eigenenergies_with(
    sigma: &Primitive,
    bc: BoundaryParam,
    count: usize,
    grid: &GridSpec,
    opts: &EigenOptions,
) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::InvalidInput("eigenvalue count must be positive".into()));
    }
    let table = SigmaTable::new(sigma, grid);
    let roots: Vec<f64> = (0..count)
        .into_par_iter()
        .map(|n| locate_root(&table, bc, n, opts).map(signed_energy))
        .collect::<Result<_>>()?;
    if let Some(n) = roots.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::BracketFailure { index: n + 1 });
    }
    Ok(roots)
}

/// `alpha_n = ||u_n||^{-2}` with the eigenfunction normalised by `u_n(0) = sqrt 2`.
pub fn norming_constants(
    sigma: &Primitive,
    bc: BoundaryParam,
    lambdas: &[f64],
    grid: &GridSpec,
) -> Result<Vec<f64>> {
    let table = SigmaTable::new(sigma, grid);
    lambdas
        .par_iter()
        .map(|&lambda| {
            let traj = table.trajectory(lambda * lambda);
            let residual = boundary_value(bc, traj.end()).abs();
            if residual > 1e-6 * (1.0 + lambda.abs()) {
                return Err(Error::NotAnEigenvalue { lambda, residual });
            }
            let sq: Vec<f64> = traj.u.iter().map(|u| 2.0 * u * u).collect();
            Ok(1.0 / simpson(&sq, grid.step()))
        })
        .collect()
}

/// Eigenvalues together with their norming constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigensystem {
    pub lambdas: Vec<f64>,
    pub alphas: Vec<f64>,
}

pub fn eigensystem(
    sigma: &Primitive,
    bc: BoundaryParam,
    count: usize,
    grid: &GridSpec,
) -> Result<Eigensystem> {
    let lambdas = eigenvalues(sigma, bc, count, grid)?;
    let alphas = norming_constants(sigma, bc, &lambdas, grid)?;
    Ok(Eigensystem { lambdas, alphas })
}
