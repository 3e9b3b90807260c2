//! Uniform grids, composite quadrature and piecewise-linear sampled functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A uniform grid `x_i = a + i (b - a) / (n - 1)` with an odd number of nodes,
/// so that composite Simpson applies on every grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    n_points: usize,
    a: f64,
    b: f64,
}

impl GridSpec {
    pub fn new(n_points: usize, a: f64, b: f64) -> Result<Self> {
        if n_points < 5 || n_points.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "node count must be odd and at least 5, got {n_points}"
            )));
        }
        if !a.is_finite() || !b.is_finite() || b <= a {
            return Err(Error::InvalidGrid(format!("bad interval [{a}, {b}]")));
        }
        Ok(Self { n_points, a, b })
    }

    /// Grid on `[0, 1]`.
    pub fn unit(n_points: usize) -> Result<Self> {
        Self::new(n_points, 0.0, 1.0)
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn start(&self) -> f64 {
        self.a
    }

    pub fn end(&self) -> f64 {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn step(&self) -> f64 {
        (self.b - self.a) / (self.n_points - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.b
        } else {
            self.a + i as f64 * self.step()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.node(i)).collect()
    }

    /// Same interval with every cell split into `factor` cells.
    pub fn refined(&self, factor: usize) -> Self {
        let factor = factor.max(1);
        Self {
            n_points: (self.n_points - 1) * factor + 1,
            a: self.a,
            b: self.b,
        }
    }

    /// Grid with the same step on `[a, a + scale * (b - a)]`.
    pub fn stretched(&self, scale: usize) -> Self {
        let scale = scale.max(1);
        Self {
            n_points: (self.n_points - 1) * scale + 1,
            a: self.a,
            b: self.a + scale as f64 * (self.b - self.a),
        }
    }

    pub fn simpson_weights(&self) -> Vec<f64> {
        let h = self.step();
        let n = self.n_points;
        (0..n)
            .map(|i| {
                let c = if i == 0 || i + 1 == n {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                c * h / 3.0
            })
            .collect()
    }

    pub fn trapezoid_weights(&self) -> Vec<f64> {
        trapezoid_weights(self.n_points, self.step())
    }

    /// Index of the cell containing `x` and the local coordinate in `[0, 1]`.
    /// Points outside the interval are clamped.
    pub fn locate(&self, x: f64) -> (usize, f64) {
        let h = self.step();
        let s = ((x - self.a) / h).clamp(0.0, (self.n_points - 1) as f64);
        let i = (s.floor() as usize).min(self.n_points - 2);
        (i, s - i as f64)
    }
}

/// Trapezoid weights for `count` equispaced values with spacing `step`.
/// A single node gets weight zero.
pub fn trapezoid_weights(count: usize, step: f64) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => {
            let mut w = vec![step; count];
            w[0] = 0.5 * step;
            w[count - 1] = 0.5 * step;
            w
        }
    }
}

/// Fourth-order weights for `count` equispaced values: Gregory end corrections
/// `(3/8, 7/6, 23/24)` when `count >= 6`, closed Newton-Cotes rules below that.
pub fn gregory_weights(count: usize, step: f64) -> Vec<f64> {
    let rule: &[f64] = match count {
        0..=2 => return trapezoid_weights(count, step),
        3 => &[1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0],
        4 => &[3.0 / 8.0, 9.0 / 8.0, 9.0 / 8.0, 3.0 / 8.0],
        5 => &[14.0 / 45.0, 64.0 / 45.0, 24.0 / 45.0, 64.0 / 45.0, 14.0 / 45.0],
        _ => {
            let mut w = vec![step; count];
            for (i, c) in [3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0].into_iter().enumerate() {
                w[i] = c * step;
                w[count - 1 - i] = c * step;
            }
            return w;
        }
    };
    rule.iter().map(|c| c * step).collect()
}

pub fn trapezoid(values: &[f64], step: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => step * (0.5 * (values[0] + values[n - 1]) + values[1..n - 1].iter().sum::<f64>()),
    }
}

/// Composite Simpson for an odd number of equispaced values.
pub fn simpson(values: &[f64], step: f64) -> f64 {
    let n = values.len();
    debug_assert!(n % 2 == 1, "simpson needs an odd number of samples");
    if n < 3 {
        return 0.0;
    }
    let mut odd = 0.0;
    let mut even = 0.0;
    for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    step / 3.0 * (values[0] + values[n - 1] + 4.0 * odd + 2.0 * even)
}

/// Real samples on a [`GridSpec`], evaluated between nodes by linear interpolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    grid: GridSpec,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::InvalidInput(format!(
                "{} samples for a grid of {} nodes",
                values.len(),
                grid.n_points()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().into_iter().map(f).collect();
        Self { grid, values }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.n_points()],
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Piecewise-linear evaluation, clamped to the end values outside the grid.
    pub fn eval(&self, x: f64) -> f64 {
        let (i, s) = self.grid.locate(x);
        (1.0 - s) * self.values[i] + s * self.values[i + 1]
    }

    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = self
            .grid
            .nodes()
            .into_iter()
            .zip(&self.values)
            .map(|(x, &v)| f(x, v))
            .collect();
        Self {
            grid: self.grid,
            values,
        }
    }

    pub fn resample(&self, grid: GridSpec) -> Self {
        Self::from_fn(grid, |x| self.eval(x))
    }

    /// Composite Simpson over the whole grid.
    pub fn integrate(&self) -> f64 {
        simpson(&self.values, self.grid.step())
    }

    pub fn l2_norm(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|v| v * v).collect();
        simpson(&sq, self.grid.step()).max(0.0).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Composite-Simpson integral of a sampled function.
pub fn integrate(f: &SampledFunction) -> f64 {
    f.integrate()
}

/// `L2` norm over the function's domain.
pub fn l2_norm(f: &SampledFunction) -> f64 {
    f.l2_norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(4, 0.0, 1.0).is_err());
        assert!(GridSpec::new(3, 0.0, 1.0).is_err());
        assert!(GridSpec::new(5, 1.0, 1.0).is_err());
        assert!(GridSpec::new(5, 0.0, f64::NAN).is_err());
        let g = GridSpec::new(5, 0.0, 2.0).unwrap();
        assert_eq!(g.nodes(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(g.refined(4).n_points(), 17);
        assert_eq!(g.stretched(2).end(), 4.0);
    }

    #[test]
    fn integrate_examples() {
        let g = GridSpec::unit(5).unwrap();
        assert_eq!(SampledFunction::from_fn(g, |_| 1.0).integrate(), 1.0);
        assert!((SampledFunction::from_fn(g, |x| x).integrate() - 0.5).abs() < 1e-15);
        let g = GridSpec::unit(257).unwrap();
        let f = SampledFunction::from_fn(g, |x| (PI * x).cos().powi(2));
        assert!((f.integrate() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn l2_norm_examples() {
        let g = GridSpec::unit(257).unwrap();
        assert_eq!(SampledFunction::zeros(g).l2_norm(), 0.0);
        assert!((SampledFunction::from_fn(g, |_| 1.0).l2_norm() - 1.0).abs() < 1e-14);
        let f = SampledFunction::from_fn(g, |x| 2f64.sqrt() * (PI * x).cos());
        assert!((f.l2_norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn linear_interpolation_and_clamping() {
        let g = GridSpec::unit(5).unwrap();
        let f = SampledFunction::from_fn(g, |x| 4.0 * x);
        assert!((f.eval(0.3) - 1.2).abs() < 1e-14);
        assert_eq!(f.eval(-1.0), 0.0);
        assert_eq!(f.eval(2.0), 4.0);
        assert!(SampledFunction::new(g, vec![0.0; 4]).is_err());
    }

    #[test]
    fn trapezoid_small_counts() {
        assert_eq!(trapezoid(&[], 0.1), 0.0);
        assert_eq!(trapezoid(&[3.0], 0.1), 0.0);
        assert!((trapezoid(&[1.0, 1.0, 1.0], 0.5) - 1.0).abs() < 1e-15);
        assert_eq!(trapezoid_weights(1, 0.3), vec![0.0]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn simpson_exact_on_cubics(
                c in proptest::array::uniform4(-10.0f64..10.0),
                a in -3.0f64..3.0,
                len in 0.1f64..5.0,
                half in 2usize..40,
            ) {
                let g = GridSpec::new(2 * half + 1, a, a + len).unwrap();
                let p = |x: f64| c[0] + c[1] * x + c[2] * x * x + c[3] * x * x * x;
                let prim = |x: f64| {
                    c[0] * x + c[1] * x * x / 2.0 + c[2] * x.powi(3) / 3.0 + c[3] * x.powi(4) / 4.0
                };
                let exact = prim(a + len) - prim(a);
                let got = SampledFunction::from_fn(g, p).integrate();
                let scale = c.iter().map(|v| v.abs()).sum::<f64>() * (1.0 + a.abs() + len).powi(4) * len;
                prop_assert!((got - exact).abs() <= 1e-12 * scale.max(1.0));
            }

            #[test]
            fn gregory_exact_on_cubics(
                c in proptest::array::uniform4(-10.0f64..10.0),
                count in 3usize..60,
            ) {
                let h = 1.0 / (count - 1) as f64;
                let w = gregory_weights(count, h);
                let got: f64 = w
                    .iter()
                    .enumerate()
                    .map(|(i, w)| {
                        let x = i as f64 * h;
                        w * (c[0] + c[1] * x + c[2] * x * x + c[3] * x * x * x)
                    })
                    .sum();
                let exact = c[0] + c[1] / 2.0 + c[2] / 3.0 + c[3] / 4.0;
                prop_assert!((got - exact).abs() < 1e-12);
            }
        }
    }
}
