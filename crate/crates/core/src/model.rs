//! The potential and spectrum data model: primitives `sigma`, target spectra and
//! coefficient sequences with exact tails.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, SampledFunction};
use crate::oracle::GammaFamily;

/// `sigma(x) = \int_0^x q` for a piecewise-linear `q`, evaluated exactly for the
/// interpolant.
#[derive(Debug, Clone, PartialEq)]
pub struct Antiderivative {
    q: SampledFunction,
    prefix: Vec<f64>,
}

impl Antiderivative {
    pub fn new(q: SampledFunction) -> Result<Self> {
        if q.grid().start() != 0.0 {
            return Err(Error::InvalidInput(
                "antiderivative data must start at x = 0".into(),
            ));
        }
        let h = q.grid().step();
        let v = q.values();
        let mut prefix = Vec::with_capacity(v.len());
        prefix.push(0.0);
        for i in 1..v.len() {
            prefix.push(prefix[i - 1] + 0.5 * h * (v[i - 1] + v[i]));
        }
        Ok(Self { q, prefix })
    }

    pub fn derivative(&self) -> &SampledFunction {
        &self.q
    }

    pub fn eval(&self, x: f64) -> f64 {
        let grid = self.q.grid();
        let v = self.q.values();
        let (i, s) = grid.locate(x);
        let h = grid.step();
        // exact integral of the linear piece over [x_i, x_i + s h]
        let partial = h * (s * v[i] + 0.5 * s * s * (v[i + 1] - v[i]));
        let beyond = if x > grid.end() {
            (x - grid.end()) * v[v.len() - 1]
        } else {
            0.0
        };
        self.prefix[i] + partial + beyond
    }
}

/// The primitive `sigma` of the potential, the single coefficient of the operator.
#[derive(Debug, Clone, PartialEq)]
pub enum Primitive {
    Zero,
    Sampled(SampledFunction),
    AntiderivativeOf(Antiderivative),
    ExampleGamma(GammaFamily),
}

impl Primitive {
    pub fn sampled(f: SampledFunction) -> Self {
        Primitive::Sampled(f)
    }

    pub fn antiderivative_of(q: SampledFunction) -> Result<Self> {
        Ok(Primitive::AntiderivativeOf(Antiderivative::new(q)?))
    }

    pub fn example_gamma(gamma: f64) -> Result<Self> {
        Ok(Primitive::ExampleGamma(GammaFamily::new(gamma)?))
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Primitive::Zero => 0.0,
            Primitive::Sampled(f) => f.eval(x),
            Primitive::AntiderivativeOf(a) => a.eval(x),
            Primitive::ExampleGamma(g) => {
                let gamma = g.gamma();
                2.0 * gamma / (1.0 - gamma * x) - gamma
            }
        }
    }

    pub fn sample(&self, grid: GridSpec) -> SampledFunction {
        SampledFunction::from_fn(grid, |x| self.eval(x))
    }

    /// The regular representation `(q, sigma(0))` with `sigma = sigma(0) + \int q`,
    /// when one is available.
    pub fn derivative(&self, grid: GridSpec) -> Option<(SampledFunction, f64)> {
        match self {
            Primitive::Zero => Some((SampledFunction::zeros(grid), 0.0)),
            Primitive::AntiderivativeOf(a) => Some((a.derivative().clone(), 0.0)),
            Primitive::ExampleGamma(g) => {
                let gamma = g.gamma();
                let q = SampledFunction::from_fn(grid, |x| {
                    2.0 * gamma * gamma / (1.0 - gamma * x).powi(2)
                });
                Some((q, gamma))
            }
            Primitive::Sampled(_) => None,
        }
    }
}

/// Asymptotic model for `lambda_n` beyond the explicit head.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    /// `lambda_n = pi n`
    ExactPi,
    /// `lambda_n = pi n + c / n`
    Coulomb(f64),
}

/// Square roots `lambda_n` of a target spectrum: a finite head plus an analytic tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpectrum", into = "RawSpectrum")]
pub struct SpectralSequence {
    head: Vec<f64>,
    tail: Tail,
}

#[derive(Serialize, Deserialize)]
struct RawSpectrum {
    head: Vec<f64>,
    tail: Tail,
}

impl TryFrom<RawSpectrum> for SpectralSequence {
    type Error = Error;
    fn try_from(raw: RawSpectrum) -> Result<Self> {
        SpectralSequence::new(raw.head, raw.tail)
    }
}

impl From<SpectralSequence> for RawSpectrum {
    fn from(s: SpectralSequence) -> Self {
        RawSpectrum {
            head: s.head,
            tail: s.tail,
        }
    }
}

impl SpectralSequence {
    pub fn new(head: Vec<f64>, tail: Tail) -> Result<Self> {
        if head.is_empty() {
            return Err(Error::InvalidSpectrum("head must contain lambda_0".into()));
        }
        if head.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpectrum("non-finite entry in head".into()));
        }
        if head[0] < 0.0 {
            return Err(Error::InvalidSpectrum(format!(
                "lambda_0 = {} is negative",
                head[0]
            )));
        }
        if let Some(w) = head.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSpectrum(format!(
                "head not strictly increasing at index {}",
                w + 1
            )));
        }
        let n = head.len();
        if let Tail::Coulomb(c) = tail {
            if !c.is_finite() {
                return Err(Error::InvalidSpectrum("non-finite Coulomb constant".into()));
            }
            // pi n + c/n is increasing for n >= N + 1 iff c < pi (N+1)(N+2)
            if c >= PI * (n as f64) * (n as f64 + 1.0) {
                return Err(Error::InvalidSpectrum(format!(
                    "Coulomb constant {c} breaks monotonicity of the tail"
                )));
            }
        }
        let seq = Self { head, tail };
        let last = seq.head[n - 1];
        if seq.lambda_at(n) <= last {
            return Err(Error::InvalidSpectrum(
                "head and tail do not join increasingly".into(),
            ));
        }
        Ok(seq)
    }

    /// `lambda_n = pi n` for all `n`.
    pub fn harmonic() -> Self {
        Self {
            head: vec![0.0],
            tail: Tail::ExactPi,
        }
    }

    pub fn head(&self) -> &[f64] {
        &self.head
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    pub fn coulomb_constant(&self) -> f64 {
        match self.tail {
            Tail::ExactPi => 0.0,
            Tail::Coulomb(c) => c,
        }
    }

    pub fn lambda_at(&self, n: usize) -> f64 {
        match self.head.get(n) {
            Some(&v) => v,
            None => {
                let base = PI * n as f64;
                match self.tail {
                    Tail::ExactPi => base,
                    Tail::Coulomb(c) => base + c / n as f64,
                }
            }
        }
    }

    /// `mu_n = lambda_n - pi n`
    pub fn mu_at(&self, n: usize) -> f64 {
        self.lambda_at(n) - PI * n as f64
    }

    pub fn lambdas(&self, count: usize) -> Vec<f64> {
        (0..count).map(|n| self.lambda_at(n)).collect()
    }

    /// `l2` norm of `(mu_n)`, with the Coulomb tail summed in closed form.
    pub fn mu_l2_norm(&self) -> f64 {
        let n = self.head.len();
        let head: f64 = (0..n).map(|k| self.mu_at(k).powi(2)).sum();
        let c = self.coulomb_constant();
        let partial: f64 = (1..n).map(|k| 1.0 / (k as f64 * k as f64)).sum();
        let tail = c * c * (PI * PI / 6.0 - partial).max(0.0);
        (head + tail).sqrt()
    }
}

pub fn lambda_at(spectrum: &SpectralSequence, n: usize) -> f64 {
    spectrum.lambda_at(n)
}

/// `alpha_n` (or any sequence) with a finite head and tail value exactly 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSequence {
    head: Vec<f64>,
}

impl CoefficientSequence {
    pub fn new(head: Vec<f64>) -> Self {
        Self { head }
    }

    pub fn head(&self) -> &[f64] {
        &self.head
    }

    pub fn at(&self, n: usize) -> f64 {
        self.head.get(n).copied().unwrap_or(1.0)
    }

    pub fn min_head(&self) -> f64 {
        self.head.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_at_examples() {
        let s = SpectralSequence::harmonic();
        assert_eq!(s.lambda_at(1000), 1000.0 * PI);
        let s = SpectralSequence::new(vec![0.1, 3.3], Tail::ExactPi).unwrap();
        assert_eq!(s.lambda_at(1), 3.3);
        let s = SpectralSequence::new(vec![0.0], Tail::Coulomb(0.5)).unwrap();
        assert!((s.lambda_at(100) - (100.0 * PI + 0.005)).abs() < 1e-12);
    }

    #[test]
    fn spectrum_validation() {
        assert!(SpectralSequence::new(vec![], Tail::ExactPi).is_err());
        assert!(SpectralSequence::new(vec![-0.1], Tail::ExactPi).is_err());
        assert!(SpectralSequence::new(vec![0.0, 3.0, 2.9], Tail::ExactPi).is_err());
        // head overruns the tail: lambda_1 = 3.5 > lambda_2 would need 2 pi
        assert!(SpectralSequence::new(vec![0.0, 7.0], Tail::ExactPi).is_err());
        assert!(SpectralSequence::new(vec![0.0], Tail::Coulomb(100.0)).is_err());
    }

    #[test]
    fn monotone_scan() {
        for s in [
            SpectralSequence::harmonic(),
            SpectralSequence::new(vec![0.2, 3.0, 6.4], Tail::Coulomb(1.3)).unwrap(),
            SpectralSequence::new(vec![0.0, 3.2], Tail::Coulomb(-0.8)).unwrap(),
        ] {
            let n = s.head().len();
            let l = s.lambdas(2 * n + 20);
            assert!(l.windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn mu_norm_with_coulomb_tail() {
        let s = SpectralSequence::new(vec![0.0], Tail::Coulomb(0.3)).unwrap();
        let brute: f64 = (1..2_000_000).map(|n| (0.3 / n as f64).powi(2)).sum();
        assert!((s.mu_l2_norm() - brute.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn gamma_primitive_closed_form() {
        let p = Primitive::example_gamma(0.5).unwrap();
        for x in [0.0, 0.2, 0.5, 1.0] {
            assert_eq!(p.eval(x), 1.0 / (1.0 - 0.5 * x) - 0.5);
        }
        assert!(Primitive::example_gamma(2.0).is_err());
        assert!(Primitive::example_gamma(-0.1).is_err());
    }

    #[test]
    fn antiderivative_matches_quadrature() {
        let g = GridSpec::new(65, 0.0, 0.5).unwrap();
        let q = SampledFunction::from_fn(g, |x| 1.0 + x);
        let p = Primitive::antiderivative_of(q).unwrap();
        for x in [0.0, 0.1234, 0.25, 0.5] {
            assert!((p.eval(x) - (x + x * x / 2.0)).abs() < 1e-12);
        }
        let shifted = SampledFunction::from_fn(GridSpec::new(5, 0.1, 0.5).unwrap(), |_| 1.0);
        assert!(Primitive::antiderivative_of(shifted).is_err());
    }

    #[test]
    fn coefficient_tail_is_one() {
        let c = CoefficientSequence::new(vec![0.5, 0.9]);
        assert_eq!(c.at(1), 0.9);
        assert_eq!(c.at(7), 1.0);
        assert_eq!(c.min_head(), 0.5);
    }
}
