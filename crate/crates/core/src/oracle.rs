//! Closed-form fixtures for the explicitly solvable family
//! `sigma_gamma(x) = 2 gamma / (1 - gamma x) - gamma` with harmonic spectrum, and
//! the elementary trigonometric inequality used to bound `psi_Lambda`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameter of the closed-form family, `0 <= gamma < 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaFamily {
    gamma: f64,
}

impl GammaFamily {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(0.0..2.0).contains(&gamma) {
            return Err(Error::InvalidInput(format!(
                "gamma must lie in [0, 2), got {gamma}"
            )));
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// The half-inverse problem with harmonic spectrum is solvable iff `gamma < 1`.
    pub fn solvable(&self) -> bool {
        self.gamma < 1.0
    }

    /// Value of the first norming constant implied by `phi_0 = -gamma/2`.
    pub fn alpha0(&self) -> f64 {
        (1.0 - self.gamma) / 2.0
    }
}

fn check_pole(gamma: f64, x: f64) -> Result<()> {
    let product = gamma * x;
    if product >= 1.0 {
        Err(Error::PoleReached { product })
    } else {
        Ok(())
    }
}

pub fn sigma_gamma(gamma: f64, x: f64) -> Result<f64> {
    check_pole(gamma, x)?;
    Ok(2.0 * gamma / (1.0 - gamma * x) - gamma)
}

/// Kernel of `K_sigma`: `k(x, t) = gamma / (1 - gamma x)`.
pub fn kernel_k_gamma(gamma: f64, x: f64, _t: f64) -> f64 {
    gamma / (1.0 - gamma * x)
}

/// Kernel of `L_0`: `l(x, t) = -gamma / (1 - gamma t)`.
pub fn kernel_l_gamma(gamma: f64, _x: f64, t: f64) -> f64 {
    -gamma / (1.0 - gamma * t)
}

pub fn h_gamma(gamma: f64) -> Result<f64> {
    if gamma >= 1.0 {
        return Err(Error::InvalidInput(format!(
            "h_gamma needs gamma < 1, got {gamma}"
        )));
    }
    Ok(-gamma * gamma / (1.0 - gamma))
}

/// `w_0 = 1/(1 - gamma x)`, `w_n = cos(pi n x) + (gamma/(pi n)) sin(pi n x)/(1 - gamma x)`.
pub fn eigenfunction_gamma(gamma: f64, n: usize, x: f64) -> Result<f64> {
    check_pole(gamma, x)?;
    let d = 1.0 - gamma * x;
    if n == 0 {
        return Ok(1.0 / d);
    }
    let w = PI * n as f64;
    Ok((w * x).cos() + gamma / w * (w * x).sin() / d)
}

/// Quasi-derivative `w' - sigma w` of [`eigenfunction_gamma`].
pub fn eigenfunction_gamma_quasi(gamma: f64, n: usize, x: f64) -> Result<f64> {
    check_pole(gamma, x)?;
    let d = 1.0 - gamma * x;
    let sigma = 2.0 * gamma / d - gamma;
    if n == 0 {
        let w = 1.0 / d;
        let dw = gamma / (d * d);
        return Ok(dw - sigma * w);
    }
    let k = PI * n as f64;
    let (s, c) = (k * x).sin_cos();
    let w = c + gamma / k * s / d;
    let dw = -k * s + gamma * c / d + gamma * gamma / k * s / (d * d);
    Ok(dw - sigma * w)
}

/// `|cos(a + b) - cos a + b sin a|`, bounded by `b^2 / sqrt 3`.
pub fn trig_defect(a: f64, b: f64) -> f64 {
    ((a + b).cos() - a.cos() + b * a.sin()).abs()
}

pub fn trig_defect_bound(b: f64) -> f64 {
    b * b / 3f64.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma_gamma(0.5, 0.0).unwrap(), 0.5);
        assert_eq!(sigma_gamma(0.0, 0.7).unwrap(), 0.0);
        assert!((sigma_gamma(0.5, 1.0).unwrap() - 1.5).abs() < 1e-15);
        // sigma(1) = (gamma + gamma^2) / (1 - gamma)
        let g: f64 = 0.3;
        assert!((sigma_gamma(g, 1.0).unwrap() - (g + g * g) / (1.0 - g)).abs() < 1e-14);
        assert!(matches!(sigma_gamma(1.5, 1.0), Err(Error::PoleReached { .. })));
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_k_gamma(0.5, 1.0, 0.0), 1.0);
        assert_eq!(kernel_k_gamma(0.0, 0.3, 0.1), 0.0);
        assert!((kernel_l_gamma(0.5, 0.5, 0.25) + 4.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn h_examples() {
        assert_eq!(h_gamma(0.5).unwrap(), -0.5);
        assert_eq!(h_gamma(0.0).unwrap(), 0.0);
        assert!((h_gamma(0.75).unwrap() + 2.25).abs() < 1e-14);
        assert!(h_gamma(1.0).is_err());
    }

    #[test]
    fn eigenfunction_examples() {
        assert_eq!(eigenfunction_gamma(0.5, 0, 1.0).unwrap(), 2.0);
        assert_eq!(eigenfunction_gamma(0.5, 3, 0.0).unwrap(), 1.0);
        let w = eigenfunction_gamma(0.5, 1, 0.5).unwrap();
        assert!((w - 2.0 / (3.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn eigenfunctions_satisfy_boundary_conditions() {
        let g = 0.5;
        let h = h_gamma(g).unwrap();
        for n in 0..6 {
            // y^[1](0) = 0 and y^[1](1) = h y(1)
            assert!(eigenfunction_gamma_quasi(g, n, 0.0).unwrap().abs() < 1e-14);
            let w1 = eigenfunction_gamma(g, n, 1.0).unwrap();
            let v1 = eigenfunction_gamma_quasi(g, n, 1.0).unwrap();
            assert!((v1 - h * w1).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn trig_defect_examples() {
        assert_eq!(trig_defect(1.3, 0.0), 0.0);
        assert!((trig_defect(0.0, PI) - 2.0).abs() < 1e-15);
        assert!(trig_defect(0.0, PI) <= trig_defect_bound(PI));
    }

    #[test]
    fn family_flags() {
        assert!(GammaFamily::new(0.99).unwrap().solvable());
        assert!(!GammaFamily::new(1.0).unwrap().solvable());
        assert_eq!(GammaFamily::new(1.5).unwrap().alpha0(), -0.25);
        assert!(GammaFamily::new(2.0).is_err());
    }
}
