//! Forward and half-inverse spectral problems for Sturm-Liouville operators with
//! singular potentials.
//!
//! The operator is `-(y' - sigma y)' - sigma y' = lambda^2 y` on `(0, 1)` with
//! `y^[1](0) = 0` and `y^[1](1) = h y(1)`, where `y^[1] = y' - sigma y` is the
//! quasi-derivative and `sigma` is an `L2` primitive of the potential. Only
//! pointwise values of `sigma` are ever used, so step functions and other rough
//! primitives are fine.
//!
//! The half-inverse problem takes `sigma` on `(0, 1/2)` and the full spectrum and
//! returns `sigma` on `(0, 1)` and `h`:
//!
//! ```no_run
//! use halfinv::{reconstruct, Primitive, ReconstructConfig, SpectralSequence};
//!
//! let sigma0 = Primitive::example_gamma(0.5)?;
//! let result = reconstruct(&sigma0, &SpectralSequence::harmonic(), &ReconstructConfig::default())?;
//! println!("h = {}", result.h);
//! # Ok::<(), halfinv::Error>(())
//! ```

pub mod basis;
pub mod cli;
pub mod error;
pub mod forward;
pub mod glm;
pub mod grid;
mod linalg;
pub mod model;
pub mod oracle;
pub mod transform;

pub use basis::{
    expand, gram_matrix, local_existence_check, membership_check, psi_lambda,
    regularity_diagnostic, synthesize, Expansion, MembershipReport, RegularityClass,
};
pub use error::{Error, Result};
pub use forward::{
    characteristic, eigensystem, eigenvalues, eigenvalues_with, norming_constants, shoot, BoundaryParam,
    Eigensystem, Trajectory,
};
pub use glm::{
    extend_phi, f_phi, glm_solve, positivity_check, reconstruct, recover_h, sigma_from_kernel,
    KernelMethod, PhiExtension, ReconstructConfig, ReconstructionResult,
};
pub use grid::{integrate, l2_norm, GridSpec, SampledFunction};
pub use model::{lambda_at, CoefficientSequence, Primitive, SpectralSequence, Tail};
pub use oracle::GammaFamily;
pub use transform::{collocation_kernel, goursat_kernel, phi0, KernelTriangle};
