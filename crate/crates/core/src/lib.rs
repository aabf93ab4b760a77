//! Zeta-regularized determinants, local L-factors, and the special functions
//! behind them.
//!
//! The crate is organized in layers:
//!
//! * [`specfun`] — Hurwitz zeta with analytic continuation, its s-derivative at
//!   the origin, principal-branch log-gamma, and the q-Pochhammer / q-gamma pair.
//! * [`regdet`] — zeta-regularized determinants of arithmetic-progression
//!   spectra (half-line, full-line, constant) in closed form and through an
//!   independent Hurwitz-based numeric route, plus the disk determinant ratio.
//! * [`lfactor`] — local L-factors at real, complex, and non-archimedean places,
//!   the disk correlator that reproduces the real-place factor, and their
//!   q-deformations.
//! * [`volumes`] — finite-dimensional boson/fermion oracles: Gaussian integrals
//!   (eigenvalue and Monte Carlo routes), Berezin integrals over a symbolic
//!   Grassmann algebra, equivariant volumes, character traces, and the
//!   mode-factorized 3d partition function.
//! * [`verify`] / [`report`] — seeded cross-verification suites producing
//!   structured pass/fail reports.
//! * [`cli`] — the `lfactors` command-line front end.
//!
//! Branch convention used throughout: every complex power is principal,
//! `x^y = exp(y * Log x)` with `arg ∈ (-pi, pi]`. Operations return typed
//! errors at poles and domain boundaries; no NaN or infinity escapes a
//! successful call.

pub mod cli;
pub mod error;
pub mod grassmann;
pub mod lfactor;
pub mod linalg;
pub mod regdet;
pub mod report;
pub mod sampling;
pub mod specfun;
pub mod verify;
pub mod volumes;

pub use error::{MathError, Result};
