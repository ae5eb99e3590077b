//! Numerical toolkit for the two-phase dielectric free-interface energy
//!
//! ```text
//! F(E, v) = gamma P(E, Omega) + integral_Omega sigma_E |Dv|^2 dx,
//! sigma_E = beta on E, alpha outside, 0 < alpha < beta.
//! ```
//!
//! The crate computes the objects this energy makes explicit:
//!
//! * [`legendre`] — the Legendre function `P_1/2` and its derivative,
//!   the special function behind separable conical potentials.
//! * [`cones`] — critical Taylor-cone angles from the transmission root
//!   equation, the fold threshold in the permittivity ratio, and the
//!   surface tension balancing a given critical cone.
//! * [`constants`] — every explicitly derivable constant of the elliptic
//!   regularity chain (Caccioppoli, reverse Holder, decay radii, the
//!   admissible-angle window, the dimensional ratio bound), many of which
//!   only fit in log10.
//! * [`pde`] — finite-difference transmission solves on half-space and
//!   cone geometries with energy, monotonicity, decay, flux-jump, and
//!   reverse-Holder diagnostics.
//! * [`minimizer`] — desk-scale alternating minimization of the
//!   volume-penalized interface energy on a 2D grid, with excess,
//!   density, and first-variation diagnostics.
//! * [`cli`] — the `taylor-cone` binary exposing each computation as a
//!   subcommand with machine-readable CSV/JSON output.
//!
//! Every runnable capability also has a standalone program under
//! `examples/`.

pub mod cli;
pub mod cones;
pub mod constants;
pub mod legendre;
pub mod minimizer;
pub mod pde;
