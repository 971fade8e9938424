//! Simulation and analysis toolkit for a single-photon source built on
//! Rydberg-exciton blockade in cuprous oxide.
//!
//! The crate is organized bottom-up:
//!
//! - [`exciton`]: static exciton properties and calibration constants
//!   (radius, energy, linewidth, blockade volume, C₃, site lattice).
//! - [`lindblad`]: a dense few-level Lindblad solver (Liouvillian, adaptive
//!   time evolution, steady states, regression-theorem correlations).
//! - [`emitter`]: closed-form and numerical results for the blockaded
//!   effective two-level emitter (population, linewidth, g₂(τ), spectrum).
//! - [`blockade`]: imperfect-blockade analysis from pairwise double
//!   excitations.
//! - [`config`], [`sweep`], [`optimize`], [`emit`]: the parameter record,
//!   figure sweeps, operating-point report, grid optimizer and CSV/JSON
//!   output used by the `cuprite` command-line tool.
//!
//! Units: lengths in μm, volumes in μm³, every rate or frequency (Ω, Ω′, Γ,
//! Δω, V_ij) in GHz used as one consistent rate unit, energies in eV.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blockade;
pub mod config;
pub mod emit;
pub mod emitter;
mod error;
pub mod exciton;
pub mod lindblad;
pub mod optimize;
pub mod sweep;

pub use error::{Error, Result};
