//! Interacting stochastic flows with common noise.
//!
//! This crate simulates flows `x ↦ X_t(x)` driven by measure-dependent drift
//! and diffusion coefficients, where every starting point shares one Brownian
//! path and the coefficients see the pushforward of an initial mass
//! distribution through the flow itself.  Pushing a weighted particle
//! ensemble through the flow yields the measure path `μ_t = μ_0 ∘ X_t(·)^{-1}`,
//! which solves the associated conservative stochastic PDE in its weak
//! formulation — [`weakform`] checks that identity numerically.
//!
//! On top of the solvers the crate provides the small-noise machinery:
//! the deterministic skeleton equation driven by an `L²` control
//! ([`flow::solve_skeleton`]), the control energy `½∫‖h‖²dt` and its
//! constrained minimization defining rate functions ([`ratefn`]), and Monte
//! Carlo harnesses that verify the expected `ε → 0` asymptotics and estimate
//! rare-event probabilities by exponential tilting ([`ldp`]).
//!
//! The numerical building blocks are deliberately plain: weighted empirical
//! measures with exact or entropic Wasserstein-2 distances ([`measure`]),
//! mode-truncated noise from a counter-based generator ([`noise`]), explicit
//! Euler–Maruyama and Heun steppers ([`flow`]).  Everything is deterministic
//! given a seed, independent of worker count.
//!
//! See the book under `book/` for a guided tour; its code snippets are
//! compiled and run as doc-tests of this crate.

pub mod coeff;
pub mod flow;
pub mod ldp;
pub mod measure;
pub mod noise;
pub mod ratefn;
pub mod rng;
pub mod stats;
pub mod weakform;

mod error;

pub use error::{Error, Result};

/// Version tag stamped into serialized reports.
pub const SCHEMA_VERSION: u32 = 1;

// Book chapters double as doc-tests so the guide cannot drift from the API.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }

    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(measures, "../../../book/src/measures.md");
    chapter!(coefficients, "../../../book/src/coefficients.md");
    chapter!(noise_chapter, "../../../book/src/noise.md");
    chapter!(flows, "../../../book/src/flows.md");
    chapter!(weak_formulation, "../../../book/src/weak-formulation.md");
    chapter!(rate_functions, "../../../book/src/rate-functions.md");
    chapter!(rare_events, "../../../book/src/rare-events.md");
    chapter!(cli, "../../../book/src/cli.md");
}
