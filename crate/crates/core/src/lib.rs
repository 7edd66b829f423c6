//! Secrecy-rate optimization for a cooperative-NOMA hybrid VLC/RF relay link.
//!
//! A VLC access point serves two entrusted users with NOMA; both harvest
//! energy from the DC bias of the light signal and forward a third user's
//! message over RF while an eavesdropper listens. The crate covers:
//!
//! - [`geometry`]: Lambertian VLC gains and indoor RF channel draws.
//! - [`link`]: NOMA rates, energy harvesting, wiretap secrecy rates, feasibility.
//! - [`sdp`]: a small dense interior-point SDP kernel, rank-one extraction,
//!   Gaussian randomization and brute-force verification oracles.
//! - [`known_csi`]: power allocation, DC bias and SDR/ZF beamforming with the
//!   bisection on the destination's VLC power.
//! - [`unknown_csi`]: MRT baseline and artificial-noise designs, evaluated by
//!   Monte-Carlo averaging over eavesdropper draws.
//! - [`config`], [`sweep`], [`report`]: scenario files, seeded sweeps, CSV and SVG.

pub mod config;
pub mod error;
pub mod geometry;
pub mod known_csi;
pub mod link;
pub mod report;
pub mod sdp;
pub mod sweep;
pub mod unknown_csi;

pub use error::{Error, Result};

/// Complex scalar used for RF channels and beamformers.
pub type Complex = nalgebra::Complex<f64>;
/// Complex 2-vector (one entry per entrusted user).
pub type CVec2 = nalgebra::Vector2<Complex>;
