//! Semidefinite relaxations of the beamforming problems, rank-one recovery,
//! and brute-force oracles used to verify them.

mod hermitian;
pub mod ipm;
mod oracle;
mod problems;
mod rank_one;

pub use hermitian::Hermitian2;
pub use oracle::{an_beta_oracle, brute_force_oracle, max_destination_gain_oracle};
pub use problems::{solve_an_power_sdp, solve_secrecy_cc_sdp, AnSdpOptions, RANK_ONE_THRESHOLD};
pub(crate) use rank_one::clip_to_caps;
pub use rank_one::{extract_rank_one, fit_to_caps, gaussian_randomization, RankOne};

use crate::CVec2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    /// The solver stopped early or returned a matrix whose second
    /// eigenvalue is not negligible; callers fall back to randomization.
    NearRankOne,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpOutcome {
    /// `S` for the secrecy problem, `W` for the artificial-noise problem, in
    /// physical units (W).
    pub matrix: Hermitian2,
    /// `μ` (1/W) for the secrecy problem, `β` for the artificial-noise problem.
    pub scalar: f64,
    /// Relaxation value: the secrecy ratio, or `β`.
    pub objective: f64,
    pub status: SdpStatus,
    pub duality_gap: f64,
    /// `λ2/λ1` of the returned matrix.
    pub eigen_ratio: f64,
    pub iterations: usize,
}

/// RF-side decision of the entrusted users.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamformerSolution {
    pub w: CVec2,
    pub n_a: CVec2,
    /// Zero-forcing scale `a`.
    pub a: f64,
    /// Jamming scale `β`.
    pub beta: f64,
    /// MRT weights `α1, α2`.
    pub alpha: [f64; 2],
    pub achieved_objective: f64,
}

impl BeamformerSolution {
    pub fn from_w(w: CVec2, achieved_objective: f64) -> Self {
        Self {
            w,
            n_a: CVec2::zeros(),
            a: 0.0,
            beta: 0.0,
            alpha: [0.0; 2],
            achieved_objective,
        }
    }

    /// `|w_i|² + |n_{a,i}|²`.
    pub fn power_per_user(&self) -> [f64; 2] {
        [
            self.w[0].norm_sqr() + self.n_a[0].norm_sqr(),
            self.w[1].norm_sqr() + self.n_a[1].norm_sqr(),
        ]
    }

    pub fn within_caps(&self, caps: [f64; 2], rel_tol: f64) -> bool {
        let p = self.power_per_user();
        (0..2).all(|i| p[i] <= caps[i] * (1.0 + rel_tol))
    }
}
