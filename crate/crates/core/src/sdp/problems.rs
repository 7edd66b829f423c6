//! The two relaxed beamforming problems, built in power-normalized
//! coordinates `w = diag(√p1, √p2)·v` with channels scaled by `1/σ`. This
//! keeps every matrix entry near unity regardless of path loss.

use nalgebra::{DMatrix, DVector, Matrix4};

use super::hermitian::Hermitian2;
use super::ipm::{self, IpmSettings, IpmSolution, IpmStatus, SdpProblem};
use super::{SdpOutcome, SdpStatus};
use crate::CVec2;

/// Largest `λ2/λ1` accepted as rank one.
pub const RANK_ONE_THRESHOLD: f64 = 1e-6;
/// Largest relative duality gap reported as optimal.
const OPTIMAL_GAP: f64 = 1e-7;

const EMBEDDED: IpmSettings = IpmSettings {
    max_iters: 100,
    gap_tol: 1e-10,
    feas_tol: 1e-9,
    step_fraction: 0.98,
    hermitian_embedding: true,
};

fn half_embed(h: &Hermitian2) -> Matrix4<f64> {
    h.embed() * 0.5
}

fn status_of(sol: &IpmSolution, eigen_ratio: f64) -> SdpStatus {
    let certified = sol.status == IpmStatus::Converged
        || (sol.primal_residual <= OPTIMAL_GAP && sol.dual_residual <= OPTIMAL_GAP);
    if certified
        && sol.rel_gap <= OPTIMAL_GAP
        && eigen_ratio <= RANK_ONE_THRESHOLD
    {
        SdpStatus::Optimal
    } else {
        SdpStatus::NearRankOne
    }
}

fn eigen_ratio(h: &Hermitian2) -> f64 {
    let (l1, l2) = h.eigenvalues();
    if l1 <= 0.0 {
        0.0
    } else {
        (l2.max(0.0) / l1).min(1.0)
    }
}

/// Charnes-Cooper form of the secrecy-ratio maximization with the rank
/// constraint dropped:
///
/// max μσ² + tr(S H_D)  s.t.  μσ² + tr(S H_E) = 1,  tr(S E_i) ≤ μ·pr_i,  S ⪰ 0,  μ ≥ 0.
///
/// The returned matrix is `S` and the scalar is `μ`; `W = S/μ` is the relaxed
/// beamforming covariance.
pub fn solve_secrecy_cc_sdp(
    h_d: &Hermitian2,
    h_e: &Hermitian2,
    pr1: f64,
    pr2: f64,
    sigma_rf_sq: f64,
) -> SdpOutcome {
    if !(pr1 > 0.0 && pr2 > 0.0) {
        // Only w = 0 is feasible.
        return SdpOutcome {
            matrix: Hermitian2::zero(),
            scalar: 1.0 / sigma_rf_sq,
            objective: 1.0,
            status: SdpStatus::Optimal,
            duality_gap: 0.0,
            eigen_ratio: 0.0,
            iterations: 0,
        };
    }
    let (d0, d1) = (pr1.sqrt(), pr2.sqrt());
    let a = h_d.congruence_diag(d0, d1).scale(1.0 / sigma_rf_sq);
    let e = h_e.congruence_diag(d0, d1).scale(1.0 / sigma_rf_sq);

    // Scalars: [μ', s1, s2].
    let problem = SdpProblem {
        c_mat: -half_embed(&a),
        c_lin: DVector::from_vec(vec![-1.0, 0.0, 0.0]),
        a_mat: vec![
            half_embed(&e),
            half_embed(&Hermitian2::selector(0)),
            half_embed(&Hermitian2::selector(1)),
        ],
        a_lin: DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, -1.0, 1.0, 0.0, -1.0, 0.0, 1.0]),
        b: DVector::from_vec(vec![1.0, 0.0, 0.0]),
    };
    let sol = ipm::solve(&problem, &EMBEDDED);
    let s_norm = Hermitian2::from_embedding(&sol.x);
    let mu_norm = sol.x_lin[0];
    let objective = mu_norm + s_norm.trace_product(&a);

    let matrix = s_norm.congruence_diag(d0, d1).scale(1.0 / sigma_rf_sq);
    let ratio = eigen_ratio(&matrix);
    SdpOutcome {
        matrix,
        scalar: mu_norm / sigma_rf_sq,
        objective,
        status: status_of(&sol, ratio),
        duality_gap: sol.rel_gap,
        eigen_ratio: ratio,
        iterations: sol.iterations,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AnSdpOptions {
    /// Use `|h_{D,1}|²` as the jamming coefficient in both per-user power
    /// rows instead of the null-space pairing `|h_{D,2}|²`, `|h_{D,1}|²`.
    pub printed_power_rows: bool,
}

/// Jamming coefficients `c_i` in `tr(W E_i) + β² c_i ≤ pr_i`.
pub(crate) fn jamming_coefficients(h_d: &CVec2, opts: AnSdpOptions) -> [f64; 2] {
    let g1 = h_d[0].norm_sqr();
    let g2 = h_d[1].norm_sqr();
    if opts.printed_power_rows {
        [g1, g1]
    } else {
        [g2, g1]
    }
}

/// Artificial-noise power maximization with the rank constraint dropped:
///
/// max β  s.t.  tr(W E_i) + β² c_i ≤ pr_i,  tr(W H_D) ≥ σ²(2^{2 R_th,D} − 1),  W ⪰ 0.
///
/// Solved in `t = β²`. The returned matrix is `W` and the scalar is `β`.
pub fn solve_an_power_sdp(
    h_d_mat: &Hermitian2,
    h_d: &CVec2,
    pr1: f64,
    pr2: f64,
    rth_d: f64,
    sigma_rf_sq: f64,
    opts: AnSdpOptions,
) -> SdpOutcome {
    let infeasible = |iterations| SdpOutcome {
        matrix: Hermitian2::zero(),
        scalar: 0.0,
        objective: 0.0,
        status: SdpStatus::Infeasible,
        duality_gap: f64::NAN,
        eigen_ratio: 0.0,
        iterations,
    };
    if !(pr1 > 0.0 && pr2 > 0.0) {
        return infeasible(0);
    }
    let (d0, d1) = (pr1.sqrt(), pr2.sqrt());
    let a = h_d_mat.congruence_diag(d0, d1).scale(1.0 / sigma_rf_sq);
    let a_scale = a.trace();
    if !(a_scale > 0.0) {
        return infeasible(0);
    }
    let a = a.scale(1.0 / a_scale);
    let q = (2f64.powf(2.0 * rth_d) - 1.0) / a_scale;

    let sel = [half_embed(&Hermitian2::selector(0)), half_embed(&Hermitian2::selector(1))];

    // Largest reachable destination gain with all power on w.
    let phase1 = SdpProblem {
        c_mat: -half_embed(&a),
        c_lin: DVector::zeros(2),
        a_mat: sel.to_vec(),
        a_lin: DMatrix::identity(2, 2),
        b: DVector::from_vec(vec![1.0, 1.0]),
    };
    let p1 = ipm::solve(&phase1, &EMBEDDED);
    let best_gain = -p1.primal_obj;
    if best_gain < q * (1.0 - OPTIMAL_GAP) {
        return infeasible(p1.iterations);
    }
    if best_gain <= q * (1.0 + OPTIMAL_GAP) {
        // QoS needs the whole budget: no room for jamming.
        let w_norm = Hermitian2::from_embedding(&p1.x);
        let matrix = w_norm.congruence_diag(d0, d1);
        let ratio = eigen_ratio(&matrix);
        return SdpOutcome {
            matrix,
            scalar: 0.0,
            objective: 0.0,
            status: status_of(&p1, ratio),
            duality_gap: p1.rel_gap,
            eigen_ratio: ratio,
            iterations: p1.iterations,
        };
    }

    let c = jamming_coefficients(h_d, opts);
    let c_norm = [c[0] / pr1, c[1] / pr2];
    let c_max = c_norm[0].max(c_norm[1]);
    if !(c_max > 0.0) {
        return infeasible(p1.iterations);
    }
    let k = [c_norm[0] / c_max, c_norm[1] / c_max];

    // Scalars: [τ, u1, u2, u3] with τ = β²·c_max.
    let problem = SdpProblem {
        c_mat: Matrix4::zeros(),
        c_lin: DVector::from_vec(vec![-1.0, 0.0, 0.0, 0.0]),
        a_mat: vec![sel[0], sel[1], half_embed(&a)],
        a_lin: DMatrix::from_row_slice(
            3,
            4,
            &[k[0], 1.0, 0.0, 0.0, k[1], 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, -1.0],
        ),
        b: DVector::from_vec(vec![1.0, 1.0, q]),
    };
    let sol = ipm::solve(&problem, &EMBEDDED);
    let tau = sol.x_lin[0].max(0.0);
    let beta = (tau / c_max).sqrt();
    let matrix = Hermitian2::from_embedding(&sol.x).congruence_diag(d0, d1);
    let ratio = eigen_ratio(&matrix);
    SdpOutcome {
        matrix,
        scalar: beta,
        objective: beta,
        status: status_of(&sol, ratio),
        duality_gap: sol.rel_gap,
        eigen_ratio: ratio,
        iterations: sol.iterations + p1.iterations,
    }
}
