//! Joint power allocation, DC bias and beamforming when the eavesdropper's
//! channel is known: closed-form message powers and bias, SDR or
//! zero-forcing beamforming, and a bisection on the destination's VLC power.

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{ChannelSet, VlcFrontEnd};
use crate::link::{
    check_feasibility, half_log2_1p, harvested_pair, inner, noma_rates, secrecy_ratio, BeamLoad,
    Feasibility, FeasibilityLimits, LinkParams, PowerAllocation, RateBundle, VlcSystemConstants,
};
use crate::sdp::{
    clip_to_caps, extract_rank_one, gaussian_randomization, solve_secrecy_cc_sdp,
    BeamformerSolution, Hermitian2, SdpStatus,
};
use crate::{CVec2, Complex};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeamMethod {
    Sdr,
    Zf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnownCsiConfig {
    /// Entrusted-user QoS, bits/s/Hz.
    pub r_th: f64,
    pub method: BeamMethod,
    /// Stop once `|η·R_s − min R_{ui→D}| ≤ bisection_tol`.
    pub bisection_tol: f64,
    pub max_iters: usize,
    /// Candidates drawn when the relaxed solution is not rank one.
    pub randomization_samples: usize,
}

impl Default for KnownCsiConfig {
    fn default() -> Self {
        Self {
            r_th: 2.0,
            method: BeamMethod::Sdr,
            bisection_tol: 1e-4,
            max_iters: 40,
            randomization_samples: 1000,
        }
    }
}

impl KnownCsiConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_th >= 0.0) {
            return Err(Error::invalid("r_th", "must be non-negative"));
        }
        if !(self.bisection_tol > 0.0) || self.max_iters == 0 {
            return Err(Error::invalid("bisection", "tolerance and max_iters must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnownCsiSolution {
    pub pa: PowerAllocation,
    pub beam: BeamformerSolution,
    /// End-to-end secrecy rate `min(R_s,RF, min R_{ui→D}/η)`.
    pub secrecy_rate: f64,
    /// Secrecy rate of the RF hop alone.
    pub rf_secrecy_rate: f64,
    pub rate_bundle: RateBundle,
    pub harvested: [f64; 2],
    pub iterations: usize,
    /// Bracket `[G(R_s⁰), (I_H/2 − √p1 − √p2)²]` searched for `pd`.
    pub pd_interval: (f64, f64),
    /// The residual tolerance was met (or the upper end of the bracket is optimal).
    pub converged: bool,
    /// Even the largest `pd` leaves the relay hop as the bottleneck.
    pub vlc_limited: bool,
    pub sdp_status: Option<SdpStatus>,
    /// Zero-forcing had no eavesdropper to null and fell back to MRT.
    pub zf_degenerate: bool,
}

impl KnownCsiSolution {
    /// `|η·R_s − min R_{ui→D}|` of the end-to-end rate.
    pub fn relay_residual(&self, eta: f64) -> f64 {
        (eta * self.secrecy_rate - self.rate_bundle.min_relay()).abs()
    }

    pub fn feasibility(&self, params: &LinkParams, r_th: f64) -> Feasibility {
        let limits = FeasibilityLimits {
            max_current: params.fe.max_current,
            r_th,
            relay_floor: params.k.eta * self.secrecy_rate,
            rel_tol: 1e-8,
        };
        let p = self.beam.power_per_user();
        let load = BeamLoad { used: p, available: self.harvested };
        check_feasibility(&self.pa, &self.rate_bundle, &limits, Some(&load))
    }
}

/// Smallest message powers meeting `R_{u1}, R_{u2} ≥ r_th`.
pub fn optimal_message_powers(
    ch: &ChannelSet,
    r_th: f64,
    k: &VlcSystemConstants,
    fe: &VlcFrontEnd,
) -> Result<(f64, f64)> {
    if !(ch.h2 > 0.0) {
        return Err(Error::InfeasibleChannel);
    }
    let g1 = k.vlc_scale(ch.h1, fe);
    let g2 = k.vlc_scale(ch.h2, fe);
    let q = 2f64.powf(2.0 * r_th) - 1.0;
    let p1 = k.sigma_v_sq * q / g1;
    let p2 = q * (k.sigma_v_sq + g2 * p1) / g2;
    Ok((p1, p2))
}

/// Largest DC bias compatible with the peak-current limit.
pub fn dc_bias_from_powers(p1: f64, p2: f64, pd: f64, fe: &VlcFrontEnd) -> Result<f64> {
    let used = p1.sqrt() + p2.sqrt() + pd.sqrt();
    let b = fe.max_current - used;
    let floor = fe.max_current / 2.0;
    // One ulp of slack so that pd = headroom² stays feasible.
    if b < floor * (1.0 - 4.0 * f64::EPSILON) {
        return Err(Error::QosInfeasible { required: used, available: floor });
    }
    Ok(b.max(floor))
}

/// Null-space beamformer `w = a·(h_{E,2}*, −h_{E,1}*)` at the largest scale
/// the per-user caps allow. Returns the MRT beamformer and `true` when
/// `h_E = 0`.
pub fn zf_beamformer(ch: &ChannelSet, pr1: f64, pr2: f64) -> (BeamformerSolution, bool) {
    let (e1, e2) = (ch.h_e[0].norm(), ch.h_e[1].norm());
    if e1 == 0.0 && e2 == 0.0 {
        return (mrt_beamformer(&ch.h_d, [pr1, pr2]), true);
    }
    let bound = |cap: f64, g: f64| if g > 0.0 { cap.max(0.0).sqrt() / g } else { f64::INFINITY };
    let a = bound(pr1, e2).min(bound(pr2, e1));
    let w = CVec2::new(ch.h_e[1].conj() * a, -ch.h_e[0].conj() * a);
    let mut sol = BeamformerSolution::from_w(w, 0.0);
    sol.a = a;
    (sol, false)
}

/// Full-power beamformer phase-aligned with `h`.
pub(crate) fn mrt_beamformer(h: &CVec2, caps: [f64; 2]) -> BeamformerSolution {
    let w = CVec2::from_fn(|i, _| {
        let g = h[i].norm();
        if g > 0.0 {
            h[i] * (caps[i].max(0.0).sqrt() / g)
        } else {
            Complex::new(0.0, 0.0)
        }
    });
    BeamformerSolution::from_w(w, 0.0)
}

struct InnerSolve {
    beam: BeamformerSolution,
    rf_rate: f64,
    status: Option<SdpStatus>,
    degenerate: bool,
}

fn sdr_beam<R: Rng + ?Sized>(
    ch: &ChannelSet,
    caps: [f64; 2],
    sigma_sq: f64,
    samples: usize,
    rng: &mut R,
) -> (CVec2, SdpStatus) {
    let h_d = Hermitian2::outer(&ch.h_d);
    let h_e = Hermitian2::outer(&ch.h_e);
    let out = solve_secrecy_cc_sdp(&h_d, &h_e, caps[0], caps[1], sigma_sq);
    let w_mat = if out.scalar > 0.0 {
        out.matrix.scale(1.0 / out.scalar)
    } else {
        out.matrix
    };
    let w = match out.status {
        SdpStatus::Optimal => clip_to_caps(&extract_rank_one(&w_mat).vector, caps),
        _ => {
            let obj = |w: &CVec2| secrecy_ratio(w, &ch.h_d, &ch.h_e, sigma_sq);
            gaussian_randomization(&w_mat, caps, obj, samples, rng)
        }
    };
    (w, out.status)
}

fn inner_solve<R: Rng + ?Sized>(
    ch: &ChannelSet,
    caps: [f64; 2],
    cfg: &KnownCsiConfig,
    k: &VlcSystemConstants,
    rng: &mut R,
) -> InnerSolve {
    let (mut beam, status, degenerate) = match cfg.method {
        BeamMethod::Sdr => {
            let (w, status) = sdr_beam(ch, caps, k.sigma_rf_sq, cfg.randomization_samples, rng);
            (BeamformerSolution::from_w(w, 0.0), Some(status), false)
        }
        BeamMethod::Zf => {
            let (b, degenerate) = zf_beamformer(ch, caps[0], caps[1]);
            (b, None, degenerate)
        }
    };
    let ratio = secrecy_ratio(&beam.w, &ch.h_d, &ch.h_e, k.sigma_rf_sq);
    beam.achieved_objective = ratio;
    let rf_rate = (0.5 * ratio.log2()).max(0.0);
    InnerSolve { beam, rf_rate, status, degenerate }
}

struct Point {
    pa: PowerAllocation,
    rates: RateBundle,
    harvested: [f64; 2],
    inner: InnerSolve,
    /// `η·R_s,RF − min R_{ui→D}`; non-increasing in `pd`.
    indicator: f64,
}

impl Point {
    fn end_to_end(&self, eta: f64) -> f64 {
        self.inner.rf_rate.min(self.rates.min_relay() / eta)
    }
}

fn evaluate<R: Rng + ?Sized>(
    ch: &ChannelSet,
    p1: f64,
    p2: f64,
    pd: f64,
    cfg: &KnownCsiConfig,
    params: &LinkParams,
    iteration: usize,
    rng: &mut R,
) -> Result<Point> {
    let b = dc_bias_from_powers(p1, p2, pd, &params.fe)?;
    let pa = PowerAllocation { p1, p2, pd, dc_bias: b };
    let harvested = harvested_pair(ch, b, &params.eh, &params.fe);
    let inner = inner_solve(ch, harvested, cfg, &params.k, rng);
    if !inner.rf_rate.is_finite() {
        return Err(Error::Solver {
            iteration,
            reason: format!("non-finite secrecy rate at pd = {pd:e}"),
        });
    }
    let rates = noma_rates(&pa, ch, &params.k, &params.fe);
    let indicator = params.k.eta * inner.rf_rate - rates.min_relay();
    Ok(Point { pa, rates, harvested, inner, indicator })
}

/// Lower end of the `pd` bracket: the power at which the weaker relay link
/// reaches `2^{η·R_s⁰} − 1` SNR.
pub fn pd_lower_bound(
    ch: &ChannelSet,
    p1: f64,
    p2: f64,
    rs0: f64,
    k: &VlcSystemConstants,
    fe: &VlcFrontEnd,
) -> f64 {
    let q = 2f64.powf(k.eta * rs0) - 1.0;
    [ch.h1, ch.h2]
        .into_iter()
        .map(|h| {
            let g = k.vlc_scale(h, fe);
            q * (k.sigma_v_sq + g * (p1 + p2)) / g
        })
        .fold(0.0, f64::max)
}

/// Bisection on `pd` with an SDR or ZF beamformer at every step.
pub fn solve_known_csi<R: Rng + ?Sized>(
    ch: &ChannelSet,
    cfg: &KnownCsiConfig,
    params: &LinkParams,
    rng: &mut R,
) -> Result<KnownCsiSolution> {
    cfg.validate()?;
    let (fe, k) = (&params.fe, &params.k);
    let (p1, p2) = optimal_message_powers(ch, cfg.r_th, k, fe)?;
    let headroom = fe.max_current / 2.0 - p1.sqrt() - p2.sqrt();
    if headroom < 0.0 {
        return Err(Error::QosInfeasible {
            required: p1.sqrt() + p2.sqrt(),
            available: fe.max_current / 2.0,
        });
    }
    let pd_hi = headroom * headroom;
    let top = evaluate(ch, p1, p2, pd_hi, cfg, params, 0, rng)?;
    let pd_lo = pd_lower_bound(ch, p1, p2, top.inner.rf_rate, k, fe).min(pd_hi);
    let interval = (pd_lo, pd_hi);

    let finish = |pt: Point, iterations: usize, converged: bool, vlc_limited: bool| {
        let secrecy_rate = pt.end_to_end(k.eta);
        KnownCsiSolution {
            pa: pt.pa,
            beam: pt.inner.beam,
            secrecy_rate,
            rf_secrecy_rate: pt.inner.rf_rate,
            rate_bundle: pt.rates,
            harvested: pt.harvested,
            iterations,
            pd_interval: interval,
            converged,
            vlc_limited,
            sdp_status: pt.inner.status,
            zf_degenerate: pt.inner.degenerate,
        }
    };

    if top.indicator >= 0.0 {
        return Ok(finish(top, 1, true, true));
    }

    let mut lo_pt = evaluate(ch, p1, p2, pd_lo, cfg, params, 0, rng)?;
    if lo_pt.indicator < 0.0 {
        log::warn!(
            "bisection bracket not monotone: indicator {:.3e} at the lower end",
            lo_pt.indicator
        );
    }
    let mut hi_pt = top;
    let (mut a1, mut a2) = (pd_lo, pd_hi);
    for it in 1..=cfg.max_iters {
        let mid = 0.5 * (a1 + a2);
        let pt = evaluate(ch, p1, p2, mid, cfg, params, it, rng)?;
        if pt.indicator.abs() <= cfg.bisection_tol {
            return Ok(finish(pt, it + 2, true, false));
        }
        if pt.indicator < 0.0 {
            a2 = mid;
            hi_pt = pt;
        } else {
            a1 = mid;
            lo_pt = pt;
        }
    }
    log::debug!("bisection stopped after {} iterations", cfg.max_iters);
    let best = if lo_pt.end_to_end(k.eta) >= hi_pt.end_to_end(k.eta) { lo_pt } else { hi_pt };
    Ok(finish(best, cfg.max_iters + 2, false, false))
}

/// SNR of the eavesdropper under a beamformer, for diagnostics.
pub fn eavesdropper_snr(w: &CVec2, ch: &ChannelSet, k: &VlcSystemConstants) -> f64 {
    inner(&ch.h_e, w).norm_sqr() / k.sigma_rf_sq
}

/// RF rate of the destination under a beamformer, bits/s/Hz.
pub fn destination_rate(w: &CVec2, ch: &ChannelSet, k: &VlcSystemConstants) -> f64 {
    half_log2_1p(inner(&ch.h_d, w).norm_sqr() / k.sigma_rf_sq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::RfModel;
    use crate::link::EnergyHarvestParams;

    fn params() -> LinkParams {
        LinkParams::new(
            &VlcFrontEnd::default(),
            &RfModel::default(),
            &EnergyHarvestParams::default(),
            0.8,
        )
        .unwrap()
    }

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn message_power_reference_values() {
        let p = params();
        let ch = ChannelSet { h1: 2.066e-5, h2: 2.066e-5, h_d: CVec2::zeros(), h_e: CVec2::zeros() };
        let (p1, p2) = optimal_message_powers(&ch, 2.0, &p.k, &p.fe).unwrap();
        assert!((p1 - 4.274e-4).abs() / 4.274e-4 < 5e-4, "{p1}");
        assert!((p2 - 6.84e-3).abs() / 6.84e-3 < 5e-4, "{p2}");
        assert_eq!(optimal_message_powers(&ch, 0.0, &p.k, &p.fe).unwrap(), (0.0, 0.0));
        let dead = ChannelSet { h2: 0.0, ..ch };
        assert!(matches!(
            optimal_message_powers(&dead, 1.0, &p.k, &p.fe),
            Err(Error::InfeasibleChannel)
        ));
    }

    #[test]
    fn bias_cases() {
        let fe = VlcFrontEnd::default();
        assert_eq!(dc_bias_from_powers(0.0, 0.0, 0.0, &fe).unwrap(), 0.6);
        let b = dc_bias_from_powers(0.01, 0.01, 0.01, &fe).unwrap();
        assert!((b - 0.3).abs() < 1e-15);
        let p = (0.35f64 / 3.0).powi(2);
        assert!(matches!(
            dc_bias_from_powers(p, p, p, &fe),
            Err(Error::QosInfeasible { .. })
        ));
    }

    #[test]
    fn zf_nulls_the_eavesdropper() {
        let ch = ChannelSet {
            h1: 1.0,
            h2: 1.0,
            h_d: CVec2::new(c(1.0, 0.0), c(0.0, 1.0)),
            h_e: CVec2::new(c(1.0, 0.0), c(1.0, 0.0)),
        };
        let (b, degenerate) = zf_beamformer(&ch, 2.0, 2.0);
        assert!(!degenerate);
        assert_eq!(b.a, 2f64.sqrt());
        assert_eq!(inner(&ch.h_e, &b.w).norm(), 0.0);
        assert!((b.w[0] + b.w[1]).norm() < 1e-15);

        let none = ChannelSet { h_e: CVec2::zeros(), ..ch };
        let (b, degenerate) = zf_beamformer(&none, 2.0, 3.0);
        assert!(degenerate);
        assert!((b.w[0].norm_sqr() - 2.0).abs() < 1e-12);
        assert!((b.w[1].norm_sqr() - 3.0).abs() < 1e-12);
    }
}
