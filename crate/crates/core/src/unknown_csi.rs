//! Designs for an eavesdropper whose channel is known only statistically:
//! a full-power MRT baseline and two artificial-noise schemes, scored by the
//! secrecy rate averaged over eavesdropper draws.

use rand::{Rng, RngCore};

use crate::config::ClampMode;
use crate::error::{Error, Result};
use crate::geometry::{sample_rf_channel, ChannelSet, Deployment, Position3D, RfModel, VlcFrontEnd};
use crate::known_csi::{dc_bias_from_powers, mrt_beamformer, optimal_message_powers};
use crate::link::{
    an_rf_secrecy_terms, half_log2_1p, harvested_pair, inner, noma_rates, LinkParams,
    PowerAllocation, RateBundle, VlcSystemConstants,
};
use crate::sdp::{
    clip_to_caps, extract_rank_one, solve_an_power_sdp, AnSdpOptions, BeamformerSolution,
    Hermitian2, SdpStatus,
};
use crate::CVec2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnknownMethod {
    BaselineMrt,
    AnSdr,
    AnMrt,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnknownCsiConfig {
    pub r_th: f64,
    /// Destination QoS, bits/s/Hz.
    pub r_th_d: f64,
    pub method: UnknownMethod,
    /// Radius of the eavesdropper ring, m.
    pub eav_distance_min: f64,
    pub expectation_samples: usize,
    pub an: AnSdpOptions,
    pub clamp: ClampMode,
}

impl Default for UnknownCsiConfig {
    fn default() -> Self {
        Self {
            r_th: 2.0,
            r_th_d: 2.0,
            method: UnknownMethod::AnSdr,
            eav_distance_min: 4.0,
            expectation_samples: 500,
            an: AnSdpOptions::default(),
            clamp: ClampMode::default(),
        }
    }
}

impl UnknownCsiConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_th >= 0.0 && self.r_th_d >= 0.0) {
            return Err(Error::invalid("r_th", "QoS thresholds must be non-negative"));
        }
        if self.expectation_samples == 0 {
            return Err(Error::invalid("expectation_samples", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnknownCsiSolution {
    pub method: UnknownMethod,
    pub pa: PowerAllocation,
    pub beam: BeamformerSolution,
    pub harvested: [f64; 2],
    pub rate_bundle: RateBundle,
    /// Destination RF rate, bits/s/Hz.
    pub dest_rate: f64,
    /// Filled in by [`expected_secrecy_rate`].
    pub avg_secrecy_rate: Option<f64>,
    /// The relaxed problem was infeasible and the plan fell back to MRT
    /// without jamming.
    pub an_infeasible: bool,
    pub sdp_status: Option<SdpStatus>,
}

/// Smallest `pd` giving both relay links the SNR `2^{η·r_th_d} − 1`.
pub fn pd_star_unknown(
    ch: &ChannelSet,
    r_th_d: f64,
    eta: f64,
    p1: f64,
    p2: f64,
    k: &VlcSystemConstants,
    fe: &VlcFrontEnd,
) -> f64 {
    let q = 2f64.powf(eta * r_th_d) - 1.0;
    [ch.h1, ch.h2]
        .into_iter()
        .map(|h| {
            let g = k.vlc_scale(h, fe);
            q * (k.sigma_v_sq + g * (p1 + p2)) / g
        })
        .fold(0.0, f64::max)
}

fn solution(
    method: UnknownMethod,
    ch: &ChannelSet,
    pa: PowerAllocation,
    harvested: [f64; 2],
    beam: BeamformerSolution,
    params: &LinkParams,
) -> UnknownCsiSolution {
    let rate_bundle = noma_rates(&pa, ch, &params.k, &params.fe);
    let dest_rate = half_log2_1p(inner(&ch.h_d, &beam.w).norm_sqr() / params.k.sigma_rf_sq);
    UnknownCsiSolution {
        method,
        pa,
        beam,
        harvested,
        rate_bundle,
        dest_rate,
        avg_secrecy_rate: None,
        an_infeasible: false,
        sdp_status: None,
    }
}

/// All harvested power on the destination's message, phase-aligned with `h_D`.
pub fn baseline_mrt_plan(
    ch: &ChannelSet,
    cfg: &UnknownCsiConfig,
    params: &LinkParams,
) -> Result<UnknownCsiSolution> {
    cfg.validate()?;
    let fe = &params.fe;
    let (p1, p2) = optimal_message_powers(ch, cfg.r_th, &params.k, fe)?;
    let headroom = fe.max_current / 2.0 - p1.sqrt() - p2.sqrt();
    if headroom < 0.0 {
        return Err(Error::QosInfeasible {
            required: p1.sqrt() + p2.sqrt(),
            available: fe.max_current / 2.0,
        });
    }
    let b = fe.max_current / 2.0;
    let pa = PowerAllocation { p1, p2, pd: headroom * headroom, dc_bias: b };
    let harvested = harvested_pair(ch, b, &params.eh, fe);
    let beam = mrt_beamformer(&ch.h_d, harvested);
    Ok(solution(UnknownMethod::BaselineMrt, ch, pa, harvested, beam, params))
}

/// First-hop allocation shared by both artificial-noise plans.
fn an_first_hop(
    ch: &ChannelSet,
    cfg: &UnknownCsiConfig,
    params: &LinkParams,
) -> Result<(PowerAllocation, [f64; 2])> {
    let (fe, k) = (&params.fe, &params.k);
    let (p1, p2) = optimal_message_powers(ch, cfg.r_th, k, fe)?;
    let pd = pd_star_unknown(ch, cfg.r_th_d, k.eta, p1, p2, k, fe);
    let b = dc_bias_from_powers(p1, p2, pd, fe)?;
    let pa = PowerAllocation { p1, p2, pd, dc_bias: b };
    Ok((pa, harvested_pair(ch, b, &params.eh, fe)))
}

/// Jamming vector `β·(h_{D,2}*, −h_{D,1}*)`, orthogonal to `h_D`.
pub fn nulling_jammer(h_d: &CVec2, beta: f64) -> CVec2 {
    CVec2::new(h_d[1].conj() * beta, -h_d[0].conj() * beta)
}

/// Largest `β ≤ beta` whose jamming fits next to `w` in the caps.
fn fit_beta(h_d: &CVec2, w: &CVec2, caps: [f64; 2], beta: f64) -> f64 {
    let per_user = [h_d[1].norm_sqr(), h_d[0].norm_sqr()];
    (0..2)
        .filter(|&i| per_user[i] > 0.0)
        .map(|i| ((caps[i] - w[i].norm_sqr()).max(0.0) / per_user[i]).sqrt())
        .fold(beta, f64::min)
}

fn qos_gain(r_th_d: f64, sigma_sq: f64) -> f64 {
    sigma_sq * (2f64.powf(2.0 * r_th_d) - 1.0)
}

/// Artificial noise with an SDR-designed beam: the relaxed power problem
/// gives `β` and `W`, and `w` is the principal component of `W`.
pub fn an_sdr_plan(
    ch: &ChannelSet,
    cfg: &UnknownCsiConfig,
    params: &LinkParams,
) -> Result<UnknownCsiSolution> {
    cfg.validate()?;
    let (pa, caps) = an_first_hop(ch, cfg, params)?;
    let sigma_sq = params.k.sigma_rf_sq;
    let out = solve_an_power_sdp(
        &Hermitian2::outer(&ch.h_d),
        &ch.h_d,
        caps[0],
        caps[1],
        cfg.r_th_d,
        sigma_sq,
        cfg.an,
    );
    if out.status == SdpStatus::Infeasible {
        let beam = mrt_beamformer(&ch.h_d, caps);
        let mut sol = solution(UnknownMethod::AnSdr, ch, pa, caps, beam, params);
        sol.an_infeasible = true;
        sol.sdp_status = Some(out.status);
        return Ok(sol);
    }

    let need = qos_gain(cfg.r_th_d, sigma_sq);
    let beta0 = out.scalar;
    let residual = |beta: f64| {
        [caps[0] - beta * beta * ch.h_d[1].norm_sqr(), caps[1] - beta * beta * ch.h_d[0].norm_sqr()]
    };
    let w = clip_to_caps(&extract_rank_one(&out.matrix).vector, residual(beta0));
    let meets_qos = inner(&ch.h_d, &w).norm_sqr() >= need * (1.0 - 1e-9);
    let mut sol = if meets_qos {
        let beta = fit_beta(&ch.h_d, &w, caps, beta0);
        let mut beam = BeamformerSolution::from_w(w, beta);
        beam.beta = beta;
        beam.n_a = nulling_jammer(&ch.h_d, beta);
        solution(UnknownMethod::AnSdr, ch, pa, caps, beam, params)
    } else {
        // The phase-aligned beam under the same caps reaches the largest
        // destination gain, so it is the natural recovery.
        log::debug!("relaxed AN solution not rank one (ratio {:.2e})", out.eigen_ratio);
        let mut s = an_mrt_core(ch, cfg, pa, caps, params)?;
        s.method = UnknownMethod::AnSdr;
        s
    };
    sol.sdp_status = Some(out.status);
    Ok(sol)
}

/// Largest `α_i` for user `i` once `β` is spent on jamming.
fn alpha_max(caps: [f64; 2], g: [f64; 2], beta: f64) -> Option<[f64; 2]> {
    let r = [caps[0] - beta * beta * g[1], caps[1] - beta * beta * g[0]];
    if r[0] < 0.0 || r[1] < 0.0 {
        return None;
    }
    Some([0, 1].map(|i| if g[i] > 0.0 { (r[i] / g[i]).sqrt() } else { 0.0 }))
}

fn an_mrt_core(
    ch: &ChannelSet,
    cfg: &UnknownCsiConfig,
    pa: PowerAllocation,
    caps: [f64; 2],
    params: &LinkParams,
) -> Result<UnknownCsiSolution> {
    let g = [ch.h_d[0].norm_sqr(), ch.h_d[1].norm_sqr()];
    let need = qos_gain(cfg.r_th_d, params.k.sigma_rf_sq).sqrt();
    let feasible = |beta: f64| match alpha_max(caps, g, beta) {
        Some(a) => a[0] * g[0] + a[1] * g[1] >= need,
        None => false,
    };
    if !feasible(0.0) {
        return Err(Error::DestinationQosUnreachable { r_th_d: cfg.r_th_d });
    }
    let beta_cap = |cap: f64, gi: f64| if gi > 0.0 { (cap / gi).sqrt() } else { f64::INFINITY };
    let mut hi = beta_cap(caps[0], g[1]).min(beta_cap(caps[1], g[0]));
    let beta = if feasible(hi) {
        hi
    } else {
        let mut lo = 0.0;
        while hi - lo > 1e-15 * hi {
            let mid = 0.5 * (lo + hi);
            if feasible(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let alpha = alpha_max(caps, g, beta).unwrap_or([0.0; 2]);
    let w = CVec2::new(ch.h_d[0] * alpha[0], ch.h_d[1] * alpha[1]);
    let mut beam = BeamformerSolution::from_w(w, beta);
    beam.beta = beta;
    beam.alpha = alpha;
    beam.n_a = nulling_jammer(&ch.h_d, beta);
    Ok(solution(UnknownMethod::AnMrt, ch, pa, caps, beam, params))
}

/// Artificial noise with an MRT beam: bisection on `β` with the closed-form
/// largest MRT weights at each step.
pub fn an_mrt_plan(
    ch: &ChannelSet,
    cfg: &UnknownCsiConfig,
    params: &LinkParams,
) -> Result<UnknownCsiSolution> {
    cfg.validate()?;
    let (pa, caps) = an_first_hop(ch, cfg, params)?;
    an_mrt_core(ch, cfg, pa, caps, params)
}

pub fn plan(
    ch: &ChannelSet,
    cfg: &UnknownCsiConfig,
    params: &LinkParams,
) -> Result<UnknownCsiSolution> {
    match cfg.method {
        UnknownMethod::BaselineMrt => baseline_mrt_plan(ch, cfg, params),
        UnknownMethod::AnSdr => an_sdr_plan(ch, cfg, params),
        UnknownMethod::AnMrt => an_mrt_plan(ch, cfg, params),
    }
}

/// Source of eavesdropper channel realizations.
pub trait EavesdropperSampler {
    fn sample(&self, rng: &mut dyn RngCore) -> Result<CVec2>;
}

impl<F> EavesdropperSampler for F
where
    F: Fn(&mut dyn RngCore) -> CVec2,
{
    fn sample(&self, rng: &mut dyn RngCore) -> Result<CVec2> {
        Ok(self(rng))
    }
}

/// Eavesdropper on a ring around the disk center at a uniformly random
/// azimuth, with fresh fading and shadowing on every draw.
#[derive(Debug, Clone)]
pub struct RingEavesdropper {
    pub users: [Position3D; 2],
    pub deployment: Deployment,
    pub rf: RfModel,
    pub radius: f64,
}

impl EavesdropperSampler for RingEavesdropper {
    fn sample(&self, rng: &mut dyn RngCore) -> Result<CVec2> {
        let pos = self.deployment.point_on_ring(self.radius, rng);
        Ok(CVec2::new(
            sample_rf_channel(&self.users[0], &pos, &self.rf, rng)?,
            sample_rf_channel(&self.users[1], &pos, &self.rf, rng)?,
        ))
    }
}

/// Monte-Carlo average secrecy rate of a plan over `n` eavesdropper draws,
/// capped by the relay hop `min R_{ui→D}/η`.
pub fn expected_secrecy_rate<S, R>(
    sol: &UnknownCsiSolution,
    ch: &ChannelSet,
    sampler: &S,
    n: usize,
    clamp: ClampMode,
    k: &VlcSystemConstants,
    rng: &mut R,
) -> Result<f64>
where
    S: EavesdropperSampler + ?Sized,
    R: Rng,
{
    let n = n.max(1);
    let mut total = 0.0;
    let mut draw = ch.clone();
    for _ in 0..n {
        draw.h_e = sampler.sample(rng)?;
        let (dest, eav) = an_rf_secrecy_terms(&sol.beam.w, &sol.beam.n_a, &draw, k);
        let s = dest - eav;
        total += match clamp {
            ClampMode::PerDraw => s.max(0.0),
            ClampMode::AfterMean => s,
        };
    }
    let mean = (total / n as f64).max(0.0);
    Ok(mean.min(sol.rate_bundle.min_relay() / k.eta))
}
