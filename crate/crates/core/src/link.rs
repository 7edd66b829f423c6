//! Rate, secrecy-rate, energy-harvesting and feasibility expressions for the
//! two-hop VLC/RF link.

use std::f64::consts::E;
use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::{ChannelSet, RfModel, VlcFrontEnd};
use crate::CVec2;

/// `½·log2(1 + snr)`, the real-valued channel rate in bits/s/Hz.
pub fn half_log2_1p(snr: f64) -> f64 {
    0.5 * snr.ln_1p() / std::f64::consts::LN_2
}

/// `a^H b` for complex 2-vectors.
pub fn inner(a: &CVec2, b: &CVec2) -> crate::Complex {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

/// VLC-side decision: peak message powers (A²) and the DC bias (A).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerAllocation {
    pub p1: f64,
    pub p2: f64,
    pub pd: f64,
    pub dc_bias: f64,
}

impl PowerAllocation {
    /// `√p1 + √p2 + √pd`, the peak amplitude carried on top of the bias.
    pub fn amplitude_sum(&self) -> f64 {
        self.p1.sqrt() + self.p2.sqrt() + self.pd.sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VlcSystemConstants {
    /// Capacity-bound constant `1/(2πe)` valid for `b ≥ I_H/2`.
    pub c_const: f64,
    /// RF-to-VLC bandwidth ratio.
    pub eta: f64,
    pub sigma_v_sq: f64,
    pub sigma_rf_sq: f64,
}

impl VlcSystemConstants {
    pub const C_CONST: f64 = 1.0 / (2.0 * PI * E);

    pub fn new(fe: &VlcFrontEnd, rf: &RfModel, eta: f64) -> Result<Self> {
        let k = Self {
            c_const: Self::C_CONST,
            eta,
            sigma_v_sq: fe.noise_variance(),
            sigma_rf_sq: rf.noise_power(),
        };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::invalid("eta", format!("must lie in (0, 1], got {}", self.eta)));
        }
        if !(self.sigma_v_sq > 0.0 && self.sigma_rf_sq > 0.0) {
            return Err(Error::invalid("noise", "variances must be positive"));
        }
        Ok(())
    }

    /// Effective electrical SNR scale `c·ρ²ν²·h²` of a VLC gain.
    pub fn vlc_scale(&self, h: f64, fe: &VlcFrontEnd) -> f64 {
        self.c_const * (fe.oe_factor * fe.eo_factor * h).powi(2)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyHarvestParams {
    pub fill_factor: f64,
    /// Thermal voltage, V.
    pub thermal_voltage: f64,
    /// Dark saturation current, A.
    pub dark_current: f64,
}

impl Default for EnergyHarvestParams {
    fn default() -> Self {
        Self {
            fill_factor: 0.75,
            thermal_voltage: 0.025,
            dark_current: 1e-10,
        }
    }
}

impl EnergyHarvestParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.fill_factor > 0.0 && self.fill_factor <= 1.0) {
            return Err(Error::invalid("fill_factor", "must lie in (0, 1]"));
        }
        if !(self.thermal_voltage > 0.0 && self.dark_current > 0.0) {
            return Err(Error::invalid("harvest", "thermal voltage and dark current must be positive"));
        }
        Ok(())
    }
}

/// Everything the optimizers need besides the channels.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkParams {
    pub fe: VlcFrontEnd,
    pub eh: EnergyHarvestParams,
    pub k: VlcSystemConstants,
}

impl LinkParams {
    pub fn new(fe: &VlcFrontEnd, rf: &RfModel, eh: &EnergyHarvestParams, eta: f64) -> Result<Self> {
        fe.validate()?;
        rf.validate()?;
        eh.validate()?;
        Ok(Self {
            fe: fe.clone(),
            eh: eh.clone(),
            k: VlcSystemConstants::new(fe, rf, eta)?,
        })
    }
}

/// Achievable NOMA rates at the entrusted users, bits/s/Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBundle {
    pub r_u1: f64,
    pub r_u2: f64,
    pub r_u1_to_d: f64,
    pub r_u2_to_d: f64,
}

impl RateBundle {
    pub fn min_relay(&self) -> f64 {
        self.r_u1_to_d.min(self.r_u2_to_d)
    }
}

pub fn noma_rates(
    pa: &PowerAllocation,
    ch: &ChannelSet,
    k: &VlcSystemConstants,
    fe: &VlcFrontEnd,
) -> RateBundle {
    let g1 = k.vlc_scale(ch.h1, fe);
    let g2 = k.vlc_scale(ch.h2, fe);
    let s = k.sigma_v_sq;
    RateBundle {
        r_u1: half_log2_1p(g1 * pa.p1 / s),
        r_u2: half_log2_1p(g2 * pa.p2 / (s + g2 * pa.p1)),
        r_u1_to_d: half_log2_1p(g1 * pa.pd / (s + g1 * (pa.p1 + pa.p2))),
        r_u2_to_d: half_log2_1p(g2 * pa.pd / (s + g2 * (pa.p1 + pa.p2))),
    }
}

/// Power harvested from the DC component of the received light, W.
pub fn harvested_power(h: f64, b: f64, eh: &EnergyHarvestParams, fe: &VlcFrontEnd) -> f64 {
    let i_dc = fe.oe_factor * fe.eo_factor * h * b;
    eh.fill_factor * i_dc * eh.thermal_voltage * (i_dc / eh.dark_current).ln_1p()
}

/// Harvested power at both entrusted users for a given bias.
pub fn harvested_pair(
    ch: &ChannelSet,
    b: f64,
    eh: &EnergyHarvestParams,
    fe: &VlcFrontEnd,
) -> [f64; 2] {
    [harvested_power(ch.h1, b, eh, fe), harvested_power(ch.h2, b, eh, fe)]
}

/// `(σ² + |h_D^H w|²) / (σ² + |h_E^H w|²)`.
pub fn secrecy_ratio(w: &CVec2, h_d: &CVec2, h_e: &CVec2, sigma_sq: f64) -> f64 {
    (sigma_sq + inner(h_d, w).norm_sqr()) / (sigma_sq + inner(h_e, w).norm_sqr())
}

/// Wiretap secrecy rate of the RF hop, floored at zero.
pub fn rf_secrecy_rate(w: &CVec2, ch: &ChannelSet, k: &VlcSystemConstants) -> f64 {
    let dest = half_log2_1p(inner(&ch.h_d, w).norm_sqr() / k.sigma_rf_sq);
    let eav = half_log2_1p(inner(&ch.h_e, w).norm_sqr() / k.sigma_rf_sq);
    (dest - eav).max(0.0)
}

/// Destination and eavesdropper rates when a jamming vector `n_a` is sent
/// alongside `w`. The jamming term is absent at the destination, which is the
/// case whenever `n_a` lies in the null space of `h_D`.
pub fn an_rf_secrecy_terms(
    w: &CVec2,
    n_a: &CVec2,
    ch: &ChannelSet,
    k: &VlcSystemConstants,
) -> (f64, f64) {
    let dest = half_log2_1p(inner(&ch.h_d, w).norm_sqr() / k.sigma_rf_sq);
    let jam = inner(&ch.h_e, n_a).norm_sqr();
    let eav = half_log2_1p(inner(&ch.h_e, w).norm_sqr() / (k.sigma_rf_sq + jam));
    (dest, eav)
}

/// Bounds that a candidate operating point must respect.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityLimits {
    pub max_current: f64,
    /// Entrusted-user QoS threshold, bits/s/Hz.
    pub r_th: f64,
    /// Lower bound on both relay rates `R_{ui→D}`.
    pub relay_floor: f64,
    /// Relative tolerance used on every comparison.
    pub rel_tol: f64,
}

/// RF power actually used versus harvested at each entrusted user, W.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamLoad {
    pub used: [f64; 2],
    pub available: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    NonNegativePower,
    PeakAmplitude,
    DcBiasLower,
    DcBiasUpper,
    UserQos(usize),
    RelayRate(usize),
    BeamPower(usize),
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::NonNegativePower => write!(f, "non-negative powers"),
            Constraint::PeakAmplitude => write!(f, "sqrt(p1)+sqrt(p2)+sqrt(pd) <= I_H - b"),
            Constraint::DcBiasLower => write!(f, "b >= I_H/2"),
            Constraint::DcBiasUpper => write!(f, "b <= I_H"),
            Constraint::UserQos(i) => write!(f, "R_u{i} >= R_th"),
            Constraint::RelayRate(i) => write!(f, "R_u{i}->D >= relay floor"),
            Constraint::BeamPower(i) => write!(f, "RF power at user {i} <= harvested"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub constraint: Constraint,
    /// Left-hand side of the `value <= bound` form of the constraint.
    pub value: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Feasibility {
    pub violations: Vec<Violation>,
}

impl Feasibility {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violates(&self, c: Constraint) -> bool {
        self.violations.iter().any(|v| v.constraint == c)
    }
}

pub fn check_feasibility(
    pa: &PowerAllocation,
    rates: &RateBundle,
    limits: &FeasibilityLimits,
    beam: Option<&BeamLoad>,
) -> Feasibility {
    let tol = limits.rel_tol;
    let mut out = Feasibility::default();
    // value <= bound, relative to the larger magnitude
    let mut le = |c: Constraint, value: f64, bound: f64| {
        let scale = value.abs().max(bound.abs()).max(f64::MIN_POSITIVE);
        if value - bound > tol * scale || value.is_nan() {
            out.violations.push(Violation {
                constraint: c,
                value,
                bound,
            });
        }
    };
    let ih = limits.max_current;
    let min_power = pa.p1.min(pa.p2).min(pa.pd);
    le(Constraint::NonNegativePower, -min_power, 0.0);
    le(Constraint::PeakAmplitude, pa.amplitude_sum() + pa.dc_bias, ih);
    le(Constraint::DcBiasLower, ih / 2.0, pa.dc_bias);
    le(Constraint::DcBiasUpper, pa.dc_bias, ih);
    le(Constraint::UserQos(1), limits.r_th, rates.r_u1);
    le(Constraint::UserQos(2), limits.r_th, rates.r_u2);
    le(Constraint::RelayRate(1), limits.relay_floor, rates.r_u1_to_d);
    le(Constraint::RelayRate(2), limits.relay_floor, rates.r_u2_to_d);
    if let Some(load) = beam {
        for i in 0..2 {
            le(Constraint::BeamPower(i + 1), load.used[i], load.available[i]);
        }
    }
    out
}
