//! Scenario configuration and its plain-text file format.
//!
//! Files hold `section.key = value` lines; `#` starts a comment. Unknown keys
//! are rejected so that typos surface as errors rather than silent defaults.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{Deployment, RfModel, VlcFrontEnd};
use crate::link::EnergyHarvestParams;
use crate::sdp::AnSdpOptions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Known eavesdropper CSI, Charnes-Cooper SDR beamforming.
    Sdr,
    /// Known eavesdropper CSI, zero-forcing beamforming.
    Zf,
    /// Unknown eavesdropper CSI, full-power MRT.
    BaselineMrt,
    /// Unknown eavesdropper CSI, artificial noise with SDR beamforming.
    AnSdr,
    /// Unknown eavesdropper CSI, artificial noise with MRT beamforming.
    AnMrt,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Sdr,
        Method::Zf,
        Method::BaselineMrt,
        Method::AnSdr,
        Method::AnMrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Sdr => "sdr",
            Method::Zf => "zf",
            Method::BaselineMrt => "mrt",
            Method::AnSdr => "an-sdr",
            Method::AnMrt => "an-mrt",
        }
    }

    pub fn needs_eavesdropper_csi(self) -> bool {
        matches!(self, Method::Sdr | Method::Zf)
    }

    /// Parses a comma-separated list; `all` expands to every method.
    pub fn parse_list(s: &str) -> Result<Vec<Method>> {
        let mut out = Vec::new();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            if item == "all" {
                out.extend(Method::ALL);
            } else {
                out.push(item.parse()?);
            }
        }
        out.sort();
        out.dedup();
        if out.is_empty() {
            return Err(Error::ConfigValue("empty method list".into()));
        }
        Ok(out)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::ConfigValue(format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    DestinationDistance,
    EavesdropperDistance,
    EavesdropperMinDistance,
    UserQos,
    DestinationQos,
    Eta,
}

impl SweepVariable {
    const NAMES: [(SweepVariable, &'static str); 6] = [
        (SweepVariable::DestinationDistance, "d_d"),
        (SweepVariable::EavesdropperDistance, "d_e"),
        (SweepVariable::EavesdropperMinDistance, "d_e_min"),
        (SweepVariable::UserQos, "r_th"),
        (SweepVariable::DestinationQos, "r_th_d"),
        (SweepVariable::Eta, "eta"),
    ];

    pub fn name(self) -> &'static str {
        Self::NAMES.iter().find(|(v, _)| *v == self).map(|(_, n)| *n).unwrap_or("?")
    }
}

impl FromStr for SweepVariable {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::NAMES
            .iter()
            .find(|(_, n)| *n == s)
            .map(|(v, _)| *v)
            .ok_or_else(|| Error::ConfigValue(format!("unknown sweep variable `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
}

/// How the eavesdropper expectation handles draws where the eavesdropper
/// out-rates the destination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClampMode {
    /// Average the signed per-draw secrecy rate, then floor at zero.
    #[default]
    AfterMean,
    /// Floor every draw at zero before averaging.
    PerDraw,
}

impl FromStr for ClampMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "after-mean" => Ok(ClampMode::AfterMean),
            "per-draw" => Ok(ClampMode::PerDraw),
            _ => Err(Error::ConfigValue(format!("unknown clamp mode `{s}`"))),
        }
    }
}

/// Numerical knobs shared by the optimizers.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverSettings {
    /// Bisection tolerance on the relay-rate residual, bits/s/Hz.
    pub bisection_tol: f64,
    pub max_iters: usize,
    pub randomization_samples: usize,
    pub an: AnSdpOptions,
    pub clamp: ClampMode,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            bisection_tol: 1e-4,
            max_iters: 40,
            randomization_samples: 1000,
            an: AnSdpOptions::default(),
            clamp: ClampMode::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub vlc: VlcFrontEnd,
    pub rf: RfModel,
    pub eh: EnergyHarvestParams,
    pub deployment: Deployment,
    /// Eavesdropper ring radius used by the unknown-CSI methods, m.
    pub d_e_min: f64,
    pub r_th: f64,
    pub r_th_d: f64,
    pub eta: f64,
    pub trials: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
    pub sweep: Option<Sweep>,
    pub expectation_samples: usize,
    /// Reuse the same trial streams at every sweep point.
    pub common_random_numbers: bool,
    pub solver: SolverSettings,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            vlc: VlcFrontEnd::default(),
            rf: RfModel::default(),
            eh: EnergyHarvestParams::default(),
            deployment: Deployment::default(),
            d_e_min: 4.0,
            r_th: 2.0,
            r_th_d: 2.0,
            eta: 0.8,
            trials: 300,
            seed: 1,
            methods: vec![Method::Sdr, Method::Zf],
            sweep: None,
            expectation_samples: 500,
            common_random_numbers: true,
            solver: SolverSettings::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.vlc.validate()?;
        self.rf.validate()?;
        self.eh.validate()?;
        self.deployment.validate()?;
        if !(self.d_e_min >= 0.0) {
            return Err(Error::invalid("d_e_min", "must be non-negative"));
        }
        if !(self.r_th >= 0.0 && self.r_th_d >= 0.0) {
            return Err(Error::invalid("r_th", "QoS thresholds must be non-negative"));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::invalid("eta", "must lie in (0, 1]"));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials", "must be at least 1"));
        }
        if self.expectation_samples == 0 {
            return Err(Error::invalid("expectation_samples", "must be at least 1"));
        }
        if self.methods.is_empty() {
            return Err(Error::invalid("methods", "at least one method is required"));
        }
        let s = &self.solver;
        if !(s.bisection_tol > 0.0) || s.max_iters == 0 || s.randomization_samples == 0 {
            return Err(Error::invalid(
                "solver",
                "bisection_tol, max_iters and randomization_samples must be positive",
            ));
        }
        if let Some(sw) = &self.sweep {
            if sw.values.is_empty() {
                return Err(Error::invalid("sweep.values", "must not be empty"));
            }
            if sw.values.windows(2).any(|p| !(p[1] > p[0])) {
                return Err(Error::invalid("sweep.values", "must be strictly increasing"));
            }
        }
        Ok(())
    }

    /// Copy of `self` with the sweep variable set to `value`.
    pub fn at(&self, variable: SweepVariable, value: f64) -> ScenarioConfig {
        let mut c = self.clone();
        match variable {
            SweepVariable::DestinationDistance => c.deployment.d_d = value,
            SweepVariable::EavesdropperDistance => c.deployment.d_e = value,
            SweepVariable::EavesdropperMinDistance => c.d_e_min = value,
            SweepVariable::UserQos => c.r_th = value,
            SweepVariable::DestinationQos => c.r_th_d = value,
            SweepVariable::Eta => c.eta = value,
        }
        c
    }

    pub fn from_file(path: &Path) -> Result<ScenarioConfig> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Parses a config file on top of the defaults.
    pub fn parse(text: &str) -> Result<ScenarioConfig> {
        let mut cfg = ScenarioConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |reason: String| Error::Config { line: idx + 1, reason };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `section.key = value`, got `{line}`")))?;
            cfg.set(key.trim(), value.trim()).map_err(|e| match e {
                Error::ConfigValue(reason) => err(reason),
                other => other,
            })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Assigns one `section.key` entry.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::ConfigValue(format!("`{key}`: cannot parse `{v}`")))
        }
        fn flag(key: &str, v: &str) -> Result<bool> {
            match v {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                _ => Err(Error::ConfigValue(format!("`{key}`: expected a boolean, got `{v}`"))),
            }
        }
        let f = || num::<f64>(key, value);
        match key {
            "vlc.pd_area" => self.vlc.pd_area = f()?,
            "vlc.half_power_semiangle" => self.vlc.half_power_semiangle = f()?,
            "vlc.optical_filter_gain" => self.vlc.optical_filter_gain = f()?,
            "vlc.refractive_index" => self.vlc.refractive_index = f()?,
            "vlc.fov_semiangle" => self.vlc.fov_semiangle = f()?,
            "vlc.oe_factor" => self.vlc.oe_factor = f()?,
            "vlc.eo_factor" => self.vlc.eo_factor = f()?,
            "vlc.noise_psd" => self.vlc.noise_psd = f()?,
            "vlc.bandwidth" => self.vlc.bandwidth = f()?,
            "vlc.max_current" => self.vlc.max_current = f()?,

            "rf.carrier" => self.rf.carrier = f()?,
            "rf.bandwidth" => self.rf.bandwidth = f()?,
            "rf.noise_psd_dbm_per_hz" => self.rf.noise_psd_dbm_per_hz = f()?,
            "rf.breakpoint" => self.rf.breakpoint = f()?,
            "rf.post_breakpoint_slope" => self.rf.post_breakpoint_slope = f()?,
            "rf.shadow_sigma_before" => self.rf.shadow_sigma_before = f()?,
            "rf.shadow_sigma_after" => self.rf.shadow_sigma_after = f()?,
            "rf.rician_k" => self.rf.rician_k = f()?,
            "rf.los_angle" => self.rf.los_angle = f()?,
            "rf.min_distance" => self.rf.min_distance = f()?,

            "harvest.fill_factor" => self.eh.fill_factor = f()?,
            "harvest.thermal_voltage" => self.eh.thermal_voltage = f()?,
            "harvest.dark_current" => self.eh.dark_current = f()?,

            "geometry.ap_height" => self.deployment.ap.z = f()?,
            "geometry.user_height" => self.deployment.user_height = f()?,
            "geometry.disk_radius" => self.deployment.disk_radius = f()?,
            "geometry.d_d" => self.deployment.d_d = f()?,
            "geometry.d_e" => self.deployment.d_e = f()?,
            "geometry.d_e_min" => self.d_e_min = f()?,
            "geometry.eavesdropper" => self.deployment.eavesdropper_present = flag(key, value)?,

            "qos.r_th" => self.r_th = f()?,
            "qos.r_th_d" => self.r_th_d = f()?,
            "qos.eta" => self.eta = f()?,

            "solver.bisection_tol" => self.solver.bisection_tol = f()?,
            "solver.max_iters" => self.solver.max_iters = num(key, value)?,
            "solver.randomization_samples" => self.solver.randomization_samples = num(key, value)?,
            "solver.printed_an_rows" => self.solver.an.printed_power_rows = flag(key, value)?,
            "solver.clamp" => self.solver.clamp = value.parse()?,

            "sim.trials" => self.trials = num(key, value)?,
            "sim.seed" => self.seed = num(key, value)?,
            "sim.methods" => self.methods = Method::parse_list(value)?,
            "sim.expectation_samples" => self.expectation_samples = num(key, value)?,
            "sim.common_random_numbers" => self.common_random_numbers = flag(key, value)?,

            "sweep.variable" => {
                let variable = value.parse()?;
                let values = self.sweep.take().map(|s| s.values).unwrap_or_default();
                self.sweep = Some(Sweep { variable, values });
            }
            "sweep.values" => {
                let values = value
                    .split(',')
                    .map(str::trim)
                    .filter(|t| !t.is_empty())
                    .map(|t| num::<f64>(key, t))
                    .collect::<Result<Vec<_>>>()?;
                match &mut self.sweep {
                    Some(s) => s.values = values,
                    None => {
                        return Err(Error::ConfigValue(
                            "`sweep.values` must follow `sweep.variable`".into(),
                        ))
                    }
                }
            }
            _ => return Err(Error::ConfigValue(format!("unknown key `{key}`"))),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_the_parameter_table() {
        let c = ScenarioConfig::default();
        assert_eq!(c.vlc.bandwidth, 20e6);
        assert_eq!(c.vlc.pd_area, 1e-4);
        assert_eq!(c.vlc.half_power_semiangle, 60.0);
        assert_eq!(c.vlc.optical_filter_gain, 1.0);
        assert_eq!(c.vlc.oe_factor, 0.53);
        assert_eq!(c.vlc.eo_factor, 10.0);
        assert_eq!(c.vlc.refractive_index, 1.5);
        assert_eq!(c.vlc.noise_psd, 1e-21);
        assert_eq!(c.vlc.max_current, 0.6);
        assert_eq!(c.eh.fill_factor, 0.75);
        assert_eq!(c.eh.thermal_voltage, 0.025);
        assert_eq!(c.eh.dark_current, 1e-10);
        assert_eq!(c.deployment.ap.z, 3.0);
        assert_eq!(c.deployment.user_height, 0.85);
        assert_eq!(c.deployment.disk_radius, 2.0);
        assert_eq!(c.rf.bandwidth, 16e6);
        assert_eq!(c.rf.noise_psd_dbm_per_hz, -174.0);
        assert_eq!(c.rf.breakpoint, 5.0);
        assert_eq!(c.rf.los_angle, 45.0);
        assert_eq!(c.rf.carrier, 2.4e9);
        assert_eq!(c.rf.shadow_sigma_after, 5.0);
        assert_eq!(c.rf.shadow_sigma_before, 3.0);
        assert_eq!(c.trials, 300);
    }

    #[test]
    fn parses_sections_comments_and_sweeps() {
        let cfg = ScenarioConfig::parse(
            "# test\n\
             geometry.d_e = 6   # meters\n\
             qos.r_th = 1.5\n\
             sim.methods = sdr, zf\n\
             sweep.variable = d_d\n\
             sweep.values = 3, 4, 5\n",
        )
        .unwrap();
        assert_eq!(cfg.deployment.d_e, 6.0);
        assert_eq!(cfg.r_th, 1.5);
        assert_eq!(cfg.methods, vec![Method::Sdr, Method::Zf]);
        let sw = cfg.sweep.unwrap();
        assert_eq!(sw.variable, SweepVariable::DestinationDistance);
        assert_eq!(sw.values, vec![3.0, 4.0, 5.0]);
    }

    #[test]
    fn rejects_bad_input_with_line_numbers() {
        match ScenarioConfig::parse("\nvlc.nonsense = 1\n") {
            Err(Error::Config { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(ScenarioConfig::parse("qos.r_th 2").is_err());
        assert!(ScenarioConfig::parse("sim.trials = 0").is_err());
        assert!(
            ScenarioConfig::parse("sweep.variable = d_d\nsweep.values = 3, 2").is_err()
        );
    }

    #[test]
    fn all_expands_to_every_method() {
        assert_eq!(Method::parse_list("all").unwrap().len(), 5);
        assert!(Method::parse_list("sdr,bogus").is_err());
    }
}
