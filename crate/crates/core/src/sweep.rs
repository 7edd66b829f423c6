//! Seeded Monte-Carlo sweeps over one scenario parameter.
//!
//! Every trial owns a ChaCha8 stream keyed by the master seed and the trial
//! index (and the sweep index unless common random numbers are enabled), so
//! results do not depend on the thread schedule.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{Method, ScenarioConfig, SweepVariable};
use crate::error::{Error, Result};
use crate::geometry::{sample_scenario, ScenarioDraw};
use crate::known_csi::{solve_known_csi, BeamMethod, KnownCsiConfig};
use crate::link::{LinkParams, PowerAllocation};
use crate::unknown_csi::{
    expected_secrecy_rate, plan, RingEavesdropper, UnknownCsiConfig, UnknownMethod,
};

/// Outcome of one method on one scenario draw.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub method: Method,
    pub h1: f64,
    pub h2: f64,
    pub h_d_norm: f64,
    pub h_e_norm: f64,
    pub pa: Option<PowerAllocation>,
    pub secrecy_rate: Option<f64>,
    /// True only when the solution passed every constraint check.
    pub feasible: bool,
    pub status: TrialStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrialStatus {
    Ok,
    /// QoS targets cannot be met for this draw.
    Infeasible(String),
    /// The solver itself failed.
    Failed(String),
}

/// Aggregate for one (sweep value, method) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub value: f64,
    pub method: Method,
    /// Mean over feasible trials; NaN when there are none.
    pub mean: f64,
    pub stderr: f64,
    /// Feasible trials entering the mean.
    pub trials: usize,
    pub infeasible_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    pub sweep_var: String,
    /// Ordered by sweep value, then by method.
    pub points: Vec<CurvePoint>,
}

impl CurveTable {
    pub fn methods(&self) -> Vec<Method> {
        let mut m: Vec<Method> = self.points.iter().map(|p| p.method).collect();
        m.sort();
        m.dedup();
        m
    }

    /// Points of one method in sweep order.
    pub fn curve(&self, method: Method) -> Vec<&CurvePoint> {
        self.points.iter().filter(|p| p.method == method).collect()
    }

    pub fn means(&self, method: Method) -> Vec<f64> {
        self.curve(method).iter().map(|p| p.mean).collect()
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub table: CurveTable,
    /// Per sweep value, the trial records in (trial, method) order.
    pub records: Vec<Vec<TrialRecord>>,
}

/// Stream for one trial at one sweep point.
pub fn trial_rng(seed: u64, sweep_index: usize, trial: usize, common: bool) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stream = if common {
        trial as u64
    } else {
        ((sweep_index as u64) << 32) | trial as u64
    };
    rng.set_stream(stream);
    rng
}

fn classify(e: Error) -> TrialStatus {
    match e {
        Error::QosInfeasible { .. }
        | Error::DestinationQosUnreachable { .. }
        | Error::InfeasibleChannel => TrialStatus::Infeasible(e.to_string()),
        other => TrialStatus::Failed(other.to_string()),
    }
}

/// Runs every configured method on one draw. Each method gets a fresh copy of
/// the same auxiliary stream so randomization and eavesdropper draws are
/// paired across methods.
pub fn run_trial(
    cfg: &ScenarioConfig,
    params: &LinkParams,
    draw: &ScenarioDraw,
    trial: usize,
    aux_seed: u64,
) -> Vec<TrialRecord> {
    let ch = &draw.channels;
    cfg.methods
        .iter()
        .map(|&method| {
            let mut aux = ChaCha8Rng::seed_from_u64(aux_seed);
            let outcome = solve_method(cfg, params, draw, method, &mut aux);
            let (pa, secrecy_rate, feasible, status) = match outcome {
                Ok((pa, rate, ok)) if ok => (Some(pa), Some(rate), true, TrialStatus::Ok),
                Ok((pa, rate, _)) => (
                    Some(pa),
                    Some(rate),
                    false,
                    TrialStatus::Infeasible("constraint check failed".into()),
                ),
                Err(e) => (None, None, false, classify(e)),
            };
            TrialRecord {
                trial,
                method,
                h1: ch.h1,
                h2: ch.h2,
                h_d_norm: ch.h_d.norm(),
                h_e_norm: ch.h_e.norm(),
                pa,
                secrecy_rate,
                feasible,
                status,
            }
        })
        .collect()
}

fn solve_method(
    cfg: &ScenarioConfig,
    params: &LinkParams,
    draw: &ScenarioDraw,
    method: Method,
    rng: &mut ChaCha8Rng,
) -> Result<(PowerAllocation, f64, bool)> {
    let ch = &draw.channels;
    let known = |beam| KnownCsiConfig {
        r_th: cfg.r_th,
        method: beam,
        bisection_tol: cfg.solver.bisection_tol,
        max_iters: cfg.solver.max_iters,
        randomization_samples: cfg.solver.randomization_samples,
    };
    let unknown = |m| UnknownCsiConfig {
        r_th: cfg.r_th,
        r_th_d: cfg.r_th_d,
        method: m,
        eav_distance_min: cfg.d_e_min,
        expectation_samples: cfg.expectation_samples,
        an: cfg.solver.an,
        clamp: cfg.solver.clamp,
    };
    let (kcfg, ucfg) = match method {
        Method::Sdr => (Some(known(BeamMethod::Sdr)), None),
        Method::Zf => (Some(known(BeamMethod::Zf)), None),
        Method::BaselineMrt => (None, Some(unknown(UnknownMethod::BaselineMrt))),
        Method::AnSdr => (None, Some(unknown(UnknownMethod::AnSdr))),
        Method::AnMrt => (None, Some(unknown(UnknownMethod::AnMrt))),
    };
    if let Some(kc) = kcfg {
        let sol = solve_known_csi(ch, &kc, params, rng)?;
        let ok = sol.feasibility(params, kc.r_th).is_ok();
        return Ok((sol.pa, sol.secrecy_rate, ok));
    }
    let uc = ucfg.expect("one of the two configs is set");
    let sol = plan(ch, &uc, params)?;
    let sampler = RingEavesdropper {
        users: draw.users,
        deployment: cfg.deployment.clone(),
        rf: cfg.rf.clone(),
        radius: uc.eav_distance_min,
    };
    let avg = expected_secrecy_rate(&sol, ch, &sampler, uc.expectation_samples, uc.clamp, &params.k, rng)?;
    let caps_ok = sol.beam.within_caps(sol.harvested, 1e-8);
    let qos_ok = uc.method == UnknownMethod::BaselineMrt
        || (!sol.an_infeasible && sol.dest_rate >= uc.r_th_d - 1e-6);
    Ok((sol.pa, avg, caps_ok && qos_ok))
}

fn aggregate(value: f64, method: Method, records: &[TrialRecord]) -> CurvePoint {
    let rates: Vec<f64> = records
        .iter()
        .filter(|r| r.method == method && r.feasible)
        .filter_map(|r| r.secrecy_rate)
        .collect();
    let total = records.iter().filter(|r| r.method == method).count();
    let n = rates.len();
    let mean = if n == 0 { f64::NAN } else { rates.iter().sum::<f64>() / n as f64 };
    let stderr = if n < 2 {
        0.0
    } else {
        let var = rates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    };
    CurvePoint { value, method, mean, stderr, trials: n, infeasible_count: total - n }
}

pub fn run_sweep(cfg: &ScenarioConfig) -> Result<CurveTable> {
    run_sweep_detailed(cfg).map(|o| o.table)
}

pub fn run_sweep_detailed(cfg: &ScenarioConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    let (variable, values) = match &cfg.sweep {
        Some(s) => (s.variable, s.values.clone()),
        None => (SweepVariable::DestinationDistance, vec![cfg.deployment.d_d]),
    };
    let point_cfgs: Vec<ScenarioConfig> = values.iter().map(|&v| cfg.at(variable, v)).collect();
    let point_params = point_cfgs
        .iter()
        .map(|c| LinkParams::new(&c.vlc, &c.rf, &c.eh, c.eta))
        .collect::<Result<Vec<_>>>()?;

    let jobs: Vec<(usize, usize)> = (0..values.len())
        .flat_map(|p| (0..cfg.trials).map(move |t| (p, t)))
        .collect();
    let results: Vec<Result<Vec<TrialRecord>>> = jobs
        .par_iter()
        .map(|&(p, t)| {
            let pc = &point_cfgs[p];
            let mut rng = trial_rng(cfg.seed, p, t, cfg.common_random_numbers);
            let draw = sample_scenario(pc, &mut rng)?;
            let aux_seed = rng.next_u64();
            Ok(run_trial(pc, &point_params[p], &draw, t, aux_seed))
        })
        .collect();

    let mut records: Vec<Vec<TrialRecord>> = vec![Vec::new(); values.len()];
    for ((p, _), res) in jobs.iter().zip(results) {
        records[*p].extend(res?);
    }

    let mut points = Vec::new();
    for (p, &value) in values.iter().enumerate() {
        for &method in &cfg.methods {
            let recs: Vec<&TrialRecord> = records[p].iter().filter(|r| r.method == method).collect();
            let failed = recs.iter().filter(|r| matches!(r.status, TrialStatus::Failed(_))).count();
            if 2 * failed > recs.len() {
                return Err(Error::SweepFailure {
                    variable: variable.name().to_string(),
                    value,
                    failed,
                    trials: recs.len(),
                });
            }
            for r in recs.iter().filter(|r| !matches!(r.status, TrialStatus::Ok)) {
                log::debug!("{}={value} {} trial {}: {:?}", variable.name(), method, r.trial, r.status);
            }
            points.push(aggregate(value, method, &records[p]));
        }
    }
    Ok(SweepOutput {
        table: CurveTable { sweep_var: variable.name().to_string(), points },
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Sweep;

    #[test]
    fn streams_depend_on_sweep_index_only_without_common_numbers() {
        let a = trial_rng(7, 0, 3, true).next_u64();
        let b = trial_rng(7, 5, 3, true).next_u64();
        assert_eq!(a, b);
        let c = trial_rng(7, 5, 3, false).next_u64();
        assert_ne!(a, c);
        assert_ne!(trial_rng(7, 0, 3, true).next_u64(), trial_rng(7, 0, 4, true).next_u64());
    }

    #[test]
    fn single_trial_has_zero_stderr() {
        let cfg = ScenarioConfig {
            trials: 1,
            methods: vec![Method::Zf],
            sweep: Some(Sweep { variable: SweepVariable::DestinationDistance, values: vec![5.0] }),
            ..Default::default()
        };
        let out = run_sweep_detailed(&cfg).unwrap();
        assert_eq!(out.table.points.len(), 1);
        let p = &out.table.points[0];
        assert_eq!(p.stderr, 0.0);
        if p.trials == 1 {
            assert_eq!(Some(p.mean), out.records[0][0].secrecy_rate);
        }
    }
}
