use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vlc_secrecy::config::{Method, ScenarioConfig};
use vlc_secrecy::geometry::sample_scenario;
use vlc_secrecy::known_csi::{solve_known_csi, BeamMethod, KnownCsiConfig};
use vlc_secrecy::link::{harvested_pair, LinkParams};
use vlc_secrecy::report::{render_plot, write_csv};
use vlc_secrecy::sdp::{brute_force_oracle, solve_secrecy_cc_sdp, Hermitian2};
use vlc_secrecy::sweep::{run_sweep, trial_rng};
use vlc_secrecy::unknown_csi::{
    expected_secrecy_rate, plan, RingEavesdropper, UnknownCsiConfig, UnknownMethod,
};
use vlc_secrecy::{CVec2, Result};

#[derive(Parser)]
#[command(name = "vlc-secrecy", version, about = "Secrecy-rate optimization for hybrid VLC/RF relaying")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file of `section.key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated list of sdr, zf, mrt, an-sdr, an-mrt, or `all`.
    #[arg(long)]
    method: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte-Carlo sweep and write a CSV table.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Solve a single scenario draw and print the full solution.
    Solve {
        #[command(flatten)]
        common: Common,
    },
    /// Compare the SDR beamformer against exhaustive search on random draws.
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 50)]
        instances: usize,
        #[arg(long, default_value_t = 64)]
        grid: usize,
    },
}

fn load(common: &Common) -> Result<ScenarioConfig> {
    let mut cfg = match &common.config {
        Some(p) => ScenarioConfig::from_file(p)?,
        None => ScenarioConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(t) = common.trials {
        cfg.trials = t;
    }
    if let Some(m) = &common.method {
        cfg.methods = Method::parse_list(m)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn fmt_c(w: &CVec2) -> String {
    format!(
        "[{:.6e}{:+.6e}j, {:.6e}{:+.6e}j]",
        w[0].re, w[0].im, w[1].re, w[1].im
    )
}

fn solve(cfg: &ScenarioConfig) -> Result<()> {
    let params = LinkParams::new(&cfg.vlc, &cfg.rf, &cfg.eh, cfg.eta)?;
    let mut rng = trial_rng(cfg.seed, 0, 0, true);
    let draw = sample_scenario(cfg, &mut rng)?;
    let aux_seed = rng.next_u64();
    let ch = &draw.channels;
    println!("[channels]");
    println!("h1 = {:.6e}", ch.h1);
    println!("h2 = {:.6e}", ch.h2);
    println!("h_d = {}", fmt_c(&ch.h_d));
    println!("h_e = {}", fmt_c(&ch.h_e));
    for &method in &cfg.methods {
        let mut aux = ChaCha8Rng::seed_from_u64(aux_seed);
        println!();
        println!("[{method}]");
        let beam = match method {
            Method::Sdr => Some(BeamMethod::Sdr),
            Method::Zf => Some(BeamMethod::Zf),
            _ => None,
        };
        if let Some(beam) = beam {
            let kc = KnownCsiConfig {
                r_th: cfg.r_th,
                method: beam,
                bisection_tol: cfg.solver.bisection_tol,
                max_iters: cfg.solver.max_iters,
                randomization_samples: cfg.solver.randomization_samples,
            };
            let s = solve_known_csi(ch, &kc, &params, &mut aux)?;
            println!("p1 = {:.6e}", s.pa.p1);
            println!("p2 = {:.6e}", s.pa.p2);
            println!("pd = {:.6e}", s.pa.pd);
            println!("dc_bias = {:.6}", s.pa.dc_bias);
            println!("harvested = [{:.6e}, {:.6e}]", s.harvested[0], s.harvested[1]);
            println!("w = {}", fmt_c(&s.beam.w));
            if beam == BeamMethod::Zf {
                println!("a = {:.6e}", s.beam.a);
            }
            println!("secrecy_rate = {:.6}", s.secrecy_rate);
            println!("rf_secrecy_rate = {:.6}", s.rf_secrecy_rate);
            println!("min_relay_rate = {:.6}", s.rate_bundle.min_relay());
            println!("iterations = {}", s.iterations);
            println!("converged = {}", s.converged);
            println!("vlc_limited = {}", s.vlc_limited);
            continue;
        }
        let um = match method {
            Method::BaselineMrt => UnknownMethod::BaselineMrt,
            Method::AnSdr => UnknownMethod::AnSdr,
            _ => UnknownMethod::AnMrt,
        };
        let uc = UnknownCsiConfig {
            r_th: cfg.r_th,
            r_th_d: cfg.r_th_d,
            method: um,
            eav_distance_min: cfg.d_e_min,
            expectation_samples: cfg.expectation_samples,
            an: cfg.solver.an,
            clamp: cfg.solver.clamp,
        };
        let s = plan(ch, &uc, &params)?;
        let sampler = RingEavesdropper {
            users: draw.users,
            deployment: cfg.deployment.clone(),
            rf: cfg.rf.clone(),
            radius: cfg.d_e_min,
        };
        let avg = expected_secrecy_rate(&s, ch, &sampler, uc.expectation_samples, uc.clamp, &params.k, &mut aux)?;
        println!("p1 = {:.6e}", s.pa.p1);
        println!("p2 = {:.6e}", s.pa.p2);
        println!("pd = {:.6e}", s.pa.pd);
        println!("dc_bias = {:.6}", s.pa.dc_bias);
        println!("harvested = [{:.6e}, {:.6e}]", s.harvested[0], s.harvested[1]);
        println!("w = {}", fmt_c(&s.beam.w));
        println!("n_a = {}", fmt_c(&s.beam.n_a));
        println!("beta = {:.6e}", s.beam.beta);
        if um == UnknownMethod::AnMrt {
            println!("alpha = [{:.6e}, {:.6e}]", s.beam.alpha[0], s.beam.alpha[1]);
        }
        println!("dest_rate = {:.6}", s.dest_rate);
        println!("avg_secrecy_rate = {avg:.6}");
        println!("an_infeasible = {}", s.an_infeasible);
    }
    Ok(())
}

fn oracle(cfg: &ScenarioConfig, instances: usize, grid: usize) -> Result<()> {
    let params = LinkParams::new(&cfg.vlc, &cfg.rf, &cfg.eh, cfg.eta)?;
    let sigma = params.k.sigma_rf_sq;
    let mut worst: f64 = 0.0;
    for t in 0..instances {
        let mut rng = trial_rng(cfg.seed, 0, t, true);
        let ch = sample_scenario(cfg, &mut rng)?.channels;
        let caps = harvested_pair(&ch, cfg.vlc.max_current / 2.0, &params.eh, &params.fe);
        let out = solve_secrecy_cc_sdp(
            &Hermitian2::outer(&ch.h_d),
            &Hermitian2::outer(&ch.h_e),
            caps[0],
            caps[1],
            sigma,
        );
        let brute = brute_force_oracle(&ch.h_d, &ch.h_e, caps[0], caps[1], sigma, grid);
        let gap = (out.objective - brute.achieved_objective).abs() / brute.achieved_objective;
        println!(
            "instance {t}: sdp = {:.9}, oracle = {:.9}, gap = {gap:.3e}",
            out.objective, brute.achieved_objective
        );
        worst = worst.max(gap);
    }
    println!("max relative gap = {worst:.3e}");
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sweep { common, out, plot } => {
            let cfg = load(&common)?;
            let table = run_sweep(&cfg)?;
            write_csv(&table, &out)?;
            if let Some(p) = plot {
                render_plot(&table, &p)?;
            }
            Ok(())
        }
        Command::Solve { common } => solve(&load(&common)?),
        Command::Oracle { common, instances, grid } => oracle(&load(&common)?, instances, grid),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config_error() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

