//! Exhaustive-search references for the relaxed solvers. They share no code
//! with the interior-point path.

use std::f64::consts::PI;

use super::problems::{jamming_coefficients, AnSdpOptions};
use super::BeamformerSolution;
use crate::link::{inner, secrecy_ratio};
use crate::{CVec2, Complex};

const GOLDEN: f64 = 0.618_033_988_749_894_9;

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iters {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

fn beam(r1: f64, r2: f64, delta: f64) -> CVec2 {
    CVec2::new(Complex::new(r1, 0.0), Complex::from_polar(r2, delta))
}

/// Maximizes `f(r1, r2, Δ)` over `[0, r1_max] × [0, r2_max] × [0, 2π)` on a
/// grid, then refines the best few grid points by cyclic golden-section
/// search whose brackets shrink when a cycle stops improving.
fn grid_search(
    f: impl Fn(&CVec2) -> f64,
    r_max: [f64; 2],
    n_r: usize,
    n_phase: usize,
) -> ([f64; 3], f64) {
    const STARTS: usize = 8;
    let step = [r_max[0] / (n_r - 1) as f64, r_max[1] / (n_r - 1) as f64];
    let dphi = 2.0 * PI / n_phase as f64;
    let mut top: Vec<([f64; 3], f64)> = Vec::with_capacity(STARTS + 1);
    for i in 0..n_r {
        let r1 = i as f64 * step[0];
        for j in 0..n_r {
            let r2 = j as f64 * step[1];
            for k in 0..n_phase {
                let phi = k as f64 * dphi;
                let v = f(&beam(r1, r2, phi));
                if top.len() < STARTS || v > top[top.len() - 1].1 {
                    let pos = top.partition_point(|e| e.1 >= v);
                    top.insert(pos, ([r1, r2, phi], v));
                    top.truncate(STARTS);
                }
            }
        }
    }

    let bounds = [(0.0, r_max[0]), (0.0, r_max[1]), (f64::NEG_INFINITY, f64::INFINITY)];
    let mut best = top[0];
    for &(start, start_val) in &top {
        let (mut x, mut val) = (start, start_val);
        let mut widths = [step[0], step[1], dphi];
        for _ in 0..400 {
            let before = val;
            for c in 0..3 {
                let lo = (x[c] - widths[c]).max(bounds[c].0);
                let hi = (x[c] + widths[c]).min(bounds[c].1);
                if hi <= lo {
                    continue;
                }
                let base = x;
                let eval = |t: f64| {
                    let mut p = base;
                    p[c] = t;
                    f(&beam(p[0], p[1], p[2]))
                };
                let (t, v) = golden_max(eval, lo, hi, 40);
                // Full power on one user is often optimal.
                for cand in [(t, v), (lo, eval(lo)), (hi, eval(hi))] {
                    if cand.1 > val {
                        x[c] = cand.0;
                        val = cand.1;
                    }
                }
            }
            if val <= before * (1.0 + 1e-15) {
                widths.iter_mut().for_each(|w| *w *= 0.5);
                if widths[2] < 1e-12 {
                    break;
                }
            }
        }
        if val > best.1 {
            best = (x, val);
        }
    }
    best
}

/// Exhaustive search for the secrecy-ratio maximizer over
/// `w = (r1, r2·e^{jΔ})`, using the global-phase invariance of the ratio.
pub fn brute_force_oracle(
    h_d: &CVec2,
    h_e: &CVec2,
    pr1: f64,
    pr2: f64,
    sigma_rf_sq: f64,
    grid_density: usize,
) -> BeamformerSolution {
    let n = grid_density.max(64);
    let (x, val) = grid_search(
        |w| secrecy_ratio(w, h_d, h_e, sigma_rf_sq),
        [pr1.max(0.0).sqrt(), pr2.max(0.0).sqrt()],
        n,
        2 * n,
    );
    BeamformerSolution::from_w(beam(x[0], x[1], x[2]), val)
}

/// Largest `|h_D^H w|²` subject to `|w_i|² ≤ caps[i]`, by exhaustive search.
pub fn max_destination_gain_oracle(h_d: &CVec2, caps: [f64; 2], grid_density: usize) -> f64 {
    let n = grid_density.max(8);
    grid_search(
        |w| inner(h_d, w).norm_sqr(),
        [caps[0].max(0.0).sqrt(), caps[1].max(0.0).sqrt()],
        n,
        2 * n,
    )
    .1
}

/// Jamming scale `β` of the artificial-noise problem by bisection on `β`
/// with an exhaustive inner search over the remaining beam power. `None` when
/// the destination QoS cannot be met even without jamming.
pub fn an_beta_oracle(
    h_d: &CVec2,
    pr1: f64,
    pr2: f64,
    rth_d: f64,
    sigma_rf_sq: f64,
    opts: AnSdpOptions,
) -> Option<f64> {
    let need = sigma_rf_sq * (2f64.powf(2.0 * rth_d) - 1.0);
    let c = jamming_coefficients(h_d, opts);
    let caps = |beta: f64| [pr1 - beta * beta * c[0], pr2 - beta * beta * c[1]];
    let feasible = |beta: f64| {
        let k = caps(beta);
        k[0] >= 0.0 && k[1] >= 0.0 && max_destination_gain_oracle(h_d, k, 24) >= need
    };
    if !feasible(0.0) {
        return None;
    }
    let mut hi = (pr1 / c[0]).sqrt().min((pr2 / c[1]).sqrt());
    if feasible(hi) {
        return Some(hi);
    }
    let mut lo = 0.0;
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}
