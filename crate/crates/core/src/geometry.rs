//! Channel models: Lambertian line-of-sight VLC gain and an indoor dual-slope
//! RF model with log-normal shadowing and Rician fading.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::{CVec2, Complex};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position3D {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position3D {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn distance(&self, other: &Position3D) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2) + (self.z - other.z).powi(2))
            .sqrt()
    }

    pub fn horizontal_distance(&self, other: &Position3D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x.is_finite() && self.y.is_finite() && self.z.is_finite()) {
            return Err(Error::invalid("position", "coordinates must be finite"));
        }
        if self.z < 0.0 {
            return Err(Error::invalid("position", "height must be non-negative"));
        }
        Ok(())
    }
}

/// Optical front end shared by the LED and the photodetectors.
#[derive(Debug, Clone, PartialEq)]
pub struct VlcFrontEnd {
    /// Photodetector area, m².
    pub pd_area: f64,
    /// LED half-power semi-angle, degrees.
    pub half_power_semiangle: f64,
    pub optical_filter_gain: f64,
    pub refractive_index: f64,
    /// Receiver field-of-view semi-angle, degrees.
    pub fov_semiangle: f64,
    /// Optical-to-electrical conversion, A/W.
    pub oe_factor: f64,
    /// Electrical-to-optical conversion, W/A.
    pub eo_factor: f64,
    /// Receiver noise PSD, A²/Hz.
    pub noise_psd: f64,
    /// Modulation bandwidth, Hz.
    pub bandwidth: f64,
    /// Maximum LED drive current, A.
    pub max_current: f64,
}

impl Default for VlcFrontEnd {
    fn default() -> Self {
        Self {
            pd_area: 1e-4,
            half_power_semiangle: 60.0,
            optical_filter_gain: 1.0,
            refractive_index: 1.5,
            fov_semiangle: 60.0,
            oe_factor: 0.53,
            eo_factor: 10.0,
            noise_psd: 1e-21,
            bandwidth: 20e6,
            max_current: 0.6,
        }
    }
}

impl VlcFrontEnd {
    pub fn lambertian_order(&self) -> f64 {
        -1.0 / self.half_power_semiangle.to_radians().cos().log2()
    }

    /// Optical concentrator gain inside the field of view.
    pub fn concentrator_gain(&self) -> f64 {
        self.refractive_index.powi(2) / self.fov_semiangle.to_radians().sin().powi(2)
    }

    /// Receiver noise variance σ_v² = N_v·B_v.
    pub fn noise_variance(&self) -> f64 {
        self.noise_psd * self.bandwidth
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("pd_area", self.pd_area),
            ("optical_filter_gain", self.optical_filter_gain),
            ("oe_factor", self.oe_factor),
            ("eo_factor", self.eo_factor),
            ("noise_psd", self.noise_psd),
            ("bandwidth", self.bandwidth),
            ("max_current", self.max_current),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("must be positive, got {v}")));
            }
        }
        if !(self.half_power_semiangle > 0.0 && self.half_power_semiangle < 90.0) {
            return Err(Error::invalid("half_power_semiangle", "must lie in (0, 90) degrees"));
        }
        if !(self.fov_semiangle > 0.0 && self.fov_semiangle <= 90.0) {
            return Err(Error::invalid("fov_semiangle", "must lie in (0, 90] degrees"));
        }
        if !(self.refractive_index >= 1.0) {
            return Err(Error::invalid("refractive_index", "must be at least 1"));
        }
        Ok(())
    }
}

/// Indoor RF propagation between the entrusted users and the off-coverage
/// receivers.
#[derive(Debug, Clone, PartialEq)]
pub struct RfModel {
    /// Carrier frequency, Hz.
    pub carrier: f64,
    /// Channel bandwidth, Hz.
    pub bandwidth: f64,
    pub noise_psd_dbm_per_hz: f64,
    /// Breakpoint distance, m.
    pub breakpoint: f64,
    /// Path-loss slope past the breakpoint, dB/decade.
    pub post_breakpoint_slope: f64,
    pub shadow_sigma_before: f64,
    pub shadow_sigma_after: f64,
    /// Rician K factor; `f64::INFINITY` gives a pure line-of-sight channel.
    pub rician_k: f64,
    /// Angle of departure/arrival of the line-of-sight ray, degrees.
    pub los_angle: f64,
    /// Link distances are clamped to at least this value before the path-loss
    /// model is applied, m.
    pub min_distance: f64,
}

impl Default for RfModel {
    fn default() -> Self {
        Self {
            carrier: 2.4e9,
            bandwidth: 16e6,
            noise_psd_dbm_per_hz: -174.0,
            breakpoint: 5.0,
            post_breakpoint_slope: 35.0,
            shadow_sigma_before: 3.0,
            shadow_sigma_after: 5.0,
            rician_k: 1.0,
            los_angle: 45.0,
            min_distance: 0.5,
        }
    }
}

impl RfModel {
    /// Receiver noise power in watts.
    pub fn noise_power(&self) -> f64 {
        10f64.powf((self.noise_psd_dbm_per_hz - 30.0) / 10.0) * self.bandwidth
    }

    pub fn shadow_sigma(&self, d: f64) -> f64 {
        if d <= self.breakpoint {
            self.shadow_sigma_before
        } else {
            self.shadow_sigma_after
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.carrier > 0.0 && self.bandwidth > 0.0) {
            return Err(Error::invalid("rf", "carrier and bandwidth must be positive"));
        }
        if !(self.breakpoint > 0.0) {
            return Err(Error::invalid("breakpoint", "must be positive"));
        }
        if !(self.shadow_sigma_before >= 0.0 && self.shadow_sigma_after >= 0.0) {
            return Err(Error::invalid("shadow_sigma", "must be non-negative"));
        }
        if !(self.rician_k >= 0.0) {
            return Err(Error::invalid("rician_k", "must be non-negative"));
        }
        if !(self.min_distance > 0.0) {
            return Err(Error::invalid("min_distance", "must be positive"));
        }
        Ok(())
    }
}

/// One channel realization. Index 1 is always the entrusted user with the
/// stronger VLC gain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub h1: f64,
    pub h2: f64,
    pub h_d: CVec2,
    pub h_e: CVec2,
}

impl ChannelSet {
    pub fn vlc_gains(&self) -> [f64; 2] {
        [self.h1, self.h2]
    }
}

/// Line-of-sight VLC gain from an LED pointing down to a PD pointing up.
pub fn lambertian_gain(ap: &Position3D, user: &Position3D, fe: &VlcFrontEnd) -> f64 {
    let d = ap.distance(user);
    let cos_incidence = (ap.z - user.z) / d;
    if cos_incidence <= 0.0 {
        return 0.0;
    }
    let incidence = cos_incidence.clamp(-1.0, 1.0).acos();
    if incidence > fe.fov_semiangle.to_radians() {
        return 0.0;
    }
    let m = fe.lambertian_order();
    // The irradiance angle equals the incidence angle for vertical devices.
    (m + 1.0) * fe.pd_area / (2.0 * PI * d * d)
        * cos_incidence.powf(m)
        * fe.optical_filter_gain
        * fe.concentrator_gain()
        * cos_incidence
}

/// Free-space loss up to the breakpoint, then `post_breakpoint_slope` dB per
/// decade.
pub fn rf_path_loss_db(d: f64, m: &RfModel) -> Result<f64> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::Domain(format!("path-loss distance must be positive, got {d}")));
    }
    let fspl = |r: f64| 20.0 * (4.0 * PI * r * m.carrier / SPEED_OF_LIGHT).log10();
    Ok(if d <= m.breakpoint {
        fspl(d)
    } else {
        fspl(m.breakpoint) + m.post_breakpoint_slope * (d / m.breakpoint).log10()
    })
}

/// Unit-mean-power Rician fade with a deterministic line-of-sight phase.
fn rician_fade<R: Rng + ?Sized>(d: f64, m: &RfModel, rng: &mut R) -> Complex {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    let scatter = Complex::new(re, im) / 2f64.sqrt();
    if m.rician_k.is_infinite() {
        return los_phasor(d, m);
    }
    let k = m.rician_k;
    los_phasor(d, m) * (k / (k + 1.0)).sqrt() + scatter * (1.0 / (k + 1.0)).sqrt()
}

fn los_phasor(d: f64, m: &RfModel) -> Complex {
    let phase = 2.0 * PI * d * m.carrier / SPEED_OF_LIGHT + m.los_angle.to_radians();
    Complex::from_polar(1.0, phase)
}

/// Draws one complex RF gain `H·10^(-(L(d)+X)/20)`.
///
/// The fade and the shadowing draw always consume three normals, so streams
/// stay aligned across parameter changes such as `rician_k`.
pub fn sample_rf_channel<R: Rng + ?Sized>(
    tx: &Position3D,
    rx: &Position3D,
    m: &RfModel,
    rng: &mut R,
) -> Result<Complex> {
    let d = tx.distance(rx).max(m.min_distance);
    let loss = rf_path_loss_db(d, m)?;
    let fade = rician_fade(d, m, rng);
    let z: f64 = rng.sample(StandardNormal);
    let shadow = m.shadow_sigma(d) * z;
    Ok(fade * 10f64.powf(-(loss + shadow) / 20.0))
}

/// Placement of the access point and the users for one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    pub ap: Position3D,
    /// Height of every receiver (entrusted users, destination, eavesdropper).
    pub user_height: f64,
    /// Radius of the disk holding the entrusted users, m.
    pub disk_radius: f64,
    /// Horizontal distance of the destination from the disk center, m.
    pub d_d: f64,
    /// Horizontal distance of the eavesdropper from the disk center, m.
    pub d_e: f64,
    /// When false the eavesdropper channel is identically zero.
    pub eavesdropper_present: bool,
}

impl Default for Deployment {
    fn default() -> Self {
        Self {
            ap: Position3D::new(0.0, 0.0, 3.0),
            user_height: 0.85,
            disk_radius: 2.0,
            d_d: 5.0,
            d_e: 4.0,
            eavesdropper_present: true,
        }
    }
}

impl Deployment {
    pub fn validate(&self) -> Result<()> {
        self.ap.validate()?;
        if !(self.user_height >= 0.0 && self.user_height < self.ap.z) {
            return Err(Error::invalid("user_height", "must lie in [0, AP height)"));
        }
        if !(self.disk_radius > 0.0) {
            return Err(Error::invalid("disk_radius", "must be positive"));
        }
        if !(self.d_d >= 0.0 && self.d_e >= 0.0) {
            return Err(Error::invalid("distance", "d_d and d_e must be non-negative"));
        }
        Ok(())
    }

    pub fn point_on_ring<R: Rng + ?Sized>(&self, radius: f64, rng: &mut R) -> Position3D {
        let az = rng.gen::<f64>() * 2.0 * PI;
        Position3D::new(
            self.ap.x + radius * az.cos(),
            self.ap.y + radius * az.sin(),
            self.user_height,
        )
    }

    fn point_in_disk<R: Rng + ?Sized>(&self, rng: &mut R) -> Position3D {
        let r = self.disk_radius * rng.gen::<f64>().sqrt();
        let az = rng.gen::<f64>() * 2.0 * PI;
        Position3D::new(self.ap.x + r * az.cos(), self.ap.y + r * az.sin(), self.user_height)
    }
}

/// Positions and channels of one Monte-Carlo draw.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioDraw {
    /// Entrusted users, ordered so that `users[0]` has the stronger VLC gain.
    pub users: [Position3D; 2],
    pub destination: Position3D,
    pub eavesdropper: Position3D,
    pub channels: ChannelSet,
}

/// Draws the entrusted users, the destination and eavesdropper azimuths, and
/// all channels for one trial.
pub fn sample_scenario<R: Rng + ?Sized>(cfg: &ScenarioConfig, rng: &mut R) -> Result<ScenarioDraw> {
    draw_deployment(&cfg.deployment, &cfg.vlc, &cfg.rf, rng)
}

pub fn draw_deployment<R: Rng + ?Sized>(
    dep: &Deployment,
    fe: &VlcFrontEnd,
    rf: &RfModel,
    rng: &mut R,
) -> Result<ScenarioDraw> {
    let mut users = [dep.point_in_disk(rng), dep.point_in_disk(rng)];
    let destination = dep.point_on_ring(dep.d_d, rng);
    let eavesdropper = dep.point_on_ring(dep.d_e, rng);

    let mut gains = [
        lambertian_gain(&dep.ap, &users[0], fe),
        lambertian_gain(&dep.ap, &users[1], fe),
    ];
    if gains[1] > gains[0] {
        users.swap(0, 1);
        gains.swap(0, 1);
    }

    let h_d = CVec2::new(
        sample_rf_channel(&users[0], &destination, rf, rng)?,
        sample_rf_channel(&users[1], &destination, rf, rng)?,
    );
    let mut h_e = CVec2::new(
        sample_rf_channel(&users[0], &eavesdropper, rf, rng)?,
        sample_rf_channel(&users[1], &eavesdropper, rf, rng)?,
    );
    if !dep.eavesdropper_present {
        h_e = CVec2::zeros();
    }

    Ok(ScenarioDraw {
        users,
        destination,
        eavesdropper,
        channels: ChannelSet {
            h1: gains[0],
            h2: gains[1],
            h_d,
            h_e,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const AP: Position3D = Position3D::new(0.0, 0.0, 3.0);

    #[test]
    fn on_axis_gain_matches_direct_evaluation() {
        let fe = VlcFrontEnd::default();
        let h = lambertian_gain(&AP, &Position3D::new(0.0, 0.0, 0.85), &fe);
        // (m+1)·A/(2π d²)·g·n²/sin²Θ with m = 1, d = 2.15, cos = 1
        let expected = 2.0 * 1e-4 / (2.0 * PI * 2.15 * 2.15) * 1.5 * 1.5 / 0.75;
        assert!((h - expected).abs() / expected < 1e-12);
        assert!((h - 2.066e-5).abs() / 2.066e-5 < 1e-3);
    }

    #[test]
    fn lambertian_order_of_sixty_degrees_is_one() {
        assert!((VlcFrontEnd::default().lambertian_order() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn outside_fov_is_dark() {
        let fe = VlcFrontEnd::default();
        let dz = 2.15;
        let r = dz * 70f64.to_radians().tan();
        assert_eq!(lambertian_gain(&AP, &Position3D::new(r, 0.0, 0.85), &fe), 0.0);
        let r_in = dz * 59f64.to_radians().tan();
        assert!(lambertian_gain(&AP, &Position3D::new(r_in, 0.0, 0.85), &fe) > 0.0);
    }

    #[test]
    fn gain_decreases_away_from_axis() {
        let fe = VlcFrontEnd::default();
        let mut prev = f64::INFINITY;
        for i in 0..200 {
            let r = i as f64 * 0.02;
            let h = lambertian_gain(&AP, &Position3D::new(r, 0.0, 0.85), &fe);
            assert!(h >= 0.0 && h <= prev);
            prev = h;
        }
    }

    #[test]
    fn path_loss_values() {
        let m = RfModel::default();
        assert!((rf_path_loss_db(1.0, &m).unwrap() - 40.05).abs() < 5e-3);
        assert!((rf_path_loss_db(10.0, &m).unwrap() - 64.57).abs() < 5e-3);
        let below = rf_path_loss_db(m.breakpoint * (1.0 - 1e-12), &m).unwrap();
        let above = rf_path_loss_db(m.breakpoint * (1.0 + 1e-12), &m).unwrap();
        assert!((below - above).abs() < 1e-9);
        assert!(rf_path_loss_db(0.0, &m).is_err());
        assert!(rf_path_loss_db(-1.0, &m).is_err());
    }

    #[test]
    fn path_loss_is_increasing() {
        let m = RfModel::default();
        let mut prev = f64::NEG_INFINITY;
        for i in 1..400 {
            let l = rf_path_loss_db(i as f64 * 0.05, &m).unwrap();
            assert!(l > prev);
            prev = l;
        }
    }

    #[test]
    fn pure_los_without_shadowing_is_deterministic_loss() {
        let m = RfModel {
            rician_k: f64::INFINITY,
            shadow_sigma_after: 0.0,
            shadow_sigma_before: 0.0,
            ..RfModel::default()
        };
        let tx = Position3D::new(0.0, 0.0, 0.85);
        let rx = Position3D::new(7.0, 0.0, 0.85);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = sample_rf_channel(&tx, &rx, &m, &mut rng).unwrap();
        let expected = 10f64.powf(-rf_path_loss_db(7.0, &m).unwrap() / 20.0);
        assert!((g.norm() - expected).abs() / expected < 1e-12);
    }

    #[test]
    fn rf_draws_are_reproducible() {
        let m = RfModel::default();
        let tx = Position3D::new(0.0, 0.0, 0.85);
        let rx = Position3D::new(3.0, 1.0, 0.85);
        let a = sample_rf_channel(&tx, &rx, &m, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = sample_rf_channel(&tx, &rx, &m, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn noise_power_from_psd() {
        let p = RfModel::default().noise_power();
        assert!((p - 6.3697e-14).abs() / 6.3697e-14 < 1e-4);
    }

    #[test]
    fn scenario_is_ordered_and_reproducible() {
        let cfg = ScenarioConfig::default();
        for seed in 0..200 {
            let a = sample_scenario(&cfg, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            assert!(a.channels.h1 >= a.channels.h2);
            assert!(a.channels.h2 > 0.0);
            let b = sample_scenario(&cfg, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn entrusted_users_fill_the_disk_uniformly() {
        let cfg = ScenarioConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let n = 10_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let d = sample_scenario(&cfg, &mut rng).unwrap();
            for u in &d.users {
                let r = u.horizontal_distance(&cfg.deployment.ap);
                assert!(r <= 2.0 + 1e-12);
                sum += r;
            }
        }
        let mean = sum / (2 * n) as f64;
        assert!((mean - 4.0 / 3.0).abs() / (4.0 / 3.0) < 0.02, "mean radius {mean}");
    }

    #[test]
    fn absent_eavesdropper_has_zero_channel() {
        let mut cfg = ScenarioConfig::default();
        cfg.deployment.eavesdropper_present = false;
        let d = sample_scenario(&cfg, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(d.channels.h_e, CVec2::zeros());
    }
}
