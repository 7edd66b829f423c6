use std::path::PathBuf;

use vlc_secrecy::config::{Method, ScenarioConfig, SweepVariable};

fn configs() -> Vec<(String, ScenarioConfig)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut out: Vec<(String, ScenarioConfig)> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "cfg"))
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            (name, ScenarioConfig::from_file(&p).unwrap())
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

#[test]
fn every_figure_has_a_config() {
    let names: Vec<String> = configs().into_iter().map(|(n, _)| n).collect();
    assert_eq!(names, ["fig2a", "fig2b", "fig3", "fig4", "fig5", "fig6", "fig7"]);
}

#[test]
fn shipped_configs_keep_the_parameter_table() {
    for (name, c) in configs() {
        assert_eq!(c.vlc.bandwidth, 20e6, "{name}");
        assert_eq!(c.vlc.pd_area, 1e-4, "{name}");
        assert_eq!(c.vlc.half_power_semiangle, 60.0, "{name}");
        assert_eq!(c.vlc.optical_filter_gain, 1.0, "{name}");
        assert_eq!(c.vlc.oe_factor, 0.53, "{name}");
        assert_eq!(c.vlc.eo_factor, 10.0, "{name}");
        assert_eq!(c.vlc.refractive_index, 1.5, "{name}");
        assert_eq!(c.vlc.noise_psd, 1e-21, "{name}");
        assert_eq!(c.vlc.max_current, 0.6, "{name}");
        assert_eq!(c.eh.fill_factor, 0.75, "{name}");
        assert_eq!(c.eh.thermal_voltage, 0.025, "{name}");
        assert_eq!(c.eh.dark_current, 1e-10, "{name}");
        assert_eq!(c.deployment.ap.z, 3.0, "{name}");
        assert_eq!(c.deployment.user_height, 0.85, "{name}");
        assert_eq!(c.deployment.disk_radius, 2.0, "{name}");
        assert_eq!(c.rf.bandwidth, 16e6, "{name}");
        assert_eq!(c.rf.noise_psd_dbm_per_hz, -174.0, "{name}");
        assert_eq!(c.rf.breakpoint, 5.0, "{name}");
        assert_eq!(c.rf.los_angle, 45.0, "{name}");
        assert_eq!(c.trials, 300, "{name}");
    }
}

#[test]
fn sweeps_target_the_intended_axes() {
    let expect = [
        ("fig2a", SweepVariable::DestinationDistance, vec![Method::Sdr, Method::Zf]),
        ("fig2b", SweepVariable::DestinationDistance, vec![Method::Sdr, Method::Zf]),
        ("fig3", SweepVariable::EavesdropperDistance, vec![Method::Sdr, Method::Zf]),
        ("fig4", SweepVariable::UserQos, vec![Method::Sdr, Method::Zf]),
        ("fig5", SweepVariable::DestinationQos, vec![Method::BaselineMrt, Method::AnSdr, Method::AnMrt]),
        ("fig6", SweepVariable::EavesdropperMinDistance, vec![Method::BaselineMrt, Method::AnSdr, Method::AnMrt]),
        ("fig7", SweepVariable::UserQos, vec![Method::BaselineMrt, Method::AnSdr, Method::AnMrt]),
    ];
    for ((name, c), (want, var, methods)) in configs().into_iter().zip(expect) {
        assert_eq!(name, want);
        assert_eq!(c.sweep.as_ref().unwrap().variable, var, "{name}");
        assert_eq!(c.methods, methods, "{name}");
    }
    let d_e = |n: &str| configs().into_iter().find(|(m, _)| m == n).unwrap().1.deployment.d_e;
    assert_eq!((d_e("fig2a"), d_e("fig2b")), (4.0, 6.0));
}
