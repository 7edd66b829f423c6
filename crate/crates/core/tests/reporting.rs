use proptest::prelude::*;
use vlc_secrecy::config::{Method, ScenarioConfig, Sweep, SweepVariable};
use vlc_secrecy::report::{format_sig9, parse_csv, render_svg, round_sig9, to_csv, write_csv, CSV_HEADER};
use vlc_secrecy::sweep::{run_sweep, CurvePoint, CurveTable};

fn dd_sweep(trials: usize) -> CurveTable {
    let cfg = ScenarioConfig {
        trials,
        methods: vec![Method::Sdr, Method::Zf],
        sweep: Some(Sweep {
            variable: SweepVariable::DestinationDistance,
            values: vec![3.0, 4.0, 5.0, 6.0, 7.0],
        }),
        ..Default::default()
    };
    run_sweep(&cfg).unwrap()
}

fn rounded(t: &CurveTable) -> CurveTable {
    let points = t
        .points
        .iter()
        .map(|p| CurvePoint {
            value: round_sig9(p.value),
            mean: round_sig9(p.mean),
            stderr: round_sig9(p.stderr),
            ..p.clone()
        })
        .collect();
    CurveTable { sweep_var: t.sweep_var.clone(), points }
}

fn synthetic(means: &[(Method, [f64; 4])]) -> CurveTable {
    let mut points = Vec::new();
    for (j, x) in [1.0, 2.0, 3.0, 4.0].into_iter().enumerate() {
        for (m, ys) in means {
            points.push(CurvePoint { value: x, method: *m, mean: ys[j], stderr: 0.01, trials: 10, infeasible_count: 0 });
        }
    }
    CurveTable { sweep_var: "d_d".into(), points }
}

#[test]
fn five_by_two_sweep_writes_ten_rows_and_round_trips() {
    let table = dd_sweep(20);
    assert_eq!(table.points.len(), 10);
    let csv = to_csv(&table);
    assert!(csv.ends_with('\n'));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 11);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dd.csv");
    write_csv(&table, &path).unwrap();
    let back = parse_csv(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(back, rounded(&table));
    assert_eq!(to_csv(&back), csv);
}

#[test]
fn write_errors_name_the_path() {
    let table = synthetic(&[(Method::Zf, [1.0, 2.0, 3.0, 4.0])]);
    let path = std::path::Path::new("/nonexistent-dir/out.csv");
    let msg = write_csv(&table, path).unwrap_err().to_string();
    assert!(msg.contains("/nonexistent-dir/out.csv"), "{msg}");
}

#[test]
fn plot_has_a_polyline_and_legend_entry_per_method() {
    let table = synthetic(&[(Method::Sdr, [1.0, 0.8, 0.5, 0.1]), (Method::Zf, [0.9, 0.9, 0.9, 0.9])]);
    let svg = render_svg(&table).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 2);
    assert_eq!(svg.matches(r#"class="legend""#).count(), 2);
    assert!(svg.contains(">sdr</text>") && svg.contains(">zf</text>"));
    assert!(svg.contains("<circle") && svg.contains("secrecy rate"));
    assert_eq!(svg, render_svg(&table).unwrap());
}

fn polyline_ys(svg: &str, method: &str) -> Vec<f64> {
    let tag = format!(r#"data-method="{method}" points=""#);
    let start = svg.find(&tag).unwrap() + tag.len();
    let end = start + svg[start..].find('"').unwrap();
    svg[start..end].split(' ').map(|xy| xy.split(',').nth(1).unwrap().parse().unwrap()).collect()
}

#[test]
fn monotone_data_gives_monotone_polyline() {
    let table = synthetic(&[(Method::Sdr, [0.2, 0.5, 0.9, 1.7])]);
    let ys = polyline_ys(&render_svg(&table).unwrap(), "sdr");
    assert_eq!(ys.len(), 4);
    // Screen y grows downward.
    assert!(ys.windows(2).all(|w| w[1] < w[0]), "{ys:?}");
}

#[test]
fn standard_error_shrinks_with_more_trials() {
    let small = dd_sweep(100);
    let large = dd_sweep(400);
    for (a, b) in small.curve(Method::Zf).iter().zip(large.curve(Method::Zf)) {
        let ratio = a.stderr / b.stderr;
        let expected = ((b.trials as f64) / (a.trials as f64)).sqrt();
        assert!((ratio / expected - 1.0).abs() <= 0.25, "d_d = {}: ratio {ratio}, expected {expected}", a.value);
    }
}

proptest! {
    #[test]
    fn nine_digit_rendering_is_stable(x in -1e12f64..1e12) {
        let once = round_sig9(x);
        prop_assert_eq!(format_sig9(once), format_sig9(x));
        prop_assert!((once - x).abs() <= 5e-9 * x.abs());
    }
}
