use cuprite_core::config::{parse_config, OutputFormat, Params};
use cuprite_core::emit::table_string;
use cuprite_core::optimize::{optimize_point, OptimizeSpec};
use cuprite_core::sweep::{run_sweep, SWEEP_HEADERS};

#[test]
fn default_optimum_matches_fixture() {
    let params = Params::default();
    let best = optimize_point(&params, &OptimizeSpec::from_params(&params)).unwrap();
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/optimum.json")).unwrap();
    let frozen: serde_json::Value = serde_json::from_str(&text).unwrap();
    let current = serde_json::to_value(&best).unwrap();
    assert_eq!(frozen["inputs"], current["inputs"]);
    for key in ["n_sites", "collective_rabi", "gamma", "ratio", "rho_ee", "rate", "p_rr", "g2_zero"] {
        let (a, b) = (frozen["derived"][key].as_f64().unwrap(), current["derived"][key].as_f64().unwrap());
        assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{key}: {a} vs {b}");
    }
}

#[test]
fn sweep_output_is_identical_across_thread_counts() {
    let params = parse_config("sweep.variable = side\nsweep.start = 2\nsweep.stop = 8\nsweep.points = 25").unwrap();
    let render = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let rows = run_sweep(&params);
            (
                table_string(OutputFormat::Csv, SWEEP_HEADERS, &rows).unwrap(),
                table_string(OutputFormat::Json, SWEEP_HEADERS, &rows).unwrap(),
            )
        })
    };
    assert_eq!(render(1), render(4));
}
