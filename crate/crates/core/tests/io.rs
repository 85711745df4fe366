use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use viscous_waves::io::{
    build_initial_state, decode_snapshot, encode_snapshot, parse_config, read_snapshot, snapshot_file_name,
    write_snapshot, FileSink,
};
use viscous_waves::oracle;
use viscous_waves::{simulate, Error, Grid, ModelParams, Variant};

#[test]
fn example_config() {
    let cfg = parse_config("grid_n = 64\nt_end = 1.0\ndelta = 0.1\ninit = 1:0.1:0.0").unwrap();
    assert_eq!(cfg.beta, 1e-5);
    assert_eq!(cfg.epsilon, 1e-2);
    assert_eq!(cfg.variant, Variant::Simplified);
    assert_eq!(cfg.output_dir.to_str(), Some("out"));
    assert_eq!((cfg.snapshot_every, cfg.diagnostics_every), (100, 1));
}

#[test]
fn config_constraint_messages() {
    let err = parse_config("grid_n = 65").unwrap_err();
    assert!(err.to_string().contains("grid_n must be even"), "{err}");
    let err = parse_config("init = 30:1:0").unwrap_err();
    assert!(err.to_string().contains("k=30 exceeds dealias band 21"), "{err}");
    let err = parse_config("seed = 1\nbogus = 2").unwrap_err();
    assert!(matches!(err, Error::ConfigParse { line: 2, .. }));
    assert!(err.is_config_error());
}

#[test]
fn initial_state_from_modes_and_seed() {
    let cfg = parse_config("grid_n = 32\ninit = 1:1:0, 3:0.5:0.25\ninit_ft = 2:0.2:0").unwrap();
    let grid = cfg.grid().unwrap();
    let s = build_initial_state(&cfg, &grid).unwrap();
    let expect = &oracle::cosine_mode(&grid, 1, 1.0, 0.0) + &oracle::cosine_mode(&grid, 3, 0.5, 0.25);
    assert!(s.f().max_abs_diff(&expect) < 1e-15);
    assert!(s.ft().max_abs_diff(&oracle::cosine_mode(&grid, 2, 0.2, 0.0)) < 1e-15);
    assert_eq!(s.f().mean(), 0.0);

    let cfg = parse_config("grid_n = 64\nseed = 42\nrandom_amplitude = 0.5").unwrap();
    let a = build_initial_state(&cfg, &grid_of(64)).unwrap();
    let b = build_initial_state(&cfg, &grid_of(64)).unwrap();
    assert_eq!(a, b);
    assert!((a.f().coeff(2).norm() - 0.5 / 8.0).abs() < 1e-16);
}

fn grid_of(n: usize) -> Grid {
    Grid::new(n).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn snapshots_round_trip(seed in any::<u64>(), n in prop::sample::select(vec![8usize, 16, 64, 256]),
                            t in 0.0f64..100.0, variant in 0u8..3) {
        let grid = grid_of(n);
        let state = oracle::random_state(&grid, &mut ChaCha8Rng::seed_from_u64(seed), 1.0).with_time(t);
        let params = ModelParams {
            variant: Variant::from_code(variant).unwrap(),
            ..ModelParams::full(0.1, 0.2, 0.3, 0.1, 0.1)
        };
        let bytes = encode_snapshot(&state, &params).unwrap();
        let (read, read_params) = decode_snapshot(&bytes).unwrap();
        prop_assert_eq!(read_params, params);
        prop_assert_eq!(read.t(), t);
        // physical samples are stored, so spectral data agrees up to one transform
        prop_assert!(read.f().max_abs_diff(state.f()) < 1e-15);
        prop_assert!(read.ft().max_abs_diff(state.ft()) < 1e-15);
        // read then write reproduces the file byte for byte
        prop_assert_eq!(&encode_snapshot(&read, &read_params).unwrap(), &bytes);
        // and a state that came from a file survives another trip bit for bit
        let (again, _) = decode_snapshot(&encode_snapshot(&read, &read_params).unwrap()).unwrap();
        prop_assert_eq!(again.f().coeffs(), read.f().coeffs());
        prop_assert_eq!(again.ft().coeffs(), read.ft().coeffs());
    }

    #[test]
    fn truncation_is_reported_at_the_cut(cut in 0usize..(68 + 16 * 8)) {
        let grid = grid_of(8);
        let state = oracle::random_state(&grid, &mut ChaCha8Rng::seed_from_u64(1), 1.0);
        let bytes = encode_snapshot(&state, &ModelParams::ocean_regime()).unwrap();
        match decode_snapshot(&bytes[..cut]) {
            Err(Error::Format { offset, message }) => {
                prop_assert!(offset as usize <= cut, "{} > {}", offset, cut);
                prop_assert!(message.contains("truncated"));
            }
            other => prop_assert!(false, "{:?}", other.map(|_| ())),
        }
    }
}

#[test]
fn version_two_is_rejected() {
    let grid = grid_of(8);
    let state = oracle::random_state(&grid, &mut ChaCha8Rng::seed_from_u64(3), 1.0);
    let mut bytes = encode_snapshot(&state, &ModelParams::ocean_regime()).unwrap();
    bytes[4] = 2;
    let err = decode_snapshot(&bytes).unwrap_err();
    assert_eq!(err.to_string(), "unsupported version 2");
}

#[test]
fn files_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse_config(&format!(
        "grid_n = 32\ndt = 0.05\nt_end = 1.0\ndelta = 0.05\ninit = 1:0.01:0\nsnapshot_every = 6\n\
         diagnostics_every = 3\noutput_dir = {}",
        dir.path().display()
    ))
    .unwrap();
    let grid = cfg.grid().unwrap();
    let init = build_initial_state(&cfg, &grid).unwrap();
    let mut sink = FileSink::create(&cfg.output_dir).unwrap();
    let report = simulate(&init, &cfg.params(), &cfg.sim_config(&grid), &mut sink).unwrap();
    sink.finish().unwrap();
    assert_eq!(report.steps, 20);

    let csv = std::fs::read_to_string(dir.path().join("diagnostics.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,h1,h2,h3,h35,h4,h45,h5,h55,ft225,ft3,ft35,ft4,ft45,e_inst,e_max,dissipation,e_linear"
    );
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 20 / 3 + 1);
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0] && w[1][15] >= w[0][15]));

    for step in [0, 6, 12, 18] {
        let (s, p) = read_snapshot(dir.path().join(snapshot_file_name(step))).unwrap();
        assert_eq!(p, cfg.params());
        assert!((s.t() - 0.05 * step as f64).abs() < 1e-12);
    }
    assert!(!dir.path().join(snapshot_file_name(24)).exists());
    assert_eq!(snapshot_file_name(12), "snap_000012.vwav");

    let path = dir.path().join("copy.vwav");
    write_snapshot(&report.state, &cfg.params(), &path).unwrap();
    let (s, _) = read_snapshot(&path).unwrap();
    assert!(s.f().max_abs_diff(report.state.f()) < 1e-17);
}
