use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stit_core::harness::{
    count_obj_facets, count_svg_polygons, parse_svg_segments, read_samples, render, RenderFormat,
};
use stit_core::mnw::TessellationJson;
use stit_core::{
    run_experiment, run_mnw, ConvexPolytope, ExperimentConfig, ExperimentKind, ExperimentResult, HyperplaneMeasureSpec,
    MeasureKind, Tessellation,
};

fn small(kind: ExperimentKind) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(kind, 2, MeasureKind::Isotropic);
    cfg.replications = 400;
    cfg.seed = 42;
    cfg.integrator.points = 4096;
    cfg
}

#[test]
fn shipped_configs_parse() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = ExperimentConfig::from_toml(&std::fs::read_to_string(&path).unwrap())
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(ExperimentConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
        n += 1;
    }
    assert!(n >= 8);
}

#[test]
fn result_is_written_and_read_back() {
    let cfg = small(ExperimentKind::MeanSurface);
    let res = run_experiment(&cfg, Some(1)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let paths = res.write_to(dir.path()).unwrap();
    assert!(paths.iter().any(|p| p.ends_with("timing.json")));
    let json = std::fs::read_to_string(dir.path().join("result.json")).unwrap();
    let back: ExperimentResult = serde_json::from_str(&json).unwrap();
    assert_eq!(back.tests, res.tests);
    assert_eq!(back.config, cfg);
    for table in &res.samples {
        let read = read_samples(&dir.path().join(format!("samples_{}.csv", table.label))).unwrap();
        assert_eq!(read.columns, table.columns);
        assert_eq!(read.rows.len(), table.rows.len());
        for (a, b) in read.rows.iter().zip(&table.rows) {
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).abs() <= 1e-14 * y.abs());
            }
        }
    }
}

#[test]
fn results_do_not_depend_on_the_worker_count() {
    let cfg = small(ExperimentKind::Scaling);
    let a = serde_json::to_value(run_experiment(&cfg, Some(1)).unwrap()).unwrap();
    let b = serde_json::to_value(run_experiment(&cfg, Some(3)).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn rendering_survives_json_serialization() {
    let spec = HyperplaneMeasureSpec::isotropic(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let st = run_mnw(ConvexPolytope::unit_cube(2), &spec, 6.0, &mut rng).unwrap();
    let back: Tessellation = serde_json::from_value::<TessellationJson>(st.to_json()).unwrap().into();
    let svg = render(&back, RenderFormat::Svg).unwrap();
    assert_eq!(svg, render(&st, RenderFormat::Svg).unwrap());
    assert_eq!(parse_svg_segments(&svg).len(), st.maximal_polytopes().len());
    assert_eq!(count_svg_polygons(&svg), st.cells().len() + 1);

    let spec = HyperplaneMeasureSpec::isotropic(3).unwrap();
    let st = run_mnw(ConvexPolytope::unit_cube(3), &spec, 3.0, &mut rng).unwrap();
    let obj = render(&st, RenderFormat::Obj).unwrap();
    assert_eq!(count_obj_facets(&obj), st.maximal_polytopes().len());
}
