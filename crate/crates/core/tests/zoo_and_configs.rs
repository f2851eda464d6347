use std::path::PathBuf;

use biortho::analysis::{analyze_samples, midpoint_grid, random_points, AnalysisOptions, PointAnalysis};
use biortho::classify::{classify_report, ClassifyInputs, Tolerances};
use biortho::metric::{parse_metric_spec, parse_metric_spec_named, MetricSpec};
use biortho::zoo::{ground_truth, zoo_catalog, zoo_metric, Provenance, ZooError, ZOO_NAMES};

fn analyses(spec: &MetricSpec, n: usize) -> Vec<PointAnalysis> {
    let samples = random_points(spec, n, 31).unwrap();
    let sweep = analyze_samples(spec, &samples, &AnalysisOptions::default()).unwrap();
    assert!(sweep.skipped.is_empty());
    sweep.analyses
}

fn config(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    std::fs::read_to_string(path).unwrap()
}

fn check_ground_truth(name: &str, overrides: &[(&str, f64)]) {
    let spec = zoo_metric(name, overrides).unwrap();
    let gt = ground_truth(name, overrides).unwrap().unwrap();
    let points = analyses(&spec, 50);
    let ctx = format!("{name} {overrides:?}");
    for a in &points {
        let s = a.scalar();
        if let Some(t) = gt.scalar {
            assert!((s - t.value).abs() < 1e-8 * t.value.abs().max(1.0), "{ctx}: s = {s}");
        }
        if let Some(t) = gt.k1_over_s {
            assert!((a.summary.k1 / s - t.value).abs() < 1e-8, "{ctx}: k1/s = {}", a.summary.k1 / s);
        }
        if let Some(t) = gt.k3_over_s {
            assert!((a.summary.k3 / s - t.value).abs() < 1e-8, "{ctx}: k3/s = {}", a.summary.k3 / s);
        }
        if let Some(t) = gt.w3plus_is_s6 {
            assert_eq!((a.spectra.wplus[2] - s / 6.0).abs() < 1e-8 * s.abs().max(1.0), t.value, "{ctx}");
        }
        if let Some(t) = gt.wminus_vanishes {
            assert_eq!(a.spectra.normsq_minus.sqrt() < 1e-8 * s.abs().max(1.0), t.value, "{ctx}");
        }
    }
    let r = classify_report(&points, None, &ClassifyInputs::default(), &Tolerances::default()).unwrap();
    if let Some(t) = gt.einstein {
        assert_eq!(r.verdicts.einstein.holds, t.value, "{ctx}");
    }
    if let Some(t) = gt.lcf {
        assert_eq!(r.verdicts.lcf.holds, t.value, "{ctx}");
    }
}

#[test]
fn pipeline_reproduces_every_ground_truth() {
    for name in ZOO_NAMES {
        if ground_truth(name, &[]).unwrap().is_some() {
            check_ground_truth(name, &[]);
        }
    }
    check_ground_truth("S4", &[("r", 2.0)]);
    check_ground_truth("S1xS3", &[("L", 3.0), ("r", 0.5)]);
    check_ground_truth("S2xS2", &[("a", 1.0), ("b", 2.0)]);
}

#[test]
fn ground_truth_volumes_match_the_quadrature() {
    for name in ["T4", "S4", "CP2", "S1xS3", "S2xS2"] {
        let spec = zoo_metric(name, &[]).unwrap();
        let want = ground_truth(name, &[]).unwrap().unwrap().volume.unwrap().value;
        let grid = midpoint_grid(&spec, [16; 4]).unwrap();
        let opts = AnalysisOptions { plane_samples: 0, ..Default::default() };
        let volume: f64 = analyze_samples(&spec, &grid, &opts).unwrap().analyses.iter().map(|a| a.volume_weight).sum();
        assert!((volume - want).abs() < 1e-2 * want, "{name}: {volume} vs {want}");
    }
}

#[test]
fn catalog_examples() {
    let catalog = zoo_catalog();
    let ratio = |name: &str| {
        let entry = catalog.iter().find(|e| e.name == name).unwrap();
        entry.ground_truth.as_ref().unwrap().k1_over_s.unwrap()
    };
    assert_eq!(ratio("S4").value, 1.0 / 12.0);
    assert_eq!(ratio("CP2").value, 1.0 / 24.0);
    assert_eq!(ratio("CP2").provenance, Provenance::Published);
    assert_eq!(ratio("S1xS3").value, 1.0 / 12.0);
    let s1s3 = catalog.iter().find(|e| e.name == "S1xS3").unwrap();
    assert!(s1s3.ground_truth.as_ref().unwrap().lcf.unwrap().value);
    assert!(catalog.iter().find(|e| e.name == "T4pert").unwrap().ground_truth.is_none());
}

#[test]
fn zoo_factories() {
    let t4 = zoo_metric("T4", &[]).unwrap();
    assert_eq!(t4.periodic, [true; 4]);
    assert_eq!(t4.metric_at(&[0.3, 1.0, 2.0, 5.0]).unwrap(), [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0]
    ]);
    let s2s2 = zoo_metric("S2xS2", &[("a", 1.0), ("b", 1.0)]).unwrap();
    let g = s2s2.metric_at(&[0.5, 0.0, 1.2, 0.0]).unwrap();
    assert_eq!((g[0][0], g[2][2]), (1.0, 1.0));
    assert!((g[1][1] - 0.5f64.sin().powi(2)).abs() < 1e-16 && (g[3][3] - 1.2f64.sin().powi(2)).abs() < 1e-16);
    assert_eq!((g[0][2], g[1][3]), (0.0, 0.0));
}

#[test]
fn zoo_errors() {
    assert!(matches!(zoo_metric("K3", &[]), Err(ZooError::UnknownName(_))));
    assert!(matches!(zoo_metric("S4", &[("q", 1.0)]), Err(ZooError::UnknownParameter { .. })));
    assert!(matches!(zoo_metric("S4", &[("r", -1.0)]), Err(ZooError::InvalidParameter { .. })));
    assert!(matches!(zoo_metric("T4pert", &[("seed", 1.5)]), Err(ZooError::InvalidParameter { .. })));
    assert!(matches!(zoo_metric("T4pert", &[("amplitude", 0.9)]), Err(ZooError::InvalidParameter { .. })));
}

#[test]
fn sphere_config_matches_the_zoo() {
    let spec = parse_metric_spec(&config("s4.metric")).unwrap();
    let zoo = zoo_metric("S4", &[("r", 2.0)]).unwrap();
    let p = [0.8, 1.9, 0.4, 5.0];
    assert_eq!(spec.metric_at(&p).unwrap(), zoo.metric_at(&p).unwrap());
    for a in analyses(&spec, 10) {
        assert!((a.scalar() - 3.0).abs() < 1e-12);
    }
    let again = parse_metric_spec(&spec.to_string()).unwrap();
    assert_eq!(again.metric_at(&p).unwrap(), spec.metric_at(&p).unwrap());
}

#[test]
fn unequal_product_config() {
    let spec = parse_metric_spec_named("unequal", &config("s2xs2_unequal.metric")).unwrap();
    assert_eq!(spec.name, "unequal");
    let points = analyses(&spec, 10);
    let r = classify_report(&points, None, &ClassifyInputs::default(), &Tolerances::default()).unwrap();
    assert!(!r.verdicts.einstein.holds && r.verdicts.einstein.max_residual > 0.01);
    assert_eq!(r.verdicts.isotropic.label, "nonnegative");
}

#[test]
fn conformally_flat_config_is_detected() {
    let spec = parse_metric_spec(&config("conformal_torus.metric")).unwrap();
    let points = analyses(&spec, 20);
    let r = classify_report(&points, None, &ClassifyInputs::default(), &Tolerances::default()).unwrap();
    assert!(r.verdicts.lcf.holds, "residual {}", r.verdicts.lcf.max_residual);
    assert!(!r.verdicts.einstein.holds);
    assert!(r.verdicts.lcf.plane_crosscheck.unwrap() < 1e-8);
    assert!(points.iter().any(|a| a.scalar().abs() > 1e-3));
}
