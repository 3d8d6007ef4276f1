//! File formats, configuration parsing and the command-line tool.

use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use thermotomo::io::{decode_grid, decode_trace, encode_grid, encode_trace, pgm_bytes, RunConfig};
use thermotomo::wave::BoundaryTrace;
use thermotomo::{Error, Grid, ScalarField};

const SMALL: &str = "\
grid.h = 0.03125
layer.1.radius = 0.5
layer.1.speed = 0.5
kset.kind = disk
kset.radius = 0.2
T = 2
recon.m_max = 3
roundtrip.reference_refine = 1
phantom.bump.1.x = 0.02
phantom.bump.1.y = -0.01
phantom.bump.1.sigma = 0.05
knorm.iters = 5
ray.n_pos = 8
ray.n_dir = 16
";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_thermotomo"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, SMALL).unwrap();
    let out = dir.join("out");
    bin()
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn format_offset(e: Error) -> u64 {
    match e {
        Error::Format { offset, .. } => offset,
        other => panic!("expected a format error, got {other}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn grid_files_round_trip(
        nx in 3usize..12,
        ny in 3usize..12,
        h in 0.01f64..1.0,
        ox in -5.0f64..5.0,
        oy in -5.0f64..5.0,
        seed in any::<u64>(),
    ) {
        let g = Grid::new(nx, ny, h, ox, oy).unwrap();
        let f = ScalarField::from_fn(g, |x, y| ((x * 13.0 + y * 7.0 + seed as f64).sin()) * 1e3);
        let back = decode_grid(&encode_grid(&f)).unwrap();
        prop_assert_eq!(back.grid(), f.grid());
        prop_assert_eq!(back.data(), f.data());
    }

    #[test]
    fn trace_files_round_trip(n_det in 1usize..10, n_times in 1usize..20, dt in 1e-4f64..1.0, s in -1e3f64..1e3) {
        let points: Vec<(f64, f64)> = (0..n_det).map(|k| (k as f64 * 0.5, -(k as f64))).collect();
        let values: Vec<f64> = (0..n_det * n_times).map(|k| s * (k as f64).cos()).collect();
        let t = BoundaryTrace::new(dt, points, Vec::new(), values).unwrap();
        let back = decode_trace(&encode_trace(&t)).unwrap();
        prop_assert_eq!(back.dt(), t.dt());
        prop_assert_eq!(back.points(), t.points());
        prop_assert_eq!(back.values(), t.values());
        prop_assert_eq!(back.n_times(), n_times);
    }

    #[test]
    fn truncated_grid_files_are_rejected(cut in 0usize..120) {
        let g = Grid::new(3, 3, 0.5, 0.0, 0.0).unwrap();
        let bytes = encode_grid(&ScalarField::from_fn(g, |x, y| x + y));
        prop_assume!(cut < bytes.len());
        let e = decode_grid(&bytes[..cut]).unwrap_err();
        prop_assert!(format_offset(e) <= cut as u64);
    }
}

#[test]
fn malformed_files_report_offsets() {
    let g = Grid::new(3, 3, 0.5, 0.0, 0.0).unwrap();
    let good = encode_grid(&ScalarField::from_fn(g, |x, y| x * y));

    let mut bad_magic = good.clone();
    bad_magic[0] = b'X';
    assert_eq!(format_offset(decode_grid(&bad_magic).unwrap_err()), 0);

    let mut bad_version = good.clone();
    bad_version[4] = 9;
    assert_eq!(format_offset(decode_grid(&bad_version).unwrap_err()), 4);

    let mut nan = good.clone();
    nan[48 + 16..48 + 24].copy_from_slice(&f64::NAN.to_le_bytes());
    assert_eq!(format_offset(decode_grid(&nan).unwrap_err()), 64);

    let mut long = good.clone();
    long.push(0);
    assert_eq!(format_offset(decode_grid(&long).unwrap_err()), 48);

    let t = BoundaryTrace::new(0.1, vec![(0.0, 0.0)], Vec::new(), vec![1.0, 2.0]).unwrap();
    let mut zero_dt = encode_trace(&t);
    zero_dt[24..32].copy_from_slice(&0.0f64.to_le_bytes());
    assert_eq!(format_offset(decode_trace(&zero_dt).unwrap_err()), 24);
    assert!(decode_grid(&encode_trace(&t)).is_err());
}

#[test]
fn pgm_maps_the_range_onto_sixteen_bits() {
    let g = Grid::new(3, 3, 1.0, 0.0, 0.0).unwrap();
    let f = ScalarField::from_fn(g, |x, _| x);
    let b = pgm_bytes(&f, None).unwrap();
    let header = b"P5\n3 3\n65535\n";
    assert!(b.starts_with(header));
    let px: Vec<u16> = b[header.len()..].chunks(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect();
    assert_eq!(&px[..3], &[0, 32768, 65535]);
    assert!(pgm_bytes(&ScalarField::zeros(g), None).is_err());
}

#[test]
fn shipped_config_parses() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/example1.cfg");
    let cfg = RunConfig::load(&path).unwrap();
    assert_eq!(cfg.scenario.layers.len(), 1);
    assert_eq!(cfg.reference_refine, 2);
    cfg.scenario.build().unwrap();
}

#[test]
fn config_errors_name_the_line() {
    let e = RunConfig::parse("grid.h = 0.1\nbogus.key = 3\n").unwrap_err().to_string();
    assert!(e.contains("line 2"), "{e}");
    let e = RunConfig::parse("grid.h = 0.1\ngrid.h = 0.2\n").unwrap_err().to_string();
    assert!(e.contains("line 2"), "{e}");
    let e = RunConfig::parse("grid.h 0.1\n").unwrap_err().to_string();
    assert!(e.contains("line 1"), "{e}");
}

#[test]
fn roundtrip_writes_report_and_images() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["roundtrip"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("out");
    for name in ["report.csv", "recon.tawg", "recon.pgm", "trace.taws", "phantom.tawg", "phantom.pgm", "term_00.pgm"] {
        assert!(out.join(name).is_file(), "{name} missing");
    }
    let report = std::fs::read_to_string(out.join("report.csv")).unwrap();
    assert!(report.starts_with("term,update_norm,err_HD,err_L2\n"));
    assert_eq!(report.lines().count(), 4);
    assert!(stdout(&o).contains("converged"));
}

#[test]
fn forward_then_reconstruct_reads_the_trace() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["forward"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = run_in(dir.path(), &["reconstruct"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("out/recon.tawg").is_file());
}

#[test]
fn runs_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let oa = run_in(a.path(), &["forward"]);
    let ob = run_in(b.path(), &["forward"]);
    assert!(oa.status.success() && ob.status.success());
    assert_eq!(stdout(&oa), stdout(&ob));
    let read = |d: &Path| std::fs::read(d.join("out/trace.taws")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
}

#[test]
fn knorm_reports_a_contraction() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["knorm"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    let mu: f64 = s.trim().strip_prefix("mu_hat ").unwrap().parse().unwrap();
    assert!(mu > 0.0 && mu < 1.0, "{s}");
    let csv = std::fs::read_to_string(dir.path().join("out/knorm.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);
}

#[test]
fn raytrace_and_energy_succeed() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["raytrace"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("visible true"));
    assert!(dir.path().join("out/visibility.csv").is_file());
    assert!(dir.path().join("out/branches.txt").is_file());
    let o = run_in(dir.path(), &["energy"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("energy decay ratio "));
}

#[test]
fn missing_config_exits_with_config_code() {
    let o = bin().args(["forward", "--config", "/nonexistent/run.cfg"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/run.cfg"));
}

#[test]
fn usage_errors_exit_with_config_code() {
    assert_eq!(bin().arg("frobnicate").output().unwrap().status.code(), Some(2));
    assert_eq!(bin().output().unwrap().status.code(), Some(2));
    assert_eq!(bin().arg("--help").output().unwrap().status.code(), Some(0));
}

#[test]
fn bad_trace_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk.taws");
    std::fs::write(&junk, b"TAWS\x01\x00\x00\x00").unwrap();
    let o = run_in(dir.path(), &["reconstruct", "--trace", junk.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("format error"));
}
