use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn lanczos(args: &[&str], config: Option<&str>) -> (Output, TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lanczos"));
    cmd.args(args).arg("--out").arg(dir.path().join("out"));
    if let Some(text) = config {
        let path = dir.path().join("run.cfg");
        fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    (cmd.output().unwrap(), dir)
}

fn out_dir(dir: &TempDir) -> PathBuf {
    dir.path().join("out")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

const SMALL: &str = "[grid]\na = 0\nb = 1\nn = 60\n[potential]\nname = zero\n";

#[test]
fn spectrum_run_writes_tables() {
    let (o, dir) = lanczos(&["spectrum"], Some(SMALL));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("CHECK spectrum_residual PASS"));
    let spectrum = read(&out_dir(&dir), "spectrum.csv");
    let lines: Vec<&str> = spectrum.lines().collect();
    assert_eq!(lines[0], "index,E");
    assert_eq!(lines.len(), 6);
    let e1: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((e1 - std::f64::consts::PI.powi(2)).abs() / e1 < 1e-3);
    assert!(!spectrum.contains('\r'));
    let vectors = read(&out_dir(&dir), "eigenvectors.csv");
    assert!(vectors.starts_with("x,psi_1,psi_2,psi_3,psi_4,psi_5\n"));
    assert_eq!(vectors.lines().count(), 61);
}

#[test]
fn reciprocity_certificate() {
    let (o, dir) = lanczos(&["reciprocity"], Some(SMALL));
    assert_eq!(o.status.code(), Some(0));
    let line = stdout(&o)
        .lines()
        .find(|l| l.starts_with("CHECK reciprocity"))
        .unwrap()
        .to_owned();
    assert!(
        line.starts_with("CHECK reciprocity PASS measured="),
        "{line}"
    );
    assert!(line.ends_with("bound=1e-8"));
    let table = read(&out_dir(&dir), "reciprocity.csv");
    assert!(table.starts_with("index,E,mu,product,abs_dev\n"));
    assert_eq!(table.lines().count(), 11);
}

#[test]
fn analytic_kernel_run() {
    let cfg = format!("{SMALL}[kernel]\norigin = analytic\nk = 4\n");
    let (o, dir) = lanczos(&["kernel"], Some(&cfg));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        read(&out_dir(&dir), "kernel_spectrum.csv").lines().count(),
        5
    );

    let cfg = "[potential]\nname = harmonic\n[kernel]\norigin = analytic\n";
    let (o, _dir) = lanczos(&["kernel"], Some(cfg));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn pictures_rows_match_time_points() {
    let cfg = format!("{SMALL}[pictures]\ntimes = 20\nt_end = 0.3\nkick = 10\n");
    let (o, dir) = lanczos(&["pictures"], Some(&cfg));
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    for obs in ["position", "momentum", "energy"] {
        let table = read(&out_dir(&dir), &format!("pictures_{obs}.csv"));
        assert_eq!(table.lines().count(), 21);
        assert!(table.starts_with("t,expect_schrodinger,expect_heisenberg,abs_diff\n"));
    }
}

#[test]
fn failed_check_exits_one() {
    let cfg = format!("{SMALL}[pictures]\ntolerance = 1e-30\n");
    let (o, _dir) = lanczos(&["pictures"], Some(&cfg));
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("CHECK pictures_energy FAIL"));
}

#[test]
fn config_errors_exit_two() {
    let (o, _dir) = lanczos(&["spectrum"], Some("[grid]\nn = 2\n"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("n >= 3"));

    let (o, _dir) = lanczos(&["spectrum"], Some("[grid]\nfoo = 1\n"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`foo`") && stderr(&o).contains("line 2"));

    let (o, _dir) = lanczos(&["poisson"], Some("experiment = spectrum\n"));
    assert_eq!(o.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_lanczos"))
        .args(["spectrum", "--config"])
        .arg(dir.path().join("missing.cfg"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn geodesic_inside_horizon_is_config_error() {
    let (o, _dir) = lanczos(&["geodesic"], Some("[metric]\nM = 1\nr0 = 1.5\n"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("metric.r0"));
}

#[test]
fn geodesic_run_and_floor_crossing() {
    let (o, dir) = lanczos(
        &["geodesic"],
        Some("[metric]\nr0 = 10\nhorizon = 5\nsteps = 200\nmass_tag = 7\n"),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("CHECK rest_instant_acceleration PASS"));
    let traj = read(&out_dir(&dir), "trajectory_lanczos.csv");
    assert!(traj.starts_with("x4,x,y,z,vx,vy,vz,law,mass_tag\n"));
    assert!(traj
        .lines()
        .nth(1)
        .unwrap()
        .ends_with(",lanczos-static,7.0000000000000000e0"));
    assert_eq!(traj.lines().count(), 202);
    assert!(read(&out_dir(&dir), "trajectory_geodesic.csv").contains(",full-geodesic,"));
    assert!(read(&out_dir(&dir), "divergence.csv").starts_with("x4,abs_divergence\n"));

    let (o, _dir) = lanczos(&["geodesic"], Some("[metric]\nr0 = 3.5\nhorizon = 100\n"));
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("crossed r_min"));
}

#[test]
fn nonstatic_needs_flag() {
    let cfg = "[metric]\nvy = 0.1\n";
    let (o, _dir) = lanczos(&["geodesic"], Some(cfg));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--allow-nonstatic"));
    let (o, _dir) = lanczos(&["geodesic", "--allow-nonstatic"], Some(cfg));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn poisson_run() {
    let (o, dir) = lanczos(
        &["poisson"],
        Some("[poisson]\nmass = 2\nradius = 0.5\nr_max = 2\nsamples = 41\n"),
    );
    assert_eq!(o.status.code(), Some(0));
    let table = read(&out_dir(&dir), "poisson.csv");
    assert!(table.starts_with("r,phi,dphi_dr,phi_exact\n"));
    assert_eq!(table.lines().count(), 42);
}

#[test]
fn same_config_same_bytes() {
    let cfg = format!("{SMALL}[metric]\nhorizon = 3\nsteps = 100\n");
    for sub in ["reciprocity", "pictures", "geodesic"] {
        let (a, dir_a) = lanczos(&[sub], Some(&cfg));
        let (b, dir_b) = lanczos(&[sub], Some(&cfg));
        assert_eq!(a.stdout, b.stdout);
        let mut names: Vec<_> = fs::read_dir(out_dir(&dir_a))
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        assert!(!names.is_empty());
        for n in names {
            assert_eq!(
                fs::read(out_dir(&dir_a).join(&n)).unwrap(),
                fs::read(out_dir(&dir_b).join(&n)).unwrap()
            );
        }
    }
}
