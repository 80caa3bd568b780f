use std::f64::consts::PI;
use std::io::Write;
use std::process::{Command, Output};

fn potkern(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_potkern")).args(args).output().expect("spawn potkern")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Data rows of a CSV, header dropped, as floats.
fn numeric_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect()
}

fn assert_error(o: &Output, code: i32, cause: &str) {
    assert_eq!(o.status.code(), Some(code), "stderr: {}", stderr(o));
    let err = stderr(o);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with(&format!("error: cause={cause} ")), "{err}");
}

#[test]
fn disc_szego_grid_matches_closed_form() {
    let o = potkern(&["kernel", "--domain", "disc", "--kernel", "szego", "--a", "0.2-0.1i", "--grid", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("z_re,z_im,w_re,w_im,value_re,value_im\n"));
    let rows = numeric_rows(&text);
    assert!(rows.len() >= 9);
    for r in rows {
        let (z, w) = ((r[0], r[1]), (r[2], r[3]));
        // 1/(2π(1 − z w̄))
        let (dre, dim) = (1.0 - (z.0 * w.0 + z.1 * w.1), -(z.1 * w.0 - z.0 * w.1));
        let den = 2.0 * PI * (dre * dre + dim * dim);
        let (ere, eim) = (dre / den, -dim / den);
        let err = ((r[4] - ere).powi(2) + (r[5] - eim).powi(2)).sqrt() / (ere * ere + eim * eim).sqrt();
        assert!(err < 1e-9, "{r:?} {err}");
    }
}

#[test]
fn ahlfors_boundary_values_are_unimodular() {
    let o = potkern(&["kernel", "--domain", "annulus:0.3", "--kernel", "ahlfors", "--a", "0.55", "--boundary"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = numeric_rows(&stdout(&o));
    assert_eq!(rows.len(), 512);
    for r in rows {
        assert!(((r[4] * r[4] + r[5] * r[5]).sqrt() - 1.0).abs() < 1e-6);
    }
}

#[test]
fn explicit_points_and_full_precision() {
    let o = potkern(&["kernel", "--domain", "disc", "--kernel", "lambda", "--a", "0", "--z", "0.5", "--z", "-0.4+0.3i"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let line = text.lines().nth(1).unwrap();
    // 1/(π z²) at z = 0.5
    let v: f64 = line.split(',').nth(4).unwrap().parse().unwrap();
    assert!((v - 4.0 / PI).abs() < 1e-8);
    let mantissa = line.split(',').nth(4).unwrap().split('e').next().unwrap();
    assert_eq!(mantissa.replace(['.', '-'], "").len(), 17);
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn point_outside_is_an_input_error() {
    let o = potkern(&["kernel", "--domain", "disc", "--kernel", "szego", "--a", "0", "--z", "1.5"]);
    assert_error(&o, 2, "point-not-interior");
    let o = potkern(&["kernel", "--domain", "annulus:0.3", "--kernel", "green", "--a", "0.1", "--grid", "4"]);
    assert_error(&o, 2, "point-not-interior");
}

#[test]
fn input_errors_have_distinct_causes() {
    assert_error(&potkern(&["kernel", "--domain", "torus", "--kernel", "szego", "--grid", "3"]), 2, "unknown-domain");
    assert_error(&potkern(&["kernel", "--domain", "missing.json", "--kernel", "szego", "--grid", "3"]), 2, "io");
    assert_error(&potkern(&["kernel", "--domain", "annulus:x", "--kernel", "szego", "--grid", "3"]), 2, "bad-domain-spec");
    assert_error(&potkern(&["kernel", "--domain", "annulus:1.5", "--kernel", "szego", "--grid", "3"]), 2, "invalid-parameter");
    assert_error(&potkern(&["kernel", "--domain", "disc", "--kernel", "szego", "--a", "1+2j", "--grid", "3"]), 2, "bad-complex");
    assert_error(&potkern(&["kernel", "--domain", "disc", "--kernel", "sigma", "--weight", "exp(t)", "--grid", "3"]), 2, "bad-weight");
    assert_error(&potkern(&["kernel", "--domain", "disc", "--kernel", "sigma", "--weight", "0.5-cos(t)", "--grid", "3"]), 2, "weight-not-positive");
    assert_error(&potkern(&["kernel", "--domain", "disc", "--kernel", "szego", "--nodes", "15", "--grid", "3"]), 2, "usage");
    assert_error(&potkern(&["kernel", "--domain", "disc", "--kernel", "nope", "--grid", "3"]), 2, "usage");
    assert_error(&potkern(&["kernel", "--domain", "disc", "--kernel", "szego"]), 2, "usage");
    assert_error(&potkern(&["verify", "--domain", "disc", "--tol:I31"]), 2, "bad-tolerance");
}

#[test]
fn numerical_breakdown_exits_three() {
    let o = potkern(&["kernel", "--domain", "annulus:0.3", "--kernel", "ahlfors", "--a", "0.5", "--boundary", "--nodes", "32"]);
    assert_error(&o, 3, "zero-count");
}

#[test]
fn help_and_version_succeed() {
    for flag in ["--help", "--version"] {
        let o = potkern(&[flag]);
        assert_eq!(o.status.code(), Some(0));
        assert!(!stdout(&o).is_empty());
    }
}

#[test]
fn json_domain_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ring.json");
    let mut f = std::fs::File::create(&path).unwrap();
    write!(f, r#"{{"outer":{{"fourier":[[1,0]],"kmin":1}},"holes":[{{"fourier":[[0.3,0]],"kmin":1,"anchor":[0,0]}}]}}"#).unwrap();
    let p = path.to_str().unwrap();
    let file = potkern(&["kernel", "--domain", p, "--kernel", "szego", "--a", "0.55", "--z", "-0.6i"]);
    let cat = potkern(&["kernel", "--domain", "annulus:0.3", "--kernel", "szego", "--a", "0.55", "--z", "-0.6i"]);
    assert_eq!(file.status.code(), Some(0), "{}", stderr(&file));
    let (a, b) = (numeric_rows(&stdout(&file)), numeric_rows(&stdout(&cat)));
    assert!((a[0][4] - b[0][4]).abs() < 1e-12 && (a[0][5] - b[0][5]).abs() < 1e-12);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"outer":{"fourier":[[1,0]]}}"#).unwrap();
    assert_error(&potkern(&["kernel", "--domain", bad.to_str().unwrap(), "--kernel", "szego", "--grid", "3"]), 2, "bad-domain-spec");

    let crossing = dir.path().join("crossing.json");
    std::fs::write(&crossing, r#"{"outer":{"fourier":[[1,0]],"kmin":1},"holes":[{"fourier":[[0.5,0]],"kmin":1,"anchor":[0.7,0]}]}"#).unwrap();
    let o = potkern(&["kernel", "--domain", crossing.to_str().unwrap(), "--kernel", "szego", "--grid", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error: cause="));
}

#[test]
fn verify_disc_identities_pass() {
    let o = potkern(&["verify", "--domain", "disc", "--suite", "identities"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("check,domain,weight,value,bound,tolerance,pass,note\n"));
    for id in ["I31", "I33", "I34", "I35", "I61", "I62", "I71", "I72"] {
        assert!(text.lines().any(|l| l.starts_with(&format!("{id},disc,unit,")) && l.contains(",PASS,")), "{id}");
    }
}

#[test]
fn failing_check_is_named_and_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.csv");
    let o = potkern(&["verify", "--domain", "disc", "--suite", "identities", "--tol:i34=1e-30", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("fail: check=I34 domain=disc"), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    let report = std::fs::read_to_string(&out).unwrap();
    assert!(report.lines().any(|l| l.starts_with("I34,") && l.contains(",FAIL,")));
}

#[test]
fn verify_disc_dependence_prints_relation() {
    let o = potkern(&["verify", "--domain", "disc", "--suite", "dependence"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let line = text.lines().find(|l| l.starts_with("DEPENDENCE_D1,")).unwrap();
    assert!(line.contains("dependent;") && line.contains("*f'^1"), "{line}");
}

#[test]
fn verify_annulus_reconstruction_rows() {
    let o = potkern(&["verify", "--domain", "annulus:0.3", "--suite", "reconstruction", "--a", "0.55"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for line in stdout(&o).lines().filter(|l| l.starts_with("SZEGO_RECON,") || l.starts_with("SIGMA_RECON,")) {
        let v: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert!(v <= 1e-6, "{line}");
    }
}

fn field(args: &[&str]) -> Vec<Vec<f64>> {
    let o = potkern(args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("x,y,value\n"));
    numeric_rows(&stdout(&o))
}

#[test]
fn plot_green_on_disc_is_minus_log_r() {
    let rows = field(&["plotdata", "--domain", "disc", "--field", "green", "--a", "0", "--resolution", "21"]);
    assert_eq!(rows.len(), 21 * 21);
    let mut inside = 0;
    for r in &rows {
        let rad = r[0].hypot(r[1]);
        if rad >= 1.0 {
            assert!(r[2].is_nan());
        } else if !r[2].is_nan() {
            inside += 1;
            assert!((r[2] + rad.ln()).abs() < 1e-9, "{r:?}");
        }
    }
    assert!(inside > 200);
}

#[test]
fn plot_harmonic_measure_and_ahlfors_modulus_on_annulus() {
    let hm = field(&["plotdata", "--domain", "annulus:0.3", "--field", "harmonic_measure", "--index", "2", "--resolution", "17"]);
    let vals: Vec<f64> = hm.iter().map(|r| r[2]).filter(|v| !v.is_nan()).collect();
    assert!(vals.len() > 50);
    assert!(vals.iter().all(|v| (-1e-9..=1.0 + 1e-9).contains(v)));

    let am = field(&["plotdata", "--domain", "annulus:0.3", "--field", "ahlfors_modulus", "--a", "0.55", "--resolution", "17"]);
    let vals: Vec<(f64, f64)> = am.iter().filter(|r| !r[2].is_nan()).map(|r| (r[0].hypot(r[1]), r[2])).collect();
    assert!(vals.iter().all(|(_, v)| (0.0..1.0).contains(v)));
    let near_edge = vals.iter().filter(|(r, _)| *r > 0.93 || *r < 0.33).map(|(_, v)| *v).fold(1.0, f64::min);
    assert!(near_edge > 0.8, "{near_edge}");
}

#[test]
fn repeated_runs_are_identical() {
    let args = ["kernel", "--domain", "three_connected:0.2,0.5", "--kernel", "bergman", "--grid", "6"];
    let (a, b) = (potkern(&args), potkern(&args));
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
}
