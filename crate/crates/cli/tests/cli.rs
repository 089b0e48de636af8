use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const CANONICAL: &str = r#"
order = 6

[problem]
b0 = ["1/4", 1, 0, "1/12"]
v_star = "1/2"

[solve]
points = [[1, "1/4"]]

[curves]
tau = [1e-2, 1e-3, 1e-4]
"#;

fn cusp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cusp")).args(args).output().unwrap()
}

fn run(cmd: &str, config: &str, mode: &str) -> (Output, tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, config).unwrap();
    let out = dir.path().join("out");
    let o = cusp(&[cmd, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--mode", mode]);
    (o, dir, out)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn body(path: &Path) -> String {
    let text = fs::read_to_string(path).unwrap();
    let (head, rest) = text.split_once('\n').unwrap();
    assert!(head.starts_with("# config-sha256: ") && head.len() == 17 + 64, "{head}");
    rest.to_string()
}

#[test]
fn expand_writes_six_tables_and_passes_checklist() {
    let (o, _d, out) = run("expand", CANONICAL, "exact");
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    assert_eq!(s.matches("[pass]").count(), 10, "{s}");
    assert!(!s.contains("FAIL"));
    for f in ["b", "t", "x", "tau", "xi", "jacobian"] {
        assert!(body(&out.join(format!("{f}.txt"))).starts_with("# series exact h V cap 6"));
    }
}

#[test]
fn vanishing_cubic_coefficient_is_rejected() {
    let cfg = CANONICAL.replace(r#"b0 = ["1/4", 1, 0, "1/12"]"#, r#"b0 = ["1/4", 1, 0, 0]"#);
    let (o, _d, _) = run("expand", &cfg, "exact");
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("degenerate: b03 must be nonzero"), "{e}");
    assert!(e.contains("run.toml:5:"), "{e}");
}

#[test]
fn nonsingular_base_point_is_rejected() {
    let cfg = CANONICAL.replace(r#"b0 = ["1/4", 1, 0, "1/12"]"#, r#"b0 = ["1/4", 1, 1, "1/12"]"#);
    let (o, _d, _) = run("normalform", &cfg, "exact");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Jacobian must vanish at base point: b02 must be 0"), "{}", stderr(&o));
}

#[test]
fn curves_give_four_kinds_per_tau() {
    let (o, _d, out) = run("curves", CANONICAL, "exact");
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = body(&out.join("curves.csv"));
    assert_eq!(csv.lines().count(), 1 + 12);
    for kind in ["fold-plus", "fold-minus", "zero-plus", "zero-minus"] {
        assert_eq!(csv.matches(kind).count(), 3);
    }
}

#[test]
fn wrong_side_tau_is_a_domain_error() {
    let cfg = CANONICAL.replace("tau = [1e-2, 1e-3, 1e-4]", "tau = [-1e-3]");
    let (o, _d, _) = run("curves", &cfg, "float");
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn solve_at_cusp_point_is_base_state() {
    let (o, _d, out) = run("solve", CANONICAL, "exact");
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = body(&out.join("branches.csv"));
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 1);
    let f: Vec<&str> = rows[0].split(',').collect();
    assert_eq!(f[3].parse::<f64>().unwrap(), 0.0);
    assert_eq!(f[4].parse::<f64>().unwrap(), 0.5);
}

#[test]
fn far_point_leaves_validity_disc() {
    let cfg = r#"
order = 6
[problem]
alpha = ["1/3", "-1/2"]
b0 = ["1/5", 1, 0, "1/12", "1/16", "-1/25"]
v_star = "1/2"
[solve]
points = [[1.5, 0.3]]
"#;
    let (o, _d, _) = run("solve", cfg, "float");
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("run.toml:8: domain:"), "{}", stderr(&o));
}

#[test]
fn catalan_radius_from_config() {
    let cfg = "[korobeinik]\ng1 = [{ pole = { a = 1, c = 1 } }]\nu = [0]\nterms = 60\n";
    let (o, _d, out) = run("korobeinik", cfg, "exact");
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = body(&out.join("convergence.csv"));
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    let est: f64 = row[2].parse().unwrap();
    assert!((est / 0.25 - 1.0).abs() < 0.01, "{est}");
    assert_eq!(row[4], "converges");
}

#[test]
fn exact_runs_are_byte_identical() {
    let (a, _da, out_a) = run("normalform", CANONICAL, "exact");
    let (b, _db, out_b) = run("normalform", CANONICAL, "exact");
    assert!(a.status.success() && b.status.success());
    for f in ["h_of_tau_v", "lambda1", "lambda2", "u_of_tau_w", "w_of_tau_u", "v_of_w"] {
        let name = format!("{f}.txt");
        assert_eq!(fs::read(out_a.join(&name)).unwrap(), fs::read(out_b.join(&name)).unwrap());
    }
}

#[test]
fn config_errors_name_the_line() {
    let (o, _d, _) = run("expand", "order = 6\nunknown_key = 3\n", "exact");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown_key"), "{}", stderr(&o));
    let (o, _d, _) = run("expand", &CANONICAL.replace("order = 6", "order = 2"), "exact");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("run.toml:2: usage: order must lie in [3, 16], got 2"), "{}", stderr(&o));
    let (o, _d, _) = run("verify", CANONICAL, "exact");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("missing [verify] section"));
}

#[test]
fn verify_reports_second_order() {
    let cfg = format!(
        "{CANONICAL}\n[verify]\ncenter = [-0.05, 0]\nhalf_width = [1e-3, 1e-3]\nsteps = [4e-5, 2e-5, 1e-5]\n"
    );
    let (o, _d, out) = run("verify", &cfg, "exact");
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("empirical order: mass 2.0"), "{}", stdout(&o));
    assert_eq!(body(&out.join("residual.csv")).lines().count(), 4);
}
