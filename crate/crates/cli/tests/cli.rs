use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn circles(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_circles"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("run circles")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("experiment.toml");
    fs::write(&path, body).unwrap();
    path
}

const GASKET: &str = r#"
[packing]
kind = "apollonian"
curvatures = [-1, 2, 2, 3]
"#;

/// Number of distinct circles with curvature below `t`, by applying Descartes
/// reflections to integer curvature quadruples with centers tracked as k·z.
fn gasket_oracle(t: f64) -> usize {
    let root = [(-1.0, 0.0, 0.0), (2.0, 1.0, 0.0), (2.0, -1.0, 0.0), (3.0, 0.0, 2.0)];
    let key = |(k, x, y): (f64, f64, f64)| ((k * 1e6) as i64, ((x / k) * 1e6).round() as i64, ((y / k) * 1e6).round() as i64);
    let mut seen: BTreeSet<_> = root.iter().map(|&c| key(c)).collect();
    let mut stack = vec![(root, 4usize)];
    while let Some((q, last)) = stack.pop() {
        for i in (0..4).filter(|&i| i != last) {
            let others = (0..4).filter(|&j| j != i);
            let k = 2.0 * others.clone().map(|j| q[j].0).sum::<f64>() - q[i].0;
            if k >= t {
                continue;
            }
            let x = 2.0 * others.clone().map(|j| q[j].1).sum::<f64>() - q[i].1;
            let y = 2.0 * others.map(|j| q[j].2).sum::<f64>() - q[i].2;
            seen.insert(key((k, x, y)));
            let mut next = q;
            next[i] = (k, x, y);
            stack.push((next, i));
        }
    }
    seen.len()
}

fn data_rows(csv: &Path) -> usize {
    fs::read_to_string(csv).unwrap().lines().count() - 1
}

#[test]
fn generate_matches_oracle_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), GASKET);
    let config = config.to_str().unwrap();
    let first = circles(dir.path(), &["--config", config, "--tmax", "10", "--out", "a", "generate"]);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let second = Command::new(env!("CARGO_BIN_EXE_circles"))
        .current_dir(dir.path())
        .env("CIRCLES_THREADS", "3")
        .args(["--config", config, "--tmax", "10", "--out", "b", "generate"])
        .output()
        .unwrap();
    assert!(second.status.success());
    let a = dir.path().join("a/packing.csv");
    let b = dir.path().join("b/packing.csv");
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(fs::read(a.with_extension("json")).unwrap(), fs::read(b.with_extension("json")).unwrap());
    assert_eq!(data_rows(&a), gasket_oracle(10.0));
}

#[test]
fn malformed_quadruple_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), "[packing]\nkind = \"apollonian\"\ncurvatures = [1, 1, 1, 1]\n");
    let out = circles(dir.path(), &["--config", config.to_str().unwrap(), "--tmax", "10", "generate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Descartes"));
}

#[test]
fn unknown_config_keys_and_bad_flags_exit_one() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), "tmax = 10.0\n");
    let out = circles(dir.path(), &["--config", config.to_str().unwrap(), "generate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tmax"));
    let out = circles(dir.path(), &["--grid", "16", "count"]);
    assert_eq!(out.status.code(), Some(1));
    let out = circles(dir.path(), &["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn counting_beyond_the_bound_exits_two() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), GASKET);
    let config = config.to_str().unwrap();
    assert!(circles(dir.path(), &["--config", config, "--tmax", "50", "generate"]).status.success());
    let ok = circles(dir.path(), &["--config", config, "--tmax", "50", "count"]);
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));
    let out = circles(dir.path(), &["--config", config, "--tmax", "500", "count"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("hint"));
}

#[test]
fn fit_recovers_fixture_exponent() {
    let dir = TempDir::new().unwrap();
    let series = fixture("synthetic_series.csv");
    let out = circles(dir.path(), &["fit", "--series", series.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let fit: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("out/fit.json")).unwrap()).unwrap();
    let exponent = fit["exponent"].as_f64().unwrap();
    assert!((exponent - 1.5).abs() <= 0.02, "{exponent}");
}

#[test]
fn ratio_of_identical_regions_is_one() {
    let dir = TempDir::new().unwrap();
    let body = format!(
        "{GASKET}\n[[regions]]\nname = \"a\"\nregion = {{ kind = \"disk\", center = [0.1, 0.2], radius = 0.5 }}\n\
         [[regions]]\nname = \"b\"\nregion = {{ kind = \"disk\", center = [0.1, 0.2], radius = 0.5 }}\n"
    );
    let config = write_config(dir.path(), &body);
    let config = config.to_str().unwrap();
    assert!(circles(dir.path(), &["--config", config, "--tmax", "200", "generate"]).status.success());
    let out = circles(dir.path(), &["--config", config, "ratio"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("out/ratio.csv")).unwrap();
    let ratios: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    // below the smallest curvature both counts are zero and the ratio is undefined
    let defined: Vec<&str> = ratios.iter().copied().filter(|r| *r != "NaN").collect();
    assert!(defined.len() >= 10, "{ratios:?}");
    assert!(defined.iter().all(|r| *r == "1"), "{ratios:?}");
    assert_eq!(ratios.last(), Some(&"1"));
}

#[test]
fn render_draws_one_element_per_row() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), GASKET);
    let config = config.to_str().unwrap();
    assert!(circles(dir.path(), &["--config", config, "--tmax", "100", "generate"]).status.success());
    let out = circles(dir.path(), &["render", "--output", "gasket.svg"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let svg = fs::read_to_string(dir.path().join("gasket.svg")).unwrap();
    let elements = svg.matches("<circle ").count() + svg.matches("<line ").count();
    assert_eq!(elements, data_rows(&dir.path().join("out/packing.csv")));
}

#[test]
fn measure_writes_grids_and_report() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), GASKET);
    let config = config.to_str().unwrap();
    assert!(circles(dir.path(), &["--config", config, "--tmax", "2000", "generate"]).status.success());
    let out = circles(dir.path(), &["--grid", "8x8", "--window", "1000,2000", "measure", "--depth", "9"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("out/measure.json")).unwrap()).unwrap();
    assert!(report["pearson"].as_f64().unwrap() > 0.5);
    let grid = fs::read_to_string(dir.path().join("out/omega_ps.csv")).unwrap();
    assert_eq!(grid.lines().count(), 8);
}
