use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bvpp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bvpp-sim"))
        .args(args)
        .env("BVPP_SIM_LOG", "off")
        .output()
        .unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let tariffs = "interval,tou,fit,market_price\n".to_string()
        + &(0..24)
            .map(|h| {
                let peak = (16..21).contains(&h);
                format!("{h},{},{},{}\n", if peak { 0.5 } else { 0.15 }, 0.02, if peak { 0.3 } else { 0.08 })
            })
            .collect::<String>();
    fs::write(dir.join("tariffs.csv"), tariffs).unwrap();
    let path = dir.join("scenario.toml");
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const FLEET: &str = r#"
seed = 5
[tariffs]
file = "tariffs.csv"
[grid]
num_days = 3
[bess]
capacity_kwh = 20.0
max_charge_kw = 5.0
max_discharge_kw = 5.0
[fleet]
count = 30
inefficient_fraction = 0.3
solar_capacity_kw = [2.0, 5.0]
"#;

#[test]
fn version_prints() {
    let out = bvpp(&["version"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("bvpp-sim "));
}

#[test]
fn validate_reports_field_paths_with_exit_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &FLEET.replace("count = 30", "count = 30\ninefficient_fraction_typo = 1"));
    let out = bvpp(&["validate-config", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));

    let cfg = write_config(dir.path(), &FLEET.replace("inefficient_fraction = 0.3", "inefficient_fraction = 3.0"));
    let out = bvpp(&["validate-config", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("fleet.inefficient_fraction"));

    let out = bvpp(&["validate-config"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seed_override_changes_the_hash() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), FLEET);
    let a = bvpp(&["validate-config", "--config", &cfg]);
    let b = bvpp(&["validate-config", "--config", &cfg, "--seed", "6"]);
    let c = bvpp(&["validate-config", "--config", &cfg, "--seed", "5"]);
    assert!(a.status.success() && b.status.success());
    assert_ne!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn full_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), FLEET);
    let mut trees = Vec::new();
    for run in ["a", "b"] {
        let out_dir = dir.path().join(run);
        let out_dir = out_dir.to_str().unwrap();
        for cmd in ["generate", "case1", "case2"] {
            let out = bvpp(&[cmd, "--config", &cfg, "--out", out_dir, "--threads", "2"]);
            assert!(out.status.success(), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        }
        let mut files = Vec::new();
        for sub in ["profiles", "case1", "case1/net_load", "case2"] {
            for e in fs::read_dir(Path::new(out_dir).join(sub)).unwrap() {
                let p = e.unwrap().path();
                if p.is_file() {
                    files.push((p.strip_prefix(out_dir).unwrap().to_path_buf(), fs::read(&p).unwrap()));
                }
            }
        }
        files.sort();
        trees.push(files);
    }
    assert!(trees[0].len() > 60);
    assert_eq!(trees[0], trees[1]);
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("a/manifest-case2.json")).unwrap()).unwrap();
    assert!(manifest["campaign"]["total"].is_number());
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);
}
