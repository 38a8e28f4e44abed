use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

use dofcsit_cli::{cmd_compare, cmd_region, cmd_synth, CompareGrid};
use dofcsit_core::io::parse_profile;
use dofcsit_core::{ReducePolicy, User};

fn profile(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../profiles").join(name)
}

fn dofcsit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dofcsit")).args(args).output().unwrap()
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn region_of_fig4() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("region.json");
    let o = dofcsit(&["region", "--profile", arg(&profile("fig4.profile")), "--out", arg(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&out);
    let w = &v["weights"];
    assert!((w["r_bar"].as_f64().unwrap() - 1.4).abs() < 1e-12);
    assert!((w["r_hat"].as_f64().unwrap() - 1.2).abs() < 1e-12);
    assert!((w["r_tilde"].as_f64().unwrap() - 1.4).abs() < 1e-12);
    let verts = v["region"]["vertices"].as_array().unwrap();
    for corner in [[0.5, 1.0], [1.0, 0.5]] {
        assert!(verts.iter().any(|p| p[0].as_f64() == Some(corner[0]) && p[1].as_f64() == Some(corner[1])));
    }
    assert!(String::from_utf8_lossy(&o.stdout).contains("sum DoF 1.5"));
}

#[test]
fn matched_profile_has_zero_r_hat() {
    let r = cmd_region(&dofcsit_cli::load_profile(&profile("fig5a.profile")).unwrap()).unwrap();
    assert_eq!(r.weights.r_hat, 0.0);
    assert_eq!(r.weights.r_bar, 2.0);
    assert_eq!(r.weights.r_tilde, 2.0);
}

#[test]
fn shipped_profiles_compose_exactly() {
    for entry in fs::read_dir(profile("")).unwrap() {
        let path = entry.unwrap().path();
        let r = cmd_region(&dofcsit_cli::load_profile(&path).unwrap()).unwrap();
        assert!(r.composition_residual <= 1e-9, "{}", path.display());
    }
}

#[test]
fn shipped_profiles_round_trip() {
    for entry in fs::read_dir(profile("")).unwrap() {
        let path = entry.unwrap().path();
        let p = parse_profile(&fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(parse_profile(&dofcsit_core::io::serialize_profile(&p)).unwrap(), p);
    }
}

#[test]
fn empty_profile_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.profile");
    fs::write(&empty, "").unwrap();
    let o = dofcsit(&["region", "--profile", arg(&empty)]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("parse error"), "{err}");
    assert!(err.contains("`L`"), "{err}");
}

#[test]
fn synth_of_p2_writes_a_checked_plan() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("plan.json");
    let o = dofcsit(&["synth", "--profile", arg(&profile("p2_unmatched.profile")), "--out", arg(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let v = json(&out);
    assert_eq!(v["all_checks_passed"], Value::Bool(true));
    let sb1 = &v["plan"]["subbands"][0]["symbols"];
    let kinds: Vec<&str> = sb1.as_array().unwrap().iter().map(|s| s["kind"].as_str().unwrap()).collect();
    assert_eq!(kinds, ["common_i", "private_u", "common_ii", "private_v"]);
    assert_eq!(sb1[1]["power_lo"], Value::from("floor"));
    assert_eq!(sb1[2]["message"], Value::from("u0(1)"));
    assert_eq!(v["rate_accounting"]["d2"].as_f64(), Some(0.5));
}

#[test]
fn q2_policies_give_distinct_plans_with_equal_accounting() {
    let p = dofcsit_cli::load_profile(&profile("q2.profile")).unwrap();
    let a = cmd_synth(&p, User::One, ReducePolicy::LargestGap).unwrap();
    let b = cmd_synth(&p, User::One, ReducePolicy::LowestIndex).unwrap();
    assert!(a.all_checks_passed && b.all_checks_passed);
    assert_ne!(a.plan.profile, b.plan.profile);
    assert_ne!(a.plan.subbands, b.plan.subbands);
    assert_eq!(a.rate_accounting, b.rate_accounting);
}

#[test]
fn matched_plan_has_no_common_ii() {
    let p = dofcsit_cli::load_profile(&profile("fig5a.profile")).unwrap();
    let r = cmd_synth(&p, User::Two, ReducePolicy::default()).unwrap();
    assert!(r.plan.subbands.iter().flat_map(|s| &s.symbols).all(|s| s.kind != "common_ii"));
}

#[test]
fn simulate_rejects_a_short_grid() {
    let o = dofcsit(&[
        "simulate",
        "--profile",
        arg(&profile("p2_unmatched.profile")),
        "--snr-db",
        "30",
        "--trials",
        "1",
        "--fit-points",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("grid"));
}

#[test]
fn simulate_is_byte_identical_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let out = dir.path().join(name);
        let o = dofcsit(&[
            "simulate",
            "--profile",
            arg(&profile("p3.profile")),
            "--trials",
            "200",
            "--seed",
            "99",
            "--threads",
            threads,
            "--out",
            arg(&out),
        ]);
        assert!(o.status.code().is_some_and(|c| c < 2), "{}", String::from_utf8_lossy(&o.stderr));
        fs::read(&out).unwrap()
    };
    let a = run("a.csv", "1");
    let b = run("b.csv", "4");
    let c = run("c.csv", "1");
    assert_eq!(a, b);
    assert_eq!(a, c);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("snr_db,message_id,context,rate_bits\n"));
    assert!(!text.contains('\r'));
    assert!(text.contains(",u0(2),user2@subband3,"));
    assert!(text.contains(",deliverable,"));
    assert!(dir.path().join("a.summary.json").is_file());
}

#[test]
fn simulate_p2_summary_passes() {
    let dir = tempfile::tempdir().unwrap();
    let p2 = dir.path().join("p2.profile");
    fs::write(&p2, "L = 2\na = [0.8, 0.4]\nb = [0.4, 0.8]\n").unwrap();
    let cfg = dir.path().join("sim.toml");
    fs::write(&cfg, "trials = 1000\nseed = 5\nsnr-db = [20, 30, 40, 50, 60]\n").unwrap();
    let out = dir.path().join("p2.csv");
    let o = dofcsit(&["simulate", "--profile", arg(&p2), "--config", arg(&cfg), "--out", arg(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let s = json(&dir.path().join("p2.summary.json"));
    assert_eq!(s["pass"], Value::Bool(true));
    assert_eq!(s["trials"], Value::from(1000));
    assert!((s["fitted"]["d2"].as_f64().unwrap() - 0.6).abs() <= 0.1);
}

#[test]
fn compare_rows() {
    let t = cmd_compare(&CompareGrid::Lists {
        alpha: vec![0.0, 0.3, 1.0],
        beta: vec![1.0, 0.7],
    })
    .unwrap();
    let row = |a: f64, b: f64| t.rows.iter().find(|r| r.alpha == a && r.beta == b).unwrap();
    let r = row(0.0, 1.0);
    assert!((r.d_sub - 4.0 / 3.0).abs() < 1e-12 && (r.d_opt - 1.5).abs() < 1e-12);
    assert!((r.gap - 1.0 / 6.0).abs() < 1e-12 && r.strict_gap);
    assert_eq!(row(0.3, 0.7).gap, 0.0);
    assert!(!row(0.3, 0.7).strict_gap);
    let r = row(1.0, 1.0);
    assert!(r.d_sub == 2.0 && r.d_opt == 2.0 && r.gap == 0.0);
    assert_eq!(t.rows.len(), 5);
    assert_eq!(t.warnings.len(), 1);
}

#[test]
fn compare_warns_on_order_violations() {
    let o = dofcsit(&["compare", "--alpha", "0.5", "--beta", "0.2,0.6"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning: skipped"));
    let out = String::from_utf8(o.stdout).unwrap();
    assert_eq!(out.lines().count(), 2);
    assert!(out.starts_with("alpha,beta,d_sub,d_opt,gap,strict_gap\n0.5,0.6,"));
}

#[test]
fn default_compare_grid_covers_the_triangle() {
    let t = cmd_compare(&CompareGrid::default()).unwrap();
    assert_eq!(t.rows.len(), 101 * 102 / 2);
    assert!(t.warnings.is_empty());
}

#[test]
fn unknown_owner_is_rejected() {
    let o = dofcsit(&["synth", "--profile", arg(&profile("q2.profile")), "--owner", "3"]);
    assert!(!o.status.success());
}
