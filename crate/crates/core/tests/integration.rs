use std::process::Command;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use starcc::certify::{
    box_at, certify_inequality, verify_certificate, CertifyConfig, LeafStatus,
};
use starcc::interval::{gap_interval, Box2};
use starcc::model::{in_domain, FreePoint};
use starcc::potential::lambda_component;
use starcc::regions::{region_def, region_plan, Check, Grid, RegionId};

fn quick() -> CertifyConfig {
    CertifyConfig { max_box_width: 0.05, ..CertifyConfig::default() }
}

#[test]
fn certificates_do_not_depend_on_thread_count() {
    let id = RegionId::J16;
    let parallel = certify_inequality(id, &region_plan(id), &quick()).unwrap();
    let serial = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| certify_inequality(id, &region_plan(id), &quick()).unwrap());
    let strip = |c: &starcc::certify::Certificate| {
        let mut c = c.clone();
        c.stats.wall_time_s = 0.0;
        serde_json::to_string(&c).unwrap()
    };
    assert_eq!(strip(&parallel), strip(&serial));
}

/// Float evaluation at random points of certified leaves never undercuts
/// the stored lower bound.
#[test]
fn leaf_bounds_hold_at_sampled_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for id in [RegionId::J1, RegionId::J7, RegionId::J11, RegionId::J16] {
        let cert = certify_inequality(id, &region_plan(id), &quick()).unwrap();
        let region = region_def(id);
        for part in &cert.parts {
            let grid = Grid { rect: part.rect.get().unwrap(), nx: part.nx, ny: part.ny };
            for leaf in part.leaves.iter().step_by(7) {
                let LeafStatus::Certified { bounds } = &leaf.status else { continue };
                let b = box_at(grid.cell(leaf.root as usize), &leaf.path).unwrap();
                for _ in 0..4 {
                    let p = FreePoint::new(
                        b.r3.lo() + rng.random::<f64>() * b.r3.width(),
                        b.r5.lo() + rng.random::<f64>() * b.r5.width(),
                    );
                    if !region.contains(p) {
                        continue;
                    }
                    for (check, lower) in part.checks.iter().zip(bounds) {
                        let Check::Pair { smaller, larger } = check else { continue };
                        let gap = lambda_component(*larger, p).unwrap() - lambda_component(*smaller, p).unwrap();
                        assert!(gap >= lower.0 - 1e-9 * gap.abs().max(1.0), "{id} {p:?}: {gap} < {}", lower.0);
                    }
                }
            }
        }
    }
}

fn admissible_box() -> impl Strategy<Value = Box2> {
    (0.05f64..2.5, 0.05f64..3.0, 1e-5f64..0.2, 1e-5f64..0.2)
        .prop_map(|(r3, r5, w3, w5)| Box2::from_bounds(r3, r3 + w3, r5, r5 + w5))
        .prop_filter("inside the domain", |b| {
            b.corners().iter().all(|&(x, y)| in_domain(FreePoint::new(x, y)))
        })
}

proptest! {
    /// Bisecting a box never lowers the certified gap bound.
    #[test]
    fn refinement_is_monotone(b in admissible_box()) {
        let (s, l) = ("11".parse().unwrap(), "31".parse().unwrap());
        let parent = gap_interval(s, l, &b).unwrap();
        let (lo, hi) = b.bisect();
        for child in [lo, hi] {
            let c = gap_interval(s, l, &child).unwrap();
            prop_assert!(c.lo() >= parent.lo() && c.hi() <= parent.hi());
        }
    }
}

fn starcc(dir: &std::path::Path, args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_starcc"))
        .args(args)
        .env("STARCC_OUT_DIR", dir)
        .output()
        .unwrap()
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let code = |args: &[&str]| starcc(d, args).status.code();

    assert_eq!(code(&["eval", "1", "1", "--all"]), Some(0));
    assert_eq!(code(&["eval", "3", "0.1"]), Some(2));
    assert_eq!(code(&["scan", "--window", "3,1,0,1"]), Some(2));
    assert_eq!(code(&["certify", "J7", "--delta", "0", "--max-depth", "12"]), Some(4));
    assert_eq!(code(&["certify", "all", "--delta", "0.45", "--max-box-width", "0.1"]), Some(3));
    assert_eq!(code(&["certify", "J99"]), Some(2));

    assert_eq!(code(&["certify", "J3", "--max-box-width", "0.05"]), Some(0));
    let cert = d.join("J3.json");
    assert_eq!(code(&["verify", cert.to_str().unwrap()]), Some(0));
    let text = std::fs::read_to_string(&cert).unwrap();
    std::fs::write(&cert, &text[..text.len() / 2]).unwrap();
    let out = starcc(d, &["verify", cert.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&out.stderr).contains("malformed"));
}

#[test]
fn cli_certify_verify_round_trip_and_json_eval() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = starcc(d, &["certify", "J9", "--truncate-r5", "10", "--max-box-width", "0.05", "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["truncation_r5"], 10.0);
    assert!(verify_certificate(&d.join("J9.json")).is_ok());

    let out = starcc(d, &["--json", "eval", "0.6119148403464306", "1", "--index", "31"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let l31 = v["lambda"]["31"].as_f64().unwrap();
    assert!((l31 - 1.37246).abs() < 1e-4, "{l31}");

    let out = starcc(d, &["plotdata", "gap-J1", "40"]);
    assert!(out.status.success());
    let mut rdr = csv::Reader::from_path(d.join("gap-J1.csv")).unwrap();
    let mut rows = 0;
    for rec in rdr.records() {
        let gap: f64 = rec.unwrap()[5].parse().unwrap();
        assert!(gap > 0.0);
        rows += 1;
    }
    assert!(rows > 100);
    let entries: Vec<_> = std::fs::read_dir(d).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(entries.len(), 2, "{entries:?}");
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let from_file = dir.path().join("from_file");
    let from_flag = dir.path().join("from_flag");
    let config = dir.path().join("run.json");
    std::fs::write(
        &config,
        serde_json::json!({ "out_dir": from_file, "max_box_width": 0.05 }).to_string(),
    )
    .unwrap();
    let run = |extra: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_starcc"))
            .args(["--config", config.to_str().unwrap(), "certify", "J5"])
            .args(extra)
            .env_remove("STARCC_OUT_DIR")
            .output()
            .unwrap()
            .status
    };
    assert!(run(&[]).success());
    assert!(from_file.join("J5.json").exists());
    assert!(run(&["--out-dir", from_flag.to_str().unwrap()]).success());
    assert!(from_flag.join("J5.json").exists());
    std::fs::write(&config, r#"{"delta": 0.7}"#).unwrap();
    assert_eq!(run(&[]).code(), Some(2));
}
