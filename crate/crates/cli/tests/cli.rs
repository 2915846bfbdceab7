use std::path::{Path, PathBuf};
use std::process::Command;

use proptest::prelude::*;
use qif::measures::{lift_capacity, verify_ldp};
use qif::{q, Channel, ExtRational, Prior, Rational};
use qif_cli::formats::{parse_channel_csv, parse_prior_csv, write_channel_csv, write_prior_csv};
use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

struct Run {
    stdout: String,
    stderr: String,
    code: i32,
}

fn qif(args: &[&str]) -> Run {
    qif_env(args, None)
}

fn qif_env(args: &[&str], seed: Option<&str>) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qif"));
    cmd.args(args).env_remove("QIF_SEED");
    if let Some(s) = seed {
        cmd.env("QIF_SEED", s);
    }
    let out = cmd.output().expect("binary runs");
    Run {
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
        code: out.status.code().unwrap(),
    }
}

fn write_temp(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn path(name: &str) -> String {
    data(name).display().to_string()
}

#[test]
fn analyze_lift_on_survey() {
    let r = qif(&[
        "analyze",
        "--channel",
        &path("survey.csv"),
        "--prior",
        &path("survey_prior.csv"),
        "--measure",
        "lift",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout, "19/11 (1.7273) witness secret=bg obs=b\n");
}

#[test]
fn capacity_of_g() {
    let r = qif(&["capacity", "--channel", &path("G.csv"), "--kind", "lift"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout.lines().next(), Some("4 (ln = 1.3863)"));
    let r = qif(&[
        "capacity",
        "--channel",
        &path("survey.csv"),
        "--kind",
        "bayes",
    ]);
    assert_eq!(r.stdout.lines().next(), Some("17/10 (ln = 0.5306)"));
}

#[test]
fn compare_g_and_r() {
    let r = qif(&[
        "compare",
        "--channel",
        &path("G.csv"),
        "--channel",
        &path("R.csv"),
        "--prior",
        "uniform",
        "--gain",
        "gid",
    ]);
    assert_eq!(r.code, 0);
    let lines: Vec<&str> = r.stdout.lines().collect();
    assert_eq!(lines.len(), 3);
    let g: Vec<&str> = lines[1]
        .split("  ")
        .filter(|s| !s.is_empty())
        .map(str::trim)
        .collect();
    let rr: Vec<&str> = lines[2]
        .split("  ")
        .filter(|s| !s.is_empty())
        .map(str::trim)
        .collect();
    assert_eq!(
        g,
        [
            "G",
            "5/3 (1.6667)",
            "12/7 (1.7143)",
            "5/3 (1.6667)",
            "4 (ln = 1.3863)"
        ]
    );
    assert_eq!(
        rr,
        [
            "R",
            "9/5 (1.8000)",
            "9/5 (1.8000)",
            "9/5 (1.8000)",
            "3 (ln = 1.0986)"
        ]
    );
}

#[test]
fn text_and_json_agree() {
    let cases: Vec<Vec<String>> = vec![
        vec![
            "analyze",
            "--channel",
            &path("survey.csv"),
            "--prior",
            &path("survey_prior.csv"),
            "--measure",
            "lift",
        ],
        vec![
            "analyze",
            "--channel",
            &path("G.csv"),
            "--prior",
            "uniform",
            "--gain",
            "gid",
            "--measure",
            "max-case-leakage",
        ],
        vec![
            "analyze",
            "--channel",
            &path("G.csv"),
            "--prior",
            "uniform",
            "--gain",
            "gid",
            "--measure",
            "mult-leakage",
        ],
        vec![
            "analyze",
            "--channel",
            &path("survey.csv"),
            "--prior",
            &path("survey_prior.csv"),
            "--gain",
            "reciprocal",
            "--measure",
            "max-posterior-vulnerability",
        ],
        vec!["capacity", "--channel", &path("survey.csv")],
        vec!["capacity", "--channel", &path("R.csv"), "--kind", "bayes"],
    ]
    .into_iter()
    .map(|v| v.into_iter().map(String::from).collect())
    .collect();
    for args in cases {
        let a: Vec<&str> = args.iter().map(String::as_str).collect();
        let text = qif(&a);
        let mut j = a.clone();
        j.extend(["--format", "json"]);
        let json = qif(&j);
        assert_eq!((text.code, json.code), (0, 0), "{args:?}");
        let v: Value = serde_json::from_str(&json.stdout).unwrap();
        let exact = if v["value"]["den"] == "1" {
            v["value"]["num"].as_str().unwrap().to_string()
        } else {
            format!(
                "{}/{}",
                v["value"]["num"].as_str().unwrap(),
                v["value"]["den"].as_str().unwrap()
            )
        };
        let headline = text.stdout.lines().next().unwrap();
        assert!(
            headline.starts_with(&format!("{exact} (")),
            "{args:?}: {headline} vs {exact}"
        );
        assert!(
            headline.contains(v["decimal"].as_str().unwrap()) || v.get("ln").is_some(),
            "{args:?}"
        );
        if let Some(w) = v["witness"].as_object() {
            for (k, l) in w {
                assert!(
                    text.stdout
                        .contains(&format!("{k}={}", l.as_str().unwrap())),
                    "{args:?}"
                );
            }
        }
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ragged = write_temp(&dir, "ragged.csv", "channel,u,v\na,1\n");
    let r = qif(&["capacity", "--channel", &ragged]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("line 2"), "{}", r.stderr);

    let off = write_temp(&dir, "off.csv", "channel,u,v\na,1/2,1/2\nb,1/2,49/100\n");
    let r = qif(&["capacity", "--channel", &off]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("row b sums to 99/100"), "{}", r.stderr);

    // lift needs a prior
    let r = qif(&["analyze", "--channel", &path("G.csv"), "--measure", "lift"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("needs --prior"));
    // Bayes capacity needs nothing else
    let r = qif(&[
        "analyze",
        "--channel",
        &path("G.csv"),
        "--measure",
        "bayes-capacity",
    ]);
    assert_eq!(r.code, 0);

    let r = qif(&["capacity", "--channel", "/nonexistent/channel.csv"]);
    assert_eq!(r.code, 2);

    let wrong = write_temp(&dir, "wrong_prior.csv", "p,1/2\nq,1/2\n");
    let r = qif(&[
        "analyze",
        "--channel",
        &path("G.csv"),
        "--prior",
        &wrong,
        "--measure",
        "lift",
    ]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("label mismatch"), "{}", r.stderr);

    let zero = write_temp(&dir, "zero_prior.csv", "x1,1\nx2,0\nx3,0\n");
    let r = qif(&[
        "analyze",
        "--channel",
        &path("G.csv"),
        "--prior",
        &zero,
        "--gain",
        "reciprocal",
        "--measure",
        "max-case-leakage",
    ]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("x2"), "{}", r.stderr);
}

#[test]
fn verify_exit_codes() {
    let survey = path("survey.csv");
    assert_eq!(
        qif(&["verify", "ldp", "--channel", &survey, "--factor", "15"]).code,
        0
    );
    assert_eq!(
        qif(&["verify", "ldp", "--channel", &survey, "--factor", "14.9"]).code,
        1
    );
    assert_eq!(
        qif(&["verify", "ldp", "--channel", &survey, "--factor", "inf"]).code,
        0
    );
    assert_eq!(
        qif(&["verify", "ldp", "--channel", &survey, "--factor", "1/2"]).code,
        2
    );
    assert_eq!(
        qif(&["verify", "ldp", "--channel", &survey, "--factor", "abc"]).code,
        2
    );
    let prior = path("survey_prior.csv");
    assert_eq!(
        qif(&[
            "verify",
            "lip",
            "--channel",
            &survey,
            "--prior",
            &prior,
            "--factor",
            "9"
        ])
        .code,
        0
    );
    assert_eq!(
        qif(&[
            "verify",
            "lip",
            "--channel",
            &survey,
            "--prior",
            &prior,
            "--factor",
            "8"
        ])
        .code,
        1
    );
}

#[test]
fn verify_ldp_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let c = parse_channel_csv(&std::fs::read_to_string(data("G.csv")).unwrap()).unwrap();
    let file = write_temp(&dir, "g.csv", &write_channel_csv(&c));
    for k in ["1", "2", "3", "7/2", "4", "4.01", "100", "inf"] {
        let expected = verify_ldp(&c, &ExtRational::parse(k).unwrap()).unwrap();
        let r = qif(&["verify", "ldp", "--channel", &file, "--factor", k]);
        assert_eq!(r.code, if expected { 0 } else { 1 }, "factor {k}");
        let j = qif(&[
            "verify",
            "ldp",
            "--channel",
            &file,
            "--factor",
            k,
            "--format",
            "json",
        ]);
        let v: Value = serde_json::from_str(&j.stdout).unwrap();
        assert_eq!(v["holds"], expected);
    }
}

#[test]
fn dalenius_subcommand() {
    let r = qif(&[
        "dalenius",
        "--joint",
        &path("habit_correlation.csv"),
        "--channel",
        &path("G.csv"),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("MaxLift(DC) = 35/11"));
    assert!(r.stdout.contains("MaxLift(C)  = 4 (ln = 1.3863)"));
    let j = qif(&[
        "dalenius",
        "--joint",
        &path("habit_correlation.csv"),
        "--channel",
        &path("G.csv"),
        "--format",
        "json",
    ]);
    let v: Value = serde_json::from_str(&j.stdout).unwrap();
    assert_eq!(v["capacity"]["lift_capacity_dc"]["value"]["num"], "35");
    assert_eq!(v["lift"]["holds"], true);
    assert_eq!(v["lift"]["pushforward"]["x3"], "2/5");
}

#[test]
fn hyper_and_chain_measures() {
    let r = qif(&[
        "analyze",
        "--channel",
        &path("survey.csv"),
        "--prior",
        &path("survey_prior.csv"),
        "--measure",
        "hyper",
    ]);
    assert!(
        r.stdout.contains("b    11/20  15/44  5/22  19/44"),
        "{}",
        r.stdout
    );
    let r = qif(&[
        "analyze",
        "--channel",
        &path("R.csv"),
        "--prior",
        "uniform",
        "--gain",
        "gid",
        "--measure",
        "chain",
    ]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.starts_with("ordering chain: all 6 relations hold"));
    assert!(r.stdout.contains("lift capacity: 3 (ln = 1.0986)"));
}

#[test]
fn fuzz_seed_from_environment() {
    let a = qif_env(&["fuzz", "--trials", "5", "--format", "json"], Some("42"));
    let b = qif_env(
        &["fuzz", "--trials", "5", "--format", "json", "--seed", "7"],
        Some("0x2a"),
    );
    assert_eq!(a.code, 0);
    let (va, vb): (Value, Value) = (
        serde_json::from_str(&a.stdout).unwrap(),
        serde_json::from_str(&b.stdout).unwrap(),
    );
    assert_eq!(va["seed"], 42);
    assert_eq!(va, vb);
    assert_eq!(qif_env(&["fuzz", "--trials", "5"], Some("nope")).code, 2);
    assert_eq!(qif(&["fuzz", "--trials", "0"]).code, 2);
}

#[test]
fn fuzz_reports_mutant() {
    let r = qif(&[
        "fuzz",
        "--trials",
        "40",
        "--mutant",
        "broken-lift",
        "--format",
        "json",
    ]);
    assert_eq!(r.code, 1);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    let failed: Vec<&Value> = v["properties"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|p| p["passed"] == false)
        .collect();
    assert!(!failed.is_empty());
    for f in failed {
        let dims = &f["failure"]["shrunk_dims"];
        assert!(dims[0].as_u64().unwrap() <= 3 && dims[1].as_u64().unwrap() <= 3);
        // the shrunk channel is a loadable file
        parse_channel_csv(f["failure"]["shrunk"]["channel"].as_str().unwrap()).unwrap();
    }
}

fn channel_strategy() -> impl Strategy<Value = Channel> {
    (1..=4usize, 1..=4usize).prop_flat_map(|(n, m)| {
        prop::collection::vec(
            prop::collection::vec(0..=20i64, m).prop_filter("mass", |r| r.iter().any(|&k| k > 0)),
            n,
        )
        .prop_map(move |rows| {
            let rows = rows
                .into_iter()
                .map(|r| r.into_iter().map(|k| q(k, 7)).collect())
                .collect();
            Channel::from_weights(
                qif::label::numbered("s", n),
                qif::label::numbered("o", m),
                rows,
            )
            .unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn channel_round_trip(c in channel_strategy()) {
        let text = write_channel_csv(&c);
        prop_assert_eq!(parse_channel_csv(&text).unwrap(), c);
    }

    #[test]
    fn decimal_cells_read_exactly(parts in prop::collection::vec(0..=1000u32, 1..=4)) {
        // the last cell takes whatever is left of 1000 thousandths
        let used: u32 = parts.iter().sum();
        prop_assume!(used <= 1000);
        let mut ks = parts.clone();
        ks.push(1000 - used);
        let cells: Vec<String> = ks.iter().map(|k| format!("{}.{:03}", k / 1000, k % 1000)).collect();
        let text = format!("channel,{}\nx,{}\n",
            qif::label::numbered("o", ks.len()).iter().map(ToString::to_string).collect::<Vec<_>>().join(","),
            cells.join(","));
        let c = parse_channel_csv(&text).unwrap();
        let expected: Vec<Rational> = ks.iter().map(|&k| q(k as i64, 1000)).collect();
        prop_assert_eq!(c.row(0), &expected[..]);
        prop_assert_eq!(parse_channel_csv(&write_channel_csv(&c)).unwrap(), c);
    }

    #[test]
    fn prior_round_trip(ws in prop::collection::vec(1..=30i64, 1..=5)) {
        let w: Vec<Rational> = ws.iter().map(|&k| q(k, 1)).collect();
        let p = Prior::from_weights(qif::label::numbered("x", ws.len()), &w).unwrap();
        prop_assert_eq!(parse_prior_csv(&write_prior_csv(&p)).unwrap(), p);
    }
}

#[test]
fn lift_capacity_via_cli_matches_library_for_infinite() {
    let dir = tempfile::tempdir().unwrap();
    let id = write_temp(&dir, "id.csv", "channel,a,b\na,1,0\nb,0,1\n");
    let r = qif(&["capacity", "--channel", &id]);
    assert_eq!(r.stdout.lines().next(), Some("inf (ln = inf)"));
    let c = parse_channel_csv("channel,a,b\na,1,0\nb,0,1\n").unwrap();
    assert_eq!(lift_capacity(&c), ExtRational::Infinite);
    let j = qif(&["capacity", "--channel", &id, "--format", "json"]);
    let v: Value = serde_json::from_str(&j.stdout).unwrap();
    assert_eq!(v["value"]["infinite"], true);
}
