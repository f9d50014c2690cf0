use std::process::Command as Process;

use lucas3::{census, predicted_histogram, LucasParams, Modulus3Pow, SequenceKind};
use lucas3_cli::{
    run_from_args, PredictionPayload, Report, Status, EXIT_MISMATCH, EXIT_OK, EXIT_RESOURCE,
    EXIT_USAGE,
};

fn run(args: &str) -> lucas3_cli::Outcome {
    run_from_args(std::iter::once("lucas3").chain(args.split_whitespace()))
}

fn report(args: &str) -> Report {
    let out = run(args);
    assert_eq!(out.code, EXIT_OK, "{args}: {}", out.stderr);
    serde_json::from_str(&out.stdout).unwrap()
}

#[test]
fn verify_p1_is_clean() {
    let r = report("verify --P 1 --kind u --k 1..4 --format json");
    assert_eq!(r.rows.len(), 4);
    for row in &r.rows {
        assert_eq!(row.status, Status::Ok);
        assert!(row.diffs.as_ref().unwrap().is_empty());
    }
}

#[test]
fn census_csv_rows() {
    let out = run("census --P 5 --kind u --k 3 --format csv");
    assert_eq!(out.code, EXIT_OK);
    let body: Vec<&str> = out.stdout.lines().skip(1).collect();
    assert_eq!(
        body,
        [
            "5,u,3,0,2",
            "5,u,3,1,2",
            "5,u,3,5,1",
            "5,u,3,22,1",
            "5,u,3,26,2"
        ]
    );
}

#[test]
fn period_below_delta_falls_back() {
    let r = report("period --P 9 --k 1 --kind u");
    let row = &r.rows[0];
    assert_eq!(row.status, Status::UnsupportedClosedForm);
    assert_eq!(row.period, Some(2));
}

#[test]
fn predict_below_delta_is_empirical() {
    let r = report("predict --P 27 --k 1..3 --kind v");
    let statuses: Vec<Status> = r.rows.iter().map(|r| r.status).collect();
    assert_eq!(statuses, [Status::Empirical, Status::Empirical, Status::Ok]);
    assert!(r.rows[0].histogram.is_some());
}

#[test]
fn json_round_trip_reproduces_census() {
    let r = report("census --P 4 --kind both --k 1..4");
    for row in &r.rows {
        let kind = row.kind.unwrap();
        let m = Modulus3Pow::new(row.k.unwrap()).unwrap();
        let c = census(LucasParams::new(4).unwrap(), kind, &m).unwrap();
        assert_eq!(row.histogram.as_ref().unwrap(), c.histogram());
        assert_eq!(row.period, Some(c.period()));
    }
    let text = serde_json::to_string_pretty(&r).unwrap() + "\n";
    assert_eq!(text, run("census --P 4 --kind both --k 1..4").stdout);
}

#[test]
fn json_round_trip_reproduces_prediction() {
    let r = report("predict --P 7 --kind v --k 4");
    let m = Modulus3Pow::new(4).unwrap();
    let expected = predicted_histogram(LucasParams::new(7).unwrap(), SequenceKind::V, &m).unwrap();
    match r.rows[0].prediction.as_ref().unwrap() {
        PredictionPayload::Histogram(h) => assert_eq!(h, &expected),
        other => panic!("unexpected payload {other:?}"),
    }
    let r = report("predict --P 1 --kind u --k 2 --b 8");
    match r.rows[0].prediction.as_ref().unwrap() {
        PredictionPayload::Residue {
            residue,
            prediction,
        } => {
            assert_eq!((*residue, prediction.count, prediction.line), (8, 5, 1));
        }
        other => panic!("unexpected payload {other:?}"),
    }
}

#[test]
fn output_is_deterministic() {
    for args in [
        "census --P 2 --k 1..3",
        "verify --P 6 --k 1..3 --format csv",
        "stability --P 1 --kind u --k 1..4 --format text",
    ] {
        assert_eq!(run(args), run(args));
    }
}

#[test]
fn chunked_output_matches_sequential() {
    assert_eq!(
        run("census --P 5 --k 4..5").stdout,
        run("census --P 5 --k 4..5 --chunk 37").stdout
    );
}

#[test]
fn exit_codes() {
    assert_eq!(run("census --P 0 --k 1").code, EXIT_USAGE);
    assert_eq!(run("census --P 1").code, EXIT_USAGE);
    assert_eq!(run("census --P 1 --k 0").code, EXIT_USAGE);
    assert_eq!(run("frobnicate --P 1 --k 1").code, EXIT_USAGE);
    assert_eq!(run("census --P 1 --k 1 --budget 0").code, EXIT_USAGE);
    assert_eq!(run("census --P 1 --k 6 --kmax 5").code, EXIT_USAGE);
    assert_eq!(run("predict --P -3 --k 2").code, EXIT_USAGE);
    assert_eq!(run("predict --P 1 --k 2 --b 9").code, EXIT_USAGE);
    assert_eq!(run("valuation --P 1 --kind u --n 0").code, EXIT_USAGE);
    assert_eq!(run("census --P 1 --k 6 --budget 100").code, EXIT_RESOURCE);
    assert_eq!(run("eval --P 1 --n 100000").code, EXIT_RESOURCE);
    assert_eq!(run("--help").code, EXIT_OK);
}

#[test]
fn mismatch_exit_code_is_reserved_for_failed_checks() {
    // every supported configuration agrees, so 1 never appears on a clean run
    for args in [
        "verify --P 2 --k 1..4",
        "identities --P -4 --radius 8",
        "valuation --P 5 --n 36",
    ] {
        let out = run(args);
        assert_ne!(out.code, EXIT_MISMATCH, "{args}");
        assert_eq!(out.code, EXIT_OK, "{args}");
    }
}

#[test]
fn negative_p_census_is_allowed() {
    let r = report("census --P -2 --kind u --k 2");
    assert!(r.rows[0].case.is_none());
    assert_eq!(r.rows[0].period, Some(24));
}

#[test]
fn flags_follow_code_paths() {
    use lucas3::DiscrepancyFlag::*;
    let r = report("verify --P 4 --kind u --k 3..5");
    for row in &r.rows {
        assert!(row.discrepancy_flags.contains(&PeriodConstant));
        assert!(row.discrepancy_flags.contains(&ClassIndexExponent));
    }
    assert!(r.rows.last().unwrap().alternate_reading_mismatches.unwrap() > 0);
    let r = report("verify --P 3 --kind v --k 2");
    assert_eq!(r.rows[0].discrepancy_flags, [ZeroClassCount]);
    let r = report("valuation --P 2 --n 8");
    assert!(r
        .rows
        .iter()
        .all(|row| row.discrepancy_flags == [ValuationFormula]));
}

#[test]
fn env_overrides_budget() {
    let out = Process::new(env!("CARGO_BIN_EXE_lucas3"))
        .args(["census", "--P", "1", "--k", "5"])
        .env("LUCAS3_BUDGET", "50")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_RESOURCE));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));

    let out = Process::new(env!("CARGO_BIN_EXE_lucas3"))
        .args(["census", "--P", "1", "--k", "5"])
        .env("LUCAS3_KMAX", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
}

#[test]
fn binary_prints_report() {
    let out = Process::new(env!("CARGO_BIN_EXE_lucas3"))
        .args([
            "omega", "--P", "1", "--kind", "u", "--k", "3", "--format", "csv",
        ])
        .env_remove("LUCAS3_BUDGET")
        .env_remove("LUCAS3_KMAX")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "P,kind,k,period,omega,differs_from_previous\n1,u,3,72,2 5 8,\n"
    );
}
