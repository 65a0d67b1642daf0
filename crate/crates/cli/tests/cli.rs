use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ghostbox(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ghostbox"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn play_writes_transcript_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["play", "--n", "200", "--p", "0.2", "--b", "2", "--eps", "0.5", "--breaker", "random", "--seed", "7"];
    let o = ghostbox(&args, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let t = read_json(&dir.path().join("game.transcript.json"));
    let r = read_json(&dir.path().join("game.report.json"));
    let hash = t["hash"].as_str().unwrap();
    assert_eq!(hash.len(), 16);
    assert!(hash.chars().all(|c| c.is_ascii_hexdigit()));
    assert_eq!(r["transcript_hash"], t["hash"]);
    assert!(r["code_version"].as_str().unwrap().starts_with("ghostbox "));
    assert_eq!(r["params"]["n"], 200);
    assert_eq!(r["breaker"]["name"], "random");

    let v = ghostbox(&["verify", "game.transcript.json"], dir.path());
    assert_eq!(v.status.code(), Some(0), "{}", stderr(&v));
    let report: Value = serde_json::from_slice(&v.stdout).unwrap();
    assert_eq!(report["pass"], true);

    let again = tempfile::tempdir().unwrap();
    assert_eq!(ghostbox(&args, again.path()).status.code(), Some(0));
    assert_eq!(
        std::fs::read(dir.path().join("game.transcript.json")).unwrap(),
        std::fs::read(again.path().join("game.transcript.json")).unwrap()
    );
}

#[test]
fn triangle_blocker_keeps_maker_triangle_free() {
    let dir = tempfile::tempdir().unwrap();
    let o = ghostbox(
        &["play", "--n", "99", "--b", "40", "--breaker", "triangle-blocker", "--maker", "potential", "--p", "1.0", "--out", "tb"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = read_json(&dir.path().join("tb.report.json"));
    assert_eq!(r["triangle_free"], true);
}

#[test]
fn bad_parameters_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = ghostbox(&["play", "--n", "20", "--p", "1.5", "--b", "1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("p out of range"), "{}", stderr(&o));
    let o = ghostbox(&["play", "--n", "20", "--p", "0.5", "--b", "1", "--breaker", "k4-blocker", "--v0", "20"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = ghostbox(&["sweep", "--n", "20", "--p", "0.5", "--b", "8-1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("empty range"));
    let o = ghostbox(&["play", "--n", "20"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = ghostbox(&["verify", "missing.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));

    std::fs::write(dir.path().join("junk.json"), "{\"kind\": \"real\", ").unwrap();
    let o = ghostbox(&["verify", "junk.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("byte"), "{}", stderr(&o));

    let o = ghostbox(&["play", "--n", "30", "--p", "0.5", "--b", "2", "--seed", "4"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let path = dir.path().join("game.transcript.json");
    let mut t = read_json(&path);
    // hand edit: move Maker's first claim over to Breaker
    let events = t["events"].as_array_mut().unwrap();
    let i = events.iter().position(|e| e["t"] == "MK").unwrap();
    let e = events[i]["e"].clone();
    events[i] = serde_json::json!({"t": "BK", "e": [e]});
    std::fs::write(&path, serde_json::to_string(&t).unwrap()).unwrap();
    let o = ghostbox(&["verify", "game.transcript.json"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("invariant check"), "{}", stderr(&o));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["pass"], false);
}

#[test]
fn sweep_rows_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sweep", "--n", "16", "--p", "0.5", "--b", "1-8", "--seeds", "0-2", "--out", "a.csv"];
    let o = ghostbox(&args, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert!(text.starts_with("# ghostbox "));
    assert!(text.contains("config={"));
    let mut rd = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = rd.headers().unwrap().clone();
    assert_eq!(headers.len(), 12);
    assert_eq!(&headers[0], "n");
    assert_eq!(&headers[11], "transcript_hash");
    let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 24);
    assert_eq!(&rows[0][2], "1");
    assert_eq!(&rows[23][2], "8");
    assert_eq!(&rows[23][4], "2");

    let o = ghostbox(&["sweep", "--n", "16", "--p", "0.5", "--b", "1-8", "--seeds", "0-2"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8(o.stdout).unwrap(), text);
}

#[test]
fn saturating_sweep_gives_zero_degree() {
    let dir = tempfile::tempdir().unwrap();
    let o = ghostbox(&["sweep", "--n", "12", "--p", "0.8", "--b", "66,100", "--seeds", "0,1"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| &r[5] == "0"));
}

#[test]
fn boxgame_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let o = ghostbox(
        &["boxgame", "--m", "1", "--b", "2", "--vertex-count", "400", "--e", "8", "--max-box", "200", "--box-size", "20", "--seed", "3"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = ghostbox(&["verify", "boxgame.json"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    // scripted replay of the same game reproduces it
    let o = ghostbox(
        &[
            "boxgame", "--m", "1", "--b", "2", "--vertex-count", "400", "--e", "8", "--max-box", "200", "--box-size", "20",
            "--seed", "3", "--ghost", "script", "--breaker", "script", "--script", "boxgame.json", "--out", "replay.json",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let a = read_json(&dir.path().join("boxgame.json"));
    let b = read_json(&dir.path().join("replay.json"));
    assert_eq!(a["events"], b["events"]);

    let o = ghostbox(&["boxgame", "--b", "1", "--vertex-count", "10", "--e", "2", "--max-box", "5", "--ghost", "script"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}
