use std::path::Path;

use clap::Parser;
use formspace_cli::args::Cli;
use formspace_cli::service::{appended_count, Service};
use serde_json::{json, Value};

fn cli(args: &[&str]) {
    formspace_cli::run(Cli::try_parse_from(std::iter::once("formspace").chain(args.iter().copied())).unwrap()).unwrap();
}

/// A small run with every stage; returns the directory and the id of an accepted form.
fn full_run(dir: &Path, count: &str, grid: &str) -> u64 {
    let run = dir.to_str().unwrap();
    cli(&["generate", "--seed", "11", "--count", count, "--deterministic", "--out", run]);
    cli(&["train-som", "--run", run, "--grid", grid, "--epochs", "5", "--deterministic"]);
    cli(&["train-umap", "--run", run, "--k", "5", "--epochs", "50", "--deterministic"]);
    let svc = Service::load(dir, 4).unwrap();
    let map = svc.handle("GET", "/formmap", b"").value();
    map["cells"].as_array().unwrap().iter().find_map(|c| c["representative"].as_u64()).unwrap()
}

fn wait_for(svc: &Service, job: u64) -> Value {
    svc.run_pending();
    let r = svc.handle("GET", &format!("/jobs/{job}"), b"");
    assert_eq!(r.status, 200);
    r.value()["job"].clone()
}

#[test]
fn endpoints_answer_and_reject_bad_requests() {
    let dir = tempfile::tempdir().unwrap();
    let id = full_run(dir.path(), "1500", "6x6");
    let svc = Service::load(dir.path(), 1).unwrap();

    let map = svc.handle("GET", "/formmap", b"");
    assert_eq!(map.status, 200);
    let map = map.value();
    assert_eq!(map["cells"].as_array().unwrap().len(), 36);

    let form = svc.handle("GET", &format!("/forms/{id}"), b"").value();
    assert_eq!(form["nodes"].as_array().unwrap().len(), 420);
    let states: Vec<&str> = form["members"].as_array().unwrap().iter().map(|m| m["state"].as_str().unwrap()).collect();
    assert_eq!(states.len(), 800);

    let family = svc.handle("GET", "/cells/0/family", b"");
    assert_eq!(family.status, 200);

    assert_eq!(svc.handle("GET", "/forms/999999999", b"").status, 404);
    assert_eq!(svc.handle("GET", "/forms/abc", b"").status, 400);
    assert_eq!(svc.handle("GET", "/cells/100000/family", b"").status, 404);
    assert_eq!(svc.handle("GET", "/nowhere", b"").status, 404);
    assert_eq!(svc.handle("DELETE", "/formmap", b"").status, 405);
    assert_eq!(svc.handle("GET", "/embedding?color=ZZ", b"").status, 400);

    for bad in [&b"{"[..], br#"{"id": 1}"#, br#"{"id": 1, "n": 0}"#, br#"{"id": 1, "n": 1, "delta": 101}"#, br#"{"id": 1, "n": 1, "x": 2}"#]
    {
        assert_eq!(svc.handle("POST", "/resample", bad).status, 400, "{}", String::from_utf8_lossy(bad));
    }
    let unknown = json!({ "id": 999999999u64, "n": 1 }).to_string();
    assert_eq!(svc.handle("POST", "/resample", unknown.as_bytes()).status, 404);

    let body = json!({ "id": id, "n": 1 }).to_string();
    assert_eq!(svc.handle("POST", "/resample", body.as_bytes()).status, 202);
    let full = svc.handle("POST", "/resample", body.as_bytes());
    assert_eq!(full.status, 503);
    assert_eq!(full.retry_after, Some(1));
    svc.run_pending();
    assert_eq!(svc.handle("POST", "/resample", body.as_bytes()).status, 202);
}

#[test]
fn embedding_coloring_keeps_positions() {
    let dir = tempfile::tempdir().unwrap();
    full_run(dir.path(), "1500", "4x4");
    let svc = Service::load(dir.path(), 4).unwrap();
    let plain = svc.handle("GET", "/embedding", b"").value();
    let colored = svc.handle("GET", "/embedding?color=G_E", b"").value();
    assert_eq!(colored["color"], "G_E");
    let (a, b) = (plain["points"].as_array().unwrap(), colored["points"].as_array().unwrap());
    assert!(!a.is_empty());
    assert_eq!(a.len(), b.len());
    for (p, q) in a.iter().zip(b) {
        assert_eq!((&p["id"], &p["x"], &p["y"]), (&q["id"], &q["x"], &q["y"]));
        assert!(p["value"].is_null());
        assert!(q["value"].as_u64().unwrap() <= 100);
    }
}

#[test]
fn zero_delta_resample_reproduces_the_form_and_appends() {
    let dir = tempfile::tempdir().unwrap();
    let id = full_run(dir.path(), "1500", "4x4");
    let svc = Service::load(dir.path(), 4).unwrap();
    let before = svc.handle("GET", &format!("/forms/{id}"), b"").value();
    let body = json!({ "id": id, "n": 3, "delta": 0 }).to_string();
    let job = svc.handle("POST", "/resample", body.as_bytes()).value()["job"].as_u64().unwrap();
    let job = wait_for(&svc, job);
    assert_eq!(job["status"], "done");
    let forms = job["forms"].as_array().unwrap();
    assert_eq!(forms.len(), 3);
    let original = svc.handle("GET", "/embedding", b"").value()["points"]
        .as_array()
        .unwrap()
        .iter()
        .find(|p| p["id"] == id)
        .cloned();
    for f in forms {
        assert_eq!(f["accepted"], true);
        let new = svc.handle("GET", &format!("/forms/{}", f["id"]), b"").value();
        assert_ne!(new["id"], before["id"]);
        let strip = |v: &Value| {
            let mut o = v.as_object().unwrap().clone();
            o.remove("seed");
            o
        };
        assert_eq!(strip(&new["params"]), strip(&before["params"]));
        assert_eq!(new["nodes"], before["nodes"]);
        assert!(f["node"].is_u64());
        if let Some(p) = &original {
            let pos = f["position"].as_array().unwrap();
            assert!((pos[0].as_f64().unwrap() - p["x"].as_f64().unwrap()).abs() < 1e-3);
            assert!((pos[1].as_f64().unwrap() - p["y"].as_f64().unwrap()).abs() < 1e-3);
        }
    }
    assert_eq!(appended_count(dir.path()), 3);

    // a reloaded service sees the appended forms and keeps counting ids upward
    let again = Service::load(dir.path(), 4).unwrap();
    let last = forms.last().unwrap()["id"].as_u64().unwrap();
    assert_eq!(again.handle("GET", &format!("/forms/{last}"), b"").status, 200);
    let job = again.handle("POST", "/resample", body.as_bytes()).value()["job"].as_u64().unwrap();
    let job = wait_for(&again, job);
    assert!(job["forms"][0]["id"].as_u64().unwrap() > last);
    assert_eq!(appended_count(dir.path()), 6);
}

#[test]
fn single_record_run_occupies_one_cell() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().to_str().unwrap();
    cli(&["generate", "--seed", "11", "--count", "200", "--accepted", "1", "--deterministic", "--out", run]);
    cli(&["train-som", "--run", run, "--grid", "3x3", "--epochs", "2", "--deterministic"]);
    let svc = Service::load(dir.path(), 4).unwrap();
    let map = svc.handle("GET", "/formmap", b"").value();
    assert_eq!(map["occupied"], 1);
    assert_eq!(map["gaps"], 8);
    assert_eq!(svc.handle("GET", "/embedding", b"").status, 404);
}
