use std::net::{TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Output, Stdio};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use serde_json::{json, Value};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_litmini"));
    cmd.env_remove("RUST_LOG").env_remove("LITMINI_CONFIG").env_remove("LITMINI_LISTEN");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn json_of(out: &Output) -> Value {
    assert_eq!(code(out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn fixture_docs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../service/tests/fixtures/synthetic")
}

struct Built {
    dir: tempfile::TempDir,
}

impl Built {
    fn corpus(&self) -> PathBuf {
        self.dir.path().join("corpus")
    }
    fn store(&self, model: &str) -> PathBuf {
        self.dir.path().join(format!("{model}.mlmv"))
    }
}

/// Corpus plus PSTM_1 and PSTM_2 stores built through the CLI once per run.
fn built() -> &'static Built {
    static BUILT: OnceLock<Built> = OnceLock::new();
    BUILT.get_or_init(|| {
        let b = Built { dir: tempfile::tempdir().unwrap() };
        let report = json_of(&run(&["--json", "--quiet", "ingest", "--in", s(&fixture_docs()), "--out", s(&b.corpus())]));
        assert_eq!(report["sentences"], 520);
        assert_eq!(report["documents"], 20);
        for model in ["PSTM_1", "PSTM_2"] {
            let store = b.store(model);
            let r = json_of(&run(&[
                "--json", "--quiet", "index", "--corpus", s(&b.corpus()), "--model", model, "--out", s(&store),
            ]));
            assert_eq!(r["count"], 500);
            assert_eq!(r["normalized"], true);
        }
        b
    })
}

fn search_args<'a>(b: &'a Built, q: &'a str) -> Vec<String> {
    let mut v: Vec<String> = ["--json", "--quiet", "search", "--corpus"].map(String::from).to_vec();
    v.push(s(&b.corpus()).into());
    v.push("--stores".into());
    v.push(s(&b.store("PSTM_1")).into());
    v.push(s(&b.store("PSTM_2")).into());
    v.extend(["--q".into(), q.into()]);
    v
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
    assert_eq!(code(&run(&["search", "--help"])), 0);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&run(&[])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["search", "--q", "flood"])), 1);
    assert_eq!(code(&run(&["cluster", "--store", "x", "--corpus", "y", "--linkage", "ward"])), 1);
    assert_eq!(code(&run(&["--threads", "0", "ingest", "--in", "a", "--out", "b"])), 1);
}

#[test]
fn missing_data_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["--quiet", "index", "--corpus", s(&dir.path().join("nope")), "--model", "PSTM_1", "--out", "x"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "));
}

#[test]
fn unknown_model_exits_one() {
    let b = built();
    let out = run(&["--quiet", "index", "--corpus", s(&b.corpus()), "--model", "PSTM_9", "--out", "x"]);
    assert_eq!(code(&out), 1);
    let mut args = search_args(b, "flood warning");
    args.extend(["--models".into(), "PSTM_9".into()]);
    assert_eq!(code(&bin().args(&args).output().unwrap()), 1);
}

#[test]
fn unreachable_server_exits_three() {
    let port = free_port();
    let url = format!("http://127.0.0.1:{port}");
    assert_eq!(code(&run(&["--quiet", "search", "--q", "flood", "--server", &url])), 3);
    assert_eq!(code(&run(&["--quiet", "sentiment", "--task", "emotion", "--server", &url])), 3);
}

#[test]
fn unreachable_provider_exits_three() {
    let b = built();
    let url = format!("http://127.0.0.1:{}/classify", free_port());
    let out = run(&[
        "--quiet", "sentiment", "--corpus", s(&b.corpus()), "--task", "emotion", "--keywords", "karst", "--provider", &url,
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn search_then_summarize() {
    let b = built();
    let mut args = search_args(b, "Karst aquifer tracer tests reveal rapid conduit flow");
    args.extend(["--k".into(), "5".into()]);
    let out = bin().args(&args).output().unwrap();
    let env = json_of(&out);
    let hits = env["hits"].as_array().unwrap();
    assert_eq!(hits.len(), 5);
    assert!(hits.iter().all(|h| h["ensemble_score"].as_f64().unwrap() > 0.7));
    let shares = env["influence"]["shares"].as_object().unwrap();
    let total: f64 = shares.values().map(|v| v.as_f64().unwrap()).sum();
    assert!((total - 100.0).abs() < 1e-9);
    let counted: u64 = env["buckets"].as_array().unwrap().iter().map(|b| b["count"].as_u64().unwrap()).sum();
    assert_eq!(counted, 5);

    let saved = b.dir.path().join("search.json");
    std::fs::write(&saved, &out.stdout).unwrap();
    let summary = json_of(&run(&["--json", "--quiet", "summarize", "--from-search", s(&saved), "--template", "challenge"]));
    let text = summary["summary"].as_str().unwrap();
    assert!(text.starts_with("Please summarize the challenge."));
    assert_eq!(text.matches("Karst aquifer").count(), 5);

    let mut child = bin()
        .args(["--json", "--quiet", "summarize", "--from-search", "-", "--corpus", s(&b.corpus())])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    std::io::Write::write_all(&mut child.stdin.take().unwrap(), &out.stdout).unwrap();
    let summary = json_of(&child.wait_with_output().unwrap());
    assert_eq!(summary["provenance"]["sentence_count"], 5);
}

#[test]
fn human_search_output() {
    let b = built();
    let q = "Effective flood warning systems combine radar nowcasts and hydrologic models";
    let out = bin().args(&search_args(b, q)[1..]).output().unwrap();
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("Effective flood warning systems"));

    let out = bin().args(&search_args(b, "zebra")[1..]).output().unwrap();
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("no hits"));
}

#[test]
fn cluster_top_and_scatter() {
    let b = built();
    let scatter = b.dir.path().join("scatter.tsv");
    let r = json_of(&run(&[
        "--json", "--quiet", "cluster", "--store", s(&b.store("PSTM_1")), "--corpus", s(&b.corpus()), "--top", "11",
        "--scatter", s(&scatter), "--label",
    ]));
    assert_eq!(r["total_points"], 500);
    let clusters = r["clusters"].as_array().unwrap();
    assert_eq!(clusters.len(), 11);
    assert_eq!(r["labels"].as_object().unwrap().len(), 11);
    let rows = std::fs::read_to_string(&scatter).unwrap().lines().count();
    let sizes: u64 = clusters.iter().map(|c| c["size"].as_u64().unwrap()).sum();
    assert_eq!(rows as u64, sizes + 1);

    let r = json_of(&run(&[
        "--json", "--quiet", "cluster", "--store", s(&b.store("PSTM_1")), "--corpus", s(&b.corpus()), "--per-year",
    ]));
    let entries = r["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 10);
    assert!(entries.iter().all(|e| e["clusters"].as_array().unwrap().len() == 2));
}

#[test]
fn sentiment_emotion_and_polarity_clusters() {
    let b = built();
    let r = json_of(&run(&["--json", "--quiet", "sentiment", "--corpus", s(&b.corpus()), "--task", "emotion"]));
    assert_eq!(r["histogram"]["counts"], json!({"approval": 160, "disappointment": 120}));

    let r = json_of(&run(&[
        "--json", "--quiet", "sentiment", "--corpus", s(&b.corpus()), "--task", "polarity", "--cluster", "--model",
        "PSTM_4",
    ]));
    let sizes: Vec<u64> =
        r["clusters"]["negative"].as_array().unwrap().iter().map(|c| c["size"].as_u64().unwrap()).collect();
    assert_eq!(sizes, vec![40, 40]);
}

fn free_port() -> u16 {
    TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port()
}

struct Server(Child);

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.0.kill();
        let _ = self.0.wait();
    }
}

fn serve(b: &Built) -> (Server, String) {
    let config = b.dir.path().join("service.json");
    let body = json!({
        "corpus_dir": "corpus",
        "stores": {"PSTM_1": "PSTM_1.mlmv", "PSTM_2": "PSTM_2.mlmv"},
    });
    std::fs::write(&config, body.to_string()).unwrap();
    let port = free_port();
    let addr = format!("127.0.0.1:{port}");
    let child = bin()
        .args(["--quiet", "serve", "--config", s(&config), "--listen", &addr])
        .stdout(Stdio::null())
        .spawn()
        .unwrap();
    let server = Server(child);
    let start = Instant::now();
    while TcpStream::connect(&addr).is_err() {
        assert!(start.elapsed() < Duration::from_secs(30), "service did not start");
        std::thread::sleep(Duration::from_millis(50));
    }
    (server, format!("http://{addr}"))
}

#[test]
fn server_mode_matches_local() {
    let b = built();
    let (_server, url) = serve(b);
    let q = "Unfortunately snowpack volume";
    let local = json_of(&bin().args(&search_args(b, q)).output().unwrap());
    let remote = json_of(&run(&["--json", "--quiet", "search", "--q", q, "--server", &url]));
    assert_eq!(local["hits"], remote["hits"]);
    assert_eq!(local["buckets"], remote["buckets"]);

    let local = json_of(&run(&[
        "--json", "--quiet", "cluster", "--store", s(&b.store("PSTM_2")), "--corpus", s(&b.corpus()), "--top", "11",
    ]));
    let remote = json_of(&run(&["--json", "--quiet", "cluster", "--model", "PSTM_2", "--top", "11", "--server", &url]));
    assert_eq!(local["clusters"], remote["clusters"]);

    let remote = json_of(&run(&["--json", "--quiet", "sentiment", "--task", "polarity", "--server", &url]));
    assert_eq!(remote["histogram"]["counts"], json!({"negative": 80, "neutral": 380, "positive": 40}));

    let out = run(&["--quiet", "cluster", "--model", "PSTM_9", "--server", &url]);
    assert_eq!(code(&out), 1);
    let out = run(&["--quiet", "cluster", "--model", "PSTM_1", "--label", "--server", &url]);
    assert_eq!(code(&out), 1);
}
