use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use tempfile::TempDir;

const GT: &str = "[classes]\nRun\nJump\n[videos]\nv1,10\nv2,12.5\n[annotations]\nv1,Run,3,7\nv2,Jump,1,4.5\nv2,Run,6,11\n";
const DET: &str =
    "[detections]\nv1,Run,4,8,0.9\nv2,Jump,0.5,4,0.6\nv2,Run,5,9,0.8\nv2,Jump,9,12,0.3\n";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_oad-ia"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_stdin(args: &[&str], stdin: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let f = Self {
            dir: tempfile::tempdir().unwrap(),
        };
        f.put("gt.txt", GT);
        f.put("det.txt", DET);
        f
    }

    fn put(&self, name: &str, text: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        fs::write(&p, text).unwrap();
        p
    }

    fn path(&self, name: &str) -> String {
        self.dir.path().join(name).to_str().unwrap().to_string()
    }
}

fn tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().to_str().unwrap().to_string();
                out.push((rel, fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn worked_example_summary() {
    let f = Fixture::new();
    f.put(
        "one.txt",
        "[classes]\nRun\n[videos]\nv1,10\n[annotations]\nv1,Run,3,7\n",
    );
    f.put("one_det.txt", "v1,Run,4,8,0.9\n");
    let o = run(&[
        "evaluate",
        "--gt",
        &f.path("one.txt"),
        "--det",
        &f.path("one_det.txt"),
        "--delta-t",
        "1",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        stdout(&o),
        "video_id,avg_ia,avg_weighted_ia\nv1,0.856825,0.827500\nmaIA,0.856825,0.827500\n"
    );
}

#[test]
fn evaluate_writes_series_and_summary() {
    let f = Fixture::new();
    let out = f.path("out");
    let o = run(&[
        "evaluate",
        "--gt",
        &f.path("gt.txt"),
        "--det",
        &f.path("det.txt"),
        "--out",
        &out,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("weighted_maIA,"));
    let v1 = fs::read_to_string(f.dir.path().join("out/series/v1.csv")).unwrap();
    assert!(v1.starts_with("t,ia,weighted_ia\n0.500000,"));
    assert_eq!(v1.lines().count(), 21);
    let summary = fs::read_to_string(f.dir.path().join("out/summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 4);
    assert!(summary.lines().last().unwrap().starts_with("maIA,"));

    let o = run(&[
        "evaluate",
        "--gt",
        &f.path("gt.txt"),
        "--det",
        &f.path("det.txt"),
        "--out",
        &out,
        "--weighted",
        "false",
    ]);
    assert!(stdout(&o).starts_with("maIA,"));
}

#[test]
fn perfect_model_scores_one() {
    let f = Fixture::new();
    let o = run(&[
        "baseline",
        "--gt",
        &f.path("gt.txt"),
        "--baseline",
        "pm",
        "--out",
        &f.path("pm.txt"),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = run(&[
        "evaluate",
        "--gt",
        &f.path("gt.txt"),
        "--det",
        &f.path("pm.txt"),
    ]);
    assert!(stdout(&o).ends_with("maIA,1.000000,1.000000\n"));
}

#[test]
fn all_background_file_is_empty() {
    let f = Fixture::new();
    let o = run(&[
        "baseline",
        "--gt",
        &f.path("gt.txt"),
        "--baseline",
        "all-bg",
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "[detections]\n");
}

#[test]
fn random_baseline_is_reproducible() {
    let f = Fixture::new();
    let args = [
        "baseline",
        "--gt",
        &f.path("gt.txt"),
        "--baseline",
        "random",
        "--seed",
        "7",
        "--rate",
        "20",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).lines().count() > 1);
    let c = run(&[
        "baseline",
        "--gt",
        &f.path("gt.txt"),
        "--baseline",
        "random",
        "--seed",
        "8",
        "--rate",
        "20",
    ]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn missing_ground_truth_exits_2() {
    let f = Fixture::new();
    let o = run(&[
        "evaluate",
        "--gt",
        &f.path("nope.txt"),
        "--det",
        &f.path("det.txt"),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("ground truth not found"));
}

#[test]
fn malformed_detections_exit_2_with_line() {
    let f = Fixture::new();
    f.put("bad.txt", "[detections]\nv1,Run,4,8,0.9\nv1,Run,4,8,1.7\n");
    let o = run(&[
        "evaluate",
        "--gt",
        &f.path("gt.txt"),
        "--det",
        &f.path("bad.txt"),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn unknown_baseline_exits_2() {
    let f = Fixture::new();
    let o = run(&[
        "baseline",
        "--gt",
        &f.path("gt.txt"),
        "--baseline",
        "oracle",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn empty_stream_on_background_video() {
    let f = Fixture::new();
    f.put("bg.txt", "[videos]\nquiet,10\n");
    let o = run_stdin(&["stream", "--gt", &f.path("bg.txt"), "--delta-t", "1"], "");
    assert!(o.status.success(), "{}", stderr(&o));
    let lines: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(lines.len(), 10);
    for (k, l) in lines.iter().enumerate() {
        assert_eq!(l, &format!("quiet,{}.000000,1.000000,1.000000", k + 1));
    }
}

#[test]
fn stream_protocol_errors_exit_3() {
    let f = Fixture::new();
    let gt = f.path("gt.txt");
    let o = run_stdin(
        &["stream", "--gt", &gt],
        "v1,Run,4,8,0.9,9\nv1,Run,1,2,0.9,8.5\n",
    );
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("order"));
    let o = run_stdin(&["stream", "--gt", &gt], "v1,Run,4,8,0.9,5\n");
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("causality"));
    // Rewriting a slot after it was reported.
    let o = run_stdin(
        &["stream", "--gt", &gt, "--latency", "0", "--delta-t", "1"],
        "v1,Run,8,9,0.9,9\nv1,Run,1,9,0.9,9\n",
    );
    assert_eq!(o.status.code(), Some(3));
    // A malformed line is an input error, not a protocol error.
    let o = run_stdin(&["stream", "--gt", &gt], "v1,Run,4\n");
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn stream_replay_matches_evaluate() {
    let f = Fixture::new();
    let gt = f.path("gt.txt");
    let o = run(&[
        "baseline",
        "--gt",
        &gt,
        "--baseline",
        "random",
        "--seed",
        "3",
        "--rate",
        "30",
        "--out",
        &f.path("rand.txt"),
    ]);
    assert!(o.status.success());
    let o = run(&[
        "baseline",
        "--gt",
        &gt,
        "--baseline",
        "random",
        "--seed",
        "3",
        "--rate",
        "30",
        "--as-events",
        "--out",
        &f.path("rand.events"),
    ]);
    assert!(o.status.success());

    let o = run(&[
        "evaluate",
        "--gt",
        &gt,
        "--det",
        &f.path("rand.txt"),
        "--out",
        &f.path("batch"),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = run(&[
        "stream",
        "--gt",
        &gt,
        "--events",
        &f.path("rand.events"),
        "--out",
        &f.path("live"),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        tree(&f.dir.path().join("batch")),
        tree(&f.dir.path().join("live"))
    );

    // Every printed tick matches the batch row at the same instant.
    let printed = stdout(&o);
    for video in ["v1", "v2"] {
        let batch =
            fs::read_to_string(f.dir.path().join(format!("batch/series/{video}.csv"))).unwrap();
        let live: Vec<&str> = printed
            .lines()
            .filter_map(|l| l.strip_prefix(&format!("{video},")))
            .collect();
        assert_eq!(live, batch.lines().skip(1).collect::<Vec<_>>());
    }
}

#[test]
fn summarize_keeps_command_line_order() {
    let f = Fixture::new();
    let det = f.path("det.txt");
    let o = run(&[
        "summarize",
        "--gt",
        &f.path("gt.txt"),
        "--baseline",
        "pm",
        "--det",
        &det,
        "--baseline",
        "all-bg",
        "--out",
        &f.path("cmp"),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "detector,mAP,cAP,maIA,weighted_maIA");
    assert_eq!(lines[1], "pm,1.000000,1.000000,1.000000,1.000000");
    assert!(lines[2].starts_with(&format!("{det},")));
    assert!(lines[3].starts_with("all-bg,0.000000,0.000000,"));
    assert_eq!(
        fs::read_to_string(f.dir.path().join("cmp/comparison.csv")).unwrap(),
        text
    );

    let o = run(&["summarize", "--gt", &f.path("gt.txt")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn outputs_do_not_depend_on_jobs() {
    let f = Fixture::new();
    let gt = f.path("gt.txt");
    let det = f.path("det.txt");
    let mut trees = Vec::new();
    for jobs in ["1", "4"] {
        let out = f.path(&format!("j{jobs}"));
        let o = run(&[
            "evaluate", "--gt", &gt, "--det", &det, "--out", &out, "--jobs", jobs,
        ]);
        assert!(o.status.success());
        let o = run(&[
            "summarize",
            "--gt",
            &gt,
            "--det",
            &det,
            "--baseline",
            "pm",
            "--out",
            &out,
            "--jobs",
            jobs,
        ]);
        assert!(o.status.success());
        trees.push(tree(Path::new(&out)));
    }
    assert_eq!(trees[0], trees[1]);
}
