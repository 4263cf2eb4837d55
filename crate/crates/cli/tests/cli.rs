use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;

use mxparse_cli::ModelArchive;
use tempfile::TempDir;

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn mxparse() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_mxparse"));
    for var in [
        "MXPARSE_CUTOFF",
        "MXPARSE_ITERS",
        "MXPARSE_TOL",
        "MXPARSE_KBEST",
        "MXPARSE_BEAM",
        "MXPARSE_MASS",
        "MXPARSE_JOBS",
        "MXPARSE_MODEL",
        "MXPARSE_MAX_N",
    ] {
        c.env_remove(var);
    }
    c
}

fn run(args: &[&str]) -> Output {
    mxparse().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Small corpus, a model trained on it and its sentences as parser input.
fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let f = Fixture {
            dir: tempfile::tempdir().unwrap(),
        };
        let corpus = f.path("train.mrg");
        let o = run(&["generate-corpus", "-o", s(&corpus), "--seed", "11", "--count", "40", "--max-len", "12"]);
        assert!(o.status.success(), "{}", stderr(&o));
        let o = run(&["train", s(&corpus), "-o", s(&f.path("model.arc")), "--cutoff", "1", "--iters", "30"]);
        assert!(o.status.success(), "{}", stderr(&o));
        let text = std::fs::read_to_string(&corpus).unwrap();
        let (corpus, _) = mxparse::Corpus::read_normalized(&text, mxparse::treebank::HeadRules::standard()).unwrap();
        let trees: Vec<_> = corpus.trees().cloned().collect();
        let lines: Vec<String> = trees.iter().take(12).map(|t| t.words().join(" ")).collect();
        std::fs::write(f.path("input.txt"), lines.join("\n") + "\n").unwrap();
        let gold: Vec<String> = trees.iter().take(12).map(mxparse::treebank::write_bracketed).collect();
        std::fs::write(f.path("gold.mrg"), gold.join("\n") + "\n").unwrap();
        f
    })
}

#[test]
fn train_prints_table_and_archive_loads() {
    let f = fixture();
    let out = f.dir.path().join("t1.arc");
    let o = run(&["train", s(&f.path("train.mrg")), "-o", s(&out), "--cutoff", "1", "--iters", "30"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("corpus: 40 trees"), "{text}");
    assert!(text.contains("procedure\tevents\tfeatures\tC\titerations\tgap\tconverged"));
    for p in ["tag", "chunk", "build", "check"] {
        assert!(text.lines().any(|l| l.starts_with(&format!("{p}\t"))), "{text}");
    }
    let a = ModelArchive::load(&out).unwrap();
    assert_eq!(a.meta.sentences, 40);
    assert_eq!(a.meta.cutoff, 1);
    assert_eq!(a.meta.max_iters, 30);
    assert_eq!(a.meta.corpus_sha256.len(), 64);
}

#[test]
fn retraining_is_byte_identical() {
    let f = fixture();
    let out = f.dir.path().join("t2.arc");
    let o = run(&["train", s(&f.path("train.mrg")), "-o", s(&out), "--cutoff", "1", "--iters", "30"]);
    assert!(o.status.success());
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(f.path("model.arc")).unwrap());
}

#[test]
fn archive_round_trip_is_byte_identical() {
    let f = fixture();
    let bytes = std::fs::read(f.path("model.arc")).unwrap();
    let a = ModelArchive::from_bytes(&bytes).unwrap();
    assert_eq!(a.to_bytes(), bytes);
    let b = ModelArchive::from_bytes(&a.to_bytes()).unwrap();
    assert_eq!(a, b);
    let copy = f.dir.path().join("copy.arc");
    b.save(&copy).unwrap();
    assert_eq!(std::fs::read(&copy).unwrap(), bytes);
}

#[test]
fn archive_version_and_truncation_are_detected() {
    let f = fixture();
    let bytes = std::fs::read(f.path("model.arc")).unwrap();
    let text = String::from_utf8(bytes.clone()).unwrap();
    let bumped = text.replacen("mxparse-archive 1\n", "mxparse-archive 2\n", 1);
    let err = ModelArchive::from_bytes(bumped.as_bytes()).unwrap_err().to_string();
    assert!(err.contains("version 2"), "{err}");
    let err = ModelArchive::from_bytes(&bytes[..bytes.len() - 10]).unwrap_err().to_string();
    assert!(err.contains("truncated"), "{err}");
    let err = ModelArchive::from_bytes(b"hello\n").unwrap_err().to_string();
    assert!(err.contains("not a model archive"), "{err}");

    let bad = f.dir.path().join("bad.arc");
    std::fs::write(&bad, bumped).unwrap();
    let o = run(&["parse", "-m", s(&bad), s(&f.path("input.txt"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn huge_cutoff_is_a_degenerate_model_error() {
    let f = fixture();
    let out = f.dir.path().join("never.arc");
    let o = run(&["train", s(&f.path("train.mrg")), "-o", s(&out), "--cutoff", "1000000000"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("degenerate model"), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn unreadable_corpus_is_a_data_error() {
    let o = run(&["train", "/nonexistent/corpus.mrg", "-o", "/tmp/never.arc"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/nonexistent/corpus.mrg"));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["parse"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    let f = fixture();
    let o = run(&["parse", "-m", s(&f.path("model.arc")), "--beam", "0", s(&f.path("input.txt"))]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["parse", "-m", s(&f.path("model.arc")), "--mass", "1.5", s(&f.path("input.txt"))]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["parse", "-m", s(&f.path("model.arc")), "--jobs", "0", s(&f.path("input.txt"))]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

fn blocks(text: &str) -> Vec<Vec<&str>> {
    text.split("\n\n")
        .filter(|b| !b.trim().is_empty())
        .map(|b| b.lines().collect())
        .collect()
}

#[test]
fn parse_output_has_one_block_per_sentence() {
    let f = fixture();
    let o = run(&["parse", "-m", s(&f.path("model.arc")), "--kbest", "3", s(&f.path("input.txt"))]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let bs = blocks(&text);
    assert_eq!(bs.len(), 12);
    for (i, b) in bs.iter().enumerate() {
        assert_eq!(b[0], format!("# sentence {}", i + 1));
        assert!((2..=4).contains(&b.len()), "{b:?}");
        let scores: Vec<f64> = b[1..]
            .iter()
            .map(|l| l.split_once('\t').unwrap().0.parse().unwrap())
            .collect();
        assert!(scores.windows(2).all(|w| w[0] >= w[1]));
        assert!(scores.iter().all(|&x| x <= 0.0));
    }
}

#[test]
fn empty_lines_are_skipped_with_a_warning() {
    let f = fixture();
    let input = f.dir.path().join("gaps.txt");
    std::fs::write(&input, "the dog saw the cat\n\n   \nthe cat slept\n").unwrap();
    let o = run(&["parse", "-m", s(&f.path("model.arc")), s(&input)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(blocks(&stdout(&o)).len(), 2);
    let err = stderr(&o);
    assert!(err.contains("line 2 is empty"), "{err}");
    assert!(err.contains("line 3 is empty"), "{err}");
}

#[test]
fn parse_reads_standard_input() {
    let f = fixture();
    let input = std::fs::read(f.path("input.txt")).unwrap();
    let mut child = mxparse()
        .args(["parse", "-m", s(&f.path("model.arc")), "-"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    use std::io::Write;
    child.stdin.take().unwrap().write_all(&input).unwrap();
    let piped = child.wait_with_output().unwrap();
    let direct = run(&["parse", "-m", s(&f.path("model.arc")), s(&f.path("input.txt"))]);
    assert_eq!(piped.stdout, direct.stdout);
}

#[test]
fn jobs_keep_input_order_and_output() {
    let f = fixture();
    let one = run(&["parse", "-m", s(&f.path("model.arc")), "--jobs", "1", s(&f.path("input.txt"))]);
    let four = run(&["parse", "-m", s(&f.path("model.arc")), "--jobs", "4", s(&f.path("input.txt"))]);
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn environment_overrides_defaults() {
    let f = fixture();
    let o = mxparse()
        .args(["parse", s(&f.path("input.txt"))])
        .env("MXPARSE_MODEL", f.path("model.arc"))
        .env("MXPARSE_KBEST", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(blocks(&stdout(&o)).iter().all(|b| b.len() == 2));

    let flag = mxparse()
        .args(["parse", "--kbest", "2", s(&f.path("input.txt"))])
        .env("MXPARSE_MODEL", f.path("model.arc"))
        .env("MXPARSE_KBEST", "1")
        .output()
        .unwrap();
    assert!(blocks(&stdout(&flag)).iter().any(|b| b.len() == 3));

    let bad = mxparse()
        .args(["parse", s(&f.path("input.txt"))])
        .env("MXPARSE_MODEL", f.path("model.arc"))
        .env("MXPARSE_BEAM", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn defaults_are_twenty_twenty_point_nine_five() {
    let f = fixture();
    let implicit = run(&["parse", "-m", s(&f.path("model.arc")), s(&f.path("input.txt"))]);
    let explicit = run(&[
        "parse",
        "-m",
        s(&f.path("model.arc")),
        "--kbest",
        "20",
        "--beam",
        "20",
        "--mass",
        "0.95",
        s(&f.path("input.txt")),
    ]);
    assert_eq!(implicit.stdout, explicit.stdout);
}

#[test]
fn starved_search_reports_no_parse_with_exit_three() {
    let f = fixture();
    let input = f.dir.path().join("odd.txt");
    std::fs::write(&input, ", , ,\nof of of of\n").unwrap();
    let o = run(&[
        "parse",
        "-m",
        s(&f.path("model.arc")),
        "--beam",
        "1",
        "--kbest",
        "1",
        "--mass",
        "0.01",
        s(&input),
    ]);
    assert_eq!(o.status.code(), Some(3));
    let text = stdout(&o);
    let bs = blocks(&text);
    assert_eq!(bs.len(), 2);
    assert!(bs.iter().any(|b| b[1] == "NO-PARSE"), "{text}");
}

#[test]
fn evaluate_gold_against_itself_is_perfect() {
    let f = fixture();
    let gold = f.path("gold.mrg");
    let o = run(&["evaluate", s(&gold), s(&gold)]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for key in ["precision", "recall", "f-measure", "exact match"] {
        let line = text.lines().find(|l| l.starts_with(key)).unwrap();
        assert!(line.ends_with("1.000000"), "{line}");
    }
    let rows = run(&["evaluate", s(&gold), s(&gold), "--per-sentence"]);
    let rows = stdout(&rows);
    assert_eq!(rows.lines().count(), 13);
    assert!(rows.lines().skip(1).all(|l| l.ends_with("\t1")));
}

#[test]
fn evaluate_rejects_mismatched_sentence_counts() {
    let f = fixture();
    let short = f.dir.path().join("short.mrg");
    let gold = std::fs::read_to_string(f.path("gold.mrg")).unwrap();
    std::fs::write(&short, gold.lines().take(5).collect::<Vec<_>>().join("\n")).unwrap();
    let o = run(&["evaluate", s(&f.path("gold.mrg")), s(&short)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("12 sentences"), "{}", stderr(&o));
}

#[test]
fn evaluate_scores_parse_output_directly() {
    let f = fixture();
    let parsed = f.dir.path().join("parsed.txt");
    let o = run(&["parse", "-m", s(&f.path("model.arc")), s(&f.path("input.txt"))]);
    std::fs::write(&parsed, &o.stdout).unwrap();
    let o = run(&["evaluate", s(&f.path("gold.mrg")), s(&parsed)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let first: Vec<&str> = text.lines().next().unwrap().split_whitespace().collect();
    assert_eq!(first, ["sentences", "12"]);
}

#[test]
fn oracle_curve_rows_run_from_one_to_max_n() {
    let f = fixture();
    let o = run(&["oracle-curve", "-m", s(&f.path("model.arc")), s(&f.path("gold.mrg")), "--max-n", "6"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n\tprecision\trecall\tf-measure\texact"));
    let f_values: Vec<f64> = lines
        .enumerate()
        .map(|(i, l)| {
            let cols: Vec<&str> = l.split('\t').collect();
            assert_eq!(cols[0], (i + 1).to_string());
            cols[3].parse().unwrap()
        })
        .collect();
    assert_eq!(f_values.len(), 6);
    assert!(f_values.windows(2).all(|w| w[1] >= w[0]));
    assert_eq!(run(&["oracle-curve", "-m", s(&f.path("model.arc")), s(&f.path("gold.mrg")), "--max-n", "0"]).status.code(), Some(1));
}

#[test]
fn generate_corpus_is_deterministic() {
    let a = run(&["generate-corpus", "--seed", "3", "--count", "5", "--max-len", "10"]);
    let b = run(&["generate-corpus", "--seed", "3", "--count", "5", "--max-len", "10"]);
    let c = run(&["generate-corpus", "--seed", "4", "--count", "5", "--max-len", "10"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let trees = mxparse::treebank::read_bracketed(&stdout(&a)).unwrap();
    assert_eq!(trees.len(), 5);
    assert_eq!(run(&["generate-corpus", "--max-len", "2"]).status.code(), Some(1));
}

#[test]
fn in_process_entry_point_matches_binary() {
    let f = fixture();
    let (model, input) = (f.path("model.arc"), f.path("input.txt"));
    let args = ["mxparse", "parse", "-m", s(&model), s(&input)];
    let (mut out, mut err) = (Vec::new(), Vec::new());
    assert_eq!(mxparse_cli::run_with_args(args, &mut out, &mut err), 0);
    assert_eq!(out, run(&args[1..]).stdout);
}
