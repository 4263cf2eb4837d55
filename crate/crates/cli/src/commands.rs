use std::fmt::Write as _;
use std::io::{self, Read, Write};
use std::path::Path;

use mxparse::eval::{evaluate as score, oracle_rerank, EvalOptions, EvalReport};
use mxparse::maxent::GisConfig;
use mxparse::parser::TrainOptions;
use mxparse::treebank::{normalize_tree, read_bracketed, Corpus, HeadRules, ParseTree};
use mxparse::{Parser, SearchConfig, SearchOutcome};
use rayon::prelude::*;

use crate::archive::{ModelArchive, TrainMeta};
use crate::cli::{Cli, Command, EvalFlags, EvaluateArgs, GenerateArgs, OracleArgs, ParseArgs, SearchArgs, TrainArgs};
use crate::error::{CliError, Result};

/// How a command that did not fail ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success,
    /// At least one sentence had no parse.
    NoParse,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::NoParse => 3,
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<Status> {
    match cli.command {
        Command::Train(a) => train(&a, out),
        Command::Parse(a) => parse(&a, out, err),
        Command::Evaluate(a) => evaluate(&a, out),
        Command::OracleCurve(a) => oracle_curve(&a, out),
        Command::GenerateCorpus(a) => generate(&a, out),
    }
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(CliError::io(path))
}

fn read_text(path: &Path) -> Result<String> {
    String::from_utf8(read_bytes(path)?).map_err(|_| CliError::Io {
        path: path.into(),
        source: io::Error::new(io::ErrorKind::InvalidData, "not UTF-8"),
    })
}

/// Reads and normalizes a treebank; vacuous trees are dropped.
pub fn read_corpus(path: &Path) -> Result<Corpus> {
    let text = read_text(path)?;
    Ok(Corpus::read_normalized(&text, HeadRules::standard())
        .map_err(CliError::input(path))?
        .0)
}

pub fn train(args: &TrainArgs, out: &mut dyn Write) -> Result<Status> {
    let bytes = read_bytes(&args.corpus)?;
    let text = std::str::from_utf8(&bytes).map_err(|_| CliError::Io {
        path: args.corpus.clone(),
        source: io::Error::new(io::ErrorKind::InvalidData, "not UTF-8"),
    })?;
    let (corpus, dropped) = Corpus::read_normalized(text, HeadRules::standard()).map_err(CliError::input(&args.corpus))?;
    let opts = TrainOptions {
        cutoff: args.cutoff,
        gis: GisConfig {
            max_iters: args.iters,
            tol: args.tol,
        },
    };
    let (parser, summary) = Parser::train(&corpus, &opts)?;
    writeln!(
        out,
        "corpus: {} trees, {} dropped as vacuous, {} underivable",
        corpus.len(),
        dropped,
        summary.underivable.len()
    )?;
    writeln!(out, "procedure\tevents\tfeatures\tC\titerations\tgap\tconverged")?;
    for (p, r) in &summary.reports {
        writeln!(
            out,
            "{p}\t{}\t{}\t{}\t{}\t{:.3e}\t{}",
            summary.events[p.index()],
            summary.features[p.index()],
            r.correction,
            r.iterations,
            r.final_gap(),
            if r.converged { "yes" } else { "no" }
        )?;
    }
    let archive = ModelArchive {
        meta: TrainMeta {
            corpus_sha256: TrainMeta::hash_corpus(&bytes),
            sentences: corpus.len(),
            underivable: summary.underivable.len(),
            cutoff: args.cutoff,
            max_iters: args.iters,
            tol: args.tol,
        },
        parser,
    };
    archive.save(&args.output)?;
    Ok(Status::Success)
}

fn search_config(beam: usize, kbest: usize, mass: f64) -> Result<SearchConfig> {
    SearchConfig::new(beam, kbest, mass).map_err(|e| CliError::Usage(e.to_string()))
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    if jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))
}

/// Parses every sentence, in parallel on `jobs` threads; results keep input order.
pub fn parse_all(parser: &Parser, sentences: &[Vec<String>], cfg: &SearchConfig, jobs: usize) -> Result<Vec<SearchOutcome>> {
    pool(jobs)?.install(|| {
        sentences
            .par_iter()
            .map(|tokens| parser.parse(tokens, cfg).map_err(CliError::from))
            .collect()
    })
}

/// One k-best block: `# sentence N`, then `log-score<TAB>tree` lines or
/// `NO-PARSE`, then a blank line.
pub fn format_kbest(index: usize, outcome: &SearchOutcome) -> String {
    let mut s = format!("# sentence {index}\n");
    match outcome {
        SearchOutcome::NoParse => s.push_str("NO-PARSE\n"),
        SearchOutcome::Parsed(parses) => {
            for p in parses {
                writeln!(s, "{}\t{}", p.log_score, p.tree).expect("write to String");
            }
        }
    }
    s.push('\n');
    s
}

pub fn parse(args: &ParseArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<Status> {
    let SearchArgs { kbest, beam, mass, jobs } = args.search;
    let cfg = search_config(beam, kbest, mass)?;
    let archive = ModelArchive::load(&args.model)?;
    let text = match args.input.as_deref() {
        None => read_stdin()?,
        Some(p) if p == Path::new("-") => read_stdin()?,
        Some(p) => read_text(p)?,
    };
    let mut sentences = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let tokens: Vec<String> = line.split_whitespace().map(str::to_owned).collect();
        if tokens.is_empty() {
            writeln!(err, "warning: line {} is empty; skipped", n + 1)?;
        } else {
            sentences.push(tokens);
        }
    }
    let outcomes = parse_all(&archive.parser, &sentences, &cfg, jobs)?;
    let mut status = Status::Success;
    for (i, o) in outcomes.iter().enumerate() {
        if o.is_no_parse() {
            status = Status::NoParse;
        }
        out.write_all(format_kbest(i + 1, o).as_bytes())?;
    }
    Ok(status)
}

fn read_stdin() -> Result<String> {
    let mut s = String::new();
    io::stdin().read_to_string(&mut s).map_err(CliError::io("<stdin>"))?;
    Ok(s)
}

/// Rank-1 trees of `parse` output, `None` for `NO-PARSE`.
fn read_kbest_top(text: &str, path: &Path) -> Result<Vec<Option<ParseTree>>> {
    let mut out = Vec::new();
    let mut pending = false;
    for (n, line) in text.lines().enumerate() {
        let bad = |msg: &str| CliError::Input {
            path: path.into(),
            source: mxparse::Error::Parse {
                line: n + 1,
                column: 1,
                message: msg.to_owned(),
            },
        };
        if line.starts_with("# sentence ") {
            if pending {
                return Err(bad("sentence block without a parse or NO-PARSE line"));
            }
            pending = true;
        } else if line.is_empty() {
            continue;
        } else if pending {
            pending = false;
            if line == "NO-PARSE" {
                out.push(None);
            } else {
                let (_, tree) = line.split_once('\t').ok_or_else(|| bad("expected score<TAB>tree"))?;
                let t = read_bracketed(tree).map_err(CliError::input(path))?;
                let [t] = <[ParseTree; 1]>::try_from(t).map_err(|_| bad("expected exactly one tree"))?;
                out.push(Some(normalize_tree(&t, HeadRules::standard()).map_err(CliError::input(path))?));
            }
        }
    }
    if pending {
        return Err(CliError::Input {
            path: path.into(),
            source: mxparse::Error::Parse {
                line: text.lines().count(),
                column: 1,
                message: "last sentence block is empty".into(),
            },
        });
    }
    Ok(out)
}

/// Test trees from either bracketed text or `parse` output.
pub fn read_test(path: &Path) -> Result<Vec<Option<ParseTree>>> {
    let text = read_text(path)?;
    if text.trim_start().starts_with("# sentence ") {
        return read_kbest_top(&text, path);
    }
    read_bracketed(&text)
        .and_then(|trees| {
            trees
                .iter()
                .map(|t| normalize_tree(t, HeadRules::standard()).map(Some))
                .collect()
        })
        .map_err(CliError::input(path))
}

impl From<EvalFlags> for EvalOptions {
    fn from(f: EvalFlags) -> Self {
        EvalOptions {
            ignore_quotes: f.ignore_quotes,
            collapse_advp_prt: f.collapse_advp_prt,
            ignore_all_punctuation: f.ignore_punct,
            max_length: f.max_length,
        }
    }
}

pub fn evaluate_files(gold: &Path, test: &Path, opts: &EvalOptions) -> Result<EvalReport> {
    let gold_trees: Vec<ParseTree> = read_corpus(gold)?.trees().cloned().collect();
    let test_trees = read_test(test)?;
    if gold_trees.len() != test_trees.len() {
        return Err(CliError::Mismatch(format!(
            "{} has {} sentences but {} has {}",
            gold.display(),
            gold_trees.len(),
            test.display(),
            test_trees.len()
        )));
    }
    Ok(score(&test_trees, &gold_trees, opts)?)
}

pub fn evaluate(args: &EvaluateArgs, out: &mut dyn Write) -> Result<Status> {
    let report = evaluate_files(&args.gold, &args.test, &args.flags.into())?;
    let text = if args.per_sentence {
        report.to_delimited()
    } else {
        report.to_text()
    };
    out.write_all(text.as_bytes())?;
    Ok(Status::Success)
}

/// One row per N: oracle precision, recall, F-measure and exact-match rate.
pub fn format_curve(rows: &[(usize, EvalReport)]) -> String {
    let mut s = String::from("n\tprecision\trecall\tf-measure\texact\n");
    for (n, r) in rows {
        writeln!(
            s,
            "{n}\t{:.6}\t{:.6}\t{:.6}\t{:.6}",
            r.precision(),
            r.recall(),
            r.f_measure(),
            r.exact_rate()
        )
        .expect("write to String");
    }
    s
}

pub fn oracle_curve(args: &OracleArgs, out: &mut dyn Write) -> Result<Status> {
    if args.max_n == 0 {
        return Err(CliError::Usage("--max-n must be at least 1".into()));
    }
    let cfg = search_config(args.beam, args.max_n, args.mass)?;
    let archive = ModelArchive::load(&args.model)?;
    let corpus = read_corpus(&args.gold)?;
    let gold: Vec<ParseTree> = corpus.trees().cloned().collect();
    let sentences: Vec<Vec<String>> = corpus.sentences().iter().map(|s| s.tokens.clone()).collect();
    let kbest: Vec<Vec<ParseTree>> = parse_all(&archive.parser, &sentences, &cfg, args.jobs)?
        .into_iter()
        .map(|o| o.into_parses().into_iter().map(|p| p.tree).collect())
        .collect();
    let opts: EvalOptions = args.flags.into();
    let rows = (1..=args.max_n)
        .map(|n| Ok((n, oracle_rerank(&kbest, &gold, n, &opts)?)))
        .collect::<Result<Vec<_>>>()?;
    out.write_all(format_curve(&rows).as_bytes())?;
    Ok(Status::Success)
}

pub fn generate(args: &GenerateArgs, out: &mut dyn Write) -> Result<Status> {
    if args.max_len < 5 {
        return Err(CliError::Usage("--max-len must be at least 5".into()));
    }
    let mut text = mxparse::synth::generate_corpus(args.seed, args.count, args.max_len).join("\n");
    text.push('\n');
    match &args.output {
        Some(path) => std::fs::write(path, text).map_err(CliError::io(path))?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(Status::Success)
}

#[cfg(test)]
mod tests {
    use super::*;
    use mxparse::treebank::write_bracketed;
    use mxparse::ScoredParse;

    fn tree(s: &str) -> ParseTree {
        read_bracketed(s).unwrap().remove(0)
    }

    #[test]
    fn exit_codes() {
        assert_eq!(Status::Success.exit_code(), 0);
        assert_eq!(Status::NoParse.exit_code(), 3);
        assert_eq!(CliError::Usage("x".into()).exit_code(), 1);
        assert_eq!(CliError::Mismatch("x".into()).exit_code(), 2);
        assert_eq!(CliError::Data(mxparse::Error::NoSentences).exit_code(), 2);
    }

    #[test]
    fn kbest_blocks() {
        let t = tree("(S (NP (PRP I)) (VP (VBD ran)))");
        let parsed = SearchOutcome::Parsed(vec![ScoredParse {
            tree: t.clone(),
            derivation: mxparse::Derivation::new(vec!["I".into(), "ran".into()], Vec::new()),
            q_values: Vec::new(),
            log_score: -0.5,
        }]);
        assert_eq!(
            format_kbest(1, &parsed),
            format!("# sentence 1\n-0.5\t{}\n\n", write_bracketed(&t))
        );
        assert_eq!(format_kbest(2, &SearchOutcome::NoParse), "# sentence 2\nNO-PARSE\n\n");
    }

    #[test]
    fn kbest_top_reads_rank_one() {
        let text = "# sentence 1\n-1\t(S (NP (PRP I)) (VP (VBD ran)))\n-2\t(S (PRP I) (VBD ran))\n\n# sentence 2\nNO-PARSE\n\n";
        let got = read_kbest_top(text, Path::new("x")).unwrap();
        assert_eq!(got.len(), 2);
        assert_eq!(got[0].as_ref().unwrap().constituents().count(), 3);
        assert!(got[1].is_none());
        assert!(read_kbest_top("# sentence 1\n\n# sentence 2\nNO-PARSE\n", Path::new("x")).is_err());
        assert!(read_kbest_top("# sentence 1\n(S (X y))\n", Path::new("x")).is_err());
    }

    #[test]
    fn curve_rows() {
        let gold = vec![tree("(S (NP (PRP I)) (VP (VBD ran)))")];
        let r = score(&[Some(gold[0].clone())], &gold, &EvalOptions::default()).unwrap();
        assert_eq!(
            format_curve(&[(1, r)]),
            "n\tprecision\trecall\tf-measure\texact\n1\t1.000000\t1.000000\t1.000000\t1.000000\n"
        );
    }

    #[test]
    fn eval_flags_map_one_to_one() {
        let o: EvalOptions = EvalFlags {
            ignore_quotes: true,
            collapse_advp_prt: false,
            ignore_punct: true,
            max_length: Some(40),
        }
        .into();
        assert_eq!(
            o,
            EvalOptions {
                ignore_quotes: true,
                collapse_advp_prt: false,
                ignore_all_punctuation: true,
                max_length: Some(40),
            }
        );
    }
}
