use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use mwe_ccg::collapse::{collapse_dependencies, collapse_tree, detect_cycles};
use mwe_ccg::eval::{combine_models, format_p, read_counts, score, sig_test, write_counts, Counts, Scheme};
use mwe_ccg::exec::{self, Execution};
use mwe_ccg::mwe::{read_occurrences, recognize, write_occurrences, MweOccurrence};
use mwe_ccg::parser::{extract_dependencies, parse, train, ParserModel};
use mwe_ccg::pipeline::{load_recognizer, run_pipeline, ExperimentConfig, IdRanges};
use mwe_ccg::treebank::{
    read_dependencies, read_lexicon, read_tokens, read_treebank, write_dependencies, write_tokens, write_treebank,
    DependencyCorpus, DependencySet, SentenceRecord,
};

/// MWE collapsing experiments on CCG treebanks.
#[derive(Parser)]
#[command(name = "mwe-ccg", version)]
struct Cli {
    /// Run on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split a treebank into train/dev/test files by sentence id.
    Split {
        #[arg(long)]
        treebank: PathBuf,
        #[arg(long)]
        train: String,
        #[arg(long, default_value = "")]
        dev: String,
        #[arg(long)]
        test: String,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Recognize MWEs in a token file or treebank.
    Recognize {
        #[arg(long)]
        lexicon: PathBuf,
        /// Token file; use --treebank to read tokens from trees instead.
        #[arg(long, conflicts_with = "treebank", required_unless_present = "treebank")]
        tokens: Option<PathBuf>,
        #[arg(long)]
        treebank: Option<PathBuf>,
        /// Preset name (rec1..rec5) or recognizer fragment file.
        #[arg(long, default_value = "rec1")]
        recognizer: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Collapse sibling MWEs in trees and their dependencies.
    Collapse {
        #[arg(long)]
        treebank: PathBuf,
        /// Gold dependencies; extracted from the trees when omitted.
        #[arg(long)]
        deps: Option<PathBuf>,
        #[arg(long)]
        occurrences: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Train a parser model.
    Train {
        #[arg(long)]
        treebank: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        smoothing: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Parse a token file and write its dependencies.
    Parse {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        tokens: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write the Viterbi trees.
        #[arg(long)]
        trees: Option<PathBuf>,
    },
    /// Read dependencies off treebank derivations.
    ExtractDeps {
        #[arg(long)]
        treebank: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Merge a baseline parse with a collapsed parse.
    Combine {
        /// Dependencies over original tokens.
        #[arg(long)]
        a: PathBuf,
        /// Dependencies over collapsed tokens.
        #[arg(long)]
        b: PathBuf,
        /// Original token file.
        #[arg(long)]
        tokens: PathBuf,
        #[arg(long)]
        occurrences: PathBuf,
        #[arg(long, default_value = "medFromA")]
        scheme: Scheme,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score system dependencies against gold.
    Eval {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        labeled: bool,
        /// Report file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-sentence counts for sigtest.
        #[arg(long)]
        counts: Option<PathBuf>,
    },
    /// Randomized shuffling test that X scores higher than Y.
    Sigtest {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        iterations: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Run a whole experiment from a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("cannot open {}", path.display()))?,
    ))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
    ))
}

fn load_treebank(path: &Path) -> Result<Vec<SentenceRecord>> {
    Ok(read_treebank(open(path)?)?)
}

fn save_deps(path: &Path, corpus: &DependencyCorpus) -> Result<()> {
    let mut w = create(path)?;
    write_dependencies(&mut w, corpus.iter().map(|(id, d)| (id.as_str(), d)))?;
    w.flush()?;
    Ok(())
}

fn tree_of(r: &SentenceRecord) -> Result<&mwe_ccg::treebank::DerivationTree> {
    r.tree
        .as_ref()
        .with_context(|| format!("sentence {} has no tree", r.id))
}

fn run(cli: Cli) -> Result<()> {
    let mode = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    match cli.command {
        Command::Split {
            treebank,
            train,
            dev,
            test,
            out_dir,
        } => {
            let records = load_treebank(&treebank).context("stage load")?;
            let parts: [(&str, IdRanges); 3] = [
                ("train", train.parse()?),
                ("dev", dev.parse()?),
                ("test", test.parse()?),
            ];
            for (name, ranges) in &parts {
                let picked: Vec<&SentenceRecord> = records.iter().filter(|r| ranges.contains(&r.id)).collect();
                if *name == "test" && picked.is_empty() {
                    bail!("stage split: test split is empty");
                }
                let mut w = create(&out_dir.join(format!("{}.txt", name)))?;
                write_treebank(&mut w, picked)?;
                w.flush()?;
            }
        }
        Command::Recognize {
            lexicon,
            tokens,
            treebank,
            recognizer,
            out,
        } => {
            let lex = read_lexicon(open(&lexicon)?).context("stage load")?;
            let (_, config) = load_recognizer(&recognizer, Path::new(".")).context("stage recognize")?;
            let sentences = match (tokens, treebank) {
                (Some(t), _) => read_tokens(open(&t)?)?,
                (_, Some(t)) => load_treebank(&t)?.into_iter().map(|r| (r.id, r.tokens)).collect(),
                _ => unreachable!("clap requires one input"),
            };
            let found = exec::map(mode, &sentences, |(_, toks)| recognize(&lex, toks, &config));
            let mut w = create(&out)?;
            write_occurrences(
                &mut w,
                sentences
                    .iter()
                    .zip(&found)
                    .map(|((id, _), o)| (id.as_str(), o.as_slice())),
            )?;
            w.flush()?;
        }
        Command::Collapse {
            treebank,
            deps,
            occurrences,
            out_dir,
        } => {
            let records = load_treebank(&treebank).context("stage load")?;
            let gold: DependencyCorpus = match deps {
                Some(p) => read_dependencies(open(&p)?)?,
                None => records
                    .iter()
                    .map(|r| Ok((r.id.clone(), extract_dependencies(tree_of(r)?).into_set())))
                    .collect::<Result<_>>()?,
            };
            let gold: std::collections::BTreeMap<String, DependencySet> = gold.into_iter().collect();
            let occs = read_occurrences(open(&occurrences)?).context("stage load")?;
            let (mut trees, mut collapsed, mut kept_all) = (Vec::new(), Vec::new(), Vec::new());
            let (mut recognized, mut kept, mut discarded, mut cycles) = (0, 0, 0, 0);
            let none: Vec<MweOccurrence> = Vec::new();
            for r in &records {
                let stage = || format!("stage collapse, sentence {}", r.id);
                let o = occs.get(&r.id).unwrap_or(&none);
                let outcome = collapse_tree(tree_of(r)?, o).with_context(stage)?;
                let empty = DependencySet::new();
                let d = collapse_dependencies(gold.get(&r.id).unwrap_or(&empty), &outcome).with_context(stage)?;
                recognized += o.len();
                kept += outcome.kept.len();
                discarded += outcome.discarded.len();
                cycles += detect_cycles(&d);
                kept_all.push((r.id.clone(), outcome.kept_occurrences()));
                trees.push(SentenceRecord::from_tree(r.id.clone(), outcome.tree));
                collapsed.push((r.id.clone(), d));
            }
            let mut w = create(&out_dir.join("treebank.txt"))?;
            write_treebank(&mut w, &trees)?;
            w.flush()?;
            save_deps(&out_dir.join("deps.deps"), &collapsed)?;
            let mut w = create(&out_dir.join("tokens.txt"))?;
            write_tokens(&mut w, trees.iter().map(|r| (r.id.as_str(), r.tokens.as_slice())))?;
            w.flush()?;
            let mut w = create(&out_dir.join("kept.tsv"))?;
            write_occurrences(&mut w, kept_all.iter().map(|(id, o)| (id.as_str(), o.as_slice())))?;
            w.flush()?;
            let pct = if recognized == 0 {
                0.0
            } else {
                100.0 * kept as f64 / recognized as f64
            };
            fs::write(
                out_dir.join("stats.tsv"),
                format!(
                    "recognized\t{}\nkept\t{}\ndiscarded\t{}\nkept_percent\t{:.2}\ncycles\t{}\n",
                    recognized, kept, discarded, pct, cycles
                ),
            )?;
        }
        Command::Train {
            treebank,
            smoothing,
            out,
        } => {
            let records = load_treebank(&treebank).context("stage load")?;
            let model = train(&records, smoothing).context("stage train")?;
            let mut w = create(&out)?;
            model.write_tsv(&mut w)?;
            w.flush()?;
        }
        Command::Parse {
            model,
            tokens,
            out,
            trees,
        } => {
            let model = ParserModel::read_tsv(open(&model)?).context("stage load")?;
            let sentences = read_tokens(open(&tokens)?).context("stage load")?;
            let results = exec::map(mode, &sentences, |(_, t)| parse(&model, t));
            let mut deps = Vec::with_capacity(sentences.len());
            let mut parsed = Vec::new();
            let mut failed = 0;
            for ((id, _), r) in sentences.iter().zip(results) {
                match r.tree {
                    Some(t) => {
                        deps.push((id.clone(), extract_dependencies(&t).into_set()));
                        parsed.push(SentenceRecord::from_tree(id.clone(), t));
                    }
                    None => {
                        failed += 1;
                        deps.push((id.clone(), DependencySet::new()));
                    }
                }
            }
            save_deps(&out, &deps)?;
            if let Some(path) = trees {
                let mut w = create(&path)?;
                write_treebank(&mut w, &parsed)?;
                w.flush()?;
            }
            eprintln!("parsed {}/{} sentences", sentences.len() - failed, sentences.len());
        }
        Command::ExtractDeps { treebank, out } => {
            let records = load_treebank(&treebank).context("stage load")?;
            let corpus = records
                .iter()
                .map(|r| Ok((r.id.clone(), extract_dependencies(tree_of(r)?).into_set())))
                .collect::<Result<DependencyCorpus>>()?;
            save_deps(&out, &corpus)?;
        }
        Command::Combine {
            a,
            b,
            tokens,
            occurrences,
            scheme,
            out,
        } => {
            let out_a: std::collections::BTreeMap<_, _> = read_dependencies(open(&a)?)?.into_iter().collect();
            let out_b: std::collections::BTreeMap<_, _> = read_dependencies(open(&b)?)?.into_iter().collect();
            let occs = read_occurrences(open(&occurrences)?)?;
            let sentences = read_tokens(open(&tokens)?)?;
            let (empty, none) = (DependencySet::new(), Vec::new());
            let mut combined = Vec::with_capacity(sentences.len());
            for (id, toks) in &sentences {
                let merged = combine_models(
                    out_a.get(id).unwrap_or(&empty),
                    out_b.get(id).unwrap_or(&empty),
                    toks,
                    occs.get(id).unwrap_or(&none),
                    scheme,
                )
                .with_context(|| format!("stage combine, sentence {}", id))?;
                combined.push((id.clone(), merged));
            }
            save_deps(&out, &combined)?;
        }
        Command::Eval {
            system,
            gold,
            labeled,
            out,
            counts,
        } => {
            let sys = read_dependencies(open(&system)?).context("stage load")?;
            let gold = read_dependencies(open(&gold)?).context("stage load")?;
            let report = score(&sys, &gold, labeled).context("stage eval")?;
            match out {
                Some(p) => {
                    let mut w = create(&p)?;
                    report.write_tsv(&mut w)?;
                    w.flush()?;
                }
                None => report.write_tsv(io::stdout().lock())?,
            }
            if let Some(p) = counts {
                let mut w = create(&p)?;
                write_counts(&mut w, &report.per_sentence)?;
                w.flush()?;
            }
        }
        Command::Sigtest { x, y, iterations, seed } => {
            let rx = read_counts(open(&x)?).context("stage load")?;
            let ry = read_counts(open(&y)?).context("stage load")?;
            let ids_x: Vec<&str> = rx.iter().map(|(id, _)| id.as_str()).collect();
            let ids_y: Vec<&str> = ry.iter().map(|(id, _)| id.as_str()).collect();
            if ids_x != ids_y {
                bail!("stage sigtest: count files cover different sentences");
            }
            let cx: Vec<Counts> = rx.iter().map(|(_, c)| *c).collect();
            let cy: Vec<Counts> = ry.iter().map(|(_, c)| *c).collect();
            let r = sig_test(&cx, &cy, iterations, seed, mode).context("stage sigtest")?;
            println!("observed\t{:.6}", r.observed);
            println!("at_least_as_extreme\t{}", r.at_least_as_extreme);
            println!("iterations\t{}", r.shuffles);
            println!("p\t{}", format_p(r.p_value));
        }
        Command::Run { config, out_dir } => {
            let mut cfg = ExperimentConfig::load(&config).context("stage config")?;
            if let Some(dir) = out_dir {
                cfg.output = dir;
            }
            let report = run_pipeline(&cfg, mode)?;
            print!("{}", report.summary());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::FAILURE
        }
    }
}
