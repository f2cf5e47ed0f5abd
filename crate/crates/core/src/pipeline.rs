//! End-to-end experiment: baseline model, MWE recognition and collapsing,
//! collapsed model, and every evaluation comparing the two.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::collapse::{
    collapse_all_dependencies, collapse_dependencies, collapse_tokens, collapse_tree, detect_cycles,
};
use crate::error::{Error, Result};
use crate::eval::{combine_models, format_p, score, sig_test, write_counts, Counts, EvalReport, Scheme};
use crate::exec::{self, Execution};
use crate::mwe::{recognize, write_occurrences, Detector, Filter, MweOccurrence, RecognizerConfig, Resolver};
use crate::parser::{extract_dependencies, parse, train, ParserModel};
use crate::treebank::{
    read_lexicon, read_treebank, write_dependencies, write_tokens, write_treebank, DependencyCorpus, DependencySet,
    SentenceRecord,
};

/// Inclusive numeric id ranges such as `1-40,45`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdRanges(Vec<(u64, u64)>);

impl IdRanges {
    pub fn contains(&self, id: &str) -> bool {
        id.parse::<u64>()
            .map(|n| self.0.iter().any(|&(lo, hi)| lo <= n && n <= hi))
            .unwrap_or(false)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn overlaps(&self, other: &IdRanges) -> bool {
        self.0
            .iter()
            .any(|&(a, b)| other.0.iter().any(|&(c, d)| a <= d && c <= b))
    }
}

impl FromStr for IdRanges {
    type Err = Error;

    fn from_str(s: &str) -> Result<IdRanges> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let bad = || Error::Invalid(format!("bad id range {:?}", part));
            let (lo, hi) = match part.split_once('-') {
                Some((a, b)) => (
                    a.trim().parse().map_err(|_| bad())?,
                    b.trim().parse().map_err(|_| bad())?,
                ),
                None => {
                    let n = part.parse().map_err(|_| bad())?;
                    (n, n)
                }
            };
            if lo > hi {
                return Err(bad());
            }
            out.push((lo, hi));
        }
        Ok(IdRanges(out))
    }
}

impl fmt::Display for IdRanges {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&(lo, hi)| {
                if lo == hi {
                    lo.to_string()
                } else {
                    format!("{}-{}", lo, hi)
                }
            })
            .collect();
        f.write_str(&parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub treebank: PathBuf,
    pub lexicon: PathBuf,
    pub recognizer_name: String,
    pub recognizer: RecognizerConfig,
    pub train: IdRanges,
    pub dev: IdRanges,
    pub test: IdRanges,
    pub schemes: Vec<Scheme>,
    pub smoothing: f64,
    pub seed: u64,
    pub iterations: u64,
    pub output: PathBuf,
}

/// `key = value` lines; `#` starts a comment line.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::format(n + 1, format!("expected key = value, got {:?}", line)))?;
        let key = k.trim().to_ascii_lowercase();
        if out.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(Error::format(n + 1, format!("duplicate key {:?}", key)));
        }
    }
    Ok(out)
}

/// Builds a recognizer from `detector`, `filters` and `resolver` keys.
/// Filters are separated by commas, `+` or whitespace.
pub fn recognizer_from_keys(keys: &BTreeMap<String, String>) -> Result<RecognizerConfig> {
    let get = |k: &str| {
        keys.get(k)
            .ok_or_else(|| Error::Invalid(format!("recognizer needs a {:?} key", k)))
    };
    let detector: Detector = get("detector")?.parse()?;
    let resolver: Resolver = get("resolver")?.parse()?;
    let filters = keys
        .get("filters")
        .map(|v| {
            v.split(|c: char| c == ',' || c == '+' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(str::parse::<Filter>)
                .collect::<Result<Vec<_>>>()
        })
        .transpose()?
        .unwrap_or_default();
    Ok(RecognizerConfig::new(detector, filters, resolver))
}

/// A preset name (`rec1`..`rec5`) or a fragment file holding recognizer
/// keys, resolved against `base`. Returns a display name with the config.
pub fn load_recognizer(spec: &str, base: &Path) -> Result<(String, RecognizerConfig)> {
    if let Some(r) = RecognizerConfig::preset(spec) {
        return Ok((spec.to_string(), r));
    }
    let file = base.join(spec);
    let fragment = parse_key_values(&fs::read_to_string(&file)?)?;
    let name = file
        .file_stem()
        .map_or_else(|| spec.to_string(), |s| s.to_string_lossy().into_owned());
    Ok((name, recognizer_from_keys(&fragment)?))
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = fs::read_to_string(path)?;
        ExperimentConfig::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Relative paths are resolved against `base`. `recognizer` names a
    /// preset (`rec1`..`rec5`) or a fragment file with recognizer keys;
    /// without it the keys are read from the config itself.
    pub fn parse(text: &str, base: &Path) -> Result<ExperimentConfig> {
        let keys = parse_key_values(text)?;
        let known = [
            "treebank",
            "lexicon",
            "recognizer",
            "detector",
            "filters",
            "resolver",
            "train",
            "dev",
            "test",
            "schemes",
            "smoothing",
            "seed",
            "iterations",
            "output",
        ];
        if let Some(k) = keys.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(Error::Invalid(format!("unknown config key {:?}", k)));
        }
        let path = |k: &str| -> Result<PathBuf> {
            let v = keys
                .get(k)
                .ok_or_else(|| Error::Invalid(format!("config needs a {:?} key", k)))?;
            Ok(base.join(v))
        };
        let (recognizer_name, recognizer) = match keys.get("recognizer") {
            Some(spec) => load_recognizer(spec, base)?,
            None => ("custom".to_string(), recognizer_from_keys(&keys)?),
        };
        let ranges = |k: &str| keys.get(k).map_or_else(|| Ok(IdRanges::default()), |v| v.parse());
        let (train, dev, test) = (ranges("train")?, ranges("dev")?, ranges("test")?);
        if train.overlaps(&dev) || train.overlaps(&test) || dev.overlaps(&test) {
            return Err(Error::Invalid("train, dev and test id ranges overlap".into()));
        }
        let schemes = match keys.get("schemes") {
            Some(v) => v
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::parse)
                .collect::<Result<Vec<Scheme>>>()?,
            None => Scheme::ALL.to_vec(),
        };
        let number =
            |k: &str, default: &str| -> Result<String> { Ok(keys.get(k).map_or(default, String::as_str).to_string()) };
        let smoothing: f64 = number("smoothing", "0.1")?
            .parse()
            .map_err(|_| Error::Invalid("smoothing must be a number".into()))?;
        let seed: u64 = number("seed", "42")?
            .parse()
            .map_err(|_| Error::Invalid("seed must be a non-negative integer".into()))?;
        let iterations: u64 = number("iterations", "10000")?
            .parse()
            .map_err(|_| Error::Invalid("iterations must be a non-negative integer".into()))?;
        Ok(ExperimentConfig {
            treebank: path("treebank")?,
            lexicon: path("lexicon")?,
            recognizer_name,
            recognizer,
            train,
            dev,
            test,
            schemes,
            smoothing,
            seed,
            iterations,
            output: keys.get("output").map_or_else(|| base.join("out"), |v| base.join(v)),
        })
    }
}

/// One evaluated system.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub table: usize,
    pub model: String,
    pub setting: String,
    pub report: EvalReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SigRow {
    pub table: usize,
    pub better: String,
    pub worse: String,
    pub observed: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CollapseStats {
    pub recognized: usize,
    pub kept: usize,
    pub discarded: usize,
    pub cycles: usize,
    pub non_derivable_gold: usize,
}

impl CollapseStats {
    pub fn kept_percent(&self) -> f64 {
        if self.recognized == 0 {
            0.0
        } else {
            100.0 * self.kept as f64 / self.recognized as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub recognizer: String,
    pub split_sizes: (usize, usize, usize),
    pub stats: CollapseStats,
    /// `(run, failed, attempted)` per parsing run.
    pub parse_failures: Vec<(String, usize, usize)>,
    pub rows: Vec<ReportRow>,
    pub significance: Vec<SigRow>,
    pub iterations: u64,
}

const TABLE_TITLES: [&str; 4] = [
    "Training effect: unlabeled dependencies against gold standard B",
    "Parsing effect: collapsing before vs after parsing, against gold standard B",
    "Model combination against gold standard A (gold sibling test data)",
    "Model combination against gold standard A (fully collapsed test data)",
];

impl ExperimentReport {
    pub fn write_tsv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "kind\ttable\tmodel\tsetting\tcorrect\tattempted\tgold\tP\tR\tF1")?;
        for r in &self.rows {
            let t = &r.report;
            writeln!(
                w,
                "eval\t{}\t{}\t{}\t{}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}",
                r.table,
                r.model,
                r.setting,
                t.totals.correct,
                t.totals.attempted,
                t.totals.gold,
                t.precision,
                t.recall,
                t.f1
            )?;
        }
        for s in &self.significance {
            writeln!(
                w,
                "sigtest\t{}\t{}\t{}\t{:+.6}\t{:.4}",
                s.table, s.better, s.worse, s.observed, s.p_value
            )?;
        }
        let st = &self.stats;
        writeln!(w, "stat\trecognized\t{}", st.recognized)?;
        writeln!(w, "stat\tkept\t{}", st.kept)?;
        writeln!(w, "stat\tdiscarded\t{}", st.discarded)?;
        writeln!(w, "stat\tkept_percent\t{:.2}", st.kept_percent())?;
        writeln!(w, "stat\tcycles\t{}", st.cycles)?;
        writeln!(w, "stat\tnon_derivable_gold\t{}", st.non_derivable_gold)?;
        for (run, failed, total) in &self.parse_failures {
            writeln!(w, "stat\tparse_failures:{}\t{}/{}", run, failed, total)?;
        }
        Ok(())
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let st = &self.stats;
        let (tr, dv, te) = self.split_sizes;
        let _ = writeln!(s, "Recognizer: {}", self.recognizer);
        let _ = writeln!(s, "Sentences: train {}, dev {}, test {}", tr, dv, te);
        let _ = writeln!(
            s,
            "MWEs: {} recognized, {} kept as siblings ({:.2}%), {} discarded",
            st.recognized,
            st.kept,
            st.kept_percent(),
            st.discarded
        );
        let _ = writeln!(s, "Cyclic dependency pairs after collapsing: {}", st.cycles);
        for (run, failed, total) in &self.parse_failures {
            let _ = writeln!(s, "Parse failures, {}: {}/{}", run, failed, total);
        }
        for (t, title) in TABLE_TITLES.iter().enumerate() {
            let table = t + 1;
            let _ = writeln!(s, "\nTable {}. {}", table, title);
            let _ = writeln!(s, "{:<10} {:<28} {:>7} {:>7} {:>7}", "model", "setting", "P", "R", "F1");
            for r in self.rows.iter().filter(|r| r.table == table) {
                let _ = writeln!(
                    s,
                    "{:<10} {:<28} {:>7.2} {:>7.2} {:>7.2}",
                    r.model,
                    r.setting,
                    100.0 * r.report.precision,
                    100.0 * r.report.recall,
                    100.0 * r.report.f1
                );
            }
            for sig in self.significance.iter().filter(|x| x.table == table) {
                let _ = writeln!(
                    s,
                    "  {} over {}: {:+.2} F1, p={}",
                    sig.better,
                    sig.worse,
                    100.0 * sig.observed,
                    format_p(sig.p_value)
                );
            }
        }
        let _ = writeln!(
            s,
            "\nSignificance: one-tailed randomized shuffling, {} iterations.",
            self.iterations
        );
        s
    }
}

/// `(model, setting)` naming a report row.
type RowKey<'a> = (&'a str, &'a str);

fn slug(s: &str) -> String {
    s.split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|w| !w.is_empty())
        .collect::<Vec<_>>()
        .join("_")
}

fn in_stage<T>(stage: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| e.in_stage(stage, None))
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_deps(dir: &Path, name: &str, corpus: &DependencyCorpus) -> Result<()> {
    let mut w = create(dir, name)?;
    write_dependencies(&mut w, corpus.iter().map(|(id, d)| (id.as_str(), d)))?;
    Ok(w.flush()?)
}

fn write_token_file(dir: &Path, name: &str, sentences: &[(String, Vec<String>)]) -> Result<()> {
    let mut w = create(dir, name)?;
    write_tokens(&mut w, sentences.iter().map(|(id, t)| (id.as_str(), t.as_slice())))?;
    Ok(w.flush()?)
}

struct ParsedRun {
    deps: DependencyCorpus,
    trees: Vec<SentenceRecord>,
    failed: usize,
}

fn parse_all(model: &ParserModel, sentences: &[(String, Vec<String>)], mode: Execution) -> ParsedRun {
    let results = exec::map(mode, sentences, |(_, tokens)| parse(model, tokens));
    let mut run = ParsedRun {
        deps: Vec::with_capacity(sentences.len()),
        trees: Vec::new(),
        failed: 0,
    };
    for ((id, _), result) in sentences.iter().zip(results) {
        match result.tree {
            Some(tree) => {
                run.deps.push((id.clone(), extract_dependencies(&tree).into_set()));
                run.trees.push(SentenceRecord::from_tree(id.clone(), tree));
            }
            None => {
                run.failed += 1;
                run.deps.push((id.clone(), DependencySet::new()));
            }
        }
    }
    run
}

/// Runs the whole experiment and writes every intermediate artifact, the
/// TSV report and a plain-text summary to `config.output`.
pub fn run_pipeline(config: &ExperimentConfig, mode: Execution) -> Result<ExperimentReport> {
    let out = &config.output;
    in_stage("output", fs::create_dir_all(out).map_err(Error::from))?;

    // load
    let records = in_stage(
        "load",
        File::open(&config.treebank)
            .map_err(Error::from)
            .and_then(|f| read_treebank(BufReader::new(f))),
    )?;
    let lexicon = in_stage(
        "load",
        File::open(&config.lexicon)
            .map_err(Error::from)
            .and_then(|f| read_lexicon(BufReader::new(f))),
    )?;
    let mut seen = BTreeSet::new();
    for r in &records {
        if !seen.insert(r.id.as_str()) {
            return Err(Error::Invalid("duplicate sentence id".into()).in_stage("load", Some(&r.id)));
        }
    }

    // split
    let pick = |ranges: &IdRanges| -> Vec<usize> {
        (0..records.len())
            .filter(|&i| ranges.contains(&records[i].id))
            .collect()
    };
    let (train_idx, dev_idx, test_idx) = (pick(&config.train), pick(&config.dev), pick(&config.test));
    if train_idx.is_empty() {
        return Err(Error::Invalid("training split is empty".into()).in_stage("split", None));
    }
    if test_idx.is_empty() {
        return Err(Error::Invalid("test split is empty".into()).in_stage("split", None));
    }

    // gold A
    let mut stats = CollapseStats::default();
    let mut gold_a_all: DependencyCorpus = Vec::with_capacity(records.len());
    for r in &records {
        let tree = r.tree.as_ref().expect("treebank records carry trees");
        let ex = extract_dependencies(tree);
        stats.non_derivable_gold += ex.non_derivable;
        gold_a_all.push((r.id.clone(), ex.into_set()));
    }
    write_deps(out, "gold_a.deps", &gold_a_all)?;

    // model A
    let train_a: Vec<SentenceRecord> = train_idx.iter().map(|&i| records[i].clone()).collect();
    let model_a = in_stage("train-a", train(&train_a, config.smoothing))?;
    in_stage(
        "train-a",
        create(out, "model_a.tsv").and_then(|mut w| {
            model_a.write_tsv(&mut w)?;
            Ok(w.flush()?)
        }),
    )?;

    let test_tokens: Vec<(String, Vec<String>)> = test_idx
        .iter()
        .map(|&i| (records[i].id.clone(), records[i].tokens.clone()))
        .collect();
    write_token_file(out, "test_a.tokens", &test_tokens)?;
    let run_a = parse_all(&model_a, &test_tokens, mode);
    write_deps(out, "out_a.deps", &run_a.deps)?;
    write_treebank(create(out, "parsed_a.txt")?, &run_a.trees)?;

    // recognize
    let occurrences: Vec<Vec<MweOccurrence>> =
        exec::map(mode, &records, |r| recognize(&lexicon, &r.tokens, &config.recognizer));
    {
        let mut w = create(out, "occurrences.tsv")?;
        write_occurrences(
            &mut w,
            records
                .iter()
                .zip(&occurrences)
                .map(|(r, o)| (r.id.as_str(), o.as_slice())),
        )?;
        w.flush()?;
    }

    // collapse
    let mut records_b = Vec::with_capacity(records.len());
    let mut gold_b_all: DependencyCorpus = Vec::with_capacity(records.len());
    let mut kept: Vec<Vec<MweOccurrence>> = Vec::with_capacity(records.len());
    for ((r, occs), (_, gold)) in records.iter().zip(&occurrences).zip(&gold_a_all) {
        let tree = r.tree.as_ref().expect("treebank records carry trees");
        let outcome = collapse_tree(tree, occs).map_err(|e| e.in_stage("collapse", Some(&r.id)))?;
        let deps = collapse_dependencies(gold, &outcome).map_err(|e| e.in_stage("collapse", Some(&r.id)))?;
        stats.recognized += occs.len();
        stats.kept += outcome.kept.len();
        stats.discarded += outcome.discarded.len();
        stats.cycles += detect_cycles(&deps);
        kept.push(outcome.kept_occurrences());
        records_b.push(SentenceRecord::from_tree(r.id.clone(), outcome.tree));
        gold_b_all.push((r.id.clone(), deps));
    }
    write_treebank(create(out, "treebank_b.txt")?, &records_b)?;
    write_deps(out, "gold_b.deps", &gold_b_all)?;
    {
        let mut w = create(out, "kept.tsv")?;
        write_occurrences(
            &mut w,
            records.iter().zip(&kept).map(|(r, o)| (r.id.as_str(), o.as_slice())),
        )?;
        w.flush()?;
    }

    // model B
    let train_b: Vec<SentenceRecord> = train_idx.iter().map(|&i| records_b[i].clone()).collect();
    let model_b = in_stage("train-b", train(&train_b, config.smoothing))?;
    in_stage(
        "train-b",
        create(out, "model_b.tsv").and_then(|mut w| {
            model_b.write_tsv(&mut w)?;
            Ok(w.flush()?)
        }),
    )?;

    // test data in both collapsed forms
    let test_b_tokens: Vec<(String, Vec<String>)> = test_idx
        .iter()
        .map(|&i| (records_b[i].id.clone(), records_b[i].tokens.clone()))
        .collect();
    let mut test_full_tokens = Vec::with_capacity(test_idx.len());
    let mut gold_b_full: DependencyCorpus = Vec::with_capacity(test_idx.len());
    for &i in &test_idx {
        let r = &records[i];
        let (toks, _) = collapse_tokens(&r.tokens, &occurrences[i]).map_err(|e| e.in_stage("collapse", Some(&r.id)))?;
        let deps = collapse_all_dependencies(&gold_a_all[i].1, &r.tokens, &occurrences[i])
            .map_err(|e| e.in_stage("collapse", Some(&r.id)))?;
        test_full_tokens.push((r.id.clone(), toks));
        gold_b_full.push((r.id.clone(), deps));
    }
    write_token_file(out, "test_b.tokens", &test_b_tokens)?;
    write_token_file(out, "test_full.tokens", &test_full_tokens)?;
    write_deps(out, "gold_b_full.deps", &gold_b_full)?;

    let run_b = parse_all(&model_b, &test_b_tokens, mode);
    let run_b_full = parse_all(&model_b, &test_full_tokens, mode);
    let run_a_before = parse_all(&model_a, &test_b_tokens, mode);
    let run_a_before_full = parse_all(&model_a, &test_full_tokens, mode);
    write_deps(out, "out_b.deps", &run_b.deps)?;
    write_deps(out, "out_b_full.deps", &run_b_full.deps)?;
    write_deps(out, "out_a_before.deps", &run_a_before.deps)?;
    write_deps(out, "out_a_before_full.deps", &run_a_before_full.deps)?;
    write_treebank(create(out, "parsed_b.txt")?, &run_b.trees)?;

    // collapse after parsing
    let mut after: DependencyCorpus = Vec::with_capacity(test_idx.len());
    let mut after_full: DependencyCorpus = Vec::with_capacity(test_idx.len());
    for (n, &i) in test_idx.iter().enumerate() {
        let r = &records[i];
        let deps = &run_a.deps[n].1;
        let tag = |e: Error| e.in_stage("collapse-output", Some(&r.id));
        after.push((
            r.id.clone(),
            collapse_all_dependencies(deps, &r.tokens, &kept[i]).map_err(tag)?,
        ));
        after_full.push((
            r.id.clone(),
            collapse_all_dependencies(deps, &r.tokens, &occurrences[i]).map_err(tag)?,
        ));
    }
    write_deps(out, "out_a_after.deps", &after)?;
    write_deps(out, "out_a_after_full.deps", &after_full)?;

    // combine
    let mut combined: Vec<(Scheme, DependencyCorpus, DependencyCorpus)> = Vec::new();
    for &scheme in &config.schemes {
        let mut gold_test = Vec::with_capacity(test_idx.len());
        let mut full_test = Vec::with_capacity(test_idx.len());
        for (n, &i) in test_idx.iter().enumerate() {
            let r = &records[i];
            let a = &run_a.deps[n].1;
            let tag = |e: Error| e.in_stage("combine", Some(&r.id));
            gold_test.push((
                r.id.clone(),
                combine_models(a, &run_b.deps[n].1, &r.tokens, &kept[i], scheme).map_err(tag)?,
            ));
            full_test.push((
                r.id.clone(),
                combine_models(a, &run_b_full.deps[n].1, &r.tokens, &occurrences[i], scheme).map_err(tag)?,
            ));
        }
        write_deps(out, &format!("combined_{}.deps", scheme), &gold_test)?;
        write_deps(out, &format!("combined_full_{}.deps", scheme), &full_test)?;
        combined.push((scheme, gold_test, full_test));
    }

    // evaluate
    let gold_a: DependencyCorpus = test_idx.iter().map(|&i| gold_a_all[i].clone()).collect();
    let gold_b: DependencyCorpus = test_idx.iter().map(|&i| gold_b_all[i].clone()).collect();
    let mut rows = Vec::new();
    let mut add =
        |table: usize, model: &str, setting: &str, sys: &DependencyCorpus, gold: &DependencyCorpus| -> Result<()> {
            let report = in_stage("eval", score(sys, gold, false))?;
            rows.push(ReportRow {
                table,
                model: model.to_string(),
                setting: setting.to_string(),
                report,
            });
            Ok(())
        };
    add(1, "A", "gold test", &after, &gold_b)?;
    add(1, "B", "gold test", &run_b.deps, &gold_b)?;
    add(1, "A", "fully collapsed test", &after_full, &gold_b_full)?;
    add(1, "B", "fully collapsed test", &run_b_full.deps, &gold_b_full)?;
    add(2, "A", "before parsing (siblings)", &run_a_before.deps, &gold_b)?;
    add(2, "A", "after parsing (siblings)", &after, &gold_b)?;
    add(2, "A", "before parsing (all)", &run_a_before_full.deps, &gold_b_full)?;
    add(2, "A", "after parsing (all)", &after_full, &gold_b_full)?;
    add(3, "A", "", &run_a.deps, &gold_a)?;
    add(4, "A", "", &run_a.deps, &gold_a)?;
    for (scheme, gold_test, full_test) in &combined {
        add(3, "A+B", &scheme.to_string(), gold_test, &gold_a)?;
        add(4, "A+B", &scheme.to_string(), full_test, &gold_a)?;
    }

    // significance
    let mut significance = Vec::new();
    let find = |table: usize, model: &str, setting: &str| -> &ReportRow {
        rows.iter()
            .find(|r| r.table == table && r.model == model && r.setting == setting)
            .expect("row added above")
    };
    let mut pairs: Vec<(usize, RowKey, RowKey)> = vec![
        (1, ("B", "gold test"), ("A", "gold test")),
        (1, ("B", "fully collapsed test"), ("A", "fully collapsed test")),
        (2, ("A", "before parsing (siblings)"), ("A", "after parsing (siblings)")),
        (2, ("A", "before parsing (all)"), ("A", "after parsing (all)")),
    ];
    let names: Vec<String> = config.schemes.iter().map(Scheme::to_string).collect();
    for name in &names {
        pairs.push((3, ("A+B", name), ("A", "")));
        pairs.push((4, ("A+B", name), ("A", "")));
    }
    let label = |(m, s): (&str, &str)| {
        if s.is_empty() {
            m.to_string()
        } else {
            format!("{} [{}]", m, s)
        }
    };
    for (table, x, y) in pairs {
        let (rx, ry) = (find(table, x.0, x.1), find(table, y.0, y.1));
        let cx: Vec<Counts> = rx.report.per_sentence.iter().map(|(_, c)| *c).collect();
        let cy: Vec<Counts> = ry.report.per_sentence.iter().map(|(_, c)| *c).collect();
        let r = in_stage("sigtest", sig_test(&cx, &cy, config.iterations, config.seed, mode))?;
        significance.push(SigRow {
            table,
            better: label(x),
            worse: label(y),
            observed: r.observed,
            p_value: r.p_value,
        });
    }

    for r in &rows {
        let name = format!(
            "counts_t{}_{}.tsv",
            r.table,
            slug(&format!("{} {}", r.model.replace('+', "plus"), r.setting))
        );
        let mut w = create(out, &name)?;
        write_counts(&mut w, &r.report.per_sentence)?;
        w.flush()?;
    }

    let report = ExperimentReport {
        recognizer: format!("{} ({})", config.recognizer_name, config.recognizer),
        split_sizes: (train_idx.len(), dev_idx.len(), test_idx.len()),
        stats,
        parse_failures: vec![
            ("model A, original test".into(), run_a.failed, test_idx.len()),
            ("model B, gold sibling test".into(), run_b.failed, test_idx.len()),
            (
                "model B, fully collapsed test".into(),
                run_b_full.failed,
                test_idx.len(),
            ),
            ("model A, gold sibling test".into(), run_a_before.failed, test_idx.len()),
            (
                "model A, fully collapsed test".into(),
                run_a_before_full.failed,
                test_idx.len(),
            ),
        ],
        rows,
        significance,
        iterations: config.iterations,
    };
    let mut w = create(out, "report.tsv")?;
    report.write_tsv(&mut w)?;
    w.flush()?;
    fs::write(out.join("summary.txt"), report.summary())?;
    Ok(report)
}
