use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File};
use std::io::{BufReader, Read};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use cqatag::baselines::{majority_predictions, predict_corpus, train_baseline, OvrModel, Weighting};
use cqatag::config::PipelineConfig;
use cqatag::decoder::{decode_post, load_meta_predictions, load_token_streams, ScoredTag, TokenStream};
use cqatag::eval::{
    gold_from_corpus, head_contributions, hit_at_all_k, oov_stats, wilcoxon_one_sided, EvalReport, GoldTags,
    RunHits,
};
use cqatag::ingest::{ingest_posts, split_corpus, CorpusSplit, DomainCorpus, SplitPart};
use cqatag::predictions::{load_predictions, save_predictions, PredictionSet, PredictionsHeader, Source};
use cqatag::report::{analysis_tables, analyze_domain, eval_tables, write_report, DomainAnalysis, DomainEval, Significance};
use cqatag::rng::PRNG_NAME;
use cqatag::vocab::{build_meta_vocab, MetaVocab};
use cqatag::Error;

use crate::{Cli, Command, EvalArgs, IngestArgs, LinearMode, PredictArgs, PredictMode, TrainArgs, VocabArgs};

const ANALYSIS_JSON: &str = "analysis.json";
const EVAL_JSON: &str = "eval.json";

fn bad_arg(msg: impl Into<String>) -> anyhow::Error {
    Error::InvalidArgument(msg.into()).into()
}

struct Ctx {
    config: PipelineConfig,
}

impl Ctx {
    fn corpus_path(&self, domain: &str) -> PathBuf {
        self.config.domain_dir(domain).join("corpus.jsonl")
    }

    fn split_path(&self, domain: &str) -> PathBuf {
        self.config.domain_dir(domain).join("split.json")
    }

    fn model_path(&self, domain: &str, mode: LinearMode, seed: u64) -> PathBuf {
        self.config
            .domain_dir(domain)
            .join("models")
            .join(format!("{}_s{seed}.json", mode.name()))
    }

    fn predictions_dir(&self, domain: &str) -> PathBuf {
        self.config.domain_dir(domain).join("predictions")
    }

    fn vocab_path(&self, domain: &str, coverage: f64) -> PathBuf {
        self.config.domain_dir(domain).join(format!("vocab_{coverage}.json"))
    }

    fn reports_dir(&self, kind: &str) -> PathBuf {
        self.config.output_dir().join("reports").join(kind)
    }

    fn load_corpus(&self, domain: &str) -> Result<DomainCorpus> {
        let p = self.corpus_path(domain);
        DomainCorpus::load(&p).with_context(|| format!("loading {} (run `ingest` first)", p.display()))
    }

    fn load_split(&self, domain: &str) -> Result<CorpusSplit> {
        let p = self.split_path(domain);
        CorpusSplit::load(&p).with_context(|| format!("loading {}", p.display()))
    }

    fn load_part(&self, domain: &str, part: SplitPart) -> Result<(DomainCorpus, CorpusSplit)> {
        let corpus = self.load_corpus(domain)?;
        let split = self.load_split(domain)?;
        Ok((split.part(&corpus, part), split))
    }
}

fn load_config(cli: &Cli) -> Result<PipelineConfig> {
    let mut config = match &cli.config {
        Some(p) => PipelineConfig::load(p).with_context(|| format!("reading config {}", p.display()))?,
        None => PipelineConfig {
            base_dir: std::env::current_dir()?,
            ..PipelineConfig::default()
        },
    };
    if !cli.domains.is_empty() {
        config.domains = cli.domains.clone();
        config.overrides.retain(|d, _| cli.domains.contains(d));
    }
    if let Some(out) = &cli.out {
        config.output_dir = std::path::absolute(out)?;
    }
    Ok(config)
}

pub fn run(cli: Cli) -> Result<()> {
    let config = load_config(&cli)?;
    let require_dumps = matches!(cli.command, Command::Ingest(_));
    config.validate(require_dumps)?;
    if config.domains.is_empty() {
        warn!("no domains selected; nothing to do");
        return Ok(());
    }
    let ctx = Ctx { config };
    match cli.command {
        Command::Ingest(a) => ingest(&ctx, &a),
        Command::Analyze => analyze(&ctx),
        Command::Vocab(a) => vocab(&ctx, &a),
        Command::TrainBaseline(a) => train(&ctx, &a),
        Command::Predict(a) => predict(&ctx, &a),
        Command::Eval(a) => eval(&ctx, &a),
        Command::Report => report(&ctx),
    }
}

fn sha256_file(path: &Path) -> Result<String> {
    let mut f = File::open(path)?;
    let mut h = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = f.read(&mut buf)?;
        if n == 0 {
            break;
        }
        h.update(&buf[..n]);
    }
    Ok(h.finalize().iter().map(|b| format!("{b:02x}")).collect())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

#[derive(Serialize)]
struct IngestManifest<'a> {
    tool: &'static str,
    tool_version: &'static str,
    domain: &'a str,
    dump_sha256: String,
    corpus_sha256: String,
    split_sha256: String,
    seed: u64,
    ratios: [f64; 3],
    prng: &'static str,
    questions: usize,
    answers: usize,
    train: usize,
    dev: usize,
    test: usize,
}

fn ingest(ctx: &Ctx, args: &IngestArgs) -> Result<()> {
    ctx.config.domains.par_iter().try_for_each(|d| ingest_domain(ctx, d, args.seed))
}

fn ingest_domain(ctx: &Ctx, domain: &str, seed: Option<u64>) -> Result<()> {
    let dump = ctx.config.dump_path(domain);
    info!("{domain}: parsing {}", dump.display());
    let file = File::open(&dump).with_context(|| format!("opening {}", dump.display()))?;
    let (corpus, rejects) =
        ingest_posts(BufReader::new(file), domain).with_context(|| format!("ingesting {}", dump.display()))?;
    let seed = seed.unwrap_or_else(|| ctx.config.split_seed(domain));
    let split = split_corpus(&corpus, ctx.config.split.ratios, seed).with_context(|| format!("splitting {domain}"))?;

    let dir = ctx.config.domain_dir(domain);
    fs::create_dir_all(&dir)?;
    let corpus_path = ctx.corpus_path(domain);
    corpus.save(&corpus_path)?;
    write_json(&dir.join("rejects.json"), &rejects)?;
    split.save(&ctx.split_path(domain))?;
    let manifest = IngestManifest {
        tool: env!("CARGO_PKG_NAME"),
        tool_version: env!("CARGO_PKG_VERSION"),
        domain,
        dump_sha256: sha256_file(&dump)?,
        corpus_sha256: sha256_file(&corpus_path)?,
        split_sha256: split.manifest_hash(),
        seed,
        ratios: split.ratios,
        prng: PRNG_NAME,
        questions: corpus.questions.len(),
        answers: corpus.answers.len(),
        train: split.train.len(),
        dev: split.dev.len(),
        test: split.test.len(),
    };
    write_json(&dir.join("manifest.json"), &manifest)?;
    info!(
        "{domain}: {} questions, {} answers, {} rejected rows; split {}/{}/{}",
        manifest.questions,
        manifest.answers,
        rejects.rejected,
        manifest.train,
        manifest.dev,
        manifest.test
    );
    Ok(())
}

fn analyze(ctx: &Ctx) -> Result<()> {
    let rows: Vec<DomainAnalysis> = ctx
        .config
        .domains
        .par_iter()
        .map(|d| {
            let corpus = ctx.load_corpus(d)?;
            info!("{d}: analyzing {} questions", corpus.questions.len());
            Ok(analyze_domain(&corpus, &ctx.config.analysis, ctx.config.view_threshold(d))?)
        })
        .collect::<Result<_>>()?;
    let dir = ctx.reports_dir("analysis");
    let written = write_report(&dir, ANALYSIS_JSON, &rows, &analysis_tables(&rows))?;
    info!("wrote {} files to {}", written.len(), dir.display());
    Ok(())
}

fn vocab(ctx: &Ctx, args: &VocabArgs) -> Result<()> {
    let targets = if args.coverage.is_empty() {
        ctx.config.vocab.targets.clone()
    } else {
        args.coverage.clone()
    };
    ctx.config.domains.par_iter().try_for_each(|d| {
        let (train, split) = ctx.load_part(d, SplitPart::Train)?;
        let hash = split.manifest_hash();
        for &t in &targets {
            let v = build_meta_vocab(&train, t, &hash)?;
            let p = ctx.vocab_path(d, t);
            v.save(&p)?;
            info!("{d}: {} tags reach {:.2}% (target {t}%)", v.len(), v.achieved_coverage);
        }
        Ok(())
    })
}

fn seeds_of(ctx: &Ctx, seed: Option<u64>) -> Vec<u64> {
    match seed {
        Some(s) => vec![s],
        None => ctx.config.baseline.seeds.clone(),
    }
}

fn weighting(mode: LinearMode) -> Weighting {
    match mode {
        LinearMode::Tfidf => Weighting::TfIdf,
        LinearMode::Bow => Weighting::Counts,
    }
}

fn train(ctx: &Ctx, args: &TrainArgs) -> Result<()> {
    let features = ctx.config.baseline.features(weighting(args.mode));
    for d in &ctx.config.domains {
        let (train, _) = ctx.load_part(d, SplitPart::Train)?;
        for seed in seeds_of(ctx, args.seed) {
            info!("{d}: training {} seed {seed} on {} questions", args.mode.name(), train.questions.len());
            let model = train_baseline(&train, &features, &ctx.config.baseline.sgd(seed))?;
            let p = ctx.model_path(d, args.mode, seed);
            fs::create_dir_all(p.parent().expect("model path has a parent"))?;
            model.save(&p)?;
            info!(
                "{d}: {} features, {} classes -> {}",
                model.features.terms.len(),
                model.classes.len(),
                p.display()
            );
        }
    }
    Ok(())
}

fn predict(ctx: &Ctx, args: &PredictArgs) -> Result<()> {
    if !(1..=5).contains(&args.k) {
        return Err(bad_arg(format!("--k must lie in 1..=5, got {}", args.k)));
    }
    if args.mode != PredictMode::Decode && (args.meta.is_some() || args.streams.is_some()) {
        return Err(bad_arg("--meta and --streams only apply to --mode decode"));
    }
    for d in &ctx.config.domains {
        let out_dir = ctx.predictions_dir(d);
        fs::create_dir_all(&out_dir)?;
        match args.mode {
            PredictMode::Majority => {
                let corpus = ctx.load_corpus(d)?;
                let split = ctx.load_split(d)?;
                let train = split.part(&corpus, SplitPart::Train);
                let sets = majority_predictions(&train, &split.test, args.k)?;
                let header = PredictionsHeader::new("majority", d, args.seed);
                let name = match args.seed {
                    Some(s) => format!("majority_s{s}.jsonl"),
                    None => "majority.jsonl".to_string(),
                };
                save_predictions(&out_dir.join(&name), &header, &sets)?;
                info!("{d}: {} majority predictions -> {name}", sets.len());
            }
            PredictMode::Tfidf | PredictMode::Bow => {
                let mode = if args.mode == PredictMode::Tfidf {
                    LinearMode::Tfidf
                } else {
                    LinearMode::Bow
                };
                let (test, _) = ctx.load_part(d, SplitPart::Test)?;
                for seed in seeds_of(ctx, args.seed) {
                    let mp = ctx.model_path(d, mode, seed);
                    let model = OvrModel::load(&mp)
                        .with_context(|| format!("loading {} (run `train-baseline` first)", mp.display()))?;
                    let sets = predict_corpus(&model, &test, args.k)?;
                    let header = PredictionsHeader::new(mode.name(), d, Some(seed));
                    let name = format!("{}_s{seed}.jsonl", mode.name());
                    save_predictions(&out_dir.join(&name), &header, &sets)?;
                    info!("{d}: {} {} predictions -> {name}", sets.len(), mode.name());
                }
            }
            PredictMode::Decode => decode(ctx, d, args, &out_dir)?,
        }
    }
    Ok(())
}

fn decode(ctx: &Ctx, domain: &str, args: &PredictArgs, out_dir: &Path) -> Result<()> {
    let (Some(meta_path), Some(stream_path)) = (&args.meta, &args.streams) else {
        return Err(bad_arg("--mode decode needs --meta and --streams"));
    };
    if args.name.is_empty() || args.name.contains(['/', '\\']) {
        return Err(bad_arg(format!("invalid model name {:?}", args.name)));
    }
    let mut meta: BTreeMap<i64, Vec<ScoredTag>> = BTreeMap::new();
    for m in load_meta_predictions(meta_path)? {
        if meta.insert(m.post_id, m.tags).is_some() {
            return Err(Error::DuplicatePost(m.post_id).into());
        }
    }
    let mut streams: BTreeMap<i64, TokenStream> = BTreeMap::new();
    for s in load_token_streams(stream_path)? {
        let id = s.post_id;
        if streams.insert(id, s).is_some() {
            return Err(Error::DuplicatePost(id).into());
        }
    }
    let ids: BTreeSet<i64> = meta.keys().chain(streams.keys()).copied().collect();
    let opts = ctx.config.decode.merge_options();
    let sets = ids
        .into_iter()
        .map(|id| {
            let empty = TokenStream::new(id, Vec::new());
            let m = meta.get(&id).map(Vec::as_slice).unwrap_or(&[]);
            let mut set = decode_post(m, streams.get(&id).unwrap_or(&empty), opts)?;
            set.tags.truncate(args.k);
            Ok(set)
        })
        .collect::<Result<Vec<PredictionSet>>>()?;
    let mut header = PredictionsHeader::new(&args.name, domain, args.seed);
    header.metadata.insert("n_meta".into(), opts.n_meta.to_string());
    header.metadata.insert("n_refined".into(), opts.n_refined.to_string());
    header.metadata.insert("backfill".into(), opts.backfill.to_string());
    header.metadata.insert("refined_score".into(), cqatag::decoder::COMBINED_SCORE_RULE.into());
    let name = match args.seed {
        Some(s) => format!("{}_s{s}.jsonl", args.name),
        None => format!("{}.jsonl", args.name),
    };
    save_predictions(&out_dir.join(&name), &header, &sets)?;
    info!("{domain}: {} decoded predictions -> {name}", sets.len());
    Ok(())
}

struct Run {
    seed: u64,
    sets: Vec<PredictionSet>,
}

fn load_runs(ctx: &Ctx, domain: &str) -> Result<BTreeMap<String, Vec<Run>>> {
    let dir = ctx.predictions_dir(domain);
    let mut files: Vec<PathBuf> = match fs::read_dir(&dir) {
        Ok(entries) => entries
            .map(|e| e.map(|e| e.path()))
            .collect::<std::io::Result<Vec<_>>>()?
            .into_iter()
            .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
            .collect(),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
        Err(e) => return Err(e.into()),
    };
    files.sort();
    let mut runs: BTreeMap<String, Vec<Run>> = BTreeMap::new();
    for f in files {
        let (header, sets) = load_predictions(&f)?;
        if header.domain != domain {
            return Err(bad_arg(format!("{} holds predictions for {}", f.display(), header.domain)));
        }
        let seed = header.run_seed.unwrap_or(0);
        let model_runs = runs.entry(header.model).or_default();
        if model_runs.iter().any(|r| r.seed == seed) {
            return Err(bad_arg(format!("{}: duplicate run seed {seed}", f.display())));
        }
        model_runs.push(Run { seed, sets });
    }
    for r in runs.values_mut() {
        r.sort_by_key(|r| r.seed);
    }
    Ok(runs)
}

fn parse_compare(spec: &str) -> Result<(String, String)> {
    match spec.split_once(',') {
        Some((a, b)) if !a.is_empty() && !b.is_empty() && !b.contains(',') => Ok((a.into(), b.into())),
        _ => Err(bad_arg(format!("--compare expects BASELINE,CANDIDATE, got {spec:?}"))),
    }
}

fn eval(ctx: &Ctx, args: &EvalArgs) -> Result<()> {
    if !(1..=5).contains(&args.k) {
        return Err(bad_arg(format!("--k must lie in 1..=5, got {}", args.k)));
    }
    let pairs = args.compare.iter().map(|s| parse_compare(s)).collect::<Result<Vec<_>>>()?;
    let rows: Vec<DomainEval> = ctx
        .config
        .domains
        .par_iter()
        .map(|d| eval_domain(ctx, d, args, &pairs))
        .collect::<Result<_>>()?;
    let dir = ctx.reports_dir("eval");
    let written = write_report(&dir, EVAL_JSON, &rows, &eval_tables(&rows))?;
    info!("wrote {} files to {}", written.len(), dir.display());
    Ok(())
}

fn vocab_for(ctx: &Ctx, domain: &str, coverage: f64) -> Result<MetaVocab> {
    let p = ctx.vocab_path(domain, coverage);
    if p.is_file() {
        return Ok(MetaVocab::load(&p)?);
    }
    let (train, split) = ctx.load_part(domain, SplitPart::Train)?;
    Ok(build_meta_vocab(&train, coverage, &split.manifest_hash())?)
}

fn eval_domain(ctx: &Ctx, domain: &str, args: &EvalArgs, pairs: &[(String, String)]) -> Result<DomainEval> {
    let (test, _) = ctx.load_part(domain, SplitPart::Test)?;
    let gold: GoldTags = gold_from_corpus(&test);
    let runs = load_runs(ctx, domain)?;
    if runs.is_empty() {
        warn!("{domain}: no prediction files in {}", ctx.predictions_dir(domain).display());
    }
    let coverage = args.coverage.unwrap_or_else(|| ctx.config.coverage(domain));
    let vocab = vocab_for(ctx, domain, coverage)?;

    let mut reports = Vec::new();
    let mut oov = Vec::new();
    let mut heads = Vec::new();
    for (model, model_runs) in &runs {
        let hits = model_runs
            .iter()
            .map(|r| {
                let h = hit_at_all_k(&r.sets, &gold).with_context(|| format!("{domain}/{model} seed {}", r.seed))?;
                Ok(RunHits::from_hits(r.seed, &h))
            })
            .collect::<Result<Vec<_>>>()?;
        reports.push(EvalReport::new(domain, model, hits)?);
        let first = &model_runs[0].sets;
        oov.push((model.clone(), oov_stats(first, &gold, &vocab)?));
        let headed = first
            .iter()
            .flat_map(|s| &s.tags)
            .any(|p| matches!(p.source, Source::PHead | Source::GHead));
        if headed {
            heads.push((model.clone(), head_contributions(first, &gold)?));
        }
    }

    let mut significance = Vec::new();
    for (base, cand) in pairs {
        let (Some(b), Some(c)) = (
            reports.iter().find(|r| &r.model == base),
            reports.iter().find(|r| &r.model == cand),
        ) else {
            warn!("{domain}: skipping {base} vs {cand}; missing predictions");
            continue;
        };
        let n = b.runs.len().max(c.runs.len());
        // A single-run model (e.g. majority) is deterministic and is paired with every run of the other.
        let scores = |r: &EvalReport| -> Option<Vec<f64>> {
            let v: Vec<f64> = r.runs.iter().map(|r| r.hit[args.k - 1]).collect();
            match v.len() {
                1 => Some(vec![v[0]; n]),
                len if len == n => Some(v),
                _ => None,
            }
        };
        let (Some(x), Some(y)) = (scores(b), scores(c)) else {
            return Err(bad_arg(format!(
                "{domain}: {base} has {} runs but {cand} has {}",
                b.runs.len(),
                c.runs.len()
            )));
        };
        significance.push(Significance {
            baseline: base.clone(),
            candidate: cand.clone(),
            k: args.k,
            result: wilcoxon_one_sided(&x, &y)?,
        });
    }
    Ok(DomainEval {
        domain: domain.to_string(),
        reports,
        oov,
        heads,
        significance,
    })
}

fn report(ctx: &Ctx) -> Result<()> {
    let mut any = false;
    let analysis = ctx.reports_dir("analysis").join(ANALYSIS_JSON);
    if analysis.is_file() {
        let rows: Vec<DomainAnalysis> = serde_json::from_reader(BufReader::new(File::open(&analysis)?))
            .with_context(|| format!("reading {}", analysis.display()))?;
        write_report(&ctx.reports_dir("analysis"), ANALYSIS_JSON, &rows, &analysis_tables(&rows))?;
        any = true;
    }
    let eval = ctx.reports_dir("eval").join(EVAL_JSON);
    if eval.is_file() {
        let rows: Vec<DomainEval> = serde_json::from_reader(BufReader::new(File::open(&eval)?))
            .with_context(|| format!("reading {}", eval.display()))?;
        write_report(&ctx.reports_dir("eval"), EVAL_JSON, &rows, &eval_tables(&rows))?;
        any = true;
    }
    if !any {
        return Err(bad_arg(format!(
            "no {ANALYSIS_JSON} or {EVAL_JSON} under {}",
            ctx.config.output_dir().join("reports").display()
        )));
    }
    info!("regenerated tables under {}", ctx.config.output_dir().join("reports").display());
    Ok(())
}
