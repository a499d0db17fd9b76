//! Acceptance checks. Each criterion prints one PASS / FAIL / NOT RUN line.
//!
//! Checks that need the real StackExchange dumps read them from
//! `$CQA_DUMP_DIR/<domain>/Posts.xml` and report NOT RUN when it is unset.

mod common;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Cursor};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use common::*;
use cqatag::analytics::{
    all_positional_profiles, build_cooccurrence, compute_domain_stats, compute_domain_stats_with,
    pair_post_coverage, stability_report, top_n_post_coverage, DomainStats, TagFrequencyTable,
};
use cqatag::baselines::{majority_predictions, predict_corpus, train_baseline, FeatureConfig, SgdConfig, Weighting};
use cqatag::config::DOMAINS;
use cqatag::decoder::{assemble_tags, decode_post, MergeOptions, ScoredTag, Token, TokenStream};
use cqatag::eval::{gold_from_corpus, hit_at_all_k, hit_at_k, normalize_tag, wilcoxon_one_sided, GoldTags};
use cqatag::ingest::{ingest_posts, split_corpus, DomainCorpus, SplitPart, DEFAULT_RATIOS};
use cqatag::predictions::{Prediction, PredictionSet, Source};
use cqatag::rng::SeededRng;

enum Status {
    Pass(String),
    Fail(String),
    NotRun(String),
}

struct Criterion {
    name: &'static str,
    status: Status,
}

/// `(domain, #Q, #T, PPT, AvgT, askers, QPA)` as published.
const REFERENCE_STATS: [(&str, u64, u64, f64, f64, u64, f64); 17] = [
    ("askubuntu", 371800, 3121, 119.13, 2.78, 201912, 1.84),
    ("aviation", 20345, 1002, 20.30, 2.56, 7066, 2.88),
    ("biology", 25671, 739, 34.74, 2.58, 12089, 2.12),
    ("chemistry", 37476, 375, 99.94, 2.37, 17202, 2.18),
    ("cooking", 24513, 833, 29.43, 2.30, 12413, 1.97),
    ("electronics", 152980, 2226, 68.72, 2.77, 61869, 2.47),
    ("history", 12562, 813, 15.45, 2.84, 5296, 2.37),
    ("money", 32648, 995, 32.81, 3.11, 18010, 1.81),
    ("movies", 20749, 4348, 4.77, 2.09, 6931, 2.99),
    ("music", 20925, 512, 40.87, 2.52, 10447, 2.00),
    ("philosophy", 15624, 559, 27.95, 2.40, 6640, 2.35),
    ("physics", 180166, 893, 201.75, 3.17, 59774, 3.01),
    ("politics", 12416, 739, 16.80, 2.90, 3970, 3.13),
    ("rpg", 42693, 1195, 35.73, 2.91, 11541, 3.70),
    ("scifi", 62987, 3433, 18.35, 2.25, 22717, 2.77),
    ("serverfault", 299895, 3814, 78.63, 2.90, 130214, 2.30),
    ("travel", 42201, 1891, 22.32, 3.28, 24895, 1.70),
];

/// `(domain, Majority, TF-IDF, Bag-of-Words)` Hit@5 as published.
const REFERENCE_HIT5: [(&str, f64, f64, f64); 17] = [
    ("askubuntu", 24.84, 59.76, 71.25),
    ("aviation", 35.05, 55.12, 65.58),
    ("biology", 37.94, 54.91, 64.79),
    ("chemistry", 48.89, 58.76, 68.09),
    ("cooking", 29.04, 70.28, 71.69),
    ("electronics", 20.68, 57.80, 70.12),
    ("history", 34.67, 58.93, 59.29),
    ("money", 55.96, 75.54, 79.70),
    ("movies", 54.99, 60.80, 64.57),
    ("music", 47.91, 68.15, 74.26),
    ("philosophy", 48.93, 62.71, 64.06),
    ("physics", 39.98, 66.81, 79.59),
    ("politics", 64.16, 81.50, 83.37),
    ("rpg", 76.66, 75.79, 82.71),
    ("scifi", 62.24, 80.48, 85.88),
    ("serverfault", 29.84, 62.83, 73.07),
    ("travel", 48.31, 76.82, 83.73),
];

const ASKUBUNTU_COVERAGE: [(usize, f64); 3] = [(1, 5.67), (10, 40.21), (100, 82.68)];
const MONEY_TOP1_PAIR: f64 = 10.39;
const MONEY_SINGLE_TAG: f64 = 10.51;
const BOOT_GRUB2: (u64, u64) = (5841, 4);
const RPG_STABILITY_99: (f64, f64) = (13.81, 15.06);

// ---------------------------------------------------------------- dumps

/// Everything the dump-backed criteria need from one domain.
struct DumpResult {
    stats: DomainStats,
    coverage: Vec<(usize, f64)>,
    top1_pair: f64,
    single_tag: f64,
    boot_grub2: Option<(u64, u64)>,
    stability_99: (f64, f64),
    majority_hit5: f64,
    linear_hit5: Option<(f64, f64)>,
}

fn dump_dir() -> Option<PathBuf> {
    std::env::var_os("CQA_DUMP_DIR").map(PathBuf::from)
}

fn run_dump(dir: &Path, domain: &str, with_linear: bool) -> Option<DumpResult> {
    let path = dir.join(domain).join("Posts.xml");
    let file = File::open(&path).ok()?;
    let (c, _) = ingest_posts(BufReader::new(file), domain).expect("dump parses");
    let stats = compute_domain_stats(&c).expect("dump has questions");
    let freq = TagFrequencyTable::from_corpus(&c);
    let coverage = ASKUBUNTU_COVERAGE
        .iter()
        .map(|&(n, _)| (n, top_n_post_coverage(&freq, &c, n)))
        .collect();
    let co = build_cooccurrence(&c);
    let pc = pair_post_coverage(&co, &c, 1);
    let boot_grub2 = co
        .ordering_preference("boot", "grub2")
        .ok()
        .map(|o| (o.forward, o.backward));
    let st = stability_report(&c, &[vec![1, 2], vec![3, 4, 5]], 99.0).unwrap();

    let split = split_corpus(&c, DEFAULT_RATIOS, 0).unwrap();
    let train = split.part(&c, SplitPart::Train);
    let test = split.part(&c, SplitPart::Test);
    let gold = gold_from_corpus(&test);
    let maj = majority_predictions(&train, &test.question_ids(), 5).unwrap();
    let majority_hit5 = hit_at_k(&maj, &gold, 5).unwrap().pct;

    let linear_hit5 = with_linear.then(|| {
        let run = |w: Weighting| {
            let model = train_baseline(&train, &FeatureConfig::with_weighting(w), &SgdConfig::default())
                .expect("baseline trains");
            let preds = predict_corpus(&model, &test, 5).unwrap();
            hit_at_k(&preds, &gold, 5).unwrap().pct
        };
        (run(Weighting::TfIdf), run(Weighting::Counts))
    });

    Some(DumpResult {
        stats,
        coverage,
        top1_pair: pc.coverage,
        single_tag: pc.single_tag,
        boot_grub2,
        stability_99: (st.st_for(&[1, 2]).unwrap(), st.st_for(&[3, 4, 5]).unwrap()),
        majority_hit5,
        linear_hit5,
    })
}

fn load_dumps() -> Option<BTreeMap<&'static str, DumpResult>> {
    let dir = dump_dir()?;
    let with_linear = std::env::var_os("CQA_SKIP_LINEAR").is_none();
    let mut out = BTreeMap::new();
    for d in DOMAINS {
        if let Some(r) = run_dump(&dir, d, with_linear) {
            out.insert(d, r);
        }
    }
    Some(out)
}

const NO_DUMPS: &str = "CQA_DUMP_DIR not set";

fn missing(dumps: &BTreeMap<&str, DumpResult>, need: &[&str]) -> Option<String> {
    let absent: Vec<&str> = need.iter().copied().filter(|d| !dumps.contains_key(d)).collect();
    (!absent.is_empty()).then(|| format!("dumps missing for {}", absent.join(", ")))
}

fn domain_stats_full(dumps: Option<&BTreeMap<&str, DumpResult>>) -> Status {
    let Some(dumps) = dumps else {
        return Status::NotRun(NO_DUMPS.into());
    };
    if let Some(m) = missing(dumps, &["askubuntu"]) {
        return Status::NotRun(m);
    }
    if dumps.len() < 4 {
        return Status::NotRun(format!("{} domain dumps present, 4 needed", dumps.len()));
    }
    let mut bad = Vec::new();
    for (d, q, t, ppt, avg, _askers, qpa) in REFERENCE_STATS {
        let Some(r) = dumps.get(d) else { continue };
        let s = &r.stats;
        let ok = s.q_count == q
            && s.tag_count == t
            && approx(s.ppt, ppt, 0.01)
            && approx(s.avg_tags, avg, 0.01)
            && approx(s.qpa, qpa, 0.01);
        if !ok {
            bad.push(format!(
                "{d}: Q={} T={} PPT={:.2} AvgT={:.2} QPA={:.2}",
                s.q_count, s.tag_count, s.ppt, s.avg_tags, s.qpa
            ));
        }
    }
    if bad.is_empty() {
        Status::Pass(format!("{} domains match", dumps.len()))
    } else {
        Status::Fail(bad.join("; "))
    }
}

fn coverage_full(dumps: Option<&BTreeMap<&str, DumpResult>>) -> Status {
    let Some(dumps) = dumps else {
        return Status::NotRun(NO_DUMPS.into());
    };
    if let Some(m) = missing(dumps, &["askubuntu", "money"]) {
        return Status::NotRun(m);
    }
    let a = &dumps["askubuntu"];
    let m = &dumps["money"];
    let mut bad = Vec::new();
    for (&(n, want), &(_, got)) in ASKUBUNTU_COVERAGE.iter().zip(&a.coverage) {
        if !approx(got, want, 0.01) {
            bad.push(format!("askubuntu Top{n} {got:.2} vs {want}"));
        }
    }
    if !approx(m.top1_pair, MONEY_TOP1_PAIR, 0.01) {
        bad.push(format!("money top-1 pair {:.2}", m.top1_pair));
    }
    if !approx(m.single_tag, MONEY_SINGLE_TAG, 0.01) {
        bad.push(format!("money single-tag {:.2}", m.single_tag));
    }
    if bad.is_empty() {
        Status::Pass("askubuntu Top1/10/100 and money pair/single-tag match".into())
    } else {
        Status::Fail(bad.join("; "))
    }
}

fn ordering_full(dumps: Option<&BTreeMap<&str, DumpResult>>) -> Status {
    let Some(dumps) = dumps else {
        return Status::NotRun(NO_DUMPS.into());
    };
    if let Some(m) = missing(dumps, &["askubuntu"]) {
        return Status::NotRun(m);
    }
    match dumps["askubuntu"].boot_grub2 {
        Some(fb) if fb == BOOT_GRUB2 => {
            let pct = 100.0 * fb.0 as f64 / (fb.0 + fb.1) as f64;
            Status::Pass(format!("(boot, grub2) {} of {} = {:.2}%", fb.0, fb.0 + fb.1, pct))
        }
        Some(fb) => Status::Fail(format!("(boot, grub2) forward/backward = {fb:?}")),
        None => Status::Fail("(boot, grub2) never co-occur".into()),
    }
}

fn stability_full(dumps: Option<&BTreeMap<&str, DumpResult>>) -> Status {
    let Some(dumps) = dumps else {
        return Status::NotRun(NO_DUMPS.into());
    };
    if let Some(m) = missing(dumps, &["rpg"]) {
        return Status::NotRun(m);
    }
    let (a, b) = dumps["rpg"].stability_99;
    if approx(a, RPG_STABILITY_99.0, 0.05) && approx(b, RPG_STABILITY_99.1, 0.05) {
        Status::Pass(format!("rpg ST12={a:.2} ST345={b:.2}"))
    } else {
        Status::Fail(format!("rpg ST12={a:.2} ST345={b:.2}"))
    }
}

fn majority_full(dumps: Option<&BTreeMap<&str, DumpResult>>) -> Status {
    let Some(dumps) = dumps else {
        return Status::NotRun(format!("{NO_DUMPS}; fixture guard: {}", majority_guard()));
    };
    if let Some(m) = missing(dumps, &DOMAINS) {
        return Status::NotRun(m);
    }
    let bad: Vec<String> = REFERENCE_HIT5
        .iter()
        .filter_map(|&(d, want, _, _)| {
            let got = dumps[d].majority_hit5;
            (!approx(got, want, 1.0)).then(|| format!("{d} {got:.2} vs {want}"))
        })
        .collect();
    if bad.is_empty() {
        Status::Pass("17/17 domains within 1.0".into())
    } else {
        Status::Fail(bad.join("; "))
    }
}

fn linear_full(dumps: Option<&BTreeMap<&str, DumpResult>>) -> Status {
    let Some(dumps) = dumps else {
        return Status::NotRun(format!("{NO_DUMPS}; fixture guard: {}", linear_guard()));
    };
    if let Some(m) = missing(dumps, &DOMAINS) {
        return Status::NotRun(m);
    }
    if dumps.values().any(|r| r.linear_hit5.is_none()) {
        return Status::NotRun("CQA_SKIP_LINEAR set".into());
    }
    let mut tfidf_ok = 0;
    let mut bow_ok = 0;
    let mut ordered = 0;
    for &(d, _, tf, bw) in &REFERENCE_HIT5 {
        let (t, b) = dumps[d].linear_hit5.unwrap();
        tfidf_ok += approx(t, tf, 3.0) as usize;
        bow_ok += approx(b, bw, 3.0) as usize;
        ordered += (b > t) as usize;
    }
    let msg = format!(
        "tf-idf within 3.0 on {tfidf_ok}/17, bag-of-words on {bow_ok}/17, bag-of-words ahead on {ordered}/17 (seed 0 only)"
    );
    if tfidf_ok >= 5 && bow_ok >= 5 && ordered >= 14 {
        Status::Pass(msg)
    } else {
        Status::Fail(msg)
    }
}

// ---------------------------------------------------------------- fixtures

fn domain_stats_fixture() -> Status {
    for seed in 0..200 {
        let rows = random_rows(&mut SeededRng::new(seed), 100);
        let (c, _) = ingest_posts(Cursor::new(xml_document(&rows)), "fixture").unwrap();
        for threshold in [0, 100] {
            let o = stats_oracle(&rows, threshold);
            let s = compute_domain_stats_with(&c, threshold).unwrap();
            let same = s.q_count == o.q
                && s.tag_count == o.t
                && s.views_gt_threshold == o.views_gt
                && s.askers == o.askers
                && s.ppt == o.ppt
                && s.avg_tags == o.avg_t
                && s.qpa == o.qpa;
            if !same {
                return Status::Fail(format!("seed {seed}: {s:?} vs {o:?}"));
            }
        }
    }
    Status::Pass("200 synthetic 100-question dumps equal the row-level oracle".into())
}

fn stability_fixture() -> Status {
    let sets = [vec![1, 2], vec![3, 4, 5]];
    for seed in 0..200 {
        let c = random_corpus(&mut SeededRng::new(seed), 100, 30);
        for delta in [80.0, 90.0, 99.0] {
            let r = stability_report(&c, &sets, delta).unwrap();
            for set in &sets {
                let (stable, universe) = stability_oracle(&c, set, delta);
                if r.q_for(set) != Some(&stable) || r.universe != universe {
                    return Status::Fail(format!("seed {seed} delta {delta} set {set:?}"));
                }
            }
        }
    }
    Status::Pass("stable sets equal the membership oracle on 200 corpora x 3 thresholds".into())
}

fn majority_guard() -> String {
    let c = random_corpus(&mut SeededRng::new(5), 400, 40);
    let split = split_corpus(&c, DEFAULT_RATIOS, 0).unwrap();
    let train = split.part(&c, SplitPart::Train);
    let test = split.part(&c, SplitPart::Test);
    let top: Vec<String> = ranked_tags(&train).into_iter().take(5).map(|x| x.0).collect();
    let expect = test.questions.iter().filter(|q| q.tags.iter().any(|t| top.contains(t))).count();
    let preds = majority_predictions(&train, &test.question_ids(), 5).unwrap();
    let got = hit_at_k(&preds, &gold_from_corpus(&test), 5).unwrap();
    if got.hits == expect {
        format!("ok ({:.2}% on synthetic corpus)", got.pct)
    } else {
        panic!("majority Hit@5 {} != oracle {expect}", got.hits)
    }
}

fn linear_guard() -> String {
    let topics: [(&str, &str); 6] = [
        ("visa", "passport visa embassy application stamp"),
        ("trains", "railway ticket platform rail pass"),
        ("flights", "airline airport boarding layover luggage"),
        ("hotels", "booking room checkin reception hostel"),
        ("food", "restaurant dish tipping menu street"),
        ("money", "currency exchange atm card cash"),
    ];
    let mut rng = SeededRng::new(9);
    let posts: Vec<_> = (0..300)
        .map(|id| {
            let (tag, words) = topics[rng.below(6) as usize];
            let w: Vec<&str> = words.split(' ').collect();
            let (other, _) = topics[rng.below(6) as usize];
            let mut q = question(id, &[tag, other]);
            q.title = format!("{} {} question", w[rng.below(5) as usize], w[rng.below(5) as usize]);
            q.body = format!("<p>about {} and {}</p>", w[rng.below(5) as usize], w[rng.below(5) as usize]);
            q
        })
        .collect();
    let c = corpus(posts);
    let split = split_corpus(&c, DEFAULT_RATIOS, 0).unwrap();
    let train = split.part(&c, SplitPart::Train);
    let test = split.part(&c, SplitPart::Test);
    let gold = gold_from_corpus(&test);
    let maj = hit_at_k(&majority_predictions(&train, &test.question_ids(), 1).unwrap(), &gold, 1)
        .unwrap()
        .pct;
    let mut out = Vec::new();
    for w in [Weighting::TfIdf, Weighting::Counts] {
        let m = train_baseline(&train, &FeatureConfig::with_weighting(w), &SgdConfig::default()).unwrap();
        let h1 = hit_at_k(&predict_corpus(&m, &test, 5).unwrap(), &gold, 1).unwrap().pct;
        assert!(h1 > maj, "{w:?} Hit@1 {h1} not above majority {maj}");
        out.push(format!("{w:?} Hit@1 {h1:.1}"));
    }
    format!("ok ({} vs majority {maj:.1} on synthetic corpus)", out.join(", "))
}

// ---------------------------------------------------------------- wilcoxon

/// Number of sign assignments of ranks 1..=n with each W+ value: coefficients of prod (1 + q^i).
fn null_counts(n: usize) -> Vec<u64> {
    let mut c = vec![1u64];
    for i in 1..=n {
        let mut next = vec![0u64; c.len() + i];
        for (w, &v) in c.iter().enumerate() {
            next[w] += v;
            next[w + i] += v;
        }
        c = next;
    }
    c
}

fn wilcoxon() -> Status {
    let zeros = [0.0; 5];
    let up = [1.0, 2.0, 3.0, 4.0, 5.0];
    let p = wilcoxon_one_sided(&zeros, &up).unwrap().p_value;
    if p != 0.03125 {
        return Status::Fail(format!("all-positive p = {p}"));
    }
    let p = wilcoxon_one_sided(&up, &up).unwrap().p_value;
    if p != 1.0 {
        return Status::Fail(format!("all-zero p = {p}"));
    }
    // Every published five-run p-value is reachable by some sign pattern.
    for want in [0.03125, 0.15625, 0.09375, 0.40625, 0.5, 1.0] {
        let reachable = (0u32..32).any(|mask| {
            let y: Vec<f64> = (0..5)
                .map(|i| if mask >> i & 1 == 1 { (i + 1) as f64 } else { -((i + 1) as f64) })
                .collect();
            wilcoxon_one_sided(&zeros, &y).unwrap().p_value == want
        }) || want == 1.0;
        if !reachable {
            return Status::Fail(format!("p = {want} unreachable with five runs"));
        }
    }
    for n in 1..=10usize {
        let counts = null_counts(n);
        let total = 1u64 << n;
        let x = vec![0.0; n];
        for mask in 0u32..(1 << n) {
            let y: Vec<f64> = (0..n)
                .map(|i| if mask >> i & 1 == 1 { (i + 1) as f64 } else { -((i + 1) as f64) })
                .collect();
            let w: usize = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).sum();
            let tail: u64 = counts[w..].iter().sum();
            let expect = tail as f64 / total as f64;
            let r = wilcoxon_one_sided(&x, &y).unwrap();
            if (r.p_value - expect).abs() > 1e-12 || r.w_plus != w as f64 {
                return Status::Fail(format!("n={n} mask={mask:b}: p {} vs {expect}", r.p_value));
            }
        }
    }
    Status::Pass("0.03125 / 1.0 exact; all 2^n sign patterns for n <= 10 match the generating function".into())
}

// ---------------------------------------------------------------- decoder

const TOKEN_TEXTS: [&str; 20] = [
    "grub", "2", "Boot", "-", "-x", "y-", " ", "  dual", "boot ", "?", "!!", "...", "ab c", "", ",", "Linux", "\t",
    "a-b", "X", "-",
];

fn random_stream(rng: &mut SeededRng, post_id: i64) -> TokenStream {
    let len = rng.below(30) as usize;
    let tokens = (0..len)
        .map(|_| {
            let p = if rng.below(20) == 0 { 0.0 } else { rng.next_f64() };
            match rng.below(10) {
                0..=2 => Token::separator(p),
                3 => Token::word(".", p),
                _ => Token::word(TOKEN_TEXTS[rng.below(TOKEN_TEXTS.len() as u64) as usize], p),
            }
        })
        .collect();
    TokenStream::new(post_id, tokens)
}

fn random_meta(rng: &mut SeededRng) -> Vec<ScoredTag> {
    (0..rng.below(7))
        .map(|_| ScoredTag {
            tag: ["boot", "grub2", "dual-boot", "linux", "x"][rng.below(5) as usize].into(),
            score: rng.next_f64(),
        })
        .collect()
}

fn decoder_suite() -> Status {
    let mut rng = SeededRng::new(2024);
    let opts = MergeOptions::default();
    if (opts.n_meta, opts.n_refined) != (2, 3) {
        return Status::Fail(format!("default merge is {opts:?}"));
    }
    let mut tags_seen = 0usize;
    for id in 0..10_000 {
        let stream = random_stream(&mut rng, id);
        let assembled = assemble_tags(&stream);
        for t in &assembled {
            tags_seen += 1;
            let bad = t.text.is_empty()
                || t.text.starts_with('-')
                || t.text.ends_with('-')
                || t.text.chars().any(char::is_whitespace)
                || t.text != t.text.to_lowercase();
            if bad {
                return Status::Fail(format!("stream {id}: tag {:?} breaks the hyphen rule", t.text));
            }
        }
        if let Some(w) = assembled.windows(2).find(|w| w[0].text == w[1].text) {
            return Status::Fail(format!("stream {id}: adjacent duplicate {:?}", w[0].text));
        }
        let meta = random_meta(&mut rng);
        for backfill in [false, true] {
            let set = decode_post(&meta, &stream, MergeOptions { backfill, ..opts }).unwrap();
            let mut uniq: Vec<&str> = set.tag_strs().collect();
            uniq.sort_unstable();
            uniq.dedup();
            if set.len() > 5 || uniq.len() != set.len() {
                return Status::Fail(format!("stream {id}: merged set {:?}", set.tags));
            }
        }
    }
    Status::Pass(format!("10000 streams, {tags_seen} assembled tags, no violations"))
}

// ---------------------------------------------------------------- hit@k and phi

fn random_predictions(rng: &mut SeededRng, c: &DomainCorpus, pool: &[String]) -> Vec<PredictionSet> {
    c.questions
        .iter()
        .map(|q| {
            let mut tags: Vec<Prediction> = Vec::new();
            for _ in 0..rng.below(6) {
                let mut t = pool[rng.below(pool.len() as u64) as usize].clone();
                if rng.below(4) == 0 {
                    t = format!(" {} ", t.to_uppercase());
                }
                if tags.iter().all(|p| p.tag != t) {
                    tags.push(Prediction {
                        tag: t,
                        score: 1.0 / (tags.len() + 1) as f64,
                        source: Source::Baseline,
                    });
                }
            }
            PredictionSet::new(q.id, tags).unwrap()
        })
        .collect()
}

fn hit_oracle(preds: &[PredictionSet], gold: &GoldTags, k: usize) -> f64 {
    let mut hits = 0;
    let mut n = 0;
    for p in preds {
        let g: Vec<String> = gold[&p.post_id].iter().map(|t| t.trim().to_lowercase()).collect();
        if g.is_empty() {
            continue;
        }
        n += 1;
        if p.tags.iter().take(k).any(|t| g.contains(&t.tag.trim().to_lowercase())) {
            hits += 1;
        }
    }
    if n == 0 {
        0.0
    } else {
        100.0 * hits as f64 / n as f64
    }
}

fn hit_and_phi() -> Status {
    let mut rng = SeededRng::new(77);
    for i in 0..1000 {
        let n = 1 + rng.below(60) as usize;
        let pool_size = 1 + rng.below(25) as usize;
        let c = random_corpus(&mut rng, n, pool_size);
        let gold = gold_from_corpus(&c);
        let preds = random_predictions(&mut rng, &c, &tag_pool(pool_size + 3));
        let h = hit_at_all_k(&preds, &gold).unwrap();
        for k in 1..=5 {
            if h[k - 1].pct != hit_oracle(&preds, &gold, k) {
                return Status::Fail(format!("corpus {i}: Hit@{k} disagrees with oracle"));
            }
            if k > 1 && h[k - 1].pct < h[k - 2].pct {
                return Status::Fail(format!("corpus {i}: Hit@{k} < Hit@{}", k - 1));
            }
        }
        for p in all_positional_profiles(&c).values() {
            let sum: f64 = p.phi.iter().sum();
            if (sum - 100.0).abs() > 1e-9 || p.phi.iter().any(|v| !(0.0..=100.0).contains(v)) {
                return Status::Fail(format!("corpus {i}: phi of {} sums to {sum}", p.tag));
            }
            if p.share(&[1, 2, 3, 4, 5]) != 100.0 {
                return Status::Fail(format!("corpus {i}: share over all positions of {} != 100", p.tag));
            }
        }
        let g = normalize_tag(&c.questions[0].tags[0]);
        if g != c.questions[0].tags[0] {
            return Status::Fail("stored tags are not normalized".into());
        }
    }
    Status::Pass("1000 corpora: Hit@k equals oracle and is monotone; phi sums to 100".into())
}

fn main() -> ExitCode {
    let dumps = load_dumps();
    let d = dumps.as_ref();
    let criteria = [
        Criterion { name: "domain statistics, askubuntu + 3 domains (dumps)", status: domain_stats_full(d) },
        Criterion { name: "domain statistics, 100-post oracle fixtures", status: domain_stats_fixture() },
        Criterion { name: "tag and tag-pair post coverage (dumps)", status: coverage_full(d) },
        Criterion { name: "(boot, grub2) ordering counts (dumps)", status: ordering_full(d) },
        Criterion { name: "rpg stability at delta 99 (dumps)", status: stability_full(d) },
        Criterion { name: "stability, membership oracle fixtures", status: stability_fixture() },
        Criterion { name: "majority baseline Hit@5 within 1.0 (dumps)", status: majority_full(d) },
        Criterion { name: "tf-idf / bag-of-words Hit@5 and ordering (dumps)", status: linear_full(d) },
        Criterion { name: "one-sided Wilcoxon exact p-values", status: wilcoxon() },
        Criterion { name: "decoder property suite, 10k streams", status: decoder_suite() },
        Criterion { name: "Hit@k monotonicity and phi normalization, 1k corpora", status: hit_and_phi() },
    ];
    let mut failed = false;
    for c in &criteria {
        let (tag, msg) = match &c.status {
            Status::Pass(m) => ("PASS", m),
            Status::Fail(m) => {
                failed = true;
                ("FAIL", m)
            }
            Status::NotRun(m) => ("NOT RUN", m),
        };
        println!("{tag:<8} {} :: {msg}", c.name);
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
