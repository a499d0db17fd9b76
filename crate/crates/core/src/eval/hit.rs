use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::ingest::{DomainCorpus, MAX_TAGS};
use crate::predictions::{PredictionSet, Source};
use crate::vocab::MetaVocab;

/// Gold tags per question id.
pub type GoldTags = BTreeMap<i64, Vec<String>>;

pub fn gold_from_corpus(corpus: &DomainCorpus) -> GoldTags {
    corpus.questions.iter().map(|q| (q.id, q.tags.clone())).collect()
}

pub fn normalize_tag(tag: &str) -> String {
    tag.trim().to_lowercase()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HitAtK {
    pub k: usize,
    /// Percentage of evaluated posts with a correct tag among the first `k`.
    pub pct: f64,
    pub hits: usize,
    pub evaluated: usize,
    /// Posts skipped because their gold set is empty.
    pub excluded_empty_gold: usize,
}

/// Gold and predictions joined per post, with tags normalized.
struct Aligned<'a> {
    rows: Vec<(BTreeSet<String>, &'a PredictionSet)>,
    excluded: usize,
}

fn align<'a>(predictions: &'a [PredictionSet], gold: &GoldTags) -> Result<Aligned<'a>> {
    let mut by_id: HashMap<i64, &PredictionSet> = HashMap::with_capacity(predictions.len());
    for p in predictions {
        if by_id.insert(p.post_id, p).is_some() {
            return Err(Error::PostMismatch(format!("post {} predicted twice", p.post_id)));
        }
        if !gold.contains_key(&p.post_id) {
            return Err(Error::PostMismatch(format!("post {} has predictions but no gold tags", p.post_id)));
        }
    }
    if by_id.len() != gold.len() {
        let missing = gold.keys().find(|id| !by_id.contains_key(id)).copied().unwrap_or_default();
        return Err(Error::PostMismatch(format!(
            "{} gold posts lack predictions (first: {missing})",
            gold.len() - by_id.len()
        )));
    }
    let mut rows = Vec::with_capacity(gold.len());
    let mut excluded = 0;
    for (id, tags) in gold {
        let g: BTreeSet<String> = tags.iter().map(|t| normalize_tag(t)).filter(|t| !t.is_empty()).collect();
        if g.is_empty() {
            excluded += 1;
            continue;
        }
        rows.push((g, by_id[id]));
    }
    Ok(Aligned { rows, excluded })
}

fn first_k_hit(gold: &BTreeSet<String>, preds: &PredictionSet, k: usize) -> bool {
    preds.tags.iter().take(k).any(|p| gold.contains(&normalize_tag(&p.tag)))
}

fn pct(n: usize, d: usize) -> f64 {
    if d == 0 {
        0.0
    } else {
        100.0 * n as f64 / d as f64
    }
}

fn check_k(k: usize) -> Result<()> {
    if !(1..=MAX_TAGS).contains(&k) {
        return Err(invalid(format!("k = {k} outside 1..={MAX_TAGS}")));
    }
    Ok(())
}

/// Percentage of posts whose first `k` predictions contain a gold tag.
pub fn hit_at_k(predictions: &[PredictionSet], gold: &GoldTags, k: usize) -> Result<HitAtK> {
    check_k(k)?;
    let a = align(predictions, gold)?;
    let hits = a.rows.iter().filter(|(g, p)| first_k_hit(g, p, k)).count();
    Ok(HitAtK {
        k,
        pct: pct(hits, a.rows.len()),
        hits,
        evaluated: a.rows.len(),
        excluded_empty_gold: a.excluded,
    })
}

/// Hit@1 through Hit@5 in one pass over the aligned posts.
pub fn hit_at_all_k(predictions: &[PredictionSet], gold: &GoldTags) -> Result<[HitAtK; MAX_TAGS]> {
    let a = align(predictions, gold)?;
    let mut hits = [0usize; MAX_TAGS];
    for (g, p) in &a.rows {
        if let Some(first) = p.tags.iter().position(|t| g.contains(&normalize_tag(&t.tag))) {
            for h in hits.iter_mut().skip(first) {
                *h += 1;
            }
        }
    }
    Ok(std::array::from_fn(|i| HitAtK {
        k: i + 1,
        pct: pct(hits[i], a.rows.len()),
        hits: hits[i],
        evaluated: a.rows.len(),
        excluded_empty_gold: a.excluded,
    }))
}

/// Per-post 0/1 Hit@k outcomes keyed by post id, for paired comparisons.
pub fn per_post_hits(predictions: &[PredictionSet], gold: &GoldTags, k: usize) -> Result<BTreeMap<i64, bool>> {
    check_k(k)?;
    let a = align(predictions, gold)?;
    Ok(a.rows.iter().map(|(g, p)| (p.post_id, first_k_hit(g, p, k))).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeadContribution {
    /// Percentage of posts where only P-head predictions hit gold.
    pub p_only: f64,
    /// Percentage of posts where only G-head predictions hit gold.
    pub g_only: f64,
    pub both: f64,
    pub evaluated: usize,
}

pub fn head_contributions(predictions: &[PredictionSet], gold: &GoldTags) -> Result<HeadContribution> {
    let a = align(predictions, gold)?;
    let (mut p_only, mut g_only, mut both) = (0, 0, 0);
    for (g, set) in &a.rows {
        let mut p_hit = false;
        let mut g_hit = false;
        for p in &set.tags {
            let hit = g.contains(&normalize_tag(&p.tag));
            match p.source {
                Source::PHead => p_hit |= hit,
                Source::GHead => g_hit |= hit,
                other => {
                    return Err(Error::UnlabeledPrediction {
                        post_id: set.post_id,
                        source_label: other.as_str().into(),
                    })
                }
            }
        }
        match (p_hit, g_hit) {
            (true, false) => p_only += 1,
            (false, true) => g_only += 1,
            (true, true) => both += 1,
            _ => {}
        }
    }
    let n = a.rows.len();
    Ok(HeadContribution {
        p_only: pct(p_only, n),
        g_only: pct(g_only, n),
        both: pct(both, n),
        evaluated: n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OovStats {
    /// Posts with at least one correctly predicted OOV tag.
    pub pct_posts: f64,
    /// Correct OOV predictions over all gold tags.
    pub pct_all_tags: f64,
    /// Correct OOV predictions over OOV gold tags; absent when there are none.
    pub pct_oov_tags: Option<f64>,
    pub correct_oov: usize,
    pub gold_tags: usize,
    pub gold_oov_tags: usize,
}

pub fn oov_stats(predictions: &[PredictionSet], gold: &GoldTags, vocab: &MetaVocab) -> Result<OovStats> {
    let a = align(predictions, gold)?;
    let (mut posts, mut correct, mut gold_tags, mut gold_oov) = (0, 0, 0, 0);
    for (g, set) in &a.rows {
        gold_tags += g.len();
        gold_oov += g.iter().filter(|t| !vocab.contains(t)).count();
        let hits = set
            .tags
            .iter()
            .map(|p| normalize_tag(&p.tag))
            .filter(|t| g.contains(t) && !vocab.contains(t))
            .count();
        correct += hits;
        if hits > 0 {
            posts += 1;
        }
    }
    Ok(OovStats {
        pct_posts: pct(posts, a.rows.len()),
        pct_all_tags: pct(correct, gold_tags),
        pct_oov_tags: (gold_oov > 0).then(|| pct(correct, gold_oov)),
        correct_oov: correct,
        gold_tags,
        gold_oov_tags: gold_oov,
    })
}
