use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::DomainCorpus;

/// Unordered tag pair, stored with the lexicographically smaller tag first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TagPair(pub String, pub String);

impl TagPair {
    pub fn new(a: &str, b: &str) -> Self {
        if a <= b {
            TagPair(a.to_owned(), b.to_owned())
        } else {
            TagPair(b.to_owned(), a.to_owned())
        }
    }
}

/// Pair co-occurrence counts plus which tag came first in each post.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CooccurrenceTable {
    pub pairs: BTreeMap<TagPair, u64>,
    /// `(first, second)` → posts where `first` is listed before `second`.
    pub orderings: BTreeMap<(String, String), u64>,
}

pub fn build_cooccurrence(corpus: &DomainCorpus) -> CooccurrenceTable {
    let mut table = CooccurrenceTable::default();
    for q in &corpus.questions {
        let tags = &q.tags;
        for m in 0..tags.len() {
            for n in m + 1..tags.len() {
                if tags[m] == tags[n] {
                    continue;
                }
                *table.pairs.entry(TagPair::new(&tags[m], &tags[n])).or_default() += 1;
                *table
                    .orderings
                    .entry((tags[m].clone(), tags[n].clone()))
                    .or_default() += 1;
            }
        }
    }
    table
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingPreference {
    pub first: String,
    pub second: String,
    /// Posts listing `first` before `second`.
    pub forward: u64,
    pub backward: u64,
    /// Share of the dominant order, `100 * max / (forward + backward)`.
    pub dominant_pct: f64,
}

impl CooccurrenceTable {
    pub fn pair_count(&self, a: &str, b: &str) -> u64 {
        self.pairs.get(&TagPair::new(a, b)).copied().unwrap_or(0)
    }

    pub fn order_count(&self, first: &str, second: &str) -> u64 {
        self.orderings
            .get(&(first.to_owned(), second.to_owned()))
            .copied()
            .unwrap_or(0)
    }

    /// Pairs by descending count, ties in lexicographic pair order.
    pub fn ranked_pairs(&self) -> Vec<(&TagPair, u64)> {
        let mut v: Vec<(&TagPair, u64)> = self.pairs.iter().map(|(p, &c)| (p, c)).collect();
        v.sort_by_key(|&(_, c)| std::cmp::Reverse(c));
        v
    }

    pub fn ordering_preference(&self, first: &str, second: &str) -> Result<OrderingPreference> {
        let forward = self.order_count(first, second);
        let backward = self.order_count(second, first);
        let total = forward + backward;
        if total == 0 {
            return Err(Error::UnseenPair(first.to_owned(), second.to_owned()));
        }
        Ok(OrderingPreference {
            first: first.to_owned(),
            second: second.to_owned(),
            forward,
            backward,
            dominant_pct: 100.0 * forward.max(backward) as f64 / total as f64,
        })
    }
}

/// Free-function form of [`CooccurrenceTable::ordering_preference`].
pub fn ordering_preference(
    table: &CooccurrenceTable,
    first: &str,
    second: &str,
) -> Result<OrderingPreference> {
    table.ordering_preference(first, second)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairCoverage {
    /// Questions containing at least one of the `k` most frequent pairs, in percent.
    pub coverage: f64,
    /// Questions with exactly one tag, in percent.
    pub single_tag: f64,
}

pub fn pair_post_coverage(table: &CooccurrenceTable, corpus: &DomainCorpus, k: usize) -> PairCoverage {
    let n = corpus.questions.len();
    if n == 0 {
        return PairCoverage {
            coverage: 0.0,
            single_tag: 0.0,
        };
    }
    let top: HashSet<&TagPair> = table.ranked_pairs().into_iter().take(k).map(|(p, _)| p).collect();
    let covered = corpus
        .questions
        .iter()
        .filter(|q| {
            let t = &q.tags;
            (0..t.len()).any(|m| (m + 1..t.len()).any(|n| top.contains(&TagPair::new(&t[m], &t[n]))))
        })
        .count();
    let single = corpus.questions.iter().filter(|q| q.tags.len() == 1).count();
    PairCoverage {
        coverage: 100.0 * covered as f64 / n as f64,
        single_tag: 100.0 * single as f64 / n as f64,
    }
}
