use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::ingest::{DomainCorpus, MAX_TAGS};

/// Where in the tag sequence a tag tends to be placed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositionalProfile {
    pub tag: String,
    /// Occurrences at positions 1..=5.
    pub position_counts: [u64; MAX_TAGS],
    /// Percentage of the tag's occurrences at each position.
    pub phi: [f64; MAX_TAGS],
}

impl PositionalProfile {
    fn from_counts(tag: String, position_counts: [u64; MAX_TAGS]) -> Self {
        let total: u64 = position_counts.iter().sum();
        let phi = position_counts.map(|c| {
            if total == 0 {
                0.0
            } else {
                100.0 * c as f64 / total as f64
            }
        });
        PositionalProfile {
            tag,
            position_counts,
            phi,
        }
    }

    pub fn total(&self) -> u64 {
        self.position_counts.iter().sum()
    }

    /// Share of occurrences falling in the 1-based `positions`.
    ///
    /// Computed from the summed counts with a single division, so a tag that
    /// only ever appears inside `positions` gets exactly 100.
    pub fn share(&self, positions: &[usize]) -> f64 {
        let total = self.total();
        if total == 0 {
            return 0.0;
        }
        let inside: u64 = positions.iter().map(|&p| self.position_counts[p - 1]).sum();
        100.0 * inside as f64 / total as f64
    }
}

/// Positional profile of every tag in the corpus, keyed by tag.
pub fn all_positional_profiles(corpus: &DomainCorpus) -> BTreeMap<String, PositionalProfile> {
    let mut counts: BTreeMap<&str, [u64; MAX_TAGS]> = BTreeMap::new();
    for q in &corpus.questions {
        for (i, t) in q.tags.iter().enumerate().take(MAX_TAGS) {
            counts.entry(t.as_str()).or_default()[i] += 1;
        }
    }
    counts
        .into_iter()
        .map(|(t, c)| (t.to_owned(), PositionalProfile::from_counts(t.to_owned(), c)))
        .collect()
}

pub fn positional_profile(corpus: &DomainCorpus, tag: &str) -> Result<PositionalProfile> {
    let mut counts = [0u64; MAX_TAGS];
    for q in &corpus.questions {
        if let Some(i) = q.tags.iter().position(|t| t == tag) {
            if i < MAX_TAGS {
                counts[i] += 1;
            }
        }
    }
    if counts.iter().all(|&c| c == 0) {
        return Err(Error::UnknownTag(tag.to_owned()));
    }
    Ok(PositionalProfile::from_counts(tag.to_owned(), counts))
}

/// A set of 1-based tag positions, e.g. `{1, 2}`.
pub type PositionSet = Vec<usize>;

pub fn default_position_sets() -> Vec<PositionSet> {
    vec![vec![1, 2], vec![3, 4, 5]]
}

pub const STABILITY_THRESHOLDS: [f64; 3] = [80.0, 90.0, 99.0];

/// Tags that sit in given position sets more than `delta` percent of the time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub delta: f64,
    /// Minimum occurrences for a tag to enter the universe; 1 means every observed tag.
    pub min_count: u64,
    pub universe: usize,
    pub position_sets: Vec<PositionSet>,
    /// Stable tags per position set, aligned with `position_sets`.
    pub q_sets: Vec<BTreeSet<String>>,
    /// `100 * |q_set| / universe` per position set.
    pub st: Vec<f64>,
}

impl StabilityReport {
    pub fn st_for(&self, positions: &[usize]) -> Option<f64> {
        self.position_sets
            .iter()
            .position(|s| s.as_slice() == positions)
            .map(|i| self.st[i])
    }

    pub fn q_for(&self, positions: &[usize]) -> Option<&BTreeSet<String>> {
        self.position_sets
            .iter()
            .position(|s| s.as_slice() == positions)
            .map(|i| &self.q_sets[i])
    }
}

fn validate_position_sets(sets: &[PositionSet]) -> Result<()> {
    let mut used = BTreeSet::new();
    for set in sets {
        if set.is_empty() {
            return Err(invalid("empty position set"));
        }
        for &p in set {
            if !(1..=MAX_TAGS).contains(&p) {
                return Err(invalid(format!("position {p} outside 1..={MAX_TAGS}")));
            }
            if !used.insert(p) {
                return Err(invalid(format!("position {p} appears in more than one set")));
            }
        }
    }
    Ok(())
}

pub fn stability_report(corpus: &DomainCorpus, position_sets: &[PositionSet], delta: f64) -> Result<StabilityReport> {
    stability_report_with(&all_positional_profiles(corpus), position_sets, delta, 1)
}

/// Stability over precomputed profiles, optionally ignoring tags seen fewer than `min_count` times.
pub fn stability_report_with(
    profiles: &BTreeMap<String, PositionalProfile>,
    position_sets: &[PositionSet],
    delta: f64,
    min_count: u64,
) -> Result<StabilityReport> {
    if !(delta > 0.0 && delta <= 100.0) {
        return Err(invalid(format!("stability threshold {delta} outside (0, 100]")));
    }
    validate_position_sets(position_sets)?;

    let universe: Vec<&PositionalProfile> = profiles
        .values()
        .filter(|p| p.total() >= min_count.max(1))
        .collect();
    let q_sets: Vec<BTreeSet<String>> = position_sets
        .iter()
        .map(|set| {
            universe
                .iter()
                .filter(|p| p.share(set) > delta)
                .map(|p| p.tag.clone())
                .collect()
        })
        .collect();
    let n = universe.len();
    let st = q_sets
        .iter()
        .map(|q| if n == 0 { 0.0 } else { 100.0 * q.len() as f64 / n as f64 })
        .collect();
    Ok(StabilityReport {
        delta,
        min_count: min_count.max(1),
        universe: n,
        position_sets: position_sets.to_vec(),
        q_sets,
        st,
    })
}
