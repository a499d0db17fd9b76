//! MetaTag vocabularies: the shortest frequency-ranked tag prefix that covers
//! a target share of the training questions.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analytics::{coverage_counts, TagFrequencyTable};
use crate::error::{invalid, Error, Result};
use crate::ingest::DomainCorpus;

pub const DEFAULT_COVERAGE_TARGETS: [f64; 3] = [85.0, 90.0, 95.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaVocab {
    pub domain: String,
    pub coverage_target: f64,
    pub achieved_coverage: f64,
    /// Frequency-ranked tags, most frequent first.
    pub tags: Vec<String>,
    /// Training-question counts aligned with `tags`.
    pub counts: Vec<u64>,
    /// Which questions the frequencies came from (a split manifest hash, or `"full"`).
    pub built_from: String,
    pub frequency_source: String,
    #[serde(skip)]
    members: HashSet<String>,
}

/// Builds the vocabulary from training questions only.
pub fn build_meta_vocab(train: &DomainCorpus, coverage_target: f64, built_from: &str) -> Result<MetaVocab> {
    if !(coverage_target > 0.0 && coverage_target <= 100.0) {
        return Err(invalid(format!("coverage target {coverage_target} outside (0, 100]")));
    }
    if train.questions.is_empty() {
        return Err(Error::EmptyCorpus("no training questions to build a vocabulary from"));
    }
    let freq = TagFrequencyTable::from_corpus(train);
    let covered = coverage_counts(&freq, train);
    let total = train.questions.len() as f64;
    let pct = |n: usize| 100.0 * covered[n] as f64 / total;
    // Every question has a tag, so n = |T| reaches 100 and the search always succeeds.
    let n = (1..=freq.len()).find(|&n| pct(n) >= coverage_target).unwrap_or(freq.len());

    let tags = freq.top(n).to_vec();
    let counts = tags.iter().map(|t| freq.count(t)).collect();
    Ok(MetaVocab::new(
        train.domain.clone(),
        coverage_target,
        pct(n),
        tags,
        counts,
        built_from.to_owned(),
    ))
}

pub fn is_oov(tag: &str, vocab: &MetaVocab) -> bool {
    !vocab.contains(tag)
}

impl MetaVocab {
    fn new(
        domain: String,
        coverage_target: f64,
        achieved_coverage: f64,
        tags: Vec<String>,
        counts: Vec<u64>,
        built_from: String,
    ) -> Self {
        let members = tags.iter().cloned().collect();
        MetaVocab {
            domain,
            coverage_target,
            achieved_coverage,
            tags,
            counts,
            built_from,
            frequency_source: "train".into(),
            members,
        }
    }

    pub fn contains(&self, tag: &str) -> bool {
        self.members.contains(tag)
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut out, self)?;
        out.write_all(b"\n")?;
        out.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<MetaVocab> {
        let mut v: MetaVocab = serde_json::from_reader(BufReader::new(File::open(path)?))?;
        v.members = v.tags.iter().cloned().collect();
        Ok(v)
    }
}
