//! Ranked tag predictions per post and their line-delimited file format.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::ingest::MAX_TAGS;

const PREDICTIONS_FORMAT: &str = "cqatag-predictions";

/// Which model head produced a predicted tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Source {
    /// Closed-vocabulary (MetaTag) head.
    #[serde(rename = "P-head")]
    PHead,
    /// Generative head producing refined tags.
    #[serde(rename = "G-head")]
    GHead,
    #[serde(rename = "baseline")]
    Baseline,
    #[serde(rename = "majority")]
    Majority,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::PHead => "P-head",
            Source::GHead => "G-head",
            Source::Baseline => "baseline",
            Source::Majority => "majority",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub tag: String,
    pub score: f64,
    pub source: Source,
}

/// At most five distinct ranked tags for one post.
///
/// Scores are non-increasing among entries from the same source; merged
/// sets list the P-head block before the G-head block, and the two heads'
/// scores are not on a common scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionSet {
    pub post_id: i64,
    pub tags: Vec<Prediction>,
}

impl PredictionSet {
    pub fn new(post_id: i64, tags: Vec<Prediction>) -> Result<Self> {
        if tags.len() > MAX_TAGS {
            return Err(invalid(format!(
                "post {post_id}: {} predictions exceed the limit of {MAX_TAGS}",
                tags.len()
            )));
        }
        let mut seen = HashSet::new();
        let mut last_score: BTreeMap<&'static str, f64> = BTreeMap::new();
        for p in &tags {
            if !seen.insert(p.tag.as_str()) {
                return Err(invalid(format!("post {post_id}: duplicate prediction {:?}", p.tag)));
            }
            if p.score.is_nan() {
                return Err(invalid(format!("post {post_id}: NaN score for {:?}", p.tag)));
            }
            if let Some(prev) = last_score.insert(p.source.as_str(), p.score) {
                if p.score > prev {
                    return Err(invalid(format!(
                        "post {post_id}: scores increase within {} predictions",
                        p.source.as_str()
                    )));
                }
            }
        }
        Ok(PredictionSet { post_id, tags })
    }

    /// Builds a set from ranked candidates, dropping repeats and truncating to `k`.
    pub fn from_ranked<I>(post_id: i64, ranked: I, k: usize) -> Result<Self>
    where
        I: IntoIterator<Item = Prediction>,
    {
        let mut seen = HashSet::new();
        let tags: Vec<Prediction> = ranked
            .into_iter()
            .filter(|p| seen.insert(p.tag.clone()))
            .take(k.min(MAX_TAGS))
            .collect();
        Self::new(post_id, tags)
    }

    pub fn tag_strs(&self) -> impl Iterator<Item = &str> + '_ {
        self.tags.iter().map(|p| p.tag.as_str())
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }
}

impl<'de> Deserialize<'de> for PredictionSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            post_id: i64,
            tags: Vec<Prediction>,
        }
        let raw = Raw::deserialize(d)?;
        PredictionSet::new(raw.post_id, raw.tags).map_err(serde::de::Error::custom)
    }
}

/// First line of a predictions file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionsHeader {
    pub format: String,
    pub model: String,
    pub domain: String,
    #[serde(default)]
    pub run_seed: Option<u64>,
    /// Free-form notes about how scores were produced.
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl PredictionsHeader {
    pub fn new(model: &str, domain: &str, run_seed: Option<u64>) -> Self {
        PredictionsHeader {
            format: PREDICTIONS_FORMAT.into(),
            model: model.into(),
            domain: domain.into(),
            run_seed,
            metadata: BTreeMap::new(),
        }
    }
}

pub fn write_predictions<W: Write>(out: W, header: &PredictionsHeader, sets: &[PredictionSet]) -> Result<()> {
    let mut out = BufWriter::new(out);
    serde_json::to_writer(&mut out, header)?;
    out.write_all(b"\n")?;
    for s in sets {
        serde_json::to_writer(&mut out, s)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn save_predictions(path: &Path, header: &PredictionsHeader, sets: &[PredictionSet]) -> Result<()> {
    write_predictions(File::create(path)?, header, sets)
}

pub fn read_predictions<R: BufRead>(input: R, path: &Path) -> Result<(PredictionsHeader, Vec<PredictionSet>)> {
    let err = |line: usize, message: String| Error::Record {
        path: path.to_owned(),
        line,
        message,
    };
    let mut lines = input.lines();
    let first = lines.next().ok_or_else(|| err(1, "empty predictions file".into()))??;
    let header: PredictionsHeader = serde_json::from_str(&first).map_err(|e| err(1, e.to_string()))?;
    if header.format != PREDICTIONS_FORMAT {
        return Err(err(1, format!("unexpected format {:?}", header.format)));
    }
    let mut sets = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        sets.push(serde_json::from_str(&line).map_err(|e| err(i + 2, e.to_string()))?);
    }
    Ok((header, sets))
}

pub fn load_predictions(path: &Path) -> Result<(PredictionsHeader, Vec<PredictionSet>)> {
    read_predictions(BufReader::new(File::open(path)?), path)
}
