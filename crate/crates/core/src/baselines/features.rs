use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::ingest::{strip_html, Post};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    /// Raw counts times smoothed idf, rows L2-normalized.
    TfIdf,
    /// Raw term counts.
    Counts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub ngram_range: (usize, usize),
    /// Minimum document frequency as a fraction of the corpus.
    pub min_df: f64,
    pub max_features: usize,
    pub weighting: Weighting,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            ngram_range: (1, 2),
            min_df: 0.00009,
            max_features: 200_000,
            weighting: Weighting::TfIdf,
        }
    }
}

impl FeatureConfig {
    pub fn with_weighting(weighting: Weighting) -> Self {
        FeatureConfig {
            weighting,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.ngram_range;
        if lo == 0 || lo > hi {
            return Err(invalid(format!("bad n-gram range ({lo}, {hi})")));
        }
        if !(self.min_df > 0.0 && self.min_df < 1.0) {
            return Err(invalid(format!("min_df {} outside (0, 1)", self.min_df)));
        }
        if self.max_features == 0 {
            return Err(invalid("max_features must be positive"));
        }
        Ok(())
    }
}

pub const IDF_FORMULA: &str = "ln((1+N)/(1+df))+1, l2-normalized rows";

/// Classifier input text for a question: title, then the HTML-stripped body, lowercased.
pub fn question_text(post: &Post) -> String {
    let mut s = String::with_capacity(post.title.len() + post.body.len() + 1);
    s.push_str(&post.title);
    s.push('\n');
    s.push_str(&strip_html(&post.body));
    s.to_lowercase()
}

/// Splits on non-alphanumerics. Keeps tokens of two or more characters,
/// single digits, and single letters next to an all-digit token.
pub fn tokenize(text: &str) -> Vec<&str> {
    let raw: Vec<&str> = text.split(|c: char| !c.is_alphanumeric()).filter(|t| !t.is_empty()).collect();
    let all_digits = |t: &str| t.chars().all(|c| c.is_ascii_digit());
    (0..raw.len())
        .filter(|&i| {
            let t = raw[i];
            if t.chars().nth(1).is_some() {
                return true;
            }
            if all_digits(t) {
                return true;
            }
            (i > 0 && all_digits(raw[i - 1])) || raw.get(i + 1).is_some_and(|n| all_digits(n))
        })
        .map(|i| raw[i])
        .collect()
}

fn ngrams(tokens: &[&str], (lo, hi): (usize, usize)) -> Vec<String> {
    let mut out = Vec::new();
    for n in lo..=hi {
        for w in tokens.windows(n) {
            out.push(w.join(" "));
        }
    }
    out
}

/// Compressed sparse rows; column indices ascend within each row.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CsrMatrix {
    pub indptr: Vec<usize>,
    pub indices: Vec<u32>,
    pub data: Vec<f64>,
    pub n_cols: usize,
}

impl CsrMatrix {
    pub fn from_rows(rows: Vec<Vec<(u32, f64)>>, n_cols: usize) -> Self {
        let mut m = CsrMatrix {
            indptr: Vec::with_capacity(rows.len() + 1),
            n_cols,
            ..Default::default()
        };
        m.indptr.push(0);
        for row in rows {
            for (j, v) in row {
                m.indices.push(j);
                m.data.push(v);
            }
            m.indptr.push(m.indices.len());
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.indptr.len().saturating_sub(1)
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        (&self.indices[a..b], &self.data[a..b])
    }

    pub fn select_rows(&self, rows: &[usize]) -> CsrMatrix {
        CsrMatrix::from_rows(
            rows.iter()
                .map(|&i| {
                    let (ix, v) = self.row(i);
                    ix.iter().copied().zip(v.iter().copied()).collect()
                })
                .collect(),
            self.n_cols,
        )
    }
}

/// The learned vocabulary: terms in lexicographic order, their training
/// document frequencies and, for tf-idf, idf weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpace {
    pub config: FeatureConfig,
    pub n_docs: usize,
    pub terms: Vec<String>,
    pub df: Vec<u32>,
    pub idf: Vec<f64>,
    pub idf_formula: String,
    #[serde(skip)]
    index: HashMap<String, u32>,
}

impl FeatureSpace {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_index(&self, term: &str) -> Option<u32> {
        self.index.get(term).copied()
    }

    pub(crate) fn rebuild_index(&mut self) {
        self.index = self.terms.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
    }

    fn vectorize(&self, text: &str) -> Vec<(u32, f64)> {
        let toks = tokenize(text);
        let mut counts: HashMap<u32, f64> = HashMap::new();
        for g in ngrams(&toks, self.config.ngram_range) {
            if let Some(&j) = self.index.get(&g) {
                *counts.entry(j).or_default() += 1.0;
            }
        }
        let mut row: Vec<(u32, f64)> = counts.into_iter().collect();
        row.sort_unstable_by_key(|e| e.0);
        if self.config.weighting == Weighting::TfIdf {
            for (j, v) in row.iter_mut() {
                *v *= self.idf[*j as usize];
            }
            let norm = row.iter().map(|e| e.1 * e.1).sum::<f64>().sqrt();
            if norm > 0.0 {
                for e in row.iter_mut() {
                    e.1 /= norm;
                }
            }
        }
        row
    }

    /// Rows aligned with `texts`; unknown terms are ignored.
    pub fn transform<S: AsRef<str> + Sync>(&self, texts: &[S]) -> CsrMatrix {
        let rows = texts.par_iter().map(|t| self.vectorize(t.as_ref())).collect();
        CsrMatrix::from_rows(rows, self.len())
    }
}

/// Learns the feature space from `texts` and returns it with their matrix.
pub fn featurize<S: AsRef<str> + Sync>(texts: &[S], config: &FeatureConfig) -> Result<(FeatureSpace, CsrMatrix)> {
    config.validate()?;
    if texts.is_empty() {
        return Err(Error::EmptyCorpus("no documents to featurize"));
    }
    let range = config.ngram_range;
    let df: HashMap<String, u32> = texts
        .par_iter()
        .fold(HashMap::new, |mut acc: HashMap<String, u32>, t| {
            let mut grams = ngrams(&tokenize(t.as_ref()), range);
            grams.sort_unstable();
            grams.dedup();
            for g in grams {
                *acc.entry(g).or_default() += 1;
            }
            acc
        })
        .reduce(HashMap::new, |mut a, mut b| {
            if a.len() < b.len() {
                std::mem::swap(&mut a, &mut b);
            }
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        });

    let n = texts.len();
    let min_count = config.min_df * n as f64;
    let mut kept: Vec<(String, u32)> = df.into_iter().filter(|(_, d)| *d as f64 >= min_count).collect();
    kept.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    kept.truncate(config.max_features);
    kept.sort_unstable_by(|a, b| a.0.cmp(&b.0));

    let (terms, dfs): (Vec<String>, Vec<u32>) = kept.into_iter().unzip();
    let idf = match config.weighting {
        Weighting::TfIdf => dfs
            .iter()
            .map(|&d| ((1.0 + n as f64) / (1.0 + d as f64)).ln() + 1.0)
            .collect(),
        Weighting::Counts => Vec::new(),
    };
    let mut space = FeatureSpace {
        config: config.clone(),
        n_docs: n,
        terms,
        df: dfs,
        idf,
        idf_formula: IDF_FORMULA.into(),
        index: HashMap::new(),
    };
    space.rebuild_index();
    let matrix = space.transform(texts);
    Ok((space, matrix))
}
