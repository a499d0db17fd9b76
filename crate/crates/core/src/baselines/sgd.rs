use std::collections::{BTreeSet, HashSet};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::features::{CsrMatrix, FeatureSpace};
use crate::error::{invalid, Error, Result};
use crate::predictions::{Prediction, PredictionSet, Source};
use crate::rng::{SeededRng, PRNG_NAME};

const MODEL_FORMAT: &str = "cqatag-ovr-sgd";
const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SgdConfig {
    pub alpha: f64,
    pub epochs: usize,
    /// Intercept step multiplier; 0.01 is the usual damping for sparse input.
    pub intercept_decay: f64,
    pub seed: u64,
}

impl Default for SgdConfig {
    fn default() -> Self {
        SgdConfig {
            alpha: 1e-5,
            epochs: 20,
            intercept_decay: 0.01,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassModel {
    pub tag: String,
    /// Nonzero weights as `(feature, weight)`, ascending by feature.
    pub weights: Vec<(u32, f64)>,
    pub intercept: f64,
    /// Set when the tag is on every training post: the class always scores this probability.
    pub constant: Option<f64>,
}

impl ClassModel {
    pub fn decision(&self, indices: &[u32], values: &[f64]) -> f64 {
        let mut s = self.intercept;
        let (mut a, mut b) = (0, 0);
        while a < self.weights.len() && b < indices.len() {
            match self.weights[a].0.cmp(&indices[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    s += self.weights[a].1 * values[b];
                    a += 1;
                    b += 1;
                }
            }
        }
        s
    }
}

/// One logistic-loss, L2-penalized binary classifier per tag over a shared feature space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OvrModel {
    pub format: String,
    pub version: u32,
    pub loss: String,
    pub penalty: String,
    pub learning_rate: String,
    pub prng: String,
    pub sgd: SgdConfig,
    pub features: FeatureSpace,
    pub classes: Vec<ClassModel>,
    /// Feature → (class, weight), for scoring every class from one sparse row.
    #[serde(skip)]
    inverted: Vec<Vec<(u32, f64)>>,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Derivative of `ln(1 + exp(-y p))` with respect to `p`.
fn dloss(p: f64, y: f64) -> f64 {
    -y * sigmoid(-y * p)
}

/// Plain SGD for one binary problem with an "optimal" step size
/// `1 / (alpha * (t0 + t))` and a scaled weight vector for cheap L2 decay.
fn train_binary(x: &CsrMatrix, y: &[f64], cfg: &SgdConfig) -> (Vec<f64>, f64) {
    let alpha = cfg.alpha;
    let typw = (1.0 / alpha.sqrt()).sqrt();
    let eta0 = typw / dloss(-typw, 1.0).abs().max(1.0);
    let t0 = 1.0 / (eta0 * alpha);

    let mut w = vec![0.0; x.n_cols];
    let mut wscale = 1.0;
    let mut b = 0.0;
    let mut order: Vec<usize> = (0..x.n_rows()).collect();
    let mut rng = SeededRng::new(cfg.seed);
    let mut t = 1.0;

    for _ in 0..cfg.epochs {
        rng.shuffle(&mut order);
        for &i in &order {
            let (ix, v) = x.row(i);
            let dot: f64 = ix.iter().zip(v).map(|(&j, &xv)| w[j as usize] * xv).sum();
            let p = wscale * dot + b;
            let eta = 1.0 / (alpha * (t0 + t - 1.0));
            let update = -eta * dloss(p, y[i]);
            wscale *= (1.0 - eta * alpha).max(0.0);
            if update != 0.0 {
                let step = update / wscale;
                for (&j, &xv) in ix.iter().zip(v) {
                    w[j as usize] += step * xv;
                }
                b += update * cfg.intercept_decay;
            }
            if wscale < 1e-9 {
                for wj in w.iter_mut() {
                    *wj *= wscale;
                }
                wscale = 1.0;
            }
            t += 1.0;
        }
    }
    for wj in w.iter_mut() {
        *wj *= wscale;
    }
    (w, b)
}

/// Trains one classifier per distinct label, in parallel.
///
/// Each class shuffles with a PRNG seeded only by `cfg.seed`, so a class's
/// weights do not depend on which other classes are trained.
pub fn train_ovr_sgd(
    features: FeatureSpace,
    x: &CsrMatrix,
    labels: &[Vec<String>],
    cfg: &SgdConfig,
) -> Result<OvrModel> {
    if x.n_rows() != labels.len() {
        return Err(invalid(format!("{} rows but {} label sets", x.n_rows(), labels.len())));
    }
    if x.n_rows() == 0 {
        return Err(Error::EmptyCorpus("no training rows"));
    }
    if cfg.alpha.is_nan() || cfg.alpha <= 0.0 || cfg.epochs == 0 {
        return Err(invalid("alpha must be positive and epochs at least 1"));
    }
    let classes: BTreeSet<&str> = labels.iter().flatten().map(String::as_str).collect();
    let sets: Vec<HashSet<&str>> = labels.iter().map(|l| l.iter().map(String::as_str).collect()).collect();

    let models: Vec<ClassModel> = classes
        .par_iter()
        .map(|&tag| {
            let y: Vec<f64> = sets.iter().map(|s| if s.contains(tag) { 1.0 } else { -1.0 }).collect();
            if y.iter().all(|&v| v > 0.0) {
                return ClassModel {
                    tag: tag.to_owned(),
                    weights: Vec::new(),
                    intercept: 0.0,
                    constant: Some(1.0),
                };
            }
            let (w, b) = train_binary(x, &y, cfg);
            ClassModel {
                tag: tag.to_owned(),
                weights: w
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0.0)
                    .map(|(j, &v)| (j as u32, v))
                    .collect(),
                intercept: b,
                constant: None,
            }
        })
        .collect();

    let mut model = OvrModel {
        format: MODEL_FORMAT.into(),
        version: MODEL_VERSION,
        loss: "log".into(),
        penalty: "l2".into(),
        learning_rate: "optimal".into(),
        prng: PRNG_NAME.into(),
        sgd: cfg.clone(),
        features,
        classes: models,
        inverted: Vec::new(),
    };
    model.rebuild_index();
    Ok(model)
}

impl OvrModel {
    fn rebuild_index(&mut self) {
        self.features.rebuild_index();
        let mut inv = vec![Vec::new(); self.features.len()];
        for (c, m) in self.classes.iter().enumerate() {
            for &(j, w) in &m.weights {
                inv[j as usize].push((c as u32, w));
            }
        }
        self.inverted = inv;
    }

    pub fn stub_classes(&self) -> impl Iterator<Item = &str> {
        self.classes.iter().filter(|c| c.constant.is_some()).map(|c| c.tag.as_str())
    }

    /// Decision scores of every class for one feature row.
    pub fn scores(&self, indices: &[u32], values: &[f64]) -> Vec<f64> {
        let mut s: Vec<f64> = self.classes.iter().map(|c| c.intercept).collect();
        for (&j, &v) in indices.iter().zip(values) {
            for &(c, w) in &self.inverted[j as usize] {
                s[c as usize] += w * v;
            }
        }
        s
    }

    /// Per-class probabilities for one feature row, aligned with `classes`.
    pub fn probabilities(&self, indices: &[u32], values: &[f64]) -> Vec<f64> {
        self.scores(indices, values)
            .into_iter()
            .zip(&self.classes)
            .map(|(s, c)| c.constant.unwrap_or_else(|| sigmoid(s)))
            .collect()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        serde_json::to_writer(&mut out, self)?;
        out.write_all(b"\n")?;
        out.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<OvrModel> {
        let mut m: OvrModel = serde_json::from_reader(BufReader::new(File::open(path)?))?;
        if m.format != MODEL_FORMAT || m.version != MODEL_VERSION {
            return Err(Error::Config(format!(
                "{}: not a version {MODEL_VERSION} {MODEL_FORMAT} model",
                path.display()
            )));
        }
        m.rebuild_index();
        Ok(m)
    }
}

/// Ranks classes by probability (ties by tag order) and keeps the top `k`.
pub fn predict_topk(model: &OvrModel, post_id: i64, indices: &[u32], values: &[f64], k: usize) -> Result<PredictionSet> {
    let probs = model.probabilities(indices, values);
    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&a, &b| probs[b].total_cmp(&probs[a]));
    PredictionSet::from_ranked(
        post_id,
        order.into_iter().map(|c| Prediction {
            tag: model.classes[c].tag.clone(),
            score: probs[c],
            source: Source::Baseline,
        }),
        k,
    )
}

/// [`predict_topk`] for every row of `x`, in parallel.
pub fn predict_all(model: &OvrModel, post_ids: &[i64], x: &CsrMatrix, k: usize) -> Result<Vec<PredictionSet>> {
    if post_ids.len() != x.n_rows() {
        return Err(invalid(format!("{} post ids for {} rows", post_ids.len(), x.n_rows())));
    }
    (0..x.n_rows())
        .into_par_iter()
        .map(|i| {
            let (ix, v) = x.row(i);
            predict_topk(model, post_ids[i], ix, v, k)
        })
        .collect()
}
