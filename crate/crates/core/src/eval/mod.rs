//! Hit@k, multi-run aggregation, head contributions, OOV statistics and the
//! one-sided Wilcoxon signed-rank test.

mod hit;
mod wilcoxon;

pub use hit::{
    gold_from_corpus, head_contributions, hit_at_all_k, hit_at_k, normalize_tag, oov_stats,
    per_post_hits, GoldTags, HeadContribution, HitAtK, OovStats,
};
pub use wilcoxon::{wilcoxon_one_sided, WilcoxonMethod, WilcoxonResult, EXACT_MAX};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::ingest::MAX_TAGS;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub mean: f64,
    /// Bessel-corrected; absent for a single run.
    pub std: Option<f64>,
    pub runs: usize,
}

pub fn aggregate_runs(values: &[f64]) -> Result<RunSummary> {
    if values.is_empty() {
        return Err(invalid("no runs to aggregate"));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = (values.len() >= 2).then(|| {
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        (ss / (n - 1.0)).sqrt()
    });
    Ok(RunSummary {
        mean,
        std,
        runs: values.len(),
    })
}

/// Hit@1..5 of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunHits {
    pub seed: u64,
    pub hit: [f64; MAX_TAGS],
    pub evaluated: usize,
}

impl RunHits {
    pub fn from_hits(seed: u64, hits: &[HitAtK; MAX_TAGS]) -> Self {
        RunHits {
            seed,
            hit: hits.map(|h| h.pct),
            evaluated: hits[0].evaluated,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub domain: String,
    pub model: String,
    pub runs: Vec<RunHits>,
    /// Mean and std over runs for k = 1..5.
    pub summary: Vec<RunSummary>,
}

impl EvalReport {
    pub fn new(domain: &str, model: &str, runs: Vec<RunHits>) -> Result<Self> {
        for r in &runs {
            if r.hit.windows(2).any(|w| w[0] > w[1]) || r.hit.iter().any(|v| !(0.0..=100.0).contains(v)) {
                return Err(invalid(format!("run {} has non-monotone or out-of-range Hit@k", r.seed)));
            }
        }
        let summary = (0..MAX_TAGS)
            .map(|k| aggregate_runs(&runs.iter().map(|r| r.hit[k]).collect::<Vec<_>>()))
            .collect::<Result<Vec<_>>>()?;
        Ok(EvalReport {
            domain: domain.into(),
            model: model.into(),
            runs,
            summary,
        })
    }

    pub fn hit(&self, k: usize) -> Option<&RunSummary> {
        self.summary.get(k.checked_sub(1)?)
    }

    pub fn seeds(&self) -> Vec<u64> {
        self.runs.iter().map(|r| r.seed).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_runs() {
        let s = aggregate_runs(&[80.0, 80.0, 80.0]).unwrap();
        assert_eq!((s.mean, s.std), (80.0, Some(0.0)));
    }

    #[test]
    fn two_runs() {
        let s = aggregate_runs(&[79.0, 81.0]).unwrap();
        assert_eq!(s.mean, 80.0);
        assert!((s.std.unwrap() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn five_runs_match_direct_formula() {
        let v = [61.2, 63.5, 60.9, 62.0, 64.4];
        let s = aggregate_runs(&v).unwrap();
        let mean = (61.2 + 63.5 + 60.9 + 62.0 + 64.4) / 5.0;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 4.0;
        assert!((s.mean - mean).abs() < 1e-12);
        assert!((s.std.unwrap() - var.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn single_run_has_no_std() {
        assert_eq!(aggregate_runs(&[5.0]).unwrap().std, None);
        assert!(aggregate_runs(&[]).is_err());
    }

    #[test]
    fn report_rejects_non_monotone_runs() {
        let bad = RunHits { seed: 1, hit: [50.0, 40.0, 60.0, 70.0, 80.0], evaluated: 10 };
        assert!(EvalReport::new("d", "m", vec![bad]).is_err());
        let ok = RunHits { seed: 1, hit: [10.0, 20.0, 30.0, 40.0, 50.0], evaluated: 10 };
        let r = EvalReport::new("d", "m", vec![ok.clone(), ok]).unwrap();
        assert_eq!(r.hit(5).unwrap().mean, 50.0);
        assert_eq!(r.seeds(), vec![1, 1]);
    }
}
