//! Declarative pipeline configuration (TOML) with per-domain overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analytics::{PositionSet, DEFAULT_VIEW_THRESHOLD, STABILITY_THRESHOLDS};
use crate::baselines::{FeatureConfig, SgdConfig, Weighting};
use crate::decoder::MergeOptions;
use crate::error::{Error, Result};
use crate::ingest::DEFAULT_RATIOS;
use crate::vocab::DEFAULT_COVERAGE_TARGETS;

pub const DOMAINS: [&str; 17] = [
    "askubuntu",
    "aviation",
    "biology",
    "chemistry",
    "cooking",
    "electronics",
    "history",
    "money",
    "movies",
    "music",
    "philosophy",
    "physics",
    "politics",
    "rpg",
    "scifi",
    "serverfault",
    "travel",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSection {
    pub seed: u64,
    pub ratios: [f64; 3],
}

impl Default for SplitSection {
    fn default() -> Self {
        SplitSection {
            seed: 0,
            ratios: DEFAULT_RATIOS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VocabSection {
    /// Target used by `predict` and `eval` unless overridden on the command line.
    pub coverage: f64,
    /// Targets built by the `vocab` command.
    pub targets: Vec<f64>,
}

impl Default for VocabSection {
    fn default() -> Self {
        VocabSection {
            coverage: 90.0,
            targets: DEFAULT_COVERAGE_TARGETS.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSection {
    pub view_threshold: u64,
    pub stability_thresholds: Vec<f64>,
    pub position_sets: Vec<PositionSet>,
    pub stability_min_count: u64,
    pub coverage_ns: Vec<usize>,
    pub pair_ks: Vec<usize>,
    pub top_pairs: usize,
    /// Lengths of the ranked-count series (tags, pairs).
    pub tag_series_len: usize,
    pub pair_series_len: usize,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        AnalysisSection {
            view_threshold: DEFAULT_VIEW_THRESHOLD,
            stability_thresholds: STABILITY_THRESHOLDS.to_vec(),
            position_sets: vec![vec![1, 2], vec![3, 4, 5]],
            stability_min_count: 1,
            coverage_ns: vec![1, 3, 5, 10, 50, 100],
            pair_ks: vec![1, 3, 5, 10, 50, 100],
            top_pairs: 5,
            tag_series_len: 100,
            pair_series_len: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineSection {
    pub ngram_range: (usize, usize),
    pub min_df: f64,
    pub max_features: usize,
    pub alpha: f64,
    pub epochs: usize,
    pub intercept_decay: f64,
    /// One training run per seed.
    pub seeds: Vec<u64>,
}

impl Default for BaselineSection {
    fn default() -> Self {
        let f = FeatureConfig::default();
        let s = SgdConfig::default();
        BaselineSection {
            ngram_range: f.ngram_range,
            min_df: f.min_df,
            max_features: f.max_features,
            alpha: s.alpha,
            epochs: s.epochs,
            intercept_decay: s.intercept_decay,
            seeds: vec![0, 1, 2, 3, 4],
        }
    }
}

impl BaselineSection {
    pub fn features(&self, weighting: Weighting) -> FeatureConfig {
        FeatureConfig {
            ngram_range: self.ngram_range,
            min_df: self.min_df,
            max_features: self.max_features,
            weighting,
        }
    }

    pub fn sgd(&self, seed: u64) -> SgdConfig {
        SgdConfig {
            alpha: self.alpha,
            epochs: self.epochs,
            intercept_decay: self.intercept_decay,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecodeSection {
    pub n_meta: usize,
    pub n_refined: usize,
    pub backfill: bool,
}

impl Default for DecodeSection {
    fn default() -> Self {
        let m = MergeOptions::default();
        DecodeSection {
            n_meta: m.n_meta,
            n_refined: m.n_refined,
            backfill: m.backfill,
        }
    }
}

impl DecodeSection {
    pub fn merge_options(&self) -> MergeOptions {
        MergeOptions {
            n_meta: self.n_meta,
            n_refined: self.n_refined,
            backfill: self.backfill,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSection {
    pub ks: Vec<usize>,
}

impl Default for EvalSection {
    fn default() -> Self {
        EvalSection {
            ks: vec![1, 2, 3, 4, 5],
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DomainOverride {
    /// Explicit `Posts.xml` path for this domain.
    pub dump: Option<PathBuf>,
    pub split_seed: Option<u64>,
    pub coverage: Option<f64>,
    pub view_threshold: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub domains: Vec<String>,
    /// Dumps are looked up as `<dump_dir>/<domain>/Posts.xml`.
    pub dump_dir: PathBuf,
    pub output_dir: PathBuf,
    pub split: SplitSection,
    pub vocab: VocabSection,
    pub analysis: AnalysisSection,
    pub baseline: BaselineSection,
    pub decode: DecodeSection,
    pub eval: EvalSection,
    #[serde(rename = "domain")]
    pub overrides: BTreeMap<String, DomainOverride>,
    /// Directory relative paths resolve against (the config file's directory).
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            domains: DOMAINS.iter().map(|d| d.to_string()).collect(),
            dump_dir: "dumps".into(),
            output_dir: "out".into(),
            split: SplitSection::default(),
            vocab: VocabSection::default(),
            analysis: AnalysisSection::default(),
            baseline: BaselineSection::default(),
            decode: DecodeSection::default(),
            eval: EvalSection::default(),
            overrides: BTreeMap::new(),
            base_dir: PathBuf::from("."),
        }
    }
}

fn check_pct(what: &str, v: f64) -> Result<()> {
    if v > 0.0 && v <= 100.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{what} {v} outside (0, 100]")))
    }
}

impl PipelineConfig {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut c: PipelineConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.base_dir = base_dir.to_owned();
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_owned()
        } else {
            self.base_dir.join(p)
        }
    }

    fn override_of(&self, domain: &str) -> Option<&DomainOverride> {
        self.overrides.get(domain)
    }

    pub fn dump_path(&self, domain: &str) -> PathBuf {
        match self.override_of(domain).and_then(|o| o.dump.as_ref()) {
            Some(p) => self.resolve(p),
            None => self.resolve(&self.dump_dir).join(domain).join("Posts.xml"),
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.resolve(&self.output_dir)
    }

    pub fn domain_dir(&self, domain: &str) -> PathBuf {
        self.output_dir().join(domain)
    }

    pub fn split_seed(&self, domain: &str) -> u64 {
        self.override_of(domain).and_then(|o| o.split_seed).unwrap_or(self.split.seed)
    }

    pub fn coverage(&self, domain: &str) -> f64 {
        self.override_of(domain).and_then(|o| o.coverage).unwrap_or(self.vocab.coverage)
    }

    pub fn view_threshold(&self, domain: &str) -> u64 {
        self.override_of(domain)
            .and_then(|o| o.view_threshold)
            .unwrap_or(self.analysis.view_threshold)
    }

    /// Checks values; with `require_dumps`, also that every dump file exists.
    pub fn validate(&self, require_dumps: bool) -> Result<()> {
        check_pct("vocab coverage", self.vocab.coverage)?;
        for &t in &self.vocab.targets {
            check_pct("vocab target", t)?;
        }
        for &d in &self.analysis.stability_thresholds {
            check_pct("stability threshold", d)?;
        }
        for (name, o) in &self.overrides {
            if !self.domains.contains(name) {
                return Err(Error::Config(format!("override for unlisted domain {name:?}")));
            }
            if let Some(c) = o.coverage {
                check_pct(&format!("{name} coverage"), c)?;
            }
        }
        let r = self.split.ratios;
        if r.iter().any(|v| *v < 0.0) || (r.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("split ratios {r:?} must be non-negative and sum to 1")));
        }
        if self.eval.ks.iter().any(|k| !(1..=5).contains(k)) {
            return Err(Error::Config("eval ks must lie in 1..=5".into()));
        }
        if self.decode.n_meta + self.decode.n_refined > 5 {
            return Err(Error::Config("n_meta + n_refined exceeds 5".into()));
        }
        if self.baseline.seeds.is_empty() {
            return Err(Error::Config("baseline needs at least one seed".into()));
        }
        if require_dumps {
            for d in &self.domains {
                let p = self.dump_path(d);
                if !p.is_file() {
                    return Err(Error::Config(format!("dump for {d} not found at {}", p.display())));
                }
            }
        }
        Ok(())
    }
}
