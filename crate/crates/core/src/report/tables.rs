use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analytics::{MatchMode, OverlapScope, WordLengthDistribution};
use crate::error::Result;
use crate::eval::{EvalReport, HeadContribution, OovStats, WilcoxonResult};
use crate::report::analysis::DomainAnalysis;

/// A named CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &'static str, headers: &[&str]) -> Self {
        Table {
            name,
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn write_csv(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = dir.join(format!("{}.csv", self.name));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(&self.headers)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(path)
    }
}

fn f2(v: f64) -> String {
    format!("{v:.2}")
}

pub fn analysis_tables(rows: &[DomainAnalysis]) -> Vec<Table> {
    let mut stats = Table::new("domain_stats", &["Domain", "#Q", "#T", "PPT", "AvgT", "V>100", "#A", "QPA"]);
    let mut more = Table::new(
        "domain_statistics",
        &[
            "Domain",
            "Q",
            "T",
            "Q/T",
            "AVGT",
            "NOANS (%)",
            "NOSCORES (%)",
            "NO ACCEPT ANS (%)",
            "MAXANS",
            "MAXVIEW",
            "VIEWGT100",
            "#ASKERS",
        ],
    );
    let mut words = Table::new("tag_word_length", &["Domain"]);
    words.headers.extend(WordLengthDistribution::LABELS.iter().map(|s| s.to_string()));
    let mut chars = Table::new("tag_char_stats", &["Domain", "Longest Tag", "Size", "Shortest Tag", "Size", "AvgTLen"]);
    let mut cov = Table::new("tag_post_coverage", &["Domain", "#T"]);
    let mut pairs = Table::new("tag_pair_coverage", &["Domain"]);
    let mut top = Table::new("top_pairs", &["Domain", "Rank", "Top Pair", "Post-Count"]);
    let mut order = Table::new("tag_ordering", &["Domain", "Total", "Order-1", "%", "Order-2", "%"]);
    let mut overlap = Table::new("tag_post_overlap", &["Domain"]);
    for s in OverlapScope::ALL {
        for m in [MatchMode::Ems, MatchMode::Emm] {
            overlap.headers.push(format!("{} {}", s.label(), m.label()));
        }
    }
    let mut stab = Table::new("tag_stability", &["Domain", "Delta", "Positions", "Stable", "Universe", "ST", "Examples"]);
    let mut tag_series = Table::new("tag_distribution", &["Domain", "Rank", "Tag", "Posts"]);
    let mut pair_series = Table::new("pair_distribution", &["Domain", "Rank", "Pair", "Posts"]);

    if let Some(first) = rows.first() {
        cov.headers.extend(first.coverage.iter().map(|(n, _)| format!("Top{n}")));
        cov.headers.push("100T%".into());
        pairs.headers.extend(first.pair_coverage.iter().map(|(k, _)| format!("Top-{k}")));
        pairs.headers.push("Single".into());
    }

    for a in rows {
        let d = a.domain.clone();
        let s = &a.stats;
        stats.rows.push(vec![
            d.clone(),
            s.q_count.to_string(),
            s.tag_count.to_string(),
            f2(s.ppt),
            f2(s.avg_tags),
            s.views_gt_threshold.to_string(),
            s.askers.to_string(),
            f2(s.qpa),
        ]);
        more.rows.push(vec![
            d.clone(),
            s.q_count.to_string(),
            s.tag_count.to_string(),
            f2(s.ppt),
            f2(s.avg_tags),
            f2(s.pct_no_answers),
            f2(s.pct_no_scores),
            f2(s.pct_no_accepted),
            s.max_answers.to_string(),
            s.max_views.to_string(),
            s.views_gt_threshold.to_string(),
            s.askers.to_string(),
        ]);
        let mut r = vec![d.clone()];
        r.extend(a.word_lengths.buckets.iter().map(|v| f2(*v)));
        words.rows.push(r);
        if let Some(c) = &a.char_stats {
            chars.rows.push(vec![
                d.clone(),
                c.longest.clone(),
                c.longest_len.to_string(),
                c.shortest.clone(),
                c.shortest_len.to_string(),
                f2(c.average_len),
            ]);
        }
        let mut r = vec![d.clone(), s.tag_count.to_string()];
        r.extend(a.coverage.iter().map(|(_, v)| f2(*v)));
        r.push(f2(a.top100_tag_share));
        cov.rows.push(r);
        let mut r = vec![d.clone()];
        r.extend(a.pair_coverage.iter().map(|(_, v)| f2(*v)));
        r.push(f2(a.single_tag_pct));
        pairs.rows.push(r);
        for (i, p) in a.top_pairs.iter().enumerate() {
            top.rows.push(vec![
                d.clone(),
                (i + 1).to_string(),
                format!("('{}', '{}')", p.first, p.second),
                p.count.to_string(),
            ]);
        }
        for o in &a.orderings {
            let total = o.forward + o.backward;
            let pct = |c: u64| f2(100.0 * c as f64 / total as f64);
            order.rows.push(vec![
                d.clone(),
                total.to_string(),
                format!("({},{})", o.first, o.second),
                pct(o.forward),
                format!("({},{})", o.second, o.first),
                pct(o.backward),
            ]);
        }
        let mut r = vec![d.clone()];
        for s in OverlapScope::ALL {
            for m in [MatchMode::Ems, MatchMode::Emm] {
                r.push(f2(a.overlap.get(s, m)));
            }
        }
        overlap.rows.push(r);
        for rep in &a.stability {
            for (i, set) in rep.position_sets.iter().enumerate() {
                let positions = set.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",");
                let examples = rep.q_sets[i].iter().take(5).cloned().collect::<Vec<_>>().join(" ");
                stab.rows.push(vec![
                    d.clone(),
                    format!("{}", rep.delta),
                    positions,
                    rep.q_sets[i].len().to_string(),
                    rep.universe.to_string(),
                    f2(rep.st[i]),
                    examples,
                ]);
            }
        }
        for (i, (t, c)) in a.tag_series.iter().enumerate() {
            tag_series.rows.push(vec![d.clone(), (i + 1).to_string(), t.clone(), c.to_string()]);
        }
        for (i, p) in a.pair_series.iter().enumerate() {
            pair_series.rows.push(vec![
                d.clone(),
                (i + 1).to_string(),
                format!("{}+{}", p.first, p.second),
                p.count.to_string(),
            ]);
        }
    }
    vec![
        stats, more, words, chars, cov, pairs, top, order, overlap, stab, tag_series, pair_series,
    ]
}

/// A paired significance comparison between two models' per-run scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Significance {
    pub baseline: String,
    pub candidate: String,
    pub k: usize,
    pub result: WilcoxonResult,
}

/// Everything `eval` computed for one domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainEval {
    pub domain: String,
    pub reports: Vec<EvalReport>,
    pub oov: Vec<(String, OovStats)>,
    pub heads: Vec<(String, HeadContribution)>,
    pub significance: Vec<Significance>,
}

pub fn display_model(model: &str) -> &str {
    match model {
        "majority" => "Majority",
        "tfidf" => "TF-IDF",
        "bow" => "Bag-of-Words",
        other => other,
    }
}

fn mean_std(r: &EvalReport, k: usize) -> String {
    match r.hit(k) {
        Some(s) => match s.std {
            Some(sd) => format!("{}±{}", f2(s.mean), f2(sd)),
            None => f2(s.mean),
        },
        None => String::new(),
    }
}

pub fn eval_tables(rows: &[DomainEval]) -> Vec<Table> {
    let mut models: Vec<String> = Vec::new();
    for d in rows {
        for r in &d.reports {
            if !models.contains(&r.model) {
                models.push(r.model.clone());
            }
        }
    }
    let mut perf = Table::new("hit_at_5", &["Domain"]);
    perf.headers.extend(models.iter().map(|m| display_model(m).to_string()));
    let mut hitk = Table::new("hit_at_k", &["Domain", "Model", "Hit@1", "Hit@2", "Hit@3", "Hit@4", "Hit@5"]);
    let mut oov = Table::new("oov_stats", &["Domain", "Model", "% Posts", "% ALL Tags", "% OOV Tags"]);
    let mut heads = Table::new("head_contributions", &["Domain", "Model", "P", "G"]);
    let mut pv = Table::new("p_values", &["Domains", "Comparison", "P-Values", "Is Significant"]);

    for d in rows {
        let mut r = vec![d.domain.clone()];
        for m in &models {
            r.push(d.reports.iter().find(|x| &x.model == m).map(|x| mean_std(x, 5)).unwrap_or_default());
        }
        perf.rows.push(r);
        for rep in &d.reports {
            let mut r = vec![d.domain.clone(), display_model(&rep.model).to_string()];
            r.extend((1..=5).map(|k| mean_std(rep, k)));
            hitk.rows.push(r);
        }
        for (m, s) in &d.oov {
            oov.rows.push(vec![
                d.domain.clone(),
                display_model(m).to_string(),
                f2(s.pct_posts),
                f2(s.pct_all_tags),
                s.pct_oov_tags.map(f2).unwrap_or_default(),
            ]);
        }
        for (m, h) in &d.heads {
            heads.rows.push(vec![d.domain.clone(), display_model(m).to_string(), f2(h.p_only), f2(h.g_only)]);
        }
        for s in &d.significance {
            pv.rows.push(vec![
                d.domain.clone(),
                format!("{} vs {} (Hit@{})", display_model(&s.candidate), display_model(&s.baseline), s.k),
                format!("{:.5}", s.result.p_value),
                if s.result.p_value < 0.05 { "Yes" } else { "No" }.to_string(),
            ]);
        }
    }
    vec![perf, hitk, oov, heads, pv]
}

/// Writes each table as CSV and `value` as pretty JSON under `dir`.
pub fn write_report<T: Serialize>(dir: &Path, json_name: &str, value: &T, tables: &[Table]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut out = Vec::new();
    for t in tables {
        out.push(t.write_csv(dir)?);
    }
    let json = dir.join(json_name);
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(&json, text)?;
    out.push(json);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::{build_cooccurrence, compute_domain_stats, ordering_preference};
    use crate::config::AnalysisSection;
    use crate::eval::{wilcoxon_one_sided, RunHits};
    use crate::ingest::build_corpus;
    use crate::ingest::fixtures::{answer, question};
    use crate::report::analyze_domain;

    fn fixture() -> DomainAnalysis {
        let mut posts = vec![
            question(1, &["boot", "grub2"]),
            question(2, &["boot", "grub2", "dual-boot"]),
            question(3, &["grub2", "boot"]),
            question(4, &["bash"]),
            answer(10, 1),
        ];
        posts[0].title = "grub2 will not boot".into();
        let c = build_corpus(posts, "fx").unwrap();
        analyze_domain(&c, &AnalysisSection::default(), 100).unwrap()
    }

    #[test]
    fn csv_rows_match_direct_calls() {
        let a = fixture();
        let tables = analysis_tables(std::slice::from_ref(&a));
        let stats = &tables[0];
        assert_eq!(stats.headers, ["Domain", "#Q", "#T", "PPT", "AvgT", "V>100", "#A", "QPA"]);
        assert_eq!(stats.rows[0][1], "4");
        assert_eq!(stats.rows[0][2], a.stats.tag_count.to_string());

        let order = tables.iter().find(|t| t.name == "tag_ordering").unwrap();
        assert_eq!(order.rows[0], ["fx", "3", "(boot,grub2)", "66.67", "(grub2,boot)", "33.33"]);
        let cov = tables.iter().find(|t| t.name == "tag_post_coverage").unwrap();
        assert_eq!(cov.headers[2], "Top1");
        assert_eq!(cov.rows[0][2], "75.00");
    }

    #[test]
    fn analysis_equals_module_calls() {
        let c = build_corpus(
            vec![question(1, &["x", "y"]), question(2, &["y", "x"]), question(3, &["y"])],
            "d",
        )
        .unwrap();
        let a = analyze_domain(&c, &AnalysisSection::default(), 100).unwrap();
        assert_eq!(a.stats, compute_domain_stats(&c).unwrap());
        let co = build_cooccurrence(&c);
        assert_eq!(a.orderings[0], ordering_preference(&co, "x", "y").unwrap());
    }

    #[test]
    fn csv_written_and_p_value_formatting() {
        let run = |seed, v: f64| RunHits { seed, hit: [v; 5], evaluated: 10 };
        let mp: Vec<RunHits> = (0..5).map(|s| run(s, 70.0 + s as f64)).collect();
        let mrpg: Vec<RunHits> = (0..5).map(|s| run(s, 75.0 + s as f64)).collect();
        let x: Vec<f64> = mp.iter().map(|r| r.hit[4]).collect();
        let y: Vec<f64> = mrpg.iter().map(|r| r.hit[4]).collect();
        let d = DomainEval {
            domain: "fx".into(),
            reports: vec![
                EvalReport::new("fx", "MP", mp).unwrap(),
                EvalReport::new("fx", "MRPG", mrpg).unwrap(),
            ],
            oov: vec![],
            heads: vec![],
            significance: vec![Significance {
                baseline: "MP".into(),
                candidate: "MRPG".into(),
                k: 5,
                result: wilcoxon_one_sided(&x, &y).unwrap(),
            }],
        };
        let tables = eval_tables(std::slice::from_ref(&d));
        let pv = tables.iter().find(|t| t.name == "p_values").unwrap();
        assert_eq!(pv.rows[0][2], "0.03125");
        assert_eq!(pv.rows[0][3], "Yes");
        let dir = tempfile::tempdir().unwrap();
        let written = write_report(dir.path(), "eval.json", &[d], &tables).unwrap();
        assert_eq!(written.len(), tables.len() + 1);
        let text = std::fs::read_to_string(dir.path().join("hit_at_5.csv")).unwrap();
        assert_eq!(text, "Domain,MP,MRPG\nfx,72.00±1.58,77.00±1.58\n");
    }
}
