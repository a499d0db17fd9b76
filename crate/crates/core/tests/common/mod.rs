#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet};

use cqatag::ingest::{build_corpus, DomainCorpus, Post, PostType};
use cqatag::rng::SeededRng;

pub fn question(id: i64, tags: &[&str]) -> Post {
    Post {
        id,
        post_type: PostType::Question,
        parent_id: None,
        title: format!("question {id}"),
        body: String::new(),
        tags: tags.iter().map(|t| t.to_string()).collect(),
        owner_id: Some(id % 7),
        owner_display_name: None,
        score: 0,
        view_count: 0,
        answer_count: 0,
        accepted_answer_id: None,
        creation_date: "2015-01-01T00:00:00.000".into(),
    }
}

pub fn corpus(posts: Vec<Post>) -> DomainCorpus {
    build_corpus(posts, "fixture").unwrap()
}

/// Tag names for a pool of `n` tags.
pub fn tag_pool(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("t{i:03}")).collect()
}

/// Distinct tags drawn with a skew towards the start of `pool`.
pub fn draw_tags(rng: &mut SeededRng, pool: &[String], max: usize) -> Vec<String> {
    let want = 1 + rng.below(max as u64) as usize;
    let mut out: Vec<String> = Vec::new();
    let mut guard = 0;
    while out.len() < want && guard < 100 {
        guard += 1;
        let a = rng.below(pool.len() as u64);
        let b = rng.below(pool.len() as u64);
        let t = &pool[a.min(b) as usize];
        if !out.contains(t) {
            out.push(t.clone());
        }
    }
    out
}

/// A random corpus of `n` questions with skewed tags, owners and views.
pub fn random_corpus(rng: &mut SeededRng, n: usize, pool_size: usize) -> DomainCorpus {
    let pool = tag_pool(pool_size);
    let posts = (0..n as i64)
        .map(|id| {
            let tags = draw_tags(rng, &pool, 5);
            let mut q = question(id, &tags.iter().map(String::as_str).collect::<Vec<_>>());
            q.owner_id = Some(rng.below(n as u64 / 2 + 1) as i64);
            q.view_count = rng.below(300);
            q
        })
        .collect::<Vec<_>>();
    corpus(posts)
}

/// One `Posts.xml` row as a test generator sees it.
#[derive(Debug, Clone)]
pub struct RawRow {
    pub id: i64,
    pub post_type: u8,
    pub parent: Option<i64>,
    pub owner: Option<i64>,
    pub views: u64,
    pub tags: Vec<String>,
    pub title: String,
    pub body: String,
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub fn xml_row(r: &RawRow) -> String {
    let mut s = format!(
        "  <row Id=\"{}\" PostTypeId=\"{}\" CreationDate=\"2016-05-05T10:00:00.000\" Score=\"0\"",
        r.id, r.post_type
    );
    if let Some(p) = r.parent {
        s.push_str(&format!(" ParentId=\"{p}\""));
    }
    if r.post_type == 1 {
        let field: String = r.tags.iter().map(|t| format!("<{t}>")).collect();
        s.push_str(&format!(
            " ViewCount=\"{}\" Title=\"{}\" Tags=\"{}\" AnswerCount=\"0\"",
            r.views,
            esc(&r.title),
            esc(&field)
        ));
    }
    if let Some(o) = r.owner {
        s.push_str(&format!(" OwnerUserId=\"{o}\""));
    }
    s.push_str(&format!(" Body=\"{}\" />\n", esc(&r.body)));
    s
}

pub fn xml_document(rows: &[RawRow]) -> String {
    let mut s = String::from("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<posts>\n");
    for r in rows {
        s.push_str(&xml_row(r));
    }
    s.push_str("</posts>\n");
    s
}

/// Random dump rows: questions, answers to them, and the occasional ownerless question.
pub fn random_rows(rng: &mut SeededRng, questions: usize) -> Vec<RawRow> {
    let pool = tag_pool(40);
    let mut rows = Vec::new();
    let mut next = 1i64;
    for _ in 0..questions {
        let id = next;
        next += 1;
        let mut tags = draw_tags(rng, &pool, 5);
        if rng.below(5) == 0 {
            tags[0] = tags[0].to_uppercase();
        }
        rows.push(RawRow {
            id,
            post_type: 1,
            parent: None,
            owner: (rng.below(30) != 0).then(|| rng.below(questions as u64 / 3 + 1) as i64),
            views: rng.below(250),
            tags,
            title: format!("how to fix {id}"),
            body: format!("<p>details & more {id}</p>"),
        });
        for _ in 0..rng.below(3) {
            rows.push(RawRow {
                id: next,
                post_type: 2,
                parent: Some(id),
                owner: Some(rng.below(50) as i64),
                views: 0,
                tags: Vec::new(),
                title: String::new(),
                body: "<p>answer</p>".into(),
            });
            next += 1;
        }
    }
    rows
}

/// Table-style statistics computed straight from raw rows.
#[derive(Debug, Clone, PartialEq)]
pub struct StatsOracle {
    pub q: u64,
    pub t: u64,
    pub ppt: f64,
    pub avg_t: f64,
    pub views_gt: u64,
    pub askers: u64,
    pub qpa: f64,
}

pub fn stats_oracle(rows: &[RawRow], view_threshold: u64) -> StatsOracle {
    let qs: Vec<&RawRow> = rows.iter().filter(|r| r.post_type == 1 && r.owner.is_some()).collect();
    let mut tags = BTreeSet::new();
    let mut incidences = 0u64;
    for q in &qs {
        let mut seen = BTreeSet::new();
        for t in &q.tags {
            let t = t.to_lowercase();
            if seen.insert(t.clone()) {
                incidences += 1;
                tags.insert(t);
            }
        }
    }
    let askers: HashSet<i64> = qs.iter().filter_map(|q| q.owner).collect();
    let q = qs.len() as f64;
    StatsOracle {
        q: qs.len() as u64,
        t: tags.len() as u64,
        ppt: q / tags.len() as f64,
        avg_t: incidences as f64 / q,
        views_gt: qs.iter().filter(|r| r.views > view_threshold).count() as u64,
        askers: askers.len() as u64,
        qpa: q / askers.len() as f64,
    }
}

/// Tags ranked by question count, ties lexicographic.
pub fn ranked_tags(c: &DomainCorpus) -> Vec<(String, u64)> {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for q in &c.questions {
        for t in &q.tags {
            *counts.entry(t.clone()).or_default() += 1;
        }
    }
    let mut v: Vec<(String, u64)> = counts.into_iter().collect();
    v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    v
}

/// Percentage of questions holding any of the `n` top tags, by direct scan.
pub fn coverage_oracle(c: &DomainCorpus, n: usize) -> f64 {
    let top: Vec<String> = ranked_tags(c).into_iter().take(n).map(|x| x.0).collect();
    let hit = c.questions.iter().filter(|q| q.tags.iter().any(|t| top.contains(t))).count();
    100.0 * hit as f64 / c.questions.len() as f64
}

/// Stable tag sets by direct membership counting.
pub fn stability_oracle(c: &DomainCorpus, positions: &[usize], delta: f64) -> (BTreeSet<String>, usize) {
    let tags: BTreeSet<String> = c.questions.iter().flat_map(|q| q.tags.iter().cloned()).collect();
    let mut stable = BTreeSet::new();
    for t in &tags {
        let mut inside = 0u64;
        let mut total = 0u64;
        for q in &c.questions {
            for (i, qt) in q.tags.iter().enumerate() {
                if qt == t {
                    total += 1;
                    if positions.contains(&(i + 1)) {
                        inside += 1;
                    }
                }
            }
        }
        if 100.0 * inside as f64 / total as f64 > delta {
            stable.insert(t.clone());
        }
    }
    (stable, tags.len())
}

/// `(forward, backward)` counts for an ordered pair, by direct scan.
pub fn ordering_oracle(c: &DomainCorpus, first: &str, second: &str) -> (u64, u64) {
    let mut f = 0;
    let mut b = 0;
    for q in &c.questions {
        let i = q.tags.iter().position(|t| t == first);
        let j = q.tags.iter().position(|t| t == second);
        if let (Some(i), Some(j)) = (i, j) {
            if i < j {
                f += 1;
            } else {
                b += 1;
            }
        }
    }
    (f, b)
}

pub fn approx(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
