use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{invalid, Result};

/// Largest number of nonzero differences handled by the exact null distribution.
pub const EXACT_MAX: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WilcoxonMethod {
    Exact,
    /// Normal approximation with tie and continuity correction.
    NormalApprox,
    /// Every difference was zero; `p_value` is 1.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    pub p_value: f64,
    /// Sum of ranks of the positive differences `y - x`.
    pub w_plus: f64,
    /// Nonzero differences that were ranked.
    pub n_nonzero: usize,
    pub n_zero: usize,
    pub method: WilcoxonMethod,
}

/// Mid-ranks of `|d|` (1-based, ties averaged), returned doubled so they are integers.
fn doubled_ranks(abs: &[f64]) -> Vec<u64> {
    let mut order: Vec<usize> = (0..abs.len()).collect();
    order.sort_by(|&a, &b| abs[a].total_cmp(&abs[b]));
    let mut ranks = vec![0u64; abs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && abs[order[j + 1]] == abs[order[i]] {
            j += 1;
        }
        // Ranks i+1..=j+1 averaged, doubled: (i+1 + j+1).
        let r2 = (i + j + 2) as u64;
        for &k in &order[i..=j] {
            ranks[k] = r2;
        }
        i = j + 1;
    }
    ranks
}

/// Number of sign assignments reaching each doubled rank sum.
fn null_counts(ranks2: &[u64]) -> Vec<u64> {
    let total: u64 = ranks2.iter().sum();
    let mut counts = vec![0u64; total as usize + 1];
    counts[0] = 1;
    let mut reach = 0usize;
    for &r in ranks2 {
        let r = r as usize;
        for s in (0..=reach).rev() {
            if counts[s] != 0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    counts
}

/// One-sided Wilcoxon signed-rank test of H1: `y` tends to exceed `x`.
///
/// Zero differences are dropped and tied magnitudes get averaged ranks. The
/// p-value is `P(W+ >= observed)` under the sign-flip null, computed exactly
/// for up to [`EXACT_MAX`] nonzero differences.
pub fn wilcoxon_one_sided(x: &[f64], y: &[f64]) -> Result<WilcoxonResult> {
    if x.len() != y.len() {
        return Err(invalid(format!("paired samples differ in length: {} vs {}", x.len(), y.len())));
    }
    if x.is_empty() {
        return Err(invalid("no paired samples"));
    }
    let diffs: Vec<f64> = x.iter().zip(y).map(|(a, b)| b - a).collect();
    if diffs.iter().any(|d| d.is_nan()) {
        return Err(invalid("NaN in paired samples"));
    }
    let nonzero: Vec<f64> = diffs.iter().copied().filter(|&d| d != 0.0).collect();
    let n_zero = diffs.len() - nonzero.len();
    let m = nonzero.len();
    if m == 0 {
        return Ok(WilcoxonResult {
            p_value: 1.0,
            w_plus: 0.0,
            n_nonzero: 0,
            n_zero,
            method: WilcoxonMethod::Degenerate,
        });
    }

    let abs: Vec<f64> = nonzero.iter().map(|d| d.abs()).collect();
    let ranks2 = doubled_ranks(&abs);
    let w2: u64 = ranks2
        .iter()
        .zip(&nonzero)
        .filter(|(_, &d)| d > 0.0)
        .map(|(&r, _)| r)
        .sum();
    let w_plus = w2 as f64 / 2.0;

    let (p_value, method) = if m <= EXACT_MAX {
        let counts = null_counts(&ranks2);
        let upper: u64 = counts[w2 as usize..].iter().sum();
        (upper as f64 / 2f64.powi(m as i32), WilcoxonMethod::Exact)
    } else {
        (normal_upper_tail(w_plus, &ranks2), WilcoxonMethod::NormalApprox)
    };
    Ok(WilcoxonResult {
        p_value,
        w_plus,
        n_nonzero: m,
        n_zero,
        method,
    })
}

fn normal_upper_tail(w_plus: f64, ranks2: &[u64]) -> f64 {
    let m = ranks2.len() as f64;
    let mean = m * (m + 1.0) / 4.0;
    let mut sorted = ranks2.to_vec();
    sorted.sort_unstable();
    let mut tie_term = 0.0;
    for group in sorted.chunk_by(|a, b| a == b) {
        let t = group.len() as f64;
        tie_term += t * t * t - t;
    }
    let var = m * (m + 1.0) * (2.0 * m + 1.0) / 24.0 - tie_term / 48.0;
    if var <= 0.0 {
        return if w_plus >= mean { 1.0 } else { 0.0 };
    }
    let z = (w_plus - mean - 0.5) / var.sqrt();
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    1.0 - std_normal.cdf(z)
}
