use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use super::StatsError;
use crate::numeric::median;

/// Largest pooled size for which the exact null distribution is used.
pub const EXACT_MAX_N: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Alternative {
    TwoSided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Exact,
    NormalApprox,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    /// U of the first sample: its rank sum minus `n_a (n_a + 1) / 2`.
    pub u_statistic: f64,
    pub p_value: f64,
    pub method: Method,
    pub median_a: f64,
    pub median_b: f64,
    pub n_a: usize,
    pub n_b: usize,
    pub alpha: f64,
    pub significant: bool,
}

/// Average ranks (1-based) of `values`, plus Σ(t³ − t) over tie groups.
pub fn average_ranks(values: &[f64]) -> (Vec<f64>, f64) {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < idx.len() {
        let mut j = i + 1;
        while j < idx.len() && values[idx[j]] == values[idx[i]] {
            j += 1;
        }
        let avg = (i + j + 1) as f64 / 2.0;
        for &k in &idx[i..j] {
            ranks[k] = avg;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    (ranks, tie_term)
}

/// Number of ways each U value arises when `m` of `m + n` distinct ranks
/// are assigned to the first sample. Index = U.
fn u_frequencies(m: usize, n: usize) -> Vec<f64> {
    // table[i][j] = frequencies for sizes (i, j)
    let mut table: Vec<Vec<Vec<f64>>> = vec![vec![Vec::new(); n + 1]; m + 1];
    for i in 0..=m {
        for j in 0..=n {
            table[i][j] = if i == 0 || j == 0 {
                vec![1.0]
            } else {
                let mut f = vec![0.0; i * j + 1];
                // largest rank goes to the first sample (adds j to U) or the second
                for (u, v) in table[i - 1][j].iter().enumerate() {
                    f[u + j] += v;
                }
                for (u, v) in table[i][j - 1].iter().enumerate() {
                    f[u] += v;
                }
                f
            };
        }
    }
    std::mem::take(&mut table[m][n])
}

fn exact_two_sided(u: f64, m: usize, n: usize) -> f64 {
    let freq = u_frequencies(m, n);
    let total: f64 = freq.iter().sum();
    let u = u.round() as usize;
    let lower: f64 = freq[..=u].iter().sum::<f64>() / total;
    let upper: f64 = freq[u..].iter().sum::<f64>() / total;
    (2.0 * lower.min(upper)).min(1.0)
}

fn normal_two_sided(u: f64, m: usize, n: usize, tie_term: f64) -> f64 {
    let (mf, nf) = (m as f64, n as f64);
    let big_n = mf + nf;
    let mu = mf * nf / 2.0;
    let correction = if big_n > 1.0 {
        tie_term / (big_n * (big_n - 1.0))
    } else {
        0.0
    };
    let var = mf * nf / 12.0 * ((big_n + 1.0) - correction);
    if !(var > 0.0) {
        return 1.0;
    }
    let z = ((u - mu).abs() - 0.5).max(0.0) / var.sqrt();
    // two-sided tail: 2 · (1 − Φ(z)) = erfc(z / √2)
    erfc(z / std::f64::consts::SQRT_2).min(1.0)
}

/// Two-sample Mann-Whitney U test.
///
/// Exact null distribution when the pooled size is at most
/// [`EXACT_MAX_N`] and there are no ties; otherwise the normal
/// approximation with tie-corrected variance and continuity correction.
pub fn mann_whitney_u(
    a: &[f64],
    b: &[f64],
    alternative: Alternative,
    alpha: f64,
) -> Result<TestResult, StatsError> {
    run(a, b, alternative, alpha, None)
}

/// [`mann_whitney_u`] with the p-value method forced. `Exact` fails on ties.
pub fn mann_whitney_u_with(
    a: &[f64],
    b: &[f64],
    alternative: Alternative,
    alpha: f64,
    method: Method,
) -> Result<TestResult, StatsError> {
    run(a, b, alternative, alpha, Some(method))
}

fn run(
    a: &[f64],
    b: &[f64],
    alternative: Alternative,
    alpha: f64,
    forced: Option<Method>,
) -> Result<TestResult, StatsError> {
    let Alternative::TwoSided = alternative;
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::EmptySample {
            n_a: a.len(),
            n_b: b.len(),
        });
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, tie_term) = average_ranks(&pooled);
    let (m, n) = (a.len(), b.len());
    let rank_sum_a: f64 = ranks[..m].iter().sum();
    let u = rank_sum_a - (m * (m + 1)) as f64 / 2.0;

    let method = forced.unwrap_or(if m + n <= EXACT_MAX_N && tie_term == 0.0 {
        Method::Exact
    } else {
        Method::NormalApprox
    });
    let p_value = match method {
        Method::Exact if tie_term != 0.0 => return Err(StatsError::TiesInExact),
        Method::Exact => exact_two_sided(u, m, n),
        Method::NormalApprox => normal_two_sided(u, m, n, tie_term),
    };
    Ok(TestResult {
        u_statistic: u,
        p_value,
        method,
        median_a: median(a),
        median_b: median(b),
        n_a: m,
        n_b: n,
        alpha,
        significant: p_value < alpha,
    })
}
