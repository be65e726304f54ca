use super::special::{normal_two_sided, student_t_two_sided};
use super::{average_ranks, check_sample, Degeneracy, TestMethod, TestResult};
use crate::error::{Error, Result};

/// Largest number of nonzero differences for which the Wilcoxon test is
/// evaluated exactly; above this the normal approximation is used.
pub const WILCOXON_EXACT_MAX_N: usize = 15;

/// Both Mann-Whitney samples need at least this many observations for the
/// normal approximation; otherwise the exact null distribution is used.
const MANN_WHITNEY_NORMAL_MIN: usize = 8;

fn check_paired(a: &[f64], b: &[f64]) -> Result<()> {
    check_sample(a)?;
    check_sample(b)?;
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    Ok(())
}

/// Two-sided paired t-test on the differences `a - b`.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TestResult> {
    check_paired(a, b)?;
    let n = a.len();
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = d.iter().sum::<f64>() / n as f64;
    let var = d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let sd = var.sqrt();
    let result = |statistic, p_value, degenerate| TestResult {
        statistic,
        p_value,
        method: TestMethod::PairedT,
        n_effective: n,
        degenerate,
    };
    if sd == 0.0 {
        return Ok(if mean == 0.0 {
            result(0.0, 1.0, Some(Degeneracy::ZeroVariance))
        } else {
            result(
                f64::INFINITY.copysign(mean),
                0.0,
                Some(Degeneracy::InfiniteStatistic),
            )
        });
    }
    let t = mean / (sd / (n as f64).sqrt());
    Ok(result(t, student_t_two_sided(t, (n - 1) as f64), None))
}

/// Number of ways to pick `k` items from `items` (integer scores) for each
/// possible score total. Index = total.
fn subset_sum_counts(items: &[u64], k: usize) -> Vec<f64> {
    let mut sorted = items.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let max_sum: u64 = sorted.iter().take(k).sum();
    let width = max_sum as usize + 1;
    // dp[j][s]: subsets of size j with total s
    let mut dp = vec![vec![0.0f64; width]; k + 1];
    dp[0][0] = 1.0;
    for (seen, &item) in items.iter().enumerate() {
        let item = item as usize;
        for j in (1..=k.min(seen + 1)).rev() {
            let (lower, upper) = dp.split_at_mut(j);
            let prev = &lower[j - 1];
            let cur = &mut upper[0];
            for s in (item..width).rev() {
                let add = prev[s - item];
                if add != 0.0 {
                    cur[s] += add;
                }
            }
        }
    }
    dp.swap_remove(k)
}

/// Wilcoxon signed-rank test on `a - b`.
///
/// Zero differences are dropped, ties in |d| get average ranks and the
/// statistic is `min(W+, W-)`. The two-sided p-value is exact for up to
/// [`WILCOXON_EXACT_MAX_N`] nonzero differences; otherwise it uses the
/// normal approximation with tie and continuity corrections.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<TestResult> {
    check_paired(a, b)?;
    let d: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|v| *v != 0.0)
        .collect();
    let n = d.len();
    if n == 0 {
        return Err(Error::AllZeroDifferences);
    }
    let abs: Vec<f64> = d.iter().map(|v| v.abs()).collect();
    let (ranks, ties) = average_ranks(&abs);
    let w_plus: f64 = d
        .iter()
        .zip(&ranks)
        .filter(|(v, _)| **v > 0.0)
        .map(|(_, r)| r)
        .sum();
    let w_minus: f64 = d
        .iter()
        .zip(&ranks)
        .filter(|(v, _)| **v < 0.0)
        .map(|(_, r)| r)
        .sum();
    let w = w_plus.min(w_minus);

    let p_value = if n <= WILCOXON_EXACT_MAX_N {
        // every sign assignment is equally likely under H0; doubled ranks
        // are integers even with average ranks
        let doubled: Vec<u64> = ranks.iter().map(|r| (2.0 * r).round() as u64).collect();
        let mut totals = vec![0.0f64; doubled.iter().sum::<u64>() as usize + 1];
        totals[0] = 1.0;
        let mut reach = 0usize;
        for &r in &doubled {
            let r = r as usize;
            for s in (0..=reach).rev() {
                let c = totals[s];
                if c != 0.0 {
                    totals[s + r] += c;
                }
            }
            reach += r;
        }
        let w2 = (2.0 * w).round() as usize;
        let at_most: f64 = totals[..=w2].iter().sum();
        (2.0 * at_most / 2f64.powi(n as i32)).min(1.0)
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / 48.0;
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term;
        let z = ((w - mean).abs() - 0.5).max(0.0) / var.sqrt();
        normal_two_sided(z)
    };

    Ok(TestResult {
        statistic: w,
        p_value,
        method: TestMethod::WilcoxonSignedRank,
        n_effective: n,
        degenerate: None,
    })
}

/// Two-sided Mann-Whitney U test treating `a` and `b` as independent.
///
/// The reported statistic is U for sample `a`. Exact null distribution
/// (ties included) unless both samples have at least 8 observations, in
/// which case the tie- and continuity-corrected normal approximation is
/// used.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<TestResult> {
    check_sample(a)?;
    check_sample(b)?;
    let (n1, n2) = (a.len(), b.len());
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = average_ranks(&pooled);
    let r1: f64 = ranks[..n1].iter().sum();
    let u1 = r1 - (n1 * (n1 + 1)) as f64 / 2.0;
    let big_n = (n1 + n2) as f64;
    let mean = (n1 * n2) as f64 / 2.0;

    let p_value = if n1 >= MANN_WHITNEY_NORMAL_MIN && n2 >= MANN_WHITNEY_NORMAL_MIN {
        let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum();
        let var = (n1 * n2) as f64 / 12.0 * ((big_n + 1.0) - tie_term / (big_n * (big_n - 1.0)));
        if var <= 0.0 {
            1.0
        } else {
            let z = ((u1 - mean).abs() - 0.5).max(0.0) / var.sqrt();
            normal_two_sided(z)
        }
    } else {
        // rank sum of the smaller group over all equally likely splits
        let doubled: Vec<u64> = ranks.iter().map(|r| (2.0 * r).round() as u64).collect();
        let (k, observed) = if n1 <= n2 {
            (n1, doubled[..n1].iter().sum::<u64>())
        } else {
            (n2, doubled[n1..].iter().sum::<u64>())
        };
        let counts = subset_sum_counts(&doubled, k);
        let total: f64 = counts.iter().sum();
        let obs = observed as usize;
        let lower: f64 = counts[..=obs.min(counts.len() - 1)].iter().sum();
        let upper: f64 = counts.get(obs..).map_or(0.0, |c| c.iter().sum());
        (2.0 * lower.min(upper) / total).min(1.0)
    };

    Ok(TestResult {
        statistic: u1,
        p_value,
        method: TestMethod::MannWhitneyU,
        n_effective: n1 + n2,
        degenerate: None,
    })
}

/// Spearman rank correlation with a t-approximation p-value.
///
/// A constant input gives a NaN statistic flagged as
/// [`Degeneracy::ConstantSeries`] with p = 1.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<TestResult> {
    check_paired(a, b)?;
    let n = a.len();
    if n < 3 {
        return Err(Error::TooFewSamples { needed: 3, got: n });
    }
    let (ra, _) = average_ranks(a);
    let (rb, _) = average_ranks(b);
    let mean = (n + 1) as f64 / 2.0;
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in ra.iter().zip(&rb) {
        let (dx, dy) = (x - mean, y - mean);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Ok(TestResult {
            statistic: f64::NAN,
            p_value: 1.0,
            method: TestMethod::Spearman,
            n_effective: n,
            degenerate: Some(Degeneracy::ConstantSeries),
        });
    }
    let rho = (sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0);
    let df = (n - 2) as f64;
    let p_value = if rho.abs() >= 1.0 {
        0.0
    } else {
        let t = rho * (df / (1.0 - rho * rho)).sqrt();
        student_t_two_sided(t, df)
    };
    Ok(TestResult {
        statistic: rho,
        p_value,
        method: TestMethod::Spearman,
        n_effective: n,
        degenerate: None,
    })
}
