//! Small statistical toolbox shared by the Monte Carlo harnesses.

use statrs::distribution::{ContinuousCDF, Normal};

/// Pairwise (cascade) summation in a fixed order.
///
/// Reductions over replica results go through this so reports are
/// bit-stable regardless of how many workers produced the inputs.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    pairwise_sum(xs) / xs.len() as f64
}

/// Unbiased sample variance.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let devs: Vec<f64> = xs.iter().map(|x| (x - m) * (x - m)).collect();
    pairwise_sum(&devs) / (n - 1) as f64
}

/// Standard error of the sample mean.
pub fn standard_error(xs: &[f64]) -> f64 {
    (sample_variance(xs) / xs.len() as f64).sqrt()
}

/// Empirical quantile with linear interpolation between order statistics.
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    assert!(!xs.is_empty() && (0.0..=1.0).contains(&q));
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

/// Ordinary least-squares line fit with a standard error on the slope.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
}

pub fn ols_line(x: &[f64], y: &[f64]) -> LineFit {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    assert!(n >= 2.0);
    let mx = mean(x);
    let my = mean(y);
    let sxx: f64 = x.iter().map(|xi| (xi - mx) * (xi - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(xi, yi)| (xi - mx) * (yi - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let dof = (n - 2.0).max(1.0);
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| {
            let r = yi - (intercept + slope * xi);
            r * r
        })
        .sum();
    LineFit {
        slope,
        intercept,
        slope_se: (ss_res / dof / sxx).sqrt(),
    }
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    assert!(trials > 0);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Kendall rank correlation with the normal approximation to its null law.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct KendallTau {
    pub tau: f64,
    pub z: f64,
    /// One-sided p-value for the alternative "decreasing" (tau < 0).
    pub p_decreasing: f64,
}

pub fn kendall_tau(x: &[f64], y: &[f64]) -> KendallTau {
    assert_eq!(x.len(), y.len());
    let n = x.len();
    assert!(n >= 2);
    let mut concordant = 0i64;
    let mut discordant = 0i64;
    for i in 0..n {
        for j in (i + 1)..n {
            let s = (x[j] - x[i]).signum() * (y[j] - y[i]).signum();
            if s > 0.0 {
                concordant += 1;
            } else if s < 0.0 {
                discordant += 1;
            }
        }
    }
    let pairs = (n * (n - 1) / 2) as f64;
    let tau = (concordant - discordant) as f64 / pairs;
    let nf = n as f64;
    let sigma = (2.0 * (2.0 * nf + 5.0) / (9.0 * nf * (nf - 1.0))).sqrt();
    let z = tau / sigma;
    KendallTau {
        tau,
        z,
        p_decreasing: normal_cdf(z),
    }
}

pub fn normal_cdf(x: f64) -> f64 {
    Normal::standard().cdf(x)
}

/// Upper tail probability of the standard normal.
pub fn normal_sf(x: f64) -> f64 {
    Normal::standard().sf(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pairwise_matches_naive_on_small_inputs() {
        let xs = [0.1, 0.2, 0.3, 0.4, 0.5];
        assert_relative_eq!(pairwise_sum(&xs), 1.5, epsilon = 1e-15);
    }

    #[test]
    fn ols_recovers_exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [3.0, 5.0, 7.0, 9.0];
        let fit = ols_line(&x, &y);
        assert_relative_eq!(fit.slope, 2.0, epsilon = 1e-12);
        assert_relative_eq!(fit.intercept, 1.0, epsilon = 1e-12);
        assert!(fit.slope_se < 1e-10);
    }

    #[test]
    fn wilson_contains_point_estimate() {
        let (lo, hi) = wilson_interval(13, 100, 1.959963984540054);
        assert!(lo < 0.13 && 0.13 < hi);
        assert!(lo > 0.0 && hi < 1.0);
    }

    #[test]
    fn kendall_detects_monotone_sequences() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0];
        let down = [7.0, 6.0, 5.0, 4.0, 3.0, 2.0, 1.0];
        let k = kendall_tau(&x, &down);
        assert_relative_eq!(k.tau, -1.0, epsilon = 1e-12);
        assert!(k.p_decreasing < 0.01);
        let up = kendall_tau(&x, &x);
        assert!(up.p_decreasing > 0.99);
    }

    #[test]
    fn normal_tail_matches_reference() {
        // Reference digits from an independent implementation
        // (scipy.stats.norm.sf); the rare-event oracles depend on this tail.
        assert_relative_eq!(
            normal_sf(1.0 / 0.2f64.sqrt()),
            1.2673659338734126e-2,
            max_relative = 1e-9
        );
        assert_relative_eq!(
            normal_sf(1.0 / 0.02f64.sqrt()),
            7.687298972140091e-13,
            max_relative = 1e-7
        );
    }
}
