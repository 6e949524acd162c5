//! Small statistics helpers shared by the estimators and the test suites:
//! means with normal confidence intervals, Bernoulli standard errors,
//! least-squares fits, a chi-square statistic with an approximate quantile,
//! binomial pmf utilities and a golden-section minimizer.

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Sample mean.
pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn sample_variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Standard error of the sample mean.
pub fn stderr_of_mean(xs: &[f64]) -> f64 {
    (sample_variance(xs) / xs.len() as f64).sqrt()
}

/// Mean together with its standard error and 95% normal interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanCi {
    pub mean: f64,
    pub se: f64,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

pub fn mean_ci95(xs: &[f64]) -> MeanCi {
    let m = mean(xs);
    let se = stderr_of_mean(xs);
    MeanCi {
        mean: m,
        se,
        lo: m - Z95 * se,
        hi: m + Z95 * se,
        n: xs.len(),
    }
}

/// Standard error of a Bernoulli mean `p_hat` over `n` trials.
pub fn bernoulli_se(p_hat: f64, n: u64) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    (p_hat * (1.0 - p_hat) / n as f64).sqrt()
}

/// Lower 95% confidence bound for a Bernoulli mean (Wilson score interval).
/// Stays sensible at `hits = 0` and `hits = n`, unlike the normal interval.
pub fn wilson_lower95(hits: u64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    let p = hits as f64 / nf;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / nf;
    let centre = p + z2 / (2.0 * nf);
    let half = Z95 * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    ((centre - half) / denom).max(0.0)
}

/// Ordinary least squares fit of `y = slope * x + intercept`.
#[derive(Clone, Copy, Debug)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = mean(xs);
    let my = mean(ys);
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 || n < 3.0 {
        1.0
    } else {
        (sxy * sxy) / (sxx * syy)
    };
    LinearFit {
        slope,
        intercept,
        r2,
    }
}

/// Pearson chi-square statistic for observed counts against expected counts.
/// Expected cells at zero are skipped when the observed cell is also zero.
pub fn chi_square_stat(observed: &[f64], expected: &[f64]) -> f64 {
    assert_eq!(observed.len(), expected.len());
    let mut stat = 0.0;
    for (&o, &e) in observed.iter().zip(expected) {
        if e <= 0.0 {
            if o > 0.0 {
                return f64::INFINITY;
            }
            continue;
        }
        stat += (o - e) * (o - e) / e;
    }
    stat
}

/// Approximate upper quantile of the chi-square distribution via the
/// Wilson–Hilferty cube transform. Accurate to a few parts in a thousand for
/// the degrees of freedom used in the tests.
pub fn chi_square_quantile(dof: usize, z: f64) -> f64 {
    let k = dof as f64;
    let t = 1.0 - 2.0 / (9.0 * k) + z * (2.0 / (9.0 * k)).sqrt();
    k * t * t * t
}

/// 99% chi-square quantile.
pub fn chi_square_quantile99(dof: usize) -> f64 {
    chi_square_quantile(dof, 2.326_347_874_040_841)
}

/// Binomial(n, p) pmf as a dense vector over 0..=n, by the multiplicative
/// recurrence.
pub fn binomial_pmf(n: u64, p: f64) -> Vec<f64> {
    let n_us = n as usize;
    let mut pmf = vec![0.0; n_us + 1];
    if p <= 0.0 {
        pmf[0] = 1.0;
        return pmf;
    }
    if p >= 1.0 {
        pmf[n_us] = 1.0;
        return pmf;
    }
    let q = 1.0 - p;
    // start from P(X=0) = q^n in log space to avoid underflow for large n
    let log_q = q.ln();
    let mut log_term = n as f64 * log_q;
    let ratio = p / q;
    let mut terms = vec![0.0; n_us + 1];
    terms[0] = log_term;
    for k in 0..n_us {
        log_term += ((n - k as u64) as f64 / (k as f64 + 1.0)).ln() + ratio.ln();
        terms[k + 1] = log_term;
    }
    for (k, &lt) in terms.iter().enumerate() {
        pmf[k] = lt.exp();
    }
    pmf
}

/// Quantile function of Binomial(n, p): the smallest k with `CDF(k) >= u`.
pub fn binomial_quantile(n: u64, p: f64, u: f64) -> u64 {
    let pmf = binomial_pmf(n, p);
    let mut acc = 0.0;
    for (k, &m) in pmf.iter().enumerate() {
        acc += m;
        if u <= acc {
            return k as u64;
        }
    }
    n
}

/// Golden-section search for the minimum of a unimodal function on `[lo, hi]`.
/// Returns `(argmin, min)`.
pub fn golden_section_min(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
    max_iter: usize,
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..max_iter {
        if (b - a).abs() < tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_fit_recovers_exact_line() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x - 2.0).collect();
        let fit = linear_fit(&xs, &ys);
        assert!((fit.slope - 3.0).abs() < 1e-12);
        assert!((fit.intercept + 2.0).abs() < 1e-12);
        assert!((fit.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chi_square_quantiles_match_tables() {
        // reference values: 9.210, 11.345, 16.812
        assert!((chi_square_quantile99(2) - 9.210).abs() < 0.05);
        assert!((chi_square_quantile99(3) - 11.345).abs() < 0.05);
        assert!((chi_square_quantile99(6) - 16.812).abs() < 0.05);
    }

    #[test]
    fn binomial_pmf_sums_to_one() {
        for &(n, p) in &[(3u64, 0.5), (10, 0.3), (25, 0.9)] {
            let s: f64 = binomial_pmf(n, p).iter().sum();
            assert!((s - 1.0).abs() < 1e-10, "n={n} p={p} sum={s}");
        }
    }

    #[test]
    fn binomial_quantile_monotone_in_u() {
        let mut prev = 0;
        for i in 1..100 {
            let u = i as f64 / 100.0;
            let k = binomial_quantile(20, 0.4, u);
            assert!(k >= prev);
            prev = k;
        }
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, _) = golden_section_min(|t| (t - 1.3) * (t - 1.3), 0.0, 4.0, 1e-9, 200);
        assert!((x - 1.3).abs() < 1e-6);
    }

    #[test]
    fn wilson_lower_bound_behaves() {
        assert!(wilson_lower95(0, 100) < 1e-12);
        let lb = wilson_lower95(50, 100);
        assert!(lb > 0.38 && lb < 0.5);
    }
}
