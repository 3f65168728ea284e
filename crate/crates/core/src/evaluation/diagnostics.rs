use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{chi_square_sf, normal_two_sided_p};

/// KPSS level-stationarity critical value at the 10% level.
pub const KPSS_CRITICAL_10PCT: f64 = 0.146;
pub const SIGNIFICANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correlogram {
    /// `acf[k]` for `k = 0..=max_lag`; `acf[0] = 1`.
    pub acf: Vec<f64>,
    /// `pacf[k]` for `k = 0..=max_lag`; `pacf[0] = 1` by convention.
    pub pacf: Vec<f64>,
    /// Half-width of the 95% band, `1.96 / sqrt(n)`.
    pub band: f64,
}

fn autocovariances(x: &[f64], max_lag: usize) -> Vec<f64> {
    let n = x.len();
    let m = x.iter().sum::<f64>() / n as f64;
    (0..=max_lag)
        .map(|k| (k..n).map(|t| (x[t] - m) * (x[t - k] - m)).sum::<f64>() / n as f64)
        .collect()
}

pub fn acf_pacf(x: &[f64], max_lag: usize) -> Result<Correlogram> {
    if max_lag >= x.len() {
        return Err(Error::InsufficientData(format!(
            "max lag {max_lag} needs more than {} observations",
            x.len()
        )));
    }
    let g = autocovariances(x, max_lag);
    if g[0] <= 0.0 || !g[0].is_finite() {
        return Err(Error::Undefined("autocorrelation of a constant series".into()));
    }
    let acf: Vec<f64> = g.iter().map(|v| v / g[0]).collect();

    // Durbin-Levinson.
    let mut pacf = vec![1.0; max_lag + 1];
    let mut phi: Vec<f64> = Vec::new();
    let mut v = 1.0;
    for k in 1..=max_lag {
        let num = acf[k] - phi.iter().enumerate().map(|(j, p)| p * acf[k - 1 - j]).sum::<f64>();
        let a = if v > 0.0 { num / v } else { 0.0 };
        let mut next: Vec<f64> = (0..phi.len()).map(|j| phi[j] - a * phi[phi.len() - 1 - j]).collect();
        next.push(a);
        phi = next;
        v *= 1.0 - a * a;
        pacf[k] = a;
    }
    Ok(Correlogram {
        acf,
        pacf,
        band: 1.96 / (x.len() as f64).sqrt(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub statistic: f64,
    /// Critical value for KPSS, p-value for the others.
    pub p_value: Option<f64>,
    pub critical_value: Option<f64>,
    pub conclusion: String,
}

/// KPSS level-stationarity statistic with a Bartlett-kernel long-run
/// variance truncated at `floor(4 (n/100)^(1/4))`.
pub fn kpss(x: &[f64]) -> Result<TestOutcome> {
    let n = x.len();
    if n < 3 {
        return Err(Error::InsufficientData(format!("KPSS needs at least 3 observations, got {n}")));
    }
    let lag = (4.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize;
    let lag = lag.min(n - 1);
    let g = autocovariances(x, lag);
    let lrv = g[0] + 2.0 * (1..=lag).map(|j| (1.0 - j as f64 / (lag + 1) as f64) * g[j]).sum::<f64>();
    if lrv <= 0.0 {
        return Err(Error::Undefined("KPSS long-run variance is not positive".into()));
    }
    let m = x.iter().sum::<f64>() / n as f64;
    let mut s = 0.0;
    let mut ss = 0.0;
    for v in x {
        s += v - m;
        ss += s * s;
    }
    let stat = ss / ((n * n) as f64 * lrv);
    Ok(TestOutcome {
        statistic: stat,
        p_value: None,
        critical_value: Some(KPSS_CRITICAL_10PCT),
        conclusion: if stat > KPSS_CRITICAL_10PCT {
            "non-stationary".into()
        } else {
            "stationary".into()
        },
    })
}

/// Sizes of runs of equal values in `sorted`.
fn tie_groups(sorted: &[f64]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        out.push(j - i);
        i = j;
    }
    out
}

/// Mann-Kendall S with tie-corrected variance and continuity correction.
pub fn mann_kendall(x: &[f64]) -> Result<TestOutcome> {
    let n = x.len();
    if n < 3 {
        return Err(Error::InsufficientData(format!("Mann-Kendall needs at least 3 observations, got {n}")));
    }
    let mut s = 0i64;
    for i in 0..n {
        for j in i + 1..n {
            s += match x[j].partial_cmp(&x[i]) {
                Some(core::cmp::Ordering::Greater) => 1,
                Some(core::cmp::Ordering::Less) => -1,
                _ => 0,
            };
        }
    }
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    let nf = n as f64;
    let ties: f64 = tie_groups(&sorted)
        .into_iter()
        .map(|t| {
            let t = t as f64;
            t * (t - 1.0) * (2.0 * t + 5.0)
        })
        .sum();
    let var = (nf * (nf - 1.0) * (2.0 * nf + 5.0) - ties) / 18.0;
    let z = if var <= 0.0 || s == 0 {
        0.0
    } else if s > 0 {
        (s as f64 - 1.0) / var.sqrt()
    } else {
        (s as f64 + 1.0) / var.sqrt()
    };
    let p = normal_two_sided_p(z);
    Ok(TestOutcome {
        statistic: s as f64,
        p_value: Some(p),
        critical_value: None,
        conclusion: if p < SIGNIFICANCE { "trend".into() } else { "no trend".into() },
    })
}

/// Midranks (1-based) of `x`.
pub fn midranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i + 1;
        while j < idx.len() && x[idx[j]] == x[idx[i]] {
            j += 1;
        }
        let r = (i + j + 1) as f64 / 2.0;
        for &k in &idx[i..j] {
            ranks[k] = r;
        }
        i = j;
    }
    ranks
}

/// Kruskal-Wallis H over the groups `i mod period`, tie corrected.
pub fn kruskal_wallis(x: &[f64], period: usize) -> Result<TestOutcome> {
    if period < 2 || x.len() < 2 * period {
        return Err(Error::InsufficientData(format!(
            "seasonality test needs two full periods of {period}, got {} observations",
            x.len()
        )));
    }
    let n = x.len() as f64;
    let ranks = midranks(x);
    let mut sum = vec![0.0; period];
    let mut count = vec![0usize; period];
    for (i, r) in ranks.iter().enumerate() {
        sum[i % period] += r;
        count[i % period] += 1;
    }
    let h_raw = 12.0 / (n * (n + 1.0)) * (0..period).map(|g| sum[g] * sum[g] / count[g] as f64).sum::<f64>()
        - 3.0 * (n + 1.0);
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    let t: f64 = tie_groups(&sorted).into_iter().map(|t| (t as f64).powi(3) - t as f64).sum();
    let c = 1.0 - t / (n * n * n - n);
    let h = if c <= 0.0 { 0.0 } else { (h_raw / c).max(0.0) };
    let p = chi_square_sf(h, (period - 1) as f64);
    Ok(TestOutcome {
        statistic: h,
        p_value: Some(p),
        critical_value: None,
        conclusion: if p < SIGNIFICANCE {
            "seasonality".into()
        } else {
            "no seasonality".into()
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub n: usize,
    pub correlogram: Correlogram,
    pub kpss: TestOutcome,
    pub mann_kendall: TestOutcome,
    pub kruskal_wallis: TestOutcome,
    pub notes: Vec<String>,
}

pub const CONVENTION_NOTE: &str = "conclusions use the standard rules (KPSS statistic against 0.146, \
     p < 0.05 otherwise); published summaries that pair a Mann-Kendall p-value below 0.05 with \
     'no trend' (or above it with 'trend') disagree with this convention and are not imitated";

pub fn stationarity_trend_seasonality(x: &[f64], period: usize, max_lag: usize) -> Result<DiagnosticsReport> {
    let kruskal_wallis = kruskal_wallis(x, period)?;
    Ok(DiagnosticsReport {
        n: x.len(),
        correlogram: acf_pacf(x, max_lag)?,
        kpss: kpss(x)?,
        mann_kendall: mann_kendall(x)?,
        kruskal_wallis,
        notes: vec![CONVENTION_NOTE.into()],
    })
}
