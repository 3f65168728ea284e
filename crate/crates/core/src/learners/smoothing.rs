//! Exponential smoothing baselines.
//!
//! Coefficients are picked from the grid `0.01, 0.02, ..., 1.00` by minimal
//! one-step-ahead in-sample squared error. Ties keep the first grid point in
//! lexicographic order, i.e. the smallest coefficients.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothingKind {
    Ses,
    Des,
    HwAdditive,
    HwMultiplicative,
}

/// Final filter state after the training series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Smoothing {
    pub kind: SmoothingKind,
    pub alpha: f64,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub period: usize,
    pub level: f64,
    pub trend: f64,
    /// Seasonal factors for the next `period` steps, in order.
    pub season: Vec<f64>,
    pub sse: f64,
}

fn grid() -> impl Iterator<Item = f64> + Clone {
    (1..=100).map(|k| k as f64 / 100.0)
}

struct Run {
    level: f64,
    trend: f64,
    season: Vec<f64>,
    sse: f64,
}

impl Smoothing {
    pub fn fit(y: &[f64], kind: SmoothingKind, period: usize) -> Result<Self> {
        validate(y, kind, period)?;
        let mut best: Option<(f64, f64, f64, Run)> = None;
        let mut consider = |a: f64, b: f64, g: f64, run: Run| {
            if best.as_ref().is_none_or(|(_, _, _, r)| run.sse < r.sse) {
                best = Some((a, b, g, run));
            }
        };
        match kind {
            SmoothingKind::Ses => {
                for a in grid() {
                    consider(a, 0.0, 0.0, ses(y, a));
                }
            }
            SmoothingKind::Des => {
                for a in grid() {
                    for b in grid() {
                        consider(a, b, 0.0, des(y, a, b));
                    }
                }
            }
            SmoothingKind::HwAdditive | SmoothingKind::HwMultiplicative => {
                let mult = kind == SmoothingKind::HwMultiplicative;
                let init = hw_init(y, period, mult);
                for a in grid() {
                    for b in grid() {
                        for g in grid() {
                            consider(a, b, g, holt_winters(y, period, mult, &init, a, b, g));
                        }
                    }
                }
            }
        }
        let (alpha, beta, gamma, run) = best.expect("grid is non-empty");
        Ok(Self::assemble(kind, period, alpha, beta, gamma, run))
    }

    fn assemble(kind: SmoothingKind, period: usize, alpha: f64, beta: f64, gamma: f64, run: Run) -> Self {
        Self {
            kind,
            alpha,
            beta: (kind != SmoothingKind::Ses).then_some(beta),
            gamma: matches!(kind, SmoothingKind::HwAdditive | SmoothingKind::HwMultiplicative).then_some(gamma),
            period,
            level: run.level,
            trend: run.trend,
            season: run.season,
            sse: run.sse,
        }
    }

    /// Fits with fixed coefficients instead of the grid search.
    pub fn with_coefficients(
        y: &[f64],
        kind: SmoothingKind,
        period: usize,
        alpha: f64,
        beta: f64,
        gamma: f64,
    ) -> Result<Self> {
        validate(y, kind, period)?;
        let run = match kind {
            SmoothingKind::Ses => ses(y, alpha),
            SmoothingKind::Des => des(y, alpha, beta),
            _ => {
                let mult = kind == SmoothingKind::HwMultiplicative;
                holt_winters(y, period, mult, &hw_init(y, period, mult), alpha, beta, gamma)
            }
        };
        Ok(Self::assemble(kind, period, alpha, beta, gamma, run))
    }

    /// Forecasts for steps `1..=h` after the training series.
    pub fn forecast(&self, h: usize) -> Vec<f64> {
        (1..=h)
            .map(|k| {
                let kf = k as f64;
                match self.kind {
                    SmoothingKind::Ses => self.level,
                    SmoothingKind::Des => self.level + kf * self.trend,
                    SmoothingKind::HwAdditive => {
                        self.level + kf * self.trend + self.season[(k - 1) % self.period]
                    }
                    SmoothingKind::HwMultiplicative => {
                        (self.level + kf * self.trend) * self.season[(k - 1) % self.period]
                    }
                }
            })
            .collect()
    }
}

fn validate(y: &[f64], kind: SmoothingKind, period: usize) -> Result<()> {
    let seasonal = matches!(kind, SmoothingKind::HwAdditive | SmoothingKind::HwMultiplicative);
    if seasonal && period == 0 {
        return Err(Error::Contract("seasonal period must be positive".into()));
    }
    let need = match kind {
        SmoothingKind::Ses => 1,
        SmoothingKind::Des => 2,
        _ => 2 * period,
    };
    if y.len() < need {
        return Err(Error::InsufficientData(alloc::format!(
            "{kind:?} needs at least {need} observations, got {}",
            y.len()
        )));
    }
    if kind == SmoothingKind::HwMultiplicative && y.iter().any(|&v| v <= 0.0) {
        return Err(Error::Domain("multiplicative Holt-Winters needs a strictly positive series".into()));
    }
    Ok(())
}

fn ses(y: &[f64], a: f64) -> Run {
    let mut l = y[0];
    let mut sse = 0.0;
    for &v in &y[1..] {
        let e = v - l;
        sse += e * e;
        l = a * v + (1.0 - a) * l;
    }
    Run {
        level: l,
        trend: 0.0,
        season: Vec::new(),
        sse,
    }
}

fn des(y: &[f64], a: f64, b: f64) -> Run {
    let mut l = y[0];
    let mut t = y[1] - y[0];
    let mut sse = 0.0;
    for &v in &y[1..] {
        let f = l + t;
        sse += (v - f) * (v - f);
        let nl = a * v + (1.0 - a) * f;
        t = b * (nl - l) + (1.0 - b) * t;
        l = nl;
    }
    Run {
        level: l,
        trend: t,
        season: Vec::new(),
        sse,
    }
}

struct HwInit {
    level: f64,
    trend: f64,
    season: Vec<f64>,
}

/// Level and trend at the end of the first season from the first two
/// season means; seasonal indices against that trend line. A series made of
/// a line plus a fixed seasonal pattern is recovered exactly.
fn hw_init(y: &[f64], m: usize, mult: bool) -> HwInit {
    let mf = m as f64;
    let mean1 = y[..m].iter().sum::<f64>() / mf;
    let mean2 = y[m..2 * m].iter().sum::<f64>() / mf;
    let trend = (mean2 - mean1) / mf;
    let center = (mf - 1.0) / 2.0;
    let season = (0..m)
        .map(|j| {
            let line = mean1 + trend * (j as f64 - center);
            if mult {
                y[j] / line
            } else {
                y[j] - line
            }
        })
        .collect();
    HwInit {
        level: mean1 + trend * center,
        trend,
        season,
    }
}

fn holt_winters(y: &[f64], m: usize, mult: bool, init: &HwInit, a: f64, b: f64, g: f64) -> Run {
    let mut l = init.level;
    let mut t = init.trend;
    // season[i % m] holds the factor for index i.
    let mut s = init.season.clone();
    let mut sse = 0.0;
    for (i, &v) in y.iter().enumerate().skip(m) {
        let si = s[i % m];
        let f = if mult { (l + t) * si } else { l + t + si };
        sse += (v - f) * (v - f);
        let nl = if mult {
            a * v / si + (1.0 - a) * (l + t)
        } else {
            a * (v - si) + (1.0 - a) * (l + t)
        };
        t = b * (nl - l) + (1.0 - b) * t;
        l = nl;
        s[i % m] = if mult {
            g * v / l + (1.0 - g) * si
        } else {
            g * (v - l) + (1.0 - g) * si
        };
    }
    let n = y.len();
    let season = (0..m).map(|k| s[(n + k) % m]).collect();
    Run {
        level: l,
        trend: t,
        season,
        sse,
    }
}
