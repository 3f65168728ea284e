//! Weaker Separator Booster: pushes the strong model's forecast away from
//! the mean of the weak forecasts, with a weight that peaks mid-horizon.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

pub const DEFAULT_GLOBAL_WEIGHT: f64 = 0.0833;
/// Always evaluated by [`tune_global_weight`] besides the random samples.
pub const WEIGHT_ANCHORS: [f64; 3] = [0.0, DEFAULT_GLOBAL_WEIGHT, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WsbConfig {
    /// Global weight in `[0, 1]`.
    pub w: f64,
    /// Horizon; steps are numbered `1..=h`.
    pub h: usize,
}

impl Default for WsbConfig {
    fn default() -> Self {
        Self {
            w: DEFAULT_GLOBAL_WEIGHT,
            h: 12,
        }
    }
}

impl WsbConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.w) {
            return Err(Error::Validation(format!("WSB weight {} is outside [0, 1]", self.w)));
        }
        if self.h == 0 {
            return Err(Error::Validation("WSB horizon must be at least 1".into()));
        }
        Ok(())
    }
}

/// Triangular step weight `|1 - |t - h/2| / (h/2)| * w`.
pub fn weight_schedule(t: usize, cfg: &WsbConfig) -> Result<f64> {
    cfg.validate()?;
    if t == 0 || t > cfg.h {
        return Err(Error::Contract(format!("step {t} is outside 1..={}", cfg.h)));
    }
    let half = cfg.h as f64 / 2.0;
    Ok((1.0 - (t as f64 - half).abs() / half).abs() * cfg.w)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WsbResult {
    pub strong: Vec<f64>,
    pub weak_mean: Vec<f64>,
    pub weight: Vec<f64>,
    pub booster: Vec<f64>,
    pub combined: Vec<f64>,
    pub weak_count: usize,
}

pub fn wsb_combine(strong: &[f64], weak: &[Vec<f64>], cfg: &WsbConfig) -> Result<WsbResult> {
    cfg.validate()?;
    if weak.is_empty() {
        return Err(Error::Contract("at least one weak forecast is required".into()));
    }
    if strong.len() != cfg.h || weak.iter().any(|w| w.len() != cfg.h) {
        return Err(Error::Contract(format!("every forecast must have {} steps", cfg.h)));
    }
    let n = weak.len() as f64;
    let mut out = WsbResult {
        strong: strong.to_vec(),
        weak_mean: Vec::with_capacity(cfg.h),
        weight: Vec::with_capacity(cfg.h),
        booster: Vec::with_capacity(cfg.h),
        combined: Vec::with_capacity(cfg.h),
        weak_count: weak.len(),
    };
    for (i, &fs) in strong.iter().enumerate() {
        let wm = weak.iter().map(|w| w[i]).sum::<f64>() / n;
        let wt = weight_schedule(i + 1, cfg)?;
        let b = (fs - wm) * wt;
        out.weak_mean.push(wm);
        out.weight.push(wt);
        out.booster.push(b);
        out.combined.push(fs + b);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSearch {
    pub best_w: f64,
    pub best_score: f64,
    /// Every `(w, score)` evaluated: anchors first, then random samples.
    pub evaluated: Vec<(f64, f64)>,
}

/// Random search over `[0, 1]` plus [`WEIGHT_ANCHORS`]. The lowest finite
/// score wins; ties go to the smaller weight.
pub fn tune_global_weight(eval: &dyn Fn(f64) -> f64, n_samples: usize, seed: u64) -> Result<WeightSearch> {
    if n_samples == 0 {
        return Err(Error::Contract("weight search needs at least one sample".into()));
    }
    let mut r = rng::rng_from(seed);
    let candidates: Vec<f64> = WEIGHT_ANCHORS
        .iter()
        .copied()
        .chain((0..n_samples).map(|_| r.random_range(0.0..=1.0)))
        .collect();
    let evaluated: Vec<(f64, f64)> = candidates.into_iter().map(|w| (w, eval(w))).collect();
    let mut best: Option<(f64, f64)> = None;
    for &(w, s) in &evaluated {
        if !s.is_finite() {
            continue;
        }
        best = match best {
            Some((bw, bs)) if bs < s || (bs == s && bw <= w) => Some((bw, bs)),
            _ => Some((w, s)),
        };
    }
    let (best_w, best_score) = best.ok_or_else(|| Error::Undefined("every candidate weight scored non-finite".into()))?;
    Ok(WeightSearch {
        best_w,
        best_score,
        evaluated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn cfg(w: f64, h: usize) -> WsbConfig {
        WsbConfig { w, h }
    }

    #[test]
    fn schedule_hand_values() {
        let c = cfg(0.0833, 12);
        assert_eq!(weight_schedule(6, &c).unwrap(), 0.0833);
        assert_eq!(weight_schedule(12, &c).unwrap(), 0.0);
        assert!((weight_schedule(1, &c).unwrap() - 0.0833 / 6.0).abs() < 1e-12);
        assert!((weight_schedule(1, &c).unwrap() - 0.013883).abs() < 1e-6);
        assert!(weight_schedule(0, &c).is_err());
        assert!(weight_schedule(13, &c).is_err());
        assert!(weight_schedule(1, &cfg(1.5, 12)).is_err());
    }

    #[test]
    fn combine_hand_case() {
        let mut strong = vec![0.0; 12];
        strong[5] = 100.0;
        let weak = vec![vec![80.0; 12]; 3];
        let r = wsb_combine(&strong, &weak, &cfg(0.5, 12)).unwrap();
        assert_eq!(r.weight[5], 0.5);
        assert_eq!(r.booster[5], 10.0);
        assert_eq!(r.combined[5], 110.0);
        assert!(wsb_combine(&strong[..11], &weak, &cfg(0.5, 12)).is_err());
        assert!(wsb_combine(&strong, &[], &cfg(0.5, 12)).is_err());
    }

    #[test]
    fn tuning_rules() {
        let flat = tune_global_weight(&|_| 3.0, 10, 1).unwrap();
        assert_eq!(flat.best_w, 0.0);
        let q = tune_global_weight(&|w| (w - 0.3) * (w - 0.3), 500, 2).unwrap();
        assert!((q.best_w - 0.3).abs() < 0.05);
        assert_eq!(q.evaluated.len(), 503);
        assert!(tune_global_weight(&|_| f64::NAN, 5, 3).is_err());
        let anchors_only = tune_global_weight(&|w| if w == DEFAULT_GLOBAL_WEIGHT { 0.0 } else { f64::INFINITY }, 1, 4).unwrap();
        assert_eq!(anchors_only.best_w, DEFAULT_GLOBAL_WEIGHT);
        assert_eq!(WsbConfig::default().w, 0.0833);
    }

    fn instance() -> impl Strategy<Value = (Vec<f64>, Vec<Vec<f64>>, f64, usize)> {
        (1usize..30, 1usize..5).prop_flat_map(|(h, n)| {
            (
                proptest::collection::vec(0.0f64..5e4, h),
                proptest::collection::vec(proptest::collection::vec(0.0f64..5e4, h), n),
                0.0f64..=1.0,
                Just(h),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn identities_hold_bitwise((strong, weak, w, h) in instance()) {
            let c = cfg(w, h);
            let r = wsb_combine(&strong, &weak, &c).unwrap();
            for t in 0..h {
                let wm = weak.iter().map(|v| v[t]).sum::<f64>() / weak.len() as f64;
                prop_assert_eq!(r.weak_mean[t].to_bits(), wm.to_bits());
                prop_assert_eq!(r.booster[t].to_bits(), ((strong[t] - wm) * r.weight[t]).to_bits());
                prop_assert_eq!(r.combined[t].to_bits(), (strong[t] + r.booster[t]).to_bits());
                prop_assert!(r.weight[t] >= 0.0 && r.weight[t] <= w);
                if r.weight[t] > 0.0 && strong[t] != wm {
                    prop_assert_eq!((r.combined[t] - strong[t]).signum(), (strong[t] - wm).signum());
                }
            }
            let zero = wsb_combine(&strong, &weak, &cfg(0.0, h)).unwrap();
            prop_assert_eq!(&zero.combined, &strong);
            if w <= 0.5 {
                let twice = wsb_combine(&strong, &weak, &cfg(2.0 * w, h)).unwrap();
                for t in 0..h {
                    prop_assert_eq!(twice.booster[t], 2.0 * r.booster[t]);
                }
            }
        }

        #[test]
        fn schedule_peaks_and_is_symmetric(half in 1usize..40, w in 0.0f64..=1.0) {
            let c = cfg(w, 2 * half);
            prop_assert_eq!(weight_schedule(half, &c).unwrap(), w);
            for d in 0..half {
                prop_assert_eq!(weight_schedule(half - d, &c).unwrap(), weight_schedule(half + d, &c).unwrap());
            }
        }
    }
}
