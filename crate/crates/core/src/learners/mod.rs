//! Base learners behind one fit/predict contract.
//!
//! Neural and kernel learners (LSTM, ESN, SVR) see z-scored features and a
//! z-scored target; tree learners see raw values. Smoothing baselines ignore
//! features and forecast from the target series alone.

pub mod esn;
pub mod forest;
pub mod gbt;
pub mod lstm;
pub mod scaler;
pub mod smoothing;
pub mod svr;
pub mod tree;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::FeatureTable;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::metaheuristics::space::{Domain, SearchSpace};

pub use esn::{Esn, EsnParams};
pub use forest::{ForestParams, RandomForest};
pub use gbt::{GbtParams, GradientBoosting};
pub use lstm::{Activation, Lstm, LstmParams};
pub use scaler::Scaler;
pub use smoothing::{Smoothing, SmoothingKind};
pub use svr::{KernelKind, Svr, SvrParams};

/// Seasonal period used by the Holt-Winters baselines unless overridden.
pub const DEFAULT_PERIOD: i64 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "lstm")]
    Lstm,
    #[serde(rename = "rf")]
    Rf,
    #[serde(rename = "svr")]
    Svr,
    #[serde(rename = "gbt")]
    Gbt,
    #[serde(rename = "esn")]
    Esn,
    #[serde(rename = "ses")]
    Ses,
    #[serde(rename = "des")]
    Des,
    #[serde(rename = "hw_additive")]
    HwAdditive,
    #[serde(rename = "hw_multiplicative")]
    HwMultiplicative,
}

impl ModelKind {
    pub const TUNABLE: [ModelKind; 5] = [
        ModelKind::Lstm,
        ModelKind::Rf,
        ModelKind::Svr,
        ModelKind::Gbt,
        ModelKind::Esn,
    ];
    pub const SMOOTHING: [ModelKind; 4] = [
        ModelKind::Ses,
        ModelKind::Des,
        ModelKind::HwAdditive,
        ModelKind::HwMultiplicative,
    ];

    pub fn token(self) -> &'static str {
        match self {
            ModelKind::Lstm => "lstm",
            ModelKind::Rf => "rf",
            ModelKind::Svr => "svr",
            ModelKind::Gbt => "gbt",
            ModelKind::Esn => "esn",
            ModelKind::Ses => "ses",
            ModelKind::Des => "des",
            ModelKind::HwAdditive => "hw_additive",
            ModelKind::HwMultiplicative => "hw_multiplicative",
        }
    }

    pub fn smoothing_kind(self) -> Option<SmoothingKind> {
        match self {
            ModelKind::Ses => Some(SmoothingKind::Ses),
            ModelKind::Des => Some(SmoothingKind::Des),
            ModelKind::HwAdditive => Some(SmoothingKind::HwAdditive),
            ModelKind::HwMultiplicative => Some(SmoothingKind::HwMultiplicative),
            _ => None,
        }
    }

    pub fn is_smoothing(self) -> bool {
        self.smoothing_kind().is_some()
    }

    pub fn uses_scaling(self) -> bool {
        matches!(self, ModelKind::Lstm | ModelKind::Svr | ModelKind::Esn)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let all = ModelKind::TUNABLE.iter().chain(ModelKind::SMOOTHING.iter());
        all.copied()
            .find(|k| k.token() == s)
            .ok_or_else(|| Error::Validation(format!("unknown model kind `{s}`")))
    }
}

/// One hyperparameter value. Integers read as floats where a float is
/// expected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HpValue {
    Bool(bool),
    Int(i64),
    Float(f64),
    Token(String),
}

impl fmt::Display for HpValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HpValue::Bool(b) => write!(f, "{b}"),
            HpValue::Int(i) => write!(f, "{i}"),
            HpValue::Float(x) => write!(f, "{x}"),
            HpValue::Token(t) => f.write_str(t),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Hyperparams(pub BTreeMap<String, HpValue>);

impl Hyperparams {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, v: HpValue) -> Self {
        self.set(name, v);
        self
    }

    pub fn set(&mut self, name: &str, v: HpValue) {
        self.0.insert(name.to_string(), v);
    }

    pub fn get(&self, name: &str) -> Option<&HpValue> {
        self.0.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &HpValue)> {
        self.0.iter()
    }

    /// Overlays `other` on top of `self`.
    pub fn merged(&self, other: &Hyperparams) -> Self {
        let mut out = self.clone();
        for (k, v) in other.iter() {
            out.0.insert(k.clone(), v.clone());
        }
        out
    }

    fn err(name: &str, message: &str) -> Error {
        Error::Hyperparam {
            name: name.into(),
            message: message.into(),
        }
    }

    pub fn int(&self, name: &str) -> Result<i64> {
        match self.get(name) {
            Some(HpValue::Int(i)) => Ok(*i),
            Some(_) => Err(Self::err(name, "expected an integer")),
            None => Err(Self::err(name, "missing")),
        }
    }

    pub fn usize(&self, name: &str) -> Result<usize> {
        let v = self.int(name)?;
        usize::try_from(v).map_err(|_| Self::err(name, "must be non-negative"))
    }

    pub fn float(&self, name: &str) -> Result<f64> {
        match self.get(name) {
            Some(HpValue::Float(x)) => Ok(*x),
            Some(HpValue::Int(i)) => Ok(*i as f64),
            Some(_) => Err(Self::err(name, "expected a number")),
            None => Err(Self::err(name, "missing")),
        }
    }

    pub fn token(&self, name: &str) -> Result<&str> {
        match self.get(name) {
            Some(HpValue::Token(t)) => Ok(t),
            Some(_) => Err(Self::err(name, "expected a token")),
            None => Err(Self::err(name, "missing")),
        }
    }

    pub fn boolean(&self, name: &str) -> Result<bool> {
        match self.get(name) {
            Some(HpValue::Bool(b)) => Ok(*b),
            Some(_) => Err(Self::err(name, "expected a boolean")),
            None => Err(Self::err(name, "missing")),
        }
    }
}

fn int(v: i64) -> HpValue {
    HpValue::Int(v)
}

fn float(v: f64) -> HpValue {
    HpValue::Float(v)
}

fn token(v: &str) -> HpValue {
    HpValue::Token(v.into())
}

/// Selected values reported for the tuned learners; smoothing baselines only
/// carry their seasonal period.
pub fn default_hyperparams(kind: ModelKind) -> Hyperparams {
    let hp = Hyperparams::new();
    match kind {
        ModelKind::Lstm => hp
            .with("units", int(115))
            .with("epochs", int(98))
            .with("batch_size", int(117))
            .with("activation", token("tanh"))
            .with("bias", HpValue::Bool(true)),
        ModelKind::Rf => hp
            .with("n_estimators", int(13))
            .with("max_depth", int(281))
            .with("min_samples_split", int(13))
            .with("min_samples_leaf", int(2)),
        ModelKind::Svr => hp
            .with("C", float(1465.0))
            .with("epsilon", float(1.0))
            .with("kernel", token("sigmoid")),
        ModelKind::Gbt => hp
            .with("n_estimators", int(25))
            .with("max_depth", int(82))
            .with("booster", token("gbtree"))
            .with("lambda", float(0.151538))
            .with("alpha", float(97.963749)),
        ModelKind::Esn => hp
            .with("reservoirs", int(386))
            .with("sparsity", float(0.30))
            .with("spectral_radius", float(0.54))
            .with("noise", float(0.60)),
        _ => hp.with("period", int(DEFAULT_PERIOD)),
    }
}

/// Tuning domains. Smoothing baselines have no tunable dimensions.
pub fn search_space(kind: ModelKind) -> SearchSpace {
    let ir = |lo, hi| Domain::IntRange { lo, hi };
    let fr = |lo, hi| Domain::FloatRange { lo, hi };
    let dims = match kind {
        ModelKind::Lstm => vec![
            ("units", ir(1, 300)),
            ("epochs", ir(1, 100)),
            ("batch_size", ir(1, 300)),
            (
                "activation",
                Domain::categorical(&["linear", "mish", "sigmoid", "softmax", "softplus", "softsign", "tanh"]),
            ),
            ("bias", Domain::Boolean),
        ],
        ModelKind::Rf => vec![
            ("n_estimators", ir(10, 300)),
            ("max_depth", ir(10, 300)),
            ("min_samples_split", ir(2, 50)),
            ("min_samples_leaf", ir(1, 50)),
        ],
        ModelKind::Svr => vec![
            ("C", fr(1e-5, 20_000.0)),
            ("epsilon", fr(0.001, 1.0)),
            ("kernel", Domain::categorical(&["poly", "rbf", "sigmoid"])),
        ],
        // Only the tree booster is implemented.
        ModelKind::Gbt => vec![
            ("n_estimators", ir(1, 300)),
            ("max_depth", ir(1, 300)),
            ("booster", Domain::categorical(&["gbtree"])),
            ("lambda", fr(0.0, 100.0)),
            ("alpha", fr(0.0, 100.0)),
        ],
        ModelKind::Esn => vec![
            ("reservoirs", ir(2, 1000)),
            ("sparsity", fr(0.1, 0.5)),
            ("spectral_radius", fr(0.1, 0.9)),
            ("noise", fr(0.0001, 0.8)),
        ],
        _ => vec![],
    };
    SearchSpace::new(dims).expect("built-in spaces are valid")
}

fn parse_activation(t: &str) -> Result<Activation> {
    Activation::ALL
        .iter()
        .copied()
        .find(|a| format!("{a:?}").to_lowercase() == t)
        .ok_or_else(|| Hyperparams::err("activation", "unknown activation"))
}

fn parse_kernel(t: &str) -> Result<KernelKind> {
    match t {
        "poly" => Ok(KernelKind::Poly),
        "rbf" => Ok(KernelKind::Rbf),
        "sigmoid" => Ok(KernelKind::Sigmoid),
        _ => Err(Hyperparams::err("kernel", "unknown kernel")),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", content = "state", rename_all = "snake_case")]
pub enum ModelParams {
    Lstm(Lstm),
    Rf(RandomForest),
    Svr(Svr),
    Gbt(GradientBoosting),
    Esn(Esn),
    Smoothing(Smoothing),
}

/// A trained model with everything needed to reproduce its predictions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    pub kind: ModelKind,
    pub hyperparams: Hyperparams,
    pub feature_names: Vec<String>,
    pub x_scaler: Option<Scaler>,
    pub y_scaler: Option<Scaler>,
    pub seed: u64,
    pub params: ModelParams,
    pub warnings: Vec<String>,
}

/// Anything that maps named feature rows to kWh predictions.
pub trait Regressor {
    fn feature_names(&self) -> &[String];

    /// Predictions for rows already ordered as [`Regressor::feature_names`].
    fn predict_matrix(&self, x: &Matrix) -> Result<Vec<f64>>;

    fn predict(&self, x: &FeatureTable) -> Result<Vec<f64>> {
        let m = x.conform(self.feature_names())?;
        self.predict_matrix(&m)
    }

    /// Multi-step forecast that needs no feature rows.
    fn native_forecast(&self, _h: usize) -> Option<Vec<f64>> {
        None
    }

    /// Whether a prediction depends on the rows scored before it.
    fn stateful(&self) -> bool {
        false
    }

    fn predict_row(&self, row: &[f64]) -> Result<f64> {
        let m = Matrix::from_vec(1, row.len(), row.to_vec())?;
        Ok(self.predict_matrix(&m)?[0])
    }
}

/// Fits `kind` on `(x, y)`. Required hyperparameters must lie in the
/// model's search space; GBT additionally accepts `learning_rate`.
pub fn fit(kind: ModelKind, x: &FeatureTable, y: &[f64], hp: &Hyperparams, seed: u64) -> Result<FittedModel> {
    if y.len() != x.rows() && !kind.is_smoothing() {
        return Err(Error::Contract(format!("{} feature rows for {} targets", x.rows(), y.len())));
    }
    if y.is_empty() {
        return Err(Error::EmptyInput("cannot fit on zero rows"));
    }
    search_space(kind).check(hp)?;
    let mut warnings = Vec::new();
    let (x_scaler, y_scaler) = if kind.uses_scaling() {
        (Some(Scaler::fit(&x.values)?), Some(Scaler::fit_column(y)?))
    } else {
        (None, None)
    };
    let xs = match &x_scaler {
        Some(s) => s.transform(&x.values),
        None => x.values.clone(),
    };
    let z = match &y_scaler {
        Some(s) => s.transform_values(y),
        None => y.to_vec(),
    };
    let params = match kind {
        ModelKind::Rf => ModelParams::Rf(RandomForest::fit(
            &xs,
            &z,
            &ForestParams {
                n_estimators: hp.usize("n_estimators")?,
                max_depth: hp.usize("max_depth")?,
                min_samples_split: hp.usize("min_samples_split")?,
                min_samples_leaf: hp.usize("min_samples_leaf")?,
            },
            seed,
        )?),
        ModelKind::Gbt => ModelParams::Gbt(GradientBoosting::fit(
            &xs,
            &z,
            &GbtParams {
                n_estimators: hp.usize("n_estimators")?,
                max_depth: hp.usize("max_depth")?,
                lambda: hp.float("lambda")?,
                alpha: hp.float("alpha")?,
                learning_rate: match hp.get("learning_rate") {
                    Some(_) => hp.float("learning_rate")?,
                    None => gbt::DEFAULT_LEARNING_RATE,
                },
            },
        )?),
        ModelKind::Svr => {
            let p = SvrParams {
                c: hp.float("C")?,
                epsilon: hp.float("epsilon")?,
                kernel: parse_kernel(hp.token("kernel")?)?,
            };
            let m = Svr::fit(&xs, &z, &p)?;
            if !m.converged {
                warnings.push(format!(
                    "svr: stopped after {} iterations before reaching the KKT tolerance",
                    m.iterations
                ));
            }
            ModelParams::Svr(m)
        }
        ModelKind::Lstm => ModelParams::Lstm(Lstm::fit(
            &xs,
            &z,
            &LstmParams {
                units: hp.usize("units")?,
                epochs: hp.usize("epochs")?,
                batch_size: hp.usize("batch_size")?,
                activation: parse_activation(hp.token("activation")?)?,
                bias: hp.boolean("bias")?,
            },
            seed,
        )?),
        ModelKind::Esn => ModelParams::Esn(Esn::fit(
            &xs,
            &z,
            &EsnParams {
                reservoirs: hp.usize("reservoirs")?,
                sparsity: hp.float("sparsity")?,
                spectral_radius: hp.float("spectral_radius")?,
                noise: hp.float("noise")?,
            },
            seed,
        )?),
        _ => {
            let sk = kind.smoothing_kind().expect("smoothing kinds are exhaustive");
            let period = match hp.get("period") {
                Some(_) => hp.usize("period")?,
                None => DEFAULT_PERIOD as usize,
            };
            ModelParams::Smoothing(Smoothing::fit(y, sk, period)?)
        }
    };
    Ok(FittedModel {
        kind,
        hyperparams: hp.clone(),
        feature_names: if kind.is_smoothing() { Vec::new() } else { x.names.clone() },
        x_scaler,
        y_scaler,
        seed,
        params,
        warnings,
    })
}

impl FittedModel {
    fn raw_predictions(&self, xs: &Matrix) -> Vec<f64> {
        match &self.params {
            ModelParams::Rf(m) => xs.iter_rows().map(|r| m.predict_row(r)).collect(),
            ModelParams::Gbt(m) => xs.iter_rows().map(|r| m.predict_row(r)).collect(),
            ModelParams::Svr(m) => xs.iter_rows().map(|r| m.predict_row(r)).collect(),
            ModelParams::Lstm(m) => xs.iter_rows().map(|r| m.predict_row(r)).collect(),
            ModelParams::Esn(m) => m.predict(xs),
            ModelParams::Smoothing(m) => m.forecast(xs.rows()),
        }
    }

    /// True when a prediction depends on earlier rows of the same call.
    pub fn is_stateful(&self) -> bool {
        matches!(self.params, ModelParams::Esn(_) | ModelParams::Smoothing(_))
    }
}

impl Regressor for FittedModel {
    fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    fn stateful(&self) -> bool {
        self.is_stateful()
    }

    /// Stateless learners score rows independently. The ESN drives its
    /// reservoir through the rows in order, resuming from the last training
    /// state; smoothing baselines treat rows as the next consecutive periods.
    fn predict_matrix(&self, x: &Matrix) -> Result<Vec<f64>> {
        if x.rows() == 0 {
            return Ok(Vec::new());
        }
        if !self.kind.is_smoothing() && x.cols() != self.feature_names.len() {
            return Err(Error::Contract(format!(
                "expected {} feature columns, got {}",
                self.feature_names.len(),
                x.cols()
            )));
        }
        let scaled;
        let xs = match &self.x_scaler {
            Some(s) => {
                scaled = s.transform(x);
                &scaled
            }
            None => x,
        };
        let raw = self.raw_predictions(xs);
        Ok(match &self.y_scaler {
            Some(s) => s.inverse_values(&raw),
            None => raw,
        })
    }

    fn predict(&self, x: &FeatureTable) -> Result<Vec<f64>> {
        if self.kind.is_smoothing() {
            return self.predict_matrix(&x.values);
        }
        let m = x.conform(&self.feature_names)?;
        self.predict_matrix(&m)
    }

    fn native_forecast(&self, h: usize) -> Option<Vec<f64>> {
        match &self.params {
            ModelParams::Smoothing(m) => Some(m.forecast(h)),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::Rng as _;

    fn table(rows: usize, cols: usize, seed: u64) -> FeatureTable {
        let mut r = rng::rng_from(seed);
        let data = (0..rows * cols).map(|_| r.random_range(-2.0..2.0)).collect();
        let names = (0..cols).map(|j| format!("f{j}")).collect();
        FeatureTable::new(names, Matrix::from_vec(rows, cols, data).unwrap()).unwrap()
    }

    fn small_hp(kind: ModelKind) -> Hyperparams {
        let d = default_hyperparams(kind);
        match kind {
            ModelKind::Lstm => d.with("units", int(6)).with("epochs", int(5)).with("batch_size", int(8)),
            ModelKind::Esn => d.with("reservoirs", int(30)),
            _ => d,
        }
    }

    #[test]
    fn defaults_lie_in_their_spaces() {
        for k in ModelKind::TUNABLE {
            assert!(search_space(k).contains(&default_hyperparams(k)), "{k}");
        }
    }

    #[test]
    fn kind_tokens_round_trip() {
        for k in ModelKind::TUNABLE.iter().chain(ModelKind::SMOOTHING.iter()) {
            assert_eq!(k.token().parse::<ModelKind>().unwrap(), *k);
        }
        assert!("cnn".parse::<ModelKind>().is_err());
    }

    #[test]
    fn row_permutation_permutes_predictions() {
        let x = table(30, 3, 1);
        let y: Vec<f64> = x.values.iter_rows().map(|r| 100.0 + 5.0 * r[0] - 2.0 * r[1]).collect();
        let perm: Vec<usize> = (0..30).rev().collect();
        let xp = FeatureTable::new(x.names.clone(), x.values.select_rows(&perm)).unwrap();
        for k in [ModelKind::Rf, ModelKind::Gbt, ModelKind::Svr, ModelKind::Lstm] {
            let m = fit(k, &x, &y, &small_hp(k), 9).unwrap();
            let a = m.predict(&x).unwrap();
            let b = m.predict(&xp).unwrap();
            for (i, &p) in perm.iter().enumerate() {
                assert_eq!(b[i], a[p], "{k}");
            }
        }
    }

    #[test]
    fn column_mismatch_names_columns() {
        let x = table(20, 2, 2);
        let y = vec![1.0; 20];
        let m = fit(ModelKind::Gbt, &x, &y, &small_hp(ModelKind::Gbt), 0).unwrap();
        let wrong = FeatureTable::new(vec!["f0".into(), "g".into()], x.values.clone()).unwrap();
        match m.predict(&wrong) {
            Err(Error::ColumnMismatch { missing, extra }) => {
                assert_eq!(missing, vec![String::from("f1")]);
                assert_eq!(extra, vec![String::from("g")]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(m.predict(&FeatureTable::empty(x.names.clone())).unwrap(), Vec::<f64>::new());
    }

    #[test]
    fn reordered_columns_are_conformed() {
        let x = table(20, 2, 3);
        let y: Vec<f64> = x.values.iter_rows().map(|r| r[0] * 3.0).collect();
        let m = fit(ModelKind::Rf, &x, &y, &small_hp(ModelKind::Rf), 1).unwrap();
        let swapped = FeatureTable::new(vec!["f1".into(), "f0".into()], x.values.select_cols(&[1, 0])).unwrap();
        assert_eq!(m.predict(&x).unwrap(), m.predict(&swapped).unwrap());
    }

    #[test]
    fn same_seed_same_model() {
        let x = table(25, 3, 4);
        let y: Vec<f64> = x.values.iter_rows().map(|r| r[0] + r[2]).collect();
        for k in ModelKind::TUNABLE {
            let a = fit(k, &x, &y, &small_hp(k), 77).unwrap();
            let b = fit(k, &x, &y, &small_hp(k), 77).unwrap();
            assert_eq!(a, b, "{k}");
            assert_eq!(a.predict(&x).unwrap(), a.predict(&x).unwrap());
        }
    }

    #[test]
    fn svr_shift_moves_predictions() {
        let x = table(25, 2, 5);
        let y: Vec<f64> = x.values.iter_rows().map(|r| 50.0 + 4.0 * r[0]).collect();
        let shifted: Vec<f64> = y.iter().map(|v| v + 1000.0).collect();
        let hp = default_hyperparams(ModelKind::Svr).with("kernel", token("rbf"));
        let a = fit(ModelKind::Svr, &x, &y, &hp, 0).unwrap().predict(&x).unwrap();
        let b = fit(ModelKind::Svr, &x, &shifted, &hp, 0).unwrap().predict(&x).unwrap();
        for (p, q) in a.iter().zip(&b) {
            assert!((q - p - 1000.0).abs() < 1e-9);
        }
    }

    #[test]
    fn out_of_space_hyperparams_are_rejected() {
        let x = table(10, 1, 6);
        let y = vec![1.0; 10];
        let hp = default_hyperparams(ModelKind::Rf).with("n_estimators", int(5));
        assert!(matches!(fit(ModelKind::Rf, &x, &y, &hp, 0), Err(Error::Hyperparam { .. })));
        let hp = default_hyperparams(ModelKind::Gbt).with("booster", token("dart"));
        assert!(fit(ModelKind::Gbt, &x, &y, &hp, 0).is_err());
    }

    #[test]
    fn smoothing_uses_native_forecast() {
        let y: Vec<f64> = (0..30).map(|t| 10.0 + t as f64).collect();
        let x = FeatureTable::empty(Vec::new());
        let m = fit(ModelKind::Des, &x, &y, &default_hyperparams(ModelKind::Des), 0).unwrap();
        let f = m.native_forecast(3).unwrap();
        for (k, v) in f.iter().enumerate() {
            assert!((v - (40.0 + k as f64)).abs() < 1e-9);
        }
    }
}
