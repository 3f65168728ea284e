use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::{HpValue, Hyperparams};
use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Domain {
    IntRange { lo: i64, hi: i64 },
    FloatRange { lo: f64, hi: f64 },
    Categorical { tokens: Vec<String> },
    Boolean,
}

impl Domain {
    pub fn categorical(tokens: &[&str]) -> Self {
        Domain::Categorical {
            tokens: tokens.iter().map(|t| t.to_string()).collect(),
        }
    }

    pub fn sample(&self, r: &mut Rng) -> HpValue {
        match self {
            Domain::IntRange { lo, hi } => HpValue::Int(r.random_range(*lo..=*hi)),
            Domain::FloatRange { lo, hi } => {
                HpValue::Float(if lo == hi { *lo } else { r.random_range(*lo..=*hi) })
            }
            Domain::Categorical { tokens } => HpValue::Token(tokens[r.random_range(0..tokens.len())].clone()),
            Domain::Boolean => HpValue::Bool(r.random_bool(0.5)),
        }
    }

    pub fn contains(&self, v: &HpValue) -> bool {
        match (self, v) {
            (Domain::IntRange { lo, hi }, HpValue::Int(x)) => lo <= x && x <= hi,
            (Domain::FloatRange { lo, hi }, HpValue::Float(x)) => *lo <= *x && *x <= *hi,
            (Domain::FloatRange { lo, hi }, HpValue::Int(x)) => *lo <= *x as f64 && *x as f64 <= *hi,
            (Domain::Categorical { tokens }, HpValue::Token(t)) => tokens.contains(t),
            (Domain::Boolean, HpValue::Bool(_)) => true,
            _ => false,
        }
    }

    /// Bounds of the continuous relaxation: integers keep their range,
    /// categoricals and booleans become index ranges `[0, k - 1]`.
    pub fn relaxed_bounds(&self) -> (f64, f64) {
        match self {
            Domain::IntRange { lo, hi } => (*lo as f64, *hi as f64),
            Domain::FloatRange { lo, hi } => (*lo, *hi),
            Domain::Categorical { tokens } => (0.0, (tokens.len() - 1) as f64),
            Domain::Boolean => (0.0, 1.0),
        }
    }

    /// Snaps a relaxed coordinate back into the domain.
    pub fn decode(&self, x: f64) -> HpValue {
        let (lo, hi) = self.relaxed_bounds();
        let x = x.clamp(lo, hi);
        match self {
            Domain::IntRange { .. } => HpValue::Int(x.round() as i64),
            Domain::FloatRange { .. } => HpValue::Float(x),
            Domain::Categorical { tokens } => HpValue::Token(tokens[x.round() as usize].clone()),
            Domain::Boolean => HpValue::Bool(x.round() >= 1.0),
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        let bad = |m: &str| {
            Err(Error::Hyperparam {
                name: name.into(),
                message: m.into(),
            })
        };
        match self {
            Domain::IntRange { lo, hi } if lo > hi => bad("lo > hi"),
            Domain::FloatRange { lo, hi } if !(lo <= hi) => bad("lo > hi or not a number"),
            Domain::Categorical { tokens } if tokens.is_empty() => bad("no tokens"),
            Domain::Categorical { tokens } if tokens.iter().collect::<BTreeSet<_>>().len() != tokens.len() => {
                bad("duplicate tokens")
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dimension {
    pub name: String,
    pub domain: Domain,
}

/// Ordered, named hyperparameter domains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub dims: Vec<Dimension>,
}

impl SearchSpace {
    pub fn new(dims: Vec<(&str, Domain)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for (name, d) in &dims {
            d.validate(name)?;
            if !seen.insert(*name) {
                return Err(Error::Hyperparam {
                    name: (*name).into(),
                    message: "duplicate dimension".into(),
                });
            }
        }
        Ok(Self {
            dims: dims
                .into_iter()
                .map(|(n, domain)| Dimension {
                    name: n.into(),
                    domain,
                })
                .collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn sample(&self, r: &mut Rng) -> Hyperparams {
        let mut hp = Hyperparams::new();
        for d in &self.dims {
            hp.set(&d.name, d.domain.sample(r));
        }
        hp
    }

    /// Every dimension present and in its domain.
    pub fn contains(&self, hp: &Hyperparams) -> bool {
        self.dims
            .iter()
            .all(|d| hp.get(&d.name).is_some_and(|v| d.domain.contains(v)))
    }

    pub fn check(&self, hp: &Hyperparams) -> Result<()> {
        for d in &self.dims {
            match hp.get(&d.name) {
                None => {
                    return Err(Error::Hyperparam {
                        name: d.name.clone(),
                        message: "missing".into(),
                    })
                }
                Some(v) if !d.domain.contains(v) => {
                    return Err(Error::Hyperparam {
                        name: d.name.clone(),
                        message: format!("{v} is outside {:?}", d.domain),
                    })
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn decode(&self, position: &[f64]) -> Hyperparams {
        let mut hp = Hyperparams::new();
        for (d, &x) in self.dims.iter().zip(position) {
            hp.set(&d.name, d.domain.decode(x));
        }
        hp
    }
}
