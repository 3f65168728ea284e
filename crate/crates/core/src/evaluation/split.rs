use alloc::format;
use alloc::vec::Vec;
use core::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Test rows are the final `h`; training rows are cut into contiguous folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub folds: Vec<Vec<usize>>,
}

/// Splits `0..n` into `k` contiguous blocks; the first `n % k` blocks get one
/// extra row.
pub fn contiguous_folds(n: usize, k: usize) -> Result<Vec<Range<usize>>> {
    if k == 0 {
        return Err(Error::Contract("fold count must be positive".into()));
    }
    if n < k {
        return Err(Error::InsufficientData(format!("{n} rows cannot fill {k} folds")));
    }
    let (base, extra) = (n / k, n % k);
    let mut start = 0;
    Ok((0..k)
        .map(|i| {
            let len = base + usize::from(i < extra);
            start += len;
            start - len..start
        })
        .collect())
}

pub fn hybrid_split(n: usize, h: usize, k: usize) -> Result<SplitPlan> {
    if n <= h {
        return Err(Error::InsufficientData(format!(
            "{n} rows leave no training data after a {h}-period test window"
        )));
    }
    let folds = contiguous_folds(n - h, k)?;
    Ok(SplitPlan {
        train: (0..n - h).collect(),
        test: (n - h..n).collect(),
        folds: folds.into_iter().map(|r| r.collect()).collect(),
    })
}
