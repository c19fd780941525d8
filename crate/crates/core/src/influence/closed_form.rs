//! Closed forms for uniform voting probability `p`.

use super::check_probability;
use crate::error::{Error, Result};

fn positive_probability(p: f64) -> Result<f64> {
    check_probability(p, None)?;
    if p > 0.0 {
        Ok(p)
    } else {
        Err(Error::InvalidProbability { agent: None, value: p })
    }
}

/// Expected ballots cast by the terminal voter of a single chain with
/// `delegators` agents upstream: `sum_{d=0..n} (1-p)^d = (1 - (1-p)^(n+1)) / p`.
pub fn expected_weight_chain(delegators: u64, p: f64) -> Result<f64> {
    check_probability(p, None)?;
    if delegators == 0 {
        return Ok(1.0);
    }
    if p == 0.0 {
        return Ok(delegators as f64 + 1.0);
    }
    let keep = 1.0 - p;
    Ok((1.0 - keep.powf(delegators as f64 + 1.0)) / p)
}

/// Limit of [`expected_weight_chain`] for an unbounded chain: `1/p`.
pub fn expected_weight_chain_limit(p: f64) -> Result<f64> {
    Ok(1.0 / positive_probability(p)?)
}

/// Expected ballots cast by an agent with `direct` direct delegators and no
/// deeper structure: `1 + k(1-p)`.
pub fn expected_weight_star(direct: u64, p: f64) -> Result<f64> {
    check_probability(p, None)?;
    Ok(1.0 + direct as f64 * (1.0 - p))
}

/// Contribution of one maximal delegation path of length `len` to the
/// expected weight of its end: `sum_{k=1..len} (1-p)^k`.
pub fn path_contribution(len: u64, p: f64) -> Result<f64> {
    check_probability(p, None)?;
    if p == 0.0 {
        return Ok(len as f64);
    }
    let keep = 1.0 - p;
    Ok(keep * (1.0 - keep.powf(len as f64)) / p)
}

/// Limit of [`path_contribution`] as the path grows: `(1-p)/p`, at most 1
/// exactly when `p >= 1/2`.
pub fn path_contribution_limit(p: f64) -> Result<f64> {
    let p = positive_probability(p)?;
    Ok((1.0 - p) / p)
}
