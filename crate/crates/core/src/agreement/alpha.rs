//! Krippendorff's alpha with a pluggable distance.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaEstimate {
    pub alpha: f64,
    pub observed_disagreement: f64,
    pub expected_disagreement: f64,
    /// Number of values in units with at least two values.
    pub pairable_values: usize,
    /// Expected disagreement was zero; alpha is reported as 1.
    pub degenerate: bool,
}

pub fn nominal_distance<T: PartialEq>(a: &T, b: &T) -> f64 {
    if a == b {
        0.0
    } else {
        1.0
    }
}

/// 1 − Jaccard similarity. Two empty sets are at distance 0.
pub fn jaccard_distance<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    1.0 - inter as f64 / union as f64
}

/// `alpha = 1 − D_o / D_e` over the coincidence matrix of all values in
/// units holding at least two values.
///
/// Each unit lists the values its coders assigned; missing codes are simply
/// absent. Requires at least two units, one of them pairable.
pub fn krippendorff_alpha<T, D>(units: &[Vec<T>], distance: D) -> Result<AlphaEstimate>
where
    T: Ord,
    D: Fn(&T, &T) -> f64,
{
    if units.len() < 2 {
        return Err(Error::InsufficientData(
            "krippendorff alpha needs at least two units".into(),
        ));
    }
    let pairable: Vec<&Vec<T>> = units.iter().filter(|u| u.len() >= 2).collect();
    if pairable.is_empty() {
        return Err(Error::InsufficientData(
            "no unit has two or more values".into(),
        ));
    }

    let mut index: BTreeMap<&T, usize> = BTreeMap::new();
    let mut values: Vec<&T> = Vec::new();
    for unit in &pairable {
        for v in unit.iter() {
            if !index.contains_key(v) {
                index.insert(v, values.len());
                values.push(v);
            }
        }
    }
    let k = values.len();

    // coincidences o[c][k]: each ordered within-unit pair weighted 1/(m_u - 1)
    let mut coincidence = vec![vec![0.0f64; k]; k];
    for unit in &pairable {
        let weight = 1.0 / (unit.len() - 1) as f64;
        for (i, a) in unit.iter().enumerate() {
            for (j, b) in unit.iter().enumerate() {
                if i != j {
                    coincidence[index[a]][index[b]] += weight;
                }
            }
        }
    }
    let marginals: Vec<f64> = coincidence.iter().map(|row| row.iter().sum()).collect();
    let n: f64 = marginals.iter().sum();

    let mut observed = 0.0;
    let mut expected = 0.0;
    for c in 0..k {
        for d in 0..k {
            let delta = distance(values[c], values[d]);
            observed += coincidence[c][d] * delta;
            expected += marginals[c] * marginals[d] * delta;
        }
    }
    observed /= n;
    expected /= n * (n - 1.0);

    let pairable_values = pairable.iter().map(|u| u.len()).sum();
    if expected.abs() < 1e-15 {
        return Ok(AlphaEstimate {
            alpha: 1.0,
            observed_disagreement: observed,
            expected_disagreement: expected,
            pairable_values,
            degenerate: true,
        });
    }
    Ok(AlphaEstimate {
        alpha: 1.0 - observed / expected,
        observed_disagreement: observed,
        expected_disagreement: expected,
        pairable_values,
        degenerate: false,
    })
}
