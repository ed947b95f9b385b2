//! Greedy sparse recovery.
//!
//! [`cosamp`] is the estimator used by every arm. [`exhaustive_oracle`] and
//! [`oracle_ls`] are reference estimators: the first searches every support
//! of size `k`, the second is handed the true support.

use nalgebra::{DMatrix, DVector};

use crate::linalg::least_squares_on_support;
use crate::sensing::AssembledSystem;
use crate::{Error, Result, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Largest number of subsets [`exhaustive_oracle`] will enumerate.
pub const EXHAUSTIVE_BUDGET: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryConfig {
    /// Target sparsity.
    pub k: usize,
    pub max_iterations: usize,
    /// Stop once `||residual|| / ||phi||` falls to this value.
    pub residual_tolerance: f64,
    /// New candidates admitted per iteration.
    pub identification_width: usize,
}

impl RecoveryConfig {
    /// Standard CoSaMP settings: `2k` candidates per iteration, 50 iterations,
    /// relative residual tolerance `1e-6`.
    pub fn new(k: usize) -> Self {
        Self {
            k,
            max_iterations: 50,
            residual_tolerance: 1e-6,
            identification_width: 2 * k,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidRecovery("k must be at least 1".into()));
        }
        if self.k > n {
            return Err(Error::InvalidRecovery(format!(
                "k = {} exceeds the number of columns {n}",
                self.k
            )));
        }
        if self.identification_width == 0 {
            return Err(Error::InvalidRecovery(
                "identification_width must be at least 1".into(),
            ));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidRecovery(
                "max_iterations must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimate {
    pub coeffs: Vec<C64>,
    /// Sorted positions of the nonzero coefficients.
    pub support: Vec<usize>,
    pub iterations_used: usize,
    pub final_residual_norm: f64,
}

impl ChannelEstimate {
    pub fn zero(n: usize, residual_norm: f64) -> Self {
        Self {
            coeffs: vec![ZERO; n],
            support: Vec::new(),
            iterations_used: 0,
            final_residual_norm: residual_norm,
        }
    }

    /// Scatters `values` (aligned with `support`) into a length-`n` vector;
    /// exact zeros are dropped from the support.
    fn from_support(n: usize, support: &[usize], values: &[C64], residual_norm: f64) -> Self {
        let mut coeffs = vec![ZERO; n];
        let mut nz = Vec::with_capacity(support.len());
        for (&j, &v) in support.iter().zip(values) {
            if v != ZERO {
                coeffs[j] = v;
                nz.push(j);
            }
        }
        nz.sort_unstable();
        Self {
            coeffs,
            support: nz,
            iterations_used: 0,
            final_residual_norm: residual_norm,
        }
    }
}

/// `|<column n, residual>|` for every column.
pub fn correlation_scores(matrix: &DMatrix<C64>, residual: &DVector<C64>) -> Result<Vec<f64>> {
    if residual.len() != matrix.nrows() {
        return Err(Error::Dimension(format!(
            "residual has {} entries but matrix has {} rows",
            residual.len(),
            matrix.nrows()
        )));
    }
    Ok(matrix
        .column_iter()
        .map(|col| col.dotc(residual).norm())
        .collect())
}

/// Indices of the `count` largest values; equal values prefer the smaller index.
pub fn top_indices(values: &[f64], count: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    idx.truncate(count);
    idx
}

fn residual_of(system: &AssembledSystem, coeffs: &[C64], support: &[usize]) -> DVector<C64> {
    let mut residual = system.phi.clone();
    for &j in support {
        residual -= system.matrix.column(j) * coeffs[j];
    }
    residual
}

fn sorted_union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = a.iter().chain(b).copied().collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// CoSaMP: identify, merge, least squares, prune, update residual.
///
/// Stops when the relative residual reaches `residual_tolerance`, after
/// `max_iterations`, or after three consecutive iterations without a drop in
/// residual norm. The iterate with the smallest residual is returned; the
/// all-zero estimate counts as iteration 0.
pub fn cosamp(system: &AssembledSystem, config: &RecoveryConfig) -> Result<ChannelEstimate> {
    let n = system.columns();
    config.validate(n)?;
    if system.measurements() == 0 {
        return Err(Error::Dimension("system has no measurements".into()));
    }

    let phi_norm = system.phi.norm();
    let mut best = ChannelEstimate::zero(n, phi_norm);
    if phi_norm == 0.0 {
        return Ok(best);
    }

    let width = config.identification_width.min(n);
    let mut support: Vec<usize> = Vec::new();
    let mut residual = system.phi.clone();
    let mut prev_norm = phi_norm;
    let mut strikes = 0;
    let mut iterations = 0;

    while iterations < config.max_iterations {
        iterations += 1;

        let scores = correlation_scores(&system.matrix, &residual)?;
        let merged = sorted_union(&support, &top_indices(&scores, width));

        let fit = least_squares_on_support(&system.matrix, &system.phi, &merged)?;
        let magnitudes: Vec<f64> = fit.coeffs.iter().map(|c| c.norm()).collect();
        let kept = top_indices(&magnitudes, config.k);

        let mut coeffs = vec![ZERO; n];
        support = kept.iter().map(|&i| merged[i]).collect();
        support.sort_unstable();
        for &i in &kept {
            coeffs[merged[i]] = fit.coeffs[i];
        }

        residual = residual_of(system, &coeffs, &support);
        let norm = residual.norm();
        if norm < best.final_residual_norm {
            let values: Vec<C64> = support.iter().map(|&j| coeffs[j]).collect();
            best = ChannelEstimate::from_support(n, &support, &values, norm);
        }

        if norm <= config.residual_tolerance * phi_norm {
            break;
        }
        if norm >= prev_norm {
            strikes += 1;
            if strikes >= 3 {
                break;
            }
        } else {
            strikes = 0;
        }
        prev_norm = norm;
    }

    best.iterations_used = iterations;
    Ok(best)
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Least squares over every `k`-subset; keeps the smallest residual, with the
/// lexicographically smallest support winning ties.
pub fn exhaustive_oracle(system: &AssembledSystem, k: usize) -> Result<ChannelEstimate> {
    let n = system.columns();
    if k == 0 {
        return Ok(ChannelEstimate::zero(n, system.phi.norm()));
    }
    if k > n {
        return Err(Error::InvalidSparsity { k, n });
    }
    let count = binomial(n, k);
    if count > EXHAUSTIVE_BUDGET {
        return Err(Error::CombinatorialBudget {
            n,
            k,
            count,
            budget: EXHAUSTIVE_BUDGET,
        });
    }

    let mut subset: Vec<usize> = (0..k).collect();
    let mut best: Option<(Vec<usize>, Vec<C64>, f64)> = None;
    loop {
        let fit = least_squares_on_support(&system.matrix, &system.phi, &subset)?;
        if best.as_ref().is_none_or(|b| fit.residual_norm < b.2) {
            best = Some((subset.clone(), fit.coeffs, fit.residual_norm));
        }
        // advance to the next combination in lexicographic order
        let Some(pos) = (0..k).rev().find(|&i| subset[i] < n - k + i) else {
            break;
        };
        subset[pos] += 1;
        for i in pos + 1..k {
            subset[i] = subset[i - 1] + 1;
        }
    }

    let (support, values, norm) = best.expect("at least one subset");
    let mut est = ChannelEstimate::from_support(n, &support, &values, norm);
    est.iterations_used = count as usize;
    Ok(est)
}

/// Genie-aided least squares on the true support.
pub fn oracle_ls(system: &AssembledSystem, true_support: &[usize]) -> Result<ChannelEstimate> {
    let n = system.columns();
    if true_support.is_empty() {
        return Ok(ChannelEstimate::zero(n, system.phi.norm()));
    }
    let fit = least_squares_on_support(&system.matrix, &system.phi, true_support)?;
    let mut est = ChannelEstimate::from_support(n, true_support, &fit.coeffs, fit.residual_norm);
    est.iterations_used = 1;
    Ok(est)
}
