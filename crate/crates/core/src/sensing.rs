//! Training sequences, partial Toeplitz sensing, parallel low-speed sampling
//! and virtual measurement extraction.
//!
//! Conventions used below: `n` channel taps split into `p` contiguous blocks of
//! `n / p` taps; block `b` (0-based) covers columns `[b * n/p, (b + 1) * n/p)`.
//! All row, column and block indices in this module are 0-based.

use std::collections::HashSet;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::channel::SparseChannel;
use crate::rng::complex_gaussian;
use crate::{Error, Result, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Training symbols `x_0 .. x_{n + m_max - 2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSequence {
    symbols: Vec<C64>,
    n: usize,
    m_max: usize,
}

impl TrainingSequence {
    pub fn from_symbols(symbols: Vec<C64>, n: usize, m_max: usize) -> Result<Self> {
        if n == 0 || m_max == 0 {
            return Err(Error::Dimension(format!(
                "training needs n >= 1 and m_max >= 1 (got n = {n}, m_max = {m_max})"
            )));
        }
        if symbols.len() != n + m_max - 1 {
            return Err(Error::Dimension(format!(
                "training length {} != n + m_max - 1 = {}",
                symbols.len(),
                n + m_max - 1
            )));
        }
        Ok(Self { symbols, n, m_max })
    }

    pub fn symbols(&self) -> &[C64] {
        &self.symbols
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }
}

/// Draws `n + m_max - 1` i.i.d. unit-variance circular complex Gaussian symbols.
///
/// Symbols are drawn in index order, so a longer sequence from the same stream
/// extends a shorter one.
pub fn generate_training<R: Rng + ?Sized>(
    n: usize,
    m_max: usize,
    rng: &mut R,
) -> Result<TrainingSequence> {
    if n == 0 || m_max == 0 {
        return Err(Error::Dimension(format!(
            "training needs n >= 1 and m_max >= 1 (got n = {n}, m_max = {m_max})"
        )));
    }
    let symbols = (0..n + m_max - 1)
        .map(|_| complex_gaussian(rng, 1.0))
        .collect();
    TrainingSequence::from_symbols(symbols, n, m_max)
}

/// `m x n` partial Toeplitz matrix with `entry(i, j) = x[n - 1 + i - j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingMatrix {
    dense: DMatrix<C64>,
}

impl SensingMatrix {
    pub fn rows(&self) -> usize {
        self.dense.nrows()
    }

    pub fn cols(&self) -> usize {
        self.dense.ncols()
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.dense[(row, col)]
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.dense
    }

    /// The leading `m` rows as a new sensing matrix.
    pub fn truncated(&self, m: usize) -> Result<SensingMatrix> {
        if m == 0 || m > self.rows() {
            return Err(Error::Dimension(format!(
                "cannot take {m} rows of a {}-row sensing matrix",
                self.rows()
            )));
        }
        Ok(SensingMatrix {
            dense: self.dense.rows(0, m).into_owned(),
        })
    }
}

pub fn build_sensing_matrix(
    training: &TrainingSequence,
    m: usize,
    n: usize,
) -> Result<SensingMatrix> {
    if m == 0 || n == 0 {
        return Err(Error::Dimension(format!(
            "sensing matrix needs positive size (got {m} x {n})"
        )));
    }
    if n != training.n() || m > training.m_max() {
        return Err(Error::Dimension(format!(
            "training for n = {}, m_max = {} cannot serve a {m} x {n} matrix",
            training.n(),
            training.m_max()
        )));
    }
    let x = training.symbols();
    let dense = DMatrix::from_fn(m, n, |i, j| x[n - 1 + i - j]);
    Ok(SensingMatrix { dense })
}

/// Noise model of an assembled system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NoiseMode {
    /// Noise lives on the sub-samples; recombined and virtual rows share it.
    Subsample,
    /// Every row of the assembled system carries its own fresh noise.
    Independent,
}

impl NoiseMode {
    pub fn label(self) -> &'static str {
        match self {
            NoiseMode::Subsample => "subsample",
            NoiseMode::Independent => "independent",
        }
    }
}

impl fmt::Display for NoiseMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for NoiseMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "subsample" => Ok(NoiseMode::Subsample),
            "independent" => Ok(NoiseMode::Independent),
            other => Err(format!(
                "unknown noise mode `{other}` (expected subsample|independent)"
            )),
        }
    }
}

fn check_channel(matrix: &DMatrix<C64>, h: &SparseChannel) -> Result<()> {
    if matrix.ncols() != h.len() {
        return Err(Error::Dimension(format!(
            "matrix has {} columns but channel has {} taps",
            matrix.ncols(),
            h.len()
        )));
    }
    Ok(())
}

// Every inner product in this module goes through here so that different
// routes to the same noiseless quantity share one summation order.
fn row_dot(matrix: &DMatrix<C64>, row: usize, cols: Range<usize>, h: &[C64]) -> C64 {
    cols.fold(ZERO, |acc, j| acc + matrix[(row, j)] * h[j])
}

/// `r = A h + z` with `z` i.i.d. `CN(0, sigma2)`, drawn row by row.
pub fn measure_rows<R: Rng + ?Sized>(
    matrix: &DMatrix<C64>,
    h: &SparseChannel,
    sigma2: f64,
    rng: &mut R,
) -> Result<DVector<C64>> {
    check_channel(matrix, h)?;
    let n = matrix.ncols();
    Ok(DVector::from_fn(matrix.nrows(), |i, _| {
        row_dot(matrix, i, 0..n, h.taps()) + complex_gaussian(rng, sigma2)
    }))
}

/// Nyquist-rate measurement `r = X h + z`.
pub fn measure_full_rate<R: Rng + ?Sized>(
    x: &SensingMatrix,
    h: &SparseChannel,
    sigma2: f64,
    rng: &mut R,
) -> Result<DVector<C64>> {
    measure_rows(&x.dense, h, sigma2, rng)
}

/// `M x P` sub-samples from `P` parallel low-speed branches.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsampleGrid {
    values: DMatrix<C64>,
    block_len: usize,
    noise_variance_per_cell: f64,
}

impl SubsampleGrid {
    pub fn from_values(
        values: DMatrix<C64>,
        block_len: usize,
        noise_variance_per_cell: f64,
    ) -> Self {
        Self {
            values,
            block_len,
            noise_variance_per_cell,
        }
    }

    pub fn values(&self) -> &DMatrix<C64> {
        &self.values
    }

    pub fn rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn branches(&self) -> usize {
        self.values.ncols()
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn noise_variance_per_cell(&self) -> f64 {
        self.noise_variance_per_cell
    }
}

/// Sub-samples `y[m][b] = sum_{j in block b} X[m][j] h[j] + z`, with
/// `z ~ CN(0, sigma2 / p)` so each row sums to total noise variance `sigma2`.
///
/// Noise is drawn row-major; with `p = 1` the draws coincide with
/// [`measure_full_rate`] on the same stream.
pub fn measure_subsampled<R: Rng + ?Sized>(
    x: &SensingMatrix,
    h: &SparseChannel,
    p: usize,
    sigma2: f64,
    rng: &mut R,
) -> Result<SubsampleGrid> {
    check_channel(&x.dense, h)?;
    let n = x.cols();
    if p == 0 || !n.is_multiple_of(p) {
        return Err(Error::BlockPartition { n, p });
    }
    let block_len = n / p;
    let cell_var = sigma2 / p as f64;
    let mut values = DMatrix::from_element(x.rows(), p, ZERO);
    for m in 0..x.rows() {
        for b in 0..p {
            let cols = b * block_len..(b + 1) * block_len;
            values[(m, b)] = row_dot(&x.dense, m, cols, h.taps()) + complex_gaussian(rng, cell_var);
        }
    }
    Ok(SubsampleGrid {
        values,
        block_len,
        noise_variance_per_cell: cell_var,
    })
}

/// Full-rate equivalent `r[m] = sum_b y[m][b]`.
pub fn recombine(y: &SubsampleGrid) -> DVector<C64> {
    DVector::from_fn(y.rows(), |m, _| {
        (0..y.branches()).fold(ZERO, |acc, b| acc + y.values[(m, b)])
    })
}

/// For each virtual measurement `e` and branch `b`, the row whose sub-sample
/// that branch contributes.
///
/// Virtual index `e` (0-based) uses stride `s = e / m + 1` and offset
/// `o = e % m`; branch `b` reads row `(o + b * s) mod m`. The first `m`
/// patterns are the cyclic shifts `(e + b) mod m`; later ones step through
/// rows with larger strides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractionPattern {
    m: usize,
    p: usize,
    rows: Vec<Vec<usize>>,
}

impl ExtractionPattern {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn source_rows(&self, e: usize) -> &[usize] {
        &self.rows[e]
    }

    pub fn source_row(&self, e: usize, branch: usize) -> usize {
        self.rows[e][branch]
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn branches(&self) -> usize {
        self.p
    }
}

/// Number of pairwise-distinct, non-constant extraction patterns.
///
/// Strides congruent modulo `m` give identical patterns and a stride of `0`
/// modulo `m` gives a constant one, leaving `m - 1` strides times `m`
/// offsets. A single branch or single row admits none.
pub fn pattern_capacity(m: usize, p: usize) -> usize {
    if m < 2 || p < 2 {
        0
    } else {
        m * (m - 1)
    }
}

fn pattern_row(m: usize, p: usize, e: usize) -> Vec<usize> {
    let stride = e / m + 1;
    let offset = e % m;
    (0..p).map(|b| (offset + b * stride) % m).collect()
}

pub fn extraction_pattern(m: usize, p: usize, m_e: usize) -> Result<ExtractionPattern> {
    if m_e == 0 {
        return Ok(ExtractionPattern {
            m,
            p,
            rows: Vec::new(),
        });
    }
    let reject = || Error::PatternCapacity {
        requested: m_e,
        available: pattern_capacity(m, p),
    };
    if m == 0 || p == 0 || m_e > m * m {
        return Err(reject());
    }
    let rows: Vec<Vec<usize>> = (0..m_e).map(|e| pattern_row(m, p, e)).collect();

    let mut seen = HashSet::with_capacity(rows.len());
    for r in &rows {
        let constant = r.iter().all(|&v| v == r[0]);
        if constant || !seen.insert(r.as_slice()) {
            return Err(reject());
        }
    }
    Ok(ExtractionPattern { m, p, rows })
}

/// `X_e[e][j] = X[rho(e, b)][j]` for `j` in block `b`.
pub fn virtual_rows(x: &SensingMatrix, pattern: &ExtractionPattern) -> Result<DMatrix<C64>> {
    let n = x.cols();
    let p = pattern.branches();
    if pattern.rows() != x.rows() || p == 0 || !n.is_multiple_of(p) {
        return Err(Error::Dimension(format!(
            "pattern for {} rows x {} branches does not fit a {} x {n} sensing matrix",
            pattern.rows(),
            p,
            x.rows()
        )));
    }
    let block_len = n / p;
    Ok(DMatrix::from_fn(pattern.len(), n, |e, j| {
        x.dense[(pattern.rows[e][j / block_len], j)]
    }))
}

/// Virtual measurements `r_e[e] = sum_b y[rho(e, b)][b]` and their rows `X_e`.
pub fn extract_virtual(
    y: &SubsampleGrid,
    x: &SensingMatrix,
    pattern: &ExtractionPattern,
) -> Result<(DVector<C64>, DMatrix<C64>)> {
    if y.rows() != x.rows()
        || y.branches() != pattern.branches()
        || y.rows() != pattern.rows()
        || y.block_len() * y.branches() != x.cols()
    {
        return Err(Error::Dimension(format!(
            "grid {} x {}, sensing {} x {} and pattern {} x {} disagree",
            y.rows(),
            y.branches(),
            x.rows(),
            x.cols(),
            pattern.rows(),
            pattern.branches()
        )));
    }
    let x_e = virtual_rows(x, pattern)?;
    let r_e = DVector::from_fn(pattern.len(), |e, _| {
        pattern.rows[e]
            .iter()
            .enumerate()
            .fold(ZERO, |acc, (b, &row)| acc + y.values[(row, b)])
    });
    Ok((r_e, x_e))
}

/// Stacked linear system `phi = Phi h + noise`.
#[derive(Debug, Clone, PartialEq)]
pub struct AssembledSystem {
    pub phi: DVector<C64>,
    pub matrix: DMatrix<C64>,
    /// Marginal noise variance of every entry of `phi`.
    pub noise_variance: f64,
    pub noise_mode: NoiseMode,
}

impl AssembledSystem {
    pub fn measurements(&self) -> usize {
        self.phi.len()
    }

    pub fn columns(&self) -> usize {
        self.matrix.ncols()
    }
}

pub fn assemble_system(
    r: &DVector<C64>,
    r_e: &DVector<C64>,
    x: &DMatrix<C64>,
    x_e: &DMatrix<C64>,
    sigma2: f64,
    noise_mode: NoiseMode,
) -> Result<AssembledSystem> {
    if r.len() != x.nrows()
        || r_e.len() != x_e.nrows()
        || (x_e.nrows() > 0 && x_e.ncols() != x.ncols())
    {
        return Err(Error::Dimension(format!(
            "r ({}) / X ({} x {}) and r_e ({}) / X_e ({} x {}) do not stack",
            r.len(),
            x.nrows(),
            x.ncols(),
            r_e.len(),
            x_e.nrows(),
            x_e.ncols()
        )));
    }
    let m = x.nrows();
    let total = m + x_e.nrows();
    let n = x.ncols();
    let phi = DVector::from_fn(total, |i, _| if i < m { r[i] } else { r_e[i - m] });
    let matrix = DMatrix::from_fn(
        total,
        n,
        |i, j| if i < m { x[(i, j)] } else { x_e[(i - m, j)] },
    );
    Ok(AssembledSystem {
        phi,
        matrix,
        noise_variance: sigma2,
        noise_mode,
    })
}
