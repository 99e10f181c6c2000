//! Per-variable kernel matrices: RBF for continuous/ordinal columns, a
//! categorical kernel for binary/categorical columns, plus Gram-matrix
//! centering.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::DMatrix;

use crate::{Error, Result};

pub type KernelMatrix = DMatrix<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataType {
    Continuous,
    Ordinal,
    Binary,
    Categorical,
}

impl DataType {
    pub fn as_str(self) -> &'static str {
        match self {
            DataType::Continuous => "continuous",
            DataType::Ordinal => "ordinal",
            DataType::Binary => "binary",
            DataType::Categorical => "categorical",
        }
    }

    pub fn parse(s: &str) -> Result<DataType> {
        match s.trim() {
            "continuous" => Ok(DataType::Continuous),
            "ordinal" => Ok(DataType::Ordinal),
            "binary" => Ok(DataType::Binary),
            "categorical" => Ok(DataType::Categorical),
            other => Err(Error::Data(format!("unknown dtype token '{other}'"))),
        }
    }

    pub fn is_discrete(self) -> bool {
        matches!(self, DataType::Binary | DataType::Categorical)
    }
}

/// Column payload: real values for continuous/ordinal, level codes for
/// binary/categorical.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnValues {
    Real(Vec<f64>),
    Levels(Vec<u32>),
}

impl ColumnValues {
    pub fn len(&self) -> usize {
        match self {
            ColumnValues::Real(v) => v.len(),
            ColumnValues::Levels(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub label: String,
    pub dtype: DataType,
    pub values: ColumnValues,
}

/// Column-oriented table of n rows by p typed variables, no missing values.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: Vec<Column>,
}

impl Dataset {
    pub fn new(columns: Vec<Column>) -> Result<Dataset> {
        if columns.is_empty() {
            return Err(Error::Input("dataset has no columns".into()));
        }
        let n = columns[0].values.len();
        if n == 0 {
            return Err(Error::Input("dataset has no rows".into()));
        }
        for c in &columns {
            if c.values.len() != n {
                return Err(Error::Input(format!(
                    "column '{}' has {} rows, expected {n}",
                    c.label,
                    c.values.len()
                )));
            }
            match (&c.dtype, &c.values) {
                (DataType::Continuous | DataType::Ordinal, ColumnValues::Real(_)) => {}
                (DataType::Binary | DataType::Categorical, ColumnValues::Levels(v)) => {
                    if c.dtype == DataType::Binary {
                        let mut levels: Vec<u32> = v.clone();
                        levels.sort_unstable();
                        levels.dedup();
                        if levels.len() > 2 {
                            return Err(Error::Input(format!(
                                "binary column '{}' has {} levels",
                                c.label,
                                levels.len()
                            )));
                        }
                    }
                }
                _ => {
                    return Err(Error::Input(format!(
                        "column '{}' payload does not match dtype {}",
                        c.label,
                        c.dtype.as_str()
                    )))
                }
            }
        }
        Ok(Dataset { columns })
    }

    pub fn n_rows(&self) -> usize {
        self.columns[0].values.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, i: usize) -> &Column {
        &self.columns[i]
    }

    pub fn labels(&self) -> Vec<String> {
        self.columns.iter().map(|c| c.label.clone()).collect()
    }

    /// Drop the given column indices, preserving order of the rest.
    pub fn without_columns(&self, drop: &[usize]) -> Result<Dataset> {
        let columns: Vec<Column> = self
            .columns
            .iter()
            .enumerate()
            .filter(|(i, _)| !drop.contains(i))
            .map(|(_, c)| c.clone())
            .collect();
        Dataset::new(columns)
    }

    /// Standardize continuous columns to zero mean and unit variance.
    pub fn zscore_continuous(&mut self) {
        for c in &mut self.columns {
            if c.dtype != DataType::Continuous {
                continue;
            }
            if let ColumnValues::Real(v) = &mut c.values {
                let n = v.len() as f64;
                let mean = v.iter().sum::<f64>() / n;
                let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
                let sd = var.sqrt();
                if sd > 0.0 {
                    for x in v.iter_mut() {
                        *x = (*x - mean) / sd;
                    }
                }
            }
        }
    }
}

/// RBF width sigma and categorical-kernel theta.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub sigma: f64,
    pub theta: f64,
}

impl KernelParams {
    pub fn new(sigma: f64, theta: f64) -> Result<KernelParams> {
        if !(sigma > 0.0) {
            return Err(Error::Parameter(format!("sigma must be > 0, got {sigma}")));
        }
        if !(theta > 0.0) {
            return Err(Error::Parameter(format!("theta must be > 0, got {theta}")));
        }
        Ok(KernelParams { sigma, theta })
    }
}

/// K[a,b] = exp(-(x_a - x_b)^2 / (2 sigma^2)).
pub fn rbf_kernel_matrix(values: &[f64], sigma: f64) -> Result<KernelMatrix> {
    if !(sigma > 0.0) {
        return Err(Error::Parameter(format!("sigma must be > 0, got {sigma}")));
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Input(format!("non-finite value {bad}")));
    }
    let n = values.len();
    let denom = 2.0 * sigma * sigma;
    let mut k = DMatrix::zeros(n, n);
    for a in 0..n {
        k[(a, a)] = 1.0;
        for b in (a + 1)..n {
            let d = values[a] - values[b];
            let v = (-(d * d) / denom).exp();
            k[(a, b)] = v;
            k[(b, a)] = v;
        }
    }
    Ok(k)
}

/// Empirical relative frequency of each level.
pub fn empirical_probabilities(values: &[u32]) -> BTreeMap<u32, f64> {
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for &v in values {
        *counts.entry(v).or_insert(0) += 1;
    }
    let n = values.len() as f64;
    counts
        .into_iter()
        .map(|(lvl, c)| (lvl, c as f64 / n))
        .collect()
}

/// h_theta(p) = (1 - p^theta)^(1/theta), in [0, 1).
pub fn h_theta(p: f64, theta: f64) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(Error::Parameter(format!("theta must be > 0, got {theta}")));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Input(format!("probability {p} outside (0, 1]")));
    }
    Ok((1.0 - p.powf(theta)).powf(1.0 / theta))
}

/// Categorical kernel: h_theta(freq(z_a)) when z_a = z_b, else 0.
pub fn categorical_kernel_matrix(values: &[u32], theta: f64) -> Result<KernelMatrix> {
    if !(theta > 0.0) {
        return Err(Error::Parameter(format!("theta must be > 0, got {theta}")));
    }
    let n = values.len();
    let probs = empirical_probabilities(values);
    let mut h: BTreeMap<u32, f64> = BTreeMap::new();
    for (&lvl, &p) in &probs {
        h.insert(lvl, h_theta(p, theta)?);
    }
    let mut k = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            if values[a] == values[b] {
                let v = h[&values[a]];
                k[(a, b)] = v;
                k[(b, a)] = v;
            }
        }
    }
    Ok(k)
}

/// Double centering: Kc = K - JK/n - KJ/n + JKJ/n^2, via row/column means.
pub fn center_kernel_matrix(k: &KernelMatrix) -> KernelMatrix {
    let n = k.nrows();
    let nf = n as f64;
    let row_means: Vec<f64> = (0..n).map(|a| k.row(a).sum() / nf).collect();
    let total_mean = row_means.iter().sum::<f64>() / nf;
    let mut out = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            out[(a, b)] = k[(a, b)] - row_means[a] - row_means[b] + total_mean;
        }
    }
    out
}

/// Kernel matrix for one column: RBF on real values for continuous and
/// ordinal, categorical kernel on level codes for binary and categorical,
/// then centered.
pub fn kernel_for_column(column: &Column, params: &KernelParams) -> Result<KernelMatrix> {
    if column.values.is_empty() {
        return Err(Error::Input(format!("column '{}' is empty", column.label)));
    }
    let raw = match (&column.dtype, &column.values) {
        (DataType::Continuous | DataType::Ordinal, ColumnValues::Real(v)) => {
            rbf_kernel_matrix(v, params.sigma)?
        }
        (DataType::Binary | DataType::Categorical, ColumnValues::Levels(v)) => {
            categorical_kernel_matrix(v, params.theta)?
        }
        _ => {
            return Err(Error::Input(format!(
                "column '{}' payload does not match dtype",
                column.label
            )))
        }
    };
    Ok(center_kernel_matrix(&raw))
}

// ---------------------------------------------------------------------------
// CSV + schema sidecar I/O

impl Dataset {
    /// Write `<path>` as CSV (header row of labels) and `<path minus .csv>.schema`
    /// with one `label,dtype` line per column.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        out.push_str(&self.labels().join(","));
        out.push('\n');
        let n = self.n_rows();
        for r in 0..n {
            let cells: Vec<String> = self
                .columns
                .iter()
                .map(|c| match &c.values {
                    ColumnValues::Real(v) => format!("{}", v[r]),
                    ColumnValues::Levels(v) => format!("{}", v[r]),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))?;
        let mut schema = String::new();
        for c in &self.columns {
            schema.push_str(&format!("{},{}\n", c.label, c.dtype.as_str()));
        }
        std::fs::write(schema_path(path), schema).map_err(|e| Error::io(schema_path(path), e))
    }

    /// Read a dataset from CSV plus its `.schema` sidecar.
    pub fn read_csv(path: &Path) -> Result<Dataset> {
        let schema_file = schema_path(path);
        let schema_text =
            std::fs::read_to_string(&schema_file).map_err(|e| Error::io(&schema_file, e))?;
        let mut dtypes: BTreeMap<String, DataType> = BTreeMap::new();
        let mut order: Vec<String> = Vec::new();
        for line in schema_text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (label, dtype) = line
                .split_once(',')
                .ok_or_else(|| Error::Data(format!("bad schema line '{line}'")))?;
            dtypes.insert(label.trim().to_string(), DataType::parse(dtype)?);
            order.push(label.trim().to_string());
        }
        let _ = order;

        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Data("empty dataset file".into()))?;
        let labels: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
        let mut cols: Vec<(DataType, Vec<f64>, Vec<u32>)> = Vec::new();
        for l in &labels {
            let dt = *dtypes
                .get(l)
                .ok_or_else(|| Error::Data(format!("column '{l}' missing from schema")))?;
            cols.push((dt, Vec::new(), Vec::new()));
        }
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != labels.len() {
                return Err(Error::Data(format!(
                    "row {} has {} cells, expected {}",
                    lineno + 2,
                    cells.len(),
                    labels.len()
                )));
            }
            for (c, cell) in cols.iter_mut().zip(cells) {
                match c.0 {
                    DataType::Continuous | DataType::Ordinal => {
                        c.1.push(cell.trim().parse::<f64>().map_err(|_| {
                            Error::Data(format!("bad real value '{cell}'"))
                        })?);
                    }
                    DataType::Binary | DataType::Categorical => {
                        c.2.push(cell.trim().parse::<u32>().map_err(|_| {
                            Error::Data(format!("bad level code '{cell}'"))
                        })?);
                    }
                }
            }
        }
        let columns: Vec<Column> = labels
            .into_iter()
            .zip(cols)
            .map(|(label, (dtype, reals, levels))| Column {
                label,
                dtype,
                values: if dtype.is_discrete() {
                    ColumnValues::Levels(levels)
                } else {
                    ColumnValues::Real(reals)
                },
            })
            .collect();
        Dataset::new(columns)
    }
}

/// `foo.csv -> foo.schema`, anything else gets `.schema` appended.
pub fn schema_path(path: &Path) -> std::path::PathBuf {
    path.with_extension("schema")
}
