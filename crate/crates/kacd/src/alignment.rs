//! Kernel alignment between Gram matrices and assembly of the p x p
//! pseudo-correlation matrix.
//!
//! Kernel matrices are built on the fly per column pair so at most a few
//! n x n matrices are resident at once; the result is identical for the
//! parallel and sequential schedules because each entry is produced by a
//! single fixed-order summation.

use nalgebra::DMatrix;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::kernels::{kernel_for_column, Dataset, KernelMatrix, KernelParams};
use crate::{Error, Result};

/// Self inner products below this count as a degenerate (constant) kernel.
const DEGENERATE_NORM: f64 = 1e-24;

/// Cache all column kernels up to this many bytes; beyond it, kernels are
/// rebuilt per pair so only two n x n matrices are resident at once.
const KERNEL_CACHE_BYTES: usize = 1_500_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct PseudoCorrelationMatrix {
    labels: Vec<String>,
    entries: DMatrix<f64>,
}

impl PseudoCorrelationMatrix {
    pub fn p(&self) -> usize {
        self.entries.nrows()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    /// CSV with a header row/column of labels, full precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,");
        out.push_str(&self.labels.join(","));
        out.push('\n');
        for i in 0..self.p() {
            out.push_str(&self.labels[i]);
            for j in 0..self.p() {
                out.push(',');
                out.push_str(&format!("{}", self.entries[(i, j)]));
            }
            out.push('\n');
        }
        out
    }
}

/// Frobenius inner product of two equally sized kernel matrices.
pub fn frobenius_inner(k1: &KernelMatrix, k2: &KernelMatrix) -> Result<f64> {
    if k1.nrows() != k2.nrows() || k1.ncols() != k2.ncols() {
        return Err(Error::Input(format!(
            "dimension mismatch: {}x{} vs {}x{}",
            k1.nrows(),
            k1.ncols(),
            k2.nrows(),
            k2.ncols()
        )));
    }
    let mut sum = 0.0;
    for (a, b) in k1.iter().zip(k2.iter()) {
        sum += a * b;
    }
    Ok(sum)
}

/// Cosine of the angle between two kernel matrices under the Frobenius
/// inner product; 0 when either matrix has zero norm.
pub fn alignment(k1: &KernelMatrix, k2: &KernelMatrix) -> Result<f64> {
    let n11 = frobenius_inner(k1, k1)?;
    let n22 = frobenius_inner(k2, k2)?;
    if n11 <= DEGENERATE_NORM || n22 <= DEGENERATE_NORM {
        return Ok(0.0);
    }
    let n12 = frobenius_inner(k1, k2)?;
    Ok(n12 / (n11 * n22).sqrt())
}

#[derive(Debug, Clone, Copy)]
pub struct AlignmentOptions {
    /// Center each kernel matrix before aligning.
    pub centering: bool,
    /// Use the rayon pool for the pairwise loop.
    pub parallel: bool,
}

impl Default for AlignmentOptions {
    fn default() -> Self {
        AlignmentOptions {
            centering: true,
            parallel: cfg!(feature = "parallel"),
        }
    }
}

/// Pairwise kernel alignments over all dataset columns; unit diagonal.
pub fn pseudo_correlation_matrix(
    dataset: &Dataset,
    params: &KernelParams,
) -> Result<PseudoCorrelationMatrix> {
    pseudo_correlation_with(dataset, params, &AlignmentOptions::default())
}

pub fn pseudo_correlation_with(
    dataset: &Dataset,
    params: &KernelParams,
    opts: &AlignmentOptions,
) -> Result<PseudoCorrelationMatrix> {
    let p = dataset.n_cols();
    if p < 2 {
        return Err(Error::Input(format!("need at least 2 columns, got {p}")));
    }

    let build = |i: usize| -> Result<KernelMatrix> {
        if opts.centering {
            kernel_for_column(dataset.column(i), params)
        } else {
            // raw variant: undo the centering that kernel_for_column applies
            raw_kernel(dataset, i, params)
        }
    };

    // keep every column kernel resident when the whole set fits in the
    // budget; otherwise rebuild per pair and hold only two at a time
    let n = dataset.n_rows();
    let cached: Option<Vec<KernelMatrix>> = if p * n * n * 8 <= KERNEL_CACHE_BYTES {
        Some((0..p).map(build).collect::<Result<Vec<_>>>()?)
    } else {
        None
    };
    let kernel_of = |i: usize| -> Result<KernelMatrix> {
        match &cached {
            Some(ks) => Ok(ks[i].clone()),
            None => build(i),
        }
    };

    // self norms first; degenerate columns align to 0 everywhere
    let norms: Vec<f64> = (0..p)
        .map(|i| match &cached {
            Some(ks) => frobenius_inner(&ks[i], &ks[i]),
            None => {
                let k = build(i)?;
                frobenius_inner(&k, &k)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    for (i, &nrm) in norms.iter().enumerate() {
        if nrm <= DEGENERATE_NORM {
            eprintln!(
                "warning: column '{}' has a degenerate kernel (constant column?); alignments set to 0",
                dataset.column(i).label
            );
        }
    }

    let rows: Vec<(usize, Vec<f64>)> = {
        let row_of = |i: usize| -> Result<(usize, Vec<f64>)> {
            let ki = kernel_of(i)?;
            let mut vals = Vec::with_capacity(p - i - 1);
            for j in (i + 1)..p {
                let a = if norms[i] <= DEGENERATE_NORM || norms[j] <= DEGENERATE_NORM {
                    0.0
                } else {
                    let inner = match &cached {
                        Some(ks) => frobenius_inner(&ki, &ks[j])?,
                        None => frobenius_inner(&ki, &build(j)?)?,
                    };
                    inner / (norms[i] * norms[j]).sqrt()
                };
                vals.push(a.clamp(0.0, 1.0));
            }
            Ok((i, vals))
        };
        #[cfg(feature = "parallel")]
        {
            if opts.parallel {
                (0..p).into_par_iter().map(row_of).collect::<Result<Vec<_>>>()?
            } else {
                (0..p).map(row_of).collect::<Result<Vec<_>>>()?
            }
        }
        #[cfg(not(feature = "parallel"))]
        {
            (0..p).map(row_of).collect::<Result<Vec<_>>>()?
        }
    };

    let mut entries = DMatrix::identity(p, p);
    for (i, vals) in rows {
        for (off, a) in vals.into_iter().enumerate() {
            let j = i + 1 + off;
            entries[(i, j)] = a;
            entries[(j, i)] = a;
        }
    }

    Ok(PseudoCorrelationMatrix {
        labels: dataset.labels(),
        entries,
    })
}

fn raw_kernel(dataset: &Dataset, i: usize, params: &KernelParams) -> Result<KernelMatrix> {
    use crate::kernels::{categorical_kernel_matrix, rbf_kernel_matrix, ColumnValues, DataType};
    let c = dataset.column(i);
    match (&c.dtype, &c.values) {
        (DataType::Continuous | DataType::Ordinal, ColumnValues::Real(v)) => {
            rbf_kernel_matrix(v, params.sigma)
        }
        (DataType::Binary | DataType::Categorical, ColumnValues::Levels(v)) => {
            categorical_kernel_matrix(v, params.theta)
        }
        _ => Err(Error::Input(format!(
            "column '{}' payload does not match dtype",
            c.label
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{Column, ColumnValues, DataType};

    #[test]
    fn frobenius_identity() {
        let i3 = DMatrix::<f64>::identity(3, 3);
        assert_eq!(frobenius_inner(&i3, &i3).unwrap(), 3.0);
        let z = DMatrix::<f64>::zeros(3, 3);
        assert_eq!(frobenius_inner(&z, &i3).unwrap(), 0.0);
        let i2 = DMatrix::<f64>::identity(2, 2);
        assert!(frobenius_inner(&i2, &i3).is_err());
    }

    #[test]
    fn frobenius_matches_double_loop() {
        let k1 = crate::kernels::rbf_kernel_matrix(&[0.1, 0.7, -0.2, 1.4], 0.8).unwrap();
        let k2 = crate::kernels::rbf_kernel_matrix(&[1.0, 0.2, 0.9, -0.3], 1.2).unwrap();
        let mut naive = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                naive += k1[(a, b)] * k2[(a, b)];
            }
        }
        let fast = frobenius_inner(&k1, &k2).unwrap();
        assert!((fast - naive).abs() <= 1e-12 * naive.abs());
    }

    #[test]
    fn alignment_self_and_scale() {
        let k = crate::kernels::rbf_kernel_matrix(&[0.0, 1.0, 2.0], 1.0).unwrap();
        assert!((alignment(&k, &k).unwrap() - 1.0).abs() < 1e-12);
        let scaled = 3.7 * &k;
        assert!((alignment(&k, &scaled).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn alignment_orthogonal_is_zero() {
        let k1 = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0.0]));
        let k2 = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.0, 1.0]));
        assert_eq!(alignment(&k1, &k2).unwrap(), 0.0);
    }

    fn small_dataset() -> Dataset {
        Dataset::new(vec![
            Column {
                label: "x".into(),
                dtype: DataType::Continuous,
                values: ColumnValues::Real(vec![0.1, 0.9, -0.4, 1.3, 0.2]),
            },
            Column {
                label: "y".into(),
                dtype: DataType::Continuous,
                values: ColumnValues::Real(vec![0.1, 0.9, -0.4, 1.3, 0.2]),
            },
            Column {
                label: "z".into(),
                dtype: DataType::Binary,
                values: ColumnValues::Levels(vec![0, 1, 0, 1, 0]),
            },
        ])
        .unwrap()
    }

    #[test]
    fn identical_columns_align_to_one() {
        let params = KernelParams::new(0.5, 1.0).unwrap();
        let a = pseudo_correlation_matrix(&small_dataset(), &params).unwrap();
        assert!((a.get(0, 1) - 1.0).abs() < 1e-12);
        assert_eq!(a.get(0, 0), 1.0);
    }

    #[test]
    fn constant_column_aligns_to_zero() {
        let ds = Dataset::new(vec![
            Column {
                label: "x".into(),
                dtype: DataType::Continuous,
                values: ColumnValues::Real(vec![0.1, 0.9, -0.4]),
            },
            Column {
                label: "c".into(),
                dtype: DataType::Continuous,
                values: ColumnValues::Real(vec![5.0, 5.0, 5.0]),
            },
        ])
        .unwrap();
        let params = KernelParams::new(0.5, 1.0).unwrap();
        let a = pseudo_correlation_matrix(&ds, &params).unwrap();
        assert_eq!(a.get(0, 1), 0.0);
    }

    #[test]
    fn single_column_errors() {
        let ds = Dataset::new(vec![Column {
            label: "x".into(),
            dtype: DataType::Continuous,
            values: ColumnValues::Real(vec![0.1, 0.9]),
        }])
        .unwrap();
        let params = KernelParams::new(0.5, 1.0).unwrap();
        assert!(pseudo_correlation_matrix(&ds, &params).is_err());
    }

    /// End-to-end naive oracle: explicit kernel construction, centering and
    /// double-loop alignment sums, independent of the streaming path.
    #[test]
    fn matches_naive_oracle() {
        let ds = small_dataset();
        let params = KernelParams::new(0.7, 0.9).unwrap();
        let a = pseudo_correlation_matrix(&ds, &params).unwrap();

        let kmats: Vec<KernelMatrix> = (0..3)
            .map(|i| kernel_for_column(ds.column(i), &params).unwrap())
            .collect();
        for i in 0..3 {
            for j in 0..3 {
                if i == j {
                    continue;
                }
                let (mut n12, mut n11, mut n22) = (0.0, 0.0, 0.0);
                for r in 0..5 {
                    for c in 0..5 {
                        n12 += kmats[i][(r, c)] * kmats[j][(r, c)];
                        n11 += kmats[i][(r, c)] * kmats[i][(r, c)];
                        n22 += kmats[j][(r, c)] * kmats[j][(r, c)];
                    }
                }
                let expected = n12 / (n11 * n22).sqrt();
                assert!(
                    (a.get(i, j) - expected).abs() <= 1e-10 * expected.abs().max(1.0),
                    "entry ({i},{j}): {} vs {}",
                    a.get(i, j),
                    expected
                );
            }
        }
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let ds = small_dataset();
        let params = KernelParams::new(0.7, 0.9).unwrap();
        let seq = pseudo_correlation_with(
            &ds,
            &params,
            &AlignmentOptions {
                centering: true,
                parallel: false,
            },
        )
        .unwrap();
        let par = pseudo_correlation_with(
            &ds,
            &params,
            &AlignmentOptions {
                centering: true,
                parallel: true,
            },
        )
        .unwrap();
        assert_eq!(seq.entries(), par.entries());
    }
}
