//! Row-major JSON wire helpers for matrices and vectors.
//!
//! Matrices cross the process boundary as nested arrays of finite doubles,
//! outer index = row.

use nalgebra::{DMatrix, DVector};

pub fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>, String> {
    let nrows = rows.len();
    if nrows == 0 {
        return Err("empty matrix".into());
    }
    let ncols = rows[0].len();
    if rows.iter().any(|r| r.len() != ncols) {
        return Err("ragged rows".into());
    }
    let mut m = DMatrix::zeros(nrows, ncols);
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(format!("non-finite entry at ({i}, {j})"));
            }
            m[(i, j)] = v;
        }
    }
    Ok(m)
}

pub fn vector_to_list(v: &DVector<f64>) -> Vec<f64> {
    v.iter().copied().collect()
}

pub fn vector_from_list(list: &[f64]) -> Result<DVector<f64>, String> {
    if list.iter().any(|v| !v.is_finite()) {
        return Err("non-finite entry".into());
    }
    Ok(DVector::from_column_slice(list))
}
