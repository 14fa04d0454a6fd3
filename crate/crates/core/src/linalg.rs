//! Dense linear algebra over `F_q`.

use crate::field::{Fq, FqElem};

/// Row-reduce `rows` in place to reduced echelon form and return the pivot columns.
pub fn rref(fq: &Fq, rows: &mut [Vec<FqElem>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = fq.inv_e(rows[r][c]).unwrap();
        if inv != FqElem::ONE {
            for x in rows[r].iter_mut() {
                *x = fq.mul_e(*x, inv);
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c];
            for (x, &y) in row.iter_mut().zip(&pivot_row).skip(c) {
                if !y.is_zero() {
                    *x = fq.sub_e(*x, fq.mul_e(f, y));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(fq: &Fq, rows: &[Vec<FqElem>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(fq, &mut m, ncols).len()
}

/// Basis of `{x : M x = 0}` for the matrix whose columns are `cols` (each of length `nrows`).
pub fn kernel_of_columns(fq: &Fq, cols: &[Vec<FqElem>], nrows: usize) -> Vec<Vec<FqElem>> {
    let ncols = cols.len();
    let mut rows: Vec<Vec<FqElem>> = (0..nrows)
        .map(|i| cols.iter().map(|c| c[i]).collect())
        .collect();
    let pivots = rref(fq, &mut rows, ncols);
    let mut is_pivot = vec![false; ncols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![FqElem::ZERO; ncols];
        v[free] = FqElem::ONE;
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = fq.neg_e(rows[r][free]);
        }
        basis.push(v);
    }
    basis
}
