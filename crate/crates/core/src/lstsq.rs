//! Dense linear least squares by Householder QR on column-equilibrated
//! matrices.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

/// Minimizes `|A x - b|_2`. Returns `None` if `A` is numerically rank
/// deficient.
pub(crate) fn solve(mut a: DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let n = a.ncols();
    assert!(a.nrows() >= n, "least squares needs at least as many rows as unknowns");
    let scales: Vec<f64> = (0..n)
        .map(|j| {
            let s = a.column(j).norm();
            if s > 0.0 {
                1.0 / s
            } else {
                1.0
            }
        })
        .collect();
    for (j, s) in scales.iter().enumerate() {
        a.column_mut(j).scale_mut(*s);
    }
    let qr = a.qr();
    let mut qtb = b.clone();
    qr.q_tr_mul(&mut qtb);
    let r = qr.r();
    let rmax = (0..n).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    if (0..n).any(|i| r[(i, i)].abs() <= 1e-14 * rmax) {
        return None;
    }
    let mut x = r.solve_upper_triangular(&qtb.rows(0, n).into_owned())?;
    for (j, s) in scales.iter().enumerate() {
        x[j] *= s;
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fits_a_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let a = DMatrix::from_fn(4, 2, |i, j| if j == 0 { 1.0 } else { xs[i] });
        let b = DVector::from_iterator(4, xs.iter().map(|x| 2.0 - 0.5 * x));
        let x = solve(a, &b).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-14 && (x[1] + 0.5).abs() < 1e-14);
    }

    #[test]
    fn rank_deficiency_detected() {
        let a = DMatrix::from_fn(5, 2, |i, _| i as f64);
        assert!(solve(a, &DVector::zeros(5)).is_none());
    }
}
