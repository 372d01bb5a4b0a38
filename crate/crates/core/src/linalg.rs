//! Small real linear-algebra routines: least squares, non-negative least
//! squares and least-distance programming.

use nalgebra::{DMatrix, DVector};

const SVD_EPS: f64 = 1e-12;

/// Smallest singular value; zero for a matrix with more columns than rows.
pub(crate) fn min_singular_value(a: &DMatrix<f64>) -> f64 {
    if a.ncols() == 0 {
        return f64::INFINITY;
    }
    if a.ncols() > a.nrows() {
        return 0.0;
    }
    a.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Minimum-norm least-squares solution of `a x ≈ b` and its residual norm.
pub(crate) fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> (DVector<f64>, f64) {
    if a.ncols() == 0 {
        return (DVector::zeros(0), b.norm());
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let x = svd
        .solve(b, (SVD_EPS * smax).max(f64::MIN_POSITIVE))
        .unwrap_or_else(|_| DVector::zeros(a.ncols()));
    let r = (a * &x - b).norm();
    (x, r)
}

fn columns(a: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), idx.len(), |i, j| a[(i, idx[j])])
}

/// Lawson–Hanson non-negative least squares: `min ‖a x − b‖` over `x ≥ 0`.
pub(crate) fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n = a.ncols();
    let tol = 1e-13 * (1.0 + a.norm() * b.norm());
    let mut x = DVector::zeros(n);
    let mut passive = vec![false; n];
    for _ in 0..(3 * n + 10) {
        let w = a.transpose() * (b - a * &x);
        let next = (0..n)
            .filter(|&j| !passive[j] && w[j] > tol)
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(j) = next else { break };
        passive[j] = true;
        for _ in 0..(3 * n + 10) {
            let idx: Vec<usize> = (0..n).filter(|&i| passive[i]).collect();
            let (sp, _) = lstsq(&columns(a, &idx), b);
            let mut s = DVector::zeros(n);
            for (k, &i) in idx.iter().enumerate() {
                s[i] = sp[k];
            }
            if idx.iter().all(|&i| s[i] > 0.0) {
                x = s;
                break;
            }
            let alpha = idx
                .iter()
                .filter(|&&i| s[i] <= 0.0)
                .map(|&i| x[i] / (x[i] - s[i]))
                .fold(f64::INFINITY, f64::min);
            x = &x + (&s - &x) * alpha;
            for &i in &idx {
                if x[i] <= tol {
                    x[i] = 0.0;
                    passive[i] = false;
                }
            }
        }
    }
    x
}

/// Least-distance programming: `min ‖x‖` subject to `g x ≥ h`, solved through
/// its non-negative least-squares dual. `None` when infeasible.
pub(crate) fn ldp(g: &DMatrix<f64>, h: &DVector<f64>) -> Option<DVector<f64>> {
    let (m, n) = (g.nrows(), g.ncols());
    let mut e = DMatrix::zeros(n + 1, m);
    for i in 0..m {
        for j in 0..n {
            e[(j, i)] = g[(i, j)];
        }
        e[(n, i)] = h[i];
    }
    let mut f = DVector::zeros(n + 1);
    f[n] = 1.0;
    let u = nnls(&e, &f);
    let r = &e * u - f;
    if r.norm() < 1e-12 || r[n].abs() < 1e-14 {
        return None;
    }
    Some(DVector::from_fn(n, |j, _| -r[j] / r[n]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lstsq_exact_system() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 4.0]);
        let (x, r) = lstsq(&a, &DVector::from_vec(vec![2.0, 2.0]));
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 0.5).abs() < 1e-15);
        assert!(r < 1e-15);
    }

    #[test]
    fn nnls_clips_negative_direction() {
        let a = DMatrix::identity(2, 2);
        let x = nnls(&a, &DVector::from_vec(vec![1.0, -1.0]));
        assert_eq!(x.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn nnls_matches_unconstrained_when_interior() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 1.0, 1.0, 0.0, 1.0]);
        let b = DVector::from_vec(vec![1.0, 3.0, 2.0]);
        let (ls, _) = lstsq(&a, &b);
        let x = nnls(&a, &b);
        assert!((x - ls).norm() < 1e-12);
    }

    #[test]
    fn ldp_projects_origin_onto_halfspace() {
        let g = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let x = ldp(&g, &DVector::from_vec(vec![2.0])).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ldp_detects_infeasible() {
        let g = DMatrix::from_row_slice(2, 1, &[1.0, -1.0]);
        assert!(ldp(&g, &DVector::from_vec(vec![1.0, 1.0])).is_none());
    }

    #[test]
    fn singular_value_of_dependent_columns_vanishes() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(min_singular_value(&a) < 1e-12);
    }
}
