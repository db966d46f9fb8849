//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub type Mat = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Largest absolute entry.
pub fn max_abs(m: &Mat) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn symmetrize(m: &Mat) -> Mat {
    (m + m.transpose()) * 0.5
}

/// Symmetric eigendecomposition with eigenvalues sorted ascending and
/// eigenvectors as matching columns.
pub fn sorted_symmetric_eigen(m: &Mat) -> (Vector, Mat) {
    let eig = SymmetricEigen::new(symmetrize(m));
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = Vector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = Mat::zeros(m.nrows(), n);
    for (j, &i) in order.iter().enumerate() {
        vectors.set_column(j, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

pub fn sorted_symmetric_eigenvalues(m: &Mat) -> Vector {
    let mut v: Vec<f64> = SymmetricEigen::new(symmetrize(m))
        .eigenvalues
        .iter()
        .copied()
        .collect();
    v.sort_by(f64::total_cmp);
    Vector::from_vec(v)
}

pub fn spectral_radius_sym(m: &Mat) -> f64 {
    sorted_symmetric_eigenvalues(m)
        .iter()
        .fold(0.0_f64, |a, x| a.max(x.abs()))
}

/// Orthonormal basis of the column span (modified Gram-Schmidt, drops
/// columns whose residual norm falls below `tol` times the largest column norm).
pub fn orthonormalize(cols: &Mat, tol: f64) -> Mat {
    let scale = (0..cols.ncols())
        .map(|j| cols.column(j).norm())
        .fold(0.0_f64, f64::max);
    let mut basis: Vec<Vector> = Vec::new();
    for j in 0..cols.ncols() {
        let mut v: Vector = cols.column(j).into_owned();
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&v);
                v -= b * c;
            }
        }
        let nv = v.norm();
        if nv > tol * scale.max(f64::MIN_POSITIVE) {
            basis.push(v / nv);
        }
    }
    from_columns(cols.nrows(), &basis)
}

pub fn from_columns(nrows: usize, cols: &[Vector]) -> Mat {
    let mut m = Mat::zeros(nrows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}

/// Orthonormal basis of the null space of `m`: right singular vectors whose
/// singular value is below `rel_tol` times the largest one.
pub fn null_space(m: &Mat, rel_tol: f64) -> Mat {
    let n = m.ncols();
    if m.nrows() == 0 || n == 0 {
        return Mat::identity(n, n);
    }
    // Pad to at least square so that the thin SVD yields a full set of right vectors.
    let rows = m.nrows().max(n);
    let mut padded = Mat::zeros(rows, n);
    padded.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested v_t");
    let smax = svd.singular_values.iter().fold(0.0_f64, |a, s| a.max(*s));
    let cutoff = rel_tol * smax.max(1e-300);
    let cols: Vec<Vector> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= cutoff)
        .map(|i| vt.row(i).transpose())
        .collect();
    if smax == 0.0 {
        return Mat::identity(n, n);
    }
    orthonormalize(&from_columns(n, &cols), 1e-12)
}

/// Numerical rank: singular values above `rel_tol` times the largest.
pub fn rank(m: &Mat, rel_tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let s = m.clone().singular_values();
    let smax = s.iter().fold(0.0_f64, |a, x| a.max(*x));
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_tol * smax).count()
}

/// Sines of the principal angles between two subspaces given by
/// orthonormal bases; returns the largest.
pub fn max_principal_angle_sine(a: &Mat, b: &Mat) -> f64 {
    if a.ncols() != b.ncols() {
        return 1.0;
    }
    // sines from the residual of projecting b onto span(a); the cosine route
    // cannot resolve angles below √ε
    let resid = b - a * (a.transpose() * b);
    resid
        .singular_values()
        .iter()
        .fold(0.0_f64, |m, x| m.max(*x))
}

/// Least-squares / minimum-norm solution via SVD with relative cutoff.
pub fn pinv_solve(a: &Mat, b: &Vector, rel_tol: f64) -> Vector {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().fold(0.0_f64, |x, s| x.max(*s));
    let eps = (rel_tol * smax).max(1e-300);
    svd.solve(b, eps)
        .unwrap_or_else(|_| Vector::zeros(a.ncols()))
}

/// Generalized symmetric-definite eigenproblem `A x = λ B x` with `B`
/// positive definite. Eigenvalues ascending; eigenvectors `B`-orthonormal.
pub fn generalized_symmetric_eigen(a: &Mat, b: &Mat) -> Option<(Vector, Mat)> {
    let chol = symmetrize(b).cholesky()?;
    let l = chol.l();
    let l_inv = l.clone().try_inverse()?;
    let c = &l_inv * symmetrize(a) * l_inv.transpose();
    let (vals, y) = sorted_symmetric_eigen(&c);
    let x = l_inv.transpose() * y;
    Some((vals, x))
}

/// Matrix exponential (nalgebra's scaling-and-squaring Padé approximant).
pub fn expm(m: &Mat) -> Mat {
    m.clone().exp()
}

pub fn commutator(a: &Mat, b: &Mat) -> Mat {
    a * b - b * a
}

pub fn det(m: &Mat) -> f64 {
    m.clone().determinant()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_of_rank_one() {
        let m = Mat::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0]);
        let n = null_space(&m, 1e-10);
        assert_eq!(n.ncols(), 2);
        assert!(max_abs(&(&m * &n)) < 1e-12);
        assert!(max_abs(&(n.transpose() * &n - Mat::identity(2, 2))) < 1e-12);
    }

    #[test]
    fn null_space_of_zero_is_everything() {
        let n = null_space(&Mat::zeros(3, 2), 1e-10);
        assert_eq!(n.ncols(), 2);
    }

    #[test]
    fn expm_of_rotation_generator() {
        let t = 0.7;
        let a = Mat::from_row_slice(2, 2, &[0.0, -t, t, 0.0]);
        let e = expm(&a);
        let expected = Mat::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]);
        assert!(max_abs(&(e - expected)) < 1e-14);
    }

    #[test]
    fn generalized_eigen_matches_scaled_problem() {
        let a = Mat::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]);
        let b = Mat::from_diagonal(&Vector::from_vec(vec![2.0, 2.0]));
        let (vals, x) = generalized_symmetric_eigen(&a, &b).unwrap();
        let plain = sorted_symmetric_eigenvalues(&a);
        for i in 0..2 {
            assert!((vals[i] - plain[i] / 2.0).abs() < 1e-14);
        }
        let gram = x.transpose() * &b * &x;
        assert!(max_abs(&(gram - Mat::identity(2, 2))) < 1e-13);
    }

    #[test]
    fn principal_angle_of_same_plane_is_zero() {
        let a = Mat::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let s = 0.5_f64.sqrt();
        let b = Mat::from_row_slice(3, 2, &[s, s, s, -s, 0.0, 0.0]);
        assert!(max_principal_angle_sine(&a, &b) < 1e-15);
    }
}
