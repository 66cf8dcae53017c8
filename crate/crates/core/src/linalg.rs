//! Dense numerics shared across modules.

use nalgebra::{DMatrix, SymmetricEigen, SVD};

use crate::arith::C64;
use crate::error::{Error, Result};

pub type CMat = DMatrix<C64>;
pub type IMat = DMatrix<i64>;

pub fn to_complex(m: &IMat) -> CMat {
    m.map(|x| C64::new(x as f64, 0.0))
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn is_normal(m: &IMat) -> bool {
    let t = m.transpose();
    m * &t == &t * m
}

/// Eigenvalues and a unitary eigenbasis of a normal matrix.
///
/// The Hermitian matrix (N+N*)/2 + t(N−N*)/(2i) shares its eigenvectors with N; a few
/// irrational t are tried until the eigenvectors diagonalise N.
pub fn eigen_normal(m: &CMat) -> Result<(Vec<C64>, CMat)> {
    let n = m.nrows();
    if n == 0 {
        return Ok((vec![], CMat::zeros(0, 0)));
    }
    let scale = max_abs(m).max(1.0);
    let adj = m.adjoint();
    let re = (m + &adj) * C64::new(0.5, 0.0);
    let im = (m - &adj) * C64::new(0.0, -0.5);
    if max_abs(&(&re * &im - &im * &re)) > 1e-9 * scale * scale {
        return Err(Error::NonNormalAdjacency);
    }
    let mut best = f64::INFINITY;
    for t in [0.577_215_664_901_532_9, 1.324_717_957_244_746, std::f64::consts::FRAC_1_PI, std::f64::consts::E] {
        let h = &re + &im * C64::new(t, 0.0);
        let eig = SymmetricEigen::new(h);
        let v = eig.eigenvectors;
        let d = v.adjoint() * m * &v;
        let mut off = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off = off.max(d[(i, j)].norm());
                }
            }
        }
        if off < 1e-9 * scale {
            return Ok(((0..n).map(|i| d[(i, i)]).collect(), v));
        }
        best = best.min(off);
    }
    Err(Error::Numerical(format!("eigenbasis did not diagonalise the matrix (off-diagonal {best:.2e})")))
}

pub fn eigenvalues_normal(m: &CMat) -> Result<Vec<C64>> {
    eigen_normal(m).map(|(v, _)| v)
}

/// Greedy nearest matching of two multisets; returns the worst pair distance.
pub fn match_multisets(a: &[C64], b: &[C64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let mut best = None;
        for (j, y) in b.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = (x - y).norm();
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        let (j, d) = best?;
        used[j] = true;
        worst = worst.max(d);
    }
    Some(worst)
}

#[derive(Clone, Debug)]
pub struct RankInfo {
    pub rank: usize,
    pub smallest_kept: f64,
    pub largest_dropped: f64,
    pub well_conditioned: bool,
}

/// Numerical rank with a cut at tol·max(1, σ_max) and a 10× gap requirement.
pub fn rank(m: &CMat, tol: f64) -> RankInfo {
    if m.nrows() == 0 || m.ncols() == 0 {
        return RankInfo { rank: 0, smallest_kept: f64::INFINITY, largest_dropped: 0.0, well_conditioned: true };
    }
    let mut sv: Vec<f64> = SVD::new(m.clone(), false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let cut = tol * sv[0].max(1.0);
    let r = sv.iter().take_while(|&&s| s > cut).count();
    let smallest_kept = if r > 0 { sv[r - 1] } else { f64::INFINITY };
    let largest_dropped = if r < sv.len() { sv[r] } else { 0.0 };
    RankInfo {
        rank: r,
        smallest_kept,
        largest_dropped,
        well_conditioned: largest_dropped == 0.0 || smallest_kept > 10.0 * largest_dropped,
    }
}

/// Orthonormal basis of the column space, via SVD.
pub fn column_basis(m: &CMat, tol: f64) -> CMat {
    if m.ncols() == 0 || m.nrows() == 0 {
        return CMat::zeros(m.nrows(), 0);
    }
    let svd = SVD::new(m.clone(), true, false);
    let u = svd.u.unwrap();
    let smax = svd.singular_values.iter().fold(0.0f64, |a, &b| a.max(b));
    let cut = tol * smax.max(1.0);
    let cols: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > cut).collect();
    CMat::from_fn(m.nrows(), cols.len(), |i, j| u[(i, cols[j])])
}

pub fn perm_matrix(perm: &[usize]) -> IMat {
    let n = perm.len();
    let mut p = IMat::zeros(n, n);
    for (i, &j) in perm.iter().enumerate() {
        p[(i, j)] = 1;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_eigenvalues() {
        let m = IMat::from_row_slice(3, 3, &[0, 1, 0, 0, 0, 1, 1, 0, 0]);
        let ev = eigenvalues_normal(&to_complex(&m)).unwrap();
        let w = crate::arith::root_of_unity(1, 3);
        let want = [C64::new(1.0, 0.0), w, w.conj()];
        assert!(match_multisets(&ev, &want).unwrap() < 1e-12);
    }

    #[test]
    fn jordan_block_rejected() {
        let m = CMat::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        assert!(matches!(eigen_normal(&m), Err(Error::NonNormalAdjacency)));
    }

    #[test]
    fn degenerate_normal_matrix() {
        let m = to_complex(&IMat::from_row_slice(4, 4, &[0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0]));
        let (ev, v) = eigen_normal(&m).unwrap();
        assert!(max_abs(&(v.adjoint() * &v - CMat::identity(4, 4))) < 1e-12);
        let want = [C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(-1.0, 0.0)];
        assert!(match_multisets(&ev, &want).unwrap() < 1e-12);
    }

    #[test]
    fn rank_of_outer_product() {
        let v = CMat::from_fn(4, 1, |i, _| C64::new(i as f64 + 1.0, 0.5));
        let r = rank(&(&v * v.adjoint()), 1e-8);
        assert_eq!(r.rank, 1);
        assert!(r.well_conditioned);
    }
}
