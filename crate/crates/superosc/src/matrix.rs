//! Dense complex matrix helpers shared by the representation builders and
//! the verification core: residual norms, masking, parity blocks, and a
//! deterministic spectral-norm estimate.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

pub fn zeros(dim: usize) -> CMat {
    CMat::zeros(dim, dim)
}

/// Largest entry magnitude; the primary residual metric throughout.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0f64, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn adjoint_residual(m: &CMat) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn anticommutator(a: &CMat, b: &CMat) -> CMat {
    a * b + b * a
}

/// Kronecker product, row-major convention: index of `a ⊗ b` is
/// `i_a * dim(b) + i_b` (left factor varies slowest).
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Zeroes the rows and columns flagged `false` in `keep`.
pub fn mask_rows_cols(m: &CMat, keep: &[bool]) -> CMat {
    debug_assert_eq!(m.nrows(), keep.len());
    let mut out = m.clone();
    for (i, &k) in keep.iter().enumerate() {
        if !k {
            for j in 0..out.ncols() {
                out[(i, j)] = ZERO;
                out[(j, i)] = ZERO;
            }
        }
    }
    out
}

/// Splits `m` into its parity-even and parity-odd components with respect to
/// the grading operator `P = diag((-1)^parity)`: even commutes with `P`,
/// odd anticommutes.
pub fn parity_split(m: &CMat, parity: &[u8]) -> (CMat, CMat) {
    let n = m.nrows();
    debug_assert_eq!(n, parity.len());
    let mut even = zeros(n);
    let mut odd = zeros(n);
    for i in 0..n {
        for j in 0..n {
            if parity[i] == parity[j] {
                even[(i, j)] = m[(i, j)];
            } else {
                odd[(i, j)] = m[(i, j)];
            }
        }
    }
    (even, odd)
}

/// Diagonal sign matrix `diag((-1)^parity)`.
pub fn parity_matrix(parity: &[u8]) -> CMat {
    CMat::from_fn(parity.len(), parity.len(), |i, j| {
        if i == j {
            if parity[i] % 2 == 0 {
                ONE
            } else {
                -ONE
            }
        } else {
            ZERO
        }
    })
}

/// Deterministic power-iteration estimate of the spectral norm (largest
/// singular value). Reported for diagnostics only; pass/fail decisions use
/// `max_abs`.
pub fn spectral_norm_est(m: &CMat) -> f64 {
    let n = m.ncols();
    if n == 0 {
        return 0.0;
    }
    // Fixed starting vector: generic (nonzero overlap with the top singular
    // vector in practice) and seed-independent.
    let mut x = CMat::from_fn(n, 1, |i, _| {
        Complex64::new(1.0 + (i as f64) * 1e-3, ((i + 1) as f64).sin() * 1e-3)
    });
    let norm = |y: &CMat| y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let nx = norm(&x);
    if nx == 0.0 {
        return 0.0;
    }
    x /= Complex64::new(nx, 0.0);
    let mut sigma = 0.0f64;
    for _ in 0..60 {
        let y = m * &x;
        let z = m.adjoint() * &y;
        let nz = norm(&z);
        let new_sigma = norm(&y);
        if nz == 0.0 {
            return new_sigma;
        }
        x = z / Complex64::new(nz, 0.0);
        if (new_sigma - sigma).abs() <= 1e-9 * new_sigma.max(1.0) {
            return new_sigma;
        }
        sigma = new_sigma;
    }
    sigma
}

/// Serializable dense matrix blob: `rows` plus row-major `[re, im]` pairs.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct MatrixBlob {
    pub rows: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixBlob {
    pub fn from_mat(m: &CMat) -> Self {
        let rows = m.nrows();
        let mut data = Vec::with_capacity(rows * m.ncols());
        for i in 0..rows {
            for j in 0..m.ncols() {
                let z = m[(i, j)];
                data.push([z.re, z.im]);
            }
        }
        MatrixBlob { rows, data }
    }

    pub fn to_mat(&self) -> CMat {
        let cols = if self.rows == 0 { 0 } else { self.data.len() / self.rows };
        CMat::from_fn(self.rows, cols, |i, j| {
            let [re, im] = self.data[i * cols + j];
            Complex64::new(re, im)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_ordering_left_factor_slowest() {
        let a = CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, c(2.0, 0.0)]);
        let b = identity(3);
        let k = kron(&a, &b);
        assert_eq!(k.nrows(), 6);
        assert_eq!(k[(0, 0)], ONE);
        assert_eq!(k[(3, 3)], c(2.0, 0.0));
        assert_eq!(k[(5, 5)], c(2.0, 0.0));
    }

    #[test]
    fn mask_zeroes_rows_and_cols() {
        let m = CMat::from_fn(3, 3, |i, j| c((i * 3 + j) as f64 + 1.0, 0.0));
        let keep = [true, true, false];
        let out = mask_rows_cols(&m, &keep);
        for j in 0..3 {
            assert_eq!(out[(2, j)], ZERO);
            assert_eq!(out[(j, 2)], ZERO);
        }
        assert_eq!(out[(1, 1)], c(5.0, 0.0));
    }

    #[test]
    fn parity_split_reassembles() {
        let parity = [0u8, 1, 0];
        let m = CMat::from_fn(3, 3, |i, j| c(i as f64, j as f64));
        let (e, o) = parity_split(&m, &parity);
        assert!(max_abs_diff(&(e + o), &m) == 0.0);
    }

    #[test]
    fn spectral_estimate_matches_diagonal() {
        let m = CMat::from_fn(4, 4, |i, j| if i == j { c(i as f64 + 1.0, 0.0) } else { ZERO });
        let s = spectral_norm_est(&m);
        assert!((s - 4.0).abs() < 1e-6, "got {s}");
    }

    #[test]
    fn blob_roundtrip() {
        let m = CMat::from_fn(3, 3, |i, j| c(i as f64, -(j as f64)));
        let blob = MatrixBlob::from_mat(&m);
        assert_eq!(max_abs_diff(&blob.to_mat(), &m), 0.0);
    }
}
