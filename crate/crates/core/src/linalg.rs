//! Dense complex matrix helpers shared by the Pauli and dynamics modules.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest singular value.
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .fold(0.0f64, |acc, &s| acc.max(s))
}

/// Operator norm of a matrix the caller knows to be Hermitian: the largest
/// absolute eigenvalue. Roughly an order of magnitude faster than the SVD.
pub fn hermitian_op_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    match as_faer(m).self_adjoint_eigenvalues(faer::Side::Lower) {
        Ok(values) => values.iter().fold(0.0f64, |acc, &e| acc.max(e.abs())),
        Err(_) => m
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .fold(0.0f64, |acc, &e| acc.max(e.abs())),
    }
}

fn as_faer(m: &CMatrix) -> faer::MatRef<'_, Complex64> {
    faer::MatRef::from_column_major_slice(m.as_slice(), m.nrows(), m.ncols())
}

fn from_faer(m: faer::MatRef<'_, Complex64>) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Dense complex product `a * b`.
pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.ncols(), b.nrows(), "matmul shape mismatch");
    let p = as_faer(a) * as_faer(b);
    from_faer(p.as_ref())
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    match as_faer(m).self_adjoint_eigen(faer::Side::Lower) {
        Ok(eig) => {
            let s = eig.S().column_vector();
            let values = (0..s.nrows()).map(|i| s[i].re).collect();
            (values, from_faer(eig.U()))
        }
        Err(_) => {
            let eig = m.clone().symmetric_eigen();
            (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
        }
    }
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let n = m.nrows();
    for i in 0..n {
        for j in i..n {
            if (m[(i, j)] - m[(j, i)].conj()).norm() > tol {
                return false;
            }
        }
    }
    true
}

/// Operator norm choosing the eigenvalue route for Hermitian and
/// anti-Hermitian inputs and the SVD otherwise.
pub fn fast_op_norm(m: &CMatrix) -> f64 {
    if is_hermitian(m, 1e-12) {
        return hermitian_op_norm(m);
    }
    let rotated = m * I;
    if is_hermitian(&rotated, 1e-12) {
        return hermitian_op_norm(&rotated);
    }
    op_norm(m)
}

/// `sqrt(Tr(O†O) / 2^n)`.
pub fn frobenius_norm_normalized(m: &CMatrix, n: usize) -> Result<f64> {
    let dim = 1usize << n;
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: m.nrows(),
        });
    }
    let total: f64 = m.iter().map(|z| z.norm_sqr()).sum();
    Ok((total / dim as f64).sqrt())
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Number of qubits `n` with `dim == 2^n`, if any.
pub fn qubits_for_dim(dim: usize) -> Option<usize> {
    if dim.is_power_of_two() {
        Some(dim.trailing_zeros() as usize)
    } else {
        None
    }
}

/// Bit mask selecting `site` in a basis index. Site 0 is the most significant
/// qubit, so `X₀Z₁` is the matrix `X ⊗ Z`.
#[inline]
pub fn site_mask(site: usize, n: usize) -> usize {
    1usize << (n - 1 - site)
}

/// Embed a 4×4 operator acting on sites `(i, j)` into an `n`-qubit space.
///
/// The local operator is indexed as `|b_i b_j⟩`, matching `A ⊗ B` for a
/// product `A` on `i` and `B` on `j` irrespective of whether `i < j`.
pub fn embed_two_site(local: &CMatrix, i: usize, j: usize, n: usize) -> CMatrix {
    assert_eq!(local.nrows(), 4);
    assert!(i != j && i < n && j < n);
    let dim = 1usize << n;
    let mi = site_mask(i, n);
    let mj = site_mask(j, n);
    let mut out = CMatrix::zeros(dim, dim);
    let local_index = |x: usize| ((x & mi != 0) as usize) << 1 | (x & mj != 0) as usize;
    for row in 0..dim {
        let lr = local_index(row);
        let base = row & !(mi | mj);
        for lc in 0..4 {
            let col = base | if lc & 2 != 0 { mi } else { 0 } | if lc & 1 != 0 { mj } else { 0 };
            let v = local[(lr, lc)];
            if v != ZERO {
                out[(row, col)] += v;
            }
        }
    }
    out
}

/// Embed a single-site 2×2 operator.
pub fn embed_one_site(local: &CMatrix, site: usize, n: usize) -> CMatrix {
    assert_eq!(local.nrows(), 2);
    let dim = 1usize << n;
    let m = site_mask(site, n);
    let mut out = CMatrix::zeros(dim, dim);
    for row in 0..dim {
        let lr = (row & m != 0) as usize;
        for lc in 0..2 {
            let col = (row & !m) | if lc == 1 { m } else { 0 };
            out[(row, col)] = local[(lr, lc)];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Pauli;
    use approx::assert_relative_eq;

    #[test]
    fn embedding_matches_kronecker() {
        let x = Pauli::X.matrix();
        let z = Pauli::Z.matrix();
        let xz = kron(&x, &z);
        assert_eq!(embed_two_site(&xz, 0, 1, 2), xz);
        // Reversed order swaps the tensor factors.
        assert_eq!(embed_two_site(&xz, 1, 0, 2), kron(&z, &x));
        let three = embed_two_site(&xz, 0, 2, 3);
        let expected = kron(&kron(&x, &identity(2)), &z);
        assert_eq!(three, expected);
        assert_eq!(embed_one_site(&x, 1, 3), kron(&kron(&identity(2), &x), &identity(2)));
    }

    #[test]
    fn norms_of_paulis() {
        assert_relative_eq!(op_norm(&Pauli::Z.matrix()), 1.0, epsilon = 1e-12);
        let xx = kron(&Pauli::X.matrix(), &Pauli::X.matrix()) * Complex64::new(2.0, 0.0);
        assert_relative_eq!(op_norm(&xx), 2.0, epsilon = 1e-12);
        assert_relative_eq!(fast_op_norm(&xx), 2.0, epsilon = 1e-12);
    }
}
