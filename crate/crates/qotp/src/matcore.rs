//! Dense complex-matrix kernel.
//!
//! Square matrices of `Complex<f64>` with the handful of operations the rest
//! of the crate is built on: arithmetic, Kronecker products, partial traces,
//! Hermitian eigen-decomposition and unitarity checks. Storage and the
//! eigensolver are delegated to [`nalgebra`]; this module owns the index
//! convention and the validation contracts.
//!
//! Index convention: a composite system A⊗B is flattened A-major, i.e. the
//! row for basis pair (i_A, i_B) is `i_A * dB + i_B`. Every module in the
//! crate inherits this convention.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::tol;

pub type Complex64 = Complex<f64>;

/// Which factor of a bipartite system to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Dense square matrix of complex scalars. All entries are finite.
#[derive(Clone, Debug)]
pub struct ComplexMatrix {
    inner: DMatrix<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from a generator over (row, col), rejecting non-finite entries.
    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        let inner = DMatrix::from_fn(dim, dim, f);
        Self::from_inner(inner)
    }

    /// Builds a matrix from row-major nested data.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        for r in rows {
            if r.len() != dim {
                return Err(Error::ShapeMismatch {
                    len: r.len(),
                    dim,
                    expected: dim,
                });
            }
        }
        Self::from_fn(dim, |i, j| rows[i][j])
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            inner: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            inner: DMatrix::identity(dim, dim),
        }
    }

    /// Diagonal matrix from complex entries.
    pub fn diagonal(entries: &[Complex64]) -> Result<Self> {
        Self::from_fn(entries.len(), |i, j| {
            if i == j {
                entries[i]
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Diagonal matrix from real entries.
    pub fn diagonal_real(entries: &[f64]) -> Result<Self> {
        let complex: Vec<Complex64> = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::diagonal(&complex)
    }

    pub(crate) fn from_inner(inner: DMatrix<Complex64>) -> Result<Self> {
        debug_assert_eq!(inner.nrows(), inner.ncols());
        for i in 0..inner.nrows() {
            for j in 0..inner.ncols() {
                let z = inner[(i, j)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFiniteEntry { row: i, col: j });
                }
            }
        }
        Ok(Self { inner })
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.inner[(row, col)]
    }

    pub fn trace(&self) -> Complex64 {
        self.inner.trace()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            inner: &self.inner * Complex64::new(factor, 0.0),
        }
    }

    pub fn scale_complex(&self, factor: Complex64) -> Self {
        Self {
            inner: &self.inner * factor,
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "matmul dimension mismatch");
        Self {
            inner: &self.inner * &other.inner,
        }
    }

    /// U M U† for a transform U of the same dimension.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.matmul(self).matmul(&u.adjoint())
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.inner.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise difference |self - other|.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "comparison dimension mismatch");
        let mut max = 0.0;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let d = (self.inner[(i, j)] - other.inner[(i, j)]).norm();
                if d > max {
                    max = d;
                }
            }
        }
        max
    }

    /// Max entry of |M - M†|; zero for exactly Hermitian matrices.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut max = 0.0;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let d = (self.inner[(i, j)] - self.inner[(j, i)].conj()).norm();
                if d > max {
                    max = d;
                }
            }
        }
        max
    }

    /// Max entry of |MN - NM|.
    pub fn commutator_norm(&self, other: &Self) -> f64 {
        self.matmul(other).max_abs_diff(&other.matmul(self))
    }
}

impl std::ops::Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim(), rhs.dim(), "add dimension mismatch");
        ComplexMatrix {
            inner: &self.inner + &rhs.inner,
        }
    }
}

impl std::ops::Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim(), rhs.dim(), "sub dimension mismatch");
        ComplexMatrix {
            inner: &self.inner - &rhs.inner,
        }
    }
}

/// Column vector of complex scalars; the representation for basis states.
#[derive(Clone, Debug)]
pub struct ComplexVector {
    inner: DVector<Complex64>,
}

impl ComplexVector {
    pub fn new(data: Vec<Complex64>) -> Result<Self> {
        for (i, z) in data.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFiniteEntry { row: i, col: 0 });
            }
        }
        Ok(Self {
            inner: DVector::from_vec(data),
        })
    }

    /// Computational basis state |index⟩.
    pub fn basis_state(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index out of range");
        let mut data = vec![Complex64::new(0.0, 0.0); dim];
        data[index] = Complex64::new(1.0, 0.0);
        Self {
            inner: DVector::from_vec(data),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.len()
    }

    pub fn get(&self, index: usize) -> Complex64 {
        self.inner[index]
    }

    pub fn norm(&self) -> f64 {
        self.inner.norm()
    }

    /// ⟨self|other⟩.
    pub fn inner_product(&self, other: &Self) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.inner.dotc(&other.inner)
    }

    /// |self⟩⟨other|.
    pub fn outer_product(&self, other: &Self) -> ComplexMatrix {
        assert_eq!(self.dim(), other.dim(), "outer product dimension mismatch");
        ComplexMatrix {
            inner: &self.inner * other.inner.adjoint(),
        }
    }
}

/// Kronecker product a ⊗ b under the A-major index convention:
/// result[(i_A·dB + i_B, j_A·dB + j_B)] = a[(i_A, j_A)]·b[(i_B, j_B)].
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix {
        inner: a.inner.kronecker(&b.inner),
    }
}

/// Traces out one factor of a dA·dB-dimensional matrix.
pub fn partial_trace(
    m: &ComplexMatrix,
    da: usize,
    db: usize,
    keep: Subsystem,
) -> Result<ComplexMatrix> {
    if m.dim() != da * db {
        return Err(Error::DimensionMismatch {
            dim: m.dim(),
            da,
            db,
        });
    }
    let inner = match keep {
        Subsystem::A => DMatrix::from_fn(da, da, |i, j| {
            (0..db).map(|b| m.inner[(i * db + b, j * db + b)]).sum()
        }),
        Subsystem::B => DMatrix::from_fn(db, db, |i, j| {
            (0..da).map(|a| m.inner[(a * db + i, a * db + j)]).sum()
        }),
    };
    Ok(ComplexMatrix { inner })
}

/// Eigen-decomposition of a Hermitian matrix.
///
/// Eigenvalues are sorted descending. Each eigenvector column is phase
/// normalized so that its largest-magnitude component is real positive, and
/// exact eigenvalue ties are broken lexicographically on the normalized
/// entries, so the decomposition is deterministic.
#[derive(Clone, Debug)]
pub struct HermitianEigenResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigenResult {
    /// The eigenvector for `index` as a column vector.
    pub fn eigenvector(&self, index: usize) -> ComplexVector {
        ComplexVector {
            inner: self.eigenvectors.inner.column(index).into_owned(),
        }
    }

    /// V diag(λ) V†.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let dim = self.eigenvalues.len();
        let diag = DMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                Complex64::new(self.eigenvalues[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let v = &self.eigenvectors.inner;
        ComplexMatrix {
            inner: v * diag * v.adjoint(),
        }
    }
}

/// Multiplies each column by a unit phase so its largest-magnitude entry is
/// real positive.
fn phase_normalize(v: &mut DMatrix<Complex64>) {
    for mut col in v.column_iter_mut() {
        let mut best = 0usize;
        let mut best_mag = 0.0f64;
        for (i, z) in col.iter().enumerate() {
            let mag = z.norm();
            if mag > best_mag {
                best_mag = mag;
                best = i;
            }
        }
        if best_mag > 0.0 {
            let phase = col[best] / Complex64::new(best_mag, 0.0);
            let correction = phase.conj();
            for z in col.iter_mut() {
                *z *= correction;
            }
        }
    }
}

fn lex_compare_columns(
    v: &DMatrix<Complex64>,
    a: usize,
    b: usize,
) -> std::cmp::Ordering {
    for i in 0..v.nrows() {
        let (za, zb) = (v[(i, a)], v[(i, b)]);
        let ord = za.re.total_cmp(&zb.re).then(za.im.total_cmp(&zb.im));
        if ord != std::cmp::Ordering::Equal {
            return ord;
        }
    }
    std::cmp::Ordering::Equal
}

/// Hermitian eigen-decomposition with descending eigenvalues and
/// deterministic eigenvector phases.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEigenResult> {
    let deviation = m.hermiticity_deviation();
    if deviation > tol::HERMITICITY {
        return Err(Error::NotHermitian {
            deviation,
            tol: tol::HERMITICITY,
        });
    }
    let dim = m.dim();
    if dim == 1 {
        return Ok(HermitianEigenResult {
            eigenvalues: vec![m.get(0, 0).re],
            eigenvectors: ComplexMatrix::identity(1),
        });
    }

    // Symmetrize before handing off; the solver assumes an exactly
    // Hermitian input.
    let sym = (&m.inner + m.inner.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = nalgebra::linalg::SymmetricEigen::try_new(sym, f64::EPSILON, 100_000)
        .ok_or(Error::EigenFailed { dim })?;

    let mut vectors = eig.eigenvectors;
    phase_normalize(&mut vectors);

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .total_cmp(&eig.eigenvalues[a])
            .then_with(|| lex_compare_columns(&vectors, a, b))
    });

    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = DMatrix::from_fn(dim, dim, |i, j| vectors[(i, order[j])]);

    let result = HermitianEigenResult {
        eigenvalues,
        eigenvectors: ComplexMatrix { inner: eigenvectors },
    };

    let gram = result
        .eigenvectors
        .adjoint()
        .matmul(&result.eigenvectors);
    if gram.max_abs_diff(&ComplexMatrix::identity(dim)) > tol::ORTHONORMALITY
        || result.reconstruct().max_abs_diff(m) > tol::EIG_RECONSTRUCTION
    {
        return Err(Error::EigenFailed { dim });
    }
    Ok(result)
}

/// True iff max entry of |U†U - I| is at most `tolerance`.
pub fn is_unitary(u: &ComplexMatrix, tolerance: f64) -> bool {
    let gram = u.adjoint().matmul(u);
    gram.max_abs_diff(&ComplexMatrix::identity(u.dim())) <= tolerance
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub(crate) fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap()
    }

    pub(crate) fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(-1.0, 0.0)],
        ])
        .unwrap()
    }

    fn random_matrix(dim: usize, rng: &mut StdRng) -> ComplexMatrix {
        ComplexMatrix::from_fn(dim, |_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .unwrap()
    }

    fn random_hermitian(dim: usize, rng: &mut StdRng) -> ComplexMatrix {
        let m = random_matrix(dim, rng);
        (&m + &m.adjoint()).scale(0.5)
    }

    fn random_psd(dim: usize, rng: &mut StdRng) -> ComplexMatrix {
        let g = random_matrix(dim, rng);
        g.matmul(&g.adjoint())
    }

    /// Direct quadruple-loop Kronecker product, independent of `tensor`.
    fn kronecker_oracle(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
        let (na, nb) = (a.dim(), b.dim());
        ComplexMatrix::from_fn(na * nb, |row, col| {
            let (ia, ib) = (row / nb, row % nb);
            let (ja, jb) = (col / nb, col % nb);
            a.get(ia, ja) * b.get(ib, jb)
        })
        .unwrap()
    }

    /// Direct double-sum partial trace, independent of `partial_trace`.
    fn partial_trace_oracle(
        m: &ComplexMatrix,
        da: usize,
        db: usize,
        keep: Subsystem,
    ) -> ComplexMatrix {
        match keep {
            Subsystem::A => ComplexMatrix::from_fn(da, |i, j| {
                (0..db).map(|b| m.get(i * db + b, j * db + b)).sum()
            })
            .unwrap(),
            Subsystem::B => ComplexMatrix::from_fn(db, |i, j| {
                (0..da).map(|a| m.get(a * db + i, a * db + j)).sum()
            })
            .unwrap(),
        }
    }

    #[test]
    fn tensor_of_identities_is_identity() {
        let result = tensor(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2));
        assert_eq!(result.dim(), 4);
        assert!(result.max_abs_diff(&ComplexMatrix::identity(4)) == 0.0);
    }

    #[test]
    fn tensor_of_diagonals_follows_index_convention() {
        let a = ComplexMatrix::diagonal_real(&[1.0, 0.0]).unwrap();
        let b = ComplexMatrix::diagonal_real(&[0.0, 1.0]).unwrap();
        let expected = ComplexMatrix::diagonal_real(&[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(tensor(&a, &b).max_abs_diff(&expected) == 0.0);
    }

    #[test]
    fn tensor_matches_entrywise_oracle_for_paulis() {
        let result = tensor(&pauli_x(), &pauli_z());
        let expected = kronecker_oracle(&pauli_x(), &pauli_z());
        assert!(result.max_abs_diff(&expected) == 0.0);
    }

    #[test]
    fn partial_trace_recovers_product_factors() {
        let mut rng = StdRng::seed_from_u64(11);
        let a = {
            let p = random_psd(2, &mut rng);
            p.scale(1.0 / p.trace().re)
        };
        let b = {
            let p = random_psd(3, &mut rng);
            p.scale(1.0 / p.trace().re)
        };
        let ab = tensor(&a, &b);
        let got_a = partial_trace(&ab, 2, 3, Subsystem::A).unwrap();
        let got_b = partial_trace(&ab, 2, 3, Subsystem::B).unwrap();
        assert!(got_a.max_abs_diff(&a) < 1e-14);
        assert!(got_b.max_abs_diff(&b) < 1e-14);
    }

    #[test]
    fn partial_trace_of_bell_projector_is_maximally_mixed() {
        let bell = crate::states::tests::bell_state().matrix().clone();
        let marginal = partial_trace(&bell, 2, 2, Subsystem::A).unwrap();
        assert!(marginal.max_abs_diff(&ComplexMatrix::identity(2).scale(0.5)) < 1e-15);
    }

    #[test]
    fn partial_trace_matches_summation_oracle() {
        let mut rng = StdRng::seed_from_u64(23);
        let m = random_psd(6, &mut rng);
        for keep in [Subsystem::A, Subsystem::B] {
            let got = partial_trace(&m, 2, 3, keep).unwrap();
            let expected = partial_trace_oracle(&m, 2, 3, keep);
            assert!(got.max_abs_diff(&expected) <= 1e-12);
            assert!((got.trace() - m.trace()).norm() <= tol::TRACE_IDENTITY);
        }
    }

    #[test]
    fn partial_trace_rejects_bad_factorization() {
        let m = ComplexMatrix::identity(6);
        assert!(matches!(
            partial_trace(&m, 2, 2, Subsystem::A),
            Err(Error::DimensionMismatch { dim: 6, da: 2, db: 2 })
        ));
    }

    #[test]
    fn eig_of_diagonal_sorts_descending() {
        let m = ComplexMatrix::diagonal_real(&[3.0, 1.0, 2.0]).unwrap();
        let eig = hermitian_eig(&m).unwrap();
        assert_eq!(eig.eigenvalues, vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn eig_of_rank_one_projector() {
        let m = (&ComplexMatrix::identity(2) + &pauli_x()).scale(0.5);
        let eig = hermitian_eig(&m).unwrap();
        assert!((eig.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!(eig.eigenvalues[1].abs() < 1e-12);
    }

    #[test]
    fn eig_reconstructs_random_hermitian() {
        let mut rng = StdRng::seed_from_u64(37);
        let m = random_hermitian(5, &mut rng);
        let eig = hermitian_eig(&m).unwrap();
        assert!(eig.reconstruct().max_abs_diff(&m) <= tol::EIG_RECONSTRUCTION);
        let gram = eig.eigenvectors.adjoint().matmul(&eig.eigenvectors);
        assert!(gram.max_abs_diff(&ComplexMatrix::identity(5)) <= tol::ORTHONORMALITY);
    }

    #[test]
    fn eig_rejects_non_hermitian_input() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eig_is_deterministic_on_degenerate_spectra() {
        let m = ComplexMatrix::identity(3).scale(1.0 / 3.0);
        let first = hermitian_eig(&m).unwrap();
        let second = hermitian_eig(&m).unwrap();
        assert!(first.eigenvectors.max_abs_diff(&second.eigenvectors) == 0.0);
    }

    #[test]
    fn unitarity_check_examples() {
        assert!(is_unitary(&ComplexMatrix::identity(4), 1e-12));
        let theta: f64 = 0.7313;
        let phase = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(theta.cos(), theta.sin())]).unwrap();
        assert!(is_unitary(&phase, 1e-12));
        let stretch = ComplexMatrix::diagonal_real(&[1.0, 2.0]).unwrap();
        assert!(!is_unitary(&stretch, 1e-12));
    }

    #[test]
    fn rejects_non_finite_entries() {
        let result = ComplexMatrix::from_fn(2, |i, j| {
            if i == 1 && j == 0 {
                c(f64::NAN, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        assert!(matches!(result, Err(Error::NonFiniteEntry { row: 1, col: 0 })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn tensor_is_associative(seed in 0u64..1_000) {
            let mut rng = StdRng::seed_from_u64(seed);
            let a = random_matrix(2, &mut rng);
            let b = random_matrix(3, &mut rng);
            let m = random_matrix(2, &mut rng);
            let left = tensor(&tensor(&a, &b), &m);
            let right = tensor(&a, &tensor(&b, &m));
            prop_assert!(left.max_abs_diff(&right) <= 1e-12);
        }

        #[test]
        fn tensor_trace_is_multiplicative(seed in 0u64..1_000) {
            let mut rng = StdRng::seed_from_u64(seed);
            let a = random_matrix(3, &mut rng);
            let b = random_matrix(2, &mut rng);
            let lhs = tensor(&a, &b).trace();
            let rhs = a.trace() * b.trace();
            prop_assert!((lhs - rhs).norm() <= tol::TRACE_IDENTITY);
        }

        #[test]
        fn partial_trace_of_tensor_scales_by_trace(seed in 0u64..1_000) {
            let mut rng = StdRng::seed_from_u64(seed);
            let a = random_matrix(3, &mut rng);
            let b = random_matrix(2, &mut rng);
            let got = partial_trace(&tensor(&a, &b), 3, 2, Subsystem::A).unwrap();
            let expected = a.scale_complex(b.trace());
            prop_assert!(got.max_abs_diff(&expected) <= tol::TRACE_IDENTITY);
        }

        #[test]
        fn eig_reconstruction_up_to_dim_32(seed in 0u64..200, dim in 2usize..=32) {
            let mut rng = StdRng::seed_from_u64(seed);
            let m = random_hermitian(dim, &mut rng);
            let eig = hermitian_eig(&m).unwrap();
            prop_assert!(eig.reconstruct().max_abs_diff(&m) <= tol::EIG_RECONSTRUCTION);
        }
    }
}
