//! Validated quantum-state types.
//!
//! [`DensityOperator`] enforces the Hermitian / positive-semidefinite /
//! unit-trace contract at construction; [`BipartiteState`] records how a
//! density operator splits into A and B factors. The conditional-operator
//! extractions used by the scrambling analysis also live here.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matcore::{
    self, hermitian_eig, partial_trace, Complex64, ComplexMatrix, ComplexVector, Subsystem,
};
use crate::scramble::BlockStructure;
use crate::tol;

/// Hermitian, positive-semidefinite, unit-trace operator.
///
/// Eigenvalues in `[-1e-9, 0)` are treated as file/rounding noise and
/// clamped to zero (rebuilding the matrix); anything more negative is a hard
/// error. Inputs that are already positive are stored bit-identically.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let deviation = matrix.hermiticity_deviation();
        if deviation > tol::HERMITICITY {
            return Err(Error::NotHermitian {
                deviation,
                tol: tol::HERMITICITY,
            });
        }
        let trace = matrix.trace();
        let margin = (trace - Complex64::new(1.0, 0.0)).norm();
        if margin > tol::UNIT_TRACE {
            return Err(Error::TraceNotOne {
                trace: trace.re,
                margin,
                tol: tol::UNIT_TRACE,
            });
        }
        let eig = hermitian_eig(&matrix)?;
        let min_eigenvalue = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if min_eigenvalue < -tol::PSD_CLAMP {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue,
                tol: tol::PSD_CLAMP,
            });
        }
        let matrix = if min_eigenvalue < 0.0 {
            let clamped = HermitianClamp {
                eigenvalues: eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect(),
                eigenvectors: eig.eigenvectors,
            };
            clamped.reconstruct()
        } else {
            matrix
        };
        Ok(Self { matrix })
    }

    /// |v⟩⟨v| for a normalized vector.
    pub fn pure(v: &ComplexVector) -> Result<Self> {
        Self::new(v.outer_product(v))
    }

    /// (1/d)·I.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale(1.0 / dim as f64),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Spectrum in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eig(&self.matrix)
            .expect("a validated density operator stays Hermitian")
            .eigenvalues
    }
}

struct HermitianClamp {
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
}

impl HermitianClamp {
    fn reconstruct(&self) -> ComplexMatrix {
        let dim = self.eigenvalues.len();
        let mut acc = ComplexMatrix::zeros(dim);
        for (i, &lambda) in self.eigenvalues.iter().enumerate() {
            if lambda == 0.0 {
                continue;
            }
            let v = matcore::HermitianEigenResult {
                eigenvalues: self.eigenvalues.clone(),
                eigenvectors: self.eigenvectors.clone(),
            }
            .eigenvector(i);
            acc = &acc + &v.outer_product(&v).scale(lambda);
        }
        acc
    }
}

/// Density operator on a tensor product A⊗B with recorded factor dimensions.
#[derive(Clone, Debug)]
pub struct BipartiteState {
    state: DensityOperator,
    dim_a: usize,
    dim_b: usize,
}

impl BipartiteState {
    pub fn new(state: DensityOperator, dim_a: usize, dim_b: usize) -> Result<Self> {
        if state.dim() != dim_a * dim_b {
            return Err(Error::DimensionMismatch {
                dim: state.dim(),
                da: dim_a,
                db: dim_b,
            });
        }
        Ok(Self {
            state,
            dim_a,
            dim_b,
        })
    }

    pub fn from_matrix(matrix: ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<Self> {
        Self::new(DensityOperator::new(matrix)?, dim_a, dim_b)
    }

    pub fn density(&self) -> &DensityOperator {
        &self.state
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.state.matrix()
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dim(&self) -> usize {
        self.state.dim()
    }

    /// Reduced state of one factor.
    pub fn marginal(&self, which: Subsystem) -> DensityOperator {
        let traced = partial_trace(self.matrix(), self.dim_a, self.dim_b, which)
            .expect("factor dimensions are checked at construction");
        DensityOperator::new(traced)
            .expect("the partial trace of a valid state is a valid state")
    }
}

/// The dA² conditional B operators w_{kl} = ⟨k|ρ|l⟩_A of a bipartite state
/// with respect to an orthonormal A basis.
#[derive(Clone, Debug)]
pub struct ConditionalBlocks {
    dim_a: usize,
    dim_b: usize,
    basis: Vec<ComplexVector>,
    blocks: Vec<ComplexMatrix>,
}

impl ConditionalBlocks {
    pub fn get(&self, k: usize, l: usize) -> &ComplexMatrix {
        &self.blocks[k * self.dim_a + l]
    }

    /// Σ_k w_{kk}; equals the B marginal.
    pub fn diagonal_sum(&self) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.dim_b);
        for k in 0..self.dim_a {
            acc = &acc + self.get(k, k);
        }
        acc
    }

    /// Σ_{kl} |k⟩⟨l| ⊗ w_{kl}; rebuilds the original state.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let dim = self.dim_a * self.dim_b;
        let mut acc = ComplexMatrix::zeros(dim);
        for k in 0..self.dim_a {
            for l in 0..self.dim_a {
                let outer = self.basis[k].outer_product(&self.basis[l]);
                acc = &acc + &matcore::tensor(&outer, self.get(k, l));
            }
        }
        acc
    }
}

fn check_orthonormal(basis: &[ComplexVector], expected: usize) -> Result<()> {
    if basis.len() != expected {
        return Err(Error::BasisSizeMismatch {
            expected,
            found: basis.len(),
        });
    }
    let mut deviation = 0.0f64;
    for (i, vi) in basis.iter().enumerate() {
        for (j, vj) in basis.iter().enumerate() {
            let delta = if i == j { 1.0 } else { 0.0 };
            let d = (vi.inner_product(vj) - Complex64::new(delta, 0.0)).norm();
            deviation = deviation.max(d);
        }
    }
    if deviation > tol::ORTHONORMALITY {
        return Err(Error::NonOrthonormalBasis {
            deviation,
            tol: tol::ORTHONORMALITY,
        });
    }
    Ok(())
}

/// Partial inner product ⟨k|ρ|l⟩ over the A factor.
fn partial_inner(
    s: &BipartiteState,
    k: &ComplexVector,
    l: &ComplexVector,
) -> ComplexMatrix {
    let (da, db) = (s.dim_a(), s.dim_b());
    let rho = s.matrix();
    ComplexMatrix::from_fn(db, |i, j| {
        let mut sum = Complex::new(0.0, 0.0);
        for a in 0..da {
            for ap in 0..da {
                sum += k.get(a).conj() * rho.get(a * db + i, ap * db + j) * l.get(ap);
            }
        }
        sum
    })
    .expect("finite state entries produce finite conditionals")
}

/// Decomposes a bipartite state into its conditional B operators with
/// respect to an orthonormal basis of A.
pub fn conditional_blocks(
    s: &BipartiteState,
    basis_a: &[ComplexVector],
) -> Result<ConditionalBlocks> {
    check_orthonormal(basis_a, s.dim_a())?;
    let da = s.dim_a();
    let mut blocks = Vec::with_capacity(da * da);
    for k in 0..da {
        for l in 0..da {
            blocks.push(partial_inner(s, &basis_a[k], &basis_a[l]));
        }
    }
    Ok(ConditionalBlocks {
        dim_a: da,
        dim_b: s.dim_b(),
        basis: basis_a.to_vec(),
        blocks,
    })
}

/// Weight and conditional B state of one eigenvalue block of the A marginal.
#[derive(Clone, Debug)]
pub struct BlockConditional {
    /// Mixture weight P_K = d_K·λ_K.
    pub weight: f64,
    /// Conditional state ρ^B_K = (1/P_K)·Σ_m ⟨K m|ρ|K m⟩_A.
    pub state: DensityOperator,
}

/// For each eigenvalue block of the A marginal, the block weight and the
/// conditional B state. Blocks with negligible weight are dropped.
pub fn block_conditional_states(
    s: &BipartiteState,
    blocks: &BlockStructure,
) -> Result<Vec<BlockConditional>> {
    let mut out = Vec::with_capacity(blocks.block_count());
    for block in blocks.blocks() {
        if block.weight <= tol::ZERO_BLOCK {
            continue;
        }
        let mut acc = ComplexMatrix::zeros(s.dim_b());
        for v in &block.basis {
            acc = &acc + &partial_inner(s, v, v);
        }
        let state = DensityOperator::new(acc.scale(1.0 / block.weight))?;
        out.push(BlockConditional {
            weight: block.weight,
            state,
        });
    }
    Ok(out)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::matcore::tensor;
    use crate::scramble::block_decompose;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub(crate) fn bell_state() -> BipartiteState {
        let amp = std::f64::consts::FRAC_1_SQRT_2;
        let psi = ComplexVector::new(vec![c(amp, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(amp, 0.0)])
            .unwrap();
        BipartiteState::new(DensityOperator::pure(&psi).unwrap(), 2, 2).unwrap()
    }

    /// (1/2)(|00⟩⟨00| + |11⟩⟨11|).
    pub(crate) fn classically_correlated() -> BipartiteState {
        let m = ComplexMatrix::diagonal_real(&[0.5, 0.0, 0.0, 0.5]).unwrap();
        BipartiteState::from_matrix(m, 2, 2).unwrap()
    }

    pub(crate) fn random_density(dim: usize, rng: &mut StdRng) -> DensityOperator {
        let g = ComplexMatrix::from_fn(dim, |_, _| {
            c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        })
        .unwrap();
        let psd = g.matmul(&g.adjoint());
        DensityOperator::new(psd.scale(1.0 / psd.trace().re)).unwrap()
    }

    pub(crate) fn random_bipartite(da: usize, db: usize, rng: &mut StdRng) -> BipartiteState {
        BipartiteState::new(random_density(da * db, rng), da, db).unwrap()
    }

    fn computational_basis(dim: usize) -> Vec<ComplexVector> {
        (0..dim).map(|i| ComplexVector::basis_state(dim, i)).collect()
    }

    #[test]
    fn rejects_trace_deficient_matrix() {
        let m = ComplexMatrix::diagonal_real(&[0.45, 0.45]).unwrap();
        match DensityOperator::new(m) {
            Err(Error::TraceNotOne { margin, .. }) => assert!((margin - 0.1).abs() < 1e-12),
            other => panic!("expected trace error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_negative_operator() {
        let m = ComplexMatrix::diagonal_real(&[1.5, -0.5]).unwrap();
        assert!(matches!(
            DensityOperator::new(m),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
    }

    #[test]
    fn clamps_rounding_noise_but_keeps_clean_input_bit_identical() {
        let clean = ComplexMatrix::diagonal_real(&[0.75, 0.25]).unwrap();
        let rho = DensityOperator::new(clean.clone()).unwrap();
        assert!(rho.matrix().max_abs_diff(&clean) == 0.0);

        let noisy = ComplexMatrix::diagonal_real(&[1.0 + 0.5e-9, -0.5e-9]).unwrap();
        let rho = DensityOperator::new(noisy).unwrap();
        let eigs = rho.eigenvalues();
        assert!(eigs[1] >= 0.0);
    }

    #[test]
    fn marginals_of_bell_state_are_maximally_mixed() {
        let bell = bell_state();
        let half = ComplexMatrix::identity(2).scale(0.5);
        assert!(bell.marginal(Subsystem::A).matrix().max_abs_diff(&half) < 1e-15);
        assert!(bell.marginal(Subsystem::B).matrix().max_abs_diff(&half) < 1e-15);
    }

    #[test]
    fn marginal_of_product_recovers_factor() {
        let mut rng = StdRng::seed_from_u64(5);
        let a = random_density(2, &mut rng);
        let b = random_density(3, &mut rng);
        let ab = BipartiteState::from_matrix(tensor(a.matrix(), b.matrix()), 2, 3).unwrap();
        assert!(ab.marginal(Subsystem::B).matrix().max_abs_diff(b.matrix()) < 1e-12);
    }

    #[test]
    fn marginal_matches_summation_oracle_for_qutrits() {
        let mut rng = StdRng::seed_from_u64(7);
        let s = random_bipartite(3, 3, &mut rng);
        let oracle = ComplexMatrix::from_fn(3, |i, j| {
            (0..3).map(|b| s.matrix().get(i * 3 + b, j * 3 + b)).sum()
        })
        .unwrap();
        assert!(s.marginal(Subsystem::A).matrix().max_abs_diff(&oracle) <= 1e-12);
    }

    #[test]
    fn marginals_have_unit_trace_along_both_paths() {
        let mut rng = StdRng::seed_from_u64(9);
        let s = random_bipartite(2, 4, &mut rng);
        for which in [Subsystem::A, Subsystem::B] {
            let tr = s.marginal(which).matrix().trace();
            assert!((tr - Complex64::new(1.0, 0.0)).norm() <= tol::UNIT_TRACE);
        }
    }

    #[test]
    fn conditional_blocks_of_product_state_factorize() {
        let mut rng = StdRng::seed_from_u64(13);
        let a = random_density(2, &mut rng);
        let b = random_density(2, &mut rng);
        let ab = BipartiteState::from_matrix(tensor(a.matrix(), b.matrix()), 2, 2).unwrap();
        // In the eigenbasis of the A factor the off-diagonal conditionals vanish.
        let eig = hermitian_eig(a.matrix()).unwrap();
        let basis: Vec<ComplexVector> = (0..2).map(|i| eig.eigenvector(i)).collect();
        let blocks = conditional_blocks(&ab, &basis).unwrap();
        assert!(blocks.get(0, 1).max_abs() < 1e-12);
        assert!(blocks.get(1, 0).max_abs() < 1e-12);
        let w00 = blocks.get(0, 0);
        assert!(w00.max_abs_diff(&b.matrix().scale(eig.eigenvalues[0])) < 1e-12);
    }

    #[test]
    fn conditional_blocks_of_bell_state_read_off() {
        let bell = bell_state();
        let blocks = conditional_blocks(&bell, &computational_basis(2)).unwrap();
        let half_00 = ComplexMatrix::diagonal_real(&[0.5, 0.0]).unwrap();
        let half_11 = ComplexMatrix::diagonal_real(&[0.0, 0.5]).unwrap();
        assert!(blocks.get(0, 0).max_abs_diff(&half_00) < 1e-15);
        assert!(blocks.get(1, 1).max_abs_diff(&half_11) < 1e-15);
        let mut w01 = ComplexMatrix::zeros(2);
        w01 = &w01 + &ComplexMatrix::from_fn(2, |i, j| {
            if i == 0 && j == 1 {
                c(0.5, 0.0)
            } else {
                c(0.0, 0.0)
            }
        })
        .unwrap();
        assert!(blocks.get(0, 1).max_abs_diff(&w01) < 1e-15);
    }

    #[test]
    fn conditional_blocks_reconstruct_and_sum_to_marginal() {
        let mut rng = StdRng::seed_from_u64(17);
        let s = random_bipartite(2, 3, &mut rng);
        let blocks = conditional_blocks(&s, &computational_basis(2)).unwrap();
        assert!(blocks.reconstruct().max_abs_diff(s.matrix()) <= tol::CONDITIONAL_RECONSTRUCTION);
        let rho_b = s.marginal(Subsystem::B);
        assert!(blocks.diagonal_sum().max_abs_diff(rho_b.matrix()) <= tol::CONDITIONAL_RECONSTRUCTION);
    }

    #[test]
    fn conditional_blocks_reject_sloppy_basis() {
        let bell = bell_state();
        let skew = vec![
            ComplexVector::new(vec![c(1.0, 0.0), c(0.1, 0.0)]).unwrap(),
            ComplexVector::basis_state(2, 1),
        ];
        assert!(matches!(
            conditional_blocks(&bell, &skew),
            Err(Error::NonOrthonormalBasis { .. })
        ));
    }

    #[test]
    fn block_conditionals_of_product_state_repeat_the_b_factor() {
        let mut rng = StdRng::seed_from_u64(19);
        let a = DensityOperator::new(ComplexMatrix::diagonal_real(&[0.6, 0.3, 0.1]).unwrap())
            .unwrap();
        let b = random_density(2, &mut rng);
        let ab = BipartiteState::from_matrix(tensor(a.matrix(), b.matrix()), 3, 2).unwrap();
        let blocks = block_decompose(&ab.marginal(Subsystem::A), tol::GROUPING_DEFAULT).unwrap();
        let conditionals = block_conditional_states(&ab, &blocks).unwrap();
        assert_eq!(conditionals.len(), 3);
        for cond in &conditionals {
            assert!(cond.state.matrix().max_abs_diff(b.matrix()) < 1e-9);
        }
    }

    #[test]
    fn block_conditionals_of_classically_correlated_state() {
        let s = classically_correlated();
        let blocks = block_decompose(&s.marginal(Subsystem::A), tol::GROUPING_DEFAULT).unwrap();
        assert_eq!(blocks.block_count(), 1);
        let conditionals = block_conditional_states(&s, &blocks).unwrap();
        assert_eq!(conditionals.len(), 1);
        assert!((conditionals[0].weight - 1.0).abs() < 1e-12);
        let half = ComplexMatrix::identity(2).scale(0.5);
        assert!(conditionals[0].state.matrix().max_abs_diff(&half) < 1e-12);
    }

    #[test]
    fn block_conditionals_mix_back_to_the_b_marginal() {
        // Engineered doubly degenerate A marginal.
        let mut rng = StdRng::seed_from_u64(23);
        let s = crate::sampling::random_state_with_marginal_spectrum(
            &[0.35, 0.35, 0.3],
            2,
            2,
            &mut rng,
        );
        let blocks = block_decompose(&s.marginal(Subsystem::A), tol::GROUPING_DEFAULT).unwrap();
        assert_eq!(blocks.block_count(), 2);
        let conditionals = block_conditional_states(&s, &blocks).unwrap();
        let mut mixed = ComplexMatrix::zeros(2);
        for cond in &conditionals {
            mixed = &mixed + &cond.state.matrix().scale(cond.weight);
        }
        let rho_b = s.marginal(Subsystem::B);
        assert!(mixed.max_abs_diff(rho_b.matrix()) <= tol::MIXTURE_RECONSTRUCTION);
    }
}
