//! Random states, unitaries and channels for experiments and tests.
//!
//! Everything is driven by a caller-supplied RNG so runs are reproducible.

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::bounds::KrausMap;
use crate::classical::JointPMF;
use crate::matcore::{partial_trace, tensor, Complex64, ComplexMatrix, Subsystem};
use crate::scramble::BlockStructure;
use crate::states::{BipartiteState, DensityOperator};

fn gaussian_complex(rng: &mut impl Rng) -> Complex64 {
    Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Square matrix of i.i.d. standard complex Gaussians.
fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> nalgebra::DMatrix<Complex64> {
    nalgebra::DMatrix::from_fn(rows, cols, |_, _| gaussian_complex(rng))
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the R diagonal
/// phases absorbed into Q.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let (q, r) = ginibre(dim, dim, rng).qr().unpack();
    let mut q = q;
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / Complex::new(d.norm(), 0.0)
        } else {
            Complex::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix::from_inner(q).expect("Gaussian samples are finite")
}

/// Hilbert-Schmidt-distributed density operator GG†/Tr(GG†).
pub fn random_density(dim: usize, rng: &mut impl Rng) -> DensityOperator {
    let g = ginibre(dim, dim, rng);
    let psd = &g * g.adjoint();
    let trace = psd.trace().re;
    let m = ComplexMatrix::from_inner(psd * Complex::new(1.0 / trace, 0.0))
        .expect("Gaussian samples are finite");
    DensityOperator::new(m).expect("a normalized Gram matrix is a valid state")
}

/// Random bipartite state with the given factor dimensions.
pub fn random_bipartite(dim_a: usize, dim_b: usize, rng: &mut impl Rng) -> BipartiteState {
    BipartiteState::new(random_density(dim_a * dim_b, rng), dim_a, dim_b)
        .expect("dimensions match by construction")
}

/// Random bipartite state whose A marginal has exactly the given spectrum.
///
/// Purifies the target spectrum against a random orthonormal family in
/// B⊗E (E of dimension `dim_env`), traces out E, and rotates A by a Haar
/// unitary. `dim_b·dim_env` must be at least the spectrum length. Larger
/// `dim_env` makes the joint state more mixed; `dim_env = 1` gives a pure
/// joint state.
pub fn random_state_with_marginal_spectrum(
    spectrum: &[f64],
    dim_b: usize,
    dim_env: usize,
    rng: &mut impl Rng,
) -> BipartiteState {
    let dim_a = spectrum.len();
    let dim_be = dim_b * dim_env;
    assert!(
        dim_be >= dim_a,
        "need dim_b*dim_env >= spectrum length for a purification"
    );
    let total: f64 = spectrum.iter().sum();
    assert!(
        (total - 1.0).abs() < 1e-9 && spectrum.iter().all(|&l| l >= 0.0),
        "spectrum must be a probability vector"
    );

    // Columns of a Haar unitary give the random orthonormal family.
    let frame = random_unitary(dim_be, rng);
    let mut psi = vec![Complex::new(0.0, 0.0); dim_a * dim_be];
    for (a, &lambda) in spectrum.iter().enumerate() {
        let amp = lambda.sqrt();
        for be in 0..dim_be {
            psi[a * dim_be + be] = frame.get(be, a) * Complex::new(amp, 0.0);
        }
    }
    let full = ComplexMatrix::from_fn(dim_a * dim_be, |i, j| psi[i] * psi[j].conj())
        .expect("finite amplitudes");
    let joint = partial_trace(&full, dim_a * dim_b, dim_env, Subsystem::A)
        .expect("dimensions match by construction");

    let rotation = tensor(&random_unitary(dim_a, rng), &ComplexMatrix::identity(dim_b));
    BipartiteState::from_matrix(joint.conjugate_by(&rotation), dim_a, dim_b)
        .expect("a purification marginal is a valid state")
}

/// Spectrum with prescribed block multiplicities and well-separated
/// eigenvalues, e.g. `[1, 2]` gives (λ₁, λ₂, λ₂).
pub fn random_spectrum_with_multiplicities(
    multiplicities: &[usize],
    rng: &mut impl Rng,
) -> Vec<f64> {
    loop {
        let raw: Vec<f64> = multiplicities
            .iter()
            .map(|_| rng.gen_range(0.1..1.0))
            .collect();
        let norm: f64 = raw
            .iter()
            .zip(multiplicities)
            .map(|(v, &m)| v * m as f64)
            .sum();
        let values: Vec<f64> = raw.iter().map(|v| v / norm).collect();
        let mut separated = true;
        for i in 0..values.len() {
            for j in (i + 1)..values.len() {
                if (values[i] - values[j]).abs() < 1e-3 {
                    separated = false;
                }
            }
        }
        if separated {
            return values
                .iter()
                .zip(multiplicities)
                .flat_map(|(&v, &m)| std::iter::repeat(v).take(m))
                .collect();
        }
    }
}

/// Random unitary commuting with the decomposed marginal: an independent
/// Haar unitary on each eigenvalue block, identity off the support.
pub fn random_commuting_unitary(blocks: &BlockStructure, rng: &mut impl Rng) -> ComplexMatrix {
    let dim = blocks.dim();
    let mut acc = &ComplexMatrix::identity(dim) - &blocks.support_projector();
    for block in blocks.blocks() {
        let rotation = random_unitary(block.dim, rng);
        for m in 0..block.dim {
            for n in 0..block.dim {
                acc = &acc
                    + &block.basis[m]
                        .outer_product(&block.basis[n])
                        .scale_complex(rotation.get(m, n));
            }
        }
    }
    acc
}

/// Random channel in operator-sum form via a Haar-random isometry into
/// `kraus_count` environment levels.
pub fn random_kraus_map(dim: usize, kraus_count: usize, rng: &mut impl Rng) -> KrausMap {
    let (q, r) = ginibre(dim * kraus_count, dim, rng).qr().unpack();
    let mut q = q;
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / Complex::new(d.norm(), 0.0)
        } else {
            Complex::new(1.0, 0.0)
        };
        for i in 0..dim * kraus_count {
            q[(i, j)] *= phase;
        }
    }
    let elements: Vec<ComplexMatrix> = (0..kraus_count)
        .map(|e| {
            ComplexMatrix::from_fn(dim, |row, col| q[(row * kraus_count + e, col)])
                .expect("Gaussian samples are finite")
        })
        .collect();
    KrausMap::new(elements).expect("isometry columns are orthonormal")
}

/// Random joint PMF with strictly positive entries.
pub fn random_pmf(size_a: usize, size_b: usize, rng: &mut impl Rng) -> JointPMF {
    let raw: Vec<f64> = (0..size_a * size_b)
        .map(|_| rng.gen_range(0.01..1.0))
        .collect();
    let total: f64 = raw.iter().sum();
    JointPMF::new(size_a, size_b, raw.into_iter().map(|v| v / total).collect())
        .expect("normalized positive entries form a PMF")
}

/// Random joint PMF whose A marginal is exactly uniform: p(a,b) =
/// p(b|a)/size_a with random conditionals.
pub fn random_uniform_marginal_pmf(
    size_a: usize,
    size_b: usize,
    rng: &mut impl Rng,
) -> JointPMF {
    let mut p = vec![0.0; size_a * size_b];
    for a in 0..size_a {
        let row: Vec<f64> = (0..size_b).map(|_| rng.gen_range(0.01..1.0)).collect();
        let row_total: f64 = row.iter().sum();
        for b in 0..size_b {
            p[a * size_b + b] = row[b] / (row_total * size_a as f64);
        }
    }
    JointPMF::new(size_a, size_b, p).expect("normalized positive entries form a PMF")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::is_unitary;
    use crate::scramble::block_decompose;
    use crate::tol;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn random_unitaries_are_unitary() {
        let mut rng = StdRng::seed_from_u64(1);
        for dim in [1, 2, 5] {
            assert!(is_unitary(&random_unitary(dim, &mut rng), 1e-10));
        }
    }

    #[test]
    fn engineered_marginal_spectrum_is_exact() {
        let mut rng = StdRng::seed_from_u64(2);
        let spectrum = [0.5, 0.25, 0.25];
        let s = random_state_with_marginal_spectrum(&spectrum, 2, 3, &mut rng);
        let eigs = s.marginal(Subsystem::A).eigenvalues();
        for (got, want) in eigs.iter().zip(spectrum.iter()) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn commuting_unitaries_commute() {
        let mut rng = StdRng::seed_from_u64(3);
        let s = random_state_with_marginal_spectrum(&[0.3, 0.3, 0.4], 2, 2, &mut rng);
        let rho_a = s.marginal(Subsystem::A);
        let blocks = block_decompose(&rho_a, tol::GROUPING_DEFAULT).unwrap();
        for _ in 0..5 {
            let u = random_commuting_unitary(&blocks, &mut rng);
            assert!(is_unitary(&u, tol::UNITARITY));
            assert!(u.commutator_norm(rho_a.matrix()) <= tol::COMMUTATOR);
        }
    }

    #[test]
    fn kraus_maps_are_trace_preserving() {
        let mut rng = StdRng::seed_from_u64(4);
        // Construction already validates completeness; touch a few sizes.
        for (dim, count) in [(2, 1), (2, 3), (3, 4)] {
            let _ = random_kraus_map(dim, count, &mut rng);
        }
    }

    #[test]
    fn uniform_marginal_pmfs_have_uniform_marginals() {
        let mut rng = StdRng::seed_from_u64(5);
        let pmf = random_uniform_marginal_pmf(4, 3, &mut rng);
        for pa in pmf.marginal_a() {
            assert!((pa - 0.25).abs() < 1e-12);
        }
    }
}
