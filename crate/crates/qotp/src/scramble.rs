//! Marginal-preserving scrambling.
//!
//! The A marginal of a bipartite key decomposes into degenerate eigenvalue
//! blocks. Every unitary that is block-diagonal across those blocks commutes
//! with the marginal, so applying it leaks nothing to an eavesdropper who
//! sees A alone. This module builds a finite generating family of such
//! unitaries — discrete Weyl shift/phase pairs within each block plus
//! relative phases between blocks — and computes the ensemble-averaged state
//! three ways: by sequential twirl channels, by the closed-form block
//! product, and (as an oracle) by brute-force enumeration.
//!
//! Averaging over the family erases every correlation the blocks cannot
//! protect: cross-block phases kill coherences between blocks, within-block
//! phases kill off-diagonals inside a block, and within-block shifts
//! uniformize what remains. The average therefore collapses to
//! `Σ_K P_K ρ^A_K ⊗ ρ^B_K`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functionals::von_neumann_entropy;
use crate::matcore::{
    hermitian_eig, tensor, Complex64, ComplexMatrix, ComplexVector, Subsystem,
};
use crate::states::{block_conditional_states, BipartiteState, DensityOperator};
use crate::tol;

/// Seed for the deterministic pseudorandom member subset in
/// [`verify_privacy`]; recorded in every report.
pub const PRIVACY_SAMPLE_SEED: u64 = 0x0714_2025;

/// One degenerate eigenvalue block of an A marginal.
#[derive(Clone, Debug)]
pub struct Block {
    /// Representative eigenvalue λ_K (mean of the grouped raw eigenvalues).
    pub eigenvalue: f64,
    /// Multiplicity d_K.
    pub dim: usize,
    /// Orthonormal basis of the eigenspace.
    pub basis: Vec<ComplexVector>,
    /// Mixture weight P_K = d_K·λ_K.
    pub weight: f64,
}

/// Eigen-decomposition of an A marginal grouped into degenerate blocks.
/// Zero-weight eigenspaces are dropped; scrambling acts as the identity on
/// the complement of the support.
#[derive(Clone, Debug)]
pub struct BlockStructure {
    blocks: Vec<Block>,
    grouping_tol: f64,
    dim: usize,
}

impl BlockStructure {
    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Number of retained blocks D.
    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn grouping_tol(&self) -> f64 {
        self.grouping_tol
    }

    /// Dimension of the underlying A space.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim).sum()
    }

    /// Projector onto block K's eigenspace.
    pub fn projector(&self, k: usize) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.dim);
        for v in &self.blocks[k].basis {
            acc = &acc + &v.outer_product(v);
        }
        acc
    }

    /// Projector onto the support of the marginal.
    pub fn support_projector(&self) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.dim);
        for k in 0..self.block_count() {
            acc = &acc + &self.projector(k);
        }
        acc
    }

    /// The maximally mixed state on block K's eigenspace (ρ^A_K).
    pub fn uniform_block_state(&self, k: usize) -> DensityOperator {
        let block = &self.blocks[k];
        DensityOperator::new(self.projector(k).scale(1.0 / block.dim as f64))
            .expect("a scaled projector is a valid state")
    }

    /// Σ_K λ_K Π_K; equals the decomposed marginal up to grouping error.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.dim);
        for (k, block) in self.blocks.iter().enumerate() {
            acc = &acc + &self.projector(k).scale(block.eigenvalue);
        }
        acc
    }
}

/// Groups the spectrum of an A marginal into degenerate eigenvalue blocks.
///
/// Two consecutive eigenvalues join the same block when they sit within
/// `grouping_tol·max(1, λ_max)` of the block's running mean. Blocks with
/// eigenvalue at most [`tol::ZERO_BLOCK`] carry no weight and are dropped.
pub fn block_decompose(rho_a: &DensityOperator, grouping_tol: f64) -> Result<BlockStructure> {
    if !(tol::GROUPING_MIN..=tol::GROUPING_MAX).contains(&grouping_tol) {
        return Err(Error::GroupingTolOutOfRange {
            value: grouping_tol,
            min: tol::GROUPING_MIN,
            max: tol::GROUPING_MAX,
        });
    }
    let eig = hermitian_eig(rho_a.matrix())?;
    let lambda_max = eig.eigenvalues.first().copied().unwrap_or(0.0);
    let threshold = grouping_tol * lambda_max.max(1.0);

    // Eigenvalues arrive sorted descending; group consecutive runs.
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut mean = f64::NEG_INFINITY;
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        match groups.last_mut() {
            Some(group) if (lambda - mean).abs() <= threshold => {
                group.push(i);
                mean = group.iter().map(|&j| eig.eigenvalues[j]).sum::<f64>()
                    / group.len() as f64;
            }
            _ => {
                groups.push(vec![i]);
                mean = lambda;
            }
        }
    }

    let blocks: Vec<Block> = groups
        .into_iter()
        .filter_map(|group| {
            let mean = group.iter().map(|&j| eig.eigenvalues[j]).sum::<f64>()
                / group.len() as f64;
            if mean <= tol::ZERO_BLOCK {
                return None;
            }
            let basis: Vec<ComplexVector> =
                group.iter().map(|&j| eig.eigenvector(j)).collect();
            Some(Block {
                eigenvalue: mean,
                dim: group.len(),
                weight: mean * group.len() as f64,
                basis,
            })
        })
        .collect();

    Ok(BlockStructure {
        blocks,
        grouping_tol,
        dim: rho_a.dim(),
    })
}

/// Finite family of marginal-preserving unitaries with uniform probabilities.
///
/// The member for index tuple (c, {(a_K, b_K)}) is
/// `Φ(c) · ⊕_K X_K^{a_K} Z_K^{b_K}`, identity off the support: on block K's
/// basis, Z_K is the diagonal of d_K-th roots of unity, X_K the cyclic
/// shift, and Φ(c) multiplies block K by e^{2πi·c·K/D}. There are
/// N = D·Π_K d_K² members.
#[derive(Clone, Debug)]
pub struct ScramblingEnsemble {
    blocks: BlockStructure,
    size: u128,
}

impl ScramblingEnsemble {
    pub fn block_structure(&self) -> &BlockStructure {
        &self.blocks
    }

    /// Number of members N.
    pub fn size(&self) -> u128 {
        self.size
    }

    /// Dimension of the A space the members act on.
    pub fn dim(&self) -> usize {
        self.blocks.dim()
    }

    /// Materializes member `index` (0 ≤ index < N).
    pub fn member(&self, index: u128) -> ComplexMatrix {
        assert!(index < self.size, "ensemble member index out of range");
        let d_count = self.blocks.block_count() as u128;
        let mut rest = index;
        let c = (rest % d_count) as usize;
        rest /= d_count;

        let dim = self.blocks.dim();
        let mut acc = ComplexMatrix::zeros(dim);
        for (k, block) in self.blocks.blocks().iter().enumerate() {
            let d = block.dim as u128;
            let shift = (rest % d) as usize;
            rest /= d;
            let phase_power = (rest % d) as usize;
            rest /= d;

            let block_phase = Complex64::cis(
                2.0 * std::f64::consts::PI * (c as f64) * (k as f64) / d_count as f64,
            );
            let omega = 2.0 * std::f64::consts::PI / block.dim as f64;
            for m in 0..block.dim {
                let target = (m + shift) % block.dim;
                let phase =
                    block_phase * Complex64::cis(omega * (phase_power as f64) * (m as f64));
                acc = &acc
                    + &block.basis[target]
                        .outer_product(&block.basis[m])
                        .scale_complex(phase);
            }
        }
        let complement =
            &ComplexMatrix::identity(dim) - &self.blocks.support_projector();
        &acc + &complement
    }
}

/// Builds the discrete Weyl/permutation generating family for a block
/// structure.
pub fn build_ensemble(blocks: BlockStructure) -> ScramblingEnsemble {
    let mut size: u128 = blocks.block_count() as u128;
    for block in blocks.blocks() {
        let d = block.dim as u128;
        size = size.saturating_mul(d * d);
    }
    ScramblingEnsemble { blocks, size }
}

fn conjugate_on_a(state: &ComplexMatrix, u_a: &ComplexMatrix, db: usize) -> ComplexMatrix {
    state.conjugate_by(&tensor(u_a, &ComplexMatrix::identity(db)))
}

/// Φ(c) = Σ_K e^{2πi·c·K/D} Π_K + (identity off support).
fn block_phase_unitary(blocks: &BlockStructure, c: usize) -> ComplexMatrix {
    let d_count = blocks.block_count();
    let dim = blocks.dim();
    let mut acc = &ComplexMatrix::identity(dim) - &blocks.support_projector();
    for k in 0..d_count {
        let phase =
            Complex64::cis(2.0 * std::f64::consts::PI * (c as f64) * (k as f64) / d_count as f64);
        acc = &acc + &blocks.projector(k).scale_complex(phase);
    }
    acc
}

/// Z_K^b ⊕ identity: diagonal roots of unity on block K's basis.
fn within_phase_unitary(blocks: &BlockStructure, k: usize, b: usize) -> ComplexMatrix {
    let block = &blocks.blocks()[k];
    let dim = blocks.dim();
    let mut acc = &ComplexMatrix::identity(dim) - &blocks.projector(k);
    let omega = 2.0 * std::f64::consts::PI / block.dim as f64;
    for m in 0..block.dim {
        let phase = Complex64::cis(omega * (b as f64) * (m as f64));
        acc = &acc + &block.basis[m].outer_product(&block.basis[m]).scale_complex(phase);
    }
    acc
}

/// X_K^a ⊕ identity: cyclic shift of block K's basis.
fn within_shift_unitary(blocks: &BlockStructure, k: usize, a: usize) -> ComplexMatrix {
    let block = &blocks.blocks()[k];
    let dim = blocks.dim();
    let mut acc = &ComplexMatrix::identity(dim) - &blocks.projector(k);
    for m in 0..block.dim {
        let target = (m + a) % block.dim;
        acc = &acc + &block.basis[target].outer_product(&block.basis[m]);
    }
    acc
}

fn twirl_raw(
    state: &ComplexMatrix,
    db: usize,
    unitaries: impl Iterator<Item = ComplexMatrix>,
) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(state.dim());
    let mut count = 0usize;
    for u in unitaries {
        acc = &acc + &conjugate_on_a(state, &u, db);
        count += 1;
    }
    acc.scale(1.0 / count as f64)
}

fn phase_across_raw(state: &ComplexMatrix, blocks: &BlockStructure, db: usize) -> ComplexMatrix {
    twirl_raw(
        state,
        db,
        (0..blocks.block_count()).map(|c| block_phase_unitary(blocks, c)),
    )
}

fn phase_within_raw(state: &ComplexMatrix, blocks: &BlockStructure, db: usize) -> ComplexMatrix {
    let mut current = state.clone();
    for k in 0..blocks.block_count() {
        let d = blocks.blocks()[k].dim;
        current = twirl_raw(&current, db, (0..d).map(|b| within_phase_unitary(blocks, k, b)));
    }
    current
}

fn shift_within_raw(state: &ComplexMatrix, blocks: &BlockStructure, db: usize) -> ComplexMatrix {
    let mut current = state.clone();
    for k in 0..blocks.block_count() {
        let d = blocks.blocks()[k].dim;
        current = twirl_raw(&current, db, (0..d).map(|a| within_shift_unitary(blocks, k, a)));
    }
    current
}

fn rewrap(state: ComplexMatrix, da: usize, db: usize) -> BipartiteState {
    BipartiteState::from_matrix(state, da, db)
        .expect("an average of unitary conjugations of a valid state is a valid state")
}

/// Averages the state over all relative phases between blocks.
pub fn phase_twirl_across_blocks(s: &BipartiteState, blocks: &BlockStructure) -> BipartiteState {
    rewrap(
        phase_across_raw(s.matrix(), blocks, s.dim_b()),
        s.dim_a(),
        s.dim_b(),
    )
}

/// Averages the state over all within-block relative phases.
pub fn phase_twirl_within_blocks(s: &BipartiteState, blocks: &BlockStructure) -> BipartiteState {
    rewrap(
        phase_within_raw(s.matrix(), blocks, s.dim_b()),
        s.dim_a(),
        s.dim_b(),
    )
}

/// Averages the state over all within-block cyclic shifts.
pub fn shift_twirl_within_blocks(s: &BipartiteState, blocks: &BlockStructure) -> BipartiteState {
    rewrap(
        shift_within_raw(s.matrix(), blocks, s.dim_b()),
        s.dim_a(),
        s.dim_b(),
    )
}

fn check_marginal_matches(s: &BipartiteState, blocks: &BlockStructure) -> Result<()> {
    let deviation = s
        .marginal(Subsystem::A)
        .matrix()
        .max_abs_diff(&blocks.reconstruct());
    if deviation > tol::BLOCK_RECONSTRUCTION {
        return Err(Error::MarginalMismatch {
            deviation,
            tol: tol::BLOCK_RECONSTRUCTION,
        });
    }
    Ok(())
}

/// σ^AB = (1/N)·Σ_α (U_α ⊗ I) ρ^AB (U_α ⊗ I)†, computed by sequential twirl
/// channels rather than explicit enumeration. Both marginals are preserved.
pub fn averaged_state(s: &BipartiteState, e: &ScramblingEnsemble) -> Result<BipartiteState> {
    check_marginal_matches(s, e.block_structure())?;
    let blocks = e.block_structure();
    let db = s.dim_b();
    let mut current = phase_across_raw(s.matrix(), blocks, db);
    current = phase_within_raw(&current, blocks, db);
    current = shift_within_raw(&current, blocks, db);
    Ok(rewrap(current, s.dim_a(), s.dim_b()))
}

/// σ^AB = Σ_K P_K ρ^A_K ⊗ ρ^B_K, built directly from the block structure and
/// the conditional B states. Agrees with [`averaged_state`].
pub fn averaged_state_closed_form(
    s: &BipartiteState,
    blocks: &BlockStructure,
) -> Result<BipartiteState> {
    check_marginal_matches(s, blocks)?;
    let conditionals = block_conditional_states(s, blocks)?;
    let dim = s.dim();
    let mut acc = ComplexMatrix::zeros(dim);
    for (k, cond) in conditionals.iter().enumerate() {
        let block_a = blocks.uniform_block_state(k);
        acc = &acc + &tensor(block_a.matrix(), cond.state.matrix()).scale(cond.weight);
    }
    Ok(rewrap(acc, s.dim_a(), s.dim_b()))
}

/// Brute-force (1/N)·Σ_α average over every ensemble member. Quadratic in
/// everything; retained as the oracle the twirl implementation is checked
/// against.
pub fn enumerate_average(
    s: &BipartiteState,
    e: &ScramblingEnsemble,
    limit: u128,
) -> Result<BipartiteState> {
    if e.size() > limit {
        return Err(Error::EnumerationTooLarge {
            required: e.size(),
            limit,
        });
    }
    check_marginal_matches(s, e.block_structure())?;
    let db = s.dim_b();
    let mut acc = ComplexMatrix::zeros(s.dim());
    for index in 0..e.size() {
        acc = &acc + &conjugate_on_a(s.matrix(), &e.member(index), db);
    }
    Ok(rewrap(acc.scale(1.0 / e.size() as f64), s.dim_a(), s.dim_b()))
}

/// Worst marginal deviation and commutator over a family of unitaries
/// applied to a fixed A state. Returns (max ‖UρU† - ρ‖_max, max ‖[U,ρ]‖_max).
pub fn privacy_scan(
    rho_a: &DensityOperator,
    members: impl IntoIterator<Item = ComplexMatrix>,
) -> (f64, f64) {
    let mut max_deviation = 0.0f64;
    let mut max_commutator = 0.0f64;
    for u in members {
        let rotated = rho_a.matrix().conjugate_by(&u);
        max_deviation = max_deviation.max(rotated.max_abs_diff(rho_a.matrix()));
        max_commutator = max_commutator.max(u.commutator_norm(rho_a.matrix()));
    }
    (max_deviation, max_commutator)
}

/// Privacy audit of a scrambling ensemble against a key state.
#[derive(Clone, Debug, Serialize)]
pub struct PrivacyReport {
    /// Max entrywise deviation of any sampled σ^A_α from ρ^A.
    pub max_marginal_deviation: f64,
    /// Max entrywise commutator ‖[U_α, ρ^A]‖ over the sample.
    pub max_commutator: f64,
    /// How many members were checked.
    pub members_checked: usize,
    /// Whether every member was checked (N small enough).
    pub exhaustive: bool,
    /// Seed of the pseudorandom subset when not exhaustive.
    pub sample_seed: u64,
}

impl PrivacyReport {
    /// Privacy holds when no sampled marginal moved beyond [`tol::PRIVACY`].
    pub fn holds(&self) -> bool {
        self.max_marginal_deviation <= tol::PRIVACY
    }
}

pub(crate) fn sample_indices(n: u128, count: usize, seed: u64) -> (Vec<u128>, bool) {
    if n <= count as u128 {
        ((0..n).collect(), true)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ((0..count).map(|_| rng.gen_range(0..n)).collect(), false)
    }
}

/// Checks `sample_count` ensemble members (all of them when N is small
/// enough) for marginal preservation and commutation with ρ^A.
pub fn verify_privacy(
    s: &BipartiteState,
    e: &ScramblingEnsemble,
    sample_count: usize,
) -> PrivacyReport {
    let rho_a = s.marginal(Subsystem::A);
    let (indices, exhaustive) =
        sample_indices(e.size(), sample_count.max(1), PRIVACY_SAMPLE_SEED);
    let members_checked = indices.len();
    let (max_marginal_deviation, max_commutator) =
        privacy_scan(&rho_a, indices.into_iter().map(|i| e.member(i)));
    PrivacyReport {
        max_marginal_deviation,
        max_commutator,
        members_checked,
        exhaustive,
        sample_seed: PRIVACY_SAMPLE_SEED,
    }
}

/// Holevo quantity of the scrambled ensemble: S(σ^AB) - S(ρ^AB). Every
/// member state is a unitary rotation of ρ^AB, so member entropies drop out.
pub fn ensemble_chi(s: &BipartiteState, e: &ScramblingEnsemble) -> Result<f64> {
    let sigma = averaged_state(s, e)?;
    Ok(von_neumann_entropy(sigma.density()) - von_neumann_entropy(s.density()))
}
