//! The bound ladder around the secret-communication capacity.
//!
//! [`capacity_report`] runs the full pipeline on a key state and records
//! every bound with its margin: the mutual-information upper bound, the
//! achievable lower bound with its log D gap, the residual correlation
//! bound, and the privacy audit. [`insecure_bound_check`] covers the relaxed
//! setting where the operations on A need not preserve the marginal, and
//! the asymptotic helpers track how the per-copy rate approaches the mutual
//! information as keys are used in blocks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::functionals::{holevo_chi, mutual_information, von_neumann_entropy, StateEnsemble};
use crate::matcore::{tensor, ComplexMatrix, ComplexVector, Subsystem};
use crate::scramble::{
    averaged_state, block_decompose, build_ensemble, sample_indices, verify_privacy,
    PrivacyReport,
};
use crate::states::{BipartiteState, DensityOperator};
use crate::tol;

const PRIVACY_SAMPLE_COUNT: usize = 128;
const CHI_A_SAMPLE_COUNT: usize = 64;
const CHI_A_SAMPLE_SEED: u64 = 0x0A11_CE00;

/// How many eigenvalue compositions [`asymptotic_schedule`] is willing to
/// enumerate per point when filling exact counts.
const SCHEDULE_COUNT_LIMIT: u128 = 100_000;

/// One named bound check. `margin` is the signed slack after tolerance;
/// negative means violated.
#[derive(Clone, Debug, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub margin: f64,
    pub passed: bool,
}

impl BoundCheck {
    fn new(name: &str, margin: f64) -> Self {
        Self {
            name: name.to_string(),
            margin,
            passed: margin >= 0.0,
        }
    }
}

/// Everything the capacity pipeline measures for one key state.
#[derive(Clone, Debug, Serialize)]
pub struct CapacityReport {
    /// Mutual information of the key, in bits: the capacity upper bound.
    pub i_rho: f64,
    /// Mutual information left in the scrambled average.
    pub i_sigma: f64,
    /// Holevo quantity of the scrambling ensemble: the achieved rate.
    pub chi_ab: f64,
    /// Holevo quantity of the eavesdropper's ensemble; zero for a private
    /// scheme.
    pub chi_a: f64,
    /// Number of distinct eigenvalue blocks D in the A marginal.
    pub block_count: usize,
    /// log₂ D, the worst-case gap of the achievable bound.
    pub log_d: f64,
    /// i_rho - log₂ D (recorded, not asserted).
    pub lower_bound: f64,
    /// i_rho (recorded, not asserted).
    pub upper_bound: f64,
    /// Ensemble size N = D·Π d_K².
    pub ensemble_size: u128,
    pub privacy: PrivacyReport,
    pub checks: Vec<BoundCheck>,
}

impl CapacityReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Runs block decomposition, ensemble synthesis, scrambling and the privacy
/// audit on a key state, and records the full bound ladder.
pub fn capacity_report(s: &BipartiteState, grouping_tol: f64) -> Result<CapacityReport> {
    let i_rho = mutual_information(s);
    let blocks = block_decompose(&s.marginal(Subsystem::A), grouping_tol)?;
    let block_count = blocks.block_count();
    let log_d = (block_count as f64).log2();
    let ensemble = build_ensemble(blocks);

    let sigma = averaged_state(s, &ensemble)?;
    let i_sigma = mutual_information(&sigma);
    let chi_ab = von_neumann_entropy(sigma.density()) - von_neumann_entropy(s.density());
    let privacy = verify_privacy(s, &ensemble, PRIVACY_SAMPLE_COUNT);

    // The eavesdropper's Holevo quantity, computed explicitly over a
    // deterministic member sample rather than assumed zero.
    let rho_a = s.marginal(Subsystem::A);
    let (indices, _) = sample_indices(ensemble.size(), CHI_A_SAMPLE_COUNT, CHI_A_SAMPLE_SEED);
    let eve_states: Vec<DensityOperator> = indices
        .into_iter()
        .map(|i| {
            DensityOperator::new(rho_a.matrix().conjugate_by(&ensemble.member(i)))
                .expect("a unitary rotation of a valid state is a valid state")
        })
        .collect();
    let chi_a = holevo_chi(&StateEnsemble::uniform(eve_states)?);

    let checks = vec![
        BoundCheck::new("chi_ab_le_i_rho", i_rho + tol::BOUND_SLACK - chi_ab),
        BoundCheck::new(
            "chi_ab_ge_i_rho_minus_log_d",
            chi_ab - (i_rho - log_d - tol::BOUND_SLACK),
        ),
        BoundCheck::new("i_sigma_le_log_d", log_d + tol::BOUND_SLACK - i_sigma),
        BoundCheck::new(
            "privacy_marginal_deviation",
            tol::PRIVACY - privacy.max_marginal_deviation,
        ),
    ];

    Ok(CapacityReport {
        i_rho,
        i_sigma,
        chi_ab,
        chi_a,
        block_count,
        log_d,
        lower_bound: i_rho - log_d,
        upper_bound: i_rho,
        ensemble_size: ensemble.size(),
        privacy,
        checks,
    })
}

/// Completely positive trace-preserving map in operator-sum form:
/// ρ ↦ Σ_i E_i ρ E_i† with Σ_i E_i†E_i = I.
#[derive(Clone, Debug)]
pub struct KrausMap {
    elements: Vec<ComplexMatrix>,
    dim: usize,
}

impl KrausMap {
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = elements.first().ok_or(Error::EmptyKrausMap)?.dim();
        let mut completeness = ComplexMatrix::zeros(dim);
        for e in &elements {
            if e.dim() != dim {
                return Err(Error::EnsembleDimensionMismatch {
                    expected: dim,
                    found: e.dim(),
                });
            }
            completeness = &completeness + &e.adjoint().matmul(e);
        }
        let deviation = completeness.max_abs_diff(&ComplexMatrix::identity(dim));
        if deviation > tol::KRAUS_COMPLETENESS {
            return Err(Error::NotTracePreserving {
                deviation,
                tol: tol::KRAUS_COMPLETENESS,
            });
        }
        Ok(Self { elements, dim })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            elements: vec![ComplexMatrix::identity(dim)],
            dim,
        }
    }

    /// Single-element map; the completeness check enforces unitarity.
    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    /// Discards the input and produces |ψ⟩⟨ψ|: elements |ψ⟩⟨i|.
    pub fn replacement(target: &ComplexVector) -> Result<Self> {
        let dim = target.dim();
        let elements = (0..dim)
            .map(|i| target.outer_product(&ComplexVector::basis_state(dim, i)))
            .collect();
        Self::new(elements)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn apply(&self, rho: &DensityOperator) -> DensityOperator {
        assert_eq!(self.dim, rho.dim(), "channel dimension mismatch");
        let mut acc = ComplexMatrix::zeros(self.dim);
        for e in &self.elements {
            acc = &acc + &rho.matrix().conjugate_by(e);
        }
        DensityOperator::new(acc)
            .expect("a trace-preserving map sends states to states")
    }

    /// Applies the map to the A factor of a bipartite state.
    pub fn apply_to_a(&self, s: &BipartiteState) -> BipartiteState {
        assert_eq!(self.dim, s.dim_a(), "channel dimension mismatch");
        let identity_b = ComplexMatrix::identity(s.dim_b());
        let mut acc = ComplexMatrix::zeros(s.dim());
        for e in &self.elements {
            acc = &acc + &s.matrix().conjugate_by(&tensor(e, &identity_b));
        }
        BipartiteState::from_matrix(acc, s.dim_a(), s.dim_b())
            .expect("a local trace-preserving map sends states to states")
    }
}

/// Both sides of the relaxed-privacy bound χ^AB ≤ I_ρ + χ^A.
#[derive(Clone, Debug, Serialize)]
pub struct InsecureBoundReport {
    pub i_rho: f64,
    pub chi_a: f64,
    pub chi_ab: f64,
    /// i_rho + chi_a.
    pub bound: f64,
    pub holds: bool,
}

/// Evaluates the leakage bound for an arbitrary ensemble of (not necessarily
/// unitary) operations on A, supplied in operator-sum form.
pub fn insecure_bound_check(
    s: &BipartiteState,
    operations: &[(f64, KrausMap)],
) -> Result<InsecureBoundReport> {
    if operations.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let mut sum = 0.0;
    for (p, op) in operations {
        if *p < 0.0 {
            return Err(Error::NegativeProbability { value: *p });
        }
        if op.dim() != s.dim_a() {
            return Err(Error::EnsembleDimensionMismatch {
                expected: s.dim_a(),
                found: op.dim(),
            });
        }
        sum += p;
    }
    let margin = (sum - 1.0).abs();
    if margin > tol::PROBABILITY_SUM {
        return Err(Error::ProbabilitiesNotNormalized {
            sum,
            margin,
            tol: tol::PROBABILITY_SUM,
        });
    }

    let rho_a = s.marginal(Subsystem::A);
    let mut eve_members = Vec::with_capacity(operations.len());
    let mut joint_members = Vec::with_capacity(operations.len());
    for (p, op) in operations {
        eve_members.push((*p, op.apply(&rho_a)));
        joint_members.push((*p, op.apply_to_a(s).density().clone()));
    }
    let chi_a = holevo_chi(&StateEnsemble::new(eve_members)?);
    let chi_ab = holevo_chi(&StateEnsemble::new(joint_members)?);
    let i_rho = mutual_information(s);
    let bound = i_rho + chi_a;
    Ok(InsecureBoundReport {
        i_rho,
        chi_a,
        chi_ab,
        bound,
        holds: chi_ab <= bound + tol::BOUND_SLACK,
    })
}

/// Per-copy rate guarantees for using n copies of a key jointly.
#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticPoint {
    pub n: usize,
    /// Dimension d of the A space.
    pub d: usize,
    /// Mutual information of a single copy, in bits.
    pub mutual_information: f64,
    /// d·log₂(n+1): the worst-case block-count penalty for n copies.
    pub type_class_bound: f64,
    /// I - (d/n)·log₂(n+1): guaranteed per-copy rate.
    pub rate_lower_bound: f64,
    /// Exact number of distinct eigenvalues of the n-fold marginal, when
    /// small enough to enumerate.
    pub exact_distinct_eigenvalues: Option<usize>,
}

/// Rate lower bounds for n = 1..=n_max copies of a key with A marginal
/// `rho_a` and single-copy mutual information `i_rho`.
///
/// The n-copy marginal has one distinct eigenvalue per occupation pattern of
/// the single-copy spectrum, so the block count grows only polynomially in n
/// while the raw rate grows linearly; the schedule records the resulting
/// per-copy guarantee. Exact eigenvalue counts are filled in where the
/// pattern enumeration stays small.
pub fn asymptotic_schedule(
    rho_a: &DensityOperator,
    i_rho: f64,
    n_max: usize,
) -> Vec<AsymptoticPoint> {
    let d = rho_a.dim();
    let spectrum = rho_a.eigenvalues();
    (1..=n_max)
        .map(|n| {
            let log_n1 = ((n + 1) as f64).log2();
            let exact = if composition_count(n, d) <= SCHEDULE_COUNT_LIMIT {
                count_tensor_eigenvalues(&spectrum, n).ok()
            } else {
                None
            };
            AsymptoticPoint {
                n,
                d,
                mutual_information: i_rho,
                type_class_bound: d as f64 * log_n1,
                rate_lower_bound: i_rho - (d as f64 / n as f64) * log_n1,
                exact_distinct_eigenvalues: exact,
            }
        })
        .collect()
}

/// Number of compositions of n into d non-negative parts, C(n+d-1, d-1),
/// saturating on overflow.
fn composition_count(n: usize, d: usize) -> u128 {
    if d == 0 {
        return 0;
    }
    let mut result: u128 = 1;
    for k in 0..(d - 1) {
        result = result.saturating_mul((n + d - 1 - k) as u128);
        result /= (k + 1) as u128;
    }
    result
}

/// Counts the distinct values of Π_i λ_i^{n_i} over all compositions
/// (n_1..n_d) of n, merging products that agree to relative
/// [`tol::TYPE_PRODUCT_RELATIVE`].
pub fn count_tensor_eigenvalues(eigenvalues: &[f64], n: usize) -> Result<usize> {
    let d = eigenvalues.len();
    if d == 0 {
        return Ok(0);
    }
    let total = composition_count(n, d);
    if total > tol::COMPOSITION_LIMIT {
        return Err(Error::EnumerationTooLarge {
            required: total,
            limit: tol::COMPOSITION_LIMIT,
        });
    }
    let mut products = Vec::with_capacity(total as usize);
    collect_products(eigenvalues, n, 0, 1.0, &mut products);
    products.sort_by(f64::total_cmp);
    let mut distinct = 0usize;
    let mut last: Option<f64> = None;
    for value in products {
        let is_new = match last {
            None => true,
            Some(prev) => {
                (value - prev).abs() > tol::TYPE_PRODUCT_RELATIVE * value.abs().max(prev.abs())
            }
        };
        if is_new {
            distinct += 1;
        }
        last = Some(value);
    }
    Ok(distinct)
}

fn collect_products(
    eigenvalues: &[f64],
    remaining: usize,
    index: usize,
    product: f64,
    out: &mut Vec<f64>,
) {
    if index == eigenvalues.len() - 1 {
        out.push(product * eigenvalues[index].powi(remaining as i32));
        return;
    }
    for take in 0..=remaining {
        collect_products(
            eigenvalues,
            remaining - take,
            index + 1,
            product * eigenvalues[index].powi(take as i32),
            out,
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use crate::scramble::enumerate_average;
    use crate::states::tests::{bell_state, random_density};
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn bell_state_report_hits_the_upper_bound() {
        let report = capacity_report(&bell_state(), tol::GROUPING_DEFAULT).unwrap();
        assert!((report.i_rho - 2.0).abs() < 1e-9);
        assert!((report.chi_ab - 2.0).abs() < 1e-9);
        assert!(report.i_sigma.abs() < 1e-9);
        assert_eq!(report.block_count, 1);
        assert_eq!(report.ensemble_size, 4);
        assert!(report.chi_a.abs() < 1e-9);
        assert!(report.all_passed());
    }

    #[test]
    fn product_state_report_is_all_zeros() {
        let mut rng = StdRng::seed_from_u64(1);
        let a = random_density(2, &mut rng);
        let b = random_density(2, &mut rng);
        let s = BipartiteState::from_matrix(tensor(a.matrix(), b.matrix()), 2, 2).unwrap();
        let report = capacity_report(&s, tol::GROUPING_DEFAULT).unwrap();
        assert!(report.i_rho.abs() < 1e-9);
        assert!(report.chi_ab.abs() < 1e-8);
        assert!(report.all_passed());
    }

    #[test]
    fn engineered_two_block_key_respects_the_log_d_gap() {
        let mut rng = StdRng::seed_from_u64(2);
        let s =
            sampling::random_state_with_marginal_spectrum(&[0.5, 0.25, 0.25], 3, 2, &mut rng);
        let report = capacity_report(&s, tol::GROUPING_DEFAULT).unwrap();
        assert_eq!(report.block_count, 2);
        assert!(report.chi_ab >= report.i_rho - 1.0 - tol::BOUND_SLACK);
        assert!(report.all_passed());

        // Cross-check χ^AB against the brute-force enumerated average.
        let blocks =
            block_decompose(&s.marginal(Subsystem::A), tol::GROUPING_DEFAULT).unwrap();
        let ensemble = build_ensemble(blocks);
        let sigma = enumerate_average(&s, &ensemble, tol::ENUMERATION_LIMIT).unwrap();
        let chi_brute =
            von_neumann_entropy(sigma.density()) - von_neumann_entropy(s.density());
        assert!((report.chi_ab - chi_brute).abs() <= tol::BOUND_SLACK);
    }

    #[test]
    fn report_serializes_to_json() {
        let report = capacity_report(&bell_state(), tol::GROUPING_DEFAULT).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"ensemble_size\":4"));
        assert!(json.contains("chi_ab"));
    }

    #[test]
    fn kraus_map_rejects_incomplete_elements() {
        let half = ComplexMatrix::identity(2).scale(0.5);
        assert!(matches!(
            KrausMap::new(vec![half]),
            Err(Error::NotTracePreserving { .. })
        ));
    }

    #[test]
    fn insecure_bound_is_tight_for_identical_operations() {
        let bell = bell_state();
        let ops = vec![
            (0.5, KrausMap::identity(2)),
            (0.5, KrausMap::identity(2)),
        ];
        let report = insecure_bound_check(&bell, &ops).unwrap();
        assert!(report.chi_a.abs() < 1e-12);
        assert!(report.chi_ab.abs() < 1e-12);
        assert!(report.holds);
    }

    #[test]
    fn insecure_bound_with_scrambling_members_reduces_to_the_private_case() {
        let bell = bell_state();
        let ensemble = build_ensemble(
            block_decompose(&bell.marginal(Subsystem::A), tol::GROUPING_DEFAULT).unwrap(),
        );
        let ops: Vec<(f64, KrausMap)> = (0..ensemble.size())
            .map(|i| {
                (
                    1.0 / ensemble.size() as f64,
                    KrausMap::unitary(ensemble.member(i)).unwrap(),
                )
            })
            .collect();
        let report = insecure_bound_check(&bell, &ops).unwrap();
        assert!(report.chi_a.abs() < 1e-9);
        assert!((report.chi_ab - 2.0).abs() < 1e-9);
        assert!(report.holds);
    }

    #[test]
    fn insecure_bound_holds_for_a_leaky_replacement_mix() {
        let bell = bell_state();
        let target = ComplexVector::basis_state(2, 0);
        let ops = vec![
            (0.5, KrausMap::identity(2)),
            (0.5, KrausMap::replacement(&target).unwrap()),
        ];
        let report = insecure_bound_check(&bell, &ops).unwrap();
        assert!(report.chi_a > 0.1, "the replacement mix must leak");
        assert!(report.holds);
    }

    #[test]
    fn insecure_bound_rejects_bad_probabilities() {
        let bell = bell_state();
        let ops = vec![(0.7, KrausMap::identity(2))];
        assert!(matches!(
            insecure_bound_check(&bell, &ops),
            Err(Error::ProbabilitiesNotNormalized { .. })
        ));
    }

    #[test]
    fn asymptotic_schedule_reproduces_the_formula() {
        let rho_a = DensityOperator::maximally_mixed(2);
        let schedule = asymptotic_schedule(&rho_a, 2.0, 1000);
        assert!((schedule[0].rate_lower_bound - 0.0).abs() < 1e-12);
        let last = &schedule[999];
        let expected = 2.0 - (2.0 / 1000.0) * (1001f64).log2();
        assert!((last.rate_lower_bound - expected).abs() < 1e-12);
        assert!((last.type_class_bound - 2.0 * (1001f64).log2()).abs() < 1e-12);

        // Within a bit of I at n = 10·d exactly when log₂(10d+1) ≤ 10.
        let n = 20;
        let gap = (2.0 / n as f64) * ((n + 1) as f64).log2();
        assert_eq!(gap <= 1.0, (21f64).log2() <= 10.0);
    }

    #[test]
    fn rate_lower_bound_is_nondecreasing_from_n_three() {
        let rho_a = DensityOperator::maximally_mixed(3);
        let schedule = asymptotic_schedule(&rho_a, 1.5, 60);
        for pair in schedule.windows(2) {
            if pair[0].n >= 3 {
                assert!(pair[1].rate_lower_bound >= pair[0].rate_lower_bound);
            }
        }
        for point in &schedule {
            assert!(point.rate_lower_bound <= point.mutual_information);
            let gap = point.mutual_information - point.rate_lower_bound;
            let exact = (point.d as f64 / point.n as f64) * ((point.n + 1) as f64).log2();
            assert!((gap - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_spectrum_has_one_tensor_eigenvalue() {
        for n in [1, 3, 7] {
            assert_eq!(count_tensor_eigenvalues(&[0.5, 0.5], n).unwrap(), 1);
        }
    }

    #[test]
    fn dyadic_spectrum_products_collapse() {
        // Pairs drawn from {1/2, 1/4, 1/4}: products {1/4, 1/8, 1/16}.
        assert_eq!(count_tensor_eigenvalues(&[0.5, 0.25, 0.25], 2).unwrap(), 3);
    }

    #[test]
    fn generic_spectrum_hits_the_composition_count() {
        // No multiplicative coincidences: one product per composition.
        let count = count_tensor_eigenvalues(&[0.7, 0.3], 3).unwrap();
        assert_eq!(count, 4);
    }

    #[test]
    fn counts_respect_the_type_class_bound() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..5 {
            let rho = random_density(3, &mut rng);
            let spectrum = rho.eigenvalues();
            for n in 1..=5 {
                let count = count_tensor_eigenvalues(&spectrum, n).unwrap();
                assert!(count as u128 <= ((n + 1) as u128).pow(3));
                assert!(count as u128 <= composition_count(n, 3));
            }
        }
    }

    #[test]
    fn refuses_oversized_enumerations() {
        let spectrum: Vec<f64> = (0..12).map(|i| (i + 1) as f64 / 78.0).collect();
        assert!(matches!(
            count_tensor_eigenvalues(&spectrum, 40),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }
}
