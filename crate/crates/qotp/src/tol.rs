//! Centralized numeric tolerances.
//!
//! Every threshold used for validation or bound checking is defined here so
//! the margins are auditable in one place. Values are double-precision safe
//! for operator dimensions up to a few hundred.

/// Max entry of |M - M†| for a matrix to count as Hermitian.
pub const HERMITICITY: f64 = 1e-9;

/// Max entry of |V†V - I| for eigenvector columns.
pub const ORTHONORMALITY: f64 = 1e-10;

/// Slack on exact trace identities (trace preservation, Tr(A⊗B) = TrA·TrB).
pub const TRACE_IDENTITY: f64 = 1e-12;

/// Max entry of |V diag(λ) V† - M| after an eigendecomposition.
pub const EIG_RECONSTRUCTION: f64 = 1e-9;

/// Eigenvalues in [-PSD_CLAMP, 0) are treated as rounding noise and clamped
/// to zero when a density operator is constructed; anything below is an error.
pub const PSD_CLAMP: f64 = 1e-9;

/// Allowed deviation of a density-operator trace from 1.
pub const UNIT_TRACE: f64 = 1e-9;

/// Allowed deviation of ensemble probabilities from summing to 1.
pub const PROBABILITY_SUM: f64 = 1e-9;

/// Eigenvalues at or below this are treated as exact zeros inside entropy
/// sums (0·log 0 = 0) to avoid log underflow.
pub const ENTROPY_EIGENVALUE_FLOOR: f64 = 1e-12;

/// Entrywise tolerance for deciding a bipartite state is a product state.
/// Looser than the arithmetic tolerances because mutual information near
/// zero amplifies entrywise error quadratically.
pub const PRODUCT_DETECTION: f64 = 1e-6;

/// Eigenvalue blocks at or below this weight carry no mixture mass and are
/// dropped from block structures.
pub const ZERO_BLOCK: f64 = 1e-12;

/// Default relative tolerance for grouping near-degenerate eigenvalues.
pub const GROUPING_DEFAULT: f64 = 1e-9;
/// Smallest accepted grouping tolerance.
pub const GROUPING_MIN: f64 = 1e-12;
/// Largest accepted grouping tolerance.
pub const GROUPING_MAX: f64 = 1e-3;

/// Max entry of |U†U - I| for scrambling members.
pub const UNITARITY: f64 = 1e-10;

/// Max entry of |Uρ - ρU| for a scrambling member against the A marginal.
pub const COMMUTATOR: f64 = 1e-9;

/// Max entrywise drift allowed in the A and B marginals across scrambling.
pub const MARGINAL_PRESERVATION: f64 = 1e-9;

/// Max entry of |Σ_K λ_K Π_K - ρ| for a block-structure reconstruction.
pub const BLOCK_RECONSTRUCTION: f64 = 1e-8;

/// Max entrywise error rebuilding a bipartite state from its conditional
/// block operators.
pub const CONDITIONAL_RECONSTRUCTION: f64 = 1e-10;

/// Max entrywise error of Σ_K P_K ρ^B_K against the B marginal.
pub const MIXTURE_RECONSTRUCTION: f64 = 1e-9;

/// Slack applied to every capacity bound check (entropies accumulate a few
/// ulps per eigenvalue).
pub const BOUND_SLACK: f64 = 1e-8;

/// Privacy threshold: max entrywise deviation of any scrambled A marginal.
pub const PRIVACY: f64 = 1e-9;

/// Agreement required between the sequential twirl and the closed-form
/// block-product average.
pub const CLOSED_FORM_AGREEMENT: f64 = 1e-9;

/// Agreement required between the sequential twirl and brute-force
/// enumeration of the whole ensemble.
pub const ENUMERATION_AGREEMENT: f64 = 1e-10;

/// Relative tolerance for treating two eigenvalue products of a tensor
/// power as the same value.
pub const TYPE_PRODUCT_RELATIVE: f64 = 1e-12;

/// Agreement required between classical mutual information and the mutual
/// information of the diagonal embedding.
pub const EMBEDDING_AGREEMENT: f64 = 1e-9;

/// Max entry of |Σ E_i†E_i - I| for an operator-sum map to count as
/// trace preserving.
pub const KRAUS_COMPLETENESS: f64 = 1e-9;

/// Allowed deviation of a joint PMF from summing to 1.
pub const PMF_SUM: f64 = 1e-12;

/// Refuse to enumerate scrambling ensembles larger than this.
pub const ENUMERATION_LIMIT: u128 = 1_000_000;

/// Refuse to enumerate tensor-power eigenvalue compositions beyond this.
pub const COMPOSITION_LIMIT: u128 = 10_000_000;
