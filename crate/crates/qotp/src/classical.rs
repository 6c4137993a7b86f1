//! Classical analogue: correlated random variables as a key.
//!
//! A joint PMF over (X_A, X_B) embeds as a diagonal bipartite state, after
//! which the whole quantum pipeline applies. Classical mutual information is
//! also computed directly from the PMF so the embedding has an independent
//! cross-check.

use serde::Serialize;

use crate::bounds::{capacity_report, CapacityReport};
use crate::error::{Error, Result};
use crate::matcore::{Complex64, ComplexMatrix};
use crate::states::BipartiteState;
use crate::tol;

/// Joint probability mass function of a pair of finite random variables.
#[derive(Clone, Debug)]
pub struct JointPMF {
    size_a: usize,
    size_b: usize,
    p: Vec<f64>,
}

impl JointPMF {
    /// Row-major probabilities: `p[a*size_b + b]` = P(X_A = a, X_B = b).
    pub fn new(size_a: usize, size_b: usize, p: Vec<f64>) -> Result<Self> {
        if p.len() != size_a * size_b {
            return Err(Error::ShapeMismatch {
                len: p.len(),
                dim: size_a,
                expected: size_a * size_b,
            });
        }
        let mut sum = 0.0;
        for (i, &value) in p.iter().enumerate() {
            if value < 0.0 {
                return Err(Error::PmfNegativeEntry {
                    row: i / size_b,
                    col: i % size_b,
                    value,
                });
            }
            sum += value;
        }
        let margin = (sum - 1.0).abs();
        if margin > tol::PMF_SUM {
            return Err(Error::PmfNotNormalized {
                sum,
                margin,
                tol: tol::PMF_SUM,
            });
        }
        Ok(Self { size_a, size_b, p })
    }

    pub fn size_a(&self) -> usize {
        self.size_a
    }

    pub fn size_b(&self) -> usize {
        self.size_b
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.p[a * self.size_b + b]
    }

    pub fn entries(&self) -> &[f64] {
        &self.p
    }

    pub fn marginal_a(&self) -> Vec<f64> {
        (0..self.size_a)
            .map(|a| (0..self.size_b).map(|b| self.get(a, b)).sum())
            .collect()
    }

    pub fn marginal_b(&self) -> Vec<f64> {
        (0..self.size_b)
            .map(|b| (0..self.size_a).map(|a| self.get(a, b)).sum())
            .collect()
    }
}

/// I(X_A : X_B) = Σ p(a,b)·log₂(p(a,b)/(p(a)p(b))), zero terms skipped.
pub fn classical_mutual_information(pmf: &JointPMF) -> f64 {
    let pa = pmf.marginal_a();
    let pb = pmf.marginal_b();
    let mut total = 0.0;
    for a in 0..pmf.size_a() {
        for b in 0..pmf.size_b() {
            let joint = pmf.get(a, b);
            if joint > 0.0 {
                total += joint * (joint / (pa[a] * pb[b])).log2();
            }
        }
    }
    total
}

/// Diagonal embedding Σ_ab p(a,b)·|a⟩⟨a| ⊗ |b⟩⟨b|. Quantum mutual
/// information of the result equals the classical mutual information.
pub fn embed_quantum(pmf: &JointPMF) -> BipartiteState {
    let dim = pmf.size_a() * pmf.size_b();
    let m = ComplexMatrix::from_fn(dim, |i, j| {
        if i == j {
            Complex64::new(pmf.p[i], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
    .expect("PMF entries are finite");
    BipartiteState::from_matrix(m, pmf.size_a(), pmf.size_b())
        .expect("a diagonal PMF embedding is a valid state")
}

/// Capacity analysis of a classical key via its quantum embedding.
#[derive(Clone, Debug, Serialize)]
pub struct ClassicalCapacityReport {
    /// I(X_A : X_B) computed directly from the PMF.
    pub classical_mutual_information: f64,
    /// Quantum mutual information of the diagonal embedding.
    pub embedded_mutual_information: f64,
    /// |classical - embedded|; the two routes must agree.
    pub agreement_margin: f64,
    pub agreement: bool,
    /// Full quantum pipeline on the embedded state.
    pub report: CapacityReport,
    /// How the scrambling ensemble reads classically (derived
    /// interpretation, not part of the numeric checks).
    pub ensemble_note: String,
}

impl ClassicalCapacityReport {
    pub fn all_passed(&self) -> bool {
        self.agreement && self.report.all_passed()
    }
}

/// Embeds the PMF and delegates to the quantum capacity pipeline. The blocks
/// of the embedded A marginal are exactly the groups of equal-probability
/// symbols of X_A.
pub fn classical_capacity_report(
    pmf: &JointPMF,
    grouping_tol: f64,
) -> Result<ClassicalCapacityReport> {
    let classical = classical_mutual_information(pmf);
    let embedded = embed_quantum(pmf);
    let report = capacity_report(&embedded, grouping_tol)?;
    let quantum = report.i_rho;
    let agreement_margin = (classical - quantum).abs();
    Ok(ClassicalCapacityReport {
        classical_mutual_information: classical,
        embedded_mutual_information: quantum,
        agreement_margin,
        agreement: agreement_margin <= tol::EMBEDDING_AGREEMENT,
        report,
        ensemble_note: "on the diagonal embedding the phase members act trivially; \
                        the ensemble reduces to permutations within groups of \
                        equal-probability X_A symbols"
            .to_string(),
    })
}
