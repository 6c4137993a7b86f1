//! Entropic functionals, all in bits (log base 2).
//!
//! Von Neumann entropy, the Holevo quantity of a state ensemble, quantum
//! mutual information and coherent information of a bipartite state.

use crate::error::{Error, Result};
use crate::matcore::{hermitian_eig, Subsystem};
use crate::states::{BipartiteState, DensityOperator};
use crate::tol;

/// S(ρ) = -Σ λ_i log₂ λ_i, with 0·log 0 = 0.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    let eig = hermitian_eig(rho.matrix())
        .expect("a validated density operator stays Hermitian");
    eig.eigenvalues
        .iter()
        .filter(|&&l| l > tol::ENTROPY_EIGENVALUE_FLOOR)
        .map(|&l| -l * l.log2())
        .sum()
}

/// Finite ensemble {p_α, ρ_α} of equal-dimension states.
#[derive(Clone, Debug)]
pub struct StateEnsemble {
    members: Vec<(f64, DensityOperator)>,
}

impl StateEnsemble {
    pub fn new(members: Vec<(f64, DensityOperator)>) -> Result<Self> {
        let dim = members.first().ok_or(Error::EmptyEnsemble)?.1.dim();
        let mut sum = 0.0;
        for (p, state) in &members {
            if *p < 0.0 {
                return Err(Error::NegativeProbability { value: *p });
            }
            if state.dim() != dim {
                return Err(Error::EnsembleDimensionMismatch {
                    expected: dim,
                    found: state.dim(),
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
        Ok(Self { members })
    }

    /// Equal-probability ensemble.
    pub fn uniform(states: Vec<DensityOperator>) -> Result<Self> {
        let n = states.len();
        Self::new(states.into_iter().map(|s| (1.0 / n as f64, s)).collect())
    }

    pub fn members(&self) -> &[(f64, DensityOperator)] {
        &self.members
    }

    pub fn dim(&self) -> usize {
        self.members[0].1.dim()
    }
}

/// Probability-weighted convex combination Σ p_α ρ_α.
pub fn average_state(ensemble: &StateEnsemble) -> DensityOperator {
    let dim = ensemble.dim();
    let mut acc = crate::matcore::ComplexMatrix::zeros(dim);
    for (p, state) in ensemble.members() {
        acc = &acc + &state.matrix().scale(*p);
    }
    DensityOperator::new(acc).expect("a convex combination of states is a state")
}

/// χ = S(Σ p_α ρ_α) - Σ p_α S(ρ_α). Non-negative; zero iff all supported
/// members coincide.
pub fn holevo_chi(ensemble: &StateEnsemble) -> f64 {
    let avg = average_state(ensemble);
    let mean_entropy: f64 = ensemble
        .members()
        .iter()
        .map(|(p, state)| p * von_neumann_entropy(state))
        .sum();
    von_neumann_entropy(&avg) - mean_entropy
}

/// I(A:B) = S(ρ^A) + S(ρ^B) - S(ρ^AB).
pub fn mutual_information(s: &BipartiteState) -> f64 {
    let sa = von_neumann_entropy(&s.marginal(Subsystem::A));
    let sb = von_neumann_entropy(&s.marginal(Subsystem::B));
    let sab = von_neumann_entropy(s.density());
    sa + sb - sab
}

/// S(ρ^A) - S(ρ^AB); cannot increase under operations on A alone.
pub fn coherent_information(s: &BipartiteState) -> f64 {
    von_neumann_entropy(&s.marginal(Subsystem::A)) - von_neumann_entropy(s.density())
}
