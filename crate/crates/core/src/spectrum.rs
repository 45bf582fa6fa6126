//! Forward evaluation of a polynomial Hamiltonian: its levels `E_n = P(n + 1/2)`,
//! the classical cross-section `P(x²/2)`, and how the energies order the
//! eigenstates relative to their node counts.

use num_traits::Zero;

use crate::exactalg::{PolynomialHamiltonian, Rational};
use crate::oscillator::{analytic_node_count, oscillator_energy, LevelIndex};

/// Level `n` of `P(ĥ)`: exact energy and the node count of `φ_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelRecord {
    pub n: LevelIndex,
    pub energy: Rational,
    pub node_count: usize,
}

/// Energy ordering of a set of levels.
///
/// A violation is any adjacent pair `(n, n+1)` with `E_n ≥ E_{n+1}`. The
/// inequality is deliberately weak: a degenerate pair counts as a violation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderingReport {
    /// Levels sorted by energy, ties broken by level index.
    pub ascending_permutation: Vec<LevelIndex>,
    pub violations: Vec<(LevelIndex, LevelIndex)>,
    pub is_sturm_liouville_ordered: bool,
}

impl OrderingReport {
    /// Level holding the lowest energy.
    pub fn ground_level(&self) -> Option<LevelIndex> {
        self.ascending_permutation.first().copied()
    }
}

/// Exact `P(ξ)` by sparse Horner over the stored powers.
pub fn evaluate_polynomial(h: &PolynomialHamiltonian, xi: &Rational) -> Rational {
    let mut acc = Rational::zero();
    let mut last_power = 0u32;
    for (power, a) in h.terms().iter().rev() {
        if !acc.is_zero() {
            acc *= num_traits::pow(xi.clone(), (last_power - power) as usize);
        }
        acc += a;
        last_power = *power;
    }
    acc * num_traits::pow(xi.clone(), last_power as usize)
}

/// Floating-point `P(ξ)` with the same sparse Horner scheme.
pub fn evaluate_polynomial_f64(terms: &[(u32, f64)], xi: f64) -> f64 {
    let mut acc = 0.0;
    let mut last_power: Option<u32> = None;
    for &(power, a) in terms.iter().rev() {
        if let Some(last) = last_power {
            acc *= xi.powi((last - power) as i32);
        }
        acc += a;
        last_power = Some(power);
    }
    acc * xi.powi(last_power.unwrap_or(0) as i32)
}

/// Records for levels `0..count`.
pub fn evaluate_spectrum(h: &PolynomialHamiltonian, count: usize) -> Vec<LevelRecord> {
    (0..count as u32)
        .map(LevelIndex)
        .map(|n| LevelRecord {
            n,
            energy: evaluate_polynomial(h, &oscillator_energy(n)),
            node_count: analytic_node_count(n),
        })
        .collect()
}

pub fn ordering_report(records: &[LevelRecord]) -> OrderingReport {
    let mut sorted: Vec<&LevelRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.energy.cmp(&b.energy).then(a.n.cmp(&b.n)));
    let violations: Vec<_> = records
        .windows(2)
        .filter(|w| w[0].energy >= w[1].energy)
        .map(|w| (w[0].n, w[1].n))
        .collect();
    OrderingReport {
        ascending_permutation: sorted.iter().map(|r| r.n).collect(),
        is_sturm_liouville_ordered: violations.is_empty(),
        violations,
    }
}

/// `H(x, 0) = P(x²/2)`.
pub fn classical_cross_section(h: &PolynomialHamiltonian, x: f64) -> f64 {
    evaluate_polynomial_f64(&h.float_terms(), 0.5 * x * x)
}
