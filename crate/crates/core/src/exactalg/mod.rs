//! Exact linear algebra for dialling spectra.
//!
//! The energy matrix has entries `(n + 1/2)^j`: row `n` is an oscillator
//! level, column `j ≥ 1` a power of `ĥ`. Solving `ε · a = E` yields the
//! coefficients of `P(ĥ) = Σ a_j ĥ^j` whose levels `n` sit at `E_n`.
//!
//! All arithmetic is over exact rationals. Because every `h_n` is a
//! half-integer the denominators are powers of two, and "dialled exactly"
//! means exactly: the solution is back-substituted and checked for zero
//! residual before it is returned.

mod bareiss;
mod rational;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

pub use rational::{format_rational, parse_rational, rational_from_int, rational_to_f64, Rational};

use crate::error::AlgebraError;
use crate::oscillator::{oscillator_energy, LevelIndex};
use crate::spectrum::evaluate_polynomial;

/// Square matrix `[ε]_{n,j} = (h_n)^j` over selected levels and powers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnergyMatrix {
    row_levels: Vec<LevelIndex>,
    column_powers: Vec<u32>,
    entries: Vec<Vec<Rational>>,
}

impl EnergyMatrix {
    /// The unstripped `N × N` matrix over levels `0..N` and powers `1..=N`.
    pub fn full(size: usize) -> Self {
        let levels: Vec<LevelIndex> = (0..size as u32).map(LevelIndex).collect();
        let powers: Vec<u32> = (1..=size as u32).collect();
        build_energy_matrix(&levels, &powers).expect("contiguous levels and powers are valid")
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn row_levels(&self) -> &[LevelIndex] {
        &self.row_levels
    }

    pub fn column_powers(&self) -> &[u32] {
        &self.column_powers
    }

    pub fn entries(&self) -> &[Vec<Rational>] {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> &Rational {
        &self.entries[row][col]
    }

    /// Column belonging to power `j`, if present.
    pub fn column_for_power(&self, power: u32) -> Option<Vec<Rational>> {
        let c = self.column_powers.iter().position(|&p| p == power)?;
        Some(self.entries.iter().map(|row| row[c].clone()).collect())
    }
}

/// Ordered `(level, energy)` assignments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumTarget {
    targets: Vec<(LevelIndex, Rational)>,
}

impl SpectrumTarget {
    pub fn new(targets: Vec<(LevelIndex, Rational)>) -> Result<Self, AlgebraError> {
        if targets.is_empty() {
            return Err(AlgebraError::EmptyTarget);
        }
        if targets.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(AlgebraError::NotIncreasing { what: "target levels" });
        }
        Ok(SpectrumTarget { targets })
    }

    /// Assigns `energies[n]` to level `n` for `n = 0..N`.
    pub fn contiguous(energies: Vec<Rational>) -> Result<Self, AlgebraError> {
        Self::new(
            energies
                .into_iter()
                .enumerate()
                .map(|(n, e)| (LevelIndex(n as u32), e))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn levels(&self) -> Vec<LevelIndex> {
        self.targets.iter().map(|(n, _)| *n).collect()
    }

    pub fn energies(&self) -> Vec<Rational> {
        self.targets.iter().map(|(_, e)| e.clone()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(LevelIndex, Rational)> {
        self.targets.iter()
    }

    /// True when the levels are exactly `0..N`.
    pub fn is_contiguous(&self) -> bool {
        self.targets.iter().enumerate().all(|(i, (n, _))| n.0 as usize == i)
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        SpectrumTarget {
            targets: self.targets.iter().map(|(n, e)| (*n, e * c)).collect(),
        }
    }
}

/// `P(ĥ) = Σ a_j ĥ^j` with `j ≥ 1`, stored as `(j, a_j)` with increasing `j`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PolynomialHamiltonian {
    terms: Vec<(u32, Rational)>,
}

impl PolynomialHamiltonian {
    pub fn new(terms: Vec<(u32, Rational)>) -> Result<Self, AlgebraError> {
        if terms.iter().any(|(p, _)| *p == 0) {
            return Err(AlgebraError::ConstantTerm);
        }
        if terms.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(AlgebraError::NotIncreasing {
                what: "polynomial powers",
            });
        }
        Ok(PolynomialHamiltonian { terms })
    }

    /// `coefficients[k]` becomes `a_{k+1}`.
    pub fn from_dense(coefficients: Vec<Rational>) -> Self {
        PolynomialHamiltonian {
            terms: coefficients
                .into_iter()
                .enumerate()
                .map(|(k, a)| (k as u32 + 1, a))
                .collect(),
        }
    }

    /// `P ≡ 0`.
    pub fn zero() -> Self {
        PolynomialHamiltonian::default()
    }

    /// `P(ξ) = ξ`, which reproduces the oscillator itself.
    pub fn identity() -> Self {
        PolynomialHamiltonian::from_dense(vec![Rational::one()])
    }

    pub fn terms(&self) -> &[(u32, Rational)] {
        &self.terms
    }

    /// Coefficient of `ξ^power`, zero if absent.
    pub fn coefficient(&self, power: u32) -> Rational {
        self.terms
            .iter()
            .find(|(p, _)| *p == power)
            .map(|(_, a)| a.clone())
            .unwrap_or_else(Rational::zero)
    }

    /// Highest power with a nonzero coefficient, 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .rev()
            .find(|(_, a)| !a.is_zero())
            .map_or(0, |(p, _)| *p)
    }

    pub fn leading_coefficient(&self) -> Rational {
        self.terms
            .iter()
            .rev()
            .find(|(_, a)| !a.is_zero())
            .map(|(_, a)| a.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|(_, a)| a.is_zero())
    }

    /// Coefficients as `f64`, for the numerical layers.
    pub fn float_terms(&self) -> Vec<(u32, f64)> {
        self.terms.iter().map(|(p, a)| (*p, rational_to_f64(a))).collect()
    }
}

impl fmt::Display for PolynomialHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (p, a) in self.terms.iter().filter(|(_, a)| !a.is_zero()) {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({a}) h^{p}")?;
        }
        Ok(())
    }
}

/// Builds the energy matrix over `levels` (rows) and `powers` (columns).
pub fn build_energy_matrix(levels: &[LevelIndex], powers: &[u32]) -> Result<EnergyMatrix, AlgebraError> {
    if levels.len() != powers.len() {
        return Err(AlgebraError::DimensionMismatch {
            levels: levels.len(),
            powers: powers.len(),
        });
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AlgebraError::NotIncreasing { what: "levels" });
    }
    if powers.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AlgebraError::NotIncreasing { what: "powers" });
    }
    if powers.first() == Some(&0) {
        return Err(AlgebraError::ConstantTerm);
    }
    let entries = levels
        .iter()
        .map(|&n| {
            let h = oscillator_energy(n);
            powers.iter().map(|&j| num_traits::pow(h.clone(), j as usize)).collect()
        })
        .collect();
    Ok(EnergyMatrix {
        row_levels: levels.to_vec(),
        column_powers: powers.to_vec(),
        entries,
    })
}

/// Exact determinant by fraction-free elimination.
pub fn determinant(m: &EnergyMatrix) -> Rational {
    bareiss::determinant_of(&m.entries)
}

/// `∏_{g=1}^{N−1} [g! (2g + 1)] / 2^N`, the determinant of the full energy matrix.
pub fn determinant_closed_form(size: usize) -> Rational {
    assert!(size >= 1, "energy matrix size must be at least 1");
    let mut product = BigInt::one();
    let mut factorial = BigInt::one();
    for g in 1..size as u64 {
        factorial *= g;
        product *= &factorial * (2 * g + 1);
    }
    Rational::new(product, num_traits::pow(BigInt::from(2), size))
}

/// Solves `m · x = rhs` exactly.
pub fn solve_linear_exact(m: &EnergyMatrix, rhs: &[Rational]) -> Result<Vec<Rational>, AlgebraError> {
    bareiss::solve(&m.entries, rhs)
}

/// Dials levels `0..N` to the requested energies.
///
/// Always solvable: the full energy matrix has nonzero determinant.
pub fn dial(target: &SpectrumTarget) -> Result<PolynomialHamiltonian, AlgebraError> {
    if !target.is_contiguous() {
        return Err(AlgebraError::LevelsNotContiguous { expected: target.len() });
    }
    let m = EnergyMatrix::full(target.len());
    let a = solve_linear_exact(&m, &target.energies())?;
    let poly = PolynomialHamiltonian::new(m.column_powers.iter().copied().zip(a).collect())?;
    check_dialled(&poly, target)?;
    Ok(poly)
}

/// Powers dropped by default: the highest ones, so that the polynomial is
/// of degree `|target|` regardless of which levels are assigned.
pub fn default_drop_powers(target: &SpectrumTarget) -> Vec<u32> {
    let full = target.levels().last().map_or(0, |n| n.0 + 1);
    ((target.len() as u32 + 1)..=full).collect()
}

/// Dials an arbitrary subset of levels.
///
/// The full problem has `N = |target| + |drop_powers|` powers `1..=N`; the
/// listed powers are removed and the remaining ones must number `|target|`.
/// Unassigned levels take whatever value the resulting polynomial gives them.
pub fn dial_partial(target: &SpectrumTarget, drop_powers: &[u32]) -> Result<PolynomialHamiltonian, AlgebraError> {
    let full = target.len() + drop_powers.len();
    let invalid = |reason: &str| AlgebraError::InvalidDropPowers {
        drop: drop_powers.to_vec(),
        reason: reason.to_string(),
    };
    if drop_powers.iter().any(|&p| p == 0 || p as usize > full) {
        return Err(invalid(&format!("powers must lie in 1..={full}")));
    }
    let mut sorted = drop_powers.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != drop_powers.len() {
        return Err(invalid("duplicate power"));
    }
    let powers: Vec<u32> = (1..=full as u32).filter(|p| !sorted.contains(p)).collect();
    let levels = target.levels();
    let m = build_energy_matrix(&levels, &powers)?;
    let a = solve_linear_exact(&m, &target.energies()).map_err(|e| match e {
        AlgebraError::Singular { column } => AlgebraError::SingularStripped {
            levels: levels.iter().map(|n| n.0).collect(),
            dropped: sorted.clone(),
            column,
        },
        other => other,
    })?;
    let poly = PolynomialHamiltonian::new(powers.into_iter().zip(a).collect())?;
    check_dialled(&poly, target)?;
    Ok(poly)
}

fn check_dialled(poly: &PolynomialHamiltonian, target: &SpectrumTarget) -> Result<(), AlgebraError> {
    for (row, (n, e)) in target.iter().enumerate() {
        if &evaluate_polynomial(poly, &oscillator_energy(*n)) != e {
            return Err(AlgebraError::Consistency { row });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn levels(v: &[u32]) -> Vec<LevelIndex> {
        v.iter().map(|&n| LevelIndex(n)).collect()
    }

    fn target(pairs: &[(u32, Rational)]) -> SpectrumTarget {
        SpectrumTarget::new(pairs.iter().map(|(n, e)| (LevelIndex(*n), e.clone())).collect()).unwrap()
    }

    /// Cofactor expansion, independent of the elimination path.
    fn cofactor_det(m: &[Vec<Rational>]) -> Rational {
        if m.len() == 1 {
            return m[0][0].clone();
        }
        let mut det = Rational::zero();
        for (c, a) in m[0].iter().enumerate() {
            let minor: Vec<Vec<Rational>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(j, _)| *j != c)
                        .map(|(_, v)| v.clone())
                        .collect()
                })
                .collect();
            let term = a * cofactor_det(&minor);
            if c % 2 == 0 {
                det += term;
            } else {
                det -= term;
            }
        }
        det
    }

    #[test]
    fn five_by_five_matrix_rows() {
        let m = EnergyMatrix::full(5);
        assert_eq!(m.entries()[0], vec![q(1, 2), q(1, 4), q(1, 8), q(1, 16), q(1, 32)]);
        assert_eq!(
            m.entries()[4],
            vec![q(9, 2), q(81, 4), q(729, 8), q(6561, 16), q(59049, 32)]
        );
        assert_eq!(m.entries()[2][2], q(125, 8));
    }

    #[test]
    fn small_matrices() {
        let m = build_energy_matrix(&levels(&[0]), &[1]).unwrap();
        assert_eq!(m.entries(), &[vec![q(1, 2)]]);
        let m = build_energy_matrix(&levels(&[0, 1]), &[1, 2]).unwrap();
        assert_eq!(m.entries(), &[vec![q(1, 2), q(1, 4)], vec![q(3, 2), q(9, 4)]]);
    }

    #[test]
    fn build_rejects_bad_shapes() {
        assert_eq!(
            build_energy_matrix(&levels(&[0, 1]), &[1]),
            Err(AlgebraError::DimensionMismatch { levels: 2, powers: 1 })
        );
        assert!(build_energy_matrix(&levels(&[1, 0]), &[1, 2]).is_err());
        assert!(build_energy_matrix(&levels(&[0, 1]), &[2, 2]).is_err());
        assert!(build_energy_matrix(&levels(&[0]), &[0]).is_err());
    }

    #[test]
    fn determinants() {
        assert_eq!(determinant(&EnergyMatrix::full(1)), q(1, 2));
        assert_eq!(determinant(&EnergyMatrix::full(2)), q(3, 4));
        assert_eq!(determinant(&EnergyMatrix::full(5)), q(8505, 1));
        assert_eq!(cofactor_det(EnergyMatrix::full(5).entries()), q(8505, 1));
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(determinant_closed_form(1), q(1, 2));
        assert_eq!(determinant_closed_form(2), q(3, 4));
        assert_eq!(determinant_closed_form(5), q(8505, 1));
    }

    #[test]
    fn determinant_matches_closed_form() {
        for n in 1..=8 {
            assert_eq!(determinant(&EnergyMatrix::full(n)), determinant_closed_form(n), "N={n}");
        }
        for n in 1..=6 {
            assert_eq!(
                cofactor_det(EnergyMatrix::full(n).entries()),
                determinant_closed_form(n)
            );
        }
    }

    #[test]
    fn solve_examples() {
        let m = build_energy_matrix(&levels(&[0]), &[1]).unwrap();
        assert_eq!(solve_linear_exact(&m, &[q(1, 2)]).unwrap(), vec![q(1, 1)]);

        let m = EnergyMatrix::full(2);
        assert_eq!(
            solve_linear_exact(&m, &[q(-3, 1), q(-15, 2)]).unwrap(),
            vec![q(-13, 2), q(1, 1)]
        );

        let m = EnergyMatrix::full(5);
        let col = m.column_for_power(1).unwrap();
        assert_eq!(
            solve_linear_exact(&m, &col).unwrap(),
            vec![q(1, 1), q(0, 1), q(0, 1), q(0, 1), q(0, 1)]
        );
    }

    #[test]
    fn dial_examples() {
        let t = SpectrumTarget::contiguous(vec![q(-3, 1), q(-15, 2)]).unwrap();
        assert_eq!(
            dial(&t).unwrap(),
            PolynomialHamiltonian::from_dense(vec![q(-13, 2), q(1, 1)])
        );

        let t = SpectrumTarget::contiguous(vec![q(1, 2), q(3, 2), q(5, 2)]).unwrap();
        assert_eq!(
            dial(&t).unwrap(),
            PolynomialHamiltonian::from_dense(vec![q(1, 1), q(0, 1), q(0, 1)])
        );

        let t = SpectrumTarget::contiguous(vec![q(0, 1); 3]).unwrap();
        let p = dial(&t).unwrap();
        assert!(p.is_zero());
        assert_eq!(p.terms().len(), 3);
    }

    #[test]
    fn dial_requires_contiguous_levels() {
        let t = target(&[(0, q(1, 1)), (2, q(2, 1))]);
        assert_eq!(dial(&t), Err(AlgebraError::LevelsNotContiguous { expected: 2 }));
    }

    #[test]
    fn dial_partial_examples() {
        let t = target(&[(0, q(-3, 1)), (2, q(-10, 1))]);
        assert_eq!(default_drop_powers(&t), vec![3]);
        let p = dial_partial(&t, &[3]).unwrap();
        assert_eq!(p, PolynomialHamiltonian::from_dense(vec![q(-13, 2), q(1, 1)]));

        let t = target(&[(0, q(1, 2))]);
        assert_eq!(dial_partial(&t, &[]).unwrap(), PolynomialHamiltonian::identity());

        let t = target(&[(1, q(3, 2)), (3, q(7, 2))]);
        let p = dial_partial(&t, &default_drop_powers(&t)).unwrap();
        assert_eq!(p, PolynomialHamiltonian::from_dense(vec![q(1, 1), q(0, 1)]));
    }

    #[test]
    fn dial_partial_non_default_columns() {
        // keep powers {2, 3}: a_2 h² + a_3 h³ through levels 0 and 1
        let t = target(&[(0, q(1, 1)), (1, q(2, 1))]);
        let p = dial_partial(&t, &[1]).unwrap();
        assert_eq!(p.terms().iter().map(|(j, _)| *j).collect::<Vec<_>>(), vec![2, 3]);
        assert_eq!(evaluate_polynomial(&p, &q(1, 2)), q(1, 1));
        assert_eq!(evaluate_polynomial(&p, &q(3, 2)), q(2, 1));
    }

    #[test]
    fn dial_partial_rejects_bad_drops() {
        let t = target(&[(0, q(1, 1))]);
        assert!(matches!(
            dial_partial(&t, &[0]),
            Err(AlgebraError::InvalidDropPowers { .. })
        ));
        assert!(matches!(
            dial_partial(&t, &[5]),
            Err(AlgebraError::InvalidDropPowers { .. })
        ));
        assert!(matches!(
            dial_partial(&t, &[2, 2]),
            Err(AlgebraError::InvalidDropPowers { .. })
        ));
    }

    #[test]
    fn stripped_matrix_invertible_for_positive_levels() {
        // Rows are distinct positive nodes, so any column subset stays a
        // generalized Vandermonde with nonzero determinant.
        let t = target(&[(1, q(1, 1)), (4, q(-1, 1)), (6, q(3, 1))]);
        for drop in [[1u32, 2], [1, 5], [2, 4], [4, 5]] {
            assert!(dial_partial(&t, &drop).is_ok(), "{drop:?}");
        }
    }

    #[test]
    fn target_validation() {
        assert_eq!(SpectrumTarget::new(vec![]), Err(AlgebraError::EmptyTarget));
        assert!(SpectrumTarget::new(vec![(LevelIndex(1), q(1, 1)), (LevelIndex(1), q(2, 1))]).is_err());
    }

    #[test]
    fn polynomial_validation() {
        assert_eq!(
            PolynomialHamiltonian::new(vec![(0, q(1, 1))]),
            Err(AlgebraError::ConstantTerm)
        );
        assert!(PolynomialHamiltonian::new(vec![(2, q(1, 1)), (1, q(1, 1))]).is_err());
        let p = PolynomialHamiltonian::from_dense(vec![q(1, 1), q(-2, 1), q(0, 1)]);
        assert_eq!(p.degree(), 2);
        assert_eq!(p.leading_coefficient(), q(-2, 1));
        assert_eq!(PolynomialHamiltonian::zero().degree(), 0);
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-1_000_000i64..=1_000_000, 1i64..=1000).prop_map(|(n, d)| q(n, d))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn dial_is_unique_and_linear(
            energies in prop::collection::vec(small_rational(), 1..8),
            c in small_rational(),
        ) {
            let t = SpectrumTarget::contiguous(energies).unwrap();
            let a = dial(&t).unwrap();
            prop_assert_eq!(&a, &dial(&t).unwrap());

            let scaled = dial(&t.scaled(&c)).unwrap();
            let expected: Vec<_> = a.terms().iter().map(|(j, v)| (*j, v * &c)).collect();
            prop_assert_eq!(scaled.terms(), expected.as_slice());
        }

        #[test]
        fn unstripped_partial_equals_full(energies in prop::collection::vec(small_rational(), 1..8)) {
            let t = SpectrumTarget::contiguous(energies).unwrap();
            prop_assert_eq!(dial_partial(&t, &[]).unwrap(), dial(&t).unwrap());
        }
    }
}
