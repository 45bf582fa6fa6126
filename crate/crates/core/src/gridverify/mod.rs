//! Numerical cross-check of dialled Hamiltonians.
//!
//! `ĥ = p̂²/2 + x̂²/2` is discretized on a uniform grid over `[−L, L]` with
//! Dirichlet walls, `P(ĥ_grid)` is formed by Horner's scheme on the dense
//! matrix, and its lowest eigenpairs are computed directly. Nothing here uses
//! `E_n = P(h_n)`; the analytic spectrum only enters as the thing compared against.

mod eigen;
mod matrix;
mod verify;

pub use eigen::RESIDUAL_BOUND;
pub use matrix::DenseMatrix;
pub use verify::{verify_dialled, LevelCheck, VerificationReport, RELATIVE_TOLERANCE};

use crate::error::GridError;
use crate::exactalg::PolynomialHamiltonian;
use crate::oscillator::count_sign_changes;

/// Central-difference approximation used for `p̂² = −d²/dx²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stencil {
    /// Three-point stencil, error `O(dx²)`.
    SecondOrder,
    /// Five-point stencil, error `O(dx⁴)`.
    #[default]
    FourthOrder,
}

impl Stencil {
    pub fn order(self) -> i32 {
        match self {
            Stencil::SecondOrder => 2,
            Stencil::FourthOrder => 4,
        }
    }

    /// Coefficients of `−d²/dx²` times `dx²`, from the center outwards.
    fn laplacian_weights(self) -> &'static [f64] {
        match self {
            Stencil::SecondOrder => &[2.0, -1.0],
            Stencil::FourthOrder => &[30.0 / 12.0, -16.0 / 12.0, 1.0 / 12.0],
        }
    }
}

/// Uniform grid of `points` samples spanning `[−half_width, half_width]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    half_width: f64,
    points: usize,
    stencil: Stencil,
}

impl GridSpec {
    pub const DEFAULT_HALF_WIDTH: f64 = 10.0;
    pub const DEFAULT_POINTS: usize = 1001;

    pub fn new(half_width: f64, points: usize) -> Result<Self, GridError> {
        Self::with_stencil(half_width, points, Stencil::default())
    }

    pub fn with_stencil(half_width: f64, points: usize, stencil: Stencil) -> Result<Self, GridError> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(GridError::InvalidSpec(format!(
                "half width must be positive, got {half_width}"
            )));
        }
        if points < 3 {
            return Err(GridError::InvalidSpec(format!("need at least 3 points, got {points}")));
        }
        Ok(GridSpec {
            half_width,
            points,
            stencil,
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn stencil(&self) -> Stencil {
        self.stencil
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points - 1) as f64
    }

    /// Grid coordinates, exactly symmetric about zero.
    pub fn positions(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| (2.0 * i as f64 - last) * self.half_width / last)
            .collect()
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            half_width: Self::DEFAULT_HALF_WIDTH,
            points: Self::DEFAULT_POINTS,
            stencil: Stencil::default(),
        }
    }
}

/// A discretized Hamiltonian: symmetric by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GridOperator {
    spec: GridSpec,
    matrix: DenseMatrix,
}

impl GridOperator {
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }
}

/// Lowest eigenpairs of a grid operator, eigenvalues ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct GridEigenSolution {
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[k]` belongs to `eigenvalues[k]`; unit norm.
    pub eigenvectors: Vec<Vec<f64>>,
}

/// `ĥ_grid = −½ D₂ + diag(x²/2)` with Dirichlet walls.
pub fn build_oscillator_grid(spec: &GridSpec) -> GridOperator {
    let n = spec.points;
    let inv_dx2 = 1.0 / (spec.spacing() * spec.spacing());
    let weights = spec.stencil.laplacian_weights();
    let mut m = DenseMatrix::zeros(n);
    for (i, x) in spec.positions().into_iter().enumerate() {
        m.set(i, i, 0.5 * weights[0] * inv_dx2 + 0.5 * x * x);
        for (offset, w) in weights.iter().enumerate().skip(1) {
            if i + offset < n {
                m.set_symmetric(i, i + offset, 0.5 * w * inv_dx2);
            }
        }
    }
    GridOperator { spec: *spec, matrix: m }
}

/// `Σ a_j A^j` by Horner's scheme on dense matrices, symmetrized afterwards.
pub fn matrix_polynomial(a: &GridOperator, h: &PolynomialHamiltonian) -> GridOperator {
    let n = a.matrix.size();
    let degree = h.degree() as usize;
    if degree == 0 {
        return GridOperator {
            spec: a.spec,
            matrix: DenseMatrix::zeros(n),
        };
    }
    let mut dense = vec![0.0; degree + 1];
    for (p, c) in h.float_terms() {
        if (p as usize) <= degree {
            dense[p as usize] = c;
        }
    }
    let mut acc = DenseMatrix::diagonal(&vec![dense[degree]; n]);
    for &c in dense[1..degree].iter().rev() {
        acc = acc.matmul(&a.matrix);
        acc.add_to_diagonal(c);
    }
    let mut result = acc.matmul(&a.matrix);
    result.symmetrize();
    GridOperator {
        spec: a.spec,
        matrix: result,
    }
}

/// Lowest `count` eigenpairs.
pub fn diagonalize(a: &GridOperator, count: usize) -> Result<GridEigenSolution, GridError> {
    let (eigenvalues, eigenvectors) = eigen::lowest_eigenpairs(&a.matrix, count)?;
    Ok(GridEigenSolution {
        eigenvalues,
        eigenvectors,
    })
}

/// Sign changes of a grid vector, ignoring entries in the noise floor.
pub fn count_nodes(v: &[f64]) -> usize {
    count_sign_changes(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::Rational;
    use crate::oscillator::{eigenfunction_value, LevelIndex};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn second_order() -> GridSpec {
        GridSpec::with_stencil(10.0, 1001, Stencil::SecondOrder).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(GridSpec::new(10.0, 2).is_err());
        assert!(GridSpec::new(0.0, 11).is_err());
        assert!(GridSpec::new(f64::NAN, 11).is_err());
        let s = GridSpec::new(1.0, 3).unwrap();
        assert_eq!(s.spacing(), 1.0);
        assert_eq!(s.positions(), vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn positions_symmetric() {
        let x = GridSpec::default().positions();
        assert_eq!(x[500], 0.0);
        assert_eq!(x[0], -10.0);
        for i in 0..x.len() {
            assert_eq!(x[i], -x[x.len() - 1 - i]);
        }
    }

    #[test]
    fn center_diagonal_is_kinetic_only() {
        let spec = second_order();
        let op = build_oscillator_grid(&spec);
        let dx = spec.spacing();
        assert_eq!(op.matrix().get(500, 500), 1.0 / (dx * dx));
        assert_eq!(op.matrix().get(500, 501), -0.5 / (dx * dx));
        assert_eq!(op.matrix().get(500, 502), 0.0);
        assert_eq!(op.matrix().max_asymmetry(), 0.0);
    }

    #[test]
    fn second_order_grid_levels() {
        let sol = diagonalize(&build_oscillator_grid(&second_order()), 5).unwrap();
        assert!((sol.eigenvalues[0] - 0.5).abs() < 1e-4);
        assert!((sol.eigenvalues[3] - 3.5).abs() < 1e-3);
        for (n, e) in sol.eigenvalues.iter().enumerate() {
            assert!((e - (n as f64 + 0.5)).abs() < 1e-3, "n={n} e={e}");
        }
        assert_eq!(count_nodes(&sol.eigenvectors[0]), 0);
    }

    #[test]
    fn fourth_order_grid_levels() {
        let sol = diagonalize(&build_oscillator_grid(&GridSpec::default()), 9).unwrap();
        for (n, e) in sol.eigenvalues.iter().enumerate() {
            assert!((e - (n as f64 + 0.5)).abs() < 1e-5, "n={n} e={e}");
        }
        for (k, v) in sol.eigenvectors.iter().enumerate() {
            assert_eq!(count_nodes(v), k);
            assert!((v.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn identity_polynomial_is_noop() {
        let a = build_oscillator_grid(&GridSpec::new(5.0, 41).unwrap());
        assert_eq!(matrix_polynomial(&a, &PolynomialHamiltonian::identity()), a);
    }

    #[test]
    fn zero_polynomial_gives_zero_matrix() {
        let a = build_oscillator_grid(&GridSpec::new(5.0, 41).unwrap());
        let p = matrix_polynomial(&a, &PolynomialHamiltonian::zero());
        assert_eq!(p.matrix(), &DenseMatrix::zeros(41));
    }

    #[test]
    fn square_trace_matches_eigenvalues() {
        let spec = GridSpec::new(6.0, 61).unwrap();
        let a = build_oscillator_grid(&spec);
        let sq = matrix_polynomial(&a, &PolynomialHamiltonian::new(vec![(2, q(1, 1))]).unwrap());
        let all = diagonalize(&a, 61).unwrap();
        let sum_sq: f64 = all.eigenvalues.iter().map(|l| l * l).sum();
        let tr = sq.matrix().trace();
        assert!(((tr - sum_sq) / sum_sq).abs() < 1e-8, "{tr} vs {sum_sq}");
    }

    #[test]
    fn sampled_phi3_has_three_nodes() {
        let v: Vec<f64> = GridSpec::default()
            .positions()
            .into_iter()
            .map(|x| eigenfunction_value(LevelIndex(3), x).unwrap())
            .collect();
        assert_eq!(count_nodes(&v), 3);
        assert_eq!(count_nodes(&[1.0; 10]), 0);
    }

    #[test]
    fn one_by_one_diagonalize() {
        let op = GridOperator {
            spec: GridSpec::new(1.0, 3).unwrap(),
            matrix: DenseMatrix::from_rows(&[vec![4.0]]),
        };
        let sol = diagonalize(&op, 1).unwrap();
        assert_eq!(sol.eigenvalues, vec![4.0]);
        assert_eq!(sol.eigenvectors, vec![vec![1.0]]);
    }
}
