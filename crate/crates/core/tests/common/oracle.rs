//! Independent QFI reference built on nalgebra.

use nalgebra::{Complex, DMatrix, SymmetricEigen};
use privsense::linalg::{ComplexMatrix, DensityMatrix};
use privsense::qfi::{reducible_qfi, GeneratorSet};

type C = Complex<f64>;

fn to_na(m: &ComplexMatrix) -> DMatrix<C> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

fn hermitian_part(m: DMatrix<C>) -> DMatrix<C> {
    (&m + m.adjoint()) * C::new(0.5, 0.0)
}

fn psd_sqrt(m: &DMatrix<C>) -> DMatrix<C> {
    let e = SymmetricEigen::new(hermitian_part(m.clone()));
    let d = DMatrix::from_diagonal(&e.eigenvalues.map(|l| C::new(l.max(0.0).sqrt(), 0.0)));
    &e.eigenvectors * d * e.eigenvectors.adjoint()
}

/// `√F(ρ, σ) = Tr √(√ρ σ √ρ)`.
fn root_fidelity(rho: &DMatrix<C>, sigma: &DMatrix<C>) -> f64 {
    let s = psd_sqrt(rho);
    let inner = &s * sigma * &s;
    psd_sqrt(&inner).trace().re
}

/// `8 (1 − √F(ρ, e^{−iδA} ρ e^{iδA})) / δ²`.
pub fn susceptibility_qfi(rho: &DensityMatrix, a: &ComplexMatrix, delta: f64) -> f64 {
    let r = to_na(rho.matrix());
    let e = SymmetricEigen::new(hermitian_part(to_na(a)));
    let phases = e.eigenvalues.map(|l| C::from_polar(1.0, -delta * l));
    let u = &e.eigenvectors * DMatrix::from_diagonal(&phases) * e.eigenvectors.adjoint();
    let shifted = &u * &r * u.adjoint();
    8.0 * (1.0 - root_fidelity(&r, &shifted)) / (delta * delta)
}

/// Grid step of [`grid_minimum`].
pub const GRID_STEP: f64 = 0.05;

/// Brute-force minimum of the reducible QFI of node `j` (three nodes) over
/// an 81 × 81 grid on `[−2, 2]²`.
pub fn grid_minimum(rho: &DensityMatrix, j: usize, gens: &GeneratorSet) -> (f64, [f64; 2]) {
    let steps: Vec<f64> = (0..=80).map(|i| -2.0 + GRID_STEP * i as f64).collect();
    let mut best = (f64::INFINITY, [0.0, 0.0]);
    for &a in &steps {
        for &b in &steps {
            let v = reducible_qfi(rho, j, &[a, b], gens).unwrap();
            if v < best.0 {
                best = (v, [a, b]);
            }
        }
    }
    best
}

/// Largest objective over the corners of the half-step box around `c`.
/// The nearest grid point lies in that box, and the objective is convex, so
/// a correct grid search can do no worse than this.
pub fn grid_resolution_limit(rho: &DensityMatrix, j: usize, c: &[f64], gens: &GeneratorSet) -> f64 {
    let h = GRID_STEP / 2.0;
    [(-h, -h), (-h, h), (h, -h), (h, h)]
        .iter()
        .map(|(da, db)| reducible_qfi(rho, j, &[c[0] + da, c[1] + db], gens).unwrap())
        .fold(f64::NEG_INFINITY, f64::max)
}
