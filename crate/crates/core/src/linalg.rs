//! Small dense helpers shared by the channel and entropy code.

use nalgebra::{Complex, DMatrix};
use rand::Rng;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Eigenvalues in `[-CLAMP, 0)` are treated as roundoff and set to zero.
pub const EIGEN_CLAMP: f64 = 1e-12;

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Ascending eigenvalues of a real symmetric matrix.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `-Σ λ log₂ λ` over a spectrum, accumulated in nats.
pub fn spectral_entropy_bits<I: IntoIterator<Item = f64>>(spectrum: I) -> f64 {
    let nats: f64 = spectrum
        .into_iter()
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.ln())
        .sum();
    nats / std::f64::consts::LN_2
}

/// Von Neumann entropy in bits of a Hermitian matrix.
pub fn von_neumann_entropy(m: &CMatrix) -> f64 {
    spectral_entropy_bits(hermitian_eigenvalues(m))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square()
        && (0..m.nrows())
            .all(|i| (i..m.ncols()).all(|j| (m[(i, j)] - m[(j, i)].conj()).norm() <= tol))
}

/// Random density matrix `G G† / Tr(G G†)` from a complex Ginibre matrix.
pub fn random_density_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        C64::new(standard_normal(rng), standard_normal(rng))
    });
    let mut rho = &g * g.adjoint();
    let tr = rho.trace().re;
    rho /= C64::new(tr, 0.0);
    // exact Hermitian symmetry
    (&rho + rho.adjoint()) * C64::new(0.5, 0.0)
}

/// Uniform sample from the probability simplex of the given dimension.
pub fn random_simplex_point<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..dim)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

/// Box-Muller standard normal sample.
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
