#![allow(dead_code)]

use dfs_secrecy::channel::{self, random_density_matrix, DensityMatrix, QuantumChannel};
use dfs_secrecy::linalg::ComplexMatrix;
use dfs_secrecy::secrecy::Ensemble;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Built-in channels small enough to dilate many times in a test.
pub fn builtin_channels() -> Vec<QuantumChannel> {
    let mut out: Vec<QuantumChannel> = (1..=4)
        .map(|n| channel::builtin_collective_dephasing(n).unwrap())
        .collect();
    for gamma in [0.0, 0.3, 1.0] {
        out.push(channel::builtin_amplitude_damping(gamma).unwrap());
    }
    out.push(QuantumChannel::identity(2));
    out.push(QuantumChannel::identity(3));
    out
}

pub fn random_ensemble<R: Rng>(dim: usize, size: usize, rng: &mut R) -> Ensemble {
    let states: Vec<DensityMatrix> = (0..size)
        .map(|k| {
            if k % 2 == 0 {
                DensityMatrix::pure(&channel::random_pure_vector(dim, rng)).unwrap()
            } else {
                random_density_matrix(dim, rng)
            }
        })
        .collect();
    let raw: Vec<f64> = (0..size).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    Ensemble::new(raw.iter().map(|x| x / total).collect(), states).unwrap()
}

/// Eve's state straight from the Kraus operators: entry (i, i') = Tr[A_i ρ A_i'†].
pub fn eve_state_oracle(ch: &QuantumChannel, rho: &ComplexMatrix) -> ComplexMatrix {
    let k = ch.kraus();
    let mut out = ComplexMatrix::zeros(k.len(), k.len());
    for (i, ai) in k.iter().enumerate() {
        for (ip, aip) in k.iter().enumerate() {
            out[(i, ip)] = (&(ai * rho) * &aip.adjoint()).trace();
        }
    }
    out
}

/// Eigenvalues of a 2x2 Hermitian matrix from the quadratic formula, descending.
pub fn eig2_closed_form(m: &ComplexMatrix) -> [f64; 2] {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)].norm();
    let mean = (a + d) / 2.0;
    let r = (((a - d) / 2.0).powi(2) + b * b).sqrt();
    [mean + r, mean - r]
}

/// Eigenvalues of a 3x3 Hermitian matrix from the trigonometric solution of the
/// characteristic cubic, descending.
pub fn eig3_closed_form(m: &ComplexMatrix) -> [f64; 3] {
    let a = |i: usize, j: usize| m[(i, j)];
    let tr = a(0, 0).re + a(1, 1).re + a(2, 2).re;
    let minors = a(0, 0).re * a(1, 1).re - a(0, 1).norm_sqr() + a(0, 0).re * a(2, 2).re
        - a(0, 2).norm_sqr()
        + a(1, 1).re * a(2, 2).re
        - a(1, 2).norm_sqr();
    let det = (a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
        - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
        + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0)))
    .re;
    // λ³ − tr λ² + minors λ − det = 0, shifted by tr/3.
    let q = tr / 3.0;
    let p = (tr * tr / 3.0 - minors) / 3.0;
    let r = (-2.0 * tr.powi(3) / 27.0 + tr * minors / 3.0 - det) / -2.0;
    if p <= 1e-300 {
        return [q, q, q];
    }
    let phi = (r / p.powf(1.5)).clamp(-1.0, 1.0).acos() / 3.0;
    let s = 2.0 * p.sqrt();
    let mut out = [
        q + s * phi.cos(),
        q + s * (phi + 2.0 * std::f64::consts::PI / 3.0).cos(),
        q + s * (phi + 4.0 * std::f64::consts::PI / 3.0).cos(),
    ];
    out.sort_by(|x, y| y.total_cmp(x));
    out
}

pub fn random_hermitian<R: Rng>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        m[(i, i)] = Complex64::new(rng.random_range(-2.0..2.0), 0.0);
        for j in (i + 1)..dim {
            let z = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}
