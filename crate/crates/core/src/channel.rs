//! Density matrices, Kraus channels and their unitary dilations.
//!
//! A channel `ρ ↦ Σ_i A_i ρ A_i†` is dilated onto system ⊗ environment with the
//! environment starting in `|0_E⟩` and one environment level per Kraus operator:
//! `U(|j⟩ ⊗ |0_E⟩) = Σ_i A_i|j⟩ ⊗ |i_E⟩`. Bob holds the system factor after the
//! interaction, Eve holds the whole environment.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, partial_trace, ComplexMatrix, Keep, ONE, ZERO};

pub const STATE_TOL: f64 = 1e-9;
pub const COMPLETENESS_TOL: f64 = 1e-9;
pub const MAX_COLLECTIVE_QUBITS: usize = 10;

/// Unit-trace positive-semidefinite Hermitian matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(into = "ComplexMatrix")]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity (all within 1e-9).
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Shape(format!(
                "density matrix must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !matrix.is_hermitian(STATE_TOL) {
            return Err(Error::invariant(
                "density-matrix-hermitian",
                format!("‖ρ − ρ†‖_F = {:e}", matrix.hermiticity_defect()),
            ));
        }
        let matrix = matrix.hermitian_part();
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::invariant(
                "density-matrix-trace",
                format!("Tr ρ = {tr}"),
            ));
        }
        let eig = linalg::hermitian_eig(&matrix)?;
        let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -STATE_TOL {
            return Err(Error::invariant(
                "density-matrix-positive",
                format!("smallest eigenvalue {min:e}"),
            ));
        }
        Ok(DensityMatrix { matrix })
    }

    /// |ψ⟩⟨ψ| for a normalised copy of `psi`.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm = linalg::vector_norm(psi);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("state vector has zero norm".into()));
        }
        let v: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::projector(&v))
    }

    /// |k⟩⟨k| in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::Shape(format!(
                "basis index {k} out of range for dimension {dim}"
            )));
        }
        let mut m = ComplexMatrix::zeros(dim, dim);
        m[(k, k)] = ONE;
        Ok(DensityMatrix { matrix: m })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Frobenius distance to another state of the same dimension.
    pub fn distance(&self, other: &DensityMatrix) -> f64 {
        self.matrix.distance(&other.matrix)
    }

    /// Convex combination Σ p_k ρ_k; validated on the way out.
    pub fn mixture(probs: &[f64], states: &[DensityMatrix]) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| Error::Shape("mixture of zero states".into()))?;
        let mut acc = ComplexMatrix::zeros(first.dim(), first.dim());
        for (p, s) in probs.iter().zip(states) {
            if s.dim() != first.dim() {
                return Err(Error::Shape(
                    "mixture of states with different dimensions".into(),
                ));
            }
            acc = &acc + &s.matrix.scale_real(*p);
        }
        Self::new(acc)
    }
}

impl From<DensityMatrix> for ComplexMatrix {
    fn from(d: DensityMatrix) -> Self {
        d.matrix
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(de)?;
        DensityMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

/// Haar-like random mixed state from a Ginibre matrix, ρ = GG†/Tr(GG†).
pub fn random_density_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let data = (0..dim * dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let g = ComplexMatrix::new(dim, dim, data).expect("finite gaussian entries");
    let gg = &g * &g.adjoint();
    let tr = gg.trace().re;
    DensityMatrix {
        matrix: gg.scale_real(1.0 / tr).hermitian_part(),
    }
}

/// Random normalised pure state vector.
pub fn random_pure_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let n = linalg::vector_norm(&v);
    v.into_iter().map(|z| z / n).collect()
}

/// Finite Kraus set satisfying Σ A_i†A_i = I.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantumChannel {
    label: String,
    dim_in: usize,
    kraus: Vec<ComplexMatrix>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelJson {
    label: String,
    dim_in: usize,
    kraus: Vec<ComplexMatrix>,
}

impl<'de> Deserialize<'de> for QuantumChannel {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = ChannelJson::deserialize(de)?;
        let ch = QuantumChannel::new(raw.label, raw.kraus).map_err(serde::de::Error::custom)?;
        if ch.dim_in != raw.dim_in {
            return Err(serde::de::Error::custom(format!(
                "dim_in {} does not match Kraus operator dimension {}",
                raw.dim_in, ch.dim_in
            )));
        }
        Ok(ch)
    }
}

impl QuantumChannel {
    pub fn new(label: impl Into<String>, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::Shape("channel needs at least one Kraus operator".into()))?;
        let dim = first.rows();
        for (i, k) in kraus.iter().enumerate() {
            if k.rows() != dim || k.cols() != dim {
                return Err(Error::Shape(format!(
                    "Kraus operator {i} is {}x{}, expected {dim}x{dim}",
                    k.rows(),
                    k.cols()
                )));
            }
        }
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for k in &kraus {
            sum = &sum + &(&k.adjoint() * k);
        }
        let defect = sum.distance(&ComplexMatrix::identity(dim));
        if defect > COMPLETENESS_TOL {
            return Err(Error::invariant(
                "kraus-completeness",
                format!("‖Σ A_i†A_i − I‖_F = {defect:e}"),
            ));
        }
        Ok(QuantumChannel {
            label: label.into(),
            dim_in: dim,
            kraus,
        })
    }

    pub fn identity(dim: usize) -> Self {
        QuantumChannel {
            label: format!("identity-{dim}"),
            dim_in: dim,
            kraus: vec![ComplexMatrix::identity(dim)],
        }
    }

    /// Single-Kraus channel `ρ ↦ VρV†`.
    pub fn unitary(label: impl Into<String>, v: ComplexMatrix) -> Result<Self> {
        Self::new(label, vec![v])
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn completeness_defect(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            sum = &sum + &(&k.adjoint() * k);
        }
        sum.distance(&ComplexMatrix::identity(self.dim_in))
    }

    /// Σ_i A_i m A_i† for any square operator `m`, unvalidated.
    pub fn apply_operator(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        if m.rows() != self.dim_in || m.cols() != self.dim_in {
            return Err(Error::Shape(format!(
                "channel acts on dimension {}, got a {}x{} operator",
                self.dim_in,
                m.rows(),
                m.cols()
            )));
        }
        let mut out = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            out = &out + &k.conjugate(m)?;
        }
        Ok(out)
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(self.apply_operator(rho.matrix())?)
    }
}

/// Collective dephasing on `n_qubits` qubits: Kraus operators are the projectors
/// onto fixed Hamming weight, w = 0..=n.
pub fn builtin_collective_dephasing(n_qubits: usize) -> Result<QuantumChannel> {
    if n_qubits == 0 || n_qubits > MAX_COLLECTIVE_QUBITS {
        return Err(Error::Capacity(format!(
            "collective dephasing supports 1..={MAX_COLLECTIVE_QUBITS} qubits, got {n_qubits}"
        )));
    }
    let dim = 1usize << n_qubits;
    let mut kraus = vec![ComplexMatrix::zeros(dim, dim); n_qubits + 1];
    for x in 0..dim {
        kraus[x.count_ones() as usize][(x, x)] = ONE;
    }
    Ok(QuantumChannel {
        label: format!("collective-dephasing-{n_qubits}"),
        dim_in: dim,
        kraus,
    })
}

/// Single-qubit amplitude damping with decay probability `gamma`.
pub fn builtin_amplitude_damping(gamma: f64) -> Result<QuantumChannel> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::Domain(format!(
            "damping probability {gamma} outside [0, 1]"
        )));
    }
    let k0 = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, (1.0 - gamma).sqrt()]])?;
    let k1 = ComplexMatrix::from_real_rows(&[&[0.0, gamma.sqrt()], &[0.0, 0.0]])?;
    QuantumChannel::new(format!("amplitude-damping-{gamma}"), vec![k0, k1])
}

/// Total σ_z = Σ_q σ_z^{(q)} on `n_qubits`, diagonal in the computational basis.
pub fn collective_sz(n_qubits: usize) -> Result<ComplexMatrix> {
    if n_qubits == 0 || n_qubits > MAX_COLLECTIVE_QUBITS {
        return Err(Error::Capacity(format!(
            "collective operators support 1..={MAX_COLLECTIVE_QUBITS} qubits, got {n_qubits}"
        )));
    }
    let diag: Vec<f64> = (0..1usize << n_qubits)
        .map(|x| n_qubits as f64 - 2.0 * x.count_ones() as f64)
        .collect();
    Ok(ComplexMatrix::from_real_diag(&diag))
}

/// A channel together with its unitary dilation onto system ⊗ environment.
#[derive(Debug, Clone)]
pub struct DilatedChannel {
    channel: QuantumChannel,
    env_dim: usize,
    unitary: ComplexMatrix,
    env_initial: DensityMatrix,
    // U restricted to the |j⟩⊗|0_E⟩ columns.
    isometry: ComplexMatrix,
}

impl DilatedChannel {
    pub fn channel(&self) -> &QuantumChannel {
        &self.channel
    }

    pub fn env_dim(&self) -> usize {
        self.env_dim
    }

    pub fn sys_dim(&self) -> usize {
        self.channel.dim_in
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn env_initial(&self) -> &DensityMatrix {
        &self.env_initial
    }

    /// The columns U(|j⟩⊗|0_E⟩), as a (d·e) × d isometry.
    pub fn isometry(&self) -> &ComplexMatrix {
        &self.isometry
    }

    /// U(ρ ⊗ |0_E⟩⟨0_E|)U† on system ⊗ environment.
    pub fn joint_output(&self, rho: &DensityMatrix) -> Result<ComplexMatrix> {
        if rho.dim() != self.sys_dim() {
            return Err(Error::Shape(format!(
                "dilated channel acts on dimension {}, got state of dimension {}",
                self.sys_dim(),
                rho.dim()
            )));
        }
        // Only the |0_E⟩ columns of U see a nonzero input.
        self.isometry().conjugate(rho.matrix())
    }

    /// Bob's view: Tr_E of the joint output.
    pub fn bob_state(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let joint = self.joint_output(rho)?;
        DensityMatrix::new(partial_trace(
            &joint,
            (self.sys_dim(), self.env_dim),
            Keep::A,
        )?)
    }

    /// Eve's view: Tr_B of the joint output, i.e. the full environment.
    pub fn eve_state(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let joint = self.joint_output(rho)?;
        DensityMatrix::new(partial_trace(
            &joint,
            (self.sys_dim(), self.env_dim),
            Keep::B,
        )?)
    }

    /// Checks ‖U†U − I‖ and the column-embedding identity, both within 1e-9.
    pub fn check_invariants(&self) -> Result<()> {
        let defect = linalg::unitarity_defect(&self.unitary);
        if defect > STATE_TOL {
            return Err(Error::invariant(
                "dilation-unitary",
                format!("‖U†U − I‖_F = {defect:e}"),
            ));
        }
        let d = self.sys_dim();
        let e = self.env_dim;
        for j in 0..d {
            for (i, a) in self.channel.kraus.iter().enumerate() {
                for k in 0..d {
                    let diff = (self.unitary[(k * e + i, j * e)] - a[(k, j)]).norm();
                    if diff > STATE_TOL {
                        return Err(Error::invariant(
                            "dilation-embedding",
                            format!("U(|{j}⟩⊗|0_E⟩) differs from Σ A_i|{j}⟩⊗|i_E⟩ by {diff:e}"),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Minimal unitary dilation: environment dimension equals the number of Kraus operators.
pub fn dilate(channel: &QuantumChannel) -> Result<DilatedChannel> {
    let d = channel.dim_in;
    let e = channel.kraus.len();
    let total = d
        .checked_mul(e)
        .filter(|&t| t <= linalg::MAX_DIM)
        .ok_or_else(|| {
            Error::Capacity(format!(
                "dilation dimension {d}x{e} exceeds the maximum {}",
                linalg::MAX_DIM
            ))
        })?;

    let isometry_columns: Vec<Vec<Complex64>> = (0..d)
        .map(|j| {
            let mut col = vec![ZERO; total];
            for (i, a) in channel.kraus.iter().enumerate() {
                for k in 0..d {
                    col[k * e + i] = a[(k, j)];
                }
            }
            col
        })
        .collect();
    let completed = linalg::gram_schmidt_complete(&isometry_columns, total).map_err(|err| {
        Error::Numerical {
            message: format!("dilation of a complete Kraus set failed: {err}"),
            residual: channel.completeness_defect(),
        }
    })?;

    // Isometry columns sit at j·e; completion columns fill the remaining slots in order.
    let mut order = vec![0usize; total];
    let mut extra = d;
    for (slot, o) in order.iter_mut().enumerate() {
        if slot % e == 0 {
            *o = slot / e;
        } else {
            *o = extra;
            extra += 1;
        }
    }
    let unitary = completed.select_columns(&order);
    let isometry = unitary.select_columns(&(0..d).map(|j| j * e).collect::<Vec<_>>());

    let dilated = DilatedChannel {
        channel: channel.clone(),
        env_dim: e,
        unitary,
        env_initial: DensityMatrix::basis(e, 0)?,
        isometry,
    };
    dilated.check_invariants()?;
    Ok(dilated)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ket(dim: usize, k: usize) -> Vec<Complex64> {
        let mut v = vec![ZERO; dim];
        v[k] = ONE;
        v
    }

    fn bell_00_11() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::pure(&[Complex64::new(s, 0.0), ZERO, ZERO, Complex64::new(s, 0.0)]).unwrap()
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(ComplexMatrix::identity(2)).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::from_real_diag(&[1.5, -0.5])).is_err());
        let err =
            DensityMatrix::new(ComplexMatrix::from_real_rows(&[&[0.5, 1.0], &[0.0, 0.5]]).unwrap())
                .unwrap_err();
        assert!(matches!(
            err,
            Error::Invariant {
                name: "density-matrix-hermitian",
                ..
            }
        ));
        assert!(DensityMatrix::new(ComplexMatrix::from_real_diag(&[0.25, 0.75])).is_ok());
    }

    #[test]
    fn incomplete_kraus_set_rejected() {
        let k = ComplexMatrix::from_real_diag(&[1.0, 0.5]);
        let err = QuantumChannel::new("bad", vec![k]).unwrap_err();
        assert!(matches!(
            err,
            Error::Invariant {
                name: "kraus-completeness",
                ..
            }
        ));
    }

    #[test]
    fn identity_channel_leaves_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = random_density_matrix(3, &mut rng);
        let out = QuantumChannel::identity(3).apply(&rho).unwrap();
        assert!(out.distance(&rho) < 1e-15);
    }

    #[test]
    fn dephasing_erases_cross_block_coherence() {
        let ch = builtin_collective_dephasing(2).unwrap();
        let out = ch.apply(&bell_00_11()).unwrap();
        let expected = ComplexMatrix::from_real_diag(&[0.5, 0.0, 0.0, 0.5]);
        assert!(out.matrix().distance(&expected) < 1e-15);
    }

    #[test]
    fn dephasing_preserves_logical_superposition() {
        let alpha = Complex64::new(0.6, 0.0);
        let beta = Complex64::new(0.0, 0.8);
        let psi = DensityMatrix::pure(&[ZERO, alpha, beta, ZERO]).unwrap();
        let ch = builtin_collective_dephasing(2).unwrap();
        assert!(ch.apply(&psi).unwrap().distance(&psi) < 1e-15);
    }

    #[test]
    fn apply_dimension_mismatch() {
        let ch = builtin_collective_dephasing(2).unwrap();
        assert!(matches!(
            ch.apply(&DensityMatrix::maximally_mixed(2)),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn collective_dephasing_kraus_sets() {
        let one = builtin_collective_dephasing(1).unwrap();
        assert_eq!(one.kraus()[0], ComplexMatrix::from_real_diag(&[1.0, 0.0]));
        assert_eq!(one.kraus()[1], ComplexMatrix::from_real_diag(&[0.0, 1.0]));

        let two = builtin_collective_dephasing(2).unwrap();
        assert_eq!(two.kraus().len(), 3);
        assert_eq!(
            two.kraus()[0],
            ComplexMatrix::from_real_diag(&[1.0, 0.0, 0.0, 0.0])
        );
        assert_eq!(
            two.kraus()[1],
            ComplexMatrix::from_real_diag(&[0.0, 1.0, 1.0, 0.0])
        );
        assert_eq!(
            two.kraus()[2],
            ComplexMatrix::from_real_diag(&[0.0, 0.0, 0.0, 1.0])
        );

        let three = builtin_collective_dephasing(3).unwrap();
        let ranks: Vec<usize> = three
            .kraus()
            .iter()
            .map(|p| p.trace().re.round() as usize)
            .collect();
        assert_eq!(ranks, vec![1, 3, 3, 1]);
        assert_eq!(three.completeness_defect(), 0.0);

        let sz = collective_sz(3).unwrap();
        for p in three.kraus() {
            assert_eq!(&sz * p, p * &sz);
        }
        assert!(matches!(
            builtin_collective_dephasing(11),
            Err(Error::Capacity(_))
        ));
        assert!(matches!(
            builtin_collective_dephasing(0),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn dephasing_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let ch = builtin_collective_dephasing(3).unwrap();
        let rho = random_density_matrix(8, &mut rng);
        let once = ch.apply(&rho).unwrap();
        let twice = ch.apply(&once).unwrap();
        assert!(once.distance(&twice) < 1e-14);
    }

    #[test]
    fn dilate_unitary_channel() {
        let h = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, -1.0]])
            .unwrap()
            .scale_real(std::f64::consts::FRAC_1_SQRT_2);
        let d = dilate(&QuantumChannel::unitary("h", h.clone()).unwrap()).unwrap();
        assert_eq!(d.env_dim(), 1);
        assert!(d.unitary().distance(&h) < 1e-15);
    }

    #[test]
    fn dilate_collective_dephasing() {
        let d = dilate(&builtin_collective_dephasing(2).unwrap()).unwrap();
        assert_eq!(d.env_dim(), 3);
        assert_eq!(d.unitary().rows(), 12);
        assert!(linalg::unitarity_defect(d.unitary()) < 1e-12);
        // |01⟩ ⊗ |0_E⟩ ↦ |01⟩ ⊗ |1_E⟩: column 1·3 = 3 has a one at row 1·3 + 1 = 4.
        assert_eq!(d.unitary()[(4, 3)], ONE);
    }

    #[test]
    fn dilate_amplitude_damping() {
        let gamma: f64 = 0.3;
        let d = dilate(&builtin_amplitude_damping(gamma).unwrap()).unwrap();
        assert_eq!(d.env_dim(), 2);
        assert_eq!(d.unitary().rows(), 4);
        // |1⟩⊗|0_E⟩ ↦ √(1−γ)|1⟩|0_E⟩ + √γ|0⟩|1_E⟩: rows 2 and 1 of column 2.
        let col = d.unitary().column(2);
        assert!((col[2].re - (1.0 - gamma).sqrt()).abs() < 1e-15);
        assert!((col[1].re - gamma.sqrt()).abs() < 1e-15);
        assert!(col[0].norm() < 1e-15 && col[3].norm() < 1e-15);
        d.check_invariants().unwrap();
    }

    #[test]
    fn bob_state_through_dephasing() {
        let ch = builtin_collective_dephasing(2).unwrap();
        let d = dilate(&ch).unwrap();
        let dfs_state = DensityMatrix::pure(&ket(4, 1)).unwrap();
        assert!(d.bob_state(&dfs_state).unwrap().distance(&dfs_state) < 1e-15);

        let s = 0.5;
        let plus_plus = DensityMatrix::pure(&[Complex64::new(s, 0.0); 4]).unwrap();
        let bob = d.bob_state(&plus_plus).unwrap();
        assert!(bob.distance(&ch.apply(&plus_plus).unwrap()) < 1e-15);
        let expected = ComplexMatrix::from_real_rows(&[
            &[0.25, 0.0, 0.0, 0.0],
            &[0.0, 0.25, 0.25, 0.0],
            &[0.0, 0.25, 0.25, 0.0],
            &[0.0, 0.0, 0.0, 0.25],
        ])
        .unwrap();
        assert!(bob.matrix().distance(&expected) < 1e-15);
    }

    #[test]
    fn eve_state_through_dephasing() {
        let d = dilate(&builtin_collective_dephasing(2).unwrap()).unwrap();
        let eve01 = d.eve_state(&DensityMatrix::basis(4, 1).unwrap()).unwrap();
        let eig = linalg::hermitian_eig(eve01.matrix()).unwrap();
        assert!((eig.eigenvalues[0] - 1.0).abs() < 1e-15 && eig.eigenvalues[1].abs() < 1e-15);

        let eve00 = d.eve_state(&DensityMatrix::basis(4, 0).unwrap()).unwrap();
        let eve11 = d.eve_state(&DensityMatrix::basis(4, 3).unwrap()).unwrap();
        assert_eq!(eve00, DensityMatrix::basis(3, 0).unwrap());
        assert_eq!(eve11, DensityMatrix::basis(3, 2).unwrap());
    }

    #[test]
    fn eve_state_for_unitary_channel_is_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = linalg::gram_schmidt_complete(&[random_pure_vector(3, &mut rng)], 3).unwrap();
        let d = dilate(&QuantumChannel::unitary("v", v).unwrap()).unwrap();
        let rho = random_density_matrix(3, &mut rng);
        assert!(
            d.eve_state(&rho)
                .unwrap()
                .distance(&DensityMatrix::basis(1, 0).unwrap())
                < 1e-12
        );
    }

    #[test]
    fn eve_state_matches_entry_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let ch = builtin_amplitude_damping(0.4).unwrap();
        let d = dilate(&ch).unwrap();
        for _ in 0..20 {
            let rho = random_density_matrix(2, &mut rng);
            let eve = d.eve_state(&rho).unwrap();
            for (i, ai) in ch.kraus().iter().enumerate() {
                for (ip, aip) in ch.kraus().iter().enumerate() {
                    let direct = (&(ai * rho.matrix()) * &aip.adjoint()).trace();
                    assert!((eve.matrix()[(i, ip)] - direct).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn channel_json_round_trip() {
        let ch = builtin_amplitude_damping(0.25).unwrap();
        let text = serde_json::to_string(&ch).unwrap();
        let back: QuantumChannel = serde_json::from_str(&text).unwrap();
        assert_eq!(back, ch);
        let bad = text.replace("\"dim_in\":2", "\"dim_in\":3");
        assert!(serde_json::from_str::<QuantumChannel>(&bad).is_err());
    }
}
