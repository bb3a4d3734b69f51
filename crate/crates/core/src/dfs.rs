//! Decoherence-free subspaces and error-avoiding codes over them.
//!
//! A subspace is decoherence-free for a set of system operators `S_j` when every
//! `S_j` acts on it as a scalar `c_j`. [`find_dfs`] returns the maximal joint
//! eigenspaces of a set of normal operators; [`verify_invariance`] checks the
//! channel-level property independently by sampling states on the subspace.

use std::cmp::Ordering;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{random_density_matrix, DensityMatrix, QuantumChannel};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};

pub const BASIS_TOL: f64 = 1e-9;
pub const EIGEN_RELATION_TOL: f64 = 1e-8;
pub const CLUSTER_TOL: f64 = 1e-8;
pub const INVARIANCE_TOL: f64 = 1e-8;
const NORMALITY_TOL: f64 = 1e-9;

/// Where a [`SystemOperatorSet`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorSource {
    Explicit,
    DerivedFromKraus,
}

/// The operators `S_j` whose joint scalar action defines a DFS.
#[derive(Debug, Clone)]
pub struct SystemOperatorSet {
    operators: Vec<ComplexMatrix>,
    source: OperatorSource,
}

impl SystemOperatorSet {
    pub fn explicit(operators: Vec<ComplexMatrix>) -> Result<Self> {
        Self::build(operators, OperatorSource::Explicit)
    }

    /// Uses the channel's Kraus operators as the `S_j`.
    pub fn from_channel(channel: &QuantumChannel) -> Self {
        SystemOperatorSet {
            operators: channel.kraus().to_vec(),
            source: OperatorSource::DerivedFromKraus,
        }
    }

    fn build(operators: Vec<ComplexMatrix>, source: OperatorSource) -> Result<Self> {
        let first = operators
            .first()
            .ok_or_else(|| Error::Shape("operator set is empty".into()))?;
        let dim = first.rows();
        for (i, op) in operators.iter().enumerate() {
            if op.rows() != dim || op.cols() != dim {
                return Err(Error::Shape(format!(
                    "operator {i} is {}x{}, expected {dim}x{dim}",
                    op.rows(),
                    op.cols()
                )));
            }
        }
        Ok(SystemOperatorSet { operators, source })
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn source(&self) -> OperatorSource {
        self.source
    }

    pub fn dim(&self) -> usize {
        self.operators[0].rows()
    }
}

/// Orthonormal basis of a subspace plus the scalar each operator takes on it.
#[derive(Debug, Clone, PartialEq)]
pub struct DfsSubspace {
    ambient_dim: usize,
    basis: ComplexMatrix,
    eigenvalues: Vec<Complex64>,
}

impl DfsSubspace {
    /// Wraps an orthonormal basis (columns) without any operator certificate.
    pub fn spanning(basis: ComplexMatrix) -> Result<Self> {
        let defect = (&basis.adjoint() * &basis).distance(&ComplexMatrix::identity(basis.cols()));
        if defect > BASIS_TOL {
            return Err(Error::invariant(
                "dfs-orthonormal-basis",
                format!("‖B†B − I‖_F = {defect:e}"),
            ));
        }
        if basis.cols() == 0 {
            return Err(Error::Shape("subspace basis has no columns".into()));
        }
        Ok(DfsSubspace {
            ambient_dim: basis.rows(),
            basis,
            eigenvalues: Vec::new(),
        })
    }

    /// Wraps a basis and computes the eigenvalue tuple against `ops`,
    /// failing if some operator does not act as a scalar on it.
    pub fn certified(basis: ComplexMatrix, ops: &SystemOperatorSet) -> Result<Self> {
        let mut sub = Self::spanning(basis)?;
        if ops.dim() != sub.ambient_dim {
            return Err(Error::Shape(format!(
                "operators act on dimension {}, subspace lives in {}",
                ops.dim(),
                sub.ambient_dim
            )));
        }
        sub.eigenvalues = ops
            .operators()
            .iter()
            .map(|s| rayleigh_scalar(s, &sub.basis))
            .collect();
        sub.check_certificate(ops)?;
        Ok(sub)
    }

    /// Subspace spanned by computational basis states `indices` of dimension `ambient_dim`.
    pub fn from_basis_indices(ambient_dim: usize, indices: &[usize]) -> Result<Self> {
        let mut b = ComplexMatrix::zeros(ambient_dim, indices.len());
        for (col, &k) in indices.iter().enumerate() {
            if k >= ambient_dim {
                return Err(Error::Shape(format!(
                    "index {k} out of range for {ambient_dim}"
                )));
            }
            b[(k, col)] = linalg::ONE;
        }
        Self::spanning(b)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn basis_vector(&self, k: usize) -> Vec<Complex64> {
        self.basis.column(k)
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn is_certified(&self) -> bool {
        !self.eigenvalues.is_empty()
    }

    /// Orthogonal projector B B†.
    pub fn projector(&self) -> ComplexMatrix {
        &self.basis * &self.basis.adjoint()
    }

    /// ‖(I − BB†) v‖.
    pub fn distance_from(&self, v: &[Complex64]) -> f64 {
        let coeffs = self
            .basis
            .adjoint()
            .apply_to(v)
            .expect("dimension checked by caller");
        let proj = self.basis.apply_to(&coeffs).expect("shapes agree");
        v.iter()
            .zip(&proj)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest ‖S_j v − c_j v‖ over operators and basis columns.
    pub fn certificate_residual(&self, ops: &SystemOperatorSet) -> f64 {
        let mut worst: f64 = 0.0;
        for (s, &c) in ops.operators().iter().zip(&self.eigenvalues) {
            for k in 0..self.dim() {
                let v = self.basis.column(k);
                let sv = s
                    .apply_to(&v)
                    .expect("square operator of ambient dimension");
                let r = sv
                    .iter()
                    .zip(&v)
                    .map(|(a, b)| (a - c * b).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                worst = worst.max(r);
            }
        }
        worst
    }

    pub fn check_certificate(&self, ops: &SystemOperatorSet) -> Result<()> {
        if self.eigenvalues.len() != ops.operators().len() {
            return Err(Error::invariant(
                "dfs-eigenvalue-relation",
                format!(
                    "{} eigenvalues for {} operators",
                    self.eigenvalues.len(),
                    ops.operators().len()
                ),
            ));
        }
        let residual = self.certificate_residual(ops);
        if residual > EIGEN_RELATION_TOL {
            return Err(Error::invariant(
                "dfs-eigenvalue-relation",
                format!("max ‖S_j v − c_j v‖ = {residual:e}"),
            ));
        }
        Ok(())
    }
}

fn rayleigh_scalar(s: &ComplexMatrix, basis: &ComplexMatrix) -> Complex64 {
    let compressed = &(&basis.adjoint() * s) * basis;
    compressed.trace() / basis.cols() as f64
}

/// One eigenspace of a single normal operator.
struct Eigenspace {
    value: Complex64,
    projector: ComplexMatrix,
}

/// Groups descending eigenvalues into clusters whose neighbours differ by at most `tol`.
fn cluster_indices(values: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        match clusters.last_mut() {
            Some(last) if (values[*last.last().unwrap()] - v).abs() <= tol => last.push(i),
            _ => clusters.push(vec![i]),
        }
    }
    clusters
}

/// Eigenspaces of a normal operator via its commuting Hermitian and anti-Hermitian parts.
fn normal_eigenspaces(s: &ComplexMatrix) -> Result<Vec<Eigenspace>> {
    let tol = CLUSTER_TOL * s.frobenius_norm().max(1.0);
    let re_part = s.hermitian_part();
    let im_part = s.scale(Complex64::new(0.0, -1.0)).hermitian_part();

    let eig = linalg::hermitian_eig(&re_part)?;
    let mut spaces = Vec::new();
    for cluster in cluster_indices(&eig.eigenvalues, tol) {
        let block = eig.eigenvectors.select_columns(&cluster);
        let re = cluster.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / cluster.len() as f64;
        let compressed = (&(&block.adjoint() * &im_part) * &block).hermitian_part();
        let inner = linalg::hermitian_eig(&compressed)?;
        for sub in cluster_indices(&inner.eigenvalues, tol) {
            let im = sub.iter().map(|&i| inner.eigenvalues[i]).sum::<f64>() / sub.len() as f64;
            let vecs = &block * &inner.eigenvectors.select_columns(&sub);
            spaces.push(Eigenspace {
                value: Complex64::new(re, im),
                projector: &vecs * &vecs.adjoint(),
            });
        }
    }
    Ok(spaces)
}

/// Intersects span(basis) with the range of `projector`.
fn intersect(basis: &ComplexMatrix, projector: &ComplexMatrix) -> Result<Option<ComplexMatrix>> {
    let overlap = (&(&basis.adjoint() * projector) * basis).hermitian_part();
    let eig = linalg::hermitian_eig(&overlap)?;
    let keep: Vec<usize> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l >= 1.0 - EIGEN_RELATION_TOL)
        .map(|(i, _)| i)
        .collect();
    if keep.is_empty() {
        return Ok(None);
    }
    let mut b = basis * &eig.eigenvectors.select_columns(&keep);
    // Re-orthonormalise to wash out rounding from the product.
    b = linalg::gram_schmidt_complete(&b.columns(), b.rows())?
        .select_columns(&(0..keep.len()).collect::<Vec<_>>());
    for j in 0..b.cols() {
        let mut col = b.column(j);
        linalg::fix_phase(&mut col);
        for (i, z) in col.into_iter().enumerate() {
            b[(i, j)] = z;
        }
    }
    Ok(Some(b))
}

/// All maximal joint eigenspaces of the operator set.
///
/// Starts from the whole space and, for each operator in turn, intersects every
/// current subspace with each eigenspace of that operator. An empty result means
/// the operators share no eigenvector.
pub fn find_dfs(ops: &SystemOperatorSet) -> Result<Vec<DfsSubspace>> {
    for (index, s) in ops.operators().iter().enumerate() {
        let commutator = s.normality_defect();
        if commutator > NORMALITY_TOL * s.frobenius_norm().powi(2).max(1.0) {
            return Err(Error::UnsupportedOperator { index, commutator });
        }
    }

    let n = ops.dim();
    let mut current: Vec<(ComplexMatrix, Vec<Complex64>)> =
        vec![(ComplexMatrix::identity(n), Vec::new())];
    for s in ops.operators() {
        let spaces = normal_eigenspaces(s)?;
        let mut next = Vec::new();
        for (basis, prefix) in &current {
            for space in &spaces {
                if let Some(b) = intersect(basis, &space.projector)? {
                    let mut tuple = prefix.clone();
                    tuple.push(space.value);
                    next.push((b, tuple));
                }
            }
        }
        current = next;
        if current.is_empty() {
            break;
        }
    }

    let mut out = Vec::with_capacity(current.len());
    for (basis, _) in current {
        out.push(DfsSubspace::certified(basis, ops)?);
    }
    out.sort_by(compare_subspaces);
    Ok(out)
}

/// Descending dimension, then descending eigenvalue tuple (real part, then imaginary).
fn compare_subspaces(a: &DfsSubspace, b: &DfsSubspace) -> Ordering {
    b.dim().cmp(&a.dim()).then_with(|| {
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            let o = y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im));
            if o != Ordering::Equal {
                return o;
            }
        }
        Ordering::Equal
    })
}

/// Outcome of sampling random states on a subspace through a channel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub trials: usize,
    pub max_residual: f64,
    pub passes: bool,
}

/// Pushes `trials` random states supported on `subspace` through the channel and
/// reports the largest ‖Σ A_i ρ A_i† − ρ‖_F.
pub fn verify_invariance(
    channel: &QuantumChannel,
    subspace: &DfsSubspace,
    trials: usize,
    seed: u64,
) -> Result<InvarianceReport> {
    if channel.dim_in() != subspace.ambient_dim() {
        return Err(Error::Shape(format!(
            "channel acts on dimension {}, subspace lives in {}",
            channel.dim_in(),
            subspace.ambient_dim()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let local = random_density_matrix(subspace.dim(), &mut rng);
        let rho = subspace.basis().conjugate(local.matrix())?;
        let out = channel.apply_operator(&rho)?;
        worst = worst.max(out.distance(&rho));
    }
    Ok(InvarianceReport {
        trials,
        max_residual: worst,
        passes: worst <= INVARIANCE_TOL,
    })
}

/// Deterministic invariance check over the operator basis |a⟩⟨b| of the subspace.
///
/// By linearity this covers every operator supported on the subspace.
pub fn invariance_residual(channel: &QuantumChannel, subspace: &DfsSubspace) -> Result<f64> {
    if channel.dim_in() != subspace.ambient_dim() {
        return Err(Error::Shape(format!(
            "channel acts on dimension {}, subspace lives in {}",
            channel.dim_in(),
            subspace.ambient_dim()
        )));
    }
    let mut worst: f64 = 0.0;
    for a in 0..subspace.dim() {
        for b in 0..subspace.dim() {
            let op = ComplexMatrix::outer(&subspace.basis_vector(a), &subspace.basis_vector(b));
            worst = worst.max(channel.apply_operator(&op)?.distance(&op));
        }
    }
    Ok(worst)
}

/// Error-avoiding code: codewords drawn from a DFS basis with projective decoding.
#[derive(Debug, Clone)]
pub struct Qeac {
    subspace: DfsSubspace,
    codewords: Vec<Vec<Complex64>>,
    decoding: Vec<ComplexMatrix>,
    complement: ComplexMatrix,
}

impl Qeac {
    pub fn subspace(&self) -> &DfsSubspace {
        &self.subspace
    }

    pub fn num_messages(&self) -> usize {
        self.codewords.len()
    }

    /// Codeword vector k̃(u).
    pub fn codeword(&self, u: usize) -> &[Complex64] {
        &self.codewords[u]
    }

    pub fn codeword_states(&self) -> Vec<DensityMatrix> {
        self.codewords
            .iter()
            .map(|v| DensityMatrix::pure(v).expect("normalised basis column"))
            .collect()
    }

    /// The D̃_u, one per message.
    pub fn decoding(&self) -> &[ComplexMatrix] {
        &self.decoding
    }

    /// I − Σ D̃_u.
    pub fn complement(&self) -> &ComplexMatrix {
        &self.complement
    }

    /// Code length n, taken as the subspace dimension.
    pub fn length(&self) -> usize {
        self.subspace.dim()
    }

    /// log₂|U|.
    pub fn bits_per_block(&self) -> f64 {
        (self.num_messages() as f64).log2()
    }

    /// (1/n) log₂|U| with n = dim of the subspace.
    pub fn rate(&self) -> f64 {
        self.bits_per_block() / self.length() as f64
    }
}

/// Takes the first `num_messages` basis columns as codewords, decoded by their projectors.
pub fn build_qeac(subspace: &DfsSubspace, num_messages: usize) -> Result<Qeac> {
    if num_messages == 0 {
        return Err(Error::Domain("a code needs at least one message".into()));
    }
    if num_messages > subspace.dim() {
        return Err(Error::Capacity(format!(
            "{num_messages} messages cannot exceed subspace dimension {}",
            subspace.dim()
        )));
    }
    let codewords: Vec<Vec<Complex64>> = (0..num_messages)
        .map(|u| subspace.basis_vector(u))
        .collect();
    let decoding: Vec<ComplexMatrix> = codewords
        .iter()
        .map(|v| ComplexMatrix::projector(v))
        .collect();
    let mut complement = ComplexMatrix::identity(subspace.ambient_dim());
    for d in &decoding {
        complement = &complement - d;
    }
    Ok(Qeac {
        subspace: subspace.clone(),
        codewords,
        decoding,
        complement,
    })
}
