//! Entropies, Holevo quantities, quantum privacy and wiretap-code verification.
//!
//! All logarithms are base 2. Eve is always handed the full environment, so the
//! Holevo quantity of her reduced states is the worst-case bound on what she can
//! learn.

use serde::{Deserialize, Serialize};

use crate::channel::{DensityMatrix, DilatedChannel};
use crate::dfs::Qeac;
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};

pub const PROB_TOL: f64 = 1e-9;
pub const EIG_CLAMP: f64 = 1e-9;
pub const POVM_TOL: f64 = 1e-9;

/// States with prior probabilities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ensemble {
    probs: Vec<f64>,
    states: Vec<DensityMatrix>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EnsembleJson {
    probs: Vec<f64>,
    states: Vec<DensityMatrix>,
}

impl<'de> Deserialize<'de> for Ensemble {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = EnsembleJson::deserialize(de)?;
        Ensemble::new(raw.probs, raw.states).map_err(serde::de::Error::custom)
    }
}

impl Ensemble {
    pub fn new(probs: Vec<f64>, states: Vec<DensityMatrix>) -> Result<Self> {
        if probs.len() != states.len() {
            return Err(Error::Shape(format!(
                "{} probabilities for {} states",
                probs.len(),
                states.len()
            )));
        }
        if states.is_empty() {
            return Err(Error::Shape("ensemble has no states".into()));
        }
        let dim = states[0].dim();
        if let Some(k) = states.iter().position(|s| s.dim() != dim) {
            return Err(Error::Shape(format!(
                "state {k} has dimension {}, expected {dim}",
                states[k].dim()
            )));
        }
        if let Some(k) = probs.iter().position(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::invariant(
                "ensemble-probabilities",
                format!("probability {k} is {}", probs[k]),
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::invariant(
                "ensemble-probabilities",
                format!("probabilities sum to {total}"),
            ));
        }
        Ok(Ensemble { probs, states })
    }

    /// Equal weights over `states`.
    pub fn uniform(states: Vec<DensityMatrix>) -> Result<Self> {
        let n = states.len().max(1);
        Self::new(vec![1.0 / n as f64; states.len()], states)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    /// ρ̄ = Σ p_k ρ_k.
    pub fn average(&self) -> Result<DensityMatrix> {
        DensityMatrix::mixture(&self.probs, &self.states)
    }

    /// Same priors, each state mapped through `f`.
    pub fn map_states<F>(&self, f: F) -> Result<Ensemble>
    where
        F: Fn(&DensityMatrix) -> Result<DensityMatrix>,
    {
        let states = self.states.iter().map(f).collect::<Result<Vec<_>>>()?;
        Ensemble::new(self.probs.clone(), states)
    }
}

/// −Σ λ log₂ λ over the spectrum of a Hermitian PSD matrix of unit trace.
pub(crate) fn spectrum_entropy(eigenvalues: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &l in eigenvalues {
        if l < -EIG_CLAMP {
            return Err(Error::InvalidState(format!("negative eigenvalue {l:e}")));
        }
        if l > 0.0 {
            s -= l * l.log2();
        }
    }
    Ok(s.max(0.0))
}

/// S(ρ) in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let eig = linalg::hermitian_eig(rho.matrix())?;
    spectrum_entropy(&eig.eigenvalues)
}

/// χ = S(ρ̄) − Σ p_k S(ρ_k).
pub fn holevo(e: &Ensemble) -> Result<f64> {
    let avg = von_neumann_entropy(&e.average()?)?;
    let mut cond = 0.0;
    for (p, s) in e.probs.iter().zip(&e.states) {
        if *p > 0.0 {
            cond += p * von_neumann_entropy(s)?;
        }
    }
    Ok(avg - cond)
}

/// Bob's and Eve's Holevo quantities for one input ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrivacyReport {
    pub chi_bob: f64,
    pub chi_eve: f64,
    pub privacy: f64,
}

pub fn privacy(d: &DilatedChannel, e: &Ensemble) -> Result<PrivacyReport> {
    let bob = e.map_states(|rho| d.bob_state(rho))?;
    let eve = e.map_states(|rho| d.eve_state(rho))?;
    let chi_bob = holevo(&bob)?;
    let chi_eve = holevo(&eve)?;
    Ok(PrivacyReport {
        chi_bob,
        chi_eve,
        privacy: chi_bob - chi_eve,
    })
}

/// χ_Bob − χ_Eve for one prior and signal set: the bracket of the secrecy-capacity lower bound.
pub fn secrecy_rate_lower_bound(d: &DilatedChannel, e: &Ensemble) -> Result<f64> {
    Ok(privacy(d, e)?.privacy)
}

/// Codeword states with one decoding element per message.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WiretapCode {
    codewords: Vec<DensityMatrix>,
    povm: Vec<ComplexMatrix>,
    block_length: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WiretapCodeJson {
    codewords: Vec<DensityMatrix>,
    povm: Vec<ComplexMatrix>,
    #[serde(default)]
    block_length: Option<usize>,
}

impl<'de> Deserialize<'de> for WiretapCode {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = WiretapCodeJson::deserialize(de)?;
        let block_length = match raw.block_length {
            Some(n) => n,
            None => default_block_length(raw.codewords.first().map_or(1, DensityMatrix::dim)),
        };
        WiretapCode::new(raw.codewords, raw.povm, block_length).map_err(serde::de::Error::custom)
    }
}

/// Number of qubits when `dim` is a power of two, otherwise `dim` itself.
pub fn default_block_length(dim: usize) -> usize {
    if dim.is_power_of_two() && dim > 1 {
        dim.trailing_zeros() as usize
    } else {
        dim.max(1)
    }
}

impl WiretapCode {
    pub fn new(
        codewords: Vec<DensityMatrix>,
        povm: Vec<ComplexMatrix>,
        block_length: usize,
    ) -> Result<Self> {
        if codewords.is_empty() {
            return Err(Error::Shape("code has no codewords".into()));
        }
        if povm.len() != codewords.len() {
            return Err(Error::Shape(format!(
                "{} decoding elements for {} codewords",
                povm.len(),
                codewords.len()
            )));
        }
        if block_length == 0 {
            return Err(Error::Domain("block length must be positive".into()));
        }
        let dim = codewords[0].dim();
        if let Some(k) = codewords.iter().position(|c| c.dim() != dim) {
            return Err(Error::Shape(format!(
                "codeword {k} has dimension {}",
                codewords[k].dim()
            )));
        }
        if let Some(k) = povm.iter().position(|d| d.rows() != dim || d.cols() != dim) {
            return Err(Error::Shape(format!(
                "decoding element {k} is {}x{}, expected {dim}x{dim}",
                povm[k].rows(),
                povm[k].cols()
            )));
        }
        Ok(WiretapCode {
            codewords,
            povm,
            block_length,
        })
    }

    pub fn codewords(&self) -> &[DensityMatrix] {
        &self.codewords
    }

    pub fn povm(&self) -> &[ComplexMatrix] {
        &self.povm
    }

    pub fn block_length(&self) -> usize {
        self.block_length
    }

    pub fn dim(&self) -> usize {
        self.codewords[0].dim()
    }

    /// Each element PSD and Σ D_u ≤ I, both within 1e-9.
    pub fn check_povm(&self) -> Result<()> {
        let dim = self.dim();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for (u, d) in self.povm.iter().enumerate() {
            if !d.is_hermitian(POVM_TOL) {
                return Err(Error::Domain(format!(
                    "decoding element D_{u} is not Hermitian"
                )));
            }
            let min = linalg::hermitian_eig(d)?
                .eigenvalues
                .last()
                .copied()
                .unwrap_or(0.0);
            if min < -POVM_TOL {
                return Err(Error::Domain(format!(
                    "decoding element D_{u} is not positive (eigenvalue {min:e})"
                )));
            }
            sum = &sum + d;
        }
        let slack = &ComplexMatrix::identity(dim) - &sum;
        let min = linalg::hermitian_eig(&slack)?
            .eigenvalues
            .last()
            .copied()
            .unwrap_or(0.0);
        if min < -POVM_TOL {
            return Err(Error::Domain(format!(
                "decoding elements sum above identity (I − Σ D_u has eigenvalue {min:e})"
            )));
        }
        Ok(())
    }
}

impl From<&Qeac> for WiretapCode {
    fn from(q: &Qeac) -> Self {
        WiretapCode {
            codewords: q.codeword_states(),
            povm: q.decoding().to_vec(),
            block_length: q.length(),
        }
    }
}

/// Decoding error and leakage of a code, judged against (λ, μ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WiretapVerdict {
    pub p_error: f64,
    #[serde(rename = "leakage_bits_per_letter")]
    pub leakage: f64,
    pub passes: bool,
    pub lambda: f64,
    pub mu: f64,
}

/// Average decoding error for uniform messages and Eve's Holevo leakage per letter.
pub fn verify_wiretap_code(
    d: &DilatedChannel,
    code: &WiretapCode,
    lambda: f64,
    mu: f64,
) -> Result<WiretapVerdict> {
    if code.dim() != d.sys_dim() {
        return Err(Error::Shape(format!(
            "code lives in dimension {}, channel acts on {}",
            code.dim(),
            d.sys_dim()
        )));
    }
    if !(lambda.is_finite() && mu.is_finite()) {
        return Err(Error::Domain("λ and μ must be finite".into()));
    }
    code.check_povm()?;

    let m = code.codewords.len() as f64;
    let mut success = 0.0;
    for (word, decode) in code.codewords.iter().zip(&code.povm) {
        let received = d.bob_state(word)?;
        success += (decode * received.matrix()).trace().re;
    }
    let p_error = (1.0 - success / m).clamp(0.0, 1.0);

    let eve = Ensemble::uniform(
        code.codewords
            .iter()
            .map(|w| d.eve_state(w))
            .collect::<Result<Vec<_>>>()?,
    )?;
    let leakage = holevo(&eve)? / code.block_length as f64;

    Ok(WiretapVerdict {
        p_error,
        leakage,
        passes: p_error <= lambda && leakage < mu,
        lambda,
        mu,
    })
}
