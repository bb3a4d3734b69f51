//! Maximisation of Holevo quantities over input priors.
//!
//! [`maximize_holevo`] runs the multiplicative fixed point
//! `p_k ← p_k · 2^{D(ρ_k‖ρ̄)} / Z`, which ascends the concave Holevo objective and
//! stops on the optimality gap `max_k D(ρ_k‖ρ̄) − χ(p)`. The secrecy objective
//! `χ_Bob − χ_Eve` is not concave, so [`secrecy_rate_sweep`] uses multi-start
//! projected ascent and only claims a lower bound.

use serde::{Deserialize, Serialize};

use crate::channel::{DensityMatrix, DilatedChannel};
use crate::dfs::{self, DfsSubspace};
use crate::error::{Error, Result};
use crate::linalg;
use crate::secrecy::von_neumann_entropy;

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 10_000;
pub const PRUNE_BELOW: f64 = 1e-12;
const LOG_FLOOR: f64 = 1e-300;
const SUPPORT_EPS: f64 = 1e-14;
const SWEEP_STARTS: usize = 8;
const MIN_STEP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CapacityMode {
    /// max_P χ over priors; exact up to `tol`.
    HolevoMax,
    /// Best found χ_Bob − χ_Eve; a lower bound on the true maximum.
    DifferenceLowerBound,
}

/// Which signal states entered the optimisation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignalSet {
    SubspaceBasis,
    UserSupplied,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityResult {
    pub optimal_probs: Vec<f64>,
    pub value_bits: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective value after each iterate, starting with the initial point.
    pub history: Vec<f64>,
    /// Optimality gap at the returned iterate.
    pub gap: f64,
    pub mode: CapacityMode,
    pub signal_set: SignalSet,
    /// Set when some state had weight outside the support of ρ̄ and its
    /// relative entropy was evaluated with a floored logarithm.
    pub divergent_support: bool,
}

/// Per-state quantities of one signal set at one prior.
struct HolevoTerms {
    chi: f64,
    divergences: Vec<f64>,
    divergent_support: bool,
}

/// States with cached entropies.
struct SignalStates {
    states: Vec<DensityMatrix>,
    entropies: Vec<f64>,
}

impl SignalStates {
    fn new(states: Vec<DensityMatrix>) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| Error::Shape("at least one signal state is required".into()))?;
        let dim = first.dim();
        if let Some(k) = states.iter().position(|s| s.dim() != dim) {
            return Err(Error::Shape(format!(
                "signal state {k} has dimension {}, expected {dim}",
                states[k].dim()
            )));
        }
        let entropies = states
            .iter()
            .map(von_neumann_entropy)
            .collect::<Result<Vec<_>>>()?;
        Ok(SignalStates { states, entropies })
    }

    fn len(&self) -> usize {
        self.states.len()
    }

    /// χ(p) and D(ρ_k‖ρ̄) for every k, with ρ̄ = Σ p_k ρ_k.
    fn terms(&self, probs: &[f64]) -> Result<HolevoTerms> {
        let dim = self.states[0].dim();
        let mut avg = linalg::ComplexMatrix::zeros(dim, dim);
        for (p, s) in probs.iter().zip(&self.states) {
            if *p > 0.0 {
                avg = &avg + &s.matrix().scale_real(*p);
            }
        }
        let eig = linalg::hermitian_eig(&avg)?;
        let logs: Vec<f64> = eig
            .eigenvalues
            .iter()
            .map(|&l| l.max(LOG_FLOOR).log2())
            .collect();

        let mut divergent_support = false;
        let mut divergences = Vec::with_capacity(self.len());
        for (s, &entropy) in self.states.iter().zip(&self.entropies) {
            let mut cross = 0.0;
            for (i, (&l, &log)) in eig.eigenvalues.iter().zip(&logs).enumerate() {
                let v = eig.eigenvector(i);
                let w = linalg::inner(&v, &s.matrix().apply_to(&v)?).re.max(0.0);
                if l < SUPPORT_EPS && w > 1e-9 {
                    divergent_support = true;
                }
                cross -= w * log;
            }
            divergences.push(cross - entropy);
        }
        let chi = probs.iter().zip(&divergences).map(|(p, d)| p * d).sum();
        Ok(HolevoTerms {
            chi,
            divergences,
            divergent_support,
        })
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "tolerance must be positive, got {tol}"
        )))
    }
}

fn max_of(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// max over priors of χ for a fixed signal set.
pub fn maximize_holevo(
    states: &[DensityMatrix],
    tol: f64,
    max_iter: usize,
) -> Result<CapacityResult> {
    check_tol(tol)?;
    let signals = SignalStates::new(states.to_vec())?;
    let m = signals.len();
    let mut probs = vec![1.0 / m as f64; m];
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut divergent_support = false;

    loop {
        let terms = signals.terms(&probs)?;
        divergent_support |= terms.divergent_support;
        history.push(terms.chi);
        let gap = max_of(&terms.divergences) - terms.chi;
        if gap <= tol || iterations >= max_iter {
            return Ok(CapacityResult {
                optimal_probs: probs,
                value_bits: terms.chi,
                iterations,
                converged: gap <= tol,
                history,
                gap,
                mode: CapacityMode::HolevoMax,
                signal_set: SignalSet::UserSupplied,
                divergent_support,
            });
        }

        let top = max_of(&terms.divergences);
        let mut z = 0.0;
        for (p, d) in probs.iter_mut().zip(&terms.divergences) {
            if *p > 0.0 {
                *p *= (d - top).exp2();
                z += *p;
            }
        }
        for p in probs.iter_mut() {
            *p /= z;
            if *p < PRUNE_BELOW {
                *p = 0.0;
            }
        }
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        iterations += 1;
    }
}

fn check_subspace(d: &DilatedChannel, subspace: &DfsSubspace) -> Result<()> {
    if !subspace.is_certified() {
        return Err(Error::Domain(
            "subspace carries no eigenvalue certificate; obtain it from find_dfs or DfsSubspace::certified".into(),
        ));
    }
    let residual = dfs::invariance_residual(d.channel(), subspace)?;
    if residual > dfs::INVARIANCE_TOL {
        return Err(Error::Domain(format!(
            "channel does not act as the identity on the subspace (residual {residual:e})"
        )));
    }
    Ok(())
}

/// Secrecy capacity over a certified DFS: max_P χ_Bob for the basis codewords
/// pushed through the channel. Eve's term vanishes on such a subspace.
pub fn secrecy_capacity_dfs(
    d: &DilatedChannel,
    subspace: &DfsSubspace,
    tol: f64,
) -> Result<CapacityResult> {
    check_subspace(d, subspace)?;
    let signals = (0..subspace.dim())
        .map(|k| d.bob_state(&DensityMatrix::pure(&subspace.basis_vector(k))?))
        .collect::<Result<Vec<_>>>()?;
    let mut result = maximize_holevo(&signals, tol, DEFAULT_MAX_ITER)?;
    result.signal_set = SignalSet::SubspaceBasis;
    Ok(result)
}

/// As [`secrecy_capacity_dfs`] but with caller-chosen signal states, each of
/// which must be supported on the subspace.
pub fn secrecy_capacity_dfs_with_signals(
    d: &DilatedChannel,
    subspace: &DfsSubspace,
    states: &[DensityMatrix],
    tol: f64,
) -> Result<CapacityResult> {
    check_subspace(d, subspace)?;
    let proj = subspace.projector();
    for (k, s) in states.iter().enumerate() {
        if s.dim() != subspace.ambient_dim() {
            return Err(Error::Shape(format!(
                "signal state {k} has dimension {}",
                s.dim()
            )));
        }
        let inside = proj.conjugate(s.matrix())?;
        let leak = inside.distance(s.matrix());
        if leak > 1e-9 {
            return Err(Error::Domain(format!(
                "signal state {k} is not supported on the subspace (residual {leak:e})"
            )));
        }
    }
    let signals = states
        .iter()
        .map(|s| d.bob_state(s))
        .collect::<Result<Vec<_>>>()?;
    let mut result = maximize_holevo(&signals, tol, DEFAULT_MAX_ITER)?;
    result.signal_set = SignalSet::UserSupplied;
    Ok(result)
}

/// Euclidean projection onto the probability simplex.
fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        cumulative += x;
        let t = (cumulative - 1.0) / (i + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

struct SweepObjective {
    bob: SignalStates,
    eve: SignalStates,
}

impl SweepObjective {
    /// f(p) = χ_Bob − χ_Eve and its gradient (up to a constant shift on the simplex).
    fn eval(&self, probs: &[f64]) -> Result<(f64, Vec<f64>, bool)> {
        let b = self.bob.terms(probs)?;
        let e = self.eve.terms(probs)?;
        let grad = b
            .divergences
            .iter()
            .zip(&e.divergences)
            .map(|(x, y)| x - y)
            .collect();
        Ok((
            b.chi - e.chi,
            grad,
            b.divergent_support || e.divergent_support,
        ))
    }
}

struct AscentRun {
    probs: Vec<f64>,
    value: f64,
    history: Vec<f64>,
    iterations: usize,
    converged: bool,
    gap: f64,
    divergent_support: bool,
}

fn frank_wolfe_gap(probs: &[f64], grad: &[f64]) -> f64 {
    let mean: f64 = probs.iter().zip(grad).map(|(p, g)| p * g).sum();
    max_of(grad) - mean
}

fn projected_ascent(
    obj: &SweepObjective,
    start: Vec<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<AscentRun> {
    let mut probs = start;
    let (mut value, mut grad, mut divergent) = obj.eval(&probs)?;
    let mut history = vec![value];
    let mut step = 1.0;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iter {
        if frank_wolfe_gap(&probs, &grad) <= tol {
            converged = true;
            break;
        }
        let trial: Vec<f64> = probs.iter().zip(&grad).map(|(p, g)| p + step * g).collect();
        let candidate = project_to_simplex(&trial);
        let moved = candidate
            .iter()
            .zip(&probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if moved < 1e-15 {
            converged = true;
            break;
        }
        let (cand_value, cand_grad, cand_div) = obj.eval(&candidate)?;
        if cand_value > value {
            let gain = cand_value - value;
            probs = candidate;
            value = cand_value;
            grad = cand_grad;
            divergent |= cand_div;
            history.push(value);
            iterations += 1;
            step = (step * 2.0).min(1e6);
            if gain <= tol * 1e-3 {
                converged = true;
                break;
            }
        } else {
            step *= 0.5;
            if step < MIN_STEP {
                converged = true;
                break;
            }
        }
    }
    Ok(AscentRun {
        gap: frank_wolfe_gap(&probs, &grad),
        probs,
        value,
        history,
        iterations,
        converged,
        divergent_support: divergent,
    })
}

/// Best χ_Bob − χ_Eve found over priors for a fixed signal set.
///
/// Starts from the uniform prior and from up to seven simplex vertices; every
/// accepted step strictly increases the objective. The returned value is a lower
/// bound on the maximum over priors.
pub fn secrecy_rate_sweep(
    d: &DilatedChannel,
    states: &[DensityMatrix],
    tol: f64,
) -> Result<CapacityResult> {
    check_tol(tol)?;
    let bob = states
        .iter()
        .map(|s| d.bob_state(s))
        .collect::<Result<Vec<_>>>()?;
    let eve = states
        .iter()
        .map(|s| d.eve_state(s))
        .collect::<Result<Vec<_>>>()?;
    let obj = SweepObjective {
        bob: SignalStates::new(bob)?,
        eve: SignalStates::new(eve)?,
    };
    let m = states.len();

    let mut starts = vec![vec![1.0 / m as f64; m]];
    if m > 1 {
        for k in 0..m.min(SWEEP_STARTS - 1) {
            let mut v = vec![0.0; m];
            v[k] = 1.0;
            starts.push(v);
        }
    }

    let mut best: Option<AscentRun> = None;
    for start in starts {
        let run = projected_ascent(&obj, start, tol, DEFAULT_MAX_ITER)?;
        if best.as_ref().is_none_or(|b| run.value > b.value) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one start");
    Ok(CapacityResult {
        optimal_probs: best.probs,
        value_bits: best.value,
        iterations: best.iterations,
        converged: best.converged,
        history: best.history,
        gap: best.gap,
        mode: CapacityMode::DifferenceLowerBound,
        signal_set: SignalSet::UserSupplied,
        divergent_support: best.divergent_support,
    })
}
