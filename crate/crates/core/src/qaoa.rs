//! Statevector QAOA for diagonal cost Hamiltonians.
//!
//! Layers alternate the diagonal phase e^{-i gamma H} with the transverse
//! mixer e^{-i beta X} on every qubit. Parameters are trained classically by
//! gradient descent on the energy expectation with central finite-difference
//! gradients and multi-restart, and trained circuits are sampled with a
//! seeded generator into reproducible reports.

use std::collections::BTreeMap;

use num::complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{effective_statevector_cap, DiagonalCost, PenaltyScheme};
use crate::rng::{derive_seed, seeded_rng, Stream};

/// Layer angles; p = 0 means the bare uniform superposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl QaoaParams {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if gammas.len() != betas.len() {
            return Err(Error::DimensionMismatch(
                "gamma and beta lists must have equal length".into(),
            ));
        }
        Ok(QaoaParams { gammas, betas })
    }

    pub fn p(&self) -> usize {
        self.gammas.len()
    }

    fn from_flat(flat: &[f64]) -> Self {
        let p = flat.len() / 2;
        QaoaParams {
            gammas: flat[..p].to_vec(),
            betas: flat[p..].to_vec(),
        }
    }
}

/// 2^n complex amplitudes, unit norm, indexed little-endian by qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    pub amplitudes: Vec<Complex64>,
}

impl Statevector {
    pub fn n(&self) -> usize {
        self.amplitudes.len().trailing_zeros() as usize
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Run the circuit: uniform start, then per layer the diagonal phase and
/// the single-qubit mixer rotations.
pub fn qaoa_state(diag: &DiagonalCost, params: &QaoaParams) -> Result<Statevector> {
    let cap = effective_statevector_cap();
    if diag.n > cap {
        return Err(Error::QubitCap {
            qubits: diag.n,
            cap,
        });
    }
    let size = diag.values.len();
    let mut amp = vec![Complex64::new(1.0 / (size as f64).sqrt(), 0.0); size];
    for (gamma, beta) in params.gammas.iter().zip(&params.betas) {
        // phase: a_z *= e^{-i gamma v_z}
        for (a, &v) in amp.iter_mut().zip(&diag.values) {
            let angle = gamma * v;
            *a *= Complex64::new(angle.cos(), -angle.sin());
        }
        // mixer: e^{-i beta X} on every qubit
        let (cos_b, sin_b) = (beta.cos(), beta.sin());
        for q in 0..diag.n {
            let stride = 1usize << q;
            let step = stride << 1;
            for start in (0..size).step_by(step) {
                for offset in start..start + stride {
                    let i0 = offset;
                    let i1 = offset + stride;
                    let a = amp[i0];
                    let b = amp[i1];
                    amp[i0] = a * cos_b - Complex64::i() * b * sin_b;
                    amp[i1] = b * cos_b - Complex64::i() * a * sin_b;
                }
            }
        }
    }
    Ok(Statevector { amplitudes: amp })
}

/// <psi| H |psi> for a diagonal H.
pub fn expectation(state: &Statevector, diag: &DiagonalCost) -> f64 {
    debug_assert_eq!(state.amplitudes.len(), diag.values.len());
    state
        .amplitudes
        .iter()
        .zip(&diag.values)
        .map(|(a, &v)| a.norm_sqr() * v)
        .sum()
}

/// Training budget and step sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub max_epochs: usize,
    pub tol: f64,
    pub learning_rate: f64,
    pub restarts: usize,
    pub fd_step: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            max_epochs: 1000,
            tol: 1e-6,
            learning_rate: 1e-3,
            restarts: 4,
            fd_step: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub epoch: usize,
    pub expectation: f64,
}

/// Best parameters seen across all restarts, with the winning restart's
/// training trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeResult {
    pub params: QaoaParams,
    pub expectation: f64,
    pub restart_index: usize,
    pub trace: Vec<TracePoint>,
}

impl OptimizeResult {
    /// CSV with columns epoch,expectation.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("epoch,expectation\n");
        for t in &self.trace {
            out.push_str(&format!("{},{}\n", t.epoch, t.expectation));
        }
        out
    }
}

/// Train p layers by Adam gradient descent on the expectation.
///
/// Angles start uniform in [0, 2pi); gradients are central finite
/// differences; the update rule is Adam (beta1 = 0.9, beta2 = 0.999) at the
/// configured learning rate, and training stops when the cost change drops
/// below `tol` or at the epoch limit. Restarts run independently (in
/// parallel, each with a derived sub-seed) and the best-seen parameters win.
pub fn optimize_params(
    diag: &DiagonalCost,
    p: usize,
    cfg: &OptimizerConfig,
    seed: u64,
) -> Result<OptimizeResult> {
    if p < 1 {
        return Err(Error::InvalidParameter("p must be >= 1 for training".into()));
    }
    if cfg.restarts < 1 {
        return Err(Error::InvalidParameter("need at least one restart".into()));
    }
    let cost = |flat: &[f64]| -> f64 {
        let params = QaoaParams::from_flat(flat);
        let state = qaoa_state(diag, &params).expect("cap already checked by caller");
        expectation(&state, diag)
    };

    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    let runs: Vec<(f64, Vec<f64>, Vec<TracePoint>)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|restart| {
            let mut rng = seeded_rng(derive_seed(seed, Stream::QaoaInit, restart as u64));
            let mut flat: Vec<f64> = (0..2 * p)
                .map(|_| rng.gen::<f64>() * 2.0 * std::f64::consts::PI)
                .collect();
            let mut current = cost(&flat);
            let mut best = current;
            let mut best_flat = flat.clone();
            let mut trace = vec![TracePoint {
                epoch: 0,
                expectation: current,
            }];
            let mut m = vec![0.0; flat.len()];
            let mut v = vec![0.0; flat.len()];
            for epoch in 1..=cfg.max_epochs {
                let mut grad = vec![0.0; flat.len()];
                for (i, g) in grad.iter_mut().enumerate() {
                    let mut plus = flat.clone();
                    let mut minus = flat.clone();
                    plus[i] += cfg.fd_step;
                    minus[i] -= cfg.fd_step;
                    *g = (cost(&plus) - cost(&minus)) / (2.0 * cfg.fd_step);
                }
                let t = epoch as f64;
                for i in 0..flat.len() {
                    m[i] = BETA1 * m[i] + (1.0 - BETA1) * grad[i];
                    v[i] = BETA2 * v[i] + (1.0 - BETA2) * grad[i] * grad[i];
                    let m_hat = m[i] / (1.0 - BETA1.powf(t));
                    let v_hat = v[i] / (1.0 - BETA2.powf(t));
                    flat[i] -= cfg.learning_rate * m_hat / (v_hat.sqrt() + EPS);
                }
                let next = cost(&flat);
                trace.push(TracePoint {
                    epoch,
                    expectation: next,
                });
                if next < best {
                    best = next;
                    best_flat = flat.clone();
                }
                if (next - current).abs() < cfg.tol {
                    break;
                }
                current = next;
            }
            (best, best_flat, trace)
        })
        .collect();

    let (winner, _) = runs
        .iter()
        .enumerate()
        .min_by(|(ia, a), (ib, b)| a.0.total_cmp(&b.0).then(ia.cmp(ib)))
        .map(|(i, r)| (i, r.0))
        .expect("at least one restart");
    let (best, best_flat, trace) = &runs[winner];
    Ok(OptimizeResult {
        params: QaoaParams::from_flat(best_flat),
        expectation: *best,
        restart_index: winner,
        trace: trace.clone(),
    })
}

/// One histogram bin: an exact distinct squared-covolume value and its
/// sampled occurrence count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistBin {
    pub vol_sq: f64,
    pub occurrences: u64,
}

/// Seeded measurement report for one circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub shots: u64,
    /// Bitstring (qubit 0 first) -> occurrences.
    pub counts: BTreeMap<String, u64>,
    /// Sampled mean of the Hamiltonian in use (penalized if penalized).
    pub energy_mean: f64,
    /// Sampled mean of the unpenalized squared covolumes.
    pub vol_sq_mean: f64,
    /// Bins over exact distinct unpenalized vol^2 values.
    pub histogram: Vec<HistBin>,
    /// Bins over the penalized values, present only for penalized runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub penalized_histogram: Option<Vec<HistBin>>,
    /// (threshold, fraction of samples with vol^2 <= threshold), ascending.
    pub prob_below: Vec<(f64, f64)>,
    pub params: QaoaParams,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub penalty: Option<PenaltyScheme>,
}

impl RunReport {
    /// CSV with columns vol_sq,occurrences,probability.
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("vol_sq,occurrences,probability\n");
        for bin in &self.histogram {
            out.push_str(&format!(
                "{},{},{}\n",
                bin.vol_sq,
                bin.occurrences,
                bin.occurrences as f64 / self.shots as f64
            ));
        }
        out
    }

    pub fn prob_below_at(&self, threshold: f64) -> Option<f64> {
        self.prob_below
            .iter()
            .find(|(t, _)| *t == threshold)
            .map(|(_, p)| *p)
    }
}

/// Sample `shots` measurements from the circuit's distribution and bin them
/// by exact vol^2 value.
///
/// Thresholded probabilities always count unpenalized squared covolumes;
/// penalized runs additionally report the penalized-value histogram.
pub fn sample_report(
    diag: &DiagonalCost,
    params: &QaoaParams,
    shots: u64,
    thresholds: &[f64],
    seed: u64,
) -> Result<RunReport> {
    if shots < 1 {
        return Err(Error::InvalidParameter("shots must be >= 1".into()));
    }
    let state = qaoa_state(diag, params)?;
    let probs = state.probabilities();
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in &probs {
        acc += p;
        cdf.push(acc);
    }

    let mut rng = seeded_rng(derive_seed(seed, Stream::Sampling, 0));
    let mut state_counts: BTreeMap<u64, u64> = BTreeMap::new();
    for _ in 0..shots {
        let u: f64 = rng.gen();
        let mut idx = cdf.partition_point(|&c| c <= u);
        if idx >= probs.len() {
            idx = probs.len() - 1;
        }
        *state_counts.entry(idx as u64).or_insert(0) += 1;
    }

    let raw = diag.raw_values();
    let mut counts = BTreeMap::new();
    let mut energy_sum = 0.0;
    let mut vol_sum = 0.0;
    let mut raw_bins: BTreeMap<u64, (f64, u64)> = BTreeMap::new();
    let mut pen_bins: BTreeMap<u64, (f64, u64)> = BTreeMap::new();
    for (&z, &c) in &state_counts {
        counts.insert(bit_string(z, diag.n), c);
        energy_sum += diag.values[z as usize] * c as f64;
        vol_sum += raw[z as usize] * c as f64;
        let rv = raw[z as usize];
        let entry = raw_bins.entry(rv.to_bits()).or_insert((rv, 0));
        entry.1 += c;
        if diag.penalized() {
            let pv = diag.values[z as usize];
            let entry = pen_bins.entry(pv.to_bits()).or_insert((pv, 0));
            entry.1 += c;
        }
    }
    let histogram = sorted_bins(raw_bins);
    let penalized_histogram = if diag.penalized() {
        Some(sorted_bins(pen_bins))
    } else {
        None
    };

    let mut thresholds: Vec<f64> = thresholds.to_vec();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();
    let prob_below = thresholds
        .into_iter()
        .map(|t| {
            let below: u64 = state_counts
                .iter()
                .filter(|(&z, _)| raw[z as usize] <= t)
                .map(|(_, &c)| c)
                .sum();
            (t, below as f64 / shots as f64)
        })
        .collect();

    Ok(RunReport {
        shots,
        counts,
        energy_mean: energy_sum / shots as f64,
        vol_sq_mean: vol_sum / shots as f64,
        histogram,
        penalized_histogram,
        prob_below,
        params: params.clone(),
        seed,
        penalty: diag.penalty_params(),
    })
}

fn sorted_bins(bins: BTreeMap<u64, (f64, u64)>) -> Vec<HistBin> {
    let mut v: Vec<HistBin> = bins
        .into_values()
        .map(|(vol_sq, occurrences)| HistBin { vol_sq, occurrences })
        .collect();
    v.sort_by(|a, b| a.vol_sq.total_cmp(&b.vol_sq));
    v
}

/// Render a basis-state index with qubit 0 as the first character.
pub fn bit_string(z: u64, n: usize) -> String {
    (0..n)
        .map(|q| if (z >> q) & 1 == 1 { '1' } else { '0' })
        .collect()
}
