//! Classical search backends over the encoded box: exhaustive scan (the
//! oracle everything else is checked against), exact Grover amplitude
//! amplification, and the Groverized-search runtime estimator.

use num::{BigRational, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hamiltonian::{decode_coefficients, CostEvaluator, DiagonalCost, EncodingConfig};
use crate::lattice::GramMatrix;
use crate::rational::format_rational;
use crate::rng::seeded_rng;

/// Qubit cap for the exhaustive scan.
pub const BRUTE_FORCE_CAP: usize = 26;
/// Qubit cap for the amplitude-amplification simulator.
pub const GROVER_CAP: usize = 20;
/// At most this many optimal coefficient matrices are listed.
pub const SOLUTION_LIST_CAP: usize = 64;

/// Exhaustive-scan outcome: exact minimal nonzero squared covolume, the
/// optimal coefficient matrices in bitstring order (capped), and the exact
/// count M of optimal bitstrings.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub min_vol_sq: BigRational,
    pub solutions: Vec<Vec<Vec<i64>>>,
    pub m_count: u64,
    pub states_scanned: u64,
}

impl Serialize for SolveResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("SolveResult", 4)?;
        s.serialize_field("min_vol_sq", &format_rational(&self.min_vol_sq))?;
        s.serialize_field("solutions", &self.solutions)?;
        s.serialize_field("m_count", &self.m_count)?;
        s.serialize_field("states_scanned", &self.states_scanned)?;
        s.end()
    }
}

struct ChunkBest {
    min: BigRational,
    states: Vec<u64>,
    count: u64,
}

/// Scan all 2^n bitstrings for the smallest nonzero det(X G X^T).
///
/// The index range is split into independent chunks reduced by min-merge in
/// chunk order, so the listing stays lexicographic by bitstring.
pub fn brute_force_solve(g: &GramMatrix, cfg: &EncodingConfig) -> Result<SolveResult> {
    if cfg.n > BRUTE_FORCE_CAP {
        return Err(Error::QubitCap {
            qubits: cfg.n,
            cap: BRUTE_FORCE_CAP,
        });
    }
    if g.dim() != cfg.n_dim {
        return Err(Error::DimensionMismatch(
            "Gram matrix size does not match encoding".into(),
        ));
    }
    let states = cfg.states();
    let chunk_bits = cfg.n.min(14);
    let chunk_size = 1u64 << chunk_bits;
    let chunks = states.div_ceil(chunk_size);
    let evaluator = CostEvaluator::new(g, cfg)?;

    let partials: Vec<Option<ChunkBest>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * chunk_size;
            let end = (start + chunk_size).min(states);
            let mut best: Option<ChunkBest> = None;
            for z in start..end {
                let v = evaluator.eval(z).expect("checked dimensions");
                if v.is_zero() {
                    continue;
                }
                match &mut best {
                    Some(b) if v == b.min => {
                        b.count += 1;
                        if b.states.len() < SOLUTION_LIST_CAP {
                            b.states.push(z);
                        }
                    }
                    Some(b) if v < b.min => {
                        *b = ChunkBest {
                            min: v,
                            states: vec![z],
                            count: 1,
                        };
                    }
                    Some(_) => {}
                    None => {
                        best = Some(ChunkBest {
                            min: v,
                            states: vec![z],
                            count: 1,
                        });
                    }
                }
            }
            best
        })
        .collect();

    let mut merged: Option<ChunkBest> = None;
    for partial in partials.into_iter().flatten() {
        match &mut merged {
            None => merged = Some(partial),
            Some(m) if partial.min < m.min => merged = Some(partial),
            Some(m) if partial.min == m.min => {
                m.count += partial.count;
                for z in partial.states {
                    if m.states.len() < SOLUTION_LIST_CAP {
                        m.states.push(z);
                    }
                }
            }
            Some(_) => {}
        }
    }
    let best = merged.ok_or(Error::NoNontrivialSubLattice)?;
    let solutions = best
        .states
        .iter()
        .map(|&z| decode_coefficients(z, cfg).expect("state fits"))
        .collect();
    Ok(SolveResult {
        min_vol_sq: best.min,
        solutions,
        m_count: best.count,
        states_scanned: states,
    })
}

/// Outcome of one simulated amplitude-amplification run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroverOutcome {
    pub success_probability: f64,
    /// One measurement of the post-iteration state.
    pub sample: u64,
    pub iterations: usize,
    /// Number of marked states M.
    pub target_count: u64,
}

/// Exact Grover simulation against the threshold oracle
/// "0 < value <= threshold".
///
/// Uniform start, oracle phase flip on marked states, inversion about the
/// mean; `iterations` defaults to floor(pi/4 * sqrt(S/M)). Returns the exact
/// success probability plus one seeded measurement.
pub fn grover_simulate(
    diag: &DiagonalCost,
    threshold: f64,
    iterations: Option<usize>,
    seed: u64,
) -> Result<GroverOutcome> {
    if diag.n > GROVER_CAP {
        return Err(Error::QubitCap {
            qubits: diag.n,
            cap: GROVER_CAP,
        });
    }
    let marked: Vec<bool> = diag
        .values
        .iter()
        .map(|&v| v > 0.0 && v <= threshold)
        .collect();
    let m = marked.iter().filter(|&&b| b).count() as u64;
    if m == 0 {
        return Err(Error::EmptyTargetSet);
    }
    let s = diag.values.len() as u64;
    let iterations = iterations.unwrap_or_else(|| default_grover_iterations(s, m));

    // Amplitudes stay real throughout amplitude amplification.
    let mut amp = vec![1.0 / (s as f64).sqrt(); s as usize];
    for _ in 0..iterations {
        for (a, &is_marked) in amp.iter_mut().zip(&marked) {
            if is_marked {
                *a = -*a;
            }
        }
        let mean = amp.iter().sum::<f64>() / s as f64;
        for a in amp.iter_mut() {
            *a = 2.0 * mean - *a;
        }
    }
    let success_probability = amp
        .iter()
        .zip(&marked)
        .filter(|(_, &is_marked)| is_marked)
        .map(|(a, _)| a * a)
        .sum();

    let mut rng = seeded_rng(seed);
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut sample = s - 1;
    for (z, a) in amp.iter().enumerate() {
        acc += a * a;
        if u < acc {
            sample = z as u64;
            break;
        }
    }
    Ok(GroverOutcome {
        success_probability,
        sample,
        iterations,
        target_count: m,
    })
}

/// floor(pi/4 * sqrt(S/M)), the standard iteration count.
pub fn default_grover_iterations(states: u64, marked: u64) -> usize {
    (std::f64::consts::FRAC_PI_4 * (states as f64 / marked as f64).sqrt()).floor() as usize
}

/// Success probability after 0..=max_iterations Grover iterations, from one
/// incremental simulation pass.
pub fn grover_success_curve(
    diag: &DiagonalCost,
    threshold: f64,
    max_iterations: usize,
) -> Result<Vec<f64>> {
    if diag.n > GROVER_CAP {
        return Err(Error::QubitCap {
            qubits: diag.n,
            cap: GROVER_CAP,
        });
    }
    let marked: Vec<bool> = diag
        .values
        .iter()
        .map(|&v| v > 0.0 && v <= threshold)
        .collect();
    if !marked.iter().any(|&b| b) {
        return Err(Error::EmptyTargetSet);
    }
    let s = diag.values.len();
    let mut amp = vec![1.0 / (s as f64).sqrt(); s];
    let success = |amp: &[f64]| -> f64 {
        amp.iter()
            .zip(&marked)
            .filter(|(_, &m)| m)
            .map(|(a, _)| a * a)
            .sum()
    };
    let mut curve = Vec::with_capacity(max_iterations + 1);
    curve.push(success(&amp));
    for _ in 0..max_iterations {
        for (a, &is_marked) in amp.iter_mut().zip(&marked) {
            if is_marked {
                *a = -*a;
            }
        }
        let mean = amp.iter().sum::<f64>() / s as f64;
        for a in amp.iter_mut() {
            *a = 2.0 * mean - *a;
        }
        curve.push(success(&amp));
    }
    Ok(curve)
}

/// log2 of the Groverized exhaustive-search query count,
/// (5KN/2) log2 N - (1/2) log2 M.
pub fn grover_runtime_estimate(n_dim: usize, k: usize, m_count: u64) -> Result<f64> {
    if m_count < 1 {
        return Err(Error::InvalidParameter("m_count must be >= 1".into()));
    }
    let n = n_dim as f64;
    Ok((5.0 * k as f64 * n / 2.0) * n.log2() - 0.5 * (m_count as f64).log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::diagonal_vector;
    use crate::lattice::{gram, svp_enumerate, Basis};
    use num::BigInt;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn identity_gram(n: usize) -> GramMatrix {
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect();
        gram(&Basis::from_int_rows(&rows).unwrap())
    }

    #[test]
    fn example_basis_has_unit_minimum() {
        let b = Basis::from_int_rows(&[vec![1, -1, 0], vec![0, 1, -1], vec![0, 0, 1]]).unwrap();
        let cfg = EncodingConfig::new(2, 3, 1).unwrap();
        let result = brute_force_solve(&gram(&b), &cfg).unwrap();
        assert_eq!(result.min_vol_sq, rat(1));
        assert_eq!(result.states_scanned, 4096);
    }

    #[test]
    fn identity_instance_minimum_and_count() {
        let cfg = EncodingConfig::new(2, 3, 1).unwrap();
        let g = identity_gram(3);
        let result = brute_force_solve(&g, &cfg).unwrap();
        assert_eq!(result.min_vol_sq, rat(1));
        // M agrees with an independent scan of the diagonal table
        let diag = diagonal_vector(&g, &cfg).unwrap();
        let m = diag.values.iter().filter(|&&v| v == 1.0).count() as u64;
        assert_eq!(result.m_count, m);
        assert!(result.solutions.len() as u64 <= m.min(SOLUTION_LIST_CAP as u64));
        // every listed solution really evaluates to the minimum
        for x in &result.solutions {
            let det = x[0].iter().map(|&v| v * v).sum::<i64>()
                * x[1].iter().map(|&v| v * v).sum::<i64>()
                - x[0]
                    .iter()
                    .zip(&x[1])
                    .map(|(&a, &b)| a * b)
                    .sum::<i64>()
                    .pow(2);
            assert_eq!(det, 1);
        }
    }

    #[test]
    fn impossible_rank_is_reported() {
        let cfg = EncodingConfig::new(2, 1, 1).unwrap();
        let g = identity_gram(1);
        assert!(matches!(
            brute_force_solve(&g, &cfg),
            Err(Error::NoNontrivialSubLattice)
        ));
    }

    #[test]
    fn k1_minimum_matches_svp() {
        let b = Basis::from_int_rows(&[vec![2, 0], vec![1, 1]]).unwrap();
        let cfg = EncodingConfig::new(1, 2, 1).unwrap();
        let result = brute_force_solve(&gram(&b), &cfg).unwrap();
        let svp = svp_enumerate(&b).unwrap();
        assert_eq!(result.min_vol_sq, svp.norm_sq);
    }

    #[test]
    fn textbook_four_element_grover() {
        let diag = DiagonalCost::from_values(vec![0.0, 1.0, 0.0, 0.0], 2).unwrap();
        let out = grover_simulate(&diag, 1.0, None, 1).unwrap();
        assert_eq!(out.iterations, 1);
        assert!((out.success_probability - 1.0).abs() < 1e-12);
        assert_eq!(out.sample, 1);
    }

    #[test]
    fn all_marked_needs_no_iterations() {
        let diag = DiagonalCost::from_values(vec![1.0; 8], 3).unwrap();
        let out = grover_simulate(&diag, 1.0, None, 7).unwrap();
        assert_eq!(out.iterations, 0);
        assert!((out.success_probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_target_set_is_an_error() {
        let diag = DiagonalCost::from_values(vec![0.0; 4], 2).unwrap();
        assert!(matches!(
            grover_simulate(&diag, 1.0, None, 0),
            Err(Error::EmptyTargetSet)
        ));
    }

    #[test]
    fn closed_form_success_probability() {
        // success after j iterations is sin^2((2j+1) asin sqrt(M/S))
        for &(n, m) in &[(4usize, 1u64), (6, 3), (8, 10), (10, 17)] {
            let s = 1u64 << n;
            let mut values = vec![0.0; s as usize];
            for v in values.iter_mut().take(m as usize) {
                *v = 1.0;
            }
            let diag = DiagonalCost::from_values(values, n).unwrap();
            let theta = ((m as f64 / s as f64).sqrt()).asin();
            for j in 0..=default_grover_iterations(s, m) + 2 {
                let out = grover_simulate(&diag, 1.0, Some(j), 3).unwrap();
                let expected = ((2 * j + 1) as f64 * theta).sin().powi(2);
                assert!(
                    (out.success_probability - expected).abs() < 1e-10,
                    "n={n} m={m} j={j}"
                );
            }
        }
    }

    #[test]
    fn runtime_estimate_examples() {
        let e = grover_runtime_estimate(3, 2, 1).unwrap();
        assert!((e - 15.0 * 3.0f64.log2()).abs() < 1e-12);
        let e4 = grover_runtime_estimate(3, 2, 4).unwrap();
        assert!((e - e4 - 1.0).abs() < 1e-12);
        // everything a solution: search is free (N = 4 keeps 5KN log2 N integral)
        let free = grover_runtime_estimate(4, 1, 1u64 << 40).unwrap();
        assert_eq!(free, 0.0);
        assert!(grover_runtime_estimate(3, 2, 0).is_err());
    }

    #[test]
    fn solve_result_serializes_min_as_exact_string() {
        let cfg = EncodingConfig::new(2, 3, 1).unwrap();
        let result = brute_force_solve(&identity_gram(3), &cfg).unwrap();
        let json = serde_json::to_value(&result).unwrap();
        assert_eq!(json["min_vol_sq"], "1");
    }
}
