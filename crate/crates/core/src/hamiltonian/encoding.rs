//! Qubit grid encoding and direct diagonal evaluation.
//!
//! Each of the K solution vectors gets an N-column grid of qudits; each
//! qudit is m+1 qubits encoding an integer in [-2^m, 2^m - 1] via
//! x = sum_w 2^w b_w - 2^m. Bit convention: |0> has Z-eigenvalue +1 and
//! O-value 0, so the bit itself is the O-value. Basis states are indexed
//! little-endian by qubit index.

use num::{BigInt, BigRational, One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::GramMatrix;
use crate::rational::rational_to_f64;

/// Default cap on diagonal/statevector tables (2^24 entries).
pub const DEFAULT_STATEVECTOR_CAP: usize = 24;

/// Cap actually in force: `KDSP_STATEVECTOR_CAP` when set (read once),
/// otherwise the default. Only gates table sizes; never affects values.
pub fn effective_statevector_cap() -> usize {
    static CAP: std::sync::OnceLock<usize> = std::sync::OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("KDSP_STATEVECTOR_CAP")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(DEFAULT_STATEVECTOR_CAP)
    })
}

/// Fixed bijection between (vector i, coordinate alpha, bit w) and qubit
/// indices: qubit = i*N*(m+1) + alpha*(m+1) + w.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingConfig {
    pub k: usize,
    pub n_dim: usize,
    pub m: u32,
    /// Total qubits, k * n_dim * (m + 1).
    pub n: usize,
}

impl EncodingConfig {
    pub fn new(k: usize, n_dim: usize, m: u32) -> Result<Self> {
        if k == 0 || n_dim == 0 {
            return Err(Error::InvalidParameter(
                "encoding needs k >= 1 and n_dim >= 1".into(),
            ));
        }
        if m >= 30 {
            return Err(Error::InvalidParameter(format!(
                "m = {m} is far beyond desk scale"
            )));
        }
        let n = k * n_dim * (m as usize + 1);
        if n > 63 {
            return Err(Error::QubitCap { qubits: n, cap: 63 });
        }
        Ok(EncodingConfig { k, n_dim, m, n })
    }

    /// Qubit index of bit w of coordinate alpha of vector i.
    pub fn qubit(&self, vector: usize, coordinate: usize, bit: u32) -> usize {
        debug_assert!(vector < self.k && coordinate < self.n_dim && bit <= self.m);
        vector * self.n_dim * (self.m as usize + 1)
            + coordinate * (self.m as usize + 1)
            + bit as usize
    }

    /// Number of basis states, 2^n.
    pub fn states(&self) -> u64 {
        1u64 << self.n
    }
}

/// Decode a basis-state index into the K x N integer coefficient matrix.
pub fn decode_coefficients(bits: u64, cfg: &EncodingConfig) -> Result<Vec<Vec<i64>>> {
    if bits >> cfg.n != 0 {
        return Err(Error::DimensionMismatch(format!(
            "bitstring {bits:#x} does not fit in {} qubits",
            cfg.n
        )));
    }
    let shift = 1i64 << cfg.m;
    let mut x = vec![vec![0i64; cfg.n_dim]; cfg.k];
    for (i, row) in x.iter_mut().enumerate() {
        for (alpha, entry) in row.iter_mut().enumerate() {
            let mut value = -shift;
            for w in 0..=cfg.m {
                let q = cfg.qubit(i, alpha, w);
                if (bits >> q) & 1 == 1 {
                    value += 1i64 << w;
                }
            }
            *entry = value;
        }
    }
    Ok(x)
}

/// det(X G X^T) for the decoded X, exactly.
///
/// The Gram matrix is cleared of denominators and the determinant taken by
/// fraction-free (Bareiss) elimination over integers, then rescaled.
pub fn eval_cost_direct(bits: u64, g: &GramMatrix, cfg: &EncodingConfig) -> Result<BigRational> {
    CostEvaluator::new(g, cfg)?.eval(bits)
}

/// Reusable exact evaluator: denominators cleared once, and when the
/// Hadamard-style bound guarantees no overflow the whole determinant runs
/// in i128 instead of big integers.
pub(crate) struct CostEvaluator {
    cfg: EncodingConfig,
    g_int: Vec<Vec<BigInt>>,
    denom_pow_k: BigInt,
    g_fast: Option<Vec<Vec<i128>>>,
}

impl CostEvaluator {
    pub fn new(g: &GramMatrix, cfg: &EncodingConfig) -> Result<Self> {
        if g.dim() != cfg.n_dim {
            return Err(Error::DimensionMismatch(format!(
                "Gram matrix is {}x{} but encoding has n_dim = {}",
                g.dim(),
                g.dim(),
                cfg.n_dim
            )));
        }
        let (g_int, denom) = clear_denominators(g);
        let denom_pow_k = num::pow::pow(denom, cfg.k);
        let g_fast = fast_gram(&g_int, cfg);
        Ok(CostEvaluator {
            cfg: *cfg,
            g_int,
            denom_pow_k,
            g_fast,
        })
    }

    pub fn eval(&self, bits: u64) -> Result<BigRational> {
        let x = decode_coefficients(bits, &self.cfg)?;
        let det = match &self.g_fast {
            Some(gf) => BigInt::from(det_i128(&x, gf)),
            None => bareiss_determinant(small_gram(&x, &self.g_int)),
        };
        Ok(BigRational::new(det, self.denom_pow_k.clone()))
    }
}

/// i128 copy of the cleared Gram matrix, provided every Bareiss
/// intermediate provably fits (minors are bounded by (k * h_max)^k with
/// h_max the largest possible entry of X G X^T).
fn fast_gram(g_int: &[Vec<BigInt>], cfg: &EncodingConfig) -> Option<Vec<Vec<i128>>> {
    use num::ToPrimitive;
    let mut out = Vec::with_capacity(g_int.len());
    let mut g_max: f64 = 1.0;
    for row in g_int {
        let mut r = Vec::with_capacity(row.len());
        for v in row {
            let x = v.to_i128()?;
            g_max = g_max.max((x.abs() as f64).max(1.0));
            r.push(x);
        }
        out.push(r);
    }
    let n = cfg.n_dim as f64;
    let box_max = (1i64 << cfg.m) as f64;
    let h_max = n * n * box_max * box_max * g_max;
    let k = cfg.k as f64;
    if k * (k * h_max).log2() <= 120.0 {
        Some(out)
    } else {
        None
    }
}

fn det_i128(x: &[Vec<i64>], g: &[Vec<i128>]) -> i128 {
    let k = x.len();
    let n = g.len();
    let mut h = vec![0i128; k * k];
    let mut t = vec![0i128; n];
    for i in 0..k {
        for (b, tb) in t.iter_mut().enumerate() {
            let mut acc = 0i128;
            for a in 0..n {
                let c = x[i][a];
                if c != 0 {
                    acc += c as i128 * g[a][b];
                }
            }
            *tb = acc;
        }
        for j in 0..k {
            let mut acc = 0i128;
            for (b, tb) in t.iter().enumerate() {
                let c = x[j][b];
                if c != 0 {
                    acc += tb * c as i128;
                }
            }
            h[i * k + j] = acc;
        }
    }
    bareiss_i128(&mut h, k)
}

fn bareiss_i128(m: &mut [i128], n: usize) -> i128 {
    if n == 0 {
        return 1;
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for col in 0..n - 1 {
        if m[col * n + col] == 0 {
            let Some(p) = (col + 1..n).find(|&r| m[r * n + col] != 0) else {
                return 0;
            };
            for c in 0..n {
                m.swap(col * n + c, p * n + c);
            }
            sign = -sign;
        }
        for r in col + 1..n {
            for c in col + 1..n {
                m[r * n + c] =
                    (m[r * n + c] * m[col * n + col] - m[r * n + col] * m[col * n + c]) / prev;
            }
            m[r * n + col] = 0;
        }
        prev = m[col * n + col];
    }
    sign * m[(n - 1) * n + (n - 1)]
}

fn clear_denominators(g: &GramMatrix) -> (Vec<Vec<BigInt>>, BigInt) {
    let mut denom = BigInt::one();
    for row in g.entries() {
        for x in row {
            denom = num::integer::lcm(denom, x.denom().clone());
        }
    }
    let scaled = g
        .entries()
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| x.numer() * (&denom / x.denom()))
                .collect()
        })
        .collect();
    (scaled, denom)
}

/// X G X^T over integers for integer X and G.
fn small_gram(x: &[Vec<i64>], g: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let k = x.len();
    let n = g.len();
    // t = X G  (k x n)
    let mut t = vec![vec![BigInt::zero(); n]; k];
    for i in 0..k {
        for b in 0..n {
            let mut acc = BigInt::zero();
            for a in 0..n {
                if x[i][a] != 0 {
                    acc += BigInt::from(x[i][a]) * &g[a][b];
                }
            }
            t[i][b] = acc;
        }
    }
    let mut h = vec![vec![BigInt::zero(); k]; k];
    for i in 0..k {
        for j in 0..k {
            let mut acc = BigInt::zero();
            for b in 0..n {
                if x[j][b] != 0 {
                    acc += &t[i][b] * BigInt::from(x[j][b]);
                }
            }
            h[i][j] = acc;
        }
    }
    h
}

/// Fraction-free determinant (Bareiss) of a small integer matrix.
fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = 1i64;
    let mut prev = BigInt::one();
    for col in 0..n - 1 {
        if m[col][col].is_zero() {
            let Some(p) = (col + 1..n).find(|&r| !m[r][col].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(col, p);
            sign = -sign;
        }
        for r in col + 1..n {
            for c in col + 1..n {
                let v = (&m[r][c] * &m[col][col] - &m[r][col] * &m[col][c]) / &prev;
                m[r][c] = v;
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[col][col].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Ground-state penalization scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum PenaltyScheme {
    /// v -> v + r * exp(-s v); trivial (v = 0) states move up to exactly r.
    Exp { r: f64, s: f64 },
    /// v -> (v - e)^2.
    Quadratic { e: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct PenaltyInfo {
    pub scheme: PenaltyScheme,
    /// Unpenalized squared covolumes, kept so reports can bin both views.
    pub raw_values: Vec<f64>,
}

/// Length-2^n table of squared covolumes (optionally penalized), indexed by
/// basis-state integer, little-endian by qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalCost {
    pub values: Vec<f64>,
    pub n: usize,
    pub(crate) penalty: Option<PenaltyInfo>,
}

/// JSON sidecar written next to the binary diagonal export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalSidecar {
    pub n: usize,
    pub penalized: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<PenaltyScheme>,
}

impl DiagonalCost {
    /// Wrap a raw table (used by tests and file import).
    pub fn from_values(values: Vec<f64>, n: usize) -> Result<Self> {
        if values.len() != 1usize << n {
            return Err(Error::DimensionMismatch(format!(
                "table length {} is not 2^{n}",
                values.len()
            )));
        }
        Ok(DiagonalCost {
            values,
            n,
            penalty: None,
        })
    }

    pub fn penalized(&self) -> bool {
        self.penalty.is_some()
    }

    pub fn penalty_params(&self) -> Option<PenaltyScheme> {
        self.penalty.as_ref().map(|p| p.scheme)
    }

    /// Unpenalized squared covolumes (identical to `values` when no
    /// penalization was applied).
    pub fn raw_values(&self) -> &[f64] {
        match &self.penalty {
            Some(p) => &p.raw_values,
            None => &self.values,
        }
    }

    /// Smallest strictly positive table value, if any.
    pub fn min_nonzero(&self) -> Option<f64> {
        self.values
            .iter()
            .copied()
            .filter(|v| *v > 0.0)
            .min_by(|a, b| a.total_cmp(b))
    }

    /// Exact arithmetic mean of the table.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Little-endian f64 dump of `values`.
    pub fn to_binary(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.values.len() * 8);
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn sidecar(&self) -> DiagonalSidecar {
        DiagonalSidecar {
            n: self.n,
            penalized: self.penalized(),
            params: self.penalty_params(),
        }
    }
}

/// Evaluate the full diagonal with the effective cap.
pub fn diagonal_vector(g: &GramMatrix, cfg: &EncodingConfig) -> Result<DiagonalCost> {
    diagonal_vector_with_cap(g, cfg, effective_statevector_cap())
}

/// Evaluate every basis state's squared covolume. Values are pure functions
/// of the index, so the table is filled in parallel chunks.
pub fn diagonal_vector_with_cap(
    g: &GramMatrix,
    cfg: &EncodingConfig,
    cap: usize,
) -> Result<DiagonalCost> {
    if cfg.n > cap {
        return Err(Error::QubitCap {
            qubits: cfg.n,
            cap,
        });
    }
    if g.dim() != cfg.n_dim {
        return Err(Error::DimensionMismatch(
            "Gram matrix size does not match encoding".into(),
        ));
    }
    let states = cfg.states();
    let evaluator = CostEvaluator::new(g, cfg)?;
    let values: Vec<f64> = (0..states)
        .into_par_iter()
        .map(|z| {
            let v = evaluator.eval(z).expect("checked dimensions");
            rational_to_f64(&v)
        })
        .collect();
    Ok(DiagonalCost {
        values,
        n: cfg.n,
        penalty: None,
    })
}

/// Apply a ground-state penalization scheme to a diagonal.
pub fn penalize(diag: &DiagonalCost, scheme: PenaltyScheme) -> Result<DiagonalCost> {
    let raw = diag.raw_values().to_vec();
    let values: Vec<f64> = match scheme {
        PenaltyScheme::Exp { r, s } => {
            if r <= 0.0 || s <= 0.0 {
                return Err(Error::InvalidParameter(
                    "exp penalty needs r > 0 and s > 0".into(),
                ));
            }
            raw.iter().map(|&v| v + r * (-s * v).exp()).collect()
        }
        PenaltyScheme::Quadratic { e } => {
            if e <= 0.0 {
                return Err(Error::InvalidParameter("quadratic penalty needs E > 0".into()));
            }
            raw.iter().map(|&v| (v - e) * (v - e)).collect()
        }
    };
    Ok(DiagonalCost {
        values,
        n: diag.n,
        penalty: Some(PenaltyInfo {
            scheme,
            raw_values: raw,
        }),
    })
}
