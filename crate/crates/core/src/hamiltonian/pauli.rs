//! Symbolic Z-monomial expansion of the covolume cost.
//!
//! The Leibniz determinant over S_K is expanded with the qudit operators
//! Q = -1/2 - sum_w 2^{w-1} Z_w substituted for the integer coefficients.
//! Collection uses Z^2 = I (symmetric difference of index sets) and exact
//! rational coefficients; only the final table is rounded to f64, so
//! cancellations are exact and the stored polynomial has no zero terms.

use std::collections::BTreeMap;

use itertools::Itertools;
use num::{BigInt, BigRational, One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::encoding::EncodingConfig;
use crate::lattice::GramMatrix;
use crate::rational::rational_to_f64;

/// Multiset of Z-monomials with real coefficients; the empty set is the
/// identity. Monomials are sorted qubit-index sets, so every monomial on a
/// diagonal cost has weight at most 2K.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliPolynomial {
    terms: BTreeMap<Vec<u32>, f64>,
    n: usize,
}

#[derive(Serialize, Deserialize)]
struct TermWire {
    z: Vec<u32>,
    c: f64,
}

impl PauliPolynomial {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.terms.iter().map(|(k, &v)| (k.as_slice(), v))
    }

    pub fn coefficient(&self, monomial: &[u32]) -> f64 {
        self.terms.get(monomial).copied().unwrap_or(0.0)
    }

    /// Eigenvalue on a computational basis state: each Z contributes +1 for
    /// bit 0 and -1 for bit 1.
    pub fn eigenvalue(&self, z: u64) -> f64 {
        let mut acc = 0.0;
        for (monomial, c) in &self.terms {
            let mut mask = 0u64;
            for &q in monomial {
                mask |= 1 << q;
            }
            let parity = (z & mask).count_ones() & 1;
            acc += if parity == 1 { -c } else { *c };
        }
        acc
    }

    /// Evaluate on every basis state (the slow-but-independent route used to
    /// cross-check the direct diagonal).
    pub fn to_diagonal(&self) -> Vec<f64> {
        let masks: Vec<(u64, f64)> = self
            .terms
            .iter()
            .map(|(monomial, &c)| {
                let mut mask = 0u64;
                for &q in monomial {
                    mask |= 1 << q;
                }
                (mask, c)
            })
            .collect();
        (0..1u64 << self.n)
            .map(|z| {
                let mut acc = 0.0;
                for &(mask, c) in &masks {
                    let parity = (z & mask).count_ones() & 1;
                    acc += if parity == 1 { -c } else { c };
                }
                acc
            })
            .collect()
    }

    /// One JSON object per line: {"z": [indices], "c": coefficient}.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for (z, &c) in &self.terms {
            let wire = TermWire { z: z.clone(), c };
            out.push_str(&serde_json::to_string(&wire).expect("term serializes"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str, n: usize) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let wire: TermWire = serde_json::from_str(line)
                .map_err(|e| Error::Parse(format!("bad polynomial line: {e}")))?;
            if wire.z.iter().any(|&q| q as usize >= n) {
                return Err(Error::Parse("qubit index out of range".into()));
            }
            terms.insert(wire.z, wire.c);
        }
        Ok(PauliPolynomial { terms, n })
    }
}

pub(crate) type ExactPoly = BTreeMap<Vec<u32>, BigRational>;

/// The qudit operator Q = -1/2 - sum_w 2^{w-1} Z_{w} on one grid column.
pub(crate) fn qudit_operator(cfg: &EncodingConfig, vector: usize, coordinate: usize) -> ExactPoly {
    let mut poly = ExactPoly::new();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    poly.insert(Vec::new(), -half.clone());
    for w in 0..=cfg.m {
        let q = cfg.qubit(vector, coordinate, w) as u32;
        // 2^{w-1} = 2^w / 2
        let coeff = -BigRational::new(BigInt::from(1i64 << w), BigInt::from(2));
        poly.insert(vec![q], coeff);
    }
    poly
}

pub(crate) fn add_scaled(acc: &mut ExactPoly, poly: &ExactPoly, scale: &BigRational) {
    if scale.is_zero() {
        return;
    }
    for (monomial, c) in poly {
        let entry = acc.entry(monomial.clone()).or_insert_with(BigRational::zero);
        *entry += c * scale;
    }
}

pub(crate) fn mul_polys(a: &ExactPoly, b: &ExactPoly) -> ExactPoly {
    let mut out = ExactPoly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let monomial = symmetric_difference(ma, mb);
            let entry = out.entry(monomial).or_insert_with(BigRational::zero);
            *entry += ca * cb;
        }
    }
    out
}

fn symmetric_difference(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn permutation_sign(perm: &[usize]) -> i32 {
    let mut inversions = 0;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

pub(crate) fn finalize(exact: ExactPoly, n: usize) -> PauliPolynomial {
    let terms = exact
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(m, c)| (m, rational_to_f64(&c)))
        .collect();
    PauliPolynomial { terms, n }
}

/// Expand sum_{tau in S_K} sgn(tau) prod_i (sum_{a,b} Q^(i)_a Q^(tau(i))_b
/// G_ab) into collected Z-monomials. Symbolic expansion is refused above
/// K = 4 (factorial growth); the diagonal route stays available there.
pub fn build_pauli_cost(g: &GramMatrix, cfg: &EncodingConfig) -> Result<PauliPolynomial> {
    if cfg.k > 4 {
        return Err(Error::SymbolicKTooLarge(cfg.k));
    }
    if g.dim() != cfg.n_dim {
        return Err(Error::DimensionMismatch(
            "Gram matrix size does not match encoding".into(),
        ));
    }
    let qudits: Vec<Vec<ExactPoly>> = (0..cfg.k)
        .map(|i| (0..cfg.n_dim).map(|a| qudit_operator(cfg, i, a)).collect())
        .collect();

    // pair_ops[i][j] = sum_{a,b} Q^(i)_a Q^(j)_b G_ab  (the <v_i, v_j> operator)
    let mut pair_ops = vec![vec![ExactPoly::new(); cfg.k]; cfg.k];
    for i in 0..cfg.k {
        for j in 0..cfg.k {
            let mut acc = ExactPoly::new();
            for a in 0..cfg.n_dim {
                for b in 0..cfg.n_dim {
                    let g_ab = &g.entries()[a][b];
                    if g_ab.is_zero() {
                        continue;
                    }
                    let prod = mul_polys(&qudits[i][a], &qudits[j][b]);
                    add_scaled(&mut acc, &prod, g_ab);
                }
            }
            pair_ops[i][j] = acc;
        }
    }

    let mut total = ExactPoly::new();
    for perm in (0..cfg.k).permutations(cfg.k) {
        let sign = permutation_sign(&perm);
        let mut product = pair_ops[0][perm[0]].clone();
        for (i, &target) in perm.iter().enumerate().skip(1) {
            product = mul_polys(&product, &pair_ops[i][target]);
        }
        let scale = BigRational::from_integer(BigInt::from(sign));
        add_scaled(&mut total, &product, &scale);
    }
    Ok(finalize(total, cfg.n))
}

/// One-layer gate totals for a diagonal cost polynomial plus the mixer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCount {
    pub one_qubit: usize,
    pub two_qubit: usize,
}

/// Ladder decomposition per QAOA layer: a weight-w Z-monomial costs one
/// rotation plus 2(w-1) entangling gates; identity terms cost nothing; the
/// transverse mixer adds one rotation per qubit.
pub fn count_gates(poly: &PauliPolynomial) -> GateCount {
    let mut one_qubit = poly.n;
    let mut two_qubit = 0;
    for (monomial, _) in poly.terms() {
        let w = monomial.len();
        if w == 0 {
            continue;
        }
        one_qubit += 1;
        if w >= 2 {
            two_qubit += 2 * (w - 1);
        }
    }
    GateCount {
        one_qubit,
        two_qubit,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::encoding::{diagonal_vector, eval_cost_direct};
    use crate::lattice::{gram, Basis};

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn identity_gram(n: usize) -> GramMatrix {
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect();
        gram(&Basis::from_int_rows(&rows).unwrap())
    }

    fn random_like_gram() -> GramMatrix {
        gram(&Basis::from_int_rows(&[vec![2, 1], vec![-1, 3]]).unwrap())
    }

    #[test]
    fn two_vectors_in_one_dimension_cancel() {
        let g = identity_gram(1);
        let cfg = EncodingConfig::new(2, 1, 1).unwrap();
        let poly = build_pauli_cost(&g, &cfg).unwrap();
        assert_eq!(poly.num_terms(), 0);
    }

    #[test]
    fn k1_diagonal_is_the_quadratic_form() {
        let g = random_like_gram();
        let cfg = EncodingConfig::new(1, 2, 1).unwrap();
        let poly = build_pauli_cost(&g, &cfg).unwrap();
        let diag = poly.to_diagonal();
        for z in 0..cfg.states() {
            let expected = eval_cost_direct(z, &g, &cfg).unwrap();
            assert!((diag[z as usize] - rational_to_f64(&expected)).abs() < 1e-9);
        }
    }

    #[test]
    fn k2_identity_matches_direct_diagonal_exhaustively() {
        let g = identity_gram(3);
        let cfg = EncodingConfig::new(2, 3, 1).unwrap();
        let poly = build_pauli_cost(&g, &cfg).unwrap();
        let direct = diagonal_vector(&g, &cfg).unwrap();
        let symbolic = poly.to_diagonal();
        for (a, b) in symbolic.iter().zip(&direct.values) {
            let scale = 1.0f64.max(b.abs());
            assert!((a - b).abs() <= 1e-9 * scale);
        }
    }

    /// Direct four-index expansion of the K = 2 cost,
    /// sum_{ijkl} (G_ij G_kl - G_ik G_jl) Qx_i Qx_j Qy_k Qy_l,
    /// used as a regression fixture against the Leibniz engine.
    fn k2_closed_form(g: &GramMatrix, cfg: &EncodingConfig) -> ExactPoly {
        let n = cfg.n_dim;
        let e = g.entries();
        let mut total = ExactPoly::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let coeff = &e[i][j] * &e[k][l] - &e[i][k] * &e[j][l];
                        if coeff.is_zero() {
                            continue;
                        }
                        let prod = mul_polys(
                            &mul_polys(&qudit_operator(cfg, 0, i), &qudit_operator(cfg, 0, j)),
                            &mul_polys(&qudit_operator(cfg, 1, k), &qudit_operator(cfg, 1, l)),
                        );
                        add_scaled(&mut total, &prod, &coeff);
                    }
                }
            }
        }
        total
    }

    #[test]
    fn k2_engine_reproduces_closed_form() {
        let g = random_like_gram();
        let cfg = EncodingConfig::new(2, 2, 1).unwrap();
        let engine = build_pauli_cost(&g, &cfg).unwrap();
        let fixture = finalize(k2_closed_form(&g, &cfg), cfg.n);
        assert_eq!(engine.num_terms(), fixture.num_terms());
        for (monomial, c) in engine.terms() {
            assert!(
                (c - fixture.coefficient(monomial)).abs() < 1e-12,
                "mismatch on {monomial:?}"
            );
        }
    }

    /// Six-index K = 3 expansion with the explicit permutation products,
    /// term for term.
    fn k3_closed_form(g: &GramMatrix, cfg: &EncodingConfig) -> ExactPoly {
        let nd = cfg.n_dim;
        let e = g.entries();
        let mut total = ExactPoly::new();
        for i in 0..nd {
            for j in 0..nd {
                for k in 0..nd {
                    for l in 0..nd {
                        for m in 0..nd {
                            for n in 0..nd {
                                let coeff = &e[i][j] * &e[k][l] * &e[m][n]
                                    + &e[i][k] * &e[l][m] * &e[n][j]
                                    + &e[i][m] * &e[k][j] * &e[n][l]
                                    - &e[i][m] * &e[k][l] * &e[n][j]
                                    - &e[i][k] * &e[l][j] * &e[m][n]
                                    - &e[i][j] * &e[k][m] * &e[n][l];
                                if coeff.is_zero() {
                                    continue;
                                }
                                let xx = mul_polys(
                                    &qudit_operator(cfg, 0, i),
                                    &qudit_operator(cfg, 0, j),
                                );
                                let yy = mul_polys(
                                    &qudit_operator(cfg, 1, k),
                                    &qudit_operator(cfg, 1, l),
                                );
                                let zz = mul_polys(
                                    &qudit_operator(cfg, 2, m),
                                    &qudit_operator(cfg, 2, n),
                                );
                                let prod = mul_polys(&mul_polys(&xx, &yy), &zz);
                                add_scaled(&mut total, &prod, &coeff);
                            }
                        }
                    }
                }
            }
        }
        total
    }

    #[test]
    fn k3_engine_matches_permutation_expansion_term_for_term() {
        let g = random_like_gram();
        let cfg = EncodingConfig::new(3, 2, 1).unwrap();
        let engine = build_pauli_cost(&g, &cfg).unwrap();
        let fixture = finalize(k3_closed_form(&g, &cfg), cfg.n);
        assert_eq!(engine.num_terms(), fixture.num_terms());
        for (monomial, c) in engine.terms() {
            let f = fixture.coefficient(monomial);
            assert!((c - f).abs() < 1e-9 * (1.0 + f.abs()), "mismatch on {monomial:?}");
        }
    }

    #[test]
    fn locality_is_at_most_2k() {
        let g = identity_gram(3);
        let cfg = EncodingConfig::new(2, 3, 1).unwrap();
        let poly = build_pauli_cost(&g, &cfg).unwrap();
        assert!(poly.terms().all(|(m, _)| m.len() <= 2 * cfg.k));
    }

    #[test]
    fn symbolic_expansion_refused_above_k4() {
        let g = identity_gram(2);
        let cfg = EncodingConfig::new(5, 2, 0).unwrap();
        assert!(matches!(
            build_pauli_cost(&g, &cfg),
            Err(Error::SymbolicKTooLarge(5))
        ));
    }

    #[test]
    fn gate_counts_follow_ladder_decomposition() {
        let single = PauliPolynomial {
            terms: [(vec![0u32], 1.0)].into_iter().collect(),
            n: 4,
        };
        let gc = count_gates(&single);
        assert_eq!(gc.one_qubit, 1 + 4);
        assert_eq!(gc.two_qubit, 0);

        let weight4 = PauliPolynomial {
            terms: [(vec![0u32, 1, 2, 3], 0.5)].into_iter().collect(),
            n: 4,
        };
        let gc = count_gates(&weight4);
        assert_eq!(gc.two_qubit, 6);

        let with_identity = PauliPolynomial {
            terms: [(vec![], 3.0), (vec![1u32, 2], 1.0)].into_iter().collect(),
            n: 3,
        };
        let gc = count_gates(&with_identity);
        assert_eq!(gc.one_qubit, 1 + 3);
        assert_eq!(gc.two_qubit, 2);
    }

    #[test]
    fn jsonl_round_trip() {
        let g = identity_gram(2);
        let cfg = EncodingConfig::new(2, 2, 1).unwrap();
        let poly = build_pauli_cost(&g, &cfg).unwrap();
        let text = poly.to_jsonl();
        let back = PauliPolynomial::from_jsonl(&text, cfg.n).unwrap();
        assert_eq!(back, poly);
    }
}
