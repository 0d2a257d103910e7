//! Exact lattice linear algebra.
//!
//! Bases carry arbitrary-precision rational entries; Gram matrices,
//! Gram-Schmidt data, LLL reduction, gap detection, SVP enumeration, and
//! HKZ/dual-HKZ reduction are all computed with exact comparisons. Floats
//! never enter this module.

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{
    determinant, dot, format_rational, parse_rational, round_nearest, solve_linear, sub_scaled,
};

/// Default dimension cap for SVP enumeration and HKZ reduction.
pub const DEFAULT_ENUMERATION_CAP: usize = 12;

/// Default LLL quality parameter. At delta = 1 the quality factor
/// alpha = 1/(delta - 1/4) is exactly 4/3.
pub fn default_delta() -> BigRational {
    BigRational::one()
}

/// Quality factor alpha = 1/(delta - 1/4) appearing in every LLL-derived
/// bound, exact.
pub fn alpha_from_delta(delta: &BigRational) -> BigRational {
    let quarter = BigRational::new(BigInt::one(), BigInt::from(4));
    (delta - quarter).recip()
}

/// Ordered basis of a lattice: N linearly independent rational row vectors
/// in d-dimensional ambient space, N <= d.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    rows: Vec<Vec<BigRational>>,
}

/// Gram matrix G_ij = <b_i, b_j> of a basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GramMatrix {
    entries: Vec<Vec<BigRational>>,
}

/// Gram-Schmidt data: squared star norms and the mu coefficient matrix
/// (mu_ij = <b_i, b_j*> / <b_j*, b_j*>; lower triangular with unit diagonal).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GsoData {
    pub star_norms_sq: Vec<BigRational>,
    pub mu: Vec<Vec<BigRational>>,
}

/// Outcome of the gap scan over Gram-Schmidt norms.
///
/// `gap_index = Some(r)` (1-based, r in [1, N-1]) means the first r star
/// norms all lie strictly below the remaining ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapReport {
    pub gap_index: Option<usize>,
    pub prefix_max_sq: Option<BigRational>,
    pub suffix_min_sq: Option<BigRational>,
}

/// Shortest-vector enumeration result: integer coefficients, the lattice
/// vector itself, and its exact squared norm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SvpResult {
    pub coefficients: Vec<BigInt>,
    pub vector: Vec<BigRational>,
    pub norm_sq: BigRational,
}

impl Basis {
    /// Validate and wrap rows. Errors when rows are empty, ragged, more
    /// numerous than the ambient dimension, or linearly dependent.
    pub fn new(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::NotABasis("no rows".into()));
        }
        let d = rows[0].len();
        if d == 0 {
            return Err(Error::NotABasis("zero ambient dimension".into()));
        }
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::NotABasis("ragged rows".into()));
        }
        if rows.len() > d {
            return Err(Error::NotABasis(format!(
                "{} rows exceed ambient dimension {}",
                rows.len(),
                d
            )));
        }
        let basis = Basis { rows };
        gso_full(&basis.rows)?;
        Ok(basis)
    }

    /// Convenience constructor from machine integers.
    pub fn from_int_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|&x| BigRational::from_integer(BigInt::from(x)))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn rows(&self) -> &[Vec<BigRational>] {
        &self.rows
    }

    /// Number of basis vectors N.
    pub fn num_vectors(&self) -> usize {
        self.rows.len()
    }

    /// Ambient dimension d.
    pub fn ambient_dim(&self) -> usize {
        self.rows[0].len()
    }

    /// Parse the text form: one row per line, whitespace-separated entries,
    /// each an integer or `p/q`. Blank lines and `#` comments are skipped.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row: Result<Vec<BigRational>> =
                line.split_whitespace().map(parse_rational).collect();
            rows.push(row?);
        }
        if rows.is_empty() {
            return Err(Error::Parse("no rows in basis text".into()));
        }
        Self::new(rows)
    }

    /// The inverse of [`Basis::parse_text`]; round-trips exactly.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(format_rational).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct BasisWire {
    rows: Vec<Vec<EntryWire>>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum EntryWire {
    Int(i64),
    Str(String),
}

impl Serialize for Basis {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let wire = BasisWire {
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|x| EntryWire::Str(format_rational(x))).collect())
                .collect(),
        };
        wire.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Basis {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = BasisWire::deserialize(deserializer)?;
        let rows: std::result::Result<Vec<Vec<BigRational>>, D::Error> = wire
            .rows
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|e| match e {
                        EntryWire::Int(i) => Ok(BigRational::from_integer(BigInt::from(i))),
                        EntryWire::Str(s) => {
                            parse_rational(&s).map_err(|e| D::Error::custom(e.to_string()))
                        }
                    })
                    .collect()
            })
            .collect();
        Basis::new(rows?).map_err(|e| D::Error::custom(e.to_string()))
    }
}

impl GramMatrix {
    pub fn entries(&self) -> &[Vec<BigRational>] {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// Build directly from entries; checks squareness and symmetry.
    pub fn from_entries(entries: Vec<Vec<BigRational>>) -> Result<Self> {
        let n = entries.len();
        if entries.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("Gram matrix must be square".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if entries[i][j] != entries[j][i] {
                    return Err(Error::InvalidParameter("Gram matrix must be symmetric".into()));
                }
            }
        }
        Ok(GramMatrix { entries })
    }
}

/// Exact Gram matrix of a basis.
pub fn gram(basis: &Basis) -> GramMatrix {
    let rows = basis.rows();
    let n = rows.len();
    let mut entries = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let v = dot(&rows[i], &rows[j]);
            entries[i][j] = v.clone();
            entries[j][i] = v;
        }
    }
    GramMatrix { entries }
}

/// Internal Gram-Schmidt with the orthogonalized vectors kept around.
pub(crate) struct GsoFull {
    pub stars: Vec<Vec<BigRational>>,
    pub star_norms_sq: Vec<BigRational>,
    pub mu: Vec<Vec<BigRational>>,
}

pub(crate) fn gso_full(rows: &[Vec<BigRational>]) -> Result<GsoFull> {
    let n = rows.len();
    let mut stars: Vec<Vec<BigRational>> = Vec::with_capacity(n);
    let mut norms: Vec<BigRational> = Vec::with_capacity(n);
    let mut mu = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        mu[i][i] = BigRational::one();
        let mut star = rows[i].clone();
        for j in 0..i {
            let coeff = dot(&rows[i], &stars[j]) / &norms[j];
            star = sub_scaled(&star, &coeff, &stars[j]);
            mu[i][j] = coeff;
        }
        let norm = dot(&star, &star);
        if norm.is_zero() {
            return Err(Error::NotABasis(format!("row {i} is linearly dependent")));
        }
        stars.push(star);
        norms.push(norm);
    }
    Ok(GsoFull {
        stars,
        star_norms_sq: norms,
        mu,
    })
}

/// Gram-Schmidt orthogonalization data of a basis.
pub fn gso(basis: &Basis) -> Result<GsoData> {
    let full = gso_full(basis.rows())?;
    Ok(GsoData {
        star_norms_sq: full.star_norms_sq,
        mu: full.mu,
    })
}

/// Squared covolume: det(gram(basis)), exactly.
pub fn covolume_sq(basis: &Basis) -> BigRational {
    determinant(gram(basis).entries())
}

/// LLL-reduce with quality parameter delta in (1/4, 1].
///
/// Rational inputs are scaled to a common integer grid first and de-scaled
/// on output, so the swap potential stays integer-valued and the procedure
/// terminates even at delta = 1.
pub fn lll_reduce(basis: &Basis, delta: &BigRational) -> Result<Basis> {
    let quarter = BigRational::new(BigInt::one(), BigInt::from(4));
    if *delta <= quarter || *delta > BigRational::one() {
        return Err(Error::InvalidParameter(format!(
            "delta must lie in (1/4, 1], got {}",
            format_rational(delta)
        )));
    }
    let n = basis.num_vectors();
    let scale = common_denominator(basis.rows());
    let scale = BigRational::from_integer(scale);
    let mut rows: Vec<Vec<BigRational>> = basis
        .rows()
        .iter()
        .map(|r| r.iter().map(|x| x * &scale).collect())
        .collect();

    let mut g = gso_full(&rows)?;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut k = 1usize;
    while k < n {
        for j in (0..k).rev() {
            if g.mu[k][j].abs() > half {
                let q = round_nearest(&g.mu[k][j]);
                let q_rat = BigRational::from_integer(q);
                rows[k] = sub_scaled(&rows[k], &q_rat, &rows[j]);
                for l in 0..=j {
                    let v = &q_rat * &g.mu[j][l];
                    g.mu[k][l] -= v;
                }
            }
        }
        let mu_sq = &g.mu[k][k - 1] * &g.mu[k][k - 1];
        let threshold = (delta - mu_sq) * &g.star_norms_sq[k - 1];
        if g.star_norms_sq[k] >= threshold {
            k += 1;
        } else {
            rows.swap(k, k - 1);
            g = gso_full(&rows)?;
            k = if k > 1 { k - 1 } else { 1 };
        }
    }

    let inv = scale.recip();
    let rows = rows
        .into_iter()
        .map(|r| r.into_iter().map(|x| x * &inv).collect())
        .collect();
    Basis::new(rows)
}

fn common_denominator(rows: &[Vec<BigRational>]) -> BigInt {
    let mut l = BigInt::one();
    for row in rows {
        for x in row {
            l = num::integer::lcm(l, x.denom().clone());
        }
    }
    l
}

/// True when |mu_ij| <= 1/2 for all j < i.
pub fn is_size_reduced(basis: &Basis) -> Result<bool> {
    let g = gso(basis)?;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    for i in 0..basis.num_vectors() {
        for j in 0..i {
            if g.mu[i][j].abs() > half {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Size reduction plus the Lovász condition
/// delta*|b_i*|^2 <= |b_{i+1}*|^2 + mu_{i+1,i}^2*|b_i*|^2 at every i.
pub fn is_lll_reduced(basis: &Basis, delta: &BigRational) -> Result<bool> {
    if !is_size_reduced(basis)? {
        return Ok(false);
    }
    let g = gso(basis)?;
    for i in 1..basis.num_vectors() {
        let mu_sq = &g.mu[i][i - 1] * &g.mu[i][i - 1];
        let lhs = delta * &g.star_norms_sq[i - 1];
        let rhs = &g.star_norms_sq[i] + mu_sq * &g.star_norms_sq[i - 1];
        if lhs > rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Scan for the smallest gap index r in [1, N-1] with
/// max(|b_1*|, ..., |b_r*|) < min(|b_{r+1}*|, ..., |b_N*|), exactly.
pub fn find_gap(basis: &Basis) -> Result<GapReport> {
    let g = gso(basis)?;
    let n = g.star_norms_sq.len();
    if n < 2 {
        return Ok(GapReport {
            gap_index: None,
            prefix_max_sq: None,
            suffix_min_sq: None,
        });
    }
    let mut prefix_max = Vec::with_capacity(n);
    let mut running = g.star_norms_sq[0].clone();
    for x in &g.star_norms_sq {
        if x > &running {
            running = x.clone();
        }
        prefix_max.push(running.clone());
    }
    let mut suffix_min = vec![BigRational::zero(); n];
    let mut running = g.star_norms_sq[n - 1].clone();
    for i in (0..n).rev() {
        if g.star_norms_sq[i] < running {
            running = g.star_norms_sq[i].clone();
        }
        suffix_min[i] = running.clone();
    }
    for r in 1..n {
        if prefix_max[r - 1] < suffix_min[r] {
            return Ok(GapReport {
                gap_index: Some(r),
                prefix_max_sq: Some(prefix_max[r - 1].clone()),
                suffix_min_sq: Some(suffix_min[r].clone()),
            });
        }
    }
    Ok(GapReport {
        gap_index: None,
        prefix_max_sq: None,
        suffix_min_sq: None,
    })
}

/// Shortest nonzero lattice vector by Fincke-Pohst enumeration with the
/// default dimension cap.
pub fn svp_enumerate(basis: &Basis) -> Result<SvpResult> {
    svp_enumerate_with_cap(basis, DEFAULT_ENUMERATION_CAP)
}

/// Enumeration pruned by Gram-Schmidt interval bounds; the search radius
/// starts at the smallest input row norm. Among equal-norm minima the
/// lexicographically smallest coefficient vector with positive first
/// nonzero entry is returned.
pub fn svp_enumerate_with_cap(basis: &Basis, cap: usize) -> Result<SvpResult> {
    let n = basis.num_vectors();
    if n > cap {
        return Err(Error::EnumerationCap { dim: n, cap });
    }
    let g = gso_full(basis.rows())?;
    let mut radius_sq = basis
        .rows()
        .iter()
        .map(|r| dot(r, r))
        .min()
        .expect("basis has rows");

    struct Search<'a> {
        g: &'a GsoFull,
        n: usize,
        coeffs: Vec<BigInt>,
        best: Option<Vec<BigInt>>,
        best_norm: BigRational,
    }

    impl Search<'_> {
        fn descend(&mut self, level: isize, partial: BigRational) {
            if level < 0 {
                if self.coeffs.iter().all(|c| c.is_zero()) {
                    return;
                }
                let candidate = normalize_sign(&self.coeffs);
                let better = match &self.best {
                    None => true,
                    Some(best) => {
                        partial < self.best_norm
                            || (partial == self.best_norm && lex_less(&candidate, best))
                    }
                };
                if better {
                    self.best_norm = partial;
                    self.best = Some(candidate);
                }
                return;
            }
            let j = level as usize;
            // center of the admissible interval for x_j given x_{j+1..}
            let mut center = BigRational::zero();
            for i in j + 1..self.n {
                center -= &self.g.mu[i][j] * BigRational::from_integer(self.coeffs[i].clone());
            }
            let base = round_nearest(&center);
            let mut up_alive = true;
            let mut down_alive = true;
            let mut delta = BigInt::zero();
            while up_alive || down_alive {
                for sign in [1, -1] {
                    if delta.is_zero() && sign < 0 {
                        continue;
                    }
                    let alive = if sign > 0 { &mut up_alive } else { &mut down_alive };
                    if !*alive {
                        continue;
                    }
                    let x = if sign > 0 { &base + &delta } else { &base - &delta };
                    let c = BigRational::from_integer(x.clone()) - &center;
                    let contribution = &c * &c * &self.g.star_norms_sq[j];
                    let total = &partial + &contribution;
                    // ties against the current radius stay enumerable so the
                    // lexicographic tie-break sees every minimum
                    if total > self.best_norm {
                        *alive = false;
                        continue;
                    }
                    self.coeffs[j] = x;
                    self.descend(level - 1, total);
                }
                delta += 1;
            }
            self.coeffs[j] = BigInt::zero();
        }
    }

    // Seed the radius with the best input row so ties against it survive.
    let mut search = Search {
        g: &g,
        n,
        coeffs: vec![BigInt::zero(); n],
        best: None,
        best_norm: radius_sq.clone(),
    };
    search.descend(n as isize - 1, BigRational::zero());
    let best = search.best.take().ok_or_else(|| {
        Error::NotABasis("enumeration found no nonzero vector (inconsistent GSO)".into())
    })?;
    radius_sq = search.best_norm;

    let mut vector = vec![BigRational::zero(); basis.ambient_dim()];
    for (c, row) in best.iter().zip(basis.rows()) {
        let c = BigRational::from_integer(c.clone());
        for (v, x) in vector.iter_mut().zip(row) {
            *v += &c * x;
        }
    }
    Ok(SvpResult {
        coefficients: best,
        vector,
        norm_sq: radius_sq,
    })
}

fn normalize_sign(coeffs: &[BigInt]) -> Vec<BigInt> {
    let first_nonzero = coeffs.iter().find(|c| !c.is_zero());
    match first_nonzero {
        Some(c) if c.is_negative() => coeffs.iter().map(|x| -x).collect(),
        _ => coeffs.to_vec(),
    }
}

fn lex_less(a: &[BigInt], b: &[BigInt]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x != y {
            return x < y;
        }
    }
    false
}

/// HKZ reduction: after it, each b_i* is a shortest nonzero vector of the
/// lattice projected orthogonally to b_1..b_{i-1}. With `dual` set, the
/// reversed dual basis is HKZ-reduced and mapped back.
pub fn hkz_reduce(basis: &Basis, dual: bool) -> Result<Basis> {
    hkz_reduce_with_cap(basis, dual, DEFAULT_ENUMERATION_CAP)
}

pub fn hkz_reduce_with_cap(basis: &Basis, dual: bool, cap: usize) -> Result<Basis> {
    let n = basis.num_vectors();
    if n > cap {
        return Err(Error::EnumerationCap { dim: n, cap });
    }
    if dual {
        let d = reversed_dual(basis)?;
        let reduced = hkz_primal(&d, cap)?;
        return reversed_dual(&reduced);
    }
    hkz_primal(basis, cap)
}

fn hkz_primal(basis: &Basis, cap: usize) -> Result<Basis> {
    let n = basis.num_vectors();
    let mut rows = basis.rows().to_vec();
    for i in 0..n.saturating_sub(1) {
        let g = gso_full(&rows)?;
        let projected: Vec<Vec<BigRational>> = rows[i..]
            .iter()
            .map(|r| project_orthogonal(r, &g.stars[..i], &g.star_norms_sq[..i]))
            .collect();
        let proj_basis = Basis::new(projected)?;
        let svp = svp_enumerate_with_cap(&proj_basis, cap)?;
        if svp.norm_sq < g.star_norms_sq[i] {
            let v = complete_to_unimodular(&svp.coefficients)?;
            let tail: Vec<Vec<BigRational>> = v
                .iter()
                .map(|coeffs| {
                    let mut acc = vec![BigRational::zero(); rows[0].len()];
                    for (c, row) in coeffs.iter().zip(&rows[i..]) {
                        let c = BigRational::from_integer(c.clone());
                        for (a, x) in acc.iter_mut().zip(row) {
                            *a += &c * x;
                        }
                    }
                    acc
                })
                .collect();
            rows.splice(i.., tail);
        }
    }
    size_reduce(&mut rows)?;
    Basis::new(rows)
}

/// v minus its projection onto the span of the given star vectors.
pub(crate) fn project_orthogonal(
    v: &[BigRational],
    stars: &[Vec<BigRational>],
    star_norms_sq: &[BigRational],
) -> Vec<BigRational> {
    let mut out = v.to_vec();
    for (star, norm) in stars.iter().zip(star_norms_sq) {
        let coeff = dot(&out, star) / norm;
        out = sub_scaled(&out, &coeff, star);
    }
    out
}

/// In-place size reduction (|mu_ij| <= 1/2); star norms are untouched.
pub(crate) fn size_reduce(rows: &mut [Vec<BigRational>]) -> Result<()> {
    let mut g = gso_full(rows)?;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    for i in 1..rows.len() {
        for j in (0..i).rev() {
            if g.mu[i][j].abs() > half {
                let q = round_nearest(&g.mu[i][j]);
                let q_rat = BigRational::from_integer(q);
                rows[i] = sub_scaled(&rows[i], &q_rat, &rows[j]);
                for l in 0..=j {
                    let v = &q_rat * &g.mu[j][l];
                    g.mu[i][l] -= v;
                }
            }
        }
    }
    Ok(())
}

/// Reversed dual basis: rows of (B B^T)^{-1} B in reverse order. Applying
/// it twice returns the original basis.
pub fn reversed_dual(basis: &Basis) -> Result<Basis> {
    let g = gram(basis);
    let inv = invert_matrix(g.entries()).ok_or_else(|| {
        Error::NotABasis("Gram matrix is singular".into())
    })?;
    let n = basis.num_vectors();
    let d = basis.ambient_dim();
    let mut rows = vec![vec![BigRational::zero(); d]; n];
    for i in 0..n {
        for (j, row) in basis.rows().iter().enumerate() {
            let c = &inv[i][j];
            for (out, x) in rows[i].iter_mut().zip(row) {
                *out += c * x;
            }
        }
    }
    rows.reverse();
    Basis::new(rows)
}

fn invert_matrix(m: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![BigRational::zero(); n];
        e[j] = BigRational::one();
        cols.push(solve_linear(m, &e)?);
    }
    let mut inv = vec![vec![BigRational::zero(); n]; n];
    for (j, col) in cols.iter().enumerate() {
        for i in 0..n {
            inv[i][j] = col[i].clone();
        }
    }
    Some(inv)
}

/// Complete a primitive integer vector to a unimodular matrix having it as
/// the first row.
pub(crate) fn complete_to_unimodular(x: &[BigInt]) -> Result<Vec<Vec<BigInt>>> {
    let n = x.len();
    let mut r = x.to_vec();
    // Column operations reduce r to +/-e_1; accumulate them in c.
    let mut c = identity_int(n);
    loop {
        let nonzero: Vec<usize> = (0..n).filter(|&j| !r[j].is_zero()).collect();
        if nonzero.is_empty() {
            return Err(Error::InvalidParameter("zero vector cannot be completed".into()));
        }
        if nonzero.len() == 1 {
            let j = nonzero[0];
            if j != 0 {
                r.swap(0, j);
                for row in c.iter_mut() {
                    row.swap(0, j);
                }
            }
            if r[0].is_negative() {
                r[0] = -r[0].clone();
                for row in c.iter_mut() {
                    row[0] = -row[0].clone();
                }
            }
            if !r[0].is_one() {
                return Err(Error::InvalidParameter(
                    "coefficient vector is not primitive".into(),
                ));
            }
            break;
        }
        let pivot = *nonzero
            .iter()
            .min_by_key(|&&j| r[j].abs())
            .expect("nonempty");
        for j in 0..n {
            if j == pivot || r[j].is_zero() {
                continue;
            }
            let q = div_round(&r[j], &r[pivot]);
            if q.is_zero() {
                continue;
            }
            let v = &q * &r[pivot];
            r[j] -= v;
            for row in c.iter_mut() {
                let v = &q * &row[pivot];
                row[j] -= v;
            }
        }
    }
    // x * C = e_1, so the first row of C^{-1} is x.
    let c_rat: Vec<Vec<BigRational>> = c
        .iter()
        .map(|row| row.iter().map(|v| BigRational::from_integer(v.clone())).collect())
        .collect();
    let inv = invert_matrix(&c_rat)
        .ok_or_else(|| Error::InvalidParameter("column reduction degenerated".into()))?;
    let mut out = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            if !inv[i][j].denom().is_one() {
                return Err(Error::InvalidParameter(
                    "unimodular completion produced non-integer entries".into(),
                ));
            }
            out[i][j] = inv[i][j].numer().clone();
        }
    }
    debug_assert_eq!(out[0], x.to_vec());
    Ok(out)
}

fn identity_int(n: usize) -> Vec<Vec<BigInt>> {
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = BigInt::one();
    }
    m
}

fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    round_nearest(&BigRational::new(a.clone(), b.clone()))
}

/// Express every target row as an integer combination of the basis rows.
/// None when some row is outside the lattice's rational row span or the
/// coefficients are non-integer.
pub fn express_integer(targets: &[Vec<BigRational>], basis: &Basis) -> Option<Vec<Vec<BigInt>>> {
    let g = gram(basis);
    let mut result = Vec::with_capacity(targets.len());
    for t in targets {
        if t.len() != basis.ambient_dim() {
            return None;
        }
        let rhs: Vec<BigRational> = basis.rows().iter().map(|b| dot(b, t)).collect();
        let y = solve_linear(g.entries(), &rhs)?;
        // verify t really lies in the row span
        let mut recon = vec![BigRational::zero(); basis.ambient_dim()];
        for (c, row) in y.iter().zip(basis.rows()) {
            for (r, x) in recon.iter_mut().zip(row) {
                *r += c * x;
            }
        }
        if recon != *t {
            return None;
        }
        let mut ints = Vec::with_capacity(y.len());
        for c in y {
            if !c.denom().is_one() {
                return None;
            }
            ints.push(c.numer().clone());
        }
        result.push(ints);
    }
    Some(result)
}

/// Two bases generate the same lattice: equal covolume and mutual integer
/// expressibility.
pub fn same_lattice(a: &Basis, b: &Basis) -> bool {
    if a.num_vectors() != b.num_vectors() || a.ambient_dim() != b.ambient_dim() {
        return false;
    }
    if covolume_sq(a) != covolume_sq(b) {
        return false;
    }
    express_integer(a.rows(), b).is_some() && express_integer(b.rows(), a).is_some()
}
