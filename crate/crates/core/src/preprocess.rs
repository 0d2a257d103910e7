//! Classical preprocessing: LLL, gap-driven dimension reduction, solution
//! lifting, and qubit-budget calculators.
//!
//! `preprocess` iterates LLL + gap detection. A gap at index p either solves
//! the instance outright (p = K), restricts it to the first p vectors
//! (K < p), or projects it onto the orthogonal complement of their span
//! (K > p) and continues on the smaller instance. Every reduction step is
//! recorded so `lift_solution` can map solutions of the reduced instance
//! back to the original lattice.

use num::{BigInt, BigRational, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    alpha_from_delta, default_delta, find_gap, gso_full, lll_reduce, project_orthogonal, Basis,
};
use crate::rational::{dot, rational_to_f64, round_nearest, sub_scaled};
use crate::rng::{derive_seed, seeded_rng, Stream};

/// Overall outcome label of a preprocessing run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlanAction {
    /// The LLL-reduced input is already gap-free; solve it directly.
    Direct,
    /// First reduction restricted the instance to the leading p vectors.
    Restrict { p: usize },
    /// First reduction projected the instance orthogonally to the leading
    /// p vectors.
    Project { p: usize },
    /// A gap landed exactly on K; the plan already carries the solution.
    Solved,
}

/// One recorded dimension-reduction step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlanStep {
    Restrict {
        p: usize,
    },
    Project {
        p: usize,
        /// The p fixed vectors spanning the projected-out subspace.
        fixed: Basis,
        /// Basis of the projected lattice the next frame starts from.
        projected: Basis,
        /// Lattice preimages of `projected`, row for row.
        preimages: Basis,
    },
}

/// Result of classical preprocessing.
///
/// For non-solved plans `b_p` is the gap-free LLL-reduced working basis of
/// the terminal reduced instance and `k_reduced` the sub-lattice dimension
/// still to be solved there. For solved plans `b_p` is the K-row solution,
/// already lifted to original-lattice coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessPlan {
    pub action: PlanAction,
    pub b_p: Basis,
    pub k_reduced: usize,
    pub trace: Vec<PlanStep>,
}

impl PreprocessPlan {
    /// True when preprocessing alone solved the instance.
    pub fn is_solved(&self) -> bool {
        matches!(self.action, PlanAction::Solved)
    }
}

enum Terminal {
    Open { b_p: Basis, k_reduced: usize },
    Solved(Basis),
}

/// Run Algorithm-1 style preprocessing with the default delta.
pub fn preprocess(b_in: &Basis, k: usize) -> Result<PreprocessPlan> {
    preprocess_with_delta(b_in, k, &default_delta())
}

pub fn preprocess_with_delta(
    b_in: &Basis,
    k: usize,
    delta: &BigRational,
) -> Result<PreprocessPlan> {
    let n = b_in.num_vectors();
    if k < 1 || k >= n {
        return Err(Error::InvalidParameter(format!(
            "k must satisfy 1 <= k < N, got k = {k}, N = {n}"
        )));
    }
    let mut trace = Vec::new();
    let terminal = reduce_recursive(b_in.clone(), k, delta, &mut trace)?;
    let plan = match terminal {
        Terminal::Open { b_p, k_reduced } => {
            let action = match trace.first() {
                None => PlanAction::Direct,
                Some(PlanStep::Restrict { p }) => PlanAction::Restrict { p: *p },
                Some(PlanStep::Project { p, .. }) => PlanAction::Project { p: *p },
            };
            PreprocessPlan {
                action,
                b_p,
                k_reduced,
                trace,
            }
        }
        Terminal::Solved(solution) => {
            let lifted = lift_through_trace(solution, &trace)?;
            PreprocessPlan {
                action: PlanAction::Solved,
                b_p: lifted,
                k_reduced: k,
                trace,
            }
        }
    };
    Ok(plan)
}

fn reduce_recursive(
    basis: Basis,
    k: usize,
    delta: &BigRational,
    trace: &mut Vec<PlanStep>,
) -> Result<Terminal> {
    let reduced = lll_reduce(&basis, delta)?;
    let gap = find_gap(&reduced)?;
    let Some(p) = gap.gap_index else {
        return Ok(Terminal::Open {
            b_p: reduced,
            k_reduced: k,
        });
    };
    if p == k {
        let solution = Basis::new(reduced.rows()[..p].to_vec())?;
        return Ok(Terminal::Solved(solution));
    }
    if p > k {
        // Lemma: the solution lives inside the first p vectors.
        trace.push(PlanStep::Restrict { p });
        let restricted = Basis::new(reduced.rows()[..p].to_vec())?;
        return reduce_recursive(restricted, k, delta, trace);
    }
    // p < k: fix the first p vectors and continue on the projection.
    let g = gso_full(reduced.rows())?;
    let fixed = Basis::new(reduced.rows()[..p].to_vec())?;
    let projected_rows: Vec<Vec<BigRational>> = reduced.rows()[p..]
        .iter()
        .map(|r| project_orthogonal(r, &g.stars[..p], &g.star_norms_sq[..p]))
        .collect();
    let projected = Basis::new(projected_rows)?;
    let preimages = Basis::new(reduced.rows()[p..].to_vec())?;
    trace.push(PlanStep::Project {
        p,
        fixed,
        projected: projected.clone(),
        preimages,
    });
    reduce_recursive(projected, k - p, delta, trace)
}

/// Map a solution of the reduced instance back to the original lattice.
///
/// Projected rows are lifted to size-reduced lattice preimages and prepended
/// with the fixed vectors; restriction steps need no work. The covolume of
/// the lifted basis factors as covolume(fixed) * covolume(sub_solution).
pub fn lift_solution(plan: &PreprocessPlan, sub_solution: &Basis) -> Result<Basis> {
    if plan.is_solved() {
        if sub_solution.num_vectors() != plan.b_p.num_vectors() {
            return Err(Error::DimensionMismatch(format!(
                "solved plan stores {} rows, sub-solution has {}",
                plan.b_p.num_vectors(),
                sub_solution.num_vectors()
            )));
        }
        return Ok(sub_solution.clone());
    }
    if sub_solution.num_vectors() != plan.k_reduced {
        return Err(Error::DimensionMismatch(format!(
            "plan expects a {}-row sub-solution, got {}",
            plan.k_reduced,
            sub_solution.num_vectors()
        )));
    }
    if sub_solution.ambient_dim() != plan.b_p.ambient_dim() {
        return Err(Error::DimensionMismatch(
            "sub-solution ambient dimension differs from plan".into(),
        ));
    }
    lift_through_trace(sub_solution.clone(), &plan.trace)
}

fn lift_through_trace(solution: Basis, trace: &[PlanStep]) -> Result<Basis> {
    let mut rows = solution.rows().to_vec();
    for step in trace.iter().rev() {
        match step {
            PlanStep::Restrict { .. } => {}
            PlanStep::Project {
                fixed,
                projected,
                preimages,
                ..
            } => {
                let coeffs =
                    crate::lattice::express_integer(&rows, projected).ok_or_else(|| {
                        Error::DimensionMismatch(
                            "sub-solution does not lie in the recorded projected lattice".into(),
                        )
                    })?;
                let ambient = preimages.ambient_dim();
                let mut lifted: Vec<Vec<BigRational>> = coeffs
                    .iter()
                    .map(|cs| {
                        let mut acc = vec![BigRational::zero(); ambient];
                        for (c, row) in cs.iter().zip(preimages.rows()) {
                            let c = BigRational::from_integer(c.clone());
                            for (a, x) in acc.iter_mut().zip(row) {
                                *a += &c * x;
                            }
                        }
                        acc
                    })
                    .collect();
                let g = gso_full(fixed.rows())?;
                for v in lifted.iter_mut() {
                    for j in (0..fixed.num_vectors()).rev() {
                        let coeff = dot(v, &g.stars[j]) / &g.star_norms_sq[j];
                        let q = round_nearest(&coeff);
                        if !q.is_zero() {
                            let q = BigRational::from_integer(q);
                            *v = sub_scaled(v, &q, &fixed.rows()[j]);
                        }
                    }
                }
                let mut out = fixed.rows().to_vec();
                out.append(&mut lifted);
                rows = out;
            }
        }
    }
    Basis::new(rows)
}

/// Which reduction strength backs the coefficient bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum BudgetMode {
    Lll,
    Hkz,
}

/// Qubit budget for encoding one K-DSP instance.
///
/// `bits_per_coordinate` is the m with coefficients in [-2^m, 2^m - 1];
/// each coordinate then takes m + 1 qubits and the grid K*N*(m+1) in total.
/// `closed_form_qubits` is the looser analytic total kept for comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QubitBudget {
    pub mode: BudgetMode,
    pub bits_per_coordinate: u32,
    pub total_qubits: usize,
    pub coefficient_bound: f64,
    pub closed_form_qubits: f64,
}

/// Evaluate the coefficient bound for the given mode and derive m and the
/// total qubit count.
pub fn qubit_budget(
    n_dim: usize,
    k: usize,
    mode: BudgetMode,
    delta: &BigRational,
) -> Result<QubitBudget> {
    if k < 1 || k >= n_dim {
        return Err(Error::InvalidParameter(format!(
            "k must satisfy 1 <= k < N, got k = {k}, N = {n_dim}"
        )));
    }
    let n = n_dim as f64;
    let kf = k as f64;
    let alpha = rational_to_f64(&alpha_from_delta(delta));
    if !(alpha.is_finite() && alpha > 1.0) {
        return Err(Error::InvalidParameter("delta must lie in (1/4, 1]".into()));
    }
    let (coefficient_bound, closed_form_qubits) = match mode {
        BudgetMode::Lll => {
            let bound = n * alpha.powf(3.0 * (n - 1.0) / 4.0);
            let log_alpha = alpha.log2();
            let closed =
                (3.0 * kf * n * n / 4.0) * log_alpha - (3.0 * kf * n / 4.0) * log_alpha
                    + n * n.log2();
            (bound, closed)
        }
        BudgetMode::Hkz => {
            let bound = n.powi(3) * ((n + 3.0) / 4.0).powi(2);
            let closed = 5.0 * kf * n * n.log2();
            (bound, closed)
        }
    };
    let m = (coefficient_bound + 1.0).log2().ceil().max(1.0) as u32;
    Ok(QubitBudget {
        mode,
        bits_per_coordinate: m,
        total_qubits: k * n_dim * (m as usize + 1),
        coefficient_bound,
        closed_form_qubits,
    })
}

/// Seeded unimodular scramble with entries bounded by 3, built from
/// elementary row operations. Used to produce reproducible "worse" bases.
pub fn scramble_matrix(n: usize, seed: u64) -> Vec<Vec<BigInt>> {
    let mut rng = seeded_rng(derive_seed(seed, Stream::Scramble, n as u64));
    let mut m: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::from(1) } else { BigInt::zero() })
                .collect()
        })
        .collect();
    if n < 2 {
        return m;
    }
    let bound = BigInt::from(3);
    let target_ops = 4 * n * n;
    let mut accepted = 0usize;
    let mut attempts = 0usize;
    while accepted < target_ops && attempts < 400 * target_ops {
        attempts += 1;
        match rng.gen_range(0..10u32) {
            0 => {
                let i = rng.gen_range(0..n);
                let j = rng.gen_range(0..n);
                if i != j {
                    m.swap(i, j);
                    accepted += 1;
                }
            }
            1 => {
                let i = rng.gen_range(0..n);
                for x in m[i].iter_mut() {
                    *x = -x.clone();
                }
                accepted += 1;
            }
            _ => {
                let i = rng.gen_range(0..n);
                let j = rng.gen_range(0..n);
                if i == j {
                    continue;
                }
                let s = if rng.gen_bool(0.5) { 1 } else { -1 };
                let candidate: Vec<BigInt> = m[i]
                    .iter()
                    .zip(&m[j])
                    .map(|(a, b)| a + BigInt::from(s) * b)
                    .collect();
                if candidate.iter().all(|x| x.abs() <= bound) {
                    m[i] = candidate;
                    accepted += 1;
                }
            }
        }
    }
    m
}

/// Apply a scramble matrix to a basis: rows of U * B.
pub fn scramble_basis(basis: &Basis, seed: u64) -> Result<Basis> {
    let u = scramble_matrix(basis.num_vectors(), seed);
    apply_unimodular(basis, &u)
}

/// Rows of U * B for an arbitrary integer matrix U (must stay a basis).
pub fn apply_unimodular(basis: &Basis, u: &[Vec<BigInt>]) -> Result<Basis> {
    let n = basis.num_vectors();
    if u.len() != n || u.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch(
            "transform shape does not match basis".into(),
        ));
    }
    let d = basis.ambient_dim();
    let rows: Vec<Vec<BigRational>> = u
        .iter()
        .map(|coeffs| {
            let mut acc = vec![BigRational::zero(); d];
            for (c, row) in coeffs.iter().zip(basis.rows()) {
                let c = BigRational::from_integer(c.clone());
                for (a, x) in acc.iter_mut().zip(row) {
                    *a += &c * x;
                }
            }
            acc
        })
        .collect();
    Basis::new(rows)
}
