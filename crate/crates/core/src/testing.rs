//! Deterministic instance generators shared by tests and benchmarks.

use num::BigRational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::lattice::Basis;

/// Random full-rank integer basis with entries in [-bound, bound],
/// resampled until the rows are independent.
pub fn random_basis(rng: &mut ChaCha8Rng, n: usize, d: usize, bound: i64) -> Basis {
    loop {
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.gen_range(-bound..=bound)).collect())
            .collect();
        if let Ok(basis) = Basis::from_int_rows(&rows) {
            return basis;
        }
    }
}

/// Random delta in (1/4, 1] drawn from a few exact rationals.
pub fn random_delta(rng: &mut ChaCha8Rng) -> BigRational {
    let choices: [(i64, i64); 4] = [(3, 4), (4, 5), (9, 10), (1, 1)];
    let (p, q) = choices[rng.gen_range(0..choices.len())];
    BigRational::new(p.into(), q.into())
}
