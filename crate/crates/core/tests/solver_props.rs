//! Solver invariants: Grover's closed form on random shapes and box
//! invariance of the brute-force minimum under unimodular scrambling.

use kdsp_core::hamiltonian::{DiagonalCost, EncodingConfig};
use kdsp_core::lattice::{default_delta, express_integer, gram, lll_reduce, svp_enumerate};
use kdsp_core::preprocess::{qubit_budget, scramble_basis, BudgetMode};
use kdsp_core::rng::seeded_rng;
use kdsp_core::solvers::{brute_force_solve, default_grover_iterations, grover_simulate};
use kdsp_core::testing::random_basis;
use num::Signed;
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn grover_probability_matches_closed_form(seed in 0u64..1u64 << 32) {
        let mut rng = seeded_rng(seed);
        let n = rng.gen_range(2..=10usize);
        let s = 1u64 << n;
        let m = rng.gen_range(1..=s / 2);
        let mut values = vec![0.0f64; s as usize];
        // scatter the marked states rather than packing them at the front
        let mut placed = 0;
        while placed < m {
            let idx = rng.gen_range(0..s) as usize;
            if values[idx] == 0.0 {
                values[idx] = 1.0;
                placed += 1;
            }
        }
        let diag = DiagonalCost::from_values(values, n).unwrap();
        let theta = ((m as f64 / s as f64).sqrt()).asin();
        let j = rng.gen_range(0..=default_grover_iterations(s, m) + 1);
        let out = grover_simulate(&diag, 1.0, Some(j), seed).unwrap();
        let expected = ((2 * j + 1) as f64 * theta).sin().powi(2);
        prop_assert!((out.success_probability - expected).abs() < 1e-10);
        prop_assert_eq!(out.target_count, m);
    }
}

#[test]
fn brute_force_minimum_invariant_under_scrambling() {
    // K = 1: the Theorem-1 box provably contains a shortest vector; the
    // scrambled instance gets its box widened to cover X * U^{-1} per the
    // unimodular-transformation bound.
    let delta = default_delta();
    let mut rng = seeded_rng(6060);
    let mut tested = 0;
    while tested < 8 {
        let n = 2 + (tested % 2); // N in {2, 3}
        let basis = random_basis(&mut rng, n, n, 5);
        let good = lll_reduce(&basis, &delta).unwrap();
        let budget = qubit_budget(n, 1, BudgetMode::Lll, &delta).unwrap();
        let m_good = budget.bits_per_coordinate;
        let cfg_good = EncodingConfig::new(1, n, m_good).unwrap();
        let good_result = brute_force_solve(&gram(&good), &cfg_good).unwrap();
        // sanity: the box really contains the true shortest vector
        assert_eq!(good_result.min_vol_sq, svp_enumerate(&good).unwrap().norm_sq);

        let scrambled = scramble_basis(&good, rng.gen()).unwrap();
        let u = express_integer(scrambled.rows(), &good).expect("same lattice");
        let u_inv = express_integer(good.rows(), &scrambled).expect("same lattice");
        let _ = u;
        let u_inv_norm: i64 = u_inv
            .iter()
            .flat_map(|r| r.iter())
            .map(|x| x.abs().to_string().parse::<i64>().unwrap())
            .max()
            .unwrap();
        // coefficients transform as x_scrambled = x_good * U^{-1}
        let bound = (n as i64) * (1i64 << m_good) * u_inv_norm;
        let m_scrambled = (bound as f64 + 1.0).log2().ceil() as u32;
        let cfg_scrambled = EncodingConfig::new(1, n, m_scrambled).unwrap();
        if cfg_scrambled.n > 20 {
            continue; // keep the scan desk-sized
        }
        let scrambled_result = brute_force_solve(&gram(&scrambled), &cfg_scrambled).unwrap();
        assert_eq!(
            scrambled_result.min_vol_sq, good_result.min_vol_sq,
            "n = {n}, tested = {tested}"
        );
        tested += 1;
    }
}

#[test]
fn k1_brute_force_agrees_with_enumeration_when_in_box() {
    let mut rng = seeded_rng(515);
    for _ in 0..10 {
        let n = 2 + (rng.gen_range(0..2usize));
        let basis = random_basis(&mut rng, n, n, 6);
        let reduced = lll_reduce(&basis, &default_delta()).unwrap();
        let svp = svp_enumerate(&reduced).unwrap();
        let m = 2u32;
        let fits = svp
            .coefficients
            .iter()
            .all(|c| c >= &(-(1 << m)).into() && c <= &((1 << m) - 1).into());
        if !fits {
            continue;
        }
        let cfg = EncodingConfig::new(1, n, m).unwrap();
        let result = brute_force_solve(&gram(&reduced), &cfg).unwrap();
        assert_eq!(result.min_vol_sq, svp.norm_sq);
    }
}
