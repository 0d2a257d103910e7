//! Property tests for the exact lattice layer.

use kdsp_core::lattice::{
    alpha_from_delta, covolume_sq, default_delta, find_gap, gso, hkz_reduce, is_lll_reduced,
    is_size_reduced, lll_reduce, same_lattice, svp_enumerate, Basis,
};
use kdsp_core::rational::rational_to_f64;
use kdsp_core::rng::seeded_rng;
use kdsp_core::testing::{random_basis, random_delta};
use num::{BigRational, One, Signed, Zero};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lll_preserves_covolume_and_lattice(seed in 0u64..1u64 << 48) {
        let mut rng = seeded_rng(seed);
        let n = 2 + (seed % 5) as usize; // N in [2, 6]
        let basis = random_basis(&mut rng, n, n, 9);
        let delta = random_delta(&mut rng);
        let reduced = lll_reduce(&basis, &delta).unwrap();
        prop_assert_eq!(covolume_sq(&reduced), covolume_sq(&basis));
        prop_assert!(same_lattice(&reduced, &basis));
    }

    #[test]
    fn lll_output_satisfies_exact_reduction_conditions(seed in 0u64..1u64 << 48) {
        let mut rng = seeded_rng(seed);
        let n = 2 + (seed % 5) as usize;
        let basis = random_basis(&mut rng, n, n, 9);
        let delta = random_delta(&mut rng);
        let reduced = lll_reduce(&basis, &delta).unwrap();
        prop_assert!(is_size_reduced(&reduced).unwrap());
        // Lovász in invariant form, exact rational comparisons
        let g = gso(&reduced).unwrap();
        for i in 1..n {
            let mu_sq = &g.mu[i][i - 1] * &g.mu[i][i - 1];
            let lhs = &delta * &g.star_norms_sq[i - 1];
            let rhs = &g.star_norms_sq[i] + mu_sq * &g.star_norms_sq[i - 1];
            prop_assert!(lhs <= rhs);
        }
        prop_assert!(is_lll_reduced(&reduced, &delta).unwrap());
    }

    #[test]
    fn gap_free_lll_bound(seed in 0u64..1u64 << 48) {
        // max |b_i*| <= alpha^{(N-1)/4} vol^{1/N}, checked exactly as
        // (max |b_i*|^2)^N <= alpha^{N(N-1)/2} vol^2
        let mut rng = seeded_rng(seed);
        let n = 2 + (seed % 5) as usize;
        let basis = random_basis(&mut rng, n, n, 9);
        let delta = random_delta(&mut rng);
        let reduced = lll_reduce(&basis, &delta).unwrap();
        if find_gap(&reduced).unwrap().gap_index.is_some() {
            return Ok(());
        }
        let alpha = alpha_from_delta(&delta);
        let g = gso(&reduced).unwrap();
        let max_sq = g.star_norms_sq.iter().max().unwrap().clone();
        let lhs = num::pow::pow(max_sq, n);
        let rhs = num::pow::pow(alpha, n * (n - 1) / 2) * covolume_sq(&reduced);
        prop_assert!(lhs <= rhs);
    }

    #[test]
    fn minkowski_bound_on_shortest_vector(seed in 0u64..1u64 << 48) {
        let mut rng = seeded_rng(seed);
        let n = 2 + (seed % 4) as usize; // N in [2, 5]
        let basis = random_basis(&mut rng, n, n, 9);
        // enumerate on the reduced basis (same lattice, much faster)
        let reduced = lll_reduce(&basis, &default_delta()).unwrap();
        let shortest = svp_enumerate(&reduced).unwrap();
        let lambda1_sq = rational_to_f64(&shortest.norm_sq);
        let vol_sq = rational_to_f64(&covolume_sq(&basis));
        let bound = n as f64 * vol_sq.powf(1.0 / n as f64);
        prop_assert!(lambda1_sq <= bound * (1.0 + 1e-9));
    }

    #[test]
    fn svp_returns_nonzero_vector_with_claimed_norm(seed in 0u64..1u64 << 48) {
        let mut rng = seeded_rng(seed);
        let n = 2 + (seed % 3) as usize;
        let basis = random_basis(&mut rng, n, n, 6);
        let r = svp_enumerate(&basis).unwrap();
        prop_assert!(r.coefficients.iter().any(|c| !c.is_zero()));
        let norm: BigRational = r.vector.iter().map(|x| x * x).sum();
        prop_assert_eq!(norm, r.norm_sq.clone());
        prop_assert!(r.norm_sq > BigRational::zero());
        // normalized tie-break: first nonzero coefficient positive
        let first = r.coefficients.iter().find(|c| !c.is_zero()).unwrap();
        prop_assert!(first.is_positive());
    }
}

/// Star vectors of a basis, rebuilt from scratch (independent of the
/// crate-internal GSO plumbing).
fn star_vectors(rows: &[Vec<BigRational>]) -> Vec<(Vec<BigRational>, BigRational)> {
    let mut stars: Vec<(Vec<BigRational>, BigRational)> = Vec::new();
    for row in rows {
        let mut star = row.clone();
        for (s, norm) in &stars {
            let c: BigRational =
                star.iter().zip(s).map(|(a, b)| a * b).sum::<BigRational>() / norm;
            star = star.iter().zip(s).map(|(a, b)| a - &c * b).collect();
        }
        let norm: BigRational = star.iter().map(|x| x * x).sum();
        stars.push((star, norm));
    }
    stars
}

fn project_off(v: &[BigRational], stars: &[(Vec<BigRational>, BigRational)]) -> Vec<BigRational> {
    let mut out = v.to_vec();
    for (s, norm) in stars {
        let c: BigRational = out.iter().zip(s).map(|(a, b)| a * b).sum::<BigRational>() / norm;
        out = out.iter().zip(s).map(|(a, b)| a - &c * b).collect();
    }
    out
}

#[test]
fn hkz_star_norms_match_projected_shortest_vectors() {
    // HKZ property checked by independent enumeration of every projected
    // lattice, on a handful of seeded instances up to N = 5.
    for (seed, n) in [(1u64, 3usize), (2, 4), (3, 4), (4, 5), (5, 3)] {
        let mut rng = seeded_rng(seed);
        let basis = random_basis(&mut rng, n, n, 7);
        let out = hkz_reduce(&basis, false).unwrap();
        assert!(same_lattice(&out, &basis), "seed {seed}");
        let g = gso(&out).unwrap();
        let rows = out.rows();
        let stars = star_vectors(rows);
        for i in 0..n {
            let projected: Vec<Vec<BigRational>> = rows[i..]
                .iter()
                .map(|r| project_off(r, &stars[..i]))
                .collect();
            let shortest = svp_enumerate(&Basis::new(projected).unwrap()).unwrap();
            assert_eq!(g.star_norms_sq[i], shortest.norm_sq, "seed {seed} level {i}");
        }
    }
}

#[test]
fn dual_hkz_reduces_the_reversed_dual() {
    use kdsp_core::lattice::reversed_dual;
    for seed in [11u64, 12, 13] {
        let mut rng = seeded_rng(seed);
        let basis = random_basis(&mut rng, 3, 3, 6);
        let out = hkz_reduce(&basis, true).unwrap();
        assert!(same_lattice(&out, &basis), "seed {seed}");
        // the reversed dual of the output is HKZ-reduced: its first star norm
        // equals its shortest vector norm (spot check of the defining level)
        let rd = reversed_dual(&out).unwrap();
        let g = gso(&rd).unwrap();
        let shortest = svp_enumerate(&rd).unwrap();
        assert_eq!(g.star_norms_sq[0], shortest.norm_sq, "seed {seed}");
    }
}

#[test]
fn lll_delta_one_terminates_and_reduces() {
    // delta = 1 is the default (alpha = 4/3 exactly); termination relies on
    // the integer scaling inside lll_reduce
    let mut rng = seeded_rng(99);
    for _ in 0..10 {
        let basis = random_basis(&mut rng, 4, 4, 9);
        let one = BigRational::one();
        let reduced = lll_reduce(&basis, &one).unwrap();
        assert!(is_lll_reduced(&reduced, &one).unwrap());
        assert_eq!(covolume_sq(&reduced), covolume_sq(&basis));
    }
}
