//! Pipeline tests: preprocessing + lifting against the brute-force oracle,
//! and the unimodular-transformation size bound.

use kdsp_core::hamiltonian::EncodingConfig;
use kdsp_core::lattice::{
    alpha_from_delta, covolume_sq, default_delta, express_integer, find_gap, gram, is_lll_reduced,
    lll_reduce, Basis,
};
use kdsp_core::preprocess::{lift_solution, preprocess, scramble_basis, PlanAction};
use kdsp_core::rational::rational_to_f64;
use kdsp_core::rng::seeded_rng;
use kdsp_core::solvers::brute_force_solve;
use kdsp_core::testing::random_basis;
use num::{BigRational, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Brute-force the K-DSP over the m = 1 box spanned by a basis; returns the
/// minimal covolume^2 and one optimal sub-basis.
fn oracle_solve(basis: &Basis, k: usize) -> (BigRational, Basis) {
    let cfg = EncodingConfig::new(k, basis.num_vectors(), 1).unwrap();
    let result = brute_force_solve(&gram(basis), &cfg).unwrap();
    let x = &result.solutions[0];
    let rows: Vec<Vec<BigRational>> = x
        .iter()
        .map(|coeffs| {
            let mut acc = vec![BigRational::zero(); basis.ambient_dim()];
            for (&c, row) in coeffs.iter().zip(basis.rows()) {
                let c = BigRational::from_integer(c.into());
                for (a, v) in acc.iter_mut().zip(row) {
                    *a += &c * v;
                }
            }
            acc
        })
        .collect();
    (result.min_vol_sq, Basis::new(rows).unwrap())
}

/// Random basis with a deliberate scale jump so LLL keeps a gap, mildly
/// scrambled to hide the block structure.
fn gapped_instance(rng: &mut ChaCha8Rng, n: usize) -> Basis {
    let split = rng.gen_range(1..n);
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        if i < split {
                            rng.gen_range(1..=2)
                        } else {
                            rng.gen_range(60..=90)
                        }
                    } else if j < i {
                        rng.gen_range(-1..=1)
                    } else {
                        0
                    }
                })
                .collect()
        })
        .collect();
    let base = Basis::from_int_rows(&rows).unwrap();
    scramble_basis(&base, rng.gen()).unwrap()
}

#[test]
fn plans_always_end_gap_free_and_reduced() {
    let mut rng = seeded_rng(101);
    let delta = default_delta();
    for trial in 0..15 {
        let n = 3 + (trial % 3);
        let basis = random_basis(&mut rng, n, n, 9);
        for k in 1..n {
            let plan = preprocess(&basis, k).unwrap();
            if plan.is_solved() {
                assert_eq!(plan.b_p.num_vectors(), k);
                continue;
            }
            assert!(find_gap(&plan.b_p).unwrap().gap_index.is_none());
            assert!(is_lll_reduced(&plan.b_p, &delta).unwrap());
        }
    }
}

#[test]
fn preprocess_plus_lift_matches_brute_force() {
    // Equality of minima between the original instance and the lifted
    // solution of the reduced instance. Both oracles scan the m = 1 box of
    // the corresponding LLL bases.
    let mut rng = seeded_rng(2024);
    let mut tested = 0;
    let mut attempts = 0;
    while tested < 12 && attempts < 200 {
        attempts += 1;
        let n = 3 + (attempts % 2); // N in {3, 4}
        let instance = gapped_instance(&mut rng, n);
        for k in 1..n {
            let plan = preprocess(&instance, k).unwrap();
            if plan.trace.is_empty() && !plan.is_solved() {
                continue; // want genuinely gapped instances
            }
            let original_lll = lll_reduce(&instance, &default_delta()).unwrap();
            let (original_min, _) = oracle_solve(&original_lll, k);
            let lifted = if plan.is_solved() {
                plan.b_p.clone()
            } else {
                let (_, sub) = oracle_solve(&plan.b_p, plan.k_reduced);
                lift_solution(&plan, &sub).unwrap()
            };
            assert_eq!(lifted.num_vectors(), k);
            assert_eq!(
                covolume_sq(&lifted),
                original_min,
                "attempt {attempts}, k = {k}, action {:?}",
                plan.action
            );
            tested += 1;
        }
    }
    assert!(tested >= 12, "only {tested} gapped cases found");
}

#[test]
fn lift_covolume_factorizes_on_project_plans() {
    let mut rng = seeded_rng(555);
    let mut seen = 0;
    for _ in 0..120 {
        let n = 4;
        let instance = gapped_instance(&mut rng, n);
        for k in 2..n {
            let plan = preprocess(&instance, k).unwrap();
            if !matches!(plan.action, PlanAction::Project { .. }) || plan.is_solved() {
                continue;
            }
            let (sub_min, sub) = oracle_solve(&plan.b_p, plan.k_reduced);
            let lifted = lift_solution(&plan, &sub).unwrap();
            // covolume^2 factorizes into the fixed block times the sub-solution
            let fixed_cov: BigRational = covolume_sq(&lifted) / &sub_min;
            assert!(fixed_cov.is_positive());
            assert_eq!(covolume_sq(&lifted), fixed_cov * covolume_sq(&sub));
            seen += 1;
        }
        if seen >= 4 {
            return;
        }
    }
    panic!("no project-action plans generated");
}

#[test]
fn unimodular_transform_bound_after_relll() {
    // |U|_inf <= N alpha^{3(N-1)/4} for U solving C = U * B_P, with B_P a
    // gap-free LLL basis and C an LLL-reduced scramble of it.
    let delta = default_delta();
    let alpha = rational_to_f64(&alpha_from_delta(&delta));
    let mut rng = seeded_rng(77);
    let mut tested = 0;
    let mut attempts = 0;
    while tested < 20 && attempts < 400 {
        attempts += 1;
        let n = 2 + (attempts % 3); // N in [2, 4]
        let basis = random_basis(&mut rng, n, n, 9);
        let b_p = lll_reduce(&basis, &delta).unwrap();
        if find_gap(&b_p).unwrap().gap_index.is_some() {
            continue;
        }
        let scrambled = scramble_basis(&b_p, rng.gen()).unwrap();
        let c = lll_reduce(&scrambled, &delta).unwrap();
        let u = express_integer(c.rows(), &b_p).expect("same lattice");
        let u_inf = u
            .iter()
            .flat_map(|row| row.iter())
            .map(|x| x.abs())
            .max()
            .unwrap();
        let bound = n as f64 * alpha.powf(3.0 * (n as f64 - 1.0) / 4.0);
        let u_inf_f64: f64 = u_inf.to_string().parse().unwrap();
        assert!(
            u_inf_f64 <= bound + 1e-9,
            "attempt {attempts}: |U|_inf = {u_inf} > bound {bound:.4}"
        );
        tested += 1;
    }
    assert_eq!(tested, 20, "not enough gap-free instances");
}
