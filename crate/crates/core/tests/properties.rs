use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use treedet::determinantal::sample_determinantal_seeded;
use treedet::matching::{
    matching_polynomial_exact, max_matching_stats, reconstruct_matching, sample_boltzmann, sample_uniform_max_matching,
    uncovered,
};
use treedet::recursions::{fixed_point_residual, solve_m_z};
use treedet::spectral::{kernel_projection, rank_exact};
use treedet::tree::{parse_tree, random_tree, Tree};
use treedet::Caps;

fn tree(n: usize, seed: u64) -> Tree {
    random_tree(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn edge_list_round_trips(n in 1usize..40, seed: u64) {
        let t = tree(n, seed);
        prop_assert_eq!(parse_tree(&t.to_edge_list()).unwrap(), t);
    }

    #[test]
    fn uncovered_set_determines_the_matching(n in 1usize..40, seed: u64) {
        let t = tree(n, seed);
        let m = sample_uniform_max_matching(&t, seed);
        prop_assert_eq!(reconstruct_matching(&t, &uncovered(&m)).unwrap(), m.clone());
        let nu = max_matching_stats(&t, &Caps::default()).nu;
        prop_assert_eq!(m.size(), nu);
        prop_assert!(m.is_valid_for(&t));
    }

    #[test]
    fn boltzmann_samples_are_matchings(n in 1usize..40, seed: u64, z in 0.05f64..5.0) {
        let t = tree(n, seed);
        let m = sample_boltzmann(&t, z, seed).unwrap();
        prop_assert!(m.is_valid_for(&t));
    }

    #[test]
    fn kernel_rank_is_deficiency(n in 1usize..30, seed: u64) {
        let t = tree(n, seed);
        let caps = Caps::default();
        let nu = max_matching_stats(&t, &caps).nu;
        let kernel = kernel_projection(&t, &caps).unwrap();
        prop_assert_eq!(kernel.rank(), n - 2 * nu);
        prop_assert_eq!(rank_exact(&t), 2 * nu);
        prop_assert!((kernel.matrix().trace() - (n - 2 * nu) as f64).abs() < 1e-9);
    }

    #[test]
    fn determinantal_samples_have_rank_size(n in 1usize..14, seed: u64) {
        let t = tree(n, seed);
        let kernel = kernel_projection(&t, &Caps::default()).unwrap();
        let s = sample_determinantal_seeded(&kernel, seed);
        prop_assert_eq!(s.len(), kernel.rank());
        prop_assert!(reconstruct_matching(&t, &s).is_ok());
    }

    #[test]
    fn polynomial_top_coefficient_counts_maximum_matchings(n in 1usize..40, seed: u64) {
        let t = tree(n, seed);
        let caps = Caps::default();
        let stats = max_matching_stats(&t, &caps);
        let poly = matching_polynomial_exact(&t);
        let coeffs = poly.exact().unwrap();
        prop_assert_eq!(Some(&coeffs[n - 2 * stats.nu]), stats.mm.exact());
        prop_assert!(coeffs[..n - 2 * stats.nu].iter().all(|c| *c == 0u32.into()));
    }

    #[test]
    fn recursion_solves_its_fixed_point(n in 1usize..60, seed: u64, z in 0.05f64..5.0) {
        let t = tree(n, seed);
        let rooted = t.root_at((seed % n as u64) as usize).unwrap();
        let values = solve_m_z(&rooted, z).unwrap();
        prop_assert!(fixed_point_residual(&rooted, &values) < 1e-10);
        prop_assert!(values.m.iter().all(|&m| m > 0.0 && m <= 1.0));
    }
}
