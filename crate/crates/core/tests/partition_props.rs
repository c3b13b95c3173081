use proptest::prelude::*;
use quasicut_core::gen::{random_tree, random_treewidth2};
use quasicut_core::oracle::{all_pairs_dijkstra, exact_vs_empirical_report, is_quasipartition};
use quasicut_core::partition::{
    draw_z, is_r_bounded, lipschitz_constant, SeparatorProvider, SeparatorTree, TreeSampler, TreewidthSampler,
};
use quasicut_core::WeightedSupport;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn check_support(support: &WeightedSupport, sample: impl Fn(f64) -> quasicut_core::Quasipartition, seed: u64) {
    assert!((support.total_weight() - 1.0).abs() <= 1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..1000 {
        let z = draw_z(&mut rng, 2.0 * support.z_max());
        let item = support.locate(z).expect("every shift lies in some gap");
        assert_eq!(item.partition, sample(z));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tree_support_covers_every_shift(seed in any::<u64>(), n in 2usize..12, k in -3i32..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_tree(&mut rng, n);
        let r = 2f64.powi(k);
        let s = TreeSampler::new(&g, r, seed as usize % n).unwrap();
        let support = s.support();
        check_support(&support, |z| s.sample(z).unwrap(), seed);
        let m = all_pairs_dijkstra(&g);
        for item in support.items() {
            prop_assert!(is_quasipartition(item.partition.relation()));
            prop_assert!(is_r_bounded(&item.partition, &m, r));
        }
        prop_assert!(lipschitz_constant(&support, &m, r) <= 2.0);
    }

    #[test]
    fn treewidth_support_covers_every_shift(seed in any::<u64>(), n in 2usize..9, k in -2i32..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, td) = random_treewidth2(&mut rng, n, 0.8);
        let r = 2f64.powi(k);
        let hierarchy = SeparatorTree::build(&g, &SeparatorProvider::Decomposition(td)).unwrap();
        let t = hierarchy.max_separator_size().max(1) as f64;
        let s = TreewidthSampler::new(&g, r, hierarchy).unwrap();
        let support = s.support();
        prop_assert!(support.len() < n * n);
        check_support(&support, |z| s.sample(z).unwrap(), seed);
        let m = all_pairs_dijkstra(&g);
        for item in support.items() {
            prop_assert!(is_quasipartition(item.partition.relation()));
            prop_assert!(is_r_bounded(&item.partition, &m, r));
        }
        let levels = f64::from(quasicut_core::metric::floor_log2(n as f64) + 1);
        prop_assert!(lipschitz_constant(&support, &m, r) <= 4.0 * t * levels);
    }
}

#[test]
fn tree_monte_carlo_matches_exact_probabilities() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [3, 4, 5] {
        let g = random_tree(&mut rng, n);
        let m = all_pairs_dijkstra(&g);
        let r = m.max_finite().unwrap().max(1.0);
        let s = TreeSampler::new(&g, r, 0).unwrap();
        let pairs: Vec<_> = m.off_diagonal().collect();
        let report =
            exact_vs_empirical_report(&s.support(), |z| s.sample(z).unwrap(), &pairs, 20_000, n as u64).unwrap();
        for c in report {
            assert!(c.within, "{c:?}");
        }
    }
}

#[test]
fn treewidth_monte_carlo_matches_exact_probabilities() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in [4, 5] {
        let (g, td) = random_treewidth2(&mut rng, n, 1.0);
        let m = all_pairs_dijkstra(&g);
        let r = m.max_finite().unwrap().max(1.0);
        let s = TreewidthSampler::with_provider(&g, r, &SeparatorProvider::Decomposition(td)).unwrap();
        let pairs: Vec<_> = m.off_diagonal().collect();
        let report =
            exact_vs_empirical_report(&s.support(), |z| s.sample(z).unwrap(), &pairs, 20_000, n as u64).unwrap();
        for c in report {
            assert!(c.within, "{c:?}");
        }
    }
}
