mod oracles;

use perclab::montecarlo::MonteCarlo;
use perclab::percolation::{
    bootstrap_functional, bootstrap_report, insertion_tolerance_check, kappapk_bound_check, mtp_distance_check,
    mtp_percolation_check, surgery_check, tail_hats, tau_hat, two_ghost_check, two_ghost_hat, ClusterMeasure, KappaPkParams,
};
use perclab::Graph;

#[test]
fn tree_law_is_a_distribution() {
    let law = oracles::tree_cluster_law(3, 6, 0.4);
    assert!((law.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!((law[1] - 0.6f64.powi(3)).abs() < 1e-15);
    // root plus exactly one child, which is a leaf of its own cluster
    assert!((law[2] - 3.0 * 0.4 * 0.36 * 0.36).abs() < 1e-15);
    assert_eq!(law.len() - 1, Graph::tree_ball(3, 6).unwrap().vertex_count());
}

#[test]
fn tree_tails_agree_with_the_exact_law() {
    let g = Graph::tree_ball(3, 9).unwrap();
    let law = oracles::tree_cluster_law(3, 9, 0.5);
    let ns = [2usize, 4, 8, 16, 32];
    let est = tail_hats(&g, 0, 0.5, &ns, ClusterMeasure::Vertices, &MonteCarlo::new(200_000, 17)).unwrap();
    for (e, &n) in est.iter().zip(&ns) {
        assert!(e.contains(oracles::tail(&law, n)), "n={n}: {e:?} vs {}", oracles::tail(&law, n));
    }
}

#[test]
fn bootstrap_functional_agrees_with_the_exact_law() {
    let g = Graph::tree_ball(3, 9).unwrap();
    let law = oracles::tree_cluster_law(3, 9, 0.5);
    let exact = oracles::expectation(&law, |s| (s as f64).ln().sqrt().exp());
    let est = bootstrap_functional(&g, 0, 0.5, 0.5, &MonteCarlo::new(200_000, 3)).unwrap();
    assert!(est.contains(exact), "{est:?} vs {exact}");
    assert!((est.mean - exact).abs() <= 0.02 * exact);
}

#[test]
fn bootstrap_report_is_stable_and_bounded() {
    let g = Graph::tree_ball(3, 8).unwrap();
    let r = bootstrap_report(&g, 0, 0.4, 0.5, Some(2.0), &MonteCarlo::new(40_000, 9)).unwrap();
    assert!(r.stable, "{r:?}");
    assert_eq!(r.within_c6, Some(true));
}

#[test]
fn transport_identity_on_sampled_configurations() {
    for g in [Graph::torus(&[5, 5]).unwrap(), Graph::tree_ball(3, 4).unwrap()] {
        let r = mtp_percolation_check(&g, 0.4, &[1, 2, 3], 20, 77).unwrap();
        assert!(r.pass, "{r:?}");
        let d = mtp_distance_check(&g, 1).unwrap();
        assert!(d.pass);
        assert_eq!(d.sent, 2.0 * g.edge_count() as f64 / g.vertex_count() as f64);
    }
}

#[test]
fn insertion_tolerance_on_the_torus() {
    let g = Graph::torus(&[8, 8]).unwrap();
    for v in [1usize, 9, 18, 27] {
        let tau = tau_hat(&g, 0, v, 0.3, &MonteCarlo::new(20_000, 5)).unwrap();
        let r = insertion_tolerance_check(&g, 0, v, 0.3, &tau).unwrap();
        assert!(r.pass, "{r:?}");
    }
}

#[test]
fn two_ghost_bound_is_vacuous_on_small_n() {
    let g = Graph::tree_ball(3, 10).unwrap();
    let r = two_ghost_check(&g, 0.5, 16, &MonteCarlo::new(20_000, 4)).unwrap();
    assert!(r.pass && r.vacuous);
    assert_eq!(r.bound, Some(61.5));
    assert!(r.estimates[0].estimate.mean < 0.2);
}

#[test]
fn kappapk_at_zero_steps() {
    let g = Graph::tree_ball(3, 6).unwrap();
    let params = KappaPkParams { k: 0, beta: 0.5, alpha: 0.0, c2: 1.0, c1: None };
    let r = kappapk_bound_check(&g, 0.45, &params, &MonteCarlo::new(2_000, 8)).unwrap();
    assert_eq!(r.estimates[0].estimate.mean, 1.0);
    assert!(r.pass && r.conditional);
}

#[test]
fn seeded_baselines_are_frozen() {
    let g = Graph::torus(&[16, 16]).unwrap();
    let mc = MonteCarlo::new(20_000, 0x6773);
    let ghost = two_ghost_hat(&g, 0.45, 16, &mc).unwrap();
    let s = surgery_check(&g, 0.45, 8, 2, &mc).unwrap();
    let sums: Vec<f64> = s.stated.estimates.iter().map(|e| e.estimate.value_sum).collect();
    assert_eq!(ghost.value_sum, 1701.0);
    assert_eq!(sums, [17157.0, 9377.0, 2955.0]);
}
