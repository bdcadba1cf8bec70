mod oracles;

use nalgebra::DMatrix;
use perclab::walk::{escape_probability, hk_fit, killed_step, return_probabilities, DecayRegime, HkFitConfig, Semantics, StartMeasure};
use perclab::{Domain, Graph, MassVector};

#[test]
fn cycle_returns_match_central_binomials() {
    let g = Graph::cycle(128).unwrap();
    let p = return_probabilities(&g, 0, 30).unwrap();
    for n in 1..=15u32 {
        let exact = oracles::central_binomial_ratio(n);
        assert!((p[2 * n as usize - 1] - exact).abs() <= 1e-12 * exact, "n={n}");
        assert_eq!(p[2 * n as usize - 2], 0.0);
    }
}

#[test]
fn torus_returns_are_squared_binomials() {
    let g = Graph::torus(&[32, 32]).unwrap();
    let p = return_probabilities(&g, 5, 20).unwrap();
    for n in 1..=10u32 {
        // p_{2n} on Z^2 is C(2n, n)^2 / 4^{2n}
        let c = oracles::central_binomial_ratio(n);
        let z2 = c * c;
        assert!((p[2 * n as usize - 1] - z2).abs() <= 1e-12 * z2, "n={n}");
    }
}

#[test]
fn return_probability_refuses_the_boundary() {
    let g = Graph::cycle(16).unwrap();
    assert!(return_probabilities(&g, 0, 20).is_err());
}

fn dense_transition(g: &Graph, domain: &Domain) -> DMatrix<f64> {
    let n = g.vertex_count();
    DMatrix::from_fn(n, n, |u, v| {
        if domain.contains(u) && domain.contains(v) && g.neighbors(u).contains(&(v as u32)) {
            1.0 / g.degree(u) as f64
        } else {
            0.0
        }
    })
}

#[test]
fn killed_evolution_matches_dense_powers() {
    let g = Graph::tree_ball(3, 3).unwrap();
    let domain = g.ball(1, 2).unwrap();
    let p = dense_transition(&g, &domain);
    let mut mu = MassVector::uniform_on(&g, &domain);
    let mut row = DMatrix::from_row_slice(1, g.vertex_count(), mu.values());
    for _ in 0..12 {
        mu = killed_step(&g, &domain, &mu);
        row = &row * &p;
        for v in 0..g.vertex_count() {
            assert!((mu.values()[v] - row[(0, v)]).abs() < 1e-15);
        }
    }
}

#[test]
fn escape_from_a_point_is_a_return_probability() {
    let g = Graph::cycle(64).unwrap();
    let d = Domain::singleton(64, 0).unwrap();
    let q = escape_probability(&g, &d, 8, StartMeasure::UniformOnD, Semantics::Infinite).unwrap();
    assert!((q - oracles::central_binomial_ratio(4)).abs() < 1e-15);
}

#[test]
fn stretched_decay_on_the_tree() {
    let g = Graph::tree_ball(3, 16).unwrap();
    let fit = hk_fit(&g, 0, 30, &HkFitConfig::default()).unwrap();
    assert_eq!(fit.regime, DecayRegime::StretchedExponential);
    assert!((0.8..=1.0).contains(&fit.gamma), "{fit:?}");
}

#[test]
fn polynomial_decay_on_the_cycle() {
    let g = Graph::cycle(512).unwrap();
    let fit = hk_fit(&g, 0, 60, &HkFitConfig::default()).unwrap();
    assert_eq!(fit.regime, DecayRegime::Polynomial);
    assert!((fit.polynomial_fit.1 - 0.5).abs() < 0.05, "{fit:?}");
}
