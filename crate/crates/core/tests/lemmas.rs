use std::sync::Arc;

use proptest::prelude::*;
use rand::Rng;
use statrs::function::{beta::beta_reg, factorial::ln_binomial, gamma as sg};

use satbody_core::lemmas::{
    binomial_sigma, chevet_gordon_bound, chevet_gordon_experiment, coordinate_section_mean_width, gamma_m,
    ln_choose, ln_gamma, mean_width_mc, regularized_gamma_p, regularized_gamma_q, shrinking_experiment,
    sv_tail_experiment, tled_bound_check, turan_brute, turan_select, within_three_sigma, ProbeSet, ZeroOneMatrix,
};
use satbody_core::linalg::{self, sample_orthogonal};
use satbody_core::{make_norm_oracle, BlockGaussianMap, DenseMatrix, NormKind, QuotientBody, RngStream};

// ---------------------------------------------------------------- gamma

/// erfc to full double precision: Maclaurin series of erf below 2, the
/// Laplace continued fraction above.
fn erfc(x: f64) -> f64 {
    assert!(x >= 0.0);
    if x < 2.0 {
        let mut term = x;
        let mut sum = x;
        for n in 1..200 {
            term *= -x * x / n as f64;
            let add = term / (2 * n + 1) as f64;
            sum += add;
            if add.abs() < 1e-18 {
                break;
            }
        }
        1.0 - 2.0 / std::f64::consts::PI.sqrt() * sum
    } else {
        let mut f = x;
        for n in (1..=300).rev() {
            f = x + (n as f64 / 2.0) / f;
        }
        (-x * x).exp() / (std::f64::consts::PI.sqrt() * f)
    }
}

#[test]
fn erfc_oracle_reference_values() {
    assert!((erfc(0.0) - 1.0).abs() < 1e-16);
    assert!((erfc(1.0) - 0.157_299_207_050_285_13).abs() < 1e-16);
    assert!((erfc(3.0) - 2.209_049_699_858_544e-5).abs() < 1e-19);
    assert!((erfc(2.0) - 0.004_677_734_981_047_266).abs() < 1e-17);
    assert!((erfc(1.0 / 2f64.sqrt()) - 0.317_310_507_862_914_1).abs() < 1e-15);
    // the two branches agree near the switch
    let below = erfc(2.0 - 1e-9);
    assert!((below - erfc(2.0)).abs() < 1e-10 && below > erfc(2.0));
}

/// `P(χ²_m ≥ m)` from the finite sums for the upper incomplete gamma at
/// integer and half-integer order, evaluated term by term in log space.
fn gamma_m_series(m: u64) -> f64 {
    let x = m as f64 / 2.0;
    if m % 2 == 0 {
        let n = m / 2;
        (0..n)
            .map(|i| (-x + i as f64 * x.ln() - sg::ln_gamma(i as f64 + 1.0)).exp())
            .sum()
    } else {
        let n = (m - 1) / 2;
        erfc(x.sqrt())
            + (0..n)
                .map(|i| (-x + (i as f64 + 0.5) * x.ln() - sg::ln_gamma(i as f64 + 1.5)).exp())
                .sum::<f64>()
    }
}

#[test]
fn gamma_two_is_inverse_e_and_one_is_gaussian_tail() {
    assert!((gamma_m(2).unwrap() - (-1.0f64).exp()).abs() < 1e-12);
    let g1 = gamma_m(1).unwrap();
    assert!((g1 - erfc(1.0 / 2f64.sqrt())).abs() < 1e-12);
    assert!((g1 - 0.31731050786).abs() < 1e-10);
}

#[test]
fn gamma_m_matches_finite_sums() {
    for m in (1..=400).chain([777, 1000, 1001, 1999, 2000]) {
        let a = gamma_m(m).unwrap();
        let b = gamma_m_series(m);
        assert!((a - b).abs() <= 1e-12 * b.max(1e-300), "m={m}: {a} vs {b}");
    }
}

#[test]
fn gamma_m_is_increasing_and_tends_to_half() {
    let mut prev = gamma_m(1).unwrap();
    for m in 2..=10_000 {
        let g = gamma_m(m).unwrap();
        assert!(g > prev, "not increasing at m={m}");
        assert!(g >= (-1.0f64).exp() - 1e-15);
        prev = g;
    }
    assert!((gamma_m(1_000_000).unwrap() - 0.5).abs() < 1e-3);
    assert!(gamma_m(0).is_err());
}

#[test]
fn incomplete_gamma_matches_reference_library() {
    for &a in &[0.5, 1.0, 2.5, 7.0, 12.0, 40.0, 150.5] {
        for &x in &[0.1, 1.0, 3.0, 10.0, 45.0, 160.0] {
            let p = regularized_gamma_p(a, x).unwrap();
            let q = regularized_gamma_q(a, x).unwrap();
            assert!((p + q - 1.0).abs() < 1e-12);
            assert!((p - sg::gamma_lr(a, x)).abs() < 1e-9, "P({a},{x})");
            assert!((q - sg::gamma_ur(a, x)).abs() < 1e-9, "Q({a},{x})");
        }
    }
}

#[test]
fn ln_choose_matches_reference_library() {
    for n in [0u64, 1, 5, 20, 64, 240, 1000] {
        for r in [0u64, 1, n / 3, n / 2, n] {
            let a = ln_choose(n as f64, r as f64);
            let b = ln_binomial(n, r);
            assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0), "C({n},{r})");
        }
    }
}

proptest! {
    #[test]
    fn ln_gamma_matches_reference_library(x in 0.01f64..500.0) {
        let a = ln_gamma(x);
        let b = sg::ln_gamma(x);
        prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{} vs {}", a, b);
    }

    #[test]
    fn incomplete_gamma_is_a_distribution_function(a in 0.1f64..200.0, x in 0.0f64..400.0, dx in 0.0f64..5.0) {
        let p1 = regularized_gamma_p(a, x).unwrap();
        let p2 = regularized_gamma_p(a, x + dx).unwrap();
        prop_assert!((0.0..=1.0).contains(&p1));
        prop_assert!(p2 >= p1 - 1e-15);
    }
}

// ---------------------------------------------------------------- turan

fn random_matrix(n: usize, rng: &RngStream) -> ZeroOneMatrix {
    let mut gen = rng.generator();
    let density: f64 = gen.random();
    let parents: Vec<Option<usize>> = (0..n)
        .map(|j| {
            if n < 2 || gen.random::<f64>() >= density {
                None
            } else {
                let i = gen.random_range(0..n - 1);
                Some(if i >= j { i + 1 } else { i })
            }
        })
        .collect();
    ZeroOneMatrix::from_column_parents(&parents).unwrap()
}

/// Largest valid set by plain enumeration of every subset.
fn max_independent_by_enumeration(l: &ZeroOneMatrix) -> usize {
    let n = l.size();
    (0u32..1 << n)
        .filter(|mask| {
            let set: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            l.is_independent(&set)
        })
        .map(|mask| mask.count_ones() as usize)
        .max()
        .unwrap()
}

#[test]
fn turan_examples() {
    let z = ZeroOneMatrix::zeros(8).unwrap();
    assert_eq!(turan_select(&z), (0..8).collect::<Vec<_>>());
    assert_eq!(turan_brute(&z).unwrap(), (0..8).collect::<Vec<_>>());

    // ones at (2,1), (3,2), (4,3) in 1-based indexing
    let path = ZeroOneMatrix::from_ones(4, &[(1, 0), (2, 1), (3, 2)]).unwrap();
    let sel = turan_select(&path);
    assert!(sel.len() >= 2 && path.is_independent(&sel));
    assert_eq!(turan_brute(&path).unwrap().len(), max_independent_by_enumeration(&path));

    let shift: Vec<(usize, usize)> = (0..12).map(|j| ((j + 1) % 12, j)).collect();
    let cyc = ZeroOneMatrix::from_ones(12, &shift).unwrap();
    let sel = turan_select(&cyc);
    assert!(sel.len() >= 3 && cyc.is_independent(&sel));
    let best = turan_brute(&cyc).unwrap();
    assert!(best.len() >= 4 && cyc.is_independent(&best));
    assert_eq!(best.len(), max_independent_by_enumeration(&cyc));
}

#[test]
fn brute_force_meets_one_third_on_random_matrices_of_size_twelve() {
    let rng = RngStream::new(12, 12);
    for t in 0..1000 {
        let l = random_matrix(12, &rng.child(t));
        let b = turan_brute(&l).unwrap();
        assert!(b.len() >= 4 && l.is_independent(&b), "trial {t}");
    }
}

#[test]
fn brute_force_rejects_large_instances() {
    assert!(turan_brute(&ZeroOneMatrix::zeros(23).unwrap()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn selection_is_valid_and_large(n in 1usize..=64, seed in any::<u64>()) {
        let l = random_matrix(n, &RngStream::new(seed, 0));
        let sel = turan_select(&l);
        prop_assert!(l.is_independent(&sel));
        prop_assert!(sel.len() >= n.div_ceil(4));
        prop_assert!(sel.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn brute_force_is_maximum(n in 1usize..=10, seed in any::<u64>()) {
        let l = random_matrix(n, &RngStream::new(seed, 1));
        let b = turan_brute(&l).unwrap();
        prop_assert!(l.is_independent(&b));
        prop_assert_eq!(b.len(), max_independent_by_enumeration(&l));
        prop_assert!(b.len() >= turan_select(&l).len());
        prop_assert!(b.len() >= n.div_ceil(3));
    }
}

// ---------------------------------------------------------------- tails

#[test]
fn scalar_tail_matches_closed_form() {
    // m = k = 1, σ = 1: s₁ = |g|, the threshold is (√1 + √1)σ + t = 2 + t
    // and P(|g| > 2 + t) = erfc((2+t)/√2).
    let grid = [0.0, 0.5, 1.0, 2.0];
    let trials = 20_000;
    let r = sv_tail_experiment(1, 1, 1.0, &grid, trials, &RngStream::new(3, 3)).unwrap();
    assert_eq!(r.theoretical[0], 1.0);
    for (i, t) in grid.iter().enumerate() {
        let exact = erfc((2.0 + t) / 2f64.sqrt());
        assert!(exact <= (-t * t / 2.0).exp());
        let s = binomial_sigma(exact, trials);
        assert!((r.empirical_upper[i] - exact).abs() <= 4.0 * s, "t={t}: {} vs {exact}", r.empirical_upper[i]);
    }
    assert!(r.violations().is_empty());
}

#[test]
fn rectangular_tail_at_moderate_size() {
    let trials = 10_000;
    let r = sv_tail_experiment(100, 25, 0.1, &[0.05], trials, &RngStream::new(4, 4)).unwrap();
    let bound = (-0.05f64 * 0.05 / 0.02).exp();
    assert!((r.theoretical[0] - bound).abs() < 1e-15);
    assert!(within_three_sigma(r.empirical_upper[0], bound, trials));
    assert!(within_three_sigma(r.empirical_lower[0], bound, trials));
}

#[test]
fn tail_experiment_is_reproducible_and_frequencies_are_valid() {
    let a = sv_tail_experiment(20, 4, 0.3, &[0.0, 0.1], 300, &RngStream::new(1, 0)).unwrap();
    let b = sv_tail_experiment(20, 4, 0.3, &[0.0, 0.1], 300, &RngStream::new(1, 0)).unwrap();
    assert_eq!(a, b);
    assert!(a.empirical_upper.iter().chain(&a.empirical_lower).all(|f| (0.0..=1.0).contains(f)));
}

// ---------------------------------------------------------------- mean width

#[test]
fn mean_width_of_ball_and_origin() {
    let rng = RngStream::new(0, 0);
    let ball = mean_width_mc(|_| 1.0, 9, 1000, &rng).unwrap();
    assert_eq!((ball.estimate, ball.std_error), (1.0, 0.0));
    let origin = mean_width_mc(|_| 0.0, 9, 1000, &rng).unwrap();
    assert_eq!(origin.estimate, 0.0);
    // support of B₂ computed from the sample itself
    let ball = mean_width_mc(linalg::euclidean_norm, 9, 1000, &rng).unwrap();
    assert!((ball.estimate - 1.0).abs() < 1e-12);
}

/// `Γ(m/2)Γ((k+1)/2) / (Γ(k/2)Γ((m+1)/2))` with the reference log-gamma.
fn section_oracle(m: usize, k: usize) -> f64 {
    let (m, k) = (m as f64, k as f64);
    (sg::ln_gamma(m / 2.0) + sg::ln_gamma((k + 1.0) / 2.0) - sg::ln_gamma(k / 2.0) - sg::ln_gamma((m + 1.0) / 2.0))
        .exp()
}

#[test]
fn coordinate_section_matches_oracle_and_simulation() {
    for (m, k) in [(50, 8), (50, 50), (10, 1), (200, 13)] {
        let a = coordinate_section_mean_width(m, k).unwrap();
        assert!((a - section_oracle(m, k)).abs() < 1e-12, "({m},{k})");
        assert!(a <= (k as f64 / m as f64).sqrt() + 1e-15);
    }
    let est = mean_width_mc(|x| linalg::euclidean_norm(&x[..8]), 50, 200_000, &RngStream::new(8, 50)).unwrap();
    let oracle = section_oracle(50, 8);
    assert!((est.estimate - oracle).abs() <= 3.0 * est.std_error, "{:?} vs {oracle}", est);
    assert!(est.estimate <= (8.0f64 / 50.0).sqrt() + 3.0 * est.std_error);
}

#[test]
fn mean_width_is_rotation_invariant() {
    let (m, k) = (12, 3);
    let q = sample_orthogonal(m, &RngStream::new(6, 6)).unwrap();
    let rng = RngStream::new(7, 7);
    let plain = mean_width_mc(|x| linalg::euclidean_norm(&x[..k]), m, 20_000, &rng.child(0)).unwrap();
    let rotated = mean_width_mc(
        |x| linalg::euclidean_norm(&q.mul_vec(x).unwrap()[..k]),
        m,
        20_000,
        &rng.child(1),
    )
    .unwrap();
    let se = (plain.std_error.powi(2) + rotated.std_error.powi(2)).sqrt();
    assert!((plain.estimate - rotated.estimate).abs() < 3.0 * se);
}

fn orthogonal_block_body(m: usize, blocks: usize, k: usize) -> QuotientBody {
    // blocks F_j ↦ span(e_{jk}, …, e_{jk+k−1}), pairwise orthogonal
    let map = BlockGaussianMap::from_matrix(blocks, k, DenseMatrix::identity(m).column_block(0, blocks * k).unwrap())
        .unwrap();
    QuotientBody::new(Arc::new(map), None, make_norm_oracle(NormKind::L1, k).unwrap(), 1.0).unwrap()
}

#[test]
fn tled_with_one_block_needs_no_constant() {
    let b = orthogonal_block_body(64, 32, 2);
    let r = tled_bound_check(&b, &[3], 0.0, 500, &RngStream::new(1, 2)).unwrap();
    assert!(r.holds);
    assert_eq!(r.c0_min, Some(0.0));
}

#[test]
fn tled_orthogonal_blocks_give_finite_constant() {
    let b = orthogonal_block_body(64, 32, 2);
    let jc: Vec<usize> = (0..32).collect();
    let r = tled_bound_check(&b, &jc, 1.0, 5000, &RngStream::new(1, 3)).unwrap();
    let c0 = r.c0_min.expect("finite constant");
    assert!(c0.is_finite() && c0 > 0.0);
    assert!((r.log_term - (32f64.ln() / 64.0).sqrt()).abs() < 1e-15);
}

#[test]
fn tled_log_term_scales_with_inverse_root_of_m() {
    let small = tled_bound_check(&orthogonal_block_body(32, 8, 2), &[0, 1], 1.0, 200, &RngStream::new(2, 0)).unwrap();
    let large = tled_bound_check(&orthogonal_block_body(64, 8, 2), &[0, 1], 1.0, 200, &RngStream::new(2, 0)).unwrap();
    assert!((small.log_term / large.log_term - 2f64.sqrt()).abs() < 1e-12);
}

// ---------------------------------------------------------------- shrinking

#[test]
fn huge_t_never_fails() {
    let r = shrinking_experiment(&ProbeSet::BallSection { dim: 5, radius: 1.0 }, 30, 3, 1.0, 2.0, 300, &RngStream::new(1, 1))
        .unwrap();
    assert_eq!(r.empirical_fail, 0.0);
}

#[test]
fn single_point_failure_matches_beta_tail() {
    // |P_H e₁|² ~ Beta(d/2, (m−d)/2)
    let (m, d, t) = (30, 3, 0.05);
    let mut e1 = vec![0.0; m];
    e1[0] = 1.0;
    let trials = 4000;
    let r = shrinking_experiment(&ProbeSet::PointCloud(vec![e1]), m, d, 1.0, t, trials, &RngStream::new(5, 9)).unwrap();
    let radius = r.radius_bound;
    let p_fail = 1.0 - beta_reg(d as f64 / 2.0, (m - d) as f64 / 2.0, (radius * radius).min(1.0));
    let s = binomial_sigma(p_fail, trials);
    assert!((r.empirical_fail - p_fail).abs() <= 3.0 * s, "{} vs {p_fail}", r.empirical_fail);
    assert!(r.within_bound());
}

#[test]
fn ball_section_shrinking_bound() {
    let trials = 1000;
    let r = shrinking_experiment(&ProbeSet::BallSection { dim: 8, radius: 1.0 }, 60, 6, 1.0, 0.4, trials, &RngStream::new(6, 0))
        .unwrap();
    let bound = (-0.16f64 * 60.0 / 2.0 + 1.0).exp().min(1.0);
    assert!((r.theoretical_fail - bound).abs() < 1e-15);
    assert!(within_three_sigma(r.empirical_fail, bound, trials));
}

// ---------------------------------------------------------------- chevet-gordon

#[test]
fn chevet_gordon_examples() {
    assert!((chevet_gordon_bound(4, 16, 2.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
    let origin = chevet_gordon_experiment(&ProbeSet::PointCloud(vec![vec![0.0; 10]]), 3, 10, 200, &RngStream::new(1, 0))
        .unwrap();
    assert_eq!(origin.mean_max, 0.0);
    assert!(origin.within_bound());

    // S = B₂ᵐ: E s₁(A) ≤ √(d/m) + 1
    let (d, m) = (5, 20);
    let ball = chevet_gordon_experiment(&ProbeSet::BallSection { dim: m, radius: 1.0 }, d, m, 1000, &RngStream::new(2, 0))
        .unwrap();
    assert!((ball.bound - ((d as f64 / m as f64).sqrt() + 1.0)).abs() < 1e-12);
    assert!(ball.within_bound());

    let cloud = vec![vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 1.0, 0.0, 0.0], vec![0.6, -0.8, 0.0, 0.0]];
    let r = chevet_gordon_experiment(&ProbeSet::PointCloud(cloud), 2, 4, 1000, &RngStream::new(3, 0)).unwrap();
    assert!(r.within_bound(), "{r:?}");
}
