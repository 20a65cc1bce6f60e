mod common;

use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use snowflake_embed::*;

prop_compose! {
    fn point_set(max_n: usize, max_m: usize)
        (n in 2..=max_n, m in 1..=max_m)
        (pts in prop::collection::vec(prop::collection::vec(-10.0..10.0f64, m), n))
        -> Vec<Vec<f64>>
    {
        pts
    }
}

/// Random metric: shortest paths over random positive edge weights.
fn random_metric(weights: &[f64], n: usize) -> FiniteMetricSpace {
    let mut d = DMatrix::zeros(n, n);
    let mut it = weights.iter();
    for i in 0..n {
        for j in (i + 1)..n {
            let w = *it.next().unwrap();
            d[(i, j)] = w;
            d[(j, i)] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[(i, k)] + d[(k, j)];
                if via < d[(i, j)] {
                    d[(i, j)] = via;
                }
            }
        }
    }
    FiniteMetricSpace::new(d, 1e-12).unwrap()
}

prop_compose! {
    fn metric_space(max_n: usize)
        (n in 2..=max_n)
        (weights in prop::collection::vec(0.1..10.0f64, n * (n - 1) / 2), n in Just(n))
        -> FiniteMetricSpace
    {
        random_metric(&weights, n)
    }
}

fn distinct(pts: &[Vec<f64>]) -> bool {
    let sq = squared_from_points(pts);
    (0..pts.len()).all(|i| (0..i).all(|j| sq[i][j] > 1e-6))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn snowflake_composes(x in metric_space(8), a in 0.01..1.0f64, b in 0.01..1.0f64) {
        let sa = SnowflakeExponent::new(a).unwrap();
        let sb = SnowflakeExponent::new(b).unwrap();
        let twice = snowflake(&snowflake(&x, sa), sb);
        let once = snowflake(&x, SnowflakeExponent::new(a * b).unwrap());
        for i in 0..x.len() {
            for j in 0..x.len() {
                let (u, v) = (twice.distance(i, j), once.distance(i, j));
                prop_assert!((u - v).abs() <= 1e-13 * v.max(1.0));
            }
        }
    }

    #[test]
    fn snowflake_preserves_the_metric_axioms(x in metric_space(10), a in 0.0..=1.0f64) {
        let s = snowflake(&x, SnowflakeExponent::new(a).unwrap());
        prop_assert!(validate_metric(s.distances().clone(), 1e-12).is_ok());
    }

    #[test]
    fn euclidean_metrics_validate(pts in point_set(12, 6)) {
        prop_assume!(distinct(&pts));
        let x = euclidean_metric(&cloud(&pts)).unwrap();
        prop_assert!(validate_metric(x.distances().clone(), 1e-9).is_ok());
    }

    #[test]
    fn centered_form_is_minus_half_the_distance_form(x in metric_space(10), seed in any::<u64>()) {
        let mut g = rng(seed);
        let w = WeightVector(sum_zero_weights(&mut g, x.len()));
        let d = squared_distance_matrix(&x);
        let b = gram_from_distances(&d);
        let lhs = quadratic_form(&b, &w).unwrap();
        let rhs = -0.5 * quadratic_form(&d, &w).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()) * x.max_distance().powi(2));
    }

    #[test]
    fn geometric_identity_holds(pts in point_set(12, 8), seed in any::<u64>()) {
        let mut g = rng(seed);
        let w = WeightVector(admissible_weights(&mut g, pts.len()));
        let (lhs, rhs) = geometric_form_check(&cloud(&pts), &w).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
    }

    #[test]
    fn euclidean_metrics_are_negative_type(pts in point_set(15, 6)) {
        prop_assume!(distinct(&pts));
        let r = check_negative_type(&euclidean_metric(&cloud(&pts)).unwrap(), 1e-9);
        prop_assert!(r.is_negative_type);
    }

    #[test]
    fn euclidean_snowflakes_are_strict(pts in point_set(10, 4), k in 1usize..=9) {
        prop_assume!(distinct(&pts));
        let x = euclidean_metric(&cloud(&pts)).unwrap();
        let alpha = SnowflakeExponent::new(k as f64 / 10.0).unwrap();
        prop_assert!(check_strict_negative_type(&x, alpha, 1e-9).is_ok());
    }

    #[test]
    fn too_many_points_are_affinely_dependent(m in 1usize..=4, extra in 1usize..=4, seed in any::<u64>()) {
        let mut g = rng(seed);
        let pts = random_points(&mut g, m + 1 + extra, m);
        prop_assume!(distinct(&pts));
        let r = general_position_certificate(&cloud(&pts), 1e-9).unwrap();
        prop_assert!(!r.is_strict);
        let w = r.witness.unwrap();
        prop_assert!(w.sum().abs() < 1e-10);
        let scale = squared_from_points(&pts).iter().flatten().fold(0.0f64, |a, &v| a.max(v));
        let d = squared_distance_matrix(&euclidean_metric(&cloud(&pts)).unwrap());
        prop_assert!(quadratic_form(&d, &w).unwrap().abs() <= 1e-9 * scale);
    }

    #[test]
    fn embedding_recovers_euclidean_distances(n in 2usize..=50, m in 1usize..=10, seed in any::<u64>()) {
        let mut g = rng(seed);
        let pts = random_points(&mut g, n, m);
        prop_assume!(distinct(&pts));
        let x = euclidean_metric(&cloud(&pts)).unwrap();
        let e = embed(&x, 1e-9).unwrap();
        prop_assert!(e.rank <= m.min(n - 1));
        let d = e.distances();
        for i in 0..n {
            for j in (i + 1)..n {
                prop_assert!((d[(i, j)] - x.distance(i, j)).abs() <= 1e-9 * x.distance(i, j));
            }
        }
    }

    #[test]
    fn snowflake_embeddings_have_full_rank(pts in point_set(20, 5), k in 1usize..=9) {
        prop_assume!(distinct(&pts));
        let x = euclidean_metric(&cloud(&pts)).unwrap();
        let e = snowflake_embed(&x, SnowflakeExponent::new(k as f64 / 10.0).unwrap(), 1e-9).unwrap();
        prop_assert_eq!(e.rank, pts.len() - 1);
        prop_assert!(e.residual <= 1e-8);
    }

    #[test]
    fn quotient_distance_is_a_pseudometric(seed in any::<u64>(), which in 0usize..4) {
        let action = match which {
            0 => OrthogonalAction::rotations(3).unwrap(),
            1 => OrthogonalAction::rotations(4).unwrap(),
            2 => OrthogonalAction::dihedral(3).unwrap(),
            _ => OrthogonalAction::dihedral(5).unwrap(),
        };
        let mut g = rng(seed);
        let p = random_points(&mut g, 3, 2);
        let d = |a: &[f64], b: &[f64]| quotient_distance(a, b, &action).unwrap();
        prop_assert!((d(&p[0], &p[1]) - d(&p[1], &p[0])).abs() < 1e-12);
        prop_assert!(d(&p[0], &p[2]) <= d(&p[0], &p[1]) + d(&p[1], &p[2]) + 1e-12);
        prop_assert!(d(&p[0], &p[0]) < 1e-15);
    }

    #[test]
    fn power_identity_holds_across_scales(t in 0.05..20.0f64, a in 0.05..0.95f64) {
        let r = verify_power_identity(t, a, &QuadratureSpec::default()).unwrap();
        prop_assert!(r.rel_err <= 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn decomposition_form_is_strictly_negative(n in 2usize..=6, m in 1usize..=3, a in 0.05..0.95f64, seed in any::<u64>()) {
        let mut g = rng(seed);
        let pts = random_points(&mut g, n, m);
        prop_assume!(distinct(&pts));
        let w = WeightVector(sum_zero_weights(&mut g, n));
        let r = strict_decomposition_check(&cloud(&pts), a, &w, &QuadratureSpec::default()).unwrap();
        prop_assert!(r.form_value < 0.0);
        prop_assert!(r.rel_diff() <= 1e-6);
    }

    #[test]
    fn quotient_pipeline_argmin_matches_geometry(seed in any::<u64>(), which in 0usize..4, k in 0usize..4) {
        let action = match which {
            0 => OrthogonalAction::rotations(3).unwrap(),
            1 => OrthogonalAction::rotations(4).unwrap(),
            2 => OrthogonalAction::dihedral(3).unwrap(),
            _ => OrthogonalAction::dihedral(2).unwrap(),
        };
        let alpha = SnowflakeExponent::new([0.1, 0.25, 0.5, 0.75][k]).unwrap();
        let mut g = rng(seed);
        let pts = random_points(&mut g, 3, 2);
        let Ok(q) = lift_orbits(&cloud(&pts), &action, 1e-3) else {
            return Ok(());
        };
        let e = qng_embed(&q, alpha, 1e-8).unwrap();
        prop_assert_eq!(e.zero_eigenvalues(1e-9), 1);
        for i in 0..3 {
            for j in (i + 1)..3 {
                let mut dists: Vec<(f64, usize)> = (0..action.order())
                    .map(|h| {
                        let hy = action.act(h, &pts[j]);
                        (pts[i].iter().zip(&hy).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt(), h)
                    })
                    .collect();
                dists.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
                if dists[1].0 - dists[0].0 <= 1e-6 {
                    continue;
                }
                let (_, achieved_g) = e.quotient_distance_between(i, j);
                prop_assert_eq!(achieved_g, dists[0].1);
            }
        }
    }
}

#[test]
fn alpha_one_on_collinear_points_has_rank_one() {
    for n in 3..12 {
        let pts: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64 * 0.7 - 1.0, 0.5 * i as f64]).collect();
        let x = euclidean_metric(&cloud(&pts)).unwrap();
        let e = embed(&snowflake(&x, SnowflakeExponent::new(1.0).unwrap()), 1e-9).unwrap();
        assert_eq!(e.rank, 1);
    }
}

#[test]
fn smallest_eigenvalue_decays_as_alpha_approaches_one() {
    let pts: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64]).collect();
    let x = euclidean_metric(&cloud(&pts)).unwrap();
    let smallest: Vec<f64> = [0.5, 0.9, 0.99]
        .iter()
        .map(|&a| {
            snowflake_embed(&x, SnowflakeExponent::new(a).unwrap(), 1e-12)
                .unwrap()
                .smallest_kept_eigenvalue()
                .unwrap()
        })
        .collect();
    assert!(smallest[0] > smallest[1] && smallest[1] > smallest[2], "{smallest:?}");
    assert!(smallest[2] > 0.0);
}

#[test]
fn snowflake_tends_to_the_simplex_as_alpha_vanishes() {
    let mut g = rng(5);
    let pts = random_points(&mut g, 8, 3);
    let x = euclidean_metric(&cloud(&pts)).unwrap();
    let alpha = 1e-3;
    let s = snowflake(&x, SnowflakeExponent::new(alpha).unwrap());
    for i in 0..8 {
        for j in 0..8 {
            if i == j {
                continue;
            }
            let d = x.distance(i, j);
            let bound = alpha * d.ln().abs() * d.max(1.0);
            assert!((s.distance(i, j) - 1.0).abs() <= bound);
        }
    }
}

#[test]
fn regular_permutations_are_a_homomorphism() {
    let action = OrthogonalAction::dihedral(4).unwrap();
    let pts = vec![vec![1.0, 0.3], vec![0.2, 2.0]];
    let q = lift_orbits(&cloud(&pts), &action, 1e-9).unwrap();
    let perms = q.action_permutations();
    let grp = action.group();
    for a in 0..grp.order() {
        for b in 0..grp.order() {
            assert_eq!(perms[a].compose(&perms[b]), perms[grp.mul(a, b)]);
        }
    }
}
