//! Property tests for the tree layer: word reduction, metric structure,
//! translation isometry, sphere growth, boundary and covering counts.

use proptest::prelude::*;

use cayley_contour::tree::{
    ball, covering_multiplicity, distance, geodesic, intersecting_balls, outer_boundary,
    random_connected, sphere, translate, vertices_within, Vertex, VertexSet,
};

fn walk(k: u8) -> impl Strategy<Value = Vertex> {
    prop::collection::vec(1..=k + 1, 0..12).prop_map(|letters| {
        letters
            .into_iter()
            .fold(Vertex::root(), |v, g| v.step(g))
    })
}

proptest! {
    #[test]
    fn words_stay_reduced(v in walk(2)) {
        let letters = v.letters();
        for pair in letters.windows(2) {
            prop_assert_ne!(pair[0], pair[1]);
        }
        prop_assert_eq!(v.depth(), distance(&v, &Vertex::root()));
    }

    #[test]
    fn distance_is_a_tree_metric(x in walk(2), y in walk(2), z in walk(2)) {
        prop_assert_eq!(distance(&x, &y), distance(&y, &x));
        prop_assert_eq!(distance(&x, &y) == 0, x == y);
        prop_assert!(distance(&x, &z) <= distance(&x, &y) + distance(&y, &z));
        // geodesic length agrees
        prop_assert_eq!(geodesic(&x, &y).len(), distance(&x, &y) + 1);
    }

    #[test]
    fn translation_is_an_isometry(x in walk(2), y in walk(2), g in walk(2)) {
        prop_assert_eq!(
            distance(&translate(&x, &g), &translate(&y, &g)),
            distance(&x, &y)
        );
    }

    #[test]
    fn ball_members_are_exact(c in walk(2), rp in 1usize..3) {
        let b = ball(&c, rp, 2);
        for m in b.members() {
            prop_assert!(distance(&c, m) <= rp);
        }
        // size formula
        prop_assert_eq!(b.len(), cayley_contour::tree::ball_size(2, rp));
    }

    #[test]
    fn covering_balls_contain_the_set(seed in 0u64..500, n in 1usize..4, r in 1usize..4) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let set = random_connected(2, n, Vertex::root(), &mut rng);
        if set.diameter() <= r {
            let count = covering_multiplicity(&set, r, 2).unwrap();
            prop_assert!(count >= 1);
            // verify membership of every counted center
            let rp = r.div_ceil(2);
            let verified = vertices_within(&set, rp, 2)
                .iter()
                .filter(|c| set.iter().all(|a| distance(c, a) <= rp))
                .count() as u64;
            prop_assert_eq!(count, verified);
        } else {
            prop_assert!(covering_multiplicity(&set, r, 2).is_err());
        }
    }

    #[test]
    fn intersecting_balls_match_double_loop(seed in 0u64..300, n in 1usize..8, rp in 1usize..3) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let set = random_connected(2, n, Vertex::root(), &mut rng);
        let primary = intersecting_balls(&set, rp, 2);
        // independent oracle: widen the candidate zone and test every ball
        // member against every set element
        let zone = vertices_within(&set, rp + 1, 2);
        let oracle: Vec<Vertex> = zone
            .iter()
            .filter(|c| {
                ball(c, rp, 2)
                    .members()
                    .iter()
                    .any(|m| set.iter().any(|a| a == m))
            })
            .cloned()
            .collect();
        let primary_centers: VertexSet = primary.iter().map(|b| b.center.clone()).collect();
        let oracle_centers: VertexSet = oracle.into_iter().collect();
        prop_assert_eq!(primary_centers, oracle_centers);
    }
}

#[test]
fn sphere_growth_both_orders() {
    for k in [2u8, 3] {
        for n in 1..=6usize {
            let expect = (k as usize + 1) * (k as usize).pow(n as u32 - 1);
            assert_eq!(sphere(n, k).len(), expect, "k={k} n={n}");
        }
    }
}

#[test]
fn boundary_formula_on_random_connected_sets() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for trial in 0..300 {
        let k = if trial % 2 == 0 { 2u8 } else { 3 };
        let n = rng.gen_range(1..=30usize);
        let set = random_connected(k, n, Vertex::root(), &mut rng);
        assert!(set.is_connected(k));
        assert_eq!(outer_boundary(&set, k).len(), (k as usize - 1) * n + 2);
    }
}
