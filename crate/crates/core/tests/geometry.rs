use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stit_core::{run_mnw, ConvexPolytope, Hyperplane, HyperplaneMeasureSpec};

fn angle_normal(theta: f64) -> Vec<f64> {
    vec![theta.cos(), theta.sin()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn polygon_split_preserves_area(n in 3usize..12, radius in 0.2f64..3.0, theta in 0.0f64..std::f64::consts::PI, frac in 0.05f64..0.95) {
        let p = ConvexPolytope::regular_polygon(n, radius).unwrap();
        let u = angle_normal(theta);
        let (lo, hi) = p.support_range(&u);
        let h = Hyperplane::new(u, lo + frac * (hi - lo)).unwrap();
        let s = p.split(&h).unwrap();
        prop_assert!((s.plus.volume() + s.minus.volume() - p.volume()).abs() < 1e-9 * p.volume());
        let section = p.intersect_with_hyperplane(&h).unwrap().unwrap();
        prop_assert!((section.volume() - s.interface.volume()).abs() < 1e-9 * radius);
    }

    #[test]
    fn box_split_preserves_volume(sides in proptest::collection::vec(0.1f64..4.0, 3), axis in 0usize..3, frac in 0.01f64..0.99) {
        let p = ConvexPolytope::axis_box(vec![0.0; 3], sides.clone()).unwrap();
        let h = Hyperplane::axis(3, axis, frac * sides[axis]);
        let s = p.split(&h).unwrap();
        let vol: f64 = sides.iter().product();
        prop_assert!((s.plus.volume() + s.minus.volume() - vol).abs() < 1e-12 * vol);
        prop_assert!((s.interface.volume() * sides[axis] - vol).abs() < 1e-12 * vol);
    }

    #[test]
    fn width_and_volume_scale(c in 0.1f64..10.0, k in 0u32..2, theta in 0.0f64..6.28) {
        let p = ConvexPolytope::icosphere(k, 1.0).unwrap();
        let q = p.scaled(c);
        let u = vec![theta.cos() * 0.6, theta.sin() * 0.6, 0.8];
        prop_assert!((q.width(&u) - c * p.width(&u)).abs() < 1e-10 * c);
        prop_assert!((q.volume() - c.powi(3) * p.volume()).abs() < 1e-10 * c.powi(3));
    }

    #[test]
    fn tessellation_cells_partition_the_window(seed in any::<u64>(), t in 0.0f64..6.0) {
        let spec = HyperplaneMeasureSpec::isotropic(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let st = run_mnw(ConvexPolytope::unit_cube(2), &spec, t, &mut rng).unwrap();
        let total: f64 = st.cells().iter().map(|c| c.polytope.volume()).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
        prop_assert_eq!(st.cells().len(), st.maximal_polytopes().len() + 1);
        prop_assert!(st.maximal_polytopes().iter().all(|m| m.birth_time <= t));
    }
}

#[test]
fn serde_round_trip_of_polytopes() {
    for p in [
        ConvexPolytope::unit_cube(3),
        ConvexPolytope::regular_polygon(7, 1.5).unwrap(),
        ConvexPolytope::icosphere(1, 2.0).unwrap(),
    ] {
        let json = serde_json::to_string(&p).unwrap();
        let q: ConvexPolytope = serde_json::from_str(&json).unwrap();
        assert!((q.volume() - p.volume()).abs() < 1e-12 * p.volume());
        assert_eq!(q.num_vertices(), p.num_vertices());
    }
}
