use flatcone::fixtures;
use flatcone::invariants::counting_function;
use flatcone::surface::{parse_surface, serialize_surface, FlatSurface, SurfacePoint};
use flatcone::unfolding::{distance, enumerate_saddle_connections, is_local_geodesic, tighten, PiecewisePath};
use flatcone::Vector;
use proptest::prelude::*;

const CUTOFF: f64 = 3.0;

fn surfaces() -> Vec<FlatSurface<f64>> {
    vec![fixtures::octagon(), fixtures::one_cylinder(), fixtures::two_square_torus(), fixtures::rect_torus()]
}

/// A point strictly inside triangle `tri`, from raw weights.
fn point_in(s: &FlatSurface<f64>, tri: usize, w: (f64, f64, f64)) -> SurfacePoint<f64> {
    let t = &s.mesh().tris[tri % s.mesh().tris.len()];
    let (a, b, c) = (w.0 + 0.1, w.1 + 0.1, w.2 + 0.1);
    let sum = a + b + c;
    let p = t.pts[0].scale(a / sum) + t.pts[1].scale(b / sum) + t.pts[2].scale(c / sum);
    SurfacePoint::new(t.polygon, p)
}

fn weights() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64)
}

fn dist(s: &FlatSurface<f64>, p: &SurfacePoint<f64>, q: &SurfacePoint<f64>) -> f64 {
    distance(s, p, q, CUTOFF).unwrap().0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn distance_is_a_metric(k in 0usize..4, t in (0usize..64, 0usize..64, 0usize..64), w in (weights(), weights(), weights())) {
        let s = &surfaces()[k];
        let p = point_in(s, t.0, w.0);
        let q = point_in(s, t.1, w.1);
        let r = point_in(s, t.2, w.2);
        let (pq, qp) = (dist(s, &p, &q), dist(s, &q, &p));
        prop_assert!((pq - qp).abs() < 1e-9);
        prop_assert!(dist(s, &p, &p) < 1e-12);
        prop_assert!(dist(s, &p, &r) <= pq + dist(s, &q, &r) + 1e-9);
    }

    #[test]
    fn distance_paths_are_local_geodesics(k in 0usize..4, t in (0usize..64, 0usize..64), w in (weights(), weights())) {
        let s = &surfaces()[k];
        let (d, path) = distance(s, &point_in(s, t.0, w.0), &point_in(s, t.1, w.1), CUTOFF).unwrap();
        prop_assert!((path.length() - d).abs() < 1e-9);
        prop_assert!(is_local_geodesic(s, &path).unwrap().ok);
    }

    #[test]
    fn distance_scales_with_the_metric(c in 0.25..4.0f64, t in (0usize..64, 0usize..64), w in (weights(), weights())) {
        let s = fixtures::octagon::<f64>();
        let scaled = s.scale_metric(c).unwrap();
        let p = point_in(&s, t.0, w.0);
        let q = point_in(&s, t.1, w.1);
        let lift = |x: &SurfacePoint<f64>| SurfacePoint::new(x.polygon, x.position.scale(c));
        let d = dist(&s, &p, &q);
        let dc = distance(&scaled, &lift(&p), &lift(&q), CUTOFF * c).unwrap().0;
        prop_assert!((dc - c * d).abs() <= 1e-9 * (1.0 + c * d));
    }

    #[test]
    fn tightened_polylines_are_shorter_geodesics(
        k in 0usize..4,
        t in 0usize..64,
        w in weights(),
        legs in prop::collection::vec((-0.6..0.6f64, -0.6..0.6f64), 1..4),
    ) {
        let s = &surfaces()[k];
        let path = PiecewisePath { start: point_in(s, t, w), legs: legs.iter().map(|&(x, y)| Vector::new(x, y)).collect() };
        let raw: f64 = path.legs.iter().map(|v| v.norm()).sum();
        // Polylines through a cone point are not in general position; skip them.
        if let Ok(res) = tighten(s, &path, 10_000) {
            prop_assert!(res.converged);
            prop_assert!(res.length <= raw + 1e-9);
            prop_assert!(is_local_geodesic(s, &res.path).unwrap().ok);
        }
    }

    #[test]
    fn stretching_preserves_area_and_curvature(k in 0usize..4, lambda in 1.0..8.0f64) {
        let s = &surfaces()[k];
        let st = s.stretch(lambda).unwrap();
        prop_assert!((st.area() - s.area()).abs() < 1e-9 * s.area());
        prop_assert!(st.gauss_bonnet_residual() < 1e-9);
        prop_assert_eq!(st.genus(), s.genus());
    }

    #[test]
    fn counts_grow_with_radius(lambda in 1.0..2.0f64, grid in 0.05..0.2f64) {
        let s = fixtures::octagon::<f64>().stretch(lambda).unwrap();
        let table = counting_function(&s, 0, 1.2, grid).unwrap();
        prop_assert_eq!(table.counts[0], 1);
        prop_assert!(table.counts.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn serialization_round_trips() {
    for s in surfaces() {
        let text = serialize_surface(s.description());
        let back = parse_surface::<f64>(&text).unwrap();
        assert_eq!(back.description(), s.description());
        assert_eq!(serialize_surface(back.description()), text);
    }
}

#[test]
fn reversal_is_an_involution_on_connections() {
    for s in surfaces() {
        let scs = enumerate_saddle_connections(&s, 1.5).unwrap();
        for sc in &scs {
            let r = sc.reversed(&s);
            assert_eq!(r.reversed(&s).start_angle, sc.start_angle);
            let found = scs.iter().any(|o| {
                o.start == r.start && (o.start_angle - r.start_angle).abs() < 1e-9 && (o.length - r.length).abs() < 1e-9
            });
            assert!(found, "reverse of {sc:?} missing");
        }
    }
}

#[test]
fn tightening_through_a_cone_point_twice_is_one_visit() {
    let s = fixtures::octagon::<f64>();
    let path = PiecewisePath {
        start: SurfacePoint::new(0, Vector::new(0.16343795414442894, -0.09455830946793464)),
        legs: vec![
            Vector::new(0.20847729528637515, -0.17756673330228706),
            Vector::new(0.40556350014017484, 0.5169487001654302),
            Vector::new(0.12320515410133936, 0.48616808510198906),
        ],
    };
    let res = tighten(&s, &path, 10_000).unwrap();
    assert!(res.path.legs.iter().all(|l| l.length > 0.0));
    assert!(is_local_geodesic(&s, &res.path).unwrap().ok);
}
