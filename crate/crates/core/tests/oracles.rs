mod common;

use approx::assert_relative_eq;
use common::{chain_counts, gauss_circle, match_connections, torus_distance, Unfolder};
use flatcone::fixtures;
use flatcone::invariants::{counting_function, distance_to_sigma, packing_density};
use flatcone::polygon::{contains, point_segment_distance};
use flatcone::surface::SurfacePoint;
use flatcone::unfolding::{distance, enumerate_saddle_connections};
use flatcone::Vector;

#[test]
fn octagon_saddle_connections_match_unfolding() {
    let s = fixtures::octagon::<f64>();
    let u = Unfolder::new(&s);
    let shortest = enumerate_saddle_connections(&s, 1.0).unwrap()[0].length;
    let l = 2.0 * shortest;
    let lib = enumerate_saddle_connections(&s, l).unwrap();
    let oracle = u.saddle_connections(l);
    assert!(lib.len() > 8);
    match_connections(&u, &lib, &oracle, 1e-9).unwrap();
}

#[test]
fn octagon_star_has_angle_six_pi() {
    let u = Unfolder::new(&fixtures::octagon::<f64>());
    assert_relative_eq!(u.total_angle, 6.0 * std::f64::consts::PI, epsilon = 1e-12);
}

#[test]
fn torus_connections_are_primitive_lattice_vectors() {
    let s = fixtures::torus::<f64>();
    let lib = enumerate_saddle_connections(&s, 3.0).unwrap();
    let gcd = |mut a: i64, mut b: i64| {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a.abs()
    };
    let mut expected = 0;
    for x in -3i64..=3 {
        for y in -3i64..=3 {
            if (x, y) != (0, 0) && x * x + y * y <= 9 && gcd(x, y) == 1 {
                expected += 1;
            }
        }
    }
    assert_eq!(lib.len(), expected);
    match_connections(&Unfolder::new(&s), &lib, &Unfolder::new(&s).saddle_connections(3.0), 1e-9).unwrap();
}

#[test]
fn torus_counts_are_gauss_circle_counts() {
    let s = fixtures::torus::<f64>();
    let t = counting_function(&s, 0, 20.0, 1.0).unwrap();
    for (&r, &n) in t.radii.iter().zip(&t.counts) {
        assert_eq!(n, gauss_circle(r), "R = {r}");
    }
    assert_eq!(t.count_at(1.0), Some(5));
    assert_eq!(t.count_at(2.0), Some(13));
    assert_eq!(t.count_at(20.0), Some(1257));
}

#[test]
fn octagon_counts_match_chain_enumeration() {
    let s = fixtures::octagon::<f64>();
    let u = Unfolder::new(&s);
    let t = counting_function(&s, 0, 1.6, 0.1).unwrap();
    assert!(t.exhaustive);
    let oracle = chain_counts(&u, &t.radii);
    assert_eq!(t.counts, oracle);
    assert!(*oracle.last().unwrap() > 100);
}

#[test]
fn torus_distance_is_lattice_minimum() {
    let s = fixtures::rect_torus::<f64>();
    let d = s.description();
    let (w, h) = {
        let v = &d.polygons[0].vertices;
        (v[2].x - v[0].x, v[2].y - v[0].y)
    };
    let pts = [(0.1, 0.2), (0.9, 0.05), (0.5, 0.5), (0.33, 0.97), (0.01, 0.49)];
    for &(a, b) in &pts {
        for &(c, e) in &pts {
            let p = SurfacePoint::new(0, Vector::new(a * w, b * h));
            let q = SurfacePoint::new(0, Vector::new(c * w, e * h));
            let (dist, _) = distance(&s, &p, &q, w + h).unwrap();
            assert_relative_eq!(dist, torus_distance([p.position.x, p.position.y], [q.position.x, q.position.y], w, h), epsilon = 1e-9);
        }
    }
}

fn octagon_grid(step: f64) -> Vec<[f64; 2]> {
    let s = fixtures::octagon::<f64>();
    let v = &s.description().polygons[0].vertices;
    let poly: Vec<Vector> = v.clone();
    let mut out = Vec::new();
    let n = (1.2 / step).ceil() as i64;
    for i in -n..=n {
        for j in -n..=n {
            let p = Vector::new(i as f64 * step, j as f64 * step);
            let margin = (0..v.len()).map(|k| point_segment_distance(p, v[k], v[(k + 1) % v.len()])).fold(f64::INFINITY, f64::min);
            if contains(&poly, p, 0.0) && margin > 1e-6 {
                out.push([p.x, p.y]);
            }
        }
    }
    out
}

#[test]
fn distance_to_sigma_matches_straight_lines() {
    let s = fixtures::octagon::<f64>();
    let u = Unfolder::new(&s);
    for x in octagon_grid(0.13) {
        let p = SurfacePoint::new(0, Vector::new(x[0], x[1]));
        assert_relative_eq!(distance_to_sigma(&s, &p).unwrap(), u.distance_to_vertex(x), epsilon = 1e-9);
    }
}

#[test]
fn packing_density_matches_dense_grid() {
    let s = fixtures::octagon::<f64>();
    let u = Unfolder::new(&s);
    let step = 0.01;
    let grid_max = octagon_grid(step).into_iter().map(|x| u.distance_to_vertex(x)).fold(0.0, f64::max);
    let est = packing_density(&s, 1e-3).unwrap();
    // Both enclose the supremum: [rho, rho + tol] and [grid_max, grid_max + step/√2].
    assert!(est.rho <= grid_max + step / 2f64.sqrt() + 1e-12);
    assert!(grid_max <= est.rho + est.tolerance + 1e-12);
}
