//! Brute-force references for single-polygon translation surfaces: straight
//! lines are followed copy by copy through the glued sides, and candidate
//! targets come from developing polygon copies into the plane.

#![allow(dead_code)]

use std::f64::consts::PI;

use flatcone::surface::{FlatSurface, GlueKind};
use flatcone::unfolding::SaddleConnection;

const EPS: f64 = 1e-8;

type P = [f64; 2];

fn sub(a: P, b: P) -> P {
    [a[0] - b[0], a[1] - b[1]]
}

fn add(a: P, b: P) -> P {
    [a[0] + b[0], a[1] + b[1]]
}

fn scale(a: P, s: f64) -> P {
    [a[0] * s, a[1] * s]
}

fn cross(a: P, b: P) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn norm(a: P) -> f64 {
    a[0].hypot(a[1])
}

fn segment_distance(x: P, a: P, b: P) -> f64 {
    let d = sub(b, a);
    let t = ((x[0] - a[0]) * d[0] + (x[1] - a[1]) * d[1]) / (d[0] * d[0] + d[1] * d[1]);
    norm(sub(x, add(a, scale(d, t.clamp(0.0, 1.0)))))
}

/// Counter-clockwise angle from `a` to `b` in `[0, 2π)`.
fn ccw(a: P, b: P) -> f64 {
    let t = cross(a, b).atan2(a[0] * b[0] + a[1] * b[1]);
    if t < 0.0 {
        t + 2.0 * PI
    } else {
        t
    }
}

pub struct Hit {
    pub len: f64,
    pub corner: usize,
    pub dir: P,
}

/// A convex polygon with every side glued by translation to another side.
pub struct Unfolder {
    pub v: Vec<P>,
    pub partner: Vec<usize>,
    /// Angle coordinate at which each corner's wedge starts in the star of
    /// the (single) vertex class.
    pub offset: Vec<f64>,
    pub total_angle: f64,
}

impl Unfolder {
    pub fn new(s: &FlatSurface<f64>) -> Self {
        let d = s.description();
        assert_eq!(d.polygons.len(), 1, "oracle handles one polygon");
        let v: Vec<P> = d.polygons[0].vertices.iter().map(|p| [p.x, p.y]).collect();
        let m = v.len();
        let mut partner = vec![usize::MAX; m];
        for g in &d.gluings {
            assert_eq!(g.kind, GlueKind::Translation);
            partner[g.side_a.edge] = g.side_b.edge;
            partner[g.side_b.edge] = g.side_a.edge;
        }
        let mut u = Unfolder { v, partner, offset: vec![f64::NAN; m], total_angle: 0.0 };
        let mut c = 0;
        let mut acc = 0.0;
        while u.offset[c].is_nan() {
            u.offset[c] = acc;
            acc += u.interior(c);
            c = u.partner[(c + m - 1) % m];
        }
        assert!(u.offset.iter().all(|o| !o.is_nan()), "oracle handles one vertex class");
        u.total_angle = acc;
        u
    }

    fn m(&self) -> usize {
        self.v.len()
    }

    fn edge(&self, i: usize) -> P {
        sub(self.v[(i + 1) % self.m()], self.v[i])
    }

    fn interior(&self, c: usize) -> f64 {
        let m = self.m();
        ccw(self.edge(c), scale(self.edge((c + m - 1) % m), -1.0))
    }

    /// Whether `d` leaves corner `c` into the polygon (half-open wedge).
    pub fn in_wedge(&self, c: usize, d: P) -> bool {
        ccw(self.edge(c), d) < self.interior(c) - 1e-12
    }

    pub fn angle_coordinate(&self, c: usize, d: P) -> f64 {
        (self.offset[c] + ccw(self.edge(c), d)) % self.total_angle
    }

    /// First vertex hit by the unit-speed line from `p` in direction `d`
    /// (unit), if within `max_len`.
    pub fn trace(&self, mut p: P, d: P, max_len: f64) -> Option<Hit> {
        let m = self.m();
        let mut len = 0.0;
        for _ in 0..100_000 {
            let mut best: Option<(f64, usize, f64)> = None;
            for i in 0..m {
                let e = self.edge(i);
                let den = cross(d, e);
                if den.abs() < 1e-15 {
                    continue;
                }
                let w = sub(self.v[i], p);
                let t = cross(w, e) / den;
                let s = cross(w, d) / den;
                if t > 1e-12 && (-EPS..=1.0 + EPS).contains(&s) && best.is_none_or(|b| t < b.0) {
                    best = Some((t, i, s));
                }
            }
            let (t, i, s) = best?;
            if len + t > max_len {
                return None;
            }
            len += t;
            let q = add(p, scale(d, t));
            for k in [i, (i + 1) % m] {
                if norm(sub(q, self.v[k])) < 1e-9 {
                    return Some(Hit { len, corner: k, dir: d });
                }
            }
            let j = self.partner[i];
            p = add(self.v[j], scale(self.edge(j), 1.0 - s));
        }
        panic!("trace did not terminate");
    }

    /// Vertex positions of the polygon copies met by straight segments of
    /// length at most `r` from `x`, unfolded copy by copy with the angular
    /// window still visible through the sides crossed so far.
    pub fn developed_vertices(&self, x: P, r: f64) -> Vec<P> {
        let mut out = Vec::new();
        self.unfold(x, r, [0.0, 0.0], None, None, &mut out);
        out
    }

    fn unfold(&self, x: P, r: f64, o: P, entry: Option<usize>, window: Option<(P, P)>, out: &mut Vec<P>) {
        let m = self.m();
        out.extend(self.v.iter().map(|&a| add(a, o)));
        for e in 0..m {
            if Some(e) == entry {
                continue;
            }
            let p = add(self.v[e], o);
            let q = add(self.v[(e + 1) % m], o);
            // Only sides facing away from `x` can be crossed on the way out.
            if cross(sub(q, p), sub(x, p)) <= 1e-14 || segment_distance(x, p, q) > r {
                continue;
            }
            let (mut lo, mut hi) = (sub(p, x), sub(q, x));
            if let Some((a, b)) = window {
                if cross(lo, a) > 0.0 {
                    lo = a;
                }
                if cross(b, hi) > 0.0 {
                    hi = b;
                }
                if cross(lo, hi) < -1e-14 * norm(lo) * norm(hi) {
                    continue;
                }
            }
            let j = self.partner[e];
            let o2 = add(o, sub(self.v[e], self.v[(j + 1) % m]));
            self.unfold(x, r, o2, Some(j), Some((lo, hi)), out);
        }
    }

    /// Directions from `x` towards developed vertices within `r`, deduplicated.
    fn directions(&self, x: P, r: f64) -> Vec<P> {
        let mut dirs: Vec<(f64, f64, P)> = self
            .developed_vertices(x, r)
            .into_iter()
            .map(|w| sub(w, x))
            .filter(|w| norm(*w) > 1e-9 && norm(*w) <= r + 1e-9)
            .map(|w| (w[1].atan2(w[0]), norm(w), scale(w, 1.0 / norm(w))))
            .collect();
        dirs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        // Along one line the nearest vertex gives the most accurate direction.
        dirs.dedup_by(|a, b| {
            let same = (a.0 - b.0).abs() < 1e-11;
            if same && a.1 < b.1 {
                *b = *a;
            }
            same
        });
        dirs.into_iter().map(|d| d.2).collect()
    }

    /// Every oriented saddle connection of length ≤ `max_len`, as
    /// `(length, holonomy, outgoing angle, back angle)`.
    pub fn saddle_connections(&self, max_len: f64) -> Vec<Sc> {
        let mut out = Vec::new();
        for c in 0..self.m() {
            for d in self.directions(self.v[c], max_len) {
                if !self.in_wedge(c, d) {
                    continue;
                }
                if let Some(h) = self.trace(self.v[c], d, max_len + 1e-9) {
                    out.push(Sc {
                        len: h.len,
                        holonomy: scale(d, h.len),
                        out: self.angle_coordinate(c, d),
                        back: self.angle_coordinate(h.corner, scale(h.dir, -1.0)),
                    });
                }
            }
        }
        out.sort_by(|a, b| a.len.partial_cmp(&b.len).unwrap());
        out
    }

    /// Distance from an interior point to the vertex class.
    pub fn distance_to_vertex(&self, x: P) -> f64 {
        let r0 = self.v.iter().map(|&a| norm(sub(a, x))).fold(f64::INFINITY, f64::min);
        self.directions(x, r0)
            .into_iter()
            .filter_map(|d| self.trace(x, d, r0 + 1e-9))
            .map(|h| h.len)
            .fold(r0, f64::min)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Sc {
    pub len: f64,
    pub holonomy: P,
    pub out: f64,
    pub back: f64,
}

/// Lifts of the vertex within each radius: chains of saddle connections
/// meeting the angle condition at every junction.
pub fn chain_counts(u: &Unfolder, radii: &[f64]) -> Vec<u64> {
    let r_max = *radii.last().unwrap();
    let scs = u.saddle_connections(r_max);
    let theta = u.total_angle;
    let mut lens = vec![0.0];
    let mut stack: Vec<(f64, f64)> = scs.iter().map(|s| (s.len, s.back)).collect();
    while let Some((len, back)) = stack.pop() {
        lens.push(len);
        for s in &scs {
            if len + s.len > r_max + 1e-9 {
                break;
            }
            let left = (back - s.out).rem_euclid(theta);
            if left >= PI - 1e-7 && theta - left >= PI - 1e-7 {
                stack.push((len + s.len, s.back));
            }
        }
    }
    radii.iter().map(|&r| lens.iter().filter(|&&l| l <= r + 1e-9).count() as u64).collect()
}

/// Lattice points of norm at most `r`.
pub fn gauss_circle(r: f64) -> u64 {
    let k = r.floor() as i64;
    let mut n = 0;
    for x in -k..=k {
        for y in -k..=k {
            if ((x * x + y * y) as f64) <= r * r + 1e-9 {
                n += 1;
            }
        }
    }
    n
}

/// Flat distance on the `w × h` rectangle torus.
pub fn torus_distance(p: P, q: P, w: f64, h: f64) -> f64 {
    let dx = (p[0] - q[0]).rem_euclid(w);
    let dy = (p[1] - q[1]).rem_euclid(h);
    dx.min(w - dx).hypot(dy.min(h - dy))
}

/// Pairs every library connection with an oracle one of the same length,
/// holonomy and star angles, the angle coordinates being allowed to differ
/// by one global rotation of the star. Returns the unmatched count on failure.
pub fn match_connections(u: &Unfolder, lib: &[SaddleConnection<f64>], oracle: &[Sc], tol: f64) -> Result<(), String> {
    if lib.len() != oracle.len() {
        return Err(format!("library {} vs oracle {}", lib.len(), oracle.len()));
    }
    if lib.is_empty() {
        return Ok(());
    }
    let theta = u.total_angle;
    let close = |a: f64, b: f64| {
        let d = (a - b).rem_euclid(theta);
        d.min(theta - d) < tol
    };
    let same_segment = |l: &SaddleConnection<f64>, o: &Sc| {
        (l.length - o.len).abs() < tol && (l.holonomy.x - o.holonomy[0]).abs() < tol && (l.holonomy.y - o.holonomy[1]).abs() < tol
    };
    let first = &lib[0];
    let mut unmatched = lib.len();
    for cand in oracle.iter().filter(|o| same_segment(first, o)) {
        let shift = first.start_angle - cand.out;
        let mut used = vec![false; oracle.len()];
        unmatched = 0;
        for l in lib {
            let hit = oracle.iter().enumerate().find(|(i, o)| {
                !used[*i] && same_segment(l, o) && close(l.start_angle, o.out + shift) && close(l.end_angle, o.back + shift)
            });
            match hit {
                Some((i, _)) => used[i] = true,
                None => unmatched += 1,
            }
        }
        if unmatched == 0 {
            return Ok(());
        }
    }
    Err(format!("{unmatched} of {} connections unmatched", lib.len()))
}
