//! Flat surfaces given as Euclidean polygons glued along their sides by
//! translations or half-translations.
//!
//! Orientation convention: every polygon is counterclockwise and side `i`
//! runs from vertex `i` to vertex `i + 1`. A translation gluing identifies two
//! sides traversed in opposite directions (`v_b = -v_a`); a half-translation
//! composes with `-id` (`v_b = v_a`).

mod format;
pub mod mesh;
mod validate;

use std::collections::HashMap;

pub use format::{format_cycles, parse_cycles, parse_document, parse_surface, serialize_surface, Document, SlitLine};
pub use mesh::Mesh;
pub use validate::{validate_description, validate_surface, ConeReport, ValidationMode, ValidationReport};

use crate::error::{FlatError, Result};
use crate::polygon::{is_simple, signed_area};
use crate::scalar::{lit, Scalar, Vec2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GlueKind {
    Translation,
    HalfTranslation,
}

/// A polygon side: polygon index (position in the surface's list) and side index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeRef {
    pub polygon: usize,
    pub edge: usize,
}

impl EdgeRef {
    pub fn new(polygon: usize, edge: usize) -> Self {
        EdgeRef { polygon, edge }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeGluing {
    pub side_a: EdgeRef,
    pub side_b: EdgeRef,
    pub kind: GlueKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanarPolygon<T> {
    pub id: i64,
    pub vertices: Vec<Vec2<T>>,
}

/// Polygons and gluings as written, before any derived data is computed.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceDescription<T> {
    pub polygons: Vec<PlanarPolygon<T>>,
    pub gluings: Vec<EdgeGluing>,
}

impl<T: Scalar> SurfaceDescription<T> {
    pub fn edge_vector(&self, e: EdgeRef) -> Vec2<T> {
        let v = &self.polygons[e.polygon].vertices;
        v[(e.edge + 1) % v.len()] - v[e.edge]
    }

    pub fn edge_label(&self, e: EdgeRef) -> String {
        format!("{}.{}", self.polygons[e.polygon].id, e.edge)
    }

    pub fn polygon_index(&self, id: i64) -> Option<usize> {
        self.polygons.iter().position(|p| p.id == id)
    }

    /// Checks polygon shape and that gluings pair every side exactly once.
    fn check_structure(&self) -> Result<()> {
        let eps = T::geometric_eps();
        let mut ids = HashMap::new();
        for p in &self.polygons {
            if ids.insert(p.id, ()).is_some() {
                return Err(FlatError::InvalidPolygon { id: p.id, reason: "duplicate polygon id".into() });
            }
            if p.vertices.len() < 3 {
                return Err(FlatError::InvalidPolygon { id: p.id, reason: "fewer than 3 vertices".into() });
            }
            if signed_area(&p.vertices) <= T::zero() {
                return Err(FlatError::InvalidPolygon { id: p.id, reason: "not positively oriented".into() });
            }
            if !is_simple(&p.vertices, eps) {
                return Err(FlatError::InvalidPolygon { id: p.id, reason: "self-intersecting".into() });
            }
        }
        let mut seen: HashMap<EdgeRef, ()> = HashMap::new();
        for g in &self.gluings {
            for side in [g.side_a, g.side_b] {
                let poly = self.polygons.get(side.polygon).ok_or(FlatError::UnknownPolygon(side.polygon as i64))?;
                if side.edge >= poly.vertices.len() {
                    return Err(FlatError::Syntax {
                        line: 0,
                        message: format!("edge index {} out of range for polygon {}", side.edge, poly.id),
                    });
                }
                if seen.insert(side, ()).is_some() {
                    return Err(FlatError::DuplicateEdge { polygon: poly.id, edge: side.edge });
                }
            }
        }
        for (pi, p) in self.polygons.iter().enumerate() {
            for e in 0..p.vertices.len() {
                if !seen.contains_key(&EdgeRef::new(pi, e)) {
                    return Err(FlatError::UnmatchedEdge { polygon: p.id, edge: e });
                }
            }
        }
        Ok(())
    }

    fn map_vertices(&self, f: impl Fn(Vec2<T>) -> Vec2<T>) -> Self {
        SurfaceDescription {
            polygons: self
                .polygons
                .iter()
                .map(|p| PlanarPolygon { id: p.id, vertices: p.vertices.iter().map(|&v| f(v)).collect() })
                .collect(),
            gluings: self.gluings.clone(),
        }
    }
}

/// One identified vertex class of the glued complex.
#[derive(Clone, Debug, PartialEq)]
pub struct ConePoint<T> {
    pub class: usize,
    /// Incident polygon corners `(polygon index, vertex index)`.
    pub wedges: Vec<(usize, usize)>,
    pub angle: T,
}

impl<T: Scalar> ConePoint<T> {
    /// `angle / π`.
    pub fn multiple(&self) -> T {
        self.angle / T::PI()
    }

    /// Nearest integer `k` with `angle ≈ kπ` within `tol`, if any.
    pub fn k(&self, tol: T) -> Option<i64> {
        let m = self.multiple();
        let r = m.round();
        if (m - r).abs() <= tol {
            r.to_i64()
        } else {
            None
        }
    }

    /// Cone angle 2π: a marked regular point rather than a singularity.
    pub fn is_regular(&self, tol: T) -> bool {
        self.k(tol) == Some(2)
    }
}

/// A point given in the chart of one polygon.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfacePoint<T> {
    pub polygon: usize,
    pub position: Vec2<T>,
}

impl<T: Scalar> SurfacePoint<T> {
    pub fn new(polygon: usize, position: Vec2<T>) -> Self {
        SurfacePoint { polygon, position }
    }
}

/// Immutable flat surface with its derived cone structure.
#[derive(Clone, Debug)]
pub struct FlatSurface<T> {
    desc: SurfaceDescription<T>,
    mesh: Mesh<T>,
    cone_points: Vec<ConePoint<T>>,
    area: T,
    tolerance: T,
}

impl<T: Scalar> FlatSurface<T> {
    pub fn new(desc: SurfaceDescription<T>) -> Result<Self> {
        Self::with_tolerance(desc, T::default_tolerance())
    }

    pub fn with_tolerance(desc: SurfaceDescription<T>, tolerance: T) -> Result<Self> {
        desc.check_structure()?;
        let mesh = Mesh::build(&desc, tolerance)?;
        let mut cone_points: Vec<ConePoint<T>> = mesh
            .stars
            .iter()
            .enumerate()
            .map(|(class, s)| ConePoint { class, wedges: Vec::new(), angle: s.angle })
            .collect();
        for (pi, poly) in desc.polygons.iter().enumerate() {
            for vi in 0..poly.vertices.len() {
                let (t, c) = mesh.poly_tris[pi]
                    .iter()
                    .find_map(|&t| (0..3).find(|&c| mesh.tris[t].poly_vertex[c] == vi).map(|c| (t, c)))
                    .expect("every polygon vertex is a triangle corner");
                cone_points[mesh.class_of(t, c)].wedges.push((pi, vi));
            }
        }
        let area = desc.polygons.iter().map(|p| signed_area(&p.vertices)).sum();
        Ok(FlatSurface { desc, mesh, cone_points, area, tolerance })
    }

    pub fn description(&self) -> &SurfaceDescription<T> {
        &self.desc
    }

    pub fn polygons(&self) -> &[PlanarPolygon<T>] {
        &self.desc.polygons
    }

    pub fn gluings(&self) -> &[EdgeGluing] {
        &self.desc.gluings
    }

    pub fn mesh(&self) -> &Mesh<T> {
        &self.mesh
    }

    pub fn tolerance(&self) -> T {
        self.tolerance
    }

    /// One entry per identified vertex class, regular marked points included.
    pub fn cone_points(&self) -> &[ConePoint<T>] {
        &self.cone_points
    }

    /// Classes with cone angle different from 2π (the singular set Σ).
    pub fn singularities(&self) -> Vec<usize> {
        self.cone_points.iter().filter(|c| !c.is_regular(self.tolerance)).map(|c| c.class).collect()
    }

    pub fn is_singular(&self, class: usize) -> bool {
        !self.cone_points[class].is_regular(self.tolerance)
    }

    pub fn area(&self) -> T {
        self.area
    }

    /// `V - E + F` of the glued polygon complex.
    pub fn euler_characteristic(&self) -> i64 {
        self.cone_points.len() as i64 - self.desc.gluings.len() as i64 + self.desc.polygons.len() as i64
    }

    pub fn genus(&self) -> i64 {
        (2 - self.euler_characteristic()) / 2
    }

    /// `|2πχ - Σ(2π - θ)|` over all vertex classes.
    pub fn gauss_bonnet_residual(&self) -> T {
        let two_pi = T::PI() + T::PI();
        let chi = T::from_i64(self.euler_characteristic()).unwrap();
        let curvature: T = self.cone_points.iter().map(|c| two_pi - c.angle).sum();
        (two_pi * chi - curvature).abs()
    }

    pub fn scale_metric(&self, c: T) -> Result<Self> {
        if !(c > T::zero()) {
            return Err(FlatError::InvalidParameter(format!("scale factor must be positive, got {c}")));
        }
        Self::with_tolerance(self.desc.map_vertices(|v| v.scale(c)), self.tolerance)
    }

    /// Rescales to area one.
    pub fn normalized(&self) -> Result<Self> {
        self.scale_metric(T::one() / self.area.sqrt())
    }

    /// Applies `diag(1/λ, λ)`: horizontal shrink, vertical stretch.
    pub fn stretch(&self, lambda: T) -> Result<Self> {
        if !(lambda > T::zero()) {
            return Err(FlatError::InvalidParameter(format!("stretch factor must be positive, got {lambda}")));
        }
        Self::with_tolerance(self.desc.map_vertices(|v| Vec2::new(v.x / lambda, v.y * lambda)), self.tolerance)
    }

    /// Resolves a surface point to its containing triangle.
    pub fn locate(&self, p: &SurfacePoint<T>) -> Result<usize> {
        self.mesh
            .locate(p.polygon, p.position, lit::<T>(1e-9).max(self.tolerance))
            .ok_or_else(|| FlatError::PointNotOnSurface(format!("polygon {} at ({}, {})", p.polygon, p.position.x, p.position.y)))
    }

    /// Vertex class of `p` if it coincides with a polygon vertex.
    pub fn vertex_class_at(&self, p: &SurfacePoint<T>) -> Option<usize> {
        let poly = self.desc.polygons.get(p.polygon)?;
        let vi = poly.vertices.iter().position(|v| v.dist(p.position) <= self.tolerance)?;
        self.cone_points.iter().find(|c| c.wedges.contains(&(p.polygon, vi))).map(|c| c.class)
    }

    /// A surface point sitting at vertex class `class`.
    pub fn vertex_point(&self, class: usize) -> SurfacePoint<T> {
        let (pi, vi) = self.cone_points[class].wedges[0];
        SurfacePoint::new(pi, self.desc.polygons[pi].vertices[vi])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use approx::assert_relative_eq;

    #[test]
    fn torus_has_one_regular_class() {
        let s = fixtures::torus::<f64>();
        assert_eq!(s.cone_points().len(), 1);
        assert_relative_eq!(s.cone_points()[0].angle, 2.0 * std::f64::consts::PI, epsilon = 1e-12);
        assert_eq!(s.genus(), 1);
        assert!(s.singularities().is_empty());
    }

    #[test]
    fn octagon_single_six_pi_point() {
        let s = fixtures::octagon::<f64>();
        assert_eq!(s.genus(), 2);
        assert_eq!(s.cone_points().len(), 1);
        assert_eq!(s.cone_points()[0].k(1e-9), Some(6));
        assert_eq!(s.cone_points()[0].wedges.len(), 8);
        assert!(s.gauss_bonnet_residual() < 1e-9);
    }

    #[test]
    fn two_square_torus_classes_are_regular() {
        // V - E + F = V - 4 + 2 = 0 forces two vertex classes
        let s = fixtures::two_square_torus::<f64>();
        assert_eq!(s.cone_points().len(), 2);
        assert!(s.cone_points().iter().all(|c| c.k(1e-9) == Some(2)));
        assert!(s.singularities().is_empty());
        assert_relative_eq!(s.area(), 2.0);
    }

    #[test]
    fn area_closed_forms() {
        assert_relative_eq!(fixtures::torus::<f64>().area(), 1.0);
        let oct = fixtures::octagon::<f64>();
        let side = oct.description().edge_vector(EdgeRef::new(0, 0)).norm();
        assert_relative_eq!(oct.area(), 2.0 * (1.0 + 2f64.sqrt()) * side * side, epsilon = 1e-12);
        assert_relative_eq!(oct.scale_metric(2.0).unwrap().area(), 4.0 * oct.area(), epsilon = 1e-12);
    }

    #[test]
    fn scale_and_stretch() {
        let t = fixtures::torus::<f64>();
        assert_relative_eq!(t.scale_metric(2.0).unwrap().area(), 4.0);
        assert!(t.scale_metric(0.0).is_err());
        assert!(t.stretch(-1.0).is_err());
        let r = t.stretch(2.0).unwrap();
        assert_relative_eq!(r.area(), 1.0);
        assert_eq!(r.polygons()[0].vertices[2], Vec2::new(0.5, 2.0));
        let same = t.stretch(1.0).unwrap();
        assert_eq!(same.polygons(), t.polygons());
        let oct = fixtures::octagon::<f64>();
        let n = oct.scale_metric(3.0).unwrap().normalized().unwrap();
        assert!((n.area() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_precision_surface() {
        let s = fixtures::octagon::<f32>();
        assert_eq!(s.cone_points().len(), 1);
        assert_eq!(s.cone_points()[0].k(1e-4), Some(6));
        assert!((s.area() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn one_cylinder_is_genus_two() {
        let s = fixtures::one_cylinder::<f64>();
        assert_eq!(s.genus(), 2);
        assert_eq!(s.cone_points()[0].k(1e-9), Some(6));
        assert_relative_eq!(s.area(), 1.0, epsilon = 1e-12);
    }
}
