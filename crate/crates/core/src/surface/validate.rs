use std::fmt;

use crate::scalar::{to_f64, Scalar};

use super::{FlatSurface, SurfaceDescription};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValidationMode {
    /// Cone angles must be `kπ` with `k ≥ 3`; `k = 2` is accepted but flagged.
    Strict,
    /// Any positive cone angle is accepted; non-integer multiples are flagged.
    Lenient,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConeReport {
    pub class: usize,
    pub angle: f64,
    /// `angle / π`.
    pub multiple: f64,
    pub k: Option<i64>,
    pub regular: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub mode: ValidationMode,
    pub cones: Vec<ConeReport>,
    pub gauss_bonnet_residual: f64,
    pub euler_characteristic: i64,
    pub genus: i64,
    pub area: f64,
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn validate_surface<T: Scalar>(s: &FlatSurface<T>, mode: ValidationMode) -> ValidationReport {
    let tol = s.tolerance();
    let mut failures = Vec::new();
    let cones: Vec<ConeReport> = s
        .cone_points()
        .iter()
        .map(|c| {
            let k = c.k(tol);
            ConeReport {
                class: c.class,
                angle: to_f64(c.angle),
                multiple: to_f64(c.multiple()),
                k,
                regular: k == Some(2),
            }
        })
        .collect();
    for c in &cones {
        match (mode, c.k) {
            (_, None) if mode == ValidationMode::Strict => {
                failures.push(format!("cone class {}: angle {:.12}π is not an integer multiple of π", c.class, c.multiple))
            }
            (ValidationMode::Strict, Some(k)) if k < 2 => {
                failures.push(format!("cone class {}: angle {}π below the admissible range", c.class, k))
            }
            (_, _) if c.angle <= 0.0 => failures.push(format!("cone class {}: nonpositive angle", c.class)),
            _ => {}
        }
    }
    let residual = to_f64(s.gauss_bonnet_residual());
    if residual >= to_f64(tol) {
        failures.push(format!("Gauss-Bonnet residual {residual:e} exceeds tolerance {:e}", to_f64(tol)));
    }
    let area = to_f64(s.area());
    if area <= 0.0 {
        failures.push("nonpositive area".into());
    }
    ValidationReport {
        mode,
        cones,
        gauss_bonnet_residual: residual,
        euler_characteristic: s.euler_characteristic(),
        genus: s.genus(),
        area,
        failures,
    }
}

/// Validates a raw description; construction errors become report failures.
pub fn validate_description<T: Scalar>(d: &SurfaceDescription<T>, mode: ValidationMode, tol: T) -> ValidationReport {
    match FlatSurface::with_tolerance(d.clone(), tol) {
        Ok(s) => validate_surface(&s, mode),
        Err(e) => ValidationReport {
            mode,
            cones: Vec::new(),
            gauss_bonnet_residual: f64::NAN,
            euler_characteristic: 0,
            genus: 0,
            area: d.polygons.iter().map(|p| to_f64(crate::polygon::signed_area(&p.vertices))).sum(),
            failures: vec![e.to_string()],
        },
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "status: {}", if self.passed() { "pass" } else { "fail" })?;
        writeln!(f, "mode: {}", if self.mode == ValidationMode::Strict { "strict" } else { "lenient" })?;
        writeln!(f, "area: {}", crate::format_float(self.area))?;
        writeln!(f, "euler_characteristic: {}", self.euler_characteristic)?;
        writeln!(f, "genus: {}", self.genus)?;
        writeln!(f, "gauss_bonnet_residual: {:.3e}", self.gauss_bonnet_residual)?;
        for c in &self.cones {
            let note = if c.regular { " (regular point)" } else { "" };
            writeln!(f, "cone {}: angle/pi = {}{}", c.class, crate::format_float(c.multiple), note)?;
        }
        for m in &self.failures {
            writeln!(f, "failure: {m}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::scalar::Vec2;

    #[test]
    fn octagon_passes_strict() {
        let r = validate_surface(&fixtures::octagon::<f64>(), ValidationMode::Strict);
        assert!(r.passed(), "{r}");
        assert!(r.gauss_bonnet_residual < 1e-9);
        assert_eq!(r.cones.len(), 1);
        assert_eq!(r.cones[0].k, Some(6));
    }

    #[test]
    fn torus_flags_regular_point() {
        let r = validate_surface(&fixtures::torus::<f64>(), ValidationMode::Strict);
        assert!(r.passed());
        assert!(r.cones[0].regular);
        assert!(r.to_string().contains("regular point"));
    }

    #[test]
    fn perturbed_octagon_fails() {
        let mut d = fixtures::octagon::<f64>().description().clone();
        d.polygons[0].vertices[3] += Vec2::new(0.1, 0.0);
        let r = validate_description(&d, ValidationMode::Strict, 1e-9);
        assert!(!r.passed());
        assert!(r.failures[0].contains("mismatch"), "{:?}", r.failures);
    }
}
