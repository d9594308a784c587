//! Line-oriented surface description format.
//!
//! ```text
//! # comment
//! polygon 0
//! v 0 0
//! v 1 0
//! v 1 1
//! v 0 1
//! glue 0.0 0.2 translation
//! glue 0.1 0.3 translation
//! slit 0 0.4 0.5 0.6 0.5 sheets 3 perm (1 2 3)
//! ```

use std::fmt::Write as _;

use crate::error::{FlatError, Result};
use crate::scalar::{Scalar, Vec2};

use super::{EdgeGluing, EdgeRef, FlatSurface, GlueKind, PlanarPolygon, SurfaceDescription};

/// A `slit` line: segment in the chart of polygon `polygon` (by id), number of
/// sheets and the monodromy permutation as 0-based images.
#[derive(Clone, Debug, PartialEq)]
pub struct SlitLine<T> {
    pub polygon: i64,
    pub start: Vec2<T>,
    pub end: Vec2<T>,
    pub sheets: usize,
    pub perm: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Document<T> {
    pub surface: SurfaceDescription<T>,
    pub slits: Vec<SlitLine<T>>,
}

fn syntax(line: usize, message: impl Into<String>) -> FlatError {
    FlatError::Syntax { line, message: message.into() }
}

fn parse_num<T: Scalar>(tok: &str, line: usize) -> Result<T> {
    let v: T = tok.parse().map_err(|_| syntax(line, format!("invalid number '{tok}'")))?;
    if !v.is_finite() {
        return Err(syntax(line, format!("non-finite number '{tok}'")));
    }
    Ok(v)
}

fn parse_side(tok: &str, line: usize) -> Result<(i64, usize)> {
    let (p, e) = tok.split_once('.').ok_or_else(|| syntax(line, format!("expected <polygon>.<edge>, got '{tok}'")))?;
    let p = p.parse().map_err(|_| syntax(line, format!("invalid polygon id '{p}'")))?;
    let e = e.parse().map_err(|_| syntax(line, format!("invalid edge index '{e}'")))?;
    Ok((p, e))
}

/// Parses cycle notation such as `(1 2 3)(4 5)` on `n` points into 0-based images.
/// `id` or `()` denote the identity.
pub fn parse_cycles(text: &str, n: usize) -> std::result::Result<Vec<usize>, String> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut seen = vec![false; n];
    let t = text.trim();
    if t.is_empty() || t == "id" {
        return Ok(perm);
    }
    let mut rest = t;
    while !rest.is_empty() {
        rest = rest.trim_start();
        if rest.is_empty() {
            break;
        }
        if !rest.starts_with('(') {
            return Err(format!("expected '(' in cycle notation '{text}'"));
        }
        let close = rest.find(')').ok_or_else(|| format!("unclosed cycle in '{text}'"))?;
        let body = &rest[1..close];
        let elems: Vec<usize> = body
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<usize>().map_err(|_| format!("invalid element '{s}'")))
            .collect::<std::result::Result<_, _>>()?;
        for &x in &elems {
            if x == 0 || x > n {
                return Err(format!("element {x} outside 1..={n}"));
            }
            if seen[x - 1] {
                return Err(format!("element {x} repeated"));
            }
            seen[x - 1] = true;
        }
        for i in 0..elems.len() {
            perm[elems[i] - 1] = elems[(i + 1) % elems.len()] - 1;
        }
        rest = &rest[close + 1..];
    }
    Ok(perm)
}

/// Cycle notation (1-based, fixed points omitted) of a 0-based permutation.
pub fn format_cycles(perm: &[usize]) -> String {
    let mut seen = vec![false; perm.len()];
    let mut out = String::new();
    for i in 0..perm.len() {
        if seen[i] || perm[i] == i {
            continue;
        }
        out.push('(');
        let mut j = i;
        let mut first = true;
        while !seen[j] {
            seen[j] = true;
            if !first {
                out.push(' ');
            }
            first = false;
            let _ = write!(out, "{}", j + 1);
            j = perm[j];
        }
        out.push(')');
    }
    if out.is_empty() {
        out.push_str("id");
    }
    out
}

pub fn parse_document<T: Scalar>(text: &str) -> Result<Document<T>> {
    let mut polygons: Vec<PlanarPolygon<T>> = Vec::new();
    let mut raw_glues: Vec<(usize, (i64, usize), (i64, usize), GlueKind)> = Vec::new();
    let mut slits = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = content.split_whitespace().collect();
        let Some(&head) = toks.first() else { continue };
        match head {
            "polygon" => {
                if toks.len() != 2 {
                    return Err(syntax(ln, "expected 'polygon <id>'"));
                }
                let id = toks[1].parse().map_err(|_| syntax(ln, format!("invalid polygon id '{}'", toks[1])))?;
                polygons.push(PlanarPolygon { id, vertices: Vec::new() });
            }
            "v" => {
                if toks.len() != 3 {
                    return Err(syntax(ln, "expected 'v <x> <y>'"));
                }
                let p = polygons.last_mut().ok_or_else(|| syntax(ln, "vertex before any polygon"))?;
                p.vertices.push(Vec2::new(parse_num(toks[1], ln)?, parse_num(toks[2], ln)?));
            }
            "glue" => {
                if toks.len() != 4 {
                    return Err(syntax(ln, "expected 'glue <id>.<edge> <id>.<edge> <translation|halfturn>'"));
                }
                let kind = match toks[3] {
                    "translation" => GlueKind::Translation,
                    "halfturn" | "half_translation" => GlueKind::HalfTranslation,
                    other => return Err(syntax(ln, format!("unknown gluing kind '{other}'"))),
                };
                raw_glues.push((ln, parse_side(toks[1], ln)?, parse_side(toks[2], ln)?, kind));
            }
            "slit" => {
                // slit <poly> x0 y0 x1 y1 sheets n [perm <cycles>]
                if toks.len() < 8 || toks[6] != "sheets" {
                    return Err(syntax(ln, "expected 'slit <poly> <x0> <y0> <x1> <y1> sheets <n> perm <cycles>'"));
                }
                let polygon = toks[1].parse().map_err(|_| syntax(ln, format!("invalid polygon id '{}'", toks[1])))?;
                let start = Vec2::new(parse_num(toks[2], ln)?, parse_num(toks[3], ln)?);
                let end = Vec2::new(parse_num(toks[4], ln)?, parse_num(toks[5], ln)?);
                let sheets: usize = toks[7].parse().map_err(|_| syntax(ln, format!("invalid sheet count '{}'", toks[7])))?;
                if sheets == 0 {
                    return Err(syntax(ln, "sheet count must be positive"));
                }
                let perm = match toks.get(8) {
                    None => (0..sheets).map(|i| (i + 1) % sheets).collect(),
                    Some(&"perm") => {
                        let cycles = toks[9..].join(" ");
                        parse_cycles(&cycles, sheets).map_err(|m| syntax(ln, m))?
                    }
                    Some(other) => return Err(syntax(ln, format!("unexpected token '{other}'"))),
                };
                slits.push(SlitLine { polygon, start, end, sheets, perm });
            }
            other => return Err(syntax(ln, format!("unknown directive '{other}'"))),
        }
    }
    let index = |id: i64, ln: usize| -> Result<usize> {
        polygons
            .iter()
            .position(|p| p.id == id)
            .ok_or_else(|| syntax(ln, format!("unknown polygon id {id}")))
    };
    let mut gluings = Vec::with_capacity(raw_glues.len());
    for &(ln, (pa, ea), (pb, eb), kind) in &raw_glues {
        let a = EdgeRef::new(index(pa, ln)?, ea);
        let b = EdgeRef::new(index(pb, ln)?, eb);
        for (side, pid) in [(a, pa), (b, pb)] {
            if side.edge >= polygons[side.polygon].vertices.len() {
                return Err(syntax(ln, format!("edge {pid}.{} out of range", side.edge)));
            }
        }
        if a == b {
            return Err(syntax(ln, "edge glued to itself"));
        }
        gluings.push(EdgeGluing { side_a: a, side_b: b, kind });
    }
    Ok(Document { surface: SurfaceDescription { polygons, gluings }, slits })
}

/// Parses a surface document; `slit` lines are accepted and ignored.
pub fn parse_surface<T: Scalar>(text: &str) -> Result<FlatSurface<T>> {
    FlatSurface::new(parse_document(text)?.surface)
}

pub fn serialize_surface<T: Scalar>(s: &SurfaceDescription<T>) -> String {
    let mut out = String::new();
    for p in &s.polygons {
        let _ = writeln!(out, "polygon {}", p.id);
        for v in &p.vertices {
            let _ = writeln!(out, "v {} {}", v.x, v.y);
        }
    }
    for g in &s.gluings {
        let kind = match g.kind {
            GlueKind::Translation => "translation",
            GlueKind::HalfTranslation => "halfturn",
        };
        let _ = writeln!(out, "glue {} {} {}", s.edge_label(g.side_a), s.edge_label(g.side_b), kind);
    }
    out
}
