//! Plain-text surface descriptions and whitespace-delimited mesh import.
//!
//! Surface file: one `key value...` pair per line, `#` comments. The `kind`
//! key selects the surface type; remaining keys supply parameters. Mesh and
//! curve kinds either embed their arrays (`vertices N` / `faces N` headers
//! followed by N data lines) or reference an external mesh file with
//! `mesh <path>`.
//!
//! Mesh file: `nv nf dim` on the first line, then `nv` vertex lines with
//! `dim` floats, then `nf` face lines with 3 zero-based indices.

use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geom::surface::{Projection, ShrinkerSurface};
use crate::graphs::GraphFunction;
use crate::scalar::Real;

struct Lines<'a> {
    iter: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            iter: text.lines().enumerate(),
        }
    }

    /// Next non-empty, non-comment line with its 1-based number.
    fn next_data(&mut self) -> Option<(usize, &'a str)> {
        for (idx, line) in self.iter.by_ref() {
            let trimmed = line.split('#').next().unwrap_or("").trim();
            if !trimmed.is_empty() {
                return Some((idx + 1, trimmed));
            }
        }
        None
    }
}

fn parse_scalar<S: Real>(tok: &str, line: usize) -> Result<S> {
    tok.parse::<f64>()
        .map(S::lit)
        .map_err(|_| Error::Parse {
            line,
            msg: format!("expected a number, got `{tok}`"),
        })
}

fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.parse::<usize>().map_err(|_| Error::Parse {
        line,
        msg: format!("expected a non-negative integer, got `{tok}`"),
    })
}

/// Parse a surface description from text. `base_dir` resolves relative
/// mesh references.
pub fn parse_surface<S: Real>(text: &str, id: &str, base_dir: &Path) -> Result<ShrinkerSurface<S>> {
    let mut lines = Lines::new(text);
    let mut kind: Option<(usize, String)> = None;
    let mut keys: std::collections::BTreeMap<String, (usize, Vec<String>)> =
        std::collections::BTreeMap::new();
    let mut vertices: Vec<Vec<S>> = Vec::new();
    let mut faces: Vec<[usize; 3]> = Vec::new();
    while let Some((line_no, line)) = lines.next_data() {
        let mut toks = line.split_whitespace();
        let key = toks.next().unwrap().to_ascii_lowercase();
        let rest: Vec<String> = toks.map(str::to_string).collect();
        match key.as_str() {
            "kind" => {
                let v = rest.first().ok_or(Error::Parse {
                    line: line_no,
                    msg: "kind needs a value".into(),
                })?;
                kind = Some((line_no, v.to_ascii_lowercase()));
            }
            "vertices" => {
                let count = parse_usize(
                    rest.first().ok_or(Error::Parse {
                        line: line_no,
                        msg: "vertices needs a count".into(),
                    })?,
                    line_no,
                )?;
                for _ in 0..count {
                    let (ln, data) = lines.next_data().ok_or(Error::Parse {
                        line: line_no,
                        msg: "unexpected end of vertex block".into(),
                    })?;
                    let row: Result<Vec<S>> = data
                        .split_whitespace()
                        .map(|t| parse_scalar(t, ln))
                        .collect();
                    vertices.push(row?);
                }
            }
            "faces" => {
                let count = parse_usize(
                    rest.first().ok_or(Error::Parse {
                        line: line_no,
                        msg: "faces needs a count".into(),
                    })?,
                    line_no,
                )?;
                for _ in 0..count {
                    let (ln, data) = lines.next_data().ok_or(Error::Parse {
                        line: line_no,
                        msg: "unexpected end of face block".into(),
                    })?;
                    let idx: Result<Vec<usize>> = data
                        .split_whitespace()
                        .map(|t| parse_usize(t, ln))
                        .collect();
                    let idx = idx?;
                    if idx.len() != 3 {
                        return Err(Error::Parse {
                            line: ln,
                            msg: "faces are triangles: expected 3 indices".into(),
                        });
                    }
                    faces.push([idx[0], idx[1], idx[2]]);
                }
            }
            "mesh" => {
                let rel = rest.first().ok_or(Error::Parse {
                    line: line_no,
                    msg: "mesh needs a path".into(),
                })?;
                let path = base_dir.join(rel);
                let text = std::fs::read_to_string(&path)?;
                let (v, f) = parse_mesh_text(&text)?;
                vertices = v;
                faces = f;
            }
            _ => {
                keys.insert(key, (line_no, rest));
            }
        }
    }
    let (kind_line, kind) = kind.ok_or(Error::Parse {
        line: 1,
        msg: "missing `kind`".into(),
    })?;
    let get_scalar = |name: &str| -> Result<Option<S>> {
        match keys.get(name) {
            None => Ok(None),
            Some((ln, toks)) => {
                let tok = toks.first().ok_or(Error::Parse {
                    line: *ln,
                    msg: format!("{name} needs a value"),
                })?;
                Ok(Some(parse_scalar(tok, *ln)?))
            }
        }
    };
    let get_usize = |name: &str| -> Result<Option<usize>> {
        match keys.get(name) {
            None => Ok(None),
            Some((ln, toks)) => {
                let tok = toks.first().ok_or(Error::Parse {
                    line: *ln,
                    msg: format!("{name} needs a value"),
                })?;
                Ok(Some(parse_usize(tok, *ln)?))
            }
        }
    };
    match kind.as_str() {
        "plane" => {
            let n = get_usize("n")?.unwrap_or(2);
            let m = get_usize("m")?.unwrap_or(1);
            let inner = get_scalar("inner_radius")?.unwrap_or(S::zero());
            let basis = axis_basis::<S>(n, n + m);
            if inner > S::zero() {
                ShrinkerSurface::exterior_plane(id, basis, m, inner)
            } else {
                ShrinkerSurface::plane(id, basis, m)
            }
        }
        "sphere" | "round_sphere" => {
            let n = get_usize("n")?.unwrap_or(2);
            let m = get_usize("m")?.unwrap_or(1);
            let radius = get_scalar("radius")?.ok_or(Error::Parse {
                line: kind_line,
                msg: "sphere needs `radius`".into(),
            })?;
            ShrinkerSurface::sphere(id, n, m, radius)
        }
        "cylinder" | "round_cylinder" => {
            let n = get_usize("n")?.unwrap_or(2);
            let m = get_usize("m")?.unwrap_or(1);
            let k = get_usize("k")?.unwrap_or(1);
            let radius = get_scalar("radius")?.ok_or(Error::Parse {
                line: kind_line,
                msg: "cylinder needs `radius`".into(),
            })?;
            let inner = get_scalar("inner_radius")?.unwrap_or(S::zero());
            if inner > S::zero() {
                ShrinkerSurface::exterior_cylinder(id, k, n, m, radius, inner)
            } else {
                ShrinkerSurface::cylinder(id, k, n, m, radius)
            }
        }
        "mesh" | "triangle_mesh" => {
            if vertices.is_empty() {
                return Err(Error::Parse {
                    line: kind_line,
                    msg: "mesh kind needs vertex/face arrays or a `mesh` reference".into(),
                });
            }
            ShrinkerSurface::triangle_mesh(id, vertices, faces, None)
        }
        "curve" | "polyline" => {
            if vertices.is_empty() {
                return Err(Error::Parse {
                    line: kind_line,
                    msg: "curve kind needs a vertex array".into(),
                });
            }
            let closed = keys
                .get("closed")
                .map(|(_, v)| v.first().map(|s| s == "true" || s == "1").unwrap_or(true))
                .unwrap_or(false);
            ShrinkerSurface::polyline(id, vertices, closed, None)
        }
        "graph" | "graph_patch" => {
            let inner = get_scalar("inner_radius")?.ok_or(Error::Parse {
                line: kind_line,
                msg: "graph needs `inner_radius`".into(),
            })?;
            let outer = get_scalar("outer_radius")?.ok_or(Error::Parse {
                line: kind_line,
                msg: "graph needs `outer_radius`".into(),
            })?;
            let h = get_scalar("spacing")?.ok_or(Error::Parse {
                line: kind_line,
                msg: "graph needs `spacing`".into(),
            })?;
            let slope = get_scalar("slope")?.unwrap_or(S::zero());
            let func = GraphFunction::sample(
                inner,
                outer,
                h,
                1,
                Arc::new(move |x: S, _y: S| vec![slope * x]),
            )?;
            ShrinkerSurface::graph_patch(id, func)
        }
        other => Err(Error::Parse {
            line: kind_line,
            msg: format!("unknown surface kind `{other}`"),
        }),
    }
}

/// Load a surface description file; the id defaults to the file stem.
pub fn load_surface<S: Real>(path: &Path) -> Result<ShrinkerSurface<S>> {
    let text = std::fs::read_to_string(path)?;
    let id = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("surface");
    let base = path.parent().unwrap_or(Path::new("."));
    parse_surface(&text, id, base)
}

/// Parse the whitespace-delimited mesh format.
pub fn parse_mesh_text<S: Real>(text: &str) -> Result<(Vec<Vec<S>>, Vec<[usize; 3]>)> {
    let mut lines = Lines::new(text);
    let (ln, header) = lines.next_data().ok_or(Error::Parse {
        line: 1,
        msg: "empty mesh file".into(),
    })?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 3 {
        return Err(Error::Parse {
            line: ln,
            msg: "mesh header must be `nv nf dim`".into(),
        });
    }
    let nv = parse_usize(toks[0], ln)?;
    let nf = parse_usize(toks[1], ln)?;
    let dim = parse_usize(toks[2], ln)?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, data) = lines.next_data().ok_or(Error::Parse {
            line: ln,
            msg: "unexpected end of vertex list".into(),
        })?;
        let row: Result<Vec<S>> = data
            .split_whitespace()
            .map(|t| parse_scalar(t, ln))
            .collect();
        let row = row?;
        if row.len() != dim {
            return Err(Error::Parse {
                line: ln,
                msg: format!("expected {dim} coordinates"),
            });
        }
        vertices.push(row);
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (ln, data) = lines.next_data().ok_or(Error::Parse {
            line: ln,
            msg: "unexpected end of face list".into(),
        })?;
        let idx: Result<Vec<usize>> = data
            .split_whitespace()
            .map(|t| parse_usize(t, ln))
            .collect();
        let idx = idx?;
        if idx.len() != 3 {
            return Err(Error::Parse {
                line: ln,
                msg: "faces are triangles: expected 3 indices".into(),
            });
        }
        faces.push([idx[0], idx[1], idx[2]]);
    }
    Ok((vertices, faces))
}

/// Canonical coordinate-axis basis for a plane.
pub fn axis_basis<S: Real>(n: usize, ambient: usize) -> Vec<Vec<S>> {
    (0..n)
        .map(|i| {
            let mut e = vec![S::zero(); ambient];
            e[i] = S::one();
            e
        })
        .collect()
}

/// Serialize a mesh in the whitespace-delimited format.
pub fn mesh_to_text<S: Real>(vertices: &[Vec<S>], faces: &[[usize; 3]]) -> String {
    let dim = vertices.first().map(|v| v.len()).unwrap_or(0);
    let mut out = format!("{} {} {}\n", vertices.len(), faces.len(), dim);
    for v in vertices {
        let row: Vec<String> = v.iter().map(|x| format!("{x:.17e}")).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    for f in faces {
        out.push_str(&format!("{} {} {}\n", f[0], f[1], f[2]));
    }
    out
}

/// The `Projection` tag for catalog discretizations, re-exported for
/// convenience.
pub use crate::geom::surface::Projection as MeshProjection;

#[allow(dead_code)]
fn _projection_used<S: Real>(_p: Projection<S>) {}
