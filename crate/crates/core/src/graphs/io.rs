//! Gridded-table storage for graph functions.
//!
//! Header lines declare `n`, `m`, the annulus radii and the spacing; the
//! body lists `x y u^1 ... u^m` per active node.

use std::path::Path;

use crate::error::{Error, Result};
use crate::graphs::function::GraphFunction;
use crate::scalar::Real;

pub fn graph_to_text<S: Real>(g: &GraphFunction<S>) -> String {
    let (ri, ro) = g.radii();
    let m = g.components();
    let mut out = String::new();
    out.push_str("# annulus graph function\n");
    out.push_str("n 2\n");
    out.push_str(&format!("m {m}\n"));
    out.push_str(&format!("inner_radius {:.17e}\n", ri));
    out.push_str(&format!("outer_radius {:.17e}\n", ro));
    out.push_str(&format!("spacing {:.17e}\n", g.spacing()));
    let count = g.active_nodes().count();
    out.push_str(&format!("nodes {count}\n"));
    for node in g.active_nodes() {
        let [x, y] = g.node_position(node);
        let mut row = format!("{x:.17e} {y:.17e}");
        for alpha in 0..m {
            row.push_str(&format!(" {:.17e}", g.value(node, alpha)));
        }
        out.push_str(&row);
        out.push('\n');
    }
    out
}

pub fn graph_from_text<S: Real>(text: &str) -> Result<GraphFunction<S>> {
    let mut header: std::collections::BTreeMap<String, f64> = std::collections::BTreeMap::new();
    let mut body: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut nodes_expected: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() == 2 && toks[0].chars().next().is_some_and(|c| c.is_alphabetic()) {
            let key = toks[0].to_ascii_lowercase();
            if key == "nodes" {
                nodes_expected = Some(toks[1].parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: "bad node count".into(),
                })?);
            } else {
                let v: f64 = toks[1].parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("bad value for `{key}`"),
                })?;
                header.insert(key, v);
            }
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> =
            toks.iter().map(|t| t.parse::<f64>()).collect();
        match row {
            Ok(r) => body.push((line_no, r)),
            Err(_) => {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "expected numeric row".into(),
                })
            }
        }
    }
    let need = |k: &str| -> Result<f64> {
        header.get(k).copied().ok_or_else(|| Error::Parse {
            line: 1,
            msg: format!("missing header key `{k}`"),
        })
    };
    let n = need("n")? as usize;
    if n != 2 {
        return Err(Error::Parse {
            line: 1,
            msg: "graph functions are implemented over planar annuli (n = 2)".into(),
        });
    }
    let m = need("m")? as usize;
    let ri = S::lit(need("inner_radius")?);
    let ro = S::lit(need("outer_radius")?);
    let h = S::lit(need("spacing")?);
    let mut g = GraphFunction::<S>::flat(ri, ro, h, m)?;
    if let Some(count) = nodes_expected {
        if count != body.len() {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected {count} node rows, found {}", body.len()),
            });
        }
    }
    let snap = h * S::lit(0.25);
    let mut filled = vec![false; g.node_count()];
    let positions: Vec<(usize, [S; 2])> = g
        .active_nodes()
        .map(|node| (node, g.node_position(node)))
        .collect();
    for (line_no, row) in body {
        if row.len() != 2 + m {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected {} columns", 2 + m),
            });
        }
        let x = S::lit(row[0]);
        let y = S::lit(row[1]);
        let mut matched = None;
        for (node, [px, py]) in &positions {
            if (*px - x).abs() < snap && (*py - y).abs() < snap {
                matched = Some(*node);
                break;
            }
        }
        let node = matched.ok_or_else(|| Error::Parse {
            line: line_no,
            msg: format!("node ({x}, {y}) does not match the declared grid"),
        })?;
        for alpha in 0..m {
            g.set_value(node, alpha, S::lit(row[2 + alpha]));
        }
        filled[node] = true;
    }
    for node in g.active_nodes() {
        if !filled[node] {
            return Err(Error::Parse {
                line: 1,
                msg: format!("grid node {node} missing from the table"),
            });
        }
    }
    Ok(g)
}

pub fn save_graph<S: Real>(g: &GraphFunction<S>, path: &Path) -> Result<()> {
    std::fs::write(path, graph_to_text(g))?;
    Ok(())
}

pub fn load_graph<S: Real>(path: &Path) -> Result<GraphFunction<S>> {
    let text = std::fs::read_to_string(path)?;
    graph_from_text(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn roundtrip_preserves_values() {
        let g = GraphFunction::<f64>::sample(
            2.0,
            5.0,
            0.5,
            1,
            Arc::new(|x, y| vec![0.05 * x * y / (x * x + y * y)]),
        )
        .unwrap();
        let text = graph_to_text(&g);
        let back = graph_from_text::<f64>(&text).unwrap();
        assert_eq!(
            g.active_nodes().count(),
            back.active_nodes().count()
        );
        for node in g.active_nodes() {
            assert!((g.value(node, 0) - back.value(node, 0)).abs() < 1e-15);
        }
    }
}
