//! Two-column breakpoint/value tables for mass functions, with a header
//! declaring the degree `n` and the growth constant `c3`.

use std::path::Path;

use crate::error::{Error, Result};
use crate::moment::{MassProfile, MomentFunction};
use crate::scalar::Real;

pub fn moment_to_text<S: Real>(v: &MomentFunction<S>, samples: usize) -> String {
    let mut out = String::new();
    out.push_str(&format!("n {}\n", v.degree()));
    out.push_str(&format!("c3 {:.17e}\n", v.growth_constant()));
    match v.profile() {
        MassProfile::PiecewiseLinear { points } => {
            for (r, val) in points {
                out.push_str(&format!("{r:.17e} {val:.17e}\n"));
            }
        }
        _ => {
            // analytic profiles are exported as a dense table
            let count = samples.max(16);
            let r_max = S::lit(50.0);
            for i in 0..=count {
                let r = r_max * S::of_usize(i) / S::of_usize(count);
                out.push_str(&format!("{:.17e} {:.17e}\n", r, v.value(r)));
            }
        }
    }
    out
}

pub fn moment_from_text<S: Real>(text: &str) -> Result<MomentFunction<S>> {
    let mut n: Option<usize> = None;
    let mut c3: Option<S> = None;
    let mut points: Vec<(S, S)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0].to_ascii_lowercase().as_str() {
            "n" => {
                n = Some(toks.get(1).and_then(|t| t.parse().ok()).ok_or(Error::Parse {
                    line: line_no,
                    msg: "bad n".into(),
                })?)
            }
            "c3" => {
                let v: f64 = toks.get(1).and_then(|t| t.parse().ok()).ok_or(Error::Parse {
                    line: line_no,
                    msg: "bad c3".into(),
                })?;
                c3 = Some(S::lit(v));
            }
            _ => {
                if toks.len() != 2 {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "expected `r value`".into(),
                    });
                }
                let r: f64 = toks[0].parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: "bad breakpoint".into(),
                })?;
                let v: f64 = toks[1].parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: "bad value".into(),
                })?;
                points.push((S::lit(r), S::lit(v)));
            }
        }
    }
    let n = n.ok_or(Error::Parse {
        line: 1,
        msg: "missing header `n`".into(),
    })?;
    let c3 = c3.ok_or(Error::Parse {
        line: 1,
        msg: "missing header `c3`".into(),
    })?;
    if points.is_empty() {
        return Err(Error::Parse {
            line: 1,
            msg: "no breakpoints".into(),
        });
    }
    MomentFunction::piecewise_linear(points, n, c3)
}

pub fn load_moment<S: Real>(path: &Path) -> Result<MomentFunction<S>> {
    let text = std::fs::read_to_string(path)?;
    moment_from_text(&text)
}

pub fn save_moment<S: Real>(v: &MomentFunction<S>, path: &Path, samples: usize) -> Result<()> {
    std::fs::write(path, moment_to_text(v, samples))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let v = MomentFunction::<f64>::piecewise_linear(
            vec![(0.0, 0.0), (1.0, 2.0), (3.0, 4.0)],
            2,
            3.0,
        )
        .unwrap();
        let text = moment_to_text(&v, 0);
        let back = moment_from_text::<f64>(&text).unwrap();
        assert_eq!(back.degree(), 2);
        assert!((back.value(2.0) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "n 2\nc3 1.0\n0 0\nbad line here\n";
        match moment_from_text::<f64>(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
