//! Problem-file parsing: polytopes, cones, lattices, and functionals from
//! JSON with rationals as strings.

use anyhow::{anyhow, bail, Context, Result};
use serde_json::Value;

use brion_core::inner::InnerProduct;
use brion_core::lattice::Lattice;
use brion_core::matrix::{QMatrix, QVector};
use brion_core::polytope::{Cone, Halfspace, Polytope};
use brion_core::rat::{parse_rat, Rat};
use brion_core::xi::Xi;

pub struct Problem {
    pub dim: usize,
    pub polytope: Option<Polytope>,
    pub cone: Option<Cone>,
    pub lattice: Lattice,
    pub ip: InnerProduct,
}

fn parse_vec(v: &Value, dim: usize) -> Result<QVector> {
    let arr = v
        .as_array()
        .ok_or_else(|| anyhow!("expected an array of rationals"))?;
    if arr.len() != dim {
        bail!("vector has {} entries, expected {dim}", arr.len());
    }
    arr.iter()
        .map(|x| match x {
            Value::String(s) => Ok(parse_rat(s)?),
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Rat::from_integer(i.into()))
                } else {
                    bail!("non-integer numeric literal {n}; write rationals as strings")
                }
            }
            _ => bail!("bad rational entry {x}"),
        })
        .collect()
}

pub fn load_problem(path: &str) -> Result<Problem> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
    let v: Value = serde_json::from_str(&text).context("parsing JSON")?;
    let dim = v
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| anyhow!("missing \"dim\""))? as usize;
    let ip = match v.get("gram") {
        None => InnerProduct::standard(dim),
        Some(g) => {
            let rows = g
                .as_array()
                .ok_or_else(|| anyhow!("gram must be a matrix"))?;
            let rows: Result<Vec<QVector>> = rows.iter().map(|r| parse_vec(r, dim)).collect();
            InnerProduct::new(QMatrix::from_rows(rows?))?
        }
    };
    let lattice = match v.get("lattice") {
        None => Lattice::standard(dim),
        Some(l) => {
            let cols = l
                .as_array()
                .ok_or_else(|| anyhow!("lattice must be a basis list"))?;
            let cols: Result<Vec<QVector>> = cols.iter().map(|c| parse_vec(c, dim)).collect();
            Lattice::from_basis(dim, &cols?)?
        }
    };
    let polytope = if let Some(verts) = v.get("vertices") {
        let arr = verts
            .as_array()
            .ok_or_else(|| anyhow!("vertices must be a list"))?;
        let pts: Result<Vec<QVector>> = arr.iter().map(|p| parse_vec(p, dim)).collect();
        Some(Polytope::from_vertices(&pts?, &ip)?)
    } else if let Some(ineqs) = v.get("inequalities") {
        let arr = ineqs
            .as_array()
            .ok_or_else(|| anyhow!("inequalities must be a list"))?;
        let hs: Result<Vec<Halfspace>> = arr
            .iter()
            .map(|h| {
                let a = parse_vec(
                    h.get("a")
                        .ok_or_else(|| anyhow!("inequality needs \"a\""))?,
                    dim,
                )?;
                let b = match h
                    .get("b")
                    .ok_or_else(|| anyhow!("inequality needs \"b\""))?
                {
                    Value::String(s) => parse_rat(s)?,
                    Value::Number(n) => {
                        Rat::from_integer(n.as_i64().ok_or_else(|| anyhow!("bad offset"))?.into())
                    }
                    other => bail!("bad offset {other}"),
                };
                Ok(Halfspace {
                    normal: a,
                    offset: b,
                })
            })
            .collect();
        Some(Polytope::from_hrep(dim, &hs?, &ip)?)
    } else {
        None
    };
    let cone = if let Some(rays) = v.get("rays") {
        let arr = rays
            .as_array()
            .ok_or_else(|| anyhow!("rays must be a list"))?;
        let rs: Result<Vec<QVector>> = arr.iter().map(|r| parse_vec(r, dim)).collect();
        let apex = match v.get("apex") {
            None => vec![Rat::from_integer(0.into()); dim],
            Some(a) => parse_vec(a, dim)?,
        };
        Some(Cone::new(apex, rs?, Vec::new()))
    } else {
        None
    };
    if polytope.is_none() && cone.is_none() {
        bail!("problem file needs \"vertices\", \"inequalities\", or \"rays\"");
    }
    Ok(Problem {
        dim,
        polytope,
        cone,
        lattice,
        ip,
    })
}

/// Parses `re=[1,0];im2pi=[0,1/2]` (either part optional).
pub fn parse_xi(spec: &str, dim: usize) -> Result<Xi> {
    let mut re = vec![Rat::from_integer(0.into()); dim];
    let mut im = vec![Rat::from_integer(0.into()); dim];
    for part in spec.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (key, val) = part
            .split_once('=')
            .ok_or_else(|| anyhow!("bad xi component {part:?}"))?;
        let inner = val
            .trim()
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| anyhow!("xi component must be a bracketed list"))?;
        let entries: Result<Vec<Rat>> =
            inner.split(',').map(|s| Ok(parse_rat(s.trim())?)).collect();
        let entries = entries?;
        if entries.len() != dim {
            bail!("xi component has {} entries, expected {dim}", entries.len());
        }
        match key.trim() {
            "re" => re = entries,
            "im2pi" => im = entries,
            other => bail!("unknown xi component {other:?}"),
        }
    }
    Ok(Xi::new(re, im))
}
