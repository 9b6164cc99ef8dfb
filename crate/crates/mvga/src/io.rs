//! File formats: hex-float scalar codec, the model JSON schema, node and
//! value CSV readers, and the evaluation CSV writer.
//!
//! Scalars are written as shortest round-trip decimals by default; hex
//! floats (C99 `0x1.…p±e` style) are available for bit-exact pipelines.
//! Node and basis indices are 1-based in every file, whatever the
//! in-memory representation does.

use crate::arnoldi::{FitModel, Triangular};
use crate::basis::MonomialBasis;
use crate::error::{Error, Result};
use crate::eval::StackedOutput;
use crate::gram::{CollocationMap, CollocationRow, CollocationTerm};
use crate::stacked::{BlockId, DerivOrder, NodeSet, StackedLayout};
use serde_json::{json, Map, Value};
use std::io::Write;
use std::path::Path;

pub const MODEL_FORMAT: &str = "mvga-model";
pub const MODEL_VERSION: u64 = 1;

// ---------------------------------------------------------------------------
// hex floats

/// C99-style hex float with the full 13-digit mantissa, e.g. `0x1.8p+1`
/// for 3.0. Finite inputs only.
pub fn format_hex_f64(x: f64) -> String {
    assert!(x.is_finite(), "hex format is defined for finite values");
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let mantissa = bits & ((1u64 << 52) - 1);
    if exp_bits == 0 {
        if mantissa == 0 {
            return format!("{sign}0x0p+0");
        }
        // subnormal: 0.mantissa × 2^−1022
        return format!("{sign}0x0.{mantissa:013x}p-1022");
    }
    let exp = exp_bits - 1023;
    let exp_sign = if exp < 0 { "-" } else { "+" };
    format!("{sign}0x1.{mantissa:013x}p{exp_sign}{}", exp.abs())
}

/// Parses the output of [`format_hex_f64`] (and general C99 hex floats).
pub fn parse_hex_f64(s: &str) -> Result<f64> {
    let bad = || Error::Parse(format!("invalid hex float {s:?}"));
    let (sign, rest) = match s.strip_prefix('-') {
        Some(r) => (-1.0, r),
        None => (1.0, s.strip_prefix('+').unwrap_or(s)),
    };
    let rest = rest
        .strip_prefix("0x")
        .or_else(|| rest.strip_prefix("0X"))
        .ok_or_else(bad)?;
    let (mantissa_part, exp_part) = rest
        .split_once(['p', 'P'])
        .ok_or_else(bad)?;
    let exponent: i32 = exp_part.parse().map_err(|_| bad())?;
    let (int_part, frac_part) = match mantissa_part.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa_part, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if int_part.len() + frac_part.len() > 28 {
        return Err(bad());
    }
    let mut mantissa: u128 = 0;
    for c in int_part.chars().chain(frac_part.chars()) {
        let digit = c.to_digit(16).ok_or_else(bad)?;
        mantissa = mantissa * 16 + u128::from(digit);
    }
    let exp2 = exponent - 4 * frac_part.len() as i32;
    if mantissa == 0 {
        return Ok(sign * 0.0);
    }
    // powers of two are exact; split the exponent to keep both factors in
    // range for subnormal results
    let value = mantissa as f64 * 2f64.powi(exp2 / 2) * 2f64.powi(exp2 - exp2 / 2);
    Ok(sign * value)
}

fn scalar_to_json(x: f64, hex: bool) -> Value {
    if hex {
        Value::String(format_hex_f64(x))
    } else {
        serde_json::Number::from_f64(x)
            .map(Value::Number)
            .unwrap_or_else(|| Value::String(format_hex_f64(x)))
    }
}

fn scalar_from_json(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| Error::Parse(format!("non-float number {n}"))),
        Value::String(s) => parse_hex_f64(s),
        other => Err(Error::Parse(format!("expected scalar, got {other}"))),
    }
}

fn scalars_to_json(xs: &[f64], hex: bool) -> Value {
    Value::Array(xs.iter().map(|&x| scalar_to_json(x, hex)).collect())
}

fn scalars_from_json(v: &Value, what: &str) -> Result<Vec<f64>> {
    v.as_array()
        .ok_or_else(|| Error::Parse(format!("{what} must be an array")))?
        .iter()
        .map(scalar_from_json)
        .collect()
}

// ---------------------------------------------------------------------------
// basis summary

/// `{d, n, g, indices, parent_s, parent_u}` with 1-based parent entries.
pub fn basis_summary_json(basis: &MonomialBasis) -> Result<Value> {
    let indices: Vec<Value> = basis
        .indices()
        .iter()
        .map(|mi| Value::Array(mi.exponents().iter().map(|&e| json!(e)).collect()))
        .collect();
    let (parent_s, parent_u): (Vec<u64>, Vec<u64>) = basis
        .parents()?
        .iter()
        .map(|p| (p.source as u64 + 1, p.coord as u64 + 1))
        .unzip();
    Ok(json!({
        "d": basis.dim(),
        "n": basis.degree(),
        "g": basis.len(),
        "indices": indices,
        "parent_s": parent_s,
        "parent_u": parent_u,
    }))
}

// ---------------------------------------------------------------------------
// collocation map

fn map_to_json(map: &CollocationMap<f64>, hex: bool) -> Value {
    let rows: Vec<Value> = map
        .rows()
        .iter()
        .map(|row| {
            Value::Array(
                row.terms()
                    .iter()
                    .map(|t| {
                        json!([
                            t.block.name(),
                            t.node + 1,
                            scalar_to_json(t.weight, hex)
                        ])
                    })
                    .collect(),
            )
        })
        .collect();
    json!({ "rows": rows })
}

fn map_from_json(v: &Value, layout: StackedLayout) -> Result<CollocationMap<f64>> {
    let rows_json = v
        .get("rows")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("map.rows must be an array".into()))?;
    let mut rows = Vec::with_capacity(rows_json.len());
    for row in rows_json {
        let terms_json = row
            .as_array()
            .ok_or_else(|| Error::Parse("map row must be an array".into()))?;
        let mut terms = Vec::with_capacity(terms_json.len());
        for term in terms_json {
            let parts = term
                .as_array()
                .filter(|a| a.len() == 3)
                .ok_or_else(|| Error::Parse("map term must be [block, node, weight]".into()))?;
            let block = BlockId::parse(
                parts[0]
                    .as_str()
                    .ok_or_else(|| Error::Parse("block name must be a string".into()))?,
            )?;
            let node = parts[1]
                .as_u64()
                .filter(|&n| n >= 1)
                .ok_or_else(|| Error::Parse("node index must be a positive integer".into()))?;
            let weight = scalar_from_json(&parts[2])?;
            terms.push(CollocationTerm::new(block, node as usize - 1, weight));
        }
        rows.push(CollocationRow::new(terms)?);
    }
    CollocationMap::new(layout, rows)
}

// ---------------------------------------------------------------------------
// model files

/// Serializes a fitted model (without the orthonormal column store).
pub fn model_to_json(model: &FitModel<f64>, hex: bool) -> Result<Value> {
    let basis = model.basis();
    let summary = basis_summary_json(basis)?;
    let mut obj = Map::new();
    obj.insert("format".into(), json!(MODEL_FORMAT));
    obj.insert("version".into(), json!(MODEL_VERSION));
    obj.insert("d".into(), json!(basis.dim()));
    obj.insert("n".into(), json!(basis.degree()));
    obj.insert("order".into(), json!(model.order().as_u8()));
    obj.insert("g".into(), json!(model.g()));
    obj.insert("t".into(), json!(model.t()));
    obj.insert("parent_s".into(), summary["parent_s"].clone());
    obj.insert("parent_u".into(), summary["parent_u"].clone());
    obj.insert(
        "rtilde".into(),
        scalars_to_json(model.rtilde().data(), hex),
    );
    obj.insert("map".into(), map_to_json(model.map(), hex));
    obj.insert(
        "nodes".into(),
        json!({
            "m": model.nodes().len(),
            "coords": scalars_to_json(model.nodes().coords(), hex),
        }),
    );
    obj.insert(
        "coeffs".into(),
        match model.coeffs() {
            Some(c) => scalars_to_json(c, hex),
            None => Value::Null,
        },
    );
    Ok(Value::Object(obj))
}

/// Reads a model file. `base_dir` resolves a `nodes.path` reference when
/// the coordinates are not inline.
pub fn model_from_json(v: &Value, base_dir: Option<&Path>) -> Result<FitModel<f64>> {
    if v.get("format").and_then(Value::as_str) != Some(MODEL_FORMAT) {
        return Err(Error::Parse("not a model file".into()));
    }
    let get_usize = |key: &str| -> Result<usize> {
        v.get(key)
            .and_then(Value::as_u64)
            .map(|x| x as usize)
            .ok_or_else(|| Error::Parse(format!("missing integer field {key:?}")))
    };
    let d = get_usize("d")?;
    let n = get_usize("n")? as u32;
    let order = DerivOrder::try_from_u8(get_usize("order")? as u8)?;
    let g = get_usize("g")?;
    let t = get_usize("t")?;

    let basis = MonomialBasis::with_parents(d, n)?;
    if basis.len() != g {
        return Err(Error::Parse(format!(
            "stored g = {g} does not match C({n}+{d}, {d}) = {}",
            basis.len()
        )));
    }
    // the stored parent table must agree with the enumeration
    let stored_s = v
        .get("parent_s")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing parent_s".into()))?;
    let stored_u = v
        .get("parent_u")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing parent_u".into()))?;
    if stored_s.len() != g - 1 || stored_u.len() != g - 1 {
        return Err(Error::Parse("parent table length mismatch".into()));
    }
    for (i, parent) in basis.parents()?.iter().enumerate() {
        let s = stored_s[i].as_u64().unwrap_or(0);
        let u = stored_u[i].as_u64().unwrap_or(0);
        if s != parent.source as u64 + 1 || u != parent.coord as u64 + 1 {
            return Err(Error::Parse(format!(
                "stored parent table disagrees with the basis ordering at element {}",
                i + 2
            )));
        }
    }

    let nodes_json = v
        .get("nodes")
        .ok_or_else(|| Error::Parse("missing nodes".into()))?;
    let nodes = if let Some(path) = nodes_json.get("path").and_then(Value::as_str) {
        let resolved = match base_dir {
            Some(dir) => dir.join(path),
            None => path.into(),
        };
        read_node_csv(&resolved)?
    } else {
        let coords = scalars_from_json(
            nodes_json
                .get("coords")
                .ok_or_else(|| Error::Parse("nodes need coords or path".into()))?,
            "nodes.coords",
        )?;
        NodeSet::new(d, coords)?
    };
    if let Some(m) = nodes_json.get("m").and_then(Value::as_u64) {
        if m as usize != nodes.len() {
            return Err(Error::Parse("stored node count mismatch".into()));
        }
    }

    let rtilde_data = scalars_from_json(
        v.get("rtilde")
            .ok_or_else(|| Error::Parse("missing rtilde".into()))?,
        "rtilde",
    )?;
    let rtilde = Triangular::from_row_major(t, rtilde_data)?;

    let layout = StackedLayout::new(nodes.len(), d, order);
    let map = map_from_json(
        v.get("map")
            .ok_or_else(|| Error::Parse("missing map".into()))?,
        layout,
    )?;

    let coeffs = match v.get("coeffs") {
        None | Some(Value::Null) => None,
        Some(c) => Some(scalars_from_json(c, "coeffs")?),
    };

    FitModel::from_parts(basis, nodes, order, map, rtilde, coeffs)
}

// ---------------------------------------------------------------------------
// CSV

fn parse_csv_line(line: &str) -> Option<Vec<f64>> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    let mut out = Vec::with_capacity(fields.len());
    for field in fields {
        if field.is_empty() {
            return None;
        }
        let value = if field.starts_with("0x") || field.starts_with("-0x") || field.starts_with("+0x")
        {
            parse_hex_f64(field).ok()?
        } else {
            field.parse::<f64>().ok()?
        };
        out.push(value);
    }
    Some(out)
}

/// Reads a numeric CSV into row-major storage. A single leading
/// non-numeric line is treated as a header and skipped; both decimal and
/// hex-float cells are accepted.
pub fn read_matrix_csv(path: &Path) -> Result<(usize, Vec<f64>)> {
    let text = std::fs::read_to_string(path)?;
    let mut cols = 0usize;
    let mut data = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        match parse_csv_line(trimmed) {
            Some(row) => {
                if cols == 0 {
                    cols = row.len();
                } else if row.len() != cols {
                    return Err(Error::Parse(format!(
                        "{}: line {} has {} fields, expected {cols}",
                        path.display(),
                        lineno + 1,
                        row.len()
                    )));
                }
                data.extend_from_slice(&row);
            }
            None if data.is_empty() => continue, // header line
            None => {
                return Err(Error::Parse(format!(
                    "{}: line {} is not numeric",
                    path.display(),
                    lineno + 1
                )))
            }
        }
    }
    if data.is_empty() {
        return Err(Error::Parse(format!("{}: no data rows", path.display())));
    }
    Ok((cols, data))
}

pub fn read_node_csv(path: &Path) -> Result<NodeSet<f64>> {
    let (cols, data) = read_matrix_csv(path)?;
    NodeSet::new(cols, data)
}

/// Single-column value file.
pub fn read_values_csv(path: &Path) -> Result<Vec<f64>> {
    let (cols, data) = read_matrix_csv(path)?;
    if cols != 1 {
        return Err(Error::Parse(format!(
            "{}: expected one value per line, found {cols} columns",
            path.display()
        )));
    }
    Ok(data)
}

pub fn format_f64(x: f64, hex: bool) -> String {
    if hex {
        format_hex_f64(x)
    } else {
        format!("{x}")
    }
}

/// One row per evaluation node: coordinates, the polynomial value, then
/// derivative columns per the stacked order.
pub fn write_eval_csv<W: Write>(
    mut w: W,
    nodes: &NodeSet<f64>,
    output: &StackedOutput<f64>,
    hex: bool,
) -> Result<()> {
    let layout = output.layout();
    if nodes.len() != layout.m || nodes.dim() != layout.d {
        let got = StackedLayout::new(nodes.len(), nodes.dim(), layout.order);
        return Err(layout.mismatch_error(&got));
    }
    let blocks = BlockId::all(layout.d, layout.order);
    let mut header: Vec<String> = (1..=layout.d).map(|a| format!("x{a}")).collect();
    for b in &blocks {
        header.push(match b {
            BlockId::Value => "p".to_string(),
            other => format!("{}_p", other.name()),
        });
    }
    writeln!(w, "{}", header.join(","))?;
    let stacked = output.as_stacked();
    for j in 0..layout.m {
        let mut fields: Vec<String> = (0..layout.d)
            .map(|a| format_f64(nodes.coord(j, a), hex))
            .collect();
        for b in &blocks {
            fields.push(format_f64(stacked.block(*b)?[j], hex));
        }
        writeln!(w, "{}", fields.join(","))?;
    }
    Ok(())
}

/// Writes via a temporary file in the same directory plus rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        path.file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "out".into()),
        std::process::id()
    ));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_round_trip_specials() {
        for &x in &[
            0.0,
            -0.0,
            1.0,
            -1.0,
            3.0,
            0.1,
            f64::MIN_POSITIVE,
            f64::MIN_POSITIVE / 1024.0, // subnormal
            f64::MAX,
            5e-324, // smallest subnormal
            std::f64::consts::PI,
        ] {
            let s = format_hex_f64(x);
            let back = parse_hex_f64(&s).unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x} -> {s} -> {back}");
        }
        assert_eq!(format_hex_f64(3.0), "0x1.8000000000000p+1");
    }

    #[test]
    fn hex_parse_rejects_garbage() {
        for s in ["", "1.5", "0x", "0xp3", "0x1.zzp+1", "0x1.8q+1"] {
            assert!(parse_hex_f64(s).is_err(), "{s:?} should not parse");
        }
    }

    #[test]
    fn csv_header_and_hex_cells() {
        let dir = std::env::temp_dir().join(format!("mvga-io-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("nodes.csv");
        std::fs::write(&path, "x1,x2\n0.5,-0.25\n0x1.8p+1,1.0\n").unwrap();
        let nodes = read_node_csv(&path).unwrap();
        assert_eq!(nodes.len(), 2);
        assert_eq!(nodes.coord(1, 0), 3.0);
        std::fs::remove_dir_all(&dir).ok();
    }
}
