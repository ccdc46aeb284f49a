//! Free-format MPS writer and reader.
//!
//! Layout written: `NAME`, `ROWS`, `COLUMNS`, `RHS`, `BOUNDS`, `ENDATA`, LF
//! line endings, whitespace-separated fields. The objective row is `OBJ` and
//! the objective constant is carried as `RHS OBJ -constant`. Binaries get a
//! `BV` bound line, followed by `LO`/`UP` when fixed. `RANGES` is not
//! supported.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::scalar::Scalar;

use super::{LinExpr, MilpError, MilpModel, Sense, VarId, VarKind, Variable};

pub const MAX_NAME_LEN: usize = 64;
const OBJ_ROW: &str = "OBJ";

#[derive(Debug, Error, PartialEq)]
pub enum MpsError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: unknown row `{name}`")]
    UnknownRow { line: usize, name: String },
    #[error("line {line}: unknown column `{name}`")]
    UnknownColumn { line: usize, name: String },
    #[error("name `{0}` is longer than 64 characters")]
    NameTooLong(String),
    #[error(transparent)]
    Model(#[from] MilpError),
}

fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "1e30".into() } else { "-1e30".into() }
    } else if (1e-4..1e15).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn check_name(name: &str) -> Result<(), MpsError> {
    if name.len() > MAX_NAME_LEN || name.is_empty() || name.chars().any(char::is_whitespace) {
        return Err(MpsError::NameTooLong(name.to_string()));
    }
    Ok(())
}

/// Serializes `model` as free-format MPS (minimization).
pub fn export_mps<S: Scalar>(model: &MilpModel<S>) -> Result<String, MpsError> {
    let mut out = String::new();
    let name = if model.name.is_empty() { "MODEL" } else { &model.name };
    check_name(name)?;
    let _ = writeln!(out, "NAME {name}");
    out.push_str("ROWS\n");
    let _ = writeln!(out, " N  {OBJ_ROW}");
    for c in model.constraints() {
        check_name(&c.name)?;
        let tag = match c.sense {
            Sense::Le => 'L',
            Sense::Ge => 'G',
            Sense::Eq => 'E',
        };
        let _ = writeln!(out, " {tag}  {}", c.name);
    }

    // column-major view of the rows
    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); model.num_vars()];
    for (r, c) in model.constraints().iter().enumerate() {
        for &(coef, v) in &c.expr.terms {
            cols[v.0].push((r, coef.to_f64_lossy()));
        }
    }
    let mut obj = vec![0.0; model.num_vars()];
    for &(coef, v) in &model.objective().terms {
        obj[v.0] += coef.to_f64_lossy();
    }

    out.push_str("COLUMNS\n");
    for (j, var) in model.variables().iter().enumerate() {
        check_name(&var.name)?;
        if obj[j] != 0.0 || cols[j].is_empty() {
            let _ = writeln!(out, "    {}  {OBJ_ROW}  {}", var.name, fmt_num(obj[j]));
        }
        for &(r, coef) in &cols[j] {
            let _ = writeln!(
                out,
                "    {}  {}  {}",
                var.name,
                model.constraints()[r].name,
                fmt_num(coef)
            );
        }
    }

    out.push_str("RHS\n");
    let obj_const = model.objective().constant.to_f64_lossy();
    if obj_const != 0.0 {
        let _ = writeln!(out, "    RHS  {OBJ_ROW}  {}", fmt_num(-obj_const));
    }
    for c in model.constraints() {
        let rhs = (c.rhs - c.expr.constant).to_f64_lossy();
        if rhs != 0.0 {
            let _ = writeln!(out, "    RHS  {}  {}", c.name, fmt_num(rhs));
        }
    }

    out.push_str("BOUNDS\n");
    for var in model.variables() {
        let lo = var.lower.to_f64_lossy();
        let up = var.upper.to_f64_lossy();
        let n = &var.name;
        match var.kind {
            VarKind::Binary => {
                let _ = writeln!(out, " BV BND  {n}");
                if lo != 0.0 {
                    let _ = writeln!(out, " LO BND  {n}  {}", fmt_num(lo));
                }
                if up != 1.0 {
                    let _ = writeln!(out, " UP BND  {n}  {}", fmt_num(up));
                }
            }
            VarKind::Continuous => {
                if lo == up {
                    let _ = writeln!(out, " FX BND  {n}  {}", fmt_num(lo));
                    continue;
                }
                if lo == f64::NEG_INFINITY {
                    let _ = writeln!(out, " MI BND  {n}");
                } else if lo != 0.0 {
                    let _ = writeln!(out, " LO BND  {n}  {}", fmt_num(lo));
                }
                if up.is_finite() {
                    let _ = writeln!(out, " UP BND  {n}  {}", fmt_num(up));
                }
            }
        }
    }
    out.push_str("ENDATA\n");
    Ok(out)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Section {
    None,
    Rows,
    Columns,
    Rhs,
    Bounds,
    End,
}

struct RowDecl {
    name: String,
    sense: Option<Sense>,
}

/// Parses free-format MPS into a minimization model.
pub fn parse_mps<S: Scalar>(text: &str) -> Result<MilpModel<S>, MpsError> {
    let mut name = String::new();
    let mut section = Section::None;
    let mut rows: Vec<RowDecl> = Vec::new();
    let mut row_idx: HashMap<String, usize> = HashMap::new();
    let mut obj_row: Option<usize> = None;
    let mut col_names: Vec<String> = Vec::new();
    let mut col_idx: HashMap<String, usize> = HashMap::new();
    let mut col_entries: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut col_integer: Vec<bool> = Vec::new();
    let mut bounds: Vec<(f64, f64)> = Vec::new();
    let mut binary: Vec<bool> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    let mut in_int_block = false;

    let malformed = |line: usize, msg: &str| MpsError::Malformed {
        line,
        msg: msg.to_string(),
    };
    let num = |line: usize, tok: &str| -> Result<f64, MpsError> {
        tok.parse::<f64>()
            .map_err(|_| malformed(line, &format!("bad number `{tok}`")))
    };

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let trimmed = raw.trim_end();
        if trimmed.is_empty() || trimmed.starts_with('*') {
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        let is_header = !raw.starts_with(char::is_whitespace);
        if is_header {
            section = match toks[0] {
                "NAME" => {
                    name = toks.get(1).copied().unwrap_or("").to_string();
                    Section::None
                }
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "BOUNDS" => Section::Bounds,
                "ENDATA" => Section::End,
                "OBJSENSE" => {
                    if toks.get(1).is_some_and(|s| s.starts_with("MAX")) {
                        return Err(malformed(line, "only minimization is supported"));
                    }
                    section
                }
                "RANGES" => return Err(malformed(line, "RANGES section is not supported")),
                other => return Err(malformed(line, &format!("unknown section `{other}`"))),
            };
            if section == Section::End {
                break;
            }
            continue;
        }
        match section {
            Section::None | Section::End => {
                return Err(malformed(line, "data line outside of a section"));
            }
            Section::Rows => {
                if toks.len() != 2 {
                    return Err(malformed(line, "ROWS entry needs a type and a name"));
                }
                let sense = match toks[0] {
                    "N" => None,
                    "L" => Some(Sense::Le),
                    "G" => Some(Sense::Ge),
                    "E" => Some(Sense::Eq),
                    t => return Err(malformed(line, &format!("unknown row type `{t}`"))),
                };
                if row_idx.contains_key(toks[1]) {
                    return Err(malformed(line, &format!("duplicate row `{}`", toks[1])));
                }
                if sense.is_none() && obj_row.is_none() {
                    obj_row = Some(rows.len());
                }
                row_idx.insert(toks[1].to_string(), rows.len());
                rows.push(RowDecl {
                    name: toks[1].to_string(),
                    sense,
                });
                rhs.push(0.0);
            }
            Section::Columns => {
                if toks.len() >= 3 && toks[1].trim_matches('\'') == "MARKER" {
                    match toks[2].trim_matches('\'') {
                        "INTORG" => in_int_block = true,
                        "INTEND" => in_int_block = false,
                        m => return Err(malformed(line, &format!("unknown marker `{m}`"))),
                    }
                    continue;
                }
                if toks.len() != 3 && toks.len() != 5 {
                    return Err(malformed(line, "COLUMNS entry needs 3 or 5 fields"));
                }
                let col = match col_idx.get(toks[0]) {
                    Some(&c) => c,
                    None => {
                        let c = col_names.len();
                        col_idx.insert(toks[0].to_string(), c);
                        col_names.push(toks[0].to_string());
                        col_entries.push(Vec::new());
                        col_integer.push(in_int_block);
                        bounds.push((0.0, f64::INFINITY));
                        binary.push(false);
                        c
                    }
                };
                for pair in toks[1..].chunks(2) {
                    let r = *row_idx.get(pair[0]).ok_or_else(|| MpsError::UnknownRow {
                        line,
                        name: pair[0].to_string(),
                    })?;
                    col_entries[col].push((r, num(line, pair[1])?));
                }
            }
            Section::Rhs => {
                let data = if toks.len() % 2 == 1 { &toks[1..] } else { &toks[..] };
                if data.is_empty() {
                    return Err(malformed(line, "empty RHS entry"));
                }
                for pair in data.chunks(2) {
                    if pair.len() != 2 {
                        return Err(malformed(line, "RHS entry needs row/value pairs"));
                    }
                    let r = *row_idx.get(pair[0]).ok_or_else(|| MpsError::UnknownRow {
                        line,
                        name: pair[0].to_string(),
                    })?;
                    rhs[r] = num(line, pair[1])?;
                }
            }
            Section::Bounds => {
                let kind = toks[0];
                let needs_value = matches!(kind, "UP" | "LO" | "FX" | "UI" | "LI");
                let (col_tok, val_tok) = match (toks.len(), needs_value) {
                    (4, true) => (toks[2], Some(toks[3])),
                    (3, true) => (toks[1], Some(toks[2])),
                    (3, false) => (toks[2], None),
                    (2, false) => (toks[1], None),
                    _ => return Err(malformed(line, "malformed BOUNDS entry")),
                };
                let c = *col_idx.get(col_tok).ok_or_else(|| MpsError::UnknownColumn {
                    line,
                    name: col_tok.to_string(),
                })?;
                let v = val_tok.map(|t| num(line, t)).transpose()?;
                let b = &mut bounds[c];
                match kind {
                    "UP" | "UI" => b.1 = v.unwrap_or(f64::INFINITY),
                    "LO" | "LI" => b.0 = v.unwrap_or(0.0),
                    "FX" => {
                        let v = v.unwrap_or(0.0);
                        *b = (v, v);
                    }
                    "MI" => b.0 = f64::NEG_INFINITY,
                    "PL" => b.1 = f64::INFINITY,
                    "FR" => *b = (f64::NEG_INFINITY, f64::INFINITY),
                    "BV" => {
                        *b = (0.0, 1.0);
                        binary[c] = true;
                    }
                    t => return Err(malformed(line, &format!("unknown bound type `{t}`"))),
                }
                if kind == "UI" || kind == "LI" {
                    col_integer[c] = true;
                }
            }
        }
    }
    if section != Section::End {
        return Err(malformed(text.lines().count(), "missing ENDATA"));
    }

    let mut model = MilpModel::new(name);
    let mut ids = Vec::with_capacity(col_names.len());
    for (c, cname) in col_names.iter().enumerate() {
        let (lo, up) = bounds[c];
        let is_bin = binary[c] || (col_integer[c] && lo >= 0.0 && up <= 1.0)
            || (col_integer[c] && lo == 0.0 && up == f64::INFINITY);
        if col_integer[c] && !is_bin {
            return Err(MpsError::Malformed {
                line: 0,
                msg: format!("general integer column `{cname}` is not supported"),
            });
        }
        let var = if is_bin {
            let up = if up == f64::INFINITY { 1.0 } else { up };
            Variable::binary(cname.clone()).with_bounds(S::lit(lo), S::lit(up))
        } else {
            Variable::continuous(cname.clone(), S::lit(lo), S::lit(up))
        };
        ids.push(model.add_variable(var)?);
    }
    let mut exprs: Vec<LinExpr<S>> = vec![LinExpr::new(); rows.len()];
    for (c, entries) in col_entries.iter().enumerate() {
        for &(r, v) in entries {
            exprs[r].add_term(S::lit(v), VarId(ids[c].0));
        }
    }
    for (r, (decl, expr)) in rows.iter().zip(exprs).enumerate() {
        match decl.sense {
            Some(sense) => model.constrain(decl.name.clone(), expr, sense, S::lit(rhs[r]))?,
            None if Some(r) == obj_row => {
                let mut e = expr;
                e.constant = S::lit(-rhs[r]);
                model.set_objective(e)?;
            }
            None => {}
        }
    }
    Ok(model)
}
