//! Structured-text geometry files: a line-based sectioned format whose exact
//! schema is documented in docs/geometry-format.md. Round-trips bit-exactly
//! through `to_text` / `parse_text`.

use super::{GeometrySpec, OracleAnnotations};
use crate::algebra::{
    AlgebraElement, AlgebraSpec, BasisKey, Degree, Derivation, DerivationRule, UserAlgebra,
};
use crate::dirac::DiracModuleSpec;
use crate::forms::{FrameSpec, Tensor};
use crate::matrix::Matrix;
use crate::scalar::{parse::parse_scalar, Scalar};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryFileError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("validation failed: {0} violation(s), first: {1}")]
    Validation(usize, String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

fn perr<T>(line: usize, msg: impl Into<String>) -> Result<T, GeometryFileError> {
    Err(GeometryFileError::Parse { line, msg: msg.into() })
}

/// One parsed `key = value` line.
#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    key: String,
    value: String,
}

fn split_sections(text: &str) -> Result<BTreeMap<String, Vec<Entry>>, GeometryFileError> {
    let mut sections: BTreeMap<String, Vec<Entry>> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = match raw.find('#') {
            // '#' inside quotes is not special in this format
            Some(p) if !raw[..p].contains('"') || raw[..p].matches('"').count() % 2 == 0 => {
                &raw[..p]
            }
            _ => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            current = Some(name.trim().to_string());
            sections.entry(name.trim().to_string()).or_default();
            continue;
        }
        let Some(section) = current.clone() else {
            return perr(line_no, "entry before any [section]");
        };
        let Some(eq) = line.find('=') else {
            return perr(line_no, "expected key = value");
        };
        sections.entry(section).or_default().push(Entry {
            line: line_no,
            key: line[..eq].trim().to_string(),
            value: line[eq + 1..].trim().to_string(),
        });
    }
    Ok(sections)
}

fn get<'a>(entries: &'a [Entry], key: &str) -> Option<&'a Entry> {
    entries.iter().find(|e| e.key == key)
}

fn required<'a>(
    entries: &'a [Entry],
    section: &str,
    key: &str,
) -> Result<&'a Entry, GeometryFileError> {
    get(entries, key).ok_or_else(|| GeometryFileError::Parse {
        line: 0,
        msg: format!("missing '{key}' in [{section}]"),
    })
}

fn parse_usize(e: &Entry) -> Result<usize, GeometryFileError> {
    e.value.parse().map_err(|_| GeometryFileError::Parse {
        line: e.line,
        msg: format!("expected an integer, got '{}'", e.value),
    })
}

fn parse_degree_text(s: &str, line: usize) -> Result<Degree, GeometryFileError> {
    let t = s.trim();
    let inner = t
        .strip_prefix('(')
        .and_then(|x| x.strip_suffix(')'))
        .ok_or(GeometryFileError::Parse { line, msg: format!("expected (a,b), got '{t}'") })?;
    let parts: Vec<&str> = inner.split(',').collect();
    if parts.len() != 2 {
        return perr(line, format!("expected two components in '{t}'"));
    }
    let a = parts[0].trim().parse().map_err(|_| GeometryFileError::Parse {
        line,
        msg: format!("bad integer '{}'", parts[0]),
    })?;
    let b = parts[1].trim().parse().map_err(|_| GeometryFileError::Parse {
        line,
        msg: format!("bad integer '{}'", parts[1]),
    })?;
    Ok(Degree::new(a, b))
}

/// Split a comma-separated list at depth zero of (), {}, [] and quotes.
fn split_top(s: &str, sep: char) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut quoted = false;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '"' => {
                quoted = !quoted;
                cur.push(ch);
            }
            '(' | '{' | '[' if !quoted => {
                depth += 1;
                cur.push(ch);
            }
            ')' | '}' | ']' if !quoted => {
                depth -= 1;
                cur.push(ch);
            }
            c if c == sep && depth == 0 && !quoted => {
                out.push(cur.trim().to_string());
                cur = String::new();
            }
            _ => cur.push(ch),
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

fn parse_scalar_text(s: &str, line: usize) -> Result<Scalar, GeometryFileError> {
    let t = s.trim();
    let unq = t.strip_prefix('"').and_then(|x| x.strip_suffix('"')).unwrap_or(t);
    parse_scalar(unq).map_err(|e| GeometryFileError::Parse { line, msg: e.to_string() })
}

fn parse_basis_key(
    s: &str,
    algebra: &AlgebraSpec,
    line: usize,
) -> Result<BasisKey, GeometryFileError> {
    let t = s.trim();
    if t == "1" {
        return Ok(algebra.unit_key());
    }
    if t.starts_with('(') {
        let d = parse_degree_text(t, line)?;
        // monomial key (m,n); note the key stores (m,n), not the degree
        return Ok(BasisKey::Mono(d.n1, d.n2));
    }
    if let AlgebraSpec::UserTable(u) = algebra {
        if t == u.unit_name {
            return Ok(BasisKey::Mono(0, 0));
        }
        if let Some(i) = u.names.iter().position(|n| n == t) {
            return Ok(BasisKey::Named(i as u16));
        }
    }
    perr(line, format!("unknown basis key '{t}'"))
}

/// `{ key: value, ... }` -> list of (key, value) strings.
fn parse_map(s: &str, line: usize) -> Result<Vec<(String, String)>, GeometryFileError> {
    let t = s.trim();
    let inner = t
        .strip_prefix('{')
        .and_then(|x| x.strip_suffix('}'))
        .ok_or(GeometryFileError::Parse { line, msg: format!("expected {{...}}, got '{t}'") })?;
    let mut out = Vec::new();
    for item in split_top(inner, ',') {
        if item.is_empty() {
            continue;
        }
        // split on the last ':' at depth zero to allow (a,b) keys
        let mut depth = 0;
        let mut quoted = false;
        let mut split_at = None;
        for (i, ch) in item.char_indices() {
            match ch {
                '"' => quoted = !quoted,
                '(' | '{' | '[' if !quoted => depth += 1,
                ')' | '}' | ']' if !quoted => depth -= 1,
                ':' if depth == 0 && !quoted => {
                    split_at = Some(i);
                    break;
                }
                _ => {}
            }
        }
        let Some(p) = split_at else {
            return perr(line, format!("expected key: value in '{item}'"));
        };
        out.push((item[..p].trim().to_string(), item[p + 1..].trim().to_string()));
    }
    Ok(out)
}

fn parse_algebra_element(
    s: &str,
    algebra: &AlgebraSpec,
    line: usize,
) -> Result<AlgebraElement, GeometryFileError> {
    let t = s.trim();
    if t.starts_with('{') {
        let mut e = AlgebraElement::zero();
        for (k, v) in parse_map(t, line)? {
            e.add_term(parse_basis_key(&k, algebra, line)?, parse_scalar_text(&v, line)?);
        }
        Ok(e)
    } else {
        // unit-coefficient shorthand
        Ok(AlgebraElement::from_term(algebra.unit_key(), parse_scalar_text(t, line)?))
    }
}

/// `[ "a", "b" ; "c", "d" ]` -> matrix.
fn parse_matrix(s: &str, line: usize) -> Result<Matrix, GeometryFileError> {
    let t = s.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|x| x.strip_suffix(']'))
        .ok_or(GeometryFileError::Parse { line, msg: format!("expected [...], got '{t}'") })?;
    let mut rows = Vec::new();
    for row in split_top(inner, ';') {
        let mut r = Vec::new();
        for cell in split_top(&row, ',') {
            r.push(parse_scalar_text(&cell, line)?);
        }
        rows.push(r);
    }
    if rows.is_empty() {
        return perr(line, "empty matrix");
    }
    let w = rows[0].len();
    if rows.iter().any(|r| r.len() != w) {
        return perr(line, "ragged matrix rows");
    }
    Ok(Matrix::from_rows(rows))
}

pub fn parse_text(text: &str) -> Result<GeometrySpec, GeometryFileError> {
    let sections = split_sections(text)?;
    let sec = |name: &str| -> Result<&Vec<Entry>, GeometryFileError> {
        sections.get(name).ok_or_else(|| GeometryFileError::Parse {
            line: 0,
            msg: format!("missing [{name}] section"),
        })
    };

    // [meta]
    let meta = sec("meta")?;
    let name = required(meta, "meta", "name")?.value.clone();
    let dimension = parse_usize(required(meta, "meta", "dimension")?)?;
    let mut oracle = OracleAnnotations::default();
    if let Some(e) = get(meta, "expected_scalar") {
        oracle.scalar_curvature = Some(parse_scalar_text(&e.value, e.line)?);
    }
    if let Some(e) = get(meta, "expected_ricci_factor") {
        oracle.ricci_factor = Some(parse_scalar_text(&e.value, e.line)?);
    }
    if let Some(e) = get(meta, "expected_residue_factor") {
        oracle.residue_factor = Some(parse_scalar_text(&e.value, e.line)?);
    }

    // [algebra]
    let alg_sec = sec("algebra")?;
    let kind = required(alg_sec, "algebra", "kind")?;
    let algebra = match kind.value.as_str() {
        "constants" => AlgebraSpec::TrivialConstants,
        "laurent" => AlgebraSpec::LaurentMonomials,
        "table" => {
            let basis_e = required(alg_sec, "algebra", "basis")?;
            let all_names: Vec<String> =
                split_top(&basis_e.value, ',').into_iter().map(|s| s.trim().to_string()).collect();
            let unit_e = required(alg_sec, "algebra", "unit")?;
            let unit_name = unit_e.value.clone();
            if !all_names.contains(&unit_name) {
                return perr(unit_e.line, format!("unit '{unit_name}' not in basis"));
            }
            let names: Vec<String> =
                all_names.iter().filter(|n| **n != unit_name).cloned().collect();
            let mut degrees = vec![Degree::ZERO; names.len()];
            let mut products = BTreeMap::new();
            let mut stars: Vec<(BasisKey, Scalar)> =
                (0..names.len()).map(|i| (BasisKey::Named(i as u16), Scalar::one())).collect();
            let find_key = |n: &str, line: usize| -> Result<BasisKey, GeometryFileError> {
                if n == unit_name || n == "1" {
                    return Ok(BasisKey::Mono(0, 0));
                }
                names
                    .iter()
                    .position(|x| x == n)
                    .map(|i| BasisKey::Named(i as u16))
                    .ok_or(GeometryFileError::Parse { line, msg: format!("unknown basis name '{n}'") })
            };
            for e in alg_sec {
                if let Some(rest) = e.key.strip_prefix("degree.") {
                    match find_key(rest, e.line)? {
                        BasisKey::Named(i) => {
                            degrees[i as usize] = parse_degree_text(&e.value, e.line)?;
                        }
                        _ => {
                            let d = parse_degree_text(&e.value, e.line)?;
                            if !d.is_zero() {
                                return perr(e.line, "the unit must have degree (0,0)");
                            }
                        }
                    }
                } else if let Some(rest) = e.key.strip_prefix("product.") {
                    let parts: Vec<&str> = rest.split('.').collect();
                    if parts.len() != 2 {
                        return perr(e.line, "product key must be product.<a>.<b>");
                    }
                    let (a, b) = (find_key(parts[0], e.line)?, find_key(parts[1], e.line)?);
                    let mut terms = Vec::new();
                    for (k, v) in parse_map(&e.value, e.line)? {
                        terms.push((find_key(&k, e.line)?, parse_scalar_text(&v, e.line)?));
                    }
                    match (a, b) {
                        (BasisKey::Named(i), BasisKey::Named(j)) => {
                            products.insert((i, j), terms);
                        }
                        // unit products are built in; accept consistent
                        // declarations and reject inconsistent ones
                        (BasisKey::Mono(0, 0), other) | (other, BasisKey::Mono(0, 0)) => {
                            if terms != vec![(other, Scalar::one())] {
                                return perr(e.line, "unit products are fixed: 1 * x = x");
                            }
                        }
                        _ => return perr(e.line, "bad product declaration"),
                    }
                } else if let Some(rest) = e.key.strip_prefix("star.") {
                    let inner = e
                        .value
                        .strip_prefix('(')
                        .and_then(|x| x.strip_suffix(')'))
                        .ok_or(GeometryFileError::Parse {
                            line: e.line,
                            msg: "star value must be (name, scalar)".into(),
                        })?;
                    let parts = split_top(inner, ',');
                    if parts.len() != 2 {
                        return perr(e.line, "star value must be (name, scalar)");
                    }
                    // the unit's star is fixed; only named generators are stored
                    if let BasisKey::Named(i) = find_key(rest, e.line)? {
                        stars[i as usize] =
                            (find_key(&parts[0], e.line)?, parse_scalar_text(&parts[1], e.line)?);
                    }
                }
            }
            AlgebraSpec::UserTable(UserAlgebra { unit_name, names, degrees, products, stars })
        }
        other => return perr(kind.line, format!("unknown algebra kind '{other}'")),
    };

    // [derivation]
    let der_sec = sec("derivation")?;
    let dkind = required(der_sec, "derivation", "kind")?;
    let mut derivation = match dkind.value.as_str() {
        "zero" => Derivation::zero(),
        "torus" => Derivation::torus(),
        "table" => Derivation { rule: DerivationRule::Table(BTreeMap::new()), overrides: BTreeMap::new() },
        other => return perr(dkind.line, format!("unknown derivation kind '{other}'")),
    };
    for e in der_sec {
        if let Some(rest) = e.key.strip_prefix("d.") {
            let key = parse_basis_key(rest, &algebra, e.line)?;
            let mut coords = Vec::new();
            for (k, v) in parse_map(&e.value, e.line)? {
                let j: usize = k.parse().map_err(|_| GeometryFileError::Parse {
                    line: e.line,
                    msg: format!("bad frame index '{k}'"),
                })?;
                coords.push((j - 1, parse_algebra_element(&v, &algebra, e.line)?));
            }
            match &mut derivation.rule {
                DerivationRule::Table(t) => {
                    t.insert(key, coords);
                }
                _ => {
                    derivation.overrides.insert(key, coords);
                }
            }
        }
    }

    // [frame]
    let frame_sec = sec("frame")?;
    let size = parse_usize(required(frame_sec, "frame", "size")?)?;
    let deg_e = required(frame_sec, "frame", "degrees")?;
    let degrees: Vec<Degree> = split_top(&deg_e.value, ',')
        .into_iter()
        .map(|d| parse_degree_text(&d, deg_e.line))
        .collect::<Result<_, _>>()?;
    if degrees.len() != size {
        return perr(deg_e.line, "frame degree list length mismatch");
    }
    let mut star = Matrix::zero(size, size);
    for e in frame_sec {
        if let Some(rest) = e.key.strip_prefix("star.") {
            let j: usize = rest.parse().map_err(|_| GeometryFileError::Parse {
                line: e.line,
                msg: format!("bad frame index '{rest}'"),
            })?;
            for (k, v) in parse_map(&e.value, e.line)? {
                let kk: usize = k.parse().map_err(|_| GeometryFileError::Parse {
                    line: e.line,
                    msg: format!("bad frame index '{k}'"),
                })?;
                *star.at_mut(kk - 1, j - 1) = parse_scalar_text(&v, e.line)?;
            }
        } else if e.key == "gram" {
            if e.value != "identity" {
                return perr(
                    e.line,
                    "non-orthonormal Gram matrices are not supported: the engine \
                     requires gram = identity",
                );
            }
        } else if let Some(rest) = e.key.strip_prefix("gram.") {
            let j: usize = rest.parse().unwrap_or(0);
            for (k, v) in parse_map(&e.value, e.line)? {
                let kk: usize = k.parse().unwrap_or(0);
                let s = parse_scalar_text(&v, e.line)?;
                let expect = if kk == j { Scalar::one() } else { Scalar::zero() };
                if s != expect {
                    return perr(
                        e.line,
                        "non-orthonormal Gram matrices are not supported: the engine \
                         requires an orthonormal frame",
                    );
                }
            }
        }
    }

    // [differential]
    let mut dw = vec![Tensor::zero(2); size];
    if let Some(diff_sec) = sections.get("differential") {
        for e in diff_sec {
            if let Some(rest) = e.key.strip_prefix("dw.") {
                let j: usize = rest.parse().map_err(|_| GeometryFileError::Parse {
                    line: e.line,
                    msg: format!("bad frame index '{rest}'"),
                })?;
                let mut t = Tensor::zero(2);
                for (k, v) in parse_map(&e.value, e.line)? {
                    let d = parse_degree_text(&k, e.line)?;
                    let (p, q) = (d.n1 as usize, d.n2 as usize);
                    t.add_term(
                        vec![(p - 1) as u8, (q - 1) as u8],
                        parse_algebra_element(&v, &algebra, e.line)?,
                    );
                }
                dw[j - 1] = t;
            }
        }
    }
    let frame = FrameSpec { size, degrees, star, dw };

    // [clifford]
    let cl_sec = sec("clifford")?;
    let spinor_rank = parse_usize(required(cl_sec, "clifford", "spinor_rank")?)?;
    let sd_e = required(cl_sec, "clifford", "spinor_degrees")?;
    let spinor_degrees: Vec<Degree> = split_top(&sd_e.value, ',')
        .into_iter()
        .map(|d| parse_degree_text(&d, sd_e.line))
        .collect::<Result<_, _>>()?;
    let mut gamma = vec![Matrix::zero(spinor_rank, spinor_rank); size];
    for e in cl_sec {
        if let Some(rest) = e.key.strip_prefix("gamma.") {
            let j: usize = rest.parse().map_err(|_| GeometryFileError::Parse {
                line: e.line,
                msg: format!("bad frame index '{rest}'"),
            })?;
            gamma[j - 1] = parse_matrix(&e.value, e.line)?;
        }
    }

    // [spin_connection]
    let mut spin_table = vec![Matrix::zero(spinor_rank, spinor_rank); size];
    if let Some(sp_sec) = sections.get("spin_connection") {
        for e in sp_sec {
            if let Some(rest) = e.key.strip_prefix("table.") {
                let j: usize = rest.parse().map_err(|_| GeometryFileError::Parse {
                    line: e.line,
                    msg: format!("bad frame index '{rest}'"),
                })?;
                spin_table[j - 1] = parse_matrix(&e.value, e.line)?;
            }
        }
    }

    // [functional]
    if let Some(f_sec) = sections.get("functional") {
        if let Some(e) = get(f_sec, "kind") {
            if e.value != "unit" {
                return perr(e.line, format!("unsupported functional kind '{}'", e.value));
            }
        }
    }

    let dirac = DiracModuleSpec { spinor_rank, spinor_degrees, gamma, spin_table };
    Ok(GeometrySpec { name, dimension, algebra, derivation, frame, dirac, oracle })
}

/// Parse and fully validate.
pub fn load_str(text: &str) -> Result<GeometrySpec, GeometryFileError> {
    let geo = parse_text(text)?;
    let violations = geo.validate();
    if !violations.is_empty() {
        return Err(GeometryFileError::Validation(
            violations.len(),
            format!("{}: {}", violations[0].check, violations[0].detail),
        ));
    }
    Ok(geo)
}

pub fn load_path(path: &std::path::Path) -> Result<GeometrySpec, GeometryFileError> {
    let text = std::fs::read_to_string(path)?;
    load_str(&text)
}

fn fmt_degree(d: Degree) -> String {
    format!("({},{})", d.n1, d.n2)
}

fn fmt_element(e: &AlgebraElement, algebra: &AlgebraSpec) -> String {
    let items: Vec<String> = e
        .terms()
        .map(|(k, s)| {
            let key = match k {
                BasisKey::Mono(0, 0) => "1".to_string(),
                BasisKey::Mono(m, n) => format!("({m},{n})"),
                BasisKey::Named(i) => match algebra {
                    AlgebraSpec::UserTable(t) => t.names[*i as usize].clone(),
                    _ => format!("#{i}"),
                },
            };
            format!("{key}: \"{s}\"")
        })
        .collect();
    format!("{{ {} }}", items.join(", "))
}

fn fmt_matrix(m: &Matrix) -> String {
    let mut rows = Vec::new();
    for r in 0..m.rows {
        let cells: Vec<String> = (0..m.cols).map(|c| format!("\"{}\"", m.at(r, c))).collect();
        rows.push(cells.join(", "));
    }
    format!("[ {} ]", rows.join(" ; "))
}

/// Serialize a geometry to the text format. `parse_text(to_text(g)) == g`.
pub fn to_text(geo: &GeometrySpec) -> String {
    let mut s = String::new();
    let push = |s: &mut String, t: String| {
        s.push_str(&t);
        s.push('\n');
    };
    push(&mut s, "[meta]".into());
    push(&mut s, format!("name = {}", geo.name));
    push(&mut s, format!("dimension = {}", geo.dimension));
    if let Some(v) = &geo.oracle.scalar_curvature {
        push(&mut s, format!("expected_scalar = \"{v}\""));
    }
    if let Some(v) = &geo.oracle.ricci_factor {
        push(&mut s, format!("expected_ricci_factor = \"{v}\""));
    }
    if let Some(v) = &geo.oracle.residue_factor {
        push(&mut s, format!("expected_residue_factor = \"{v}\""));
    }
    push(&mut s, String::new());
    push(&mut s, "[algebra]".into());
    match &geo.algebra {
        AlgebraSpec::TrivialConstants => push(&mut s, "kind = constants".into()),
        AlgebraSpec::LaurentMonomials => push(&mut s, "kind = laurent".into()),
        AlgebraSpec::UserTable(t) => {
            push(&mut s, "kind = table".into());
            let mut all = vec![t.unit_name.clone()];
            all.extend(t.names.iter().cloned());
            push(&mut s, format!("basis = {}", all.join(", ")));
            push(&mut s, format!("unit = {}", t.unit_name));
            let key_name = |k: &BasisKey| match k {
                BasisKey::Mono(0, 0) => t.unit_name.clone(),
                BasisKey::Named(i) => t.names[*i as usize].clone(),
                other => other.to_string(),
            };
            for (i, d) in t.degrees.iter().enumerate() {
                push(&mut s, format!("degree.{} = {}", t.names[i], fmt_degree(*d)));
            }
            for ((i, j), prod) in &t.products {
                let items: Vec<String> =
                    prod.iter().map(|(k, c)| format!("{}: \"{}\"", key_name(k), c)).collect();
                push(
                    &mut s,
                    format!(
                        "product.{}.{} = {{ {} }}",
                        t.names[*i as usize],
                        t.names[*j as usize],
                        items.join(", ")
                    ),
                );
            }
            for (i, (k, c)) in t.stars.iter().enumerate() {
                push(&mut s, format!("star.{} = ({}, \"{}\")", t.names[i], key_name(k), c));
            }
        }
    }
    push(&mut s, String::new());
    push(&mut s, "[derivation]".into());
    match &geo.derivation.rule {
        DerivationRule::Zero => push(&mut s, "kind = zero".into()),
        DerivationRule::TorusStandard => push(&mut s, "kind = torus".into()),
        DerivationRule::Table(t) => {
            push(&mut s, "kind = table".into());
            for (k, coords) in t {
                let key = match k {
                    BasisKey::Mono(0, 0) => "1".to_string(),
                    BasisKey::Mono(m, n) => format!("({m},{n})"),
                    BasisKey::Named(i) => match &geo.algebra {
                        AlgebraSpec::UserTable(u) => u.names[*i as usize].clone(),
                        _ => format!("#{i}"),
                    },
                };
                let items: Vec<String> = coords
                    .iter()
                    .map(|(j, e)| format!("{}: {}", j + 1, fmt_element(e, &geo.algebra)))
                    .collect();
                push(&mut s, format!("d.{key} = {{ {} }}", items.join(", ")));
            }
        }
    }
    push(&mut s, String::new());
    push(&mut s, "[frame]".into());
    push(&mut s, format!("size = {}", geo.frame.size));
    push(
        &mut s,
        format!(
            "degrees = {}",
            geo.frame.degrees.iter().map(|d| fmt_degree(*d)).collect::<Vec<_>>().join(", ")
        ),
    );
    for j in 0..geo.frame.size {
        let mut items = Vec::new();
        for k in 0..geo.frame.size {
            let v = geo.frame.star.at(k, j);
            if !v.is_zero() {
                items.push(format!("{}: \"{}\"", k + 1, v));
            }
        }
        push(&mut s, format!("star.{} = {{ {} }}", j + 1, items.join(", ")));
    }
    push(&mut s, String::new());
    push(&mut s, "[differential]".into());
    for j in 0..geo.frame.size {
        if geo.frame.dw[j].is_zero() {
            continue;
        }
        let items: Vec<String> = geo.frame.dw[j]
            .terms()
            .map(|(idx, e)| {
                format!("({},{}): {}", idx[0] + 1, idx[1] + 1, fmt_element(e, &geo.algebra))
            })
            .collect();
        push(&mut s, format!("dw.{} = {{ {} }}", j + 1, items.join(", ")));
    }
    push(&mut s, String::new());
    push(&mut s, "[clifford]".into());
    push(&mut s, format!("spinor_rank = {}", geo.dirac.spinor_rank));
    push(
        &mut s,
        format!(
            "spinor_degrees = {}",
            geo.dirac.spinor_degrees.iter().map(|d| fmt_degree(*d)).collect::<Vec<_>>().join(", ")
        ),
    );
    for j in 0..geo.frame.size {
        push(&mut s, format!("gamma.{} = {}", j + 1, fmt_matrix(&geo.dirac.gamma[j])));
    }
    push(&mut s, String::new());
    push(&mut s, "[spin_connection]".into());
    for j in 0..geo.frame.size {
        if !geo.dirac.spin_table[j].is_zero() {
            push(&mut s, format!("table.{} = {}", j + 1, fmt_matrix(&geo.dirac.spin_table[j])));
        }
    }
    push(&mut s, String::new());
    push(&mut s, "[functional]".into());
    push(&mut s, "kind = unit".into());
    s
}

#[cfg(test)]
pub(crate) fn test_unit(s: Scalar) -> AlgebraElement {
    AlgebraElement::from_term(BasisKey::Mono(0, 0), s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometries::{builtin_phase4, builtin_sphere3, builtin_torus};

    #[test]
    fn round_trip_all_builtins() {
        for geo in [builtin_torus(), builtin_sphere3(), builtin_phase4()] {
            let text = to_text(&geo);
            let back = parse_text(&text).unwrap_or_else(|e| panic!("{}: {e}", geo.name));
            assert_eq!(back, geo, "{}", geo.name);
        }
    }

    #[test]
    fn degree_inconsistent_dw_is_rejected_with_location() {
        let mut geo = builtin_sphere3();
        // corrupt d(f+): a term of the wrong degree
        let mut bad = Tensor::zero(2);
        bad.add_term(vec![1, 2], crate::geometries::format::test_unit(Scalar::one()));
        geo.frame.dw[0] = bad;
        let text = to_text(&geo);
        let err = load_str(&text).unwrap_err();
        match err {
            GeometryFileError::Validation(_, first) => {
                assert!(first.contains("dw"), "diagnostic names the table: {first}");
            }
            other => panic!("expected validation error, got {other}"),
        }
    }

    #[test]
    fn non_orthonormal_gram_is_rejected() {
        let geo = builtin_torus();
        let mut text = to_text(&geo);
        text.push_str("\n[frame]\ngram.1 = { 1: \"2\" }\n");
        let err = load_str(&text).unwrap_err();
        assert!(err.to_string().contains("orthonormal"), "{err}");
    }

    #[test]
    fn user_table_geometry_loads_solves_and_round_trips() {
        let text = r#"
[meta]
name = flat-table
dimension = 2

[algebra]
kind = table
basis = e, z, w
unit = e
degree.z = (1,0)
degree.w = (-1,0)
star.z = (w, "1")
star.w = (z, "1")
# all non-unit products vanish (a square-zero extension of the constants)

[derivation]
kind = zero

[frame]
size = 2
degrees = (0,0), (0,0)
star.1 = { 1: "-1" }
star.2 = { 2: "-1" }

[differential]

[clifford]
spinor_rank = 2
spinor_degrees = (0,0), (0,0)
gamma.1 = [ "0", "-i" ; "-i", "0" ]
gamma.2 = [ "0", "-1" ; "1", "0" ]

[spin_connection]

[functional]
kind = unit
"#;
        let geo = load_str(text).unwrap_or_else(|e| panic!("{e}"));
        assert!(matches!(geo.algebra, AlgebraSpec::UserTable(_)));
        let calc = geo.calculus(crate::algebra::Mode::Classical);
        let conn = crate::levi_civita::solve_levi_civita(&calc).expect("flat table solves");
        assert!(conn.a_form.is_zero());
        let back = parse_text(&to_text(&geo)).unwrap();
        assert_eq!(back, geo);
    }

    #[test]
    fn degree_breaking_table_product_is_rejected() {
        let text = r#"
[meta]
name = broken-table
dimension = 2

[algebra]
kind = table
basis = e, z, w
unit = e
degree.z = (1,0)
degree.w = (-1,0)
star.z = (w, "1")
star.w = (z, "1")
product.z.z = { z: "1" }

[derivation]
kind = zero

[frame]
size = 2
degrees = (0,0), (0,0)
star.1 = { 1: "-1" }
star.2 = { 2: "-1" }

[differential]

[clifford]
spinor_rank = 2
spinor_degrees = (0,0), (0,0)
gamma.1 = [ "0", "-i" ; "-i", "0" ]
gamma.2 = [ "0", "-1" ; "1", "0" ]

[spin_connection]

[functional]
kind = unit
"#;
        let err = load_str(text).unwrap_err();
        assert!(err.to_string().contains("table"), "{err}");
    }

    #[test]
    fn parse_error_carries_line_number() {
        let err = parse_text("[meta\nname = x\n").unwrap_err();
        // the malformed section header is treated as an entry outside a section
        assert!(matches!(err, GeometryFileError::Parse { .. }));
    }
}
