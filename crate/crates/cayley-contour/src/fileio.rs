//! Text file formats: model specs, spin windows, contour files, vertex sets.
//!
//! Model spec (key = value lines, `#` comments):
//!
//! ```text
//! model = potts_competing   # or kronecker | nn_table
//! k = 2
//! q = 3
//! J1 = -1
//! J2 = 0
//! ```
//!
//! Spin window: a header line `n=<int> k=<int> boundary=<spin>`, then one
//! `vertex spin` pair per line; unlisted vertices of `V_n` keep the
//! boundary mark. Contour file: a header `k= r= q= boundary=`, then one
//! block per subcontour: `mark=<spin>` followed by interior vertex lines.
//! Vertices render as `-` for the root or dot-joined generator indices.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::contour::{group_contours, Contour, Subcontour};
use crate::potential::{
    generalized_kronecker, nearest_neighbor, potts_competing, BallModel, PairTable, Spin,
    SpinWindow,
};
use crate::tree::{Vertex, VertexSet};
use crate::{parse_rational, rational_string, Error, Rational, Result};

/// A parsed model specification, kept verbatim for report embedding.
#[derive(Clone, Debug)]
pub struct ModelFile {
    pub kind: String,
    pub k: u8,
    pub q: Spin,
    pub r: usize,
    pub j1: Option<Rational>,
    pub j2: Option<Rational>,
    pub j: Option<Rational>,
    pub table_path: Option<PathBuf>,
    pub pair_table: Option<PairTable>,
}

impl ModelFile {
    pub fn parse(text: &str, base_dir: Option<&Path>) -> Result<ModelFile> {
        let mut fields: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            fields.insert(
                key.trim().to_ascii_lowercase(),
                (lineno + 1, value.trim().to_string()),
            );
        }
        let take = |key: &str| fields.get(key).cloned();
        let required = |key: &str| {
            take(key).ok_or_else(|| Error::Parse(format!("missing required key '{key}'")))
        };
        let parse_int = |key: &str, (lineno, v): (usize, String)| {
            v.parse::<u64>()
                .map_err(|_| Error::Parse(format!("line {lineno}: bad integer for '{key}'")))
        };
        let parse_rat = |key: &str, (lineno, v): (usize, String)| {
            parse_rational(&v)
                .map_err(|_| Error::Parse(format!("line {lineno}: bad rational for '{key}'")))
        };
        let kind = required("model")?.1;
        let k = parse_int("k", required("k")?)? as u8;
        let q = parse_int("q", required("q")?)? as Spin;
        let (r, j1, j2, j, table_path) = match kind.as_str() {
            "potts_competing" => {
                let j1 = parse_rat("j1", required("j1")?)?;
                let j2 = parse_rat("j2", required("j2")?)?;
                (2, Some(j1), Some(j2), None, None)
            }
            "kronecker" => {
                let r = take("r")
                    .map(|v| parse_int("r", v))
                    .transpose()?
                    .unwrap_or(1) as usize;
                let j = parse_rat("j", required("j")?)?;
                (r, None, None, Some(j), None)
            }
            "nn_table" => {
                let (lineno, rel) = required("table")?;
                let path = match base_dir {
                    Some(dir) => dir.join(&rel),
                    None => PathBuf::from(&rel),
                };
                if !path.exists() {
                    return Err(Error::Parse(format!(
                        "line {lineno}: pair table file '{}' not found",
                        path.display()
                    )));
                }
                (1, None, None, None, Some(path))
            }
            other => {
                return Err(Error::Parse(format!(
                    "unknown model kind '{other}' (expected potts_competing, kronecker or nn_table)"
                )))
            }
        };
        let pair_table = match &table_path {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                Some(parse_pair_table(&text, q)?)
            }
            None => None,
        };
        Ok(ModelFile {
            kind,
            k,
            q,
            r,
            j1,
            j2,
            j,
            table_path,
            pair_table,
        })
    }

    pub fn load(path: &Path) -> Result<ModelFile> {
        let text = std::fs::read_to_string(path)?;
        ModelFile::parse(&text, path.parent())
    }

    pub fn build(&self, cap: u128) -> Result<BallModel> {
        match self.kind.as_str() {
            "potts_competing" => potts_competing(
                self.j1.clone().unwrap(),
                self.j2.clone().unwrap(),
                self.k,
                self.q,
                cap,
            ),
            "kronecker" => {
                generalized_kronecker(self.j.clone().unwrap(), self.r, self.k, self.q, cap)
            }
            "nn_table" => nearest_neighbor(self.q, self.k, self.pair_table.as_ref().unwrap(), cap),
            other => Err(Error::Parse(format!("unknown model kind '{other}'"))),
        }
    }

    /// JSON rendering of the resolved parameters for report embedding.
    pub fn config_json(&self) -> Value {
        let mut map = serde_json::Map::new();
        map.insert("model".into(), json!(self.kind));
        map.insert("k".into(), json!(self.k));
        map.insert("q".into(), json!(self.q));
        map.insert("r".into(), json!(self.r));
        if let Some(j1) = &self.j1 {
            map.insert("J1".into(), json!(rational_string(j1)));
        }
        if let Some(j2) = &self.j2 {
            map.insert("J2".into(), json!(rational_string(j2)));
        }
        if let Some(j) = &self.j {
            map.insert("J".into(), json!(rational_string(j)));
        }
        if let Some(p) = &self.table_path {
            map.insert("table".into(), json!(p.display().to_string()));
        }
        Value::Object(map)
    }
}

/// Pair-table CSV: one `u,v,value` row per entry, rationals as `p/q`.
/// Missing pairs default to zero; symmetry is the builder's concern.
pub fn parse_pair_table(text: &str, q: Spin) -> Result<PairTable> {
    use num::Zero;
    let mut values = vec![Rational::zero(); (q as usize) * (q as usize)];
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() || line.starts_with("u,") {
            continue;
        }
        let parts: Vec<&str> = line.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!(
                "pair table line {}: expected 'u,v,value'",
                lineno + 1
            )));
        }
        let u: Spin = parts[0].parse().map_err(|_| {
            Error::Parse(format!("pair table line {}: bad spin '{}'", lineno + 1, parts[0]))
        })?;
        let v: Spin = parts[1].parse().map_err(|_| {
            Error::Parse(format!("pair table line {}: bad spin '{}'", lineno + 1, parts[1]))
        })?;
        if u < 1 || u > q || v < 1 || v > q {
            return Err(Error::Parse(format!(
                "pair table line {}: spin out of 1..={q}",
                lineno + 1
            )));
        }
        let value = parse_rational(parts[2])
            .map_err(|_| Error::Parse(format!("pair table line {}: bad rational", lineno + 1)))?;
        values[(u as usize - 1) * q as usize + (v as usize - 1)] = value;
    }
    PairTable::new(q, values)
}

/// Parses a spin window file.
pub fn parse_window(text: &str) -> Result<SpinWindow> {
    let mut lines = text.lines().enumerate().filter_map(|(no, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            None
        } else {
            Some((no + 1, line.to_string()))
        }
    });
    let (header_line, header) = lines
        .next()
        .ok_or_else(|| Error::Parse("empty window file".into()))?;
    let mut n = None;
    let mut k = None;
    let mut boundary = None;
    for piece in header.split_whitespace() {
        let (key, value) = piece.split_once('=').ok_or_else(|| {
            Error::Parse(format!("line {header_line}: bad header field '{piece}'"))
        })?;
        let parsed: u64 = value.parse().map_err(|_| {
            Error::Parse(format!("line {header_line}: bad value in '{piece}'"))
        })?;
        match key {
            "n" => n = Some(parsed as usize),
            "k" => k = Some(parsed as u8),
            "boundary" => boundary = Some(parsed as Spin),
            other => {
                return Err(Error::Parse(format!(
                    "line {header_line}: unknown header key '{other}'"
                )))
            }
        }
    }
    let (n, k, boundary) = match (n, k, boundary) {
        (Some(n), Some(k), Some(b)) => (n, k, b),
        _ => {
            return Err(Error::Parse(format!(
                "line {header_line}: window header needs n=, k= and boundary="
            )))
        }
    };
    let mut w = SpinWindow::constant(n, k, boundary);
    for (lineno, line) in lines {
        let mut parts = line.split_whitespace();
        let (vs, ss) = match (parts.next(), parts.next(), parts.next()) {
            (Some(v), Some(s), None) => (v, s),
            _ => {
                return Err(Error::Parse(format!(
                    "line {lineno}: expected 'vertex spin'"
                )))
            }
        };
        let vertex: Vertex = vs
            .parse()
            .map_err(|e| Error::Parse(format!("line {lineno}: {e}")))?;
        if vertex.max_letter() > k + 1 {
            return Err(Error::Parse(format!(
                "line {lineno}: vertex {vertex} uses a generator above k+1={}",
                k + 1
            )));
        }
        let spin: Spin = ss
            .parse()
            .map_err(|_| Error::Parse(format!("line {lineno}: bad spin '{ss}'")))?;
        w.set(vertex, spin)
            .map_err(|e| Error::Parse(format!("line {lineno}: {e}")))?;
    }
    Ok(w)
}

/// Renders a window with the full `V_n` listing in canonical order.
pub fn write_window(w: &SpinWindow) -> String {
    let mut out = format!("n={} k={} boundary={}\n", w.n(), w.k(), w.boundary());
    for v in crate::tree::volume(w.n(), w.k()).iter() {
        out.push_str(&format!("{} {}\n", v, w.spin(v)));
    }
    out
}

/// Header of a contour file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ContourHeader {
    pub k: u8,
    pub r: usize,
    pub q: Spin,
    pub boundary: Spin,
}

/// Parses a contour file into its header and the contour it describes.
/// The subcontour supports are rebuilt from the interiors, and the blocks
/// must actually form a single contour under the model's grouping rule.
pub fn parse_contour(text: &str) -> Result<(ContourHeader, Contour)> {
    let mut lines = text.lines().enumerate().filter_map(|(no, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            None
        } else {
            Some((no + 1, line.to_string()))
        }
    });
    let (header_line, header) = lines
        .next()
        .ok_or_else(|| Error::Parse("empty contour file".into()))?;
    let mut k = None;
    let mut r = None;
    let mut q = None;
    let mut boundary = None;
    for piece in header.split_whitespace() {
        let (key, value) = piece.split_once('=').ok_or_else(|| {
            Error::Parse(format!("line {header_line}: bad header field '{piece}'"))
        })?;
        let parsed: u64 = value.parse().map_err(|_| {
            Error::Parse(format!("line {header_line}: bad value in '{piece}'"))
        })?;
        match key {
            "k" => k = Some(parsed as u8),
            "r" => r = Some(parsed as usize),
            "q" => q = Some(parsed as Spin),
            "boundary" => boundary = Some(parsed as Spin),
            other => {
                return Err(Error::Parse(format!(
                    "line {header_line}: unknown header key '{other}'"
                )))
            }
        }
    }
    let header = match (k, r, q, boundary) {
        (Some(k), Some(r), Some(q), Some(b)) => ContourHeader {
            k,
            r,
            q,
            boundary: b,
        },
        _ => {
            return Err(Error::Parse(format!(
                "line {header_line}: contour header needs k=, r=, q= and boundary="
            )))
        }
    };
    let mut blocks: Vec<(Spin, Vec<Vertex>)> = Vec::new();
    for (lineno, line) in lines {
        if let Some(mark) = line.strip_prefix("mark=") {
            let mark: Spin = mark
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("line {lineno}: bad mark '{mark}'")))?;
            if mark < 1 || mark > header.q {
                return Err(Error::Parse(format!(
                    "line {lineno}: mark {mark} outside 1..={}",
                    header.q
                )));
            }
            if mark == header.boundary {
                return Err(Error::Parse(format!(
                    "line {lineno}: mark equals the boundary spin"
                )));
            }
            blocks.push((mark, Vec::new()));
        } else {
            let vertex: Vertex = line
                .parse()
                .map_err(|e| Error::Parse(format!("line {lineno}: {e}")))?;
            if vertex.max_letter() > header.k + 1 {
                return Err(Error::Parse(format!(
                    "line {lineno}: vertex {vertex} uses a generator above k+1={}",
                    header.k + 1
                )));
            }
            match blocks.last_mut() {
                Some((_, verts)) => verts.push(vertex),
                None => {
                    return Err(Error::Parse(format!(
                        "line {lineno}: vertex before any 'mark=' block"
                    )))
                }
            }
        }
    }
    if blocks.is_empty() {
        return Err(Error::Parse("contour file has no subcontour blocks".into()));
    }
    let mut subs = Vec::new();
    for (mark, verts) in blocks {
        let interior = VertexSet::new(verts);
        subs.push(Subcontour::from_interior(mark, interior, header.k)?);
    }
    // interiors must be pairwise disjoint and same-mark blocks separated
    for i in 0..subs.len() {
        for j in i + 1..subs.len() {
            let d = subs[i].interior.distance_between(&subs[j].interior);
            if d == 0 {
                return Err(Error::Parse("subcontour interiors overlap".into()));
            }
            if subs[i].mark == subs[j].mark && d < 2 {
                return Err(Error::Parse(
                    "same-mark subcontours are adjacent; they would be one component".into(),
                ));
            }
        }
    }
    let rprime = header.r.div_ceil(2);
    let grouped = group_contours(subs, rprime);
    if grouped.len() != 1 {
        return Err(Error::Parse(format!(
            "blocks split into {} contours; a contour file must describe exactly one",
            grouped.len()
        )));
    }
    Ok((header, grouped.into_iter().next().unwrap()))
}

pub fn write_contour(header: &ContourHeader, contour: &Contour) -> String {
    let mut out = format!(
        "k={} r={} q={} boundary={}\n",
        header.k, header.r, header.q, header.boundary
    );
    for sub in &contour.subcontours {
        out.push_str(&format!("mark={}\n", sub.mark));
        for v in sub.interior.iter() {
            out.push_str(&format!("{v}\n"));
        }
    }
    out
}

/// Vertex set file: one vertex per line.
pub fn parse_vertex_set(text: &str) -> Result<VertexSet> {
    let mut verts = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let v: Vertex = line
            .parse()
            .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
        verts.push(v);
    }
    Ok(VertexSet::new(verts))
}

pub fn write_vertex_set(set: &VertexSet) -> String {
    let mut out = String::new();
    for v in set.iter() {
        out.push_str(&format!("{v}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_file_round_trip() {
        let text = "model = potts_competing\nk = 2\nq = 3\nJ1 = -1\nJ2 = 0\n";
        let mf = ModelFile::parse(text, None).unwrap();
        assert_eq!(mf.kind, "potts_competing");
        assert_eq!(mf.r, 2);
        let model = mf.build(1 << 20).unwrap();
        assert_eq!(model.q(), 3);
        assert_eq!(model.rprime(), 1);
    }

    #[test]
    fn model_file_errors_carry_line_numbers() {
        let text = "model = potts_competing\nk = 2\nq = 3\nJ1 = oops\nJ2 = 0\n";
        let err = ModelFile::parse(text, None).unwrap_err().to_string();
        assert!(err.contains("line 4"), "got: {err}");
        let text = "model = warp_drive\nk = 2\nq = 3\n";
        assert!(ModelFile::parse(text, None).is_err());
    }

    #[test]
    fn window_round_trip() {
        let text = "n=1 k=2 boundary=1\n- 2\n1 1\n2 1\n3 2\n";
        let w = parse_window(text).unwrap();
        assert_eq!(w.spin(&Vertex::root()), 2);
        assert_eq!(w.spin(&"3".parse().unwrap()), 2);
        let rendered = write_window(&w);
        let back = parse_window(&rendered).unwrap();
        assert_eq!(w, back);
    }

    #[test]
    fn window_rejects_out_of_volume_vertices() {
        let text = "n=1 k=2 boundary=1\n1.2 2\n";
        assert!(parse_window(text).is_err());
    }

    #[test]
    fn contour_round_trip() {
        let text = "k=2 r=1 q=2 boundary=1\nmark=2\n-\nmark=2\n1.2\n";
        let (header, contour) = parse_contour(text).unwrap();
        assert_eq!(header.boundary, 1);
        assert_eq!(contour.subcontours.len(), 2);
        let rendered = write_contour(&header, &contour);
        let (h2, c2) = parse_contour(&rendered).unwrap();
        assert_eq!(header, h2);
        assert_eq!(contour.id(), c2.id());
    }

    #[test]
    fn contour_file_must_be_one_contour() {
        // interiors at distance 3 do not group at r' = 1
        let text = "k=2 r=1 q=2 boundary=1\nmark=2\n1\nmark=2\n2.1\n";
        let err = parse_contour(text).unwrap_err().to_string();
        assert!(err.contains("contours"), "got: {err}");
    }

    #[test]
    fn pair_table_csv() {
        let text = "u,v,value\n1,1,-1\n1,2,1/2\n2,1,1/2\n2,2,-1\n";
        let t = parse_pair_table(text, 2).unwrap();
        assert_eq!(t.get(1, 2), &crate::parse_rational("1/2").unwrap());
        t.check_symmetric().unwrap();
    }

    #[test]
    fn vertex_set_round_trip() {
        let set = parse_vertex_set("-\n1\n2.3\n").unwrap();
        assert_eq!(set.len(), 3);
        let back = parse_vertex_set(&write_vertex_set(&set)).unwrap();
        assert_eq!(set, back);
    }
}
