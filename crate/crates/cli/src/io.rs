//! File formats and JSON shapes of the command-line tool.
//!
//! * Matrices are plain text: a `rows cols` header line, then whitespace-
//!   separated entries, each an integer or `p/q`. Serialization is canonical
//!   (lowest terms, one row per line), so parse-then-serialize round-trips.
//! * Graphs are JSON objects `{"vertices": n, "edges": [[u, v, mult], ...],
//!   "loops": [[v, count], ...]}` with 0-based indices; a missing `"loops"`
//!   key means no loops. Loops never appear in `"edges"`.
//! * Verdicts serialize with their complete witnesses so a report can be
//!   audited without rerunning the tool.

use serde_json::{json, Map, Value};

use zhom::dichotomy::{
    BlockStructure, ComponentClass, ComponentDefect, ComponentKind, Reason, SupportBlock,
    Verdict,
};
use zhom::graphs::Multigraph;
use zhom::numeric::{format_rational, parse_rational, RationalMatrix};

/// Errors of the input layer; they map to the "bad input" exit code.
#[derive(Debug)]
pub struct ParseError(pub String);

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn bad<T>(msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError(msg.into()))
}

// ---- Matrix text format ----

/// Parse the `rows cols` + entries text format.
pub fn parse_matrix(text: &str) -> Result<RationalMatrix, ParseError> {
    let mut tokens = text.split_whitespace();
    let rows: usize = match tokens.next() {
        Some(t) => t.parse().map_err(|_| ParseError(format!("bad row count {t:?}")))?,
        None => return bad("empty matrix file"),
    };
    let cols: usize = match tokens.next() {
        Some(t) => t.parse().map_err(|_| ParseError(format!("bad column count {t:?}")))?,
        None => return bad("matrix header needs two integers: rows cols"),
    };
    if rows == 0 || cols == 0 {
        return bad("matrix dimensions must be positive");
    }
    let mut entries = Vec::with_capacity(rows);
    for i in 0..rows {
        let mut row = Vec::with_capacity(cols);
        for j in 0..cols {
            match tokens.next() {
                Some(t) => row.push(
                    parse_rational(t)
                        .map_err(|e| ParseError(format!("entry ({i}, {j}): {e}")))?,
                ),
                None => {
                    return bad(format!(
                        "matrix ends early: expected {} entries",
                        rows * cols
                    ))
                }
            }
        }
        entries.push(row);
    }
    if let Some(extra) = tokens.next() {
        return bad(format!("trailing token {extra:?} after {} entries", rows * cols));
    }
    RationalMatrix::from_rows(entries).map_err(|e| ParseError(e.to_string()))
}

/// Canonical text form: header line, one row per line, lowest-term entries.
/// The inverse of [`parse_matrix`]; reports carry digests, not matrices, so
/// only the round-trip tests and external tooling consume this.
#[cfg_attr(not(test), allow(dead_code))]
pub fn matrix_to_text(a: &RationalMatrix) -> String {
    let mut out = format!("{} {}\n", a.rows(), a.cols());
    for i in 0..a.rows() {
        let row: Vec<String> = (0..a.cols()).map(|j| format_rational(a.at(i, j))).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

// ---- Graph JSON format ----

fn index_pair(v: &Value, what: &str) -> Result<(usize, usize, u64), ParseError> {
    let arr = match v.as_array() {
        Some(a) if a.len() == 3 => a,
        _ => return bad(format!("{what} entries must be [u, v, multiplicity] triples")),
    };
    let get = |k: usize, name: &str| -> Result<u64, ParseError> {
        arr[k]
            .as_u64()
            .ok_or_else(|| ParseError(format!("{what}: {name} must be a nonnegative integer")))
    };
    Ok((get(0, "u")? as usize, get(1, "v")? as usize, get(2, "multiplicity")?))
}

/// Parse the graph JSON format with strict validation.
pub fn parse_graph(text: &str) -> Result<Multigraph, ParseError> {
    let v: Value =
        serde_json::from_str(text).map_err(|e| ParseError(format!("graph is not JSON: {e}")))?;
    let obj = match v.as_object() {
        Some(o) => o,
        None => return bad("graph must be a JSON object"),
    };
    for key in obj.keys() {
        if !matches!(key.as_str(), "vertices" | "edges" | "loops") {
            return bad(format!("unknown graph key {key:?}"));
        }
    }
    let n = match obj.get("vertices").and_then(Value::as_u64) {
        Some(n) => n as usize,
        None => return bad("graph needs a nonnegative integer \"vertices\" field"),
    };
    let mut g = Multigraph::new(n);
    if let Some(edges) = obj.get("edges") {
        let list = match edges.as_array() {
            Some(l) => l,
            None => return bad("\"edges\" must be an array"),
        };
        for e in list {
            let (u, v, mult) = index_pair(e, "edge")?;
            if u >= n || v >= n {
                return bad(format!("edge ({u}, {v}) out of range for {n} vertices"));
            }
            if u == v {
                return bad(format!("edge ({u}, {u}) is a loop; use the \"loops\" field"));
            }
            if mult == 0 {
                return bad(format!("edge ({u}, {v}) has zero multiplicity"));
            }
            g.add_edge_mult(u, v, mult);
        }
    }
    if let Some(loops) = obj.get("loops") {
        let list = match loops.as_array() {
            Some(l) => l,
            None => return bad("\"loops\" must be an array"),
        };
        for e in list {
            let arr = match e.as_array() {
                Some(a) if a.len() == 2 => a,
                _ => return bad("loop entries must be [v, count] pairs"),
            };
            let v = arr[0]
                .as_u64()
                .ok_or_else(|| ParseError("loop vertex must be a nonnegative integer".into()))?
                as usize;
            let count = arr[1]
                .as_u64()
                .ok_or_else(|| ParseError("loop count must be a nonnegative integer".into()))?;
            if v >= n {
                return bad(format!("loop at {v} out of range for {n} vertices"));
            }
            if count == 0 {
                return bad(format!("loop at {v} has zero count"));
            }
            g.add_loops(v, count);
        }
    }
    Ok(g)
}

/// Serialize a graph in the same JSON format (edges and loops sorted).
pub fn graph_to_json(g: &Multigraph) -> Value {
    let edges: Vec<Value> = g
        .edge_pairs()
        .into_iter()
        .map(|((u, v), m)| json!([u, v, m]))
        .collect();
    let loops: Vec<Value> = g.loop_counts().into_iter().map(|(v, c)| json!([v, c])).collect();
    let mut obj = Map::new();
    obj.insert("vertices".into(), json!(g.vertex_count()));
    obj.insert("edges".into(), Value::Array(edges));
    if !loops.is_empty() {
        obj.insert("loops".into(), Value::Array(loops));
    }
    Value::Object(obj)
}

// ---- Verdict serialization ----

fn block_json(b: &SupportBlock) -> Value {
    match b {
        SupportBlock::Loop(indices) => json!({"kind": "loop", "indices": indices}),
        SupportBlock::Bipartite(left, right) => {
            json!({"kind": "bipartite", "left": left, "right": right})
        }
    }
}

fn structure_json(s: &BlockStructure) -> Value {
    json!({
        "blocks": s.blocks.iter().map(block_json).collect::<Vec<_>>(),
        "residual": s.residual,
    })
}

fn component_json(c: &ComponentClass) -> Value {
    let kind = match &c.kind {
        ComponentKind::IsolatedVertex => json!("isolated_vertex"),
        ComponentKind::ReflexiveComplete => json!("reflexive_complete"),
        ComponentKind::CompleteBipartite { left, right } => {
            json!({"complete_bipartite": {"left": left, "right": right}})
        }
        ComponentKind::Irregular(defect) => match defect {
            ComponentDefect::MissingEntry(i, j) => {
                json!({"irregular": {"missing_entry": [i, j]}})
            }
            ComponentDefect::SameSideEdge(i, j) => {
                json!({"irregular": {"same_side_edge": [i, j]}})
            }
        },
    };
    json!({"indices": c.indices, "kind": kind})
}

fn reason_json(r: &Reason) -> Value {
    match r {
        Reason::BlockRankOne(s) => json!({
            "kind": "block_rank_one",
            "structure": structure_json(s),
        }),
        Reason::NotRectangular { zero_at, anchor } => json!({
            "kind": "not_rectangular",
            "zero_at": [zero_at.0, zero_at.1],
            "anchor": [anchor.0, anchor.1],
        }),
        Reason::RankTwoBlock { rows, cols } => json!({
            "kind": "rank_two_block",
            "rows": [rows.0, rows.1],
            "cols": [cols.0, cols.1],
        }),
        Reason::ZeroOneComponents(components) => json!({
            "kind": "zero_one_components",
            "components": components.iter().map(component_json).collect::<Vec<_>>(),
        }),
    }
}

pub fn verdict_json(v: &Verdict) -> Value {
    json!({
        "tractable": v.tractable,
        "struck": v.struck,
        "reason": reason_json(&v.reason),
    })
}

/// One-line human description for stderr.
pub fn verdict_line(v: &Verdict) -> String {
    let side = if v.tractable { "tractable" } else { "hard" };
    let reason = match &v.reason {
        Reason::BlockRankOne(s) => {
            format!("rectangular support, {} rank-one block(s)", s.blocks.len())
        }
        Reason::NotRectangular { zero_at, anchor } => format!(
            "support not rectangular: zero at ({}, {}) against anchor ({}, {})",
            zero_at.0, zero_at.1, anchor.0, anchor.1
        ),
        Reason::RankTwoBlock { rows, cols } => format!(
            "rank-two block: rows ({}, {}), columns ({}, {})",
            rows.0, rows.1, cols.0, cols.1
        ),
        Reason::ZeroOneComponents(c) => {
            format!("0-1 criterion over {} component(s)", c.len())
        }
    };
    if v.struck.is_empty() {
        format!("{side}: {reason}")
    } else {
        format!("{side} after striking {:?}: {reason}", v.struck)
    }
}
