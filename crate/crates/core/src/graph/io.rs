//! Graph JSON and DOT formats.
//!
//! JSON: `{"n": int, "edges": [[u,v],...], "labels": {vertex: string}}` with
//! `labels` optional. Round-tree graphs add an optional `edge_kinds` array
//! aligned with `edges`. Output is compact, edges canonical, label keys in
//! ascending vertex order; parsing and re-emitting canonical output is the
//! identity on bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<BTreeMap<usize, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_kinds: Option<Vec<String>>,
}

impl GraphJson {
    pub fn from_graph(g: &Graph) -> Self {
        GraphJson {
            n: g.n(),
            edges: g.edges().iter().map(|&(u, v)| [u, v]).collect(),
            labels: None,
            edge_kinds: None,
        }
    }

    pub fn with_labels(mut self, labels: BTreeMap<usize, String>) -> Self {
        self.labels = Some(labels);
        self
    }

    pub fn to_graph(&self) -> Result<Graph> {
        if let Some(kinds) = &self.edge_kinds {
            if kinds.len() != self.edges.len() {
                return Err(Error::invalid("edge_kinds length differs from edges"));
            }
        }
        if let Some(labels) = &self.labels {
            if let Some((&k, _)) = labels.iter().find(|(&k, _)| k >= self.n) {
                return Err(Error::VertexOutOfRange {
                    index: k,
                    n: self.n,
                });
            }
        }
        Graph::from_edges(self.n, self.edges.iter().map(|e| (e[0], e[1])))
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string(self).expect("graph JSON serializes");
        s.push('\n');
        s
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// DOT rendering. Labels and edge kinds become `label`/`kind` attributes.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n");
        for x in 0..self.n {
            match self.labels.as_ref().and_then(|l| l.get(&x)) {
                Some(label) => writeln!(out, "  {x} [label=\"{}\"];", escape(label)).unwrap(),
                None => writeln!(out, "  {x};").unwrap(),
            }
        }
        for (i, [u, v]) in self.edges.iter().enumerate() {
            match self.edge_kinds.as_ref().map(|k| &k[i]) {
                Some(kind) => writeln!(out, "  {u} -- {v} [kind=\"{}\"];", escape(kind)).unwrap(),
                None => writeln!(out, "  {u} -- {v};").unwrap(),
            }
        }
        out.push_str("}\n");
        out
    }

    /// Parses the DOT subset produced by [`GraphJson::to_dot`].
    pub fn from_dot(s: &str) -> Result<ParsedDot> {
        let mut lines = s.lines();
        if lines.next().map(str::trim) != Some("graph G {") {
            return Err(Error::invalid("DOT must start with `graph G {`"));
        }
        let mut n = 0;
        let mut labels = BTreeMap::new();
        let mut edges = Vec::new();
        let mut kinds = Vec::new();
        for line in lines {
            let line = line.trim();
            if line == "}" {
                let any_kind = kinds.iter().any(Option::is_some);
                if any_kind && kinds.iter().any(Option::is_none) {
                    return Err(Error::invalid(
                        "edge kinds must be given on all edges or none",
                    ));
                }
                return Ok(ParsedDot(GraphJson {
                    n,
                    edges,
                    labels: (!labels.is_empty()).then_some(labels),
                    edge_kinds: any_kind.then(|| kinds.into_iter().flatten().collect()),
                }));
            }
            let body = line
                .strip_suffix(';')
                .ok_or_else(|| Error::invalid(format!("DOT statement without `;`: {line}")))?;
            let (stmt, attr) = match body.split_once(" [") {
                Some((stmt, rest)) => {
                    let rest = rest
                        .strip_suffix(']')
                        .ok_or_else(|| Error::invalid(format!("bad attribute list: {line}")))?;
                    let (key, value) = rest
                        .split_once('=')
                        .ok_or_else(|| Error::invalid(format!("bad attribute: {line}")))?;
                    (stmt, Some((key, unescape(value)?)))
                }
                None => (body, None),
            };
            let parse = |t: &str| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::invalid(format!("bad vertex id {t:?}")))
            };
            if let Some((u, v)) = stmt.split_once("--") {
                edges.push([parse(u)?, parse(v)?]);
                kinds.push(match attr {
                    Some(("kind", k)) => Some(k),
                    None => None,
                    Some((other, _)) => {
                        return Err(Error::invalid(format!("unknown edge attribute {other}")))
                    }
                });
            } else {
                let x = parse(stmt)?;
                if x != n {
                    return Err(Error::invalid("DOT vertices must be listed in order"));
                }
                n += 1;
                match attr {
                    Some(("label", l)) => {
                        labels.insert(x, l);
                    }
                    None => {}
                    Some((other, _)) => {
                        return Err(Error::invalid(format!("unknown vertex attribute {other}")))
                    }
                }
            }
        }
        Err(Error::invalid("DOT input ended without `}`"))
    }
}

/// Result of [`GraphJson::from_dot`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedDot(pub GraphJson);

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn unescape(quoted: &str) -> Result<String> {
    let inner = quoted
        .strip_prefix('"')
        .and_then(|q| q.strip_suffix('"'))
        .ok_or_else(|| Error::invalid(format!("attribute value must be quoted: {quoted}")))?;
    let mut out = String::with_capacity(inner.len());
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            out.push(
                chars
                    .next()
                    .ok_or_else(|| Error::invalid("dangling escape"))?,
            );
        } else {
            out.push(c);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families;
    use proptest::prelude::*;

    #[test]
    fn json_shape() {
        let j = GraphJson::from_graph(&families::path(3));
        assert_eq!(j.to_json_string(), "{\"n\":3,\"edges\":[[0,1],[1,2]]}\n");
        let labelled = j.with_labels(BTreeMap::from([(0, "a".to_string()), (2, "c".into())]));
        let s = labelled.to_json_string();
        assert_eq!(
            s,
            "{\"n\":3,\"edges\":[[0,1],[1,2]],\"labels\":{\"0\":\"a\",\"2\":\"c\"}}\n"
        );
        assert_eq!(GraphJson::parse(&s).unwrap().to_json_string(), s);
    }

    #[test]
    fn json_rejects_bad_label_key() {
        let s = "{\"n\":1,\"edges\":[],\"labels\":{\"4\":\"x\"}}";
        assert!(GraphJson::parse(s).unwrap().to_graph().is_err());
    }

    #[test]
    fn dot_roundtrip_with_attributes() {
        let mut j = GraphJson::from_graph(&families::path(3));
        j.labels = Some(BTreeMap::from([(1, "h=0;v=\"q\"".to_string())]));
        j.edge_kinds = Some(vec!["vertical".into(), "horizontal".into()]);
        let dot = j.to_dot();
        let back = GraphJson::from_dot(&dot).unwrap().0;
        assert_eq!(back, j);
        assert_eq!(back.to_dot(), dot);
    }

    proptest! {
        #[test]
        fn json_and_dot_roundtrip(n in 1usize..30, prob in 0.0f64..1.0, seed in any::<u64>()) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let g = families::gnp(n, prob, &mut rng);
            let j = GraphJson::from_graph(&g);
            let s = j.to_json_string();
            let parsed = GraphJson::parse(&s).unwrap();
            prop_assert_eq!(parsed.to_json_string(), s);
            prop_assert_eq!(parsed.to_graph().unwrap(), g);
            let dot = j.to_dot();
            prop_assert_eq!(GraphJson::from_dot(&dot).unwrap().0.to_dot(), dot);
        }
    }
}
