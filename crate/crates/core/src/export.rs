//! Weighted edge lists with node cultures, their `edge-csv` / `dot`
//! renderings, and loading static graphs back from CSV.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::CollabGraph;
use crate::types::{AgentId, Culture};

/// Undirected weighted edges keyed by `(low, high)` node label.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeList {
    pub nodes: BTreeMap<String, Culture>,
    pub edges: BTreeMap<(String, String), u32>,
}

impl EdgeList {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a node; an existing node keeps its first culture.
    pub fn add_node(&mut self, label: &str, culture: Culture) {
        self.nodes.entry(label.to_string()).or_insert(culture);
    }

    pub fn add_edge(&mut self, a: &str, b: &str, weight: u32) {
        if a == b {
            return;
        }
        let key = if a < b {
            (a.to_string(), b.to_string())
        } else {
            (b.to_string(), a.to_string())
        };
        *self.edges.entry(key).or_insert(0) += weight;
    }

    pub fn weight(&self, a: &str, b: &str) -> u32 {
        let key = if a < b { (a, b) } else { (b, a) };
        self.edges
            .get(&(key.0.to_string(), key.1.to_string()))
            .copied()
            .unwrap_or(0)
    }

    pub fn from_graph(graph: &CollabGraph) -> Self {
        let mut out = Self::new();
        for a in graph.agents() {
            out.add_node(&a.id.to_string(), a.culture);
        }
        for (a, b, w) in graph.edges() {
            out.add_edge(&a.to_string(), &b.to_string(), w);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    EdgeCsv,
    Dot,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown export format `{0}` (expected `edge-csv` or `dot`)")]
pub struct UnknownFormat(pub String);

impl FromStr for ExportFormat {
    type Err = UnknownFormat;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "edge-csv" => Ok(ExportFormat::EdgeCsv),
            "dot" => Ok(ExportFormat::Dot),
            other => Err(UnknownFormat(other.to_string())),
        }
    }
}

fn dot_id(label: &str) -> String {
    format!("\"{}\"", label.replace('\\', "\\\\").replace('"', "\\\""))
}

fn csv_field(label: &str) -> String {
    if label.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", label.replace('"', "\"\""))
    } else {
        label.to_string()
    }
}

pub fn export_edges(list: &EdgeList, format: ExportFormat) -> String {
    let mut out = String::new();
    match format {
        ExportFormat::EdgeCsv => {
            out.push_str("source,target,weight\n");
            for ((a, b), w) in &list.edges {
                let _ = writeln!(out, "{},{},{w}", csv_field(a), csv_field(b));
            }
        }
        ExportFormat::Dot => {
            out.push_str("graph collaboration {\n");
            for (label, culture) in &list.nodes {
                let _ = writeln!(out, "  {} [culture=\"{culture}\"];", dot_id(label));
            }
            for ((a, b), w) in &list.edges {
                let _ = writeln!(out, "  {} -- {} [weight={w}];", dot_id(a), dot_id(b));
            }
            out.push_str("}\n");
        }
    }
    out
}

/// `node,culture` listing of every node, sorted.
pub fn export_nodes(list: &EdgeList) -> String {
    let mut out = String::from("node,culture\n");
    for (label, culture) in &list.nodes {
        let _ = writeln!(out, "{},{culture}", csv_field(label));
    }
    out
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{file}: {source}")]
    Csv {
        file: &'static str,
        #[source]
        source: csv::Error,
    },
    #[error("{file} line {line}: {message}")]
    Line {
        file: &'static str,
        line: u64,
        message: String,
    },
}

fn read_rows(
    text: &str,
    file: &'static str,
    header: &[&str],
) -> Result<Vec<(u64, Vec<String>)>, LoadError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    let mut seen_header = false;
    for rec in reader.records() {
        let rec = rec.map_err(|source| LoadError::Csv { file, source })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let fields: Vec<String> = rec.iter().map(str::to_string).collect();
        if !seen_header {
            if fields != header {
                return Err(LoadError::Line {
                    file,
                    line,
                    message: format!("expected header `{}`", header.join(",")),
                });
            }
            seen_header = true;
            continue;
        }
        if fields.len() != header.len() {
            return Err(LoadError::Line {
                file,
                line,
                message: format!("expected {} fields, found {}", header.len(), fields.len()),
            });
        }
        rows.push((line, fields));
    }
    Ok(rows)
}

/// Loads a static graph from an `edge-csv` file and a `node,culture` file.
/// Node labels map to agent ids in sorted label order.
pub fn load_graph(edges_csv: &str, cultures_csv: &str) -> Result<(CollabGraph, Vec<String>), LoadError> {
    let mut list = EdgeList::new();
    for (line, fields) in read_rows(cultures_csv, "cultures", &["node", "culture"])? {
        let culture: Culture = fields[1].parse().map_err(|e: crate::types::UnknownCulture| {
            LoadError::Line {
                file: "cultures",
                line,
                message: e.to_string(),
            }
        })?;
        if list.nodes.insert(fields[0].clone(), culture).is_some() {
            return Err(LoadError::Line {
                file: "cultures",
                line,
                message: format!("node `{}` listed twice", fields[0]),
            });
        }
    }
    for (line, fields) in read_rows(edges_csv, "edges", &["source", "target", "weight"])? {
        let err = |message: String| LoadError::Line {
            file: "edges",
            line,
            message,
        };
        for node in &fields[..2] {
            if !list.nodes.contains_key(node) {
                return Err(err(format!("node `{node}` has no culture")));
            }
        }
        if fields[0] == fields[1] {
            return Err(err(format!("self-loop on `{}`", fields[0])));
        }
        let w: u32 = fields[2]
            .parse()
            .ok()
            .filter(|w| *w > 0)
            .ok_or_else(|| err(format!("weight `{}` is not a positive integer", fields[2])))?;
        list.add_edge(&fields[0], &fields[1], w);
    }

    let labels: Vec<String> = list.nodes.keys().cloned().collect();
    let mut graph = CollabGraph::new();
    for (i, culture) in list.nodes.values().enumerate() {
        graph.insert_agent(AgentId(i as u64), *culture, 0);
    }
    let id = |l: &String| AgentId(labels.binary_search(l).expect("registered") as u64);
    for ((a, b), w) in &list.edges {
        graph.add_edge_weight(id(a), id(b), *w);
    }
    Ok((graph, labels))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_edge_csv_is_header_only() {
        assert_eq!(export_edges(&EdgeList::new(), ExportFormat::EdgeCsv), "source,target,weight\n");
    }

    #[test]
    fn edges_are_sorted() {
        let mut list = EdgeList::new();
        list.add_edge("zoe", "amy", 1);
        list.add_edge("bob", "amy", 2);
        assert_eq!(
            export_edges(&list, ExportFormat::EdgeCsv),
            "source,target,weight\namy,bob,2\namy,zoe,1\n"
        );
    }

    #[test]
    fn dot_output() {
        let mut list = EdgeList::new();
        list.add_node("a\"1", Culture::Basic);
        list.add_node("b", Culture::Clinical);
        list.add_edge("b", "a\"1", 3);
        assert_eq!(
            export_edges(&list, ExportFormat::Dot),
            "graph collaboration {\n  \"a\\\"1\" [culture=\"basic\"];\n  \"b\" [culture=\"clinical\"];\n  \"a\\\"1\" -- \"b\" [weight=3];\n}\n"
        );
    }

    #[test]
    fn unknown_format() {
        assert_eq!("graphml".parse::<ExportFormat>(), Err(UnknownFormat("graphml".into())));
    }

    #[test]
    fn load_round_trip() {
        let mut list = EdgeList::new();
        for (n, c) in [("x", Culture::Basic), ("y", Culture::Clinical), ("z", Culture::Clinical)] {
            list.add_node(n, c);
        }
        list.add_edge("x", "y", 2);
        let (g, labels) = load_graph(&export_edges(&list, ExportFormat::EdgeCsv), &export_nodes(&list)).unwrap();
        assert_eq!(labels, vec!["x", "y", "z"]);
        assert_eq!(g.len(), 3);
        assert_eq!(g.weight(AgentId(0), AgentId(1)), 2);
        assert_eq!(EdgeList::from_graph(&g).edges.len(), 1);
    }

    #[test]
    fn load_errors() {
        let cultures = "node,culture\na,basic\nb,clinical\n";
        assert!(matches!(
            load_graph("source,target,weight\na,c,1\n", cultures),
            Err(LoadError::Line { line: 2, .. })
        ));
        assert!(load_graph("source,target,weight\na,b,x\n", cultures).is_err());
        assert!(load_graph("from,to\n", cultures).is_err());
        assert!(load_graph("", "node,culture\na,biomedical\n").is_err());
        let (g, _) = load_graph("", "").unwrap();
        assert!(g.is_empty());
    }
}
