use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};
use crate::nn::DenseMatrix;

/// Contents of `meta.json`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphMeta {
    pub num_nodes: usize,
    pub num_features: usize,
    pub num_classes: usize,
}

fn read(dir: &Path, name: &str) -> Result<String> {
    let path = dir.join(name);
    fs::read_to_string(&path).map_err(|e| Error::io(path, e))
}

fn parse_index(file: &str, line: usize, tok: &str, n: usize) -> Result<usize> {
    let v: usize = tok
        .parse()
        .map_err(|_| Error::parse(file, line, format!("non-numeric token {tok:?}")))?;
    if v >= n {
        return Err(Error::parse(file, line, format!("index {v} out of range for n {n}")));
    }
    Ok(v)
}

/// Load a graph directory (`edges.tsv`, `features.tsv`, `labels.tsv`,
/// `meta.json`). Errors carry the file name and 1-based line number.
pub fn load_graph(dir: impl AsRef<Path>) -> Result<Graph> {
    let dir = dir.as_ref();
    let meta: GraphMeta = serde_json::from_str(&read(dir, "meta.json")?)
        .map_err(|e| Error::parse("meta.json", e.line(), e.to_string()))?;
    let n = meta.num_nodes;

    let mut edges = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (i, line) in read(dir, "edges.tsv")?.lines().enumerate() {
        let lineno = i + 1;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if toks.len() != 2 {
            return Err(Error::parse("edges.tsv", lineno, "expected two node ids"));
        }
        let u = parse_index("edges.tsv", lineno, toks[0], n)?;
        let v = parse_index("edges.tsv", lineno, toks[1], n)?;
        if u == v {
            return Err(Error::parse("edges.tsv", lineno, format!("self-loop at line {lineno}")));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(Error::parse("edges.tsv", lineno, format!("duplicate edge at line {lineno}")));
        }
        edges.push((u, v));
    }

    let mut data = Vec::with_capacity(n * meta.num_features);
    let mut rows = 0;
    for (i, line) in read(dir, "features.tsv")?.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let lineno = i + 1;
        let mut count = 0;
        for tok in line.split('\t') {
            let v: f64 = tok.trim().parse().map_err(|_| {
                Error::parse("features.tsv", lineno, format!("non-numeric token {tok:?}"))
            })?;
            data.push(v);
            count += 1;
        }
        if count != meta.num_features {
            return Err(Error::parse(
                "features.tsv",
                lineno,
                format!("{count} columns, expected {}", meta.num_features),
            ));
        }
        rows += 1;
    }
    if rows != n {
        return Err(Error::parse("features.tsv", rows, format!("feature rows {rows} ≠ n {n}")));
    }
    let features = DenseMatrix::from_vec(n, meta.num_features, data)?;

    let mut labels = Vec::with_capacity(n);
    for (i, line) in read(dir, "labels.tsv")?.lines().enumerate() {
        let tok = line.trim();
        if tok.is_empty() {
            continue;
        }
        let lineno = i + 1;
        let v: i64 = tok
            .parse()
            .map_err(|_| Error::parse("labels.tsv", lineno, format!("non-numeric token {tok:?}")))?;
        match v {
            -1 => labels.push(None),
            c if c >= 0 && (c as usize) < meta.num_classes => labels.push(Some(c as usize)),
            c => {
                return Err(Error::parse(
                    "labels.tsv",
                    lineno,
                    format!("label {c} outside [0, {})", meta.num_classes),
                ))
            }
        }
    }
    if labels.len() != n {
        return Err(Error::parse(
            "labels.tsv",
            labels.len(),
            format!("label rows {} ≠ n {n}", labels.len()),
        ));
    }

    Graph::new(n, features, edges, Some(labels), meta.num_classes)
}

/// Write `graph` in the directory format read by [`load_graph`].
pub fn save_graph(graph: &Graph, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let write = |name: &str, body: &dyn Fn(&mut dyn Write) -> std::io::Result<()>| -> Result<()> {
        let path = dir.join(name);
        let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut w = BufWriter::new(file);
        body(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(&path, e))
    };

    write("edges.tsv", &|w| {
        for &(u, v) in graph.edges() {
            writeln!(w, "{u}\t{v}")?;
        }
        Ok(())
    })?;
    write("features.tsv", &|w| {
        for r in 0..graph.num_nodes() {
            let row = graph.features().row(r);
            for (c, v) in row.iter().enumerate() {
                if c > 0 {
                    w.write_all(b"\t")?;
                }
                write!(w, "{v:?}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    })?;
    write("labels.tsv", &|w| {
        for i in 0..graph.num_nodes() {
            match graph.label(i) {
                Some(c) => writeln!(w, "{c}")?,
                None => writeln!(w, "-1")?,
            }
        }
        Ok(())
    })?;
    let meta = GraphMeta {
        num_nodes: graph.num_nodes(),
        num_features: graph.num_features(),
        num_classes: graph.num_classes(),
    };
    write("meta.json", &|w| {
        serde_json::to_writer_pretty(&mut *w, &meta).map_err(std::io::Error::other)?;
        writeln!(w)
    })
}
