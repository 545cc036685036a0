//! Labeled graph collections: loading, saving, manifests.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::graph::{self, Graph};

/// One graph with its class label and free-form metadata.
#[derive(Debug, Clone)]
pub struct DatasetEntry {
    pub graph: Graph,
    pub label: String,
    pub meta: BTreeMap<String, String>,
}

/// A named collection of labeled graphs plus provenance describing how it
/// was produced.
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    pub name: String,
    pub entries: Vec<DatasetEntry>,
    pub provenance: BTreeMap<String, String>,
}

impl LabeledDataset {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.label.clone()).collect()
    }

    pub fn class_counts(&self) -> BTreeMap<String, usize> {
        let mut counts = BTreeMap::new();
        for e in &self.entries {
            *counts.entry(e.label.clone()).or_insert(0) += 1;
        }
        counts
    }
}

const MANIFEST_NAME: &str = "manifest.csv";
const PROVENANCE_NAME: &str = "provenance.txt";

/// Write a dataset as a directory of edge-list files plus `manifest.csv`
/// (`path,label,...metadata`). Refuses to clobber an existing manifest
/// unless `force` is set. Returns the manifest path.
pub fn save_dataset(ds: &LabeledDataset, dir: &Path, force: bool) -> Result<PathBuf> {
    let manifest_path = dir.join(MANIFEST_NAME);
    if manifest_path.exists() && !force {
        return Err(Error::WouldOverwrite(manifest_path));
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let mut meta_keys: Vec<String> = Vec::new();
    for e in &ds.entries {
        for k in e.meta.keys() {
            if !meta_keys.contains(k) {
                meta_keys.push(k.clone());
            }
        }
    }
    meta_keys.sort();

    let mut writer = csv::Writer::from_path(&manifest_path).map_err(|e| Error::Csv {
        path: manifest_path.clone(),
        source: e,
    })?;
    let mut header = vec!["path".to_string(), "label".to_string()];
    header.extend(meta_keys.iter().cloned());
    writer.write_record(&header).map_err(|e| Error::Csv {
        path: manifest_path.clone(),
        source: e,
    })?;

    for (idx, entry) in ds.entries.iter().enumerate() {
        let file_name = format!("g{idx:05}.edges");
        let file_path = dir.join(&file_name);
        fs::write(&file_path, graph::write_edge_list(&entry.graph))
            .map_err(|e| Error::io(&file_path, e))?;
        let mut record = vec![file_name, entry.label.clone()];
        for key in &meta_keys {
            record.push(entry.meta.get(key).cloned().unwrap_or_default());
        }
        writer.write_record(&record).map_err(|e| Error::Csv {
            path: manifest_path.clone(),
            source: e,
        })?;
    }
    writer.flush().map_err(|e| Error::io(&manifest_path, e))?;

    if !ds.provenance.is_empty() {
        let text: String = ds
            .provenance
            .iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect();
        let prov_path = dir.join(PROVENANCE_NAME);
        fs::write(&prov_path, text).map_err(|e| Error::io(&prov_path, e))?;
    }
    Ok(manifest_path)
}

/// Load a dataset from a manifest CSV; graph paths resolve relative to the
/// manifest's directory.
pub fn load_edge_list_dir(manifest_path: &Path) -> Result<LabeledDataset> {
    let mut reader = csv::Reader::from_path(manifest_path).map_err(|e| Error::Csv {
        path: manifest_path.to_path_buf(),
        source: e,
    })?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Csv {
            path: manifest_path.to_path_buf(),
            source: e,
        })?
        .iter()
        .map(str::to_string)
        .collect();
    let path_col = headers.iter().position(|h| h == "path").ok_or_else(|| {
        Error::parse(manifest_path, 1, "manifest is missing a `path` column")
    })?;
    let label_col = headers.iter().position(|h| h == "label").ok_or_else(|| {
        Error::parse(manifest_path, 1, "manifest is missing a `label` column")
    })?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));

    let mut entries = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Csv {
            path: manifest_path.to_path_buf(),
            source: e,
        })?;
        let rel = record.get(path_col).unwrap_or_default();
        let label = record.get(label_col).unwrap_or_default().to_string();
        let graph_path = base.join(rel);
        let text = fs::read_to_string(&graph_path).map_err(|e| Error::io(&graph_path, e))?;
        let graph = graph::parse_edge_list(&text, &graph_path)?;
        let mut meta = BTreeMap::new();
        for (col, value) in headers.iter().zip(record.iter()) {
            if col != "path" && col != "label" && !value.is_empty() {
                meta.insert(col.clone(), value.to_string());
            }
        }
        let _ = row_idx;
        entries.push(DatasetEntry { graph, label, meta });
    }
    if entries.is_empty() {
        return Err(Error::EmptyDataset(manifest_path.display().to_string()));
    }

    let mut provenance = BTreeMap::new();
    let prov_path = base.join(PROVENANCE_NAME);
    if let Ok(text) = fs::read_to_string(&prov_path) {
        for line in text.lines() {
            if let Some((k, v)) = line.split_once('=') {
                provenance.insert(k.to_string(), v.to_string());
            }
        }
    }

    let name = base
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    Ok(LabeledDataset {
        name,
        entries,
        provenance,
    })
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect())
}

/// Load a TUDataset-format bundle: `<name>_A.txt` (1-based global edge
/// pairs), `<name>_graph_indicator.txt` (node to graph map) and
/// `<name>_graph_labels.txt`. Node and edge attribute files are ignored;
/// edges listed in both directions collapse to one undirected edge.
pub fn load_tudataset(dir: &Path, name: &str) -> Result<LabeledDataset> {
    let a_path = dir.join(format!("{name}_A.txt"));
    let ind_path = dir.join(format!("{name}_graph_indicator.txt"));
    let lab_path = dir.join(format!("{name}_graph_labels.txt"));

    let indicator: Vec<usize> = read_lines(&ind_path)?
        .iter()
        .enumerate()
        .map(|(i, line)| {
            line.parse::<usize>()
                .map_err(|_| Error::parse(&ind_path, i + 1, format!("bad graph id {line:?}")))
        })
        .collect::<Result<_>>()?;
    if indicator.is_empty() {
        return Err(Error::EmptyDataset(ind_path.display().to_string()));
    }
    let num_graphs = *indicator.iter().max().unwrap();

    let label_lines = read_lines(&lab_path)?;
    if label_lines.len() != num_graphs {
        return Err(Error::InconsistentBundle(format!(
            "{} graphs in indicator but {} labels",
            num_graphs,
            label_lines.len()
        )));
    }

    // Dense per-graph node ids, assigned in global-id order.
    let mut local_id = vec![0u32; indicator.len()];
    let mut node_counts = vec![0usize; num_graphs];
    for (global, &gid) in indicator.iter().enumerate() {
        if gid == 0 || gid > num_graphs {
            return Err(Error::InconsistentBundle(format!(
                "graph id {gid} out of range in indicator line {}",
                global + 1
            )));
        }
        local_id[global] = node_counts[gid - 1] as u32;
        node_counts[gid - 1] += 1;
    }

    let mut per_graph_edges: Vec<Vec<(u32, u32)>> = vec![Vec::new(); num_graphs];
    for (i, line) in read_lines(&a_path)?.iter().enumerate() {
        let cleaned = line.replace(',', " ");
        let mut tokens = cleaned.split_whitespace();
        let (u, v) = match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(u), Some(v), None) => (u, v),
            _ => return Err(Error::parse(&a_path, i + 1, "expected two node ids")),
        };
        let u: usize = u
            .parse()
            .map_err(|_| Error::parse(&a_path, i + 1, format!("bad node id {u:?}")))?;
        let v: usize = v
            .parse()
            .map_err(|_| Error::parse(&a_path, i + 1, format!("bad node id {v:?}")))?;
        if u == 0 || v == 0 || u > indicator.len() || v > indicator.len() {
            return Err(Error::InconsistentBundle(format!(
                "edge ({u}, {v}) references a node absent from the indicator"
            )));
        }
        let (gu, gv) = (indicator[u - 1], indicator[v - 1]);
        if gu != gv {
            return Err(Error::InconsistentBundle(format!(
                "edge ({u}, {v}) crosses graphs {gu} and {gv}"
            )));
        }
        per_graph_edges[gu - 1].push((local_id[u - 1], local_id[v - 1]));
    }

    let mut entries = Vec::with_capacity(num_graphs);
    for g in 0..num_graphs {
        let outcome = graph::build_graph(node_counts[g], &per_graph_edges[g], false)?;
        let mut meta = BTreeMap::new();
        meta.insert("tud_index".to_string(), (g + 1).to_string());
        entries.push(DatasetEntry {
            graph: outcome.graph,
            label: label_lines[g].clone(),
            meta,
        });
    }

    let mut provenance = BTreeMap::new();
    provenance.insert("source".to_string(), format!("tudataset:{name}"));
    Ok(LabeledDataset {
        name: name.to_string(),
        entries,
        provenance,
    })
}
