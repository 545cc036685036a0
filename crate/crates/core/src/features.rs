//! Fixed-layout feature vectors from walk statistics.
//!
//! A feature vector concatenates 8-number summary blocks in a fixed order:
//! SAW lengths, then per-node `s - t` visit differences, then per-node
//! `r(m) - t` differences for each memory size ascending. Block order and
//! width never depend on the graph.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::derive_seed;
use crate::stats::{stats_of, DistributionStats};
use crate::walk::{run_lmw, run_rw, run_saw, VisitProfile, WalkConfig};

const FEATURE_DOMAIN: u64 = 0x46454154; // "FEAT"

/// Which feature blocks to assemble.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSetSpec {
    pub include_saw_lengths: bool,
    pub include_saw_visits: bool,
    /// Memory sizes for `r(m) - t` blocks, ascending.
    pub lmw_memories: Vec<usize>,
    /// Divide SAW lengths by the node count before summarizing.
    pub normalize_lengths_by_n: bool,
}

impl FeatureSetSpec {
    /// SAW lengths + SAW visit differences (16 features).
    pub fn saw() -> Self {
        FeatureSetSpec {
            include_saw_lengths: true,
            include_saw_visits: true,
            lmw_memories: Vec::new(),
            normalize_lengths_by_n: false,
        }
    }

    pub fn lengths_only() -> Self {
        FeatureSetSpec {
            include_saw_lengths: true,
            include_saw_visits: false,
            lmw_memories: Vec::new(),
            normalize_lengths_by_n: false,
        }
    }

    pub fn visits_only() -> Self {
        FeatureSetSpec {
            include_saw_lengths: false,
            include_saw_visits: true,
            lmw_memories: Vec::new(),
            normalize_lengths_by_n: false,
        }
    }

    /// A single `r(m) - t` block.
    pub fn lmw_only(m: usize) -> Self {
        FeatureSetSpec {
            include_saw_lengths: false,
            include_saw_visits: false,
            lmw_memories: vec![m],
            normalize_lengths_by_n: false,
        }
    }

    /// SAW blocks plus the given memory sizes.
    pub fn full(memories: &[usize]) -> Self {
        let mut ms = memories.to_vec();
        ms.sort_unstable();
        ms.dedup();
        FeatureSetSpec {
            include_saw_lengths: true,
            include_saw_visits: true,
            lmw_memories: ms,
            normalize_lengths_by_n: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.include_saw_lengths && !self.include_saw_visits && self.lmw_memories.is_empty() {
            return Err(Error::EmptyFeatureSet);
        }
        Ok(())
    }

    pub fn width(&self) -> usize {
        let blocks = usize::from(self.include_saw_lengths)
            + usize::from(self.include_saw_visits)
            + self.lmw_memories.len();
        8 * blocks
    }

    /// Column names, `<block>_<stat>` per the fixed layout.
    pub fn column_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.width());
        let push_block = |prefix: &str, names: &mut Vec<String>| {
            for stat in DistributionStats::NAMES {
                names.push(format!("{prefix}_{stat}"));
            }
        };
        if self.include_saw_lengths {
            push_block("saw_len", &mut names);
        }
        if self.include_saw_visits {
            push_block("saw_visit", &mut names);
        }
        for &m in &self.lmw_memories {
            push_block(&format!("lmw{m}"), &mut names);
        }
        names
    }
}

/// Ordered feature values for one graph.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
}

/// Element-wise `profile - baseline` per node. The baseline is the shared
/// traditional-walk profile of the same graph.
pub fn visit_diff(profile: &VisitProfile, baseline: &VisitProfile) -> Result<Vec<f64>> {
    if profile.visits.len() != baseline.visits.len() {
        return Err(Error::ProfileLengthMismatch {
            left: profile.visits.len(),
            right: baseline.visits.len(),
        });
    }
    Ok(profile
        .visits
        .iter()
        .zip(&baseline.visits)
        .map(|(p, b)| p - b)
        .collect())
}

/// Run the required walks once and assemble the feature blocks.
///
/// One RW baseline per graph is shared by every difference block.
pub fn extract_features(g: &Graph, cfg: &WalkConfig, spec: &FeatureSetSpec) -> Result<FeatureVector> {
    spec.validate()?;
    let needs_baseline = spec.include_saw_visits || !spec.lmw_memories.is_empty();
    let baseline = needs_baseline.then(|| run_rw(g, cfg));

    let mut values = Vec::with_capacity(spec.width());
    let push = |stats: DistributionStats, values: &mut Vec<f64>| {
        values.extend(stats.to_array());
    };

    if spec.include_saw_lengths || spec.include_saw_visits {
        let (saw_profile, lengths) = run_saw(g, cfg);
        if spec.include_saw_lengths {
            let n = g.node_count() as f64;
            let lengths: Vec<f64> = lengths
                .lengths
                .iter()
                .map(|&l| {
                    if spec.normalize_lengths_by_n {
                        f64::from(l) / n
                    } else {
                        f64::from(l)
                    }
                })
                .collect();
            push(stats_of(&lengths)?, &mut values);
        }
        if spec.include_saw_visits {
            let diff = visit_diff(&saw_profile, baseline.as_ref().unwrap())?;
            push(stats_of(&diff)?, &mut values);
        }
    }
    for &m in &spec.lmw_memories {
        let profile = run_lmw(g, m, cfg);
        let diff = visit_diff(&profile, baseline.as_ref().unwrap())?;
        push(stats_of(&diff)?, &mut values);
    }
    Ok(FeatureVector { values })
}

/// A feature matrix with named columns and one label per row.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<String>,
}

/// Extract features for every graph in a dataset, in entry order.
///
/// Each graph walks under its own seed, derived from the config's master
/// seed and the entry index, so the matrix is independent of scheduling.
pub fn extract_dataset_features(
    ds: &LabeledDataset,
    cfg: &WalkConfig,
    spec: &FeatureSetSpec,
) -> Result<FeatureMatrix> {
    spec.validate()?;
    let rows: Vec<Vec<f64>> = ds
        .entries
        .par_iter()
        .enumerate()
        .map(|(idx, entry)| {
            let mut graph_cfg = cfg.clone();
            graph_cfg.master_seed =
                derive_seed(cfg.master_seed, &[FEATURE_DOMAIN, idx as u64]);
            Ok(extract_features(&entry.graph, &graph_cfg, spec)?.values)
        })
        .collect::<Result<_>>()?;
    Ok(FeatureMatrix {
        columns: spec.column_names(),
        rows,
        labels: ds.labels(),
    })
}

impl FeatureMatrix {
    /// Keep only the named columns (in the given order).
    pub fn select_columns(&self, names: &[String]) -> Result<FeatureMatrix> {
        let indices: Vec<usize> = names
            .iter()
            .map(|n| {
                self.columns
                    .iter()
                    .position(|c| c == n)
                    .ok_or_else(|| Error::InvalidSpec(format!("unknown column {n:?}")))
            })
            .collect::<Result<_>>()?;
        let rows = self
            .rows
            .iter()
            .map(|row| indices.iter().map(|&i| row[i]).collect())
            .collect();
        Ok(FeatureMatrix {
            columns: names.to_vec(),
            rows,
            labels: self.labels.clone(),
        })
    }
}

/// Write a feature matrix as CSV: named columns, final column `label`.
/// Floats use the shortest round-trip representation.
pub fn write_feature_csv<W: Write>(matrix: &FeatureMatrix, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{},label", matrix.columns.join(","))?;
    for (row, label) in matrix.rows.iter().zip(&matrix.labels) {
        for value in row {
            write!(out, "{value},")?;
        }
        writeln!(out, "{label}")?;
    }
    Ok(())
}

/// Read a feature matrix written by [`write_feature_csv`].
pub fn read_feature_csv(path: &Path) -> Result<FeatureMatrix> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "empty feature file"))?;
    let mut columns: Vec<String> = header.split(',').map(str::to_string).collect();
    if columns.last().map(String::as_str) != Some("label") {
        return Err(Error::parse(path, 1, "last column must be `label`"));
    }
    columns.pop();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let mut fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns.len() + 1 {
            return Err(Error::parse(
                path,
                idx + 1,
                format!("expected {} fields, got {}", columns.len() + 1, fields.len()),
            ));
        }
        let label = fields.pop().unwrap().to_string();
        let row: Vec<f64> = fields
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| Error::parse(path, idx + 1, format!("bad number {f:?}")))
            })
            .collect::<Result<_>>()?;
        rows.push(row);
        labels.push(label);
    }
    if rows.is_empty() {
        return Err(Error::EmptyDataset(path.display().to_string()));
    }
    Ok(FeatureMatrix {
        columns,
        rows,
        labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::walk::WalkType;
    use approx::assert_relative_eq;

    fn cycle_graph() -> Graph {
        let edges: Vec<(u32, u32)> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        build_graph(5, &edges, true).unwrap().graph
    }

    #[test]
    fn diff_on_directed_cycle() {
        let g = cycle_graph();
        let cfg = WalkConfig {
            walkers_per_node: 1,
            max_steps: Some(5),
            ..WalkConfig::new(2)
        };
        let baseline = run_rw(&g, &cfg);
        let (saw, _) = run_saw(&g, &cfg);
        let diff = visit_diff(&saw, &baseline).unwrap();
        for d in diff {
            assert_relative_eq!(d, -0.2);
        }
    }

    #[test]
    fn diff_with_itself_is_zero() {
        let g = cycle_graph();
        let cfg = WalkConfig::new(4);
        let baseline = run_rw(&g, &cfg);
        let diff = visit_diff(&baseline, &baseline).unwrap();
        assert!(diff.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn diff_rejects_length_mismatch() {
        let a = VisitProfile {
            walk_type: WalkType::Saw,
            visits: vec![0.0; 3],
            raw_arrivals: vec![0; 3],
            total_steps: 0,
        };
        let b = VisitProfile {
            walk_type: WalkType::Rw,
            visits: vec![0.0; 4],
            raw_arrivals: vec![0; 4],
            total_steps: 0,
        };
        assert!(visit_diff(&a, &b).is_err());
    }

    #[test]
    fn k3_mean_diff_is_exactly_minus_third() {
        // With S = N = 3 and no dead ends, the node-mean of s - t is
        // (sum s - sum t) / 3 = (2 - 3) / 3 regardless of the seed.
        let g = build_graph(3, &[(0, 1), (0, 2), (1, 2)], false).unwrap().graph;
        let cfg = WalkConfig {
            walkers_per_node: 1000,
            ..WalkConfig::new(31)
        };
        let baseline = run_rw(&g, &cfg);
        let (saw, _) = run_saw(&g, &cfg);
        let diff = visit_diff(&saw, &baseline).unwrap();
        let mean = diff.iter().sum::<f64>() / 3.0;
        assert_relative_eq!(mean, -1.0 / 3.0, max_relative = 1e-12);
        // Per-node expectation check, loose Monte Carlo band.
        for d in diff {
            assert!((d + 1.0 / 3.0).abs() < 0.05, "per-node diff {d}");
        }
    }

    #[test]
    fn widths_match_block_count() {
        assert_eq!(FeatureSetSpec::saw().width(), 16);
        assert_eq!(FeatureSetSpec::full(&(1..=10).collect::<Vec<_>>()).width(), 96);
        assert_eq!(FeatureSetSpec::lmw_only(3).width(), 8);
    }

    #[test]
    fn empty_spec_is_rejected() {
        let spec = FeatureSetSpec {
            include_saw_lengths: false,
            include_saw_visits: false,
            lmw_memories: vec![],
            normalize_lengths_by_n: false,
        };
        assert!(matches!(spec.validate(), Err(Error::EmptyFeatureSet)));
    }

    #[test]
    fn extraction_is_deterministic() {
        let g = crate::generators::gen_er(&crate::generators::ModelSpec {
            model: crate::generators::Model::Er,
            n: 25,
            k_avg: 4,
            seed: 6,
        })
        .unwrap();
        let cfg = WalkConfig::new(19);
        let spec = FeatureSetSpec::full(&[1, 2, 3]);
        let a = extract_features(&g, &cfg, &spec).unwrap();
        let b = extract_features(&g, &cfg, &spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.values.len(), spec.width());
    }

    #[test]
    fn layout_does_not_depend_on_graph() {
        let spec = FeatureSetSpec::full(&[2, 5]);
        let names = spec.column_names();
        assert_eq!(names.len(), 32);
        assert_eq!(names[0], "saw_len_mean");
        assert_eq!(names[8], "saw_visit_mean");
        assert_eq!(names[16], "lmw2_mean");
        assert_eq!(names[24], "lmw5_mean");
        assert_eq!(names[31], "lmw5_entropy");
    }

    #[test]
    fn csv_roundtrip() {
        let matrix = FeatureMatrix {
            columns: vec!["a".into(), "b".into()],
            rows: vec![vec![0.125, -3.5], vec![1e-9, 2.0]],
            labels: vec!["x".into(), "y".into()],
        };
        let mut buf = Vec::new();
        write_feature_csv(&matrix, &mut buf).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        std::fs::write(&path, &buf).unwrap();
        let back = read_feature_csv(&path).unwrap();
        assert_eq!(back, matrix);
    }

    #[test]
    fn dataset_extraction_orders_rows_by_entry() {
        let ds = crate::generators::build_synthetic_dataset(&[20], &[4], 2, 3, 0.1).unwrap();
        let cfg = WalkConfig::new(8);
        let matrix = extract_dataset_features(&ds, &cfg, &FeatureSetSpec::saw()).unwrap();
        assert_eq!(matrix.rows.len(), ds.len());
        assert_eq!(matrix.labels, ds.labels());
        let again = extract_dataset_features(&ds, &cfg, &FeatureSetSpec::saw()).unwrap();
        assert_eq!(matrix, again);
    }

    #[test]
    fn select_columns_projects_blocks() {
        let full = FeatureMatrix {
            columns: vec!["a".into(), "b".into(), "c".into()],
            rows: vec![vec![1.0, 2.0, 3.0]],
            labels: vec!["l".into()],
        };
        let sel = full.select_columns(&["c".into(), "a".into()]).unwrap();
        assert_eq!(sel.rows[0], vec![3.0, 1.0]);
        assert!(full.select_columns(&["zz".into()]).is_err());
    }
}
