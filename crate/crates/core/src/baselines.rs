//! Comparison feature extractors: structural measures and the deterministic
//! tourist walk.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::dataset::LabeledDataset;
use crate::features::FeatureMatrix;
use crate::graph::{Graph, NodeId};

/// The six structural measures.
///
/// Hierarchical degree at level `d` is the mean number of nodes at
/// shortest-path distance exactly `d`. The average shortest path is taken
/// over the largest connected component. Clustering is the transitivity
/// `3 * triangles / wedges`. Assortativity is the Pearson correlation of
/// endpoint degrees over edges, defined as 0 for degree-regular graphs.
/// Directed graphs are measured through their out-neighborhoods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructuralFeatures {
    pub avg_degree: f64,
    pub hierarchical_degree_l1: f64,
    pub hierarchical_degree_l2: f64,
    pub global_clustering: f64,
    pub avg_shortest_path: f64,
    pub degree_assortativity: f64,
}

impl StructuralFeatures {
    pub const NAMES: [&'static str; 6] = [
        "avg_degree",
        "hier_deg_1",
        "hier_deg_2",
        "clustering",
        "avg_path",
        "assortativity",
    ];

    pub fn to_array(self) -> [f64; 6] {
        [
            self.avg_degree,
            self.hierarchical_degree_l1,
            self.hierarchical_degree_l2,
            self.global_clustering,
            self.avg_shortest_path,
            self.degree_assortativity,
        ]
    }
}

fn bfs_distances(g: &Graph, start: NodeId, dist: &mut [u32], queue: &mut Vec<NodeId>) {
    dist.fill(u32::MAX);
    dist[start as usize] = 0;
    queue.clear();
    queue.push(start);
    let mut head = 0;
    while head < queue.len() {
        let u = queue[head];
        head += 1;
        let du = dist[u as usize];
        for &v in g.neighbors(u) {
            if dist[v as usize] == u32::MAX {
                dist[v as usize] = du + 1;
                queue.push(v);
            }
        }
    }
}

pub fn structural_features(g: &Graph) -> StructuralFeatures {
    let n = g.node_count();
    let degrees: Vec<usize> = (0..n).map(|i| g.out_degree(i as NodeId)).collect();
    let avg_degree = degrees.iter().sum::<usize>() as f64 / n as f64;

    // Ring sizes at distance 1 and 2, averaged over all nodes.
    let (ring1, ring2) = {
        let mut dist = vec![u32::MAX; n];
        let mut queue = Vec::new();
        let mut totals = (0usize, 0usize);
        for s in 0..n {
            bfs_distances(g, s as NodeId, &mut dist, &mut queue);
            for &d in dist.iter() {
                match d {
                    1 => totals.0 += 1,
                    2 => totals.1 += 1,
                    _ => {}
                }
            }
        }
        (totals.0 as f64 / n as f64, totals.1 as f64 / n as f64)
    };

    // Transitivity: triangles via sorted-list intersection over edges.
    let mut wedges = 0usize;
    for &d in &degrees {
        wedges += d * (d.saturating_sub(1)) / 2;
    }
    let mut triangle_thirds = 0usize;
    for (u, v) in g.edges() {
        let (mut a, mut b) = (g.neighbors(u).iter(), g.neighbors(v).iter());
        let (mut x, mut y) = (a.next(), b.next());
        while let (Some(&cx), Some(&cy)) = (x, y) {
            match cx.cmp(&cy) {
                std::cmp::Ordering::Less => x = a.next(),
                std::cmp::Ordering::Greater => y = b.next(),
                std::cmp::Ordering::Equal => {
                    triangle_thirds += 1;
                    x = a.next();
                    y = b.next();
                }
            }
        }
    }
    let global_clustering = if wedges == 0 {
        0.0
    } else {
        triangle_thirds as f64 / wedges as f64
    };

    // Average shortest path on the largest component.
    let lcc = g.largest_connected_component();
    let ln = lcc.node_count();
    let avg_shortest_path = if ln < 2 {
        0.0
    } else {
        let mut dist = vec![u32::MAX; ln];
        let mut queue = Vec::new();
        let mut total = 0u64;
        let mut pairs = 0u64;
        for s in 0..ln {
            bfs_distances(&lcc, s as NodeId, &mut dist, &mut queue);
            for (t, &d) in dist.iter().enumerate() {
                if t != s && d != u32::MAX {
                    total += u64::from(d);
                    pairs += 1;
                }
            }
        }
        if pairs == 0 {
            0.0
        } else {
            total as f64 / pairs as f64
        }
    };

    // Pearson correlation of endpoint degrees over directed arc pairs
    // (each undirected edge counted in both orientations).
    let degree_assortativity = {
        let mut count = 0f64;
        let mut sx = 0f64;
        let mut sy = 0f64;
        let mut sxx = 0f64;
        let mut syy = 0f64;
        let mut sxy = 0f64;
        for u in 0..n {
            let du = degrees[u] as f64;
            for &v in g.neighbors(u as NodeId) {
                let dv = degrees[v as usize] as f64;
                count += 1.0;
                sx += du;
                sy += dv;
                sxx += du * du;
                syy += dv * dv;
                sxy += du * dv;
            }
        }
        if count == 0.0 {
            0.0
        } else {
            let cov = sxy / count - (sx / count) * (sy / count);
            let vx = sxx / count - (sx / count) * (sx / count);
            let vy = syy / count - (sy / count) * (sy / count);
            if vx <= 1e-12 || vy <= 1e-12 {
                0.0
            } else {
                cov / (vx * vy).sqrt()
            }
        }
    };

    StructuralFeatures {
        avg_degree,
        hierarchical_degree_l1: ring1,
        hierarchical_degree_l2: ring2,
        global_clustering,
        avg_shortest_path,
        degree_assortativity,
    }
}

/// Movement rule of the tourist: minimize or maximize the degree difference
/// to the next node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DtwRule {
    Min,
    Max,
}

impl DtwRule {
    pub fn label(self) -> &'static str {
        match self {
            DtwRule::Min => "min",
            DtwRule::Max => "max",
        }
    }
}

/// Tourist-walk signature parameters.
#[derive(Debug, Clone)]
pub struct DtwSpec {
    pub memories: Vec<usize>,
    pub rules: Vec<DtwRule>,
    /// Histogram bins per `(memory, rule)` pair: lengths `mu+1 ..= mu+width`.
    pub histogram_width: usize,
}

impl Default for DtwSpec {
    fn default() -> Self {
        DtwSpec {
            memories: vec![1, 2],
            rules: vec![DtwRule::Min, DtwRule::Max],
            histogram_width: 5,
        }
    }
}

/// Outcome of one tourist walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DtwOutcome {
    /// `transient` steps before the cycle, then an attractor of period
    /// `attractor` (always at least `mu + 1`).
    Finished { transient: usize, attractor: usize },
    /// No allowed neighbor before any state repeated.
    Blocked,
}

/// Deterministic tourist walk from `start` with memory `mu`.
///
/// At each step the tourist moves to the allowed neighbor (not among the
/// last `mu` trajectory entries, the current node included) that minimizes
/// or maximizes `|deg(current) - deg(next)|`; ties go to the smallest node
/// id. The walk ends when a (node, memory window) state repeats.
pub fn dtw_walk(g: &Graph, start: NodeId, mu: usize, rule: DtwRule) -> DtwOutcome {
    let mut trajectory: Vec<NodeId> = vec![start];
    let mut seen: HashMap<Vec<NodeId>, usize> = HashMap::new();
    loop {
        let step = trajectory.len() - 1;
        let window_from = (step + 1).saturating_sub(mu);
        let window = trajectory[window_from..].to_vec();
        if let Some(&first) = seen.get(&window) {
            return DtwOutcome::Finished {
                transient: first,
                attractor: step - first,
            };
        }
        seen.insert(window, step);

        let current = trajectory[step];
        let forbidden = &trajectory[window_from..];
        let current_degree = g.out_degree(current) as i64;
        let mut best: Option<(i64, NodeId)> = None;
        for &v in g.neighbors(current) {
            if forbidden.contains(&v) {
                continue;
            }
            let diff = (current_degree - g.out_degree(v) as i64).abs();
            let better = match (best, rule) {
                (None, _) => true,
                (Some((b, _)), DtwRule::Min) => diff < b,
                (Some((b, _)), DtwRule::Max) => diff > b,
            };
            if better {
                best = Some((diff, v));
            }
        }
        match best {
            Some((_, next)) => trajectory.push(next),
            None => return DtwOutcome::Blocked,
        }
    }
}

/// Concatenated trajectory-length histograms.
#[derive(Debug, Clone, PartialEq)]
pub struct DtwSignature {
    pub values: Vec<f64>,
    /// Walks that ended blocked; excluded from the histograms.
    pub blocked_walks: usize,
}

/// Histograms of total trajectory length `l = transient + attractor`
/// clipped to `mu+1 ..= mu+width`, normalized by the node count, one per
/// `(rule, memory)` pair with rules outermost.
pub fn dtw_signature(g: &Graph, spec: &DtwSpec) -> DtwSignature {
    let n = g.node_count();
    let mut values = Vec::with_capacity(spec.rules.len() * spec.memories.len() * spec.histogram_width);
    let mut blocked_walks = 0;
    for &rule in &spec.rules {
        for &mu in &spec.memories {
            let outcomes: Vec<DtwOutcome> = (0..n as NodeId)
                .into_par_iter()
                .map(|start| dtw_walk(g, start, mu, rule))
                .collect();
            let mut histogram = vec![0usize; spec.histogram_width];
            for outcome in outcomes {
                match outcome {
                    DtwOutcome::Finished {
                        transient,
                        attractor,
                    } => {
                        let length = transient + attractor;
                        if length > mu && length <= mu + spec.histogram_width {
                            histogram[length - mu - 1] += 1;
                        }
                    }
                    DtwOutcome::Blocked => blocked_walks += 1,
                }
            }
            values.extend(histogram.iter().map(|&c| c as f64 / n as f64));
        }
    }
    DtwSignature {
        values,
        blocked_walks,
    }
}

/// Column names matching [`dtw_signature`]'s layout.
pub fn dtw_column_names(spec: &DtwSpec) -> Vec<String> {
    let mut names = Vec::new();
    for &rule in &spec.rules {
        for &mu in &spec.memories {
            for l in (mu + 1)..=(mu + spec.histogram_width) {
                names.push(format!("dtw_{}_mu{}_l{}", rule.label(), mu, l));
            }
        }
    }
    names
}

/// Structural-measure feature matrix for a dataset.
pub fn structural_feature_matrix(ds: &LabeledDataset) -> FeatureMatrix {
    let rows: Vec<Vec<f64>> = ds
        .entries
        .par_iter()
        .map(|e| structural_features(&e.graph).to_array().to_vec())
        .collect();
    FeatureMatrix {
        columns: StructuralFeatures::NAMES.iter().map(|s| s.to_string()).collect(),
        rows,
        labels: ds.labels(),
    }
}

/// Tourist-walk feature matrix for a dataset.
pub fn dtw_feature_matrix(ds: &LabeledDataset, spec: &DtwSpec) -> FeatureMatrix {
    let rows: Vec<Vec<f64>> = ds
        .entries
        .par_iter()
        .map(|e| dtw_signature(&e.graph, spec).values)
        .collect();
    FeatureMatrix {
        columns: dtw_column_names(spec),
        rows,
        labels: ds.labels(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use approx::assert_relative_eq;

    fn k3() -> Graph {
        build_graph(3, &[(0, 1), (0, 2), (1, 2)], false).unwrap().graph
    }

    fn path4() -> Graph {
        build_graph(4, &[(0, 1), (1, 2), (2, 3)], false).unwrap().graph
    }

    #[test]
    fn structural_on_k3() {
        let f = structural_features(&k3());
        assert_relative_eq!(f.avg_degree, 2.0);
        assert_relative_eq!(f.hierarchical_degree_l1, 2.0);
        assert_relative_eq!(f.hierarchical_degree_l2, 0.0);
        assert_relative_eq!(f.global_clustering, 1.0);
        assert_relative_eq!(f.avg_shortest_path, 1.0);
        assert_relative_eq!(f.degree_assortativity, 0.0);
    }

    #[test]
    fn structural_on_path3() {
        let g = build_graph(3, &[(0, 1), (1, 2)], false).unwrap().graph;
        let f = structural_features(&g);
        assert_relative_eq!(f.avg_degree, 4.0 / 3.0);
        assert_relative_eq!(f.global_clustering, 0.0);
        assert_relative_eq!(f.avg_shortest_path, 4.0 / 3.0);
    }

    #[test]
    fn structural_star_assortativity() {
        let g = build_graph(5, &[(0, 1), (0, 2), (0, 3), (0, 4)], false)
            .unwrap()
            .graph;
        let f = structural_features(&g);
        assert_relative_eq!(f.degree_assortativity, -1.0, max_relative = 1e-12);
    }

    #[test]
    fn structural_path_on_largest_component() {
        // Triangle plus an isolated pair: paths measured on the triangle.
        let g = build_graph(5, &[(0, 1), (1, 2), (2, 0), (3, 4)], false)
            .unwrap()
            .graph;
        let f = structural_features(&g);
        assert_relative_eq!(f.avg_shortest_path, 1.0);
    }

    #[test]
    fn dtw_path_traces() {
        // Path 0-1-2-3, min rule, mu = 1.
        let g = path4();
        assert_eq!(
            dtw_walk(&g, 0, 1, DtwRule::Min),
            DtwOutcome::Finished {
                transient: 1,
                attractor: 2
            }
        );
        assert_eq!(
            dtw_walk(&g, 1, 1, DtwRule::Min),
            DtwOutcome::Finished {
                transient: 0,
                attractor: 2
            }
        );
    }

    #[test]
    fn dtw_isolated_node_is_blocked() {
        let g = build_graph(1, &[], false).unwrap().graph;
        assert_eq!(dtw_walk(&g, 0, 1, DtwRule::Min), DtwOutcome::Blocked);
    }

    #[test]
    fn dtw_path_histogram() {
        let g = path4();
        let spec = DtwSpec {
            memories: vec![1],
            rules: vec![DtwRule::Min],
            histogram_width: 5,
        };
        let sig = dtw_signature(&g, &spec);
        assert_eq!(sig.values, vec![0.5, 0.5, 0.0, 0.0, 0.0]);
        assert_eq!(sig.blocked_walks, 0);
    }

    #[test]
    fn dtw_default_signature_length() {
        let sig = dtw_signature(&k3(), &DtwSpec::default());
        assert_eq!(sig.values.len(), 20);
        assert_eq!(dtw_column_names(&DtwSpec::default()).len(), 20);
    }

    #[test]
    fn dtw_edgeless_graph_is_all_zero() {
        let g = build_graph(4, &[], false).unwrap().graph;
        let sig = dtw_signature(&g, &DtwSpec::default());
        assert!(sig.values.iter().all(|&v| v == 0.0));
        assert_eq!(sig.blocked_walks, 4 * 4);
    }

    #[test]
    fn dtw_attractor_bound_holds_on_random_graphs() {
        for seed in 0..50 {
            let g = crate::generators::gen_er(&crate::generators::ModelSpec {
                model: crate::generators::Model::Er,
                n: 10 + (seed as usize % 21),
                k_avg: 3,
                seed,
            })
            .unwrap();
            for mu in [1, 2] {
                for rule in [DtwRule::Min, DtwRule::Max] {
                    for start in 0..g.node_count() as NodeId {
                        if let DtwOutcome::Finished { attractor, .. } =
                            dtw_walk(&g, start, mu, rule)
                        {
                            assert!(
                                attractor >= mu + 1,
                                "seed {seed} start {start} mu {mu}: attractor {attractor}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn dtw_signature_is_deterministic() {
        let g = crate::generators::gen_ba(&crate::generators::ModelSpec {
            model: crate::generators::Model::Ba,
            n: 50,
            k_avg: 4,
            seed: 12,
        })
        .unwrap();
        let spec = DtwSpec::default();
        assert_eq!(dtw_signature(&g, &spec), dtw_signature(&g, &spec));
    }

    #[test]
    fn dtw_histogram_mass_bounded_by_one() {
        let g = crate::generators::gen_ws(
            &crate::generators::ModelSpec {
                model: crate::generators::Model::Ws,
                n: 30,
                k_avg: 4,
                seed: 3,
            },
            0.1,
        )
        .unwrap();
        let spec = DtwSpec::default();
        let sig = dtw_signature(&g, &spec);
        let per_pair = spec.histogram_width;
        for chunk in sig.values.chunks(per_pair) {
            let mass: f64 = chunk.iter().sum();
            assert!(mass <= 1.0 + 1e-12);
        }
    }
}
