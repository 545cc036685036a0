//! Synthetic graph models and the Link-Change noise protocol.

use std::collections::BTreeMap;
use std::collections::HashSet;

use rand::Rng;
use rayon::prelude::*;

use crate::dataset::{DatasetEntry, LabeledDataset};
use crate::error::{Error, Result};
use crate::graph::{build_graph, Graph, NodeId};
use crate::rng::{derive_rng, derive_seed};

const GEN_DOMAIN: u64 = 0x47454e; // "GEN"
const NOISE_DOMAIN: u64 = 0x4e4f495345; // "NOISE"

/// Default Watts-Strogatz rewiring probability (canonical small-world regime).
pub const DEFAULT_WS_REWIRE: f64 = 0.1;

/// Waxman locality parameter; the amplitude is calibrated per instance.
pub const WAXMAN_ALPHA: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Model {
    Ba,
    Er,
    Ws,
    Waxman,
}

impl Model {
    pub const ALL: [Model; 4] = [Model::Ba, Model::Er, Model::Ws, Model::Waxman];

    pub fn label(self) -> &'static str {
        match self {
            Model::Ba => "BA",
            Model::Er => "ER",
            Model::Ws => "WS",
            Model::Waxman => "Waxman",
        }
    }

    pub fn from_label(s: &str) -> Option<Model> {
        match s.to_ascii_uppercase().as_str() {
            "BA" => Some(Model::Ba),
            "ER" => Some(Model::Er),
            "WS" => Some(Model::Ws),
            "WAXMAN" => Some(Model::Waxman),
            _ => None,
        }
    }

    fn tag(self) -> u64 {
        match self {
            Model::Ba => 1,
            Model::Er => 2,
            Model::Ws => 3,
            Model::Waxman => 4,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ModelSpec {
    pub model: Model,
    pub n: usize,
    pub k_avg: usize,
    pub seed: u64,
}

/// Link-Change noise: rate `p` in percent; `p/2` percent of the edges are
/// removed and the same number of new edges added.
#[derive(Debug, Clone, Copy)]
pub struct NoiseSpec {
    pub p: u32,
    pub seed: u64,
}

fn check_spec(spec: &ModelSpec) -> Result<()> {
    if spec.n == 0 {
        return Err(Error::InvalidSpec("node count must be at least 1".into()));
    }
    if spec.k_avg >= spec.n {
        return Err(Error::InvalidSpec(format!(
            "average degree {} must be below the node count {}",
            spec.k_avg, spec.n
        )));
    }
    Ok(())
}

/// Erdős-Rényi `G(n, p)` with `p = k_avg / (n - 1)`.
pub fn gen_er(spec: &ModelSpec) -> Result<Graph> {
    check_spec(spec)?;
    let n = spec.n;
    let mut rng = derive_rng(spec.seed, &[GEN_DOMAIN, Model::Er.tag()]);
    let mut edges = Vec::new();
    if n > 1 {
        let p = spec.k_avg as f64 / (n - 1) as f64;
        for u in 0..n as NodeId {
            for v in (u + 1)..n as NodeId {
                if rng.random::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }
    }
    Ok(build_graph(n, &edges, false)?.graph)
}

/// Barabási-Albert preferential attachment with `m = k_avg / 2` edges per
/// new node, seeded by an `m`-node clique.
pub fn gen_ba(spec: &ModelSpec) -> Result<Graph> {
    check_spec(spec)?;
    if spec.k_avg % 2 != 0 {
        return Err(Error::InvalidSpec(
            "BA requires an even average degree (m = k_avg / 2)".into(),
        ));
    }
    let m = spec.k_avg / 2;
    let n = spec.n;
    if m >= n {
        return Err(Error::InvalidSpec(format!(
            "BA attachment count m={m} must be below n={n}"
        )));
    }
    let mut rng = derive_rng(spec.seed, &[GEN_DOMAIN, Model::Ba.tag()]);
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    // Endpoint multiset; sampling from it is degree-proportional.
    let mut endpoints: Vec<NodeId> = Vec::new();
    for u in 0..m as NodeId {
        for v in (u + 1)..m as NodeId {
            edges.push((u, v));
            endpoints.push(u);
            endpoints.push(v);
        }
    }
    let mut chosen: Vec<NodeId> = Vec::with_capacity(m);
    for v in m..n {
        chosen.clear();
        while chosen.len() < m {
            let target = if endpoints.is_empty() {
                // Only reachable with a single-node seed clique: attach
                // uniformly until the first edge exists.
                rng.random_range(0..v) as NodeId
            } else {
                endpoints[rng.random_range(0..endpoints.len())]
            };
            if !chosen.contains(&target) {
                chosen.push(target);
            }
        }
        for &target in &chosen {
            edges.push((v as NodeId, target));
            endpoints.push(v as NodeId);
            endpoints.push(target);
        }
    }
    Ok(build_graph(n, &edges, false)?.graph)
}

/// Watts-Strogatz: ring lattice with `k_avg` nearest neighbors, each lattice
/// edge rewired with probability `rewire_prob`. Edge count is preserved
/// exactly.
pub fn gen_ws(spec: &ModelSpec, rewire_prob: f64) -> Result<Graph> {
    check_spec(spec)?;
    if spec.k_avg < 2 || spec.k_avg % 2 != 0 {
        return Err(Error::InvalidSpec(
            "WS requires an even average degree of at least 2".into(),
        ));
    }
    if !(0.0..=1.0).contains(&rewire_prob) {
        return Err(Error::InvalidSpec(format!(
            "rewire probability {rewire_prob} outside [0, 1]"
        )));
    }
    let n = spec.n;
    let half_k = spec.k_avg / 2;
    let mut rng = derive_rng(spec.seed, &[GEN_DOMAIN, Model::Ws.tag()]);
    let norm = |a: NodeId, b: NodeId| (a.min(b), a.max(b));
    let mut edge_set: HashSet<(NodeId, NodeId)> = HashSet::new();
    let mut degree = vec![0usize; n];
    for j in 1..=half_k {
        for i in 0..n {
            let u = i as NodeId;
            let v = ((i + j) % n) as NodeId;
            if edge_set.insert(norm(u, v)) {
                degree[u as usize] += 1;
                degree[v as usize] += 1;
            }
        }
    }
    for j in 1..=half_k {
        for i in 0..n {
            let u = i as NodeId;
            let v = ((i + j) % n) as NodeId;
            if rng.random::<f64>() >= rewire_prob {
                continue;
            }
            if degree[i] == n - 1 {
                continue; // saturated node, nothing to rewire to
            }
            loop {
                let w = rng.random_range(0..n) as NodeId;
                if w == u || edge_set.contains(&norm(u, w)) {
                    continue;
                }
                edge_set.remove(&norm(u, v));
                edge_set.insert(norm(u, w));
                degree[v as usize] -= 1;
                degree[w as usize] += 1;
                break;
            }
        }
    }
    let mut edges: Vec<(NodeId, NodeId)> = edge_set.into_iter().collect();
    edges.sort_unstable();
    Ok(build_graph(n, &edges, false)?.graph)
}

/// Waxman spatial graph: nodes uniform in the unit square, edge probability
/// `min(1, beta * exp(-d / (alpha * sqrt(2))))` with `beta` calibrated by
/// bisection so the expected edge count equals `n * k_avg / 2` for the
/// sampled positions.
pub fn gen_waxman(spec: &ModelSpec) -> Result<Graph> {
    check_spec(spec)?;
    let n = spec.n;
    let mut rng = derive_rng(spec.seed, &[GEN_DOMAIN, Model::Waxman.tag()]);
    let positions: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
        .collect();
    let scale = WAXMAN_ALPHA * 2f64.sqrt();
    let mut weights = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
    for u in 0..n {
        for v in (u + 1)..n {
            let dx = positions[u].0 - positions[v].0;
            let dy = positions[u].1 - positions[v].1;
            weights.push((-(dx * dx + dy * dy).sqrt() / scale).exp());
        }
    }
    let target = n as f64 * spec.k_avg as f64 / 2.0;
    let expected = |beta: f64| -> f64 { weights.iter().map(|&w| (beta * w).min(1.0)).sum() };
    if target > weights.len() as f64 + 1e-9 {
        return Err(Error::Generation(format!(
            "cannot reach average degree {} with {} nodes",
            spec.k_avg, n
        )));
    }
    let mut hi = 1.0f64;
    let mut grew = 0;
    while expected(hi) < target {
        hi *= 2.0;
        grew += 1;
        if grew > 200 {
            return Err(Error::Generation("beta calibration diverged".into()));
        }
    }
    let mut lo = 0.0f64;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if expected(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let beta = 0.5 * (lo + hi);

    let mut edges = Vec::new();
    let mut idx = 0;
    for u in 0..n as NodeId {
        for v in (u + 1)..n as NodeId {
            let p = (beta * weights[idx]).min(1.0);
            idx += 1;
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Ok(build_graph(n, &edges, false)?.graph)
}

/// Dispatch on the model variant. `ws_rewire` applies only to Watts-Strogatz.
pub fn generate(spec: &ModelSpec, ws_rewire: f64) -> Result<Graph> {
    match spec.model {
        Model::Ba => gen_ba(spec),
        Model::Er => gen_er(spec),
        Model::Ws => gen_ws(spec, ws_rewire),
        Model::Waxman => gen_waxman(spec),
    }
}

/// Link-Change perturbation: remove `floor(p/200 * M)` uniformly chosen
/// edges, then add the same number of new edges uniformly among the current
/// non-edges (a removed pair may come back by chance). Node and edge counts
/// are preserved.
pub fn apply_link_change(g: &Graph, noise: &NoiseSpec) -> Result<Graph> {
    if g.is_directed() {
        return Err(Error::InvalidSpec(
            "link-change noise applies to undirected graphs".into(),
        ));
    }
    if noise.p > 100 {
        return Err(Error::InvalidSpec(format!(
            "noise rate {}% outside 0..=100",
            noise.p
        )));
    }
    let n = g.node_count();
    let mut edges = g.edges();
    let m = edges.len();
    let r = (noise.p as usize * m) / 200;
    if r == 0 {
        return Ok(g.clone());
    }
    let mut rng = derive_rng(noise.seed, &[NOISE_DOMAIN, u64::from(noise.p)]);

    // Remove r edges: partial Fisher-Yates over the canonical edge order.
    for i in 0..r {
        let j = rng.random_range(i..m);
        edges.swap(i, j);
    }
    let mut edge_set: HashSet<(NodeId, NodeId)> = edges[r..].iter().copied().collect();

    let total_pairs = n * n.saturating_sub(1) / 2;
    if total_pairs < edge_set.len() + r {
        return Err(Error::TooDense { needed: r });
    }
    let dense = edge_set.len() + r > (3 * total_pairs) / 4;
    if dense {
        // Few free slots: enumerate non-edges and sample without replacement.
        let mut free: Vec<(NodeId, NodeId)> = Vec::with_capacity(total_pairs - edge_set.len());
        for u in 0..n as NodeId {
            for v in (u + 1)..n as NodeId {
                if !edge_set.contains(&(u, v)) {
                    free.push((u, v));
                }
            }
        }
        for i in 0..r {
            let j = rng.random_range(i..free.len());
            free.swap(i, j);
            edge_set.insert(free[i]);
        }
    } else {
        let mut added = 0;
        while added < r {
            let u = rng.random_range(0..n) as NodeId;
            let v = rng.random_range(0..n) as NodeId;
            if u == v {
                continue;
            }
            let pair = (u.min(v), u.max(v));
            if edge_set.insert(pair) {
                added += 1;
            }
        }
    }

    let mut new_edges: Vec<(NodeId, NodeId)> = edge_set.into_iter().collect();
    new_edges.sort_unstable();
    Ok(build_graph(n, &new_edges, false)?.graph)
}

/// Build the four-model synthetic dataset: for every model, size and degree,
/// `per_cell` replicate graphs labeled by model name. Per-graph seeds are
/// derived from `(master_seed, model, n, k_avg, replicate)`, so generation
/// order and parallelism do not affect the output.
pub fn build_synthetic_dataset(
    sizes: &[usize],
    degrees: &[usize],
    per_cell: usize,
    master_seed: u64,
    ws_rewire: f64,
) -> Result<LabeledDataset> {
    let mut cells = Vec::new();
    for model in Model::ALL {
        for &n in sizes {
            for &k in degrees {
                for rep in 0..per_cell {
                    cells.push((model, n, k, rep));
                }
            }
        }
    }
    let entries: Vec<DatasetEntry> = cells
        .par_iter()
        .map(|&(model, n, k, rep)| {
            let seed = derive_seed(
                master_seed,
                &[GEN_DOMAIN, model.tag(), n as u64, k as u64, rep as u64],
            );
            let spec = ModelSpec {
                model,
                n,
                k_avg: k,
                seed,
            };
            let graph = generate(&spec, ws_rewire)?;
            let meta = BTreeMap::from([
                ("model".to_string(), model.label().to_string()),
                ("n".to_string(), n.to_string()),
                ("k_avg".to_string(), k.to_string()),
                ("seed".to_string(), seed.to_string()),
                ("p".to_string(), "0".to_string()),
            ]);
            Ok(DatasetEntry {
                graph,
                label: model.label().to_string(),
                meta,
            })
        })
        .collect::<Result<_>>()?;

    let provenance = BTreeMap::from([
        ("source".to_string(), "synthetic-4-models".to_string()),
        ("master_seed".to_string(), master_seed.to_string()),
        (
            "sizes".to_string(),
            sizes.iter().map(usize::to_string).collect::<Vec<_>>().join(" "),
        ),
        (
            "degrees".to_string(),
            degrees.iter().map(usize::to_string).collect::<Vec<_>>().join(" "),
        ),
        ("per_cell".to_string(), per_cell.to_string()),
        ("ws_rewire".to_string(), ws_rewire.to_string()),
    ]);
    Ok(LabeledDataset {
        name: "synthetic".to_string(),
        entries,
        provenance,
    })
}

/// One Link-Change-perturbed copy of every base graph per noise level.
/// Labels and cardinality are preserved; level order follows the input.
pub fn build_noisy_dataset(
    base: &LabeledDataset,
    levels: &[u32],
    master_seed: u64,
) -> Result<Vec<(u32, LabeledDataset)>> {
    levels
        .iter()
        .map(|&p| {
            let entries: Vec<DatasetEntry> = base
                .entries
                .par_iter()
                .enumerate()
                .map(|(idx, entry)| {
                    let noise = NoiseSpec {
                        p,
                        seed: derive_seed(
                            master_seed,
                            &[NOISE_DOMAIN, u64::from(p), idx as u64],
                        ),
                    };
                    let graph = apply_link_change(&entry.graph, &noise)?;
                    let mut meta = entry.meta.clone();
                    meta.insert("p".to_string(), p.to_string());
                    Ok(DatasetEntry {
                        graph,
                        label: entry.label.clone(),
                        meta,
                    })
                })
                .collect::<Result<_>>()?;
            let mut provenance = base.provenance.clone();
            provenance.insert("noise_p".to_string(), p.to_string());
            provenance.insert("noise_seed".to_string(), master_seed.to_string());
            Ok((
                p,
                LabeledDataset {
                    name: format!("{}_p{p}", base.name),
                    entries,
                    provenance,
                },
            ))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(model: Model, n: usize, k: usize, seed: u64) -> ModelSpec {
        ModelSpec {
            model,
            n,
            k_avg: k,
            seed,
        }
    }

    #[test]
    fn er_edge_count_near_expectation() {
        let mut total = 0usize;
        let trials = 30;
        for seed in 0..trials {
            total += gen_er(&spec(Model::Er, 100, 4, seed)).unwrap().edge_count();
        }
        let mean = total as f64 / trials as f64;
        assert!((mean - 200.0).abs() < 20.0, "mean edge count {mean}");
    }

    #[test]
    fn er_zero_degree_is_empty() {
        let g = gen_er(&spec(Model::Er, 50, 0, 1)).unwrap();
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn generators_are_deterministic() {
        for model in Model::ALL {
            let a = generate(&spec(model, 60, 4, 9), DEFAULT_WS_REWIRE).unwrap();
            let b = generate(&spec(model, 60, 4, 9), DEFAULT_WS_REWIRE).unwrap();
            assert_eq!(a, b, "{model:?} not reproducible");
            let c = generate(&spec(model, 60, 4, 10), DEFAULT_WS_REWIRE).unwrap();
            assert_ne!(a, c, "{model:?} ignores the seed");
        }
    }

    #[test]
    fn ba_average_degree_formula() {
        // 2 * (m(n-m) + C(m,2)) / n with m = 2, n = 1000.
        let g = gen_ba(&spec(Model::Ba, 1000, 4, 5)).unwrap();
        let avg = 2.0 * g.edge_count() as f64 / 1000.0;
        assert_eq!(g.edge_count(), 2 * 998 + 1);
        assert!((3.9..=4.0).contains(&avg), "avg degree {avg}");
    }

    #[test]
    fn ba_degree_distribution_is_heavy_tailed() {
        for seed in 0..20 {
            let g = gen_ba(&spec(Model::Ba, 1000, 4, seed)).unwrap();
            let max_degree = (0..1000).map(|i| g.out_degree(i)).max().unwrap();
            assert!(max_degree > 12, "seed {seed}: max degree {max_degree}");
        }
    }

    #[test]
    fn ba_rejects_m_at_least_n() {
        assert!(gen_ba(&spec(Model::Ba, 4, 8, 0)).is_err());
    }

    #[test]
    fn ws_lattice_without_rewiring() {
        let g = gen_ws(&spec(Model::Ws, 10, 4, 3), 0.0).unwrap();
        assert!((0..10).all(|i| g.out_degree(i) == 4));
    }

    #[test]
    fn ws_preserves_edge_count_at_any_rewire_rate() {
        for &prob in &[0.0, 0.1, 0.5, 1.0] {
            let g = gen_ws(&spec(Model::Ws, 40, 6, 7), prob).unwrap();
            assert_eq!(g.edge_count(), 40 * 6 / 2, "rewire {prob}");
        }
    }

    #[test]
    fn ws_rejects_odd_degree() {
        assert!(gen_ws(&spec(Model::Ws, 10, 3, 0), 0.1).is_err());
    }

    #[test]
    fn waxman_hits_target_degree() {
        let mut mean = 0.0;
        let trials = 20;
        for seed in 0..trials {
            let g = gen_waxman(&spec(Model::Waxman, 200, 6, seed)).unwrap();
            mean += 2.0 * g.edge_count() as f64 / 200.0;
        }
        mean /= trials as f64;
        assert!((mean - 6.0).abs() < 0.6, "mean realized degree {mean}");
    }

    #[test]
    fn waxman_near_complete_when_degree_near_n() {
        let g = gen_waxman(&spec(Model::Waxman, 20, 19, 2));
        // k_avg = n - 1 forces every probability to clamp at 1.
        let g = g.unwrap();
        assert_eq!(g.edge_count(), 20 * 19 / 2);
    }

    #[test]
    fn link_change_preserves_counts() {
        let g = gen_er(&spec(Model::Er, 60, 6, 4)).unwrap();
        let m = g.edge_count();
        for p in [0, 20, 40, 100] {
            let noisy = apply_link_change(&g, &NoiseSpec { p, seed: 9 }).unwrap();
            assert_eq!(noisy.node_count(), 60);
            assert_eq!(noisy.edge_count(), m, "p={p}");
        }
    }

    #[test]
    fn link_change_zero_is_identity() {
        let g = gen_er(&spec(Model::Er, 30, 4, 2)).unwrap();
        let noisy = apply_link_change(&g, &NoiseSpec { p: 0, seed: 77 }).unwrap();
        assert_eq!(noisy, g);
    }

    #[test]
    fn link_change_full_replaces_half() {
        let g = gen_er(&spec(Model::Er, 40, 6, 3)).unwrap();
        let m = g.edge_count();
        let noisy = apply_link_change(&g, &NoiseSpec { p: 100, seed: 5 }).unwrap();
        assert_eq!(noisy.edge_count(), m);
        let before: HashSet<_> = g.edges().into_iter().collect();
        let after: HashSet<_> = noisy.edges().into_iter().collect();
        let kept = before.intersection(&after).count();
        // At least the m - floor(m/2) untouched edges survive.
        assert!(kept >= m - m / 2, "kept {kept} of {m}");
    }

    #[test]
    fn link_change_small_case() {
        // M = 10, p = 40: remove 2, add 2.
        let edges: Vec<(NodeId, NodeId)> = (0..10).map(|i| (i, i + 1)).collect();
        let g = build_graph(11, &edges, false).unwrap().graph;
        let noisy = apply_link_change(&g, &NoiseSpec { p: 40, seed: 1 }).unwrap();
        assert_eq!(noisy.edge_count(), 10);
        let before: HashSet<_> = g.edges().into_iter().collect();
        let after: HashSet<_> = noisy.edges().into_iter().collect();
        assert!(before.intersection(&after).count() >= 8);
    }

    #[test]
    fn link_change_on_dense_graph_uses_free_slots() {
        // Complete graph: removed edges are the only free slots.
        let mut edges = Vec::new();
        for u in 0..8u32 {
            for v in (u + 1)..8u32 {
                edges.push((u, v));
            }
        }
        let g = build_graph(8, &edges, false).unwrap().graph;
        let noisy = apply_link_change(&g, &NoiseSpec { p: 100, seed: 3 }).unwrap();
        assert_eq!(noisy.edge_count(), g.edge_count());
    }

    #[test]
    fn synthetic_dataset_shape() {
        let ds = build_synthetic_dataset(&[30], &[4], 5, 42, DEFAULT_WS_REWIRE).unwrap();
        assert_eq!(ds.len(), 20);
        let counts = ds.class_counts();
        assert_eq!(counts.len(), 4);
        assert!(counts.values().all(|&c| c == 5));
        let mut labels: Vec<String> = counts.keys().cloned().collect();
        labels.sort();
        assert_eq!(labels, vec!["BA", "ER", "WS", "Waxman"]);
    }

    #[test]
    fn synthetic_dataset_is_seed_stable() {
        let a = build_synthetic_dataset(&[25], &[4], 2, 7, DEFAULT_WS_REWIRE).unwrap();
        let b = build_synthetic_dataset(&[25], &[4], 2, 7, DEFAULT_WS_REWIRE).unwrap();
        for (x, y) in a.entries.iter().zip(&b.entries) {
            assert_eq!(x.graph, y.graph);
        }
    }

    #[test]
    fn noisy_dataset_keeps_cardinality_and_counts() {
        let base = build_synthetic_dataset(&[25], &[4], 2, 11, DEFAULT_WS_REWIRE).unwrap();
        let levels = [0u32, 30, 60];
        let noisy = build_noisy_dataset(&base, &levels, 13).unwrap();
        assert_eq!(noisy.len(), 3);
        for (p, ds) in &noisy {
            assert_eq!(ds.len(), base.len());
            for (orig, pert) in base.entries.iter().zip(&ds.entries) {
                assert_eq!(orig.label, pert.label);
                assert_eq!(orig.graph.edge_count(), pert.graph.edge_count());
                if *p == 0 {
                    assert_eq!(orig.graph, pert.graph);
                }
            }
        }
    }
}
