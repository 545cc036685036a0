//! Traditional, self-avoiding and limited-memory walks.
//!
//! For every start node, `W` walkers are launched. A walker moves along
//! outgoing edges, choosing uniformly among the neighbors its memory allows;
//! it stops at a dead end, and (except for the unbounded self-avoiding walk,
//! which always terminates on its own) after `S` steps. Arrivals are counted
//! at every step, revisits included; the initial placement is not counted.
//! Visit counts are normalized by the total walker count `N * W`.
//!
//! Each walker owns an RNG stream derived from
//! `(master_seed, walk type, m, start node, walker index)`, so profiles are
//! independent of thread count and scheduling.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::rng::derive_rng;

const STREAM_DOMAIN: u64 = 0x57414c4b; // "WALK"

/// Starts handled per parallel work item. Fixed (not thread-dependent) so
/// chunk boundaries never vary with the pool size.
const CHUNK: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkType {
    /// Traditional random walk: revisits allowed, capped at `S` steps.
    Rw,
    /// Self-avoiding walk: never revisits, runs until stuck.
    Saw,
    /// Self-avoiding with respect to the `m` most recently visited nodes.
    Lmw(usize),
}

impl WalkType {
    fn stream_labels(self) -> [u64; 2] {
        match self {
            WalkType::Rw => [1, 0],
            WalkType::Saw => [2, 0],
            WalkType::Lmw(m) => [3, m as u64],
        }
    }

    /// Column tag used in raw profile dumps: `t`, `s`, `r_m`.
    pub fn tag(self) -> String {
        match self {
            WalkType::Rw => "t".into(),
            WalkType::Saw => "s".into(),
            WalkType::Lmw(m) => format!("r_{m}"),
        }
    }
}

/// Which trajectory entries the limited-memory window spans.
///
/// `IncludesCurrent` treats the current node as the most recent of the `m`
/// remembered entries, so `m = 1` forbids only the current node (a no-op on
/// simple graphs) and the walk becomes fully self-avoiding as `m` grows past
/// `N`. `ExcludesCurrent` shifts the window one step back, so `m = 1` forbids
/// immediate backtracking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WindowConvention {
    #[default]
    IncludesCurrent,
    ExcludesCurrent,
}

#[derive(Debug, Clone)]
pub struct WalkConfig {
    /// `W`: walkers launched from each node.
    pub walkers_per_node: u32,
    /// `S`: step cap for capped walks; `None` means the node count of the
    /// graph at hand.
    pub max_steps: Option<usize>,
    /// Memory sizes for which limited-memory profiles are produced.
    pub memory_sizes: Vec<usize>,
    pub master_seed: u64,
    pub window: WindowConvention,
}

impl WalkConfig {
    pub fn new(master_seed: u64) -> Self {
        WalkConfig {
            walkers_per_node: 10,
            max_steps: None,
            memory_sizes: (1..=10).collect(),
            master_seed,
            window: WindowConvention::IncludesCurrent,
        }
    }

    fn step_cap(&self, g: &Graph) -> usize {
        self.max_steps.unwrap_or_else(|| g.node_count())
    }
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig::new(0)
    }
}

/// Normalized per-node visit counts for one walk type.
#[derive(Debug, Clone, PartialEq)]
pub struct VisitProfile {
    pub walk_type: WalkType,
    /// Arrivals at each node divided by `N * W`.
    pub visits: Vec<f64>,
    /// Unnormalized arrival counts.
    pub raw_arrivals: Vec<u64>,
    /// Steps taken by all walkers; equals the sum of `raw_arrivals`.
    pub total_steps: u64,
}

/// Steps taken by each self-avoiding walker, start-major then walker-minor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SawLengths {
    pub lengths: Vec<u32>,
}

/// Memory span of an avoiding walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Memory {
    /// Remember every visited node (the SAW); no step cap applies.
    Unbounded,
    /// Remember a sliding window of `m` trajectory entries; capped at `S`.
    Window(usize),
}

struct Scratch {
    seen_epoch: Vec<u32>,
    seen_step: Vec<usize>,
    allowed: Vec<NodeId>,
    epoch: u32,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            seen_epoch: vec![0; n],
            seen_step: vec![0; n],
            allowed: Vec::new(),
            epoch: 0,
        }
    }

    fn begin_walker(&mut self, start: NodeId) {
        self.epoch += 1;
        self.mark(start, 0);
    }

    fn mark(&mut self, node: NodeId, step: usize) {
        self.seen_epoch[node as usize] = self.epoch;
        self.seen_step[node as usize] = step;
    }

    /// Whether `candidate` is forbidden while standing on the node reached at
    /// `step`. Candidates equal to the current node cannot occur (simple
    /// graph), so the last-seen step of a candidate is always `< step`.
    fn forbidden(
        &self,
        candidate: NodeId,
        step: usize,
        memory: Memory,
        window: WindowConvention,
    ) -> bool {
        if self.seen_epoch[candidate as usize] != self.epoch {
            return false;
        }
        match memory {
            Memory::Unbounded => true,
            Memory::Window(m) => {
                let last = self.seen_step[candidate as usize];
                match window {
                    // forbidden window = trajectory[step - m + 1 ..= step]
                    WindowConvention::IncludesCurrent => last + m > step,
                    // forbidden window = trajectory[step - m ..= step - 1]
                    WindowConvention::ExcludesCurrent => last + m >= step,
                }
            }
        }
    }
}

struct ChunkOut {
    counts: Vec<u64>,
    steps: u64,
    lengths: Vec<u32>,
}

fn merge_chunks(n: usize, chunks: Vec<ChunkOut>) -> (Vec<u64>, u64, Vec<u32>) {
    let mut counts = vec![0u64; n];
    let mut steps = 0u64;
    let mut lengths = Vec::new();
    for chunk in chunks {
        for (total, c) in counts.iter_mut().zip(&chunk.counts) {
            *total += c;
        }
        steps += chunk.steps;
        lengths.extend(chunk.lengths);
    }
    (counts, steps, lengths)
}

fn normalize(g: &Graph, cfg: &WalkConfig, counts: Vec<u64>) -> Vec<f64> {
    let total_walkers = (g.node_count() as f64) * f64::from(cfg.walkers_per_node);
    counts.iter().map(|&c| c as f64 / total_walkers).collect()
}

/// Run the traditional random walk from every node.
pub fn run_rw(g: &Graph, cfg: &WalkConfig) -> VisitProfile {
    let n = g.node_count();
    let cap = cfg.step_cap(g);
    let chunks: Vec<ChunkOut> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk_idx| {
            let lo = chunk_idx * CHUNK;
            let hi = (lo + CHUNK).min(n);
            let mut counts = vec![0u64; n];
            let mut steps_total = 0u64;
            for start in lo..hi {
                for walker in 0..cfg.walkers_per_node {
                    let labels = WalkType::Rw.stream_labels();
                    let mut rng = derive_rng(
                        cfg.master_seed,
                        &[
                            STREAM_DOMAIN,
                            labels[0],
                            labels[1],
                            start as u64,
                            u64::from(walker),
                        ],
                    );
                    let mut current = start as NodeId;
                    let mut step = 0usize;
                    while step < cap {
                        let neighbors = g.neighbors(current);
                        if neighbors.is_empty() {
                            break;
                        }
                        current = neighbors[rng.random_range(0..neighbors.len())];
                        step += 1;
                        counts[current as usize] += 1;
                    }
                    steps_total += step as u64;
                }
            }
            ChunkOut {
                counts,
                steps: steps_total,
                lengths: Vec::new(),
            }
        })
        .collect();
    let (counts, steps, _) = merge_chunks(n, chunks);
    VisitProfile {
        walk_type: WalkType::Rw,
        visits: normalize(g, cfg, counts.clone()),
        raw_arrivals: counts,
        total_steps: steps,
    }
}

/// Run an avoiding walk (unbounded or windowed memory) from every node.
///
/// `stream` selects the RNG stream family independently of the memory, which
/// lets a windowed walk replay the exact streams of [`run_saw`]; with
/// `Memory::Window(m)` for `m >= N` the two are then bit-identical.
pub fn run_self_avoiding(
    g: &Graph,
    memory: Memory,
    stream: WalkType,
    cfg: &WalkConfig,
) -> (VisitProfile, SawLengths) {
    let n = g.node_count();
    let cap = match memory {
        Memory::Unbounded => usize::MAX,
        Memory::Window(_) => cfg.step_cap(g),
    };
    let labels = stream.stream_labels();
    let chunks: Vec<ChunkOut> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk_idx| {
            let lo = chunk_idx * CHUNK;
            let hi = (lo + CHUNK).min(n);
            let mut counts = vec![0u64; n];
            let mut steps_total = 0u64;
            let mut lengths = Vec::with_capacity((hi - lo) * cfg.walkers_per_node as usize);
            let mut scratch = Scratch::new(n);
            for start in lo..hi {
                for walker in 0..cfg.walkers_per_node {
                    let mut rng = derive_rng(
                        cfg.master_seed,
                        &[
                            STREAM_DOMAIN,
                            labels[0],
                            labels[1],
                            start as u64,
                            u64::from(walker),
                        ],
                    );
                    scratch.begin_walker(start as NodeId);
                    let mut current = start as NodeId;
                    let mut step = 0usize;
                    while step < cap {
                        scratch.allowed.clear();
                        for &v in g.neighbors(current) {
                            if !scratch.forbidden(v, step, memory, cfg.window) {
                                scratch.allowed.push(v);
                            }
                        }
                        if scratch.allowed.is_empty() {
                            break;
                        }
                        current = scratch.allowed[rng.random_range(0..scratch.allowed.len())];
                        step += 1;
                        scratch.mark(current, step);
                        counts[current as usize] += 1;
                    }
                    steps_total += step as u64;
                    lengths.push(step as u32);
                }
            }
            ChunkOut {
                counts,
                steps: steps_total,
                lengths,
            }
        })
        .collect();
    let (counts, steps, lengths) = merge_chunks(n, chunks);
    let profile = VisitProfile {
        walk_type: stream,
        visits: normalize(g, cfg, counts.clone()),
        raw_arrivals: counts,
        total_steps: steps,
    };
    (profile, SawLengths { lengths })
}

/// Self-avoiding walk: visits plus per-walker lengths.
pub fn run_saw(g: &Graph, cfg: &WalkConfig) -> (VisitProfile, SawLengths) {
    run_self_avoiding(g, Memory::Unbounded, WalkType::Saw, cfg)
}

/// Limited-memory walk with window size `m`.
pub fn run_lmw(g: &Graph, m: usize, cfg: &WalkConfig) -> VisitProfile {
    run_self_avoiding(g, Memory::Window(m), WalkType::Lmw(m), cfg).0
}

/// Exact expected normalized visit counts of the traditional walk, by
/// repeated application of the transition operator to the uniform start
/// distribution. Test oracle; requires a connected undirected graph.
pub fn expected_rw_frequencies(g: &Graph, steps: usize) -> Result<Vec<f64>> {
    let n = g.node_count();
    if g.is_directed() || g.largest_connected_component().node_count() != n {
        return Err(Error::NotConnected);
    }
    let mut dist = vec![1.0 / n as f64; n];
    let mut acc = vec![0.0; n];
    for _ in 0..steps {
        let mut next = vec![0.0; n];
        for u in 0..n {
            let neighbors = g.neighbors(u as NodeId);
            if neighbors.is_empty() {
                continue; // walker stops; its mass produces no more arrivals
            }
            let share = dist[u] / neighbors.len() as f64;
            for &v in neighbors {
                next[v as usize] += share;
            }
        }
        for (a, x) in acc.iter_mut().zip(&next) {
            *a += x;
        }
        dist = next;
    }
    Ok(acc)
}

/// CSV dump of raw profiles for one graph: `node,t,s,r_1,...` columns in the
/// order given.
pub fn profile_dump_csv(profiles: &[&VisitProfile]) -> String {
    use std::fmt::Write as _;
    let mut out = String::from("node");
    for p in profiles {
        out.push(',');
        out.push_str(&p.walk_type.tag());
    }
    out.push('\n');
    let n = profiles.first().map_or(0, |p| p.visits.len());
    for i in 0..n {
        let mut row = i.to_string();
        for p in profiles {
            write!(row, ",{}", p.visits[i]).unwrap();
        }
        out.push_str(&row);
        out.push('\n');
    }
    out
}
