//! Overlay topologies: undirected graphs whose edges are the permitted
//! gossip channels.

use std::collections::VecDeque;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopologyModel {
    BarabasiAlbert,
    ErdosRenyi,
    Complete,
}

/// Undirected graph over peers `0..p` (peer id = index + 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    adjacency: Vec<Vec<usize>>,
    model: TopologyModel,
    connected: bool,
    /// Generation attempts used (Erdős–Rényi connectivity retries).
    pub attempts: u32,
    /// Set when no connected graph was found and only the largest component
    /// was kept.
    pub reduced_to_component: bool,
}

impl Topology {
    /// Builds a topology from an edge list; duplicate edges are ignored.
    pub fn from_edges(p: usize, edges: &[(usize, usize)], model: TopologyModel) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); p];
        for &(a, b) in edges {
            if a >= p || b >= p {
                return Err(Error::invalid("edges", format!("edge ({a}, {b}) out of range")));
            }
            if a == b {
                return Err(Error::invalid("edges", format!("self-loop at {a}")));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        let connected = is_connected(&adjacency);
        Ok(Self {
            adjacency,
            model,
            connected,
            attempts: 1,
            reduced_to_component: false,
        })
    }

    pub fn complete(p: usize) -> Self {
        let adjacency = (0..p)
            .map(|i| (0..p).filter(|&j| j != i).collect())
            .collect();
        Self {
            adjacency,
            model: TopologyModel::Complete,
            connected: true,
            attempts: 1,
            reduced_to_component: false,
        }
    }

    pub fn peer_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn model(&self) -> TopologyModel {
        self.model
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    /// Sorted neighbour indices of peer index `i`.
    pub fn neighbours(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn mean_degree(&self) -> f64 {
        if self.adjacency.is_empty() {
            return 0.0;
        }
        2.0 * self.edge_count() as f64 / self.peer_count() as f64
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, list)| list.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    /// Writes one `i j` line per undirected edge.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (i, j) in self.edges() {
            writeln!(out, "{i} {j}")?;
        }
        Ok(())
    }
}

fn is_connected(adjacency: &[Vec<usize>]) -> bool {
    components(adjacency).iter().all(|&c| c == 0)
}

/// Component label per vertex, labels assigned in order of discovery.
fn components(adjacency: &[Vec<usize>]) -> Vec<usize> {
    let mut label = vec![usize::MAX; adjacency.len()];
    let mut next = 0;
    let mut queue = VecDeque::new();
    for start in 0..adjacency.len() {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = next;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for &w in &adjacency[v] {
                if label[w] == usize::MAX {
                    label[w] = next;
                    queue.push_back(w);
                }
            }
        }
        next += 1;
    }
    label
}

/// Linear preferential attachment with attractiveness 1.
///
/// Starts from a clique of `edges_per_vertex + 1` vertices; each later vertex
/// attaches to `edges_per_vertex` distinct existing vertices chosen with
/// probability proportional to `degree + 1`.
pub fn gen_ba(p: usize, edges_per_vertex: usize, seed: u64) -> Result<Topology> {
    if edges_per_vertex == 0 {
        return Err(Error::invalid("edges_per_vertex", "must be at least 1"));
    }
    if p <= edges_per_vertex {
        return Err(Error::invalid(
            "p",
            format!("need more than {edges_per_vertex} peers, got {p}"),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seed_size = edges_per_vertex + 1;
    let mut edges = Vec::with_capacity(edges_per_vertex * p);
    // Every vertex appears once per incident edge plus once for its
    // attractiveness, so a uniform draw is degree + 1 weighted.
    let mut urn: Vec<usize> = Vec::with_capacity(2 * edges_per_vertex * p + p);
    for a in 0..seed_size {
        urn.push(a);
        for b in (a + 1)..seed_size {
            edges.push((a, b));
            urn.push(a);
            urn.push(b);
        }
    }
    let mut targets = Vec::with_capacity(edges_per_vertex);
    for v in seed_size..p {
        targets.clear();
        while targets.len() < edges_per_vertex {
            let t = urn[rng.random_range(0..urn.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            edges.push((v, t));
            urn.push(v);
            urn.push(t);
        }
        urn.push(v);
    }
    Topology::from_edges(p, &edges, TopologyModel::BarabasiAlbert)
}

/// Maximum number of reseeded attempts for a connected Erdős–Rényi graph.
pub const ER_MAX_ATTEMPTS: u32 = 100;

/// Erdős–Rényi graph with edge probability `10 / p`, regenerated with the next
/// seed until connected. After [`ER_MAX_ATTEMPTS`] failures the largest
/// connected component of the last attempt is returned, relabelled.
pub fn gen_er(p: usize, seed: u64) -> Result<Topology> {
    if p <= 10 {
        return Err(Error::invalid("p", format!("need more than 10 peers, got {p}")));
    }
    let prob = 10.0 / p as f64;
    let mut last = None;
    for attempt in 0..ER_MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt as u64));
        let edges = sample_gnp(p, prob, &mut rng);
        let mut topo = Topology::from_edges(p, &edges, TopologyModel::ErdosRenyi)?;
        topo.attempts = attempt + 1;
        if topo.connected {
            return Ok(topo);
        }
        last = Some(topo);
    }
    let last = last.expect("at least one attempt");
    Ok(largest_component(&last))
}

/// G(n, p) by geometric skipping over the ordered pair list.
fn sample_gnp<R: Rng>(n: usize, prob: f64, rng: &mut R) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    if prob >= 1.0 {
        for v in 1..n {
            for w in 0..v {
                edges.push((v, w));
            }
        }
        return edges;
    }
    let log_q = (1.0 - prob).ln();
    let (mut v, mut w): (usize, i64) = (1, -1);
    while v < n {
        let r: f64 = 1.0 - rng.random::<f64>();
        w += 1 + (r.ln() / log_q).floor() as i64;
        while v < n && w >= v as i64 {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((v, w as usize));
        }
    }
    edges
}

fn largest_component(topo: &Topology) -> Topology {
    let labels = components(&topo.adjacency);
    let count = labels.iter().max().map_or(0, |&m| m + 1);
    let mut sizes = vec![0usize; count];
    for &l in &labels {
        sizes[l] += 1;
    }
    let best = (0..count).max_by_key(|&l| (sizes[l], usize::MAX - l)).unwrap_or(0);
    let mut new_id = vec![usize::MAX; labels.len()];
    let mut next = 0;
    for (v, &l) in labels.iter().enumerate() {
        if l == best {
            new_id[v] = next;
            next += 1;
        }
    }
    let edges: Vec<_> = topo
        .edges()
        .filter(|&(a, b)| new_id[a] != usize::MAX && new_id[b] != usize::MAX)
        .map(|(a, b)| (new_id[a], new_id[b]))
        .collect();
    let mut reduced = Topology::from_edges(next, &edges, topo.model).expect("relabelled edges");
    reduced.attempts = topo.attempts;
    reduced.reduced_to_component = true;
    reduced
}
