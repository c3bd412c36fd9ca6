//! Configuration-model contact networks with i.i.d. mask assignment.
//!
//! Adjacency is stored as a flat neighbor array with per-node offsets (CSR)
//! so BFS stays cache-friendly at millions of nodes. Each undirected edge
//! carries an id shared by both directions, which the undirected percolation
//! variant uses to share one coin per edge.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::degree::DegreeDistribution;
use crate::error::GraphError;
use crate::model::NodeType;

/// A simple undirected multigraph with per-node mask labels.
#[derive(Debug, Clone)]
pub struct ContactNetwork {
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    edge_ids: Vec<u32>,
    node_type: Vec<NodeType>,
    edge_count: usize,
}

impl ContactNetwork {
    /// Stub-matching configuration model over `n` nodes: degrees are drawn
    /// from `dist` (with even-sum repair), stubs are paired uniformly at
    /// random, and mask labels are i.i.d. Bernoulli(m). Self-loops and
    /// multi-edges are retained unless `simple` requests erased-model
    /// cleanup.
    pub fn build(
        dist: &DegreeDistribution,
        n: usize,
        m: f64,
        seed: u64,
        simple: bool,
    ) -> Result<Self, GraphError> {
        if n < 2 {
            return Err(GraphError::TooFewNodes(n));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let degrees = dist.sample_degrees(n, &mut rng);

        let mut stubs: Vec<u32> = Vec::with_capacity(degrees.iter().sum());
        for (u, &d) in degrees.iter().enumerate() {
            stubs.extend(std::iter::repeat(u as u32).take(d));
        }
        stubs.shuffle(&mut rng);

        let mut edges: Vec<(u32, u32)> = stubs.chunks_exact(2).map(|c| (c[0], c[1])).collect();
        if simple {
            edges.retain(|&(u, v)| u != v);
            for e in &mut edges {
                if e.0 > e.1 {
                    *e = (e.1, e.0);
                }
            }
            edges.sort_unstable();
            edges.dedup();
        }

        let node_type = (0..n)
            .map(|_| {
                if rng.random::<f64>() < m {
                    NodeType::Masked
                } else {
                    NodeType::Unmasked
                }
            })
            .collect();

        Ok(Self::from_parts(n, &edges, node_type))
    }

    /// Build directly from an edge list (used by tests and network loading).
    pub fn from_edges(
        n: usize,
        edges: &[(usize, usize)],
        node_type: Vec<NodeType>,
    ) -> Result<Self, GraphError> {
        if n < 2 {
            return Err(GraphError::TooFewNodes(n));
        }
        assert_eq!(node_type.len(), n);
        let mut list = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u >= n {
                return Err(GraphError::EndpointOutOfRange(u, n));
            }
            if v >= n {
                return Err(GraphError::EndpointOutOfRange(v, n));
            }
            list.push((u as u32, v as u32));
        }
        Ok(Self::from_parts(n, &list, node_type))
    }

    fn from_parts(n: usize, edges: &[(u32, u32)], node_type: Vec<NodeType>) -> Self {
        let mut counts = vec![0usize; n];
        for &(u, v) in edges {
            counts[u as usize] += 1;
            counts[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut acc = 0usize;
        offsets.push(0);
        for c in &counts {
            acc += c;
            offsets.push(acc);
        }
        let mut cursor: Vec<usize> = offsets[..n].to_vec();
        let mut neighbors = vec![0u32; acc];
        let mut edge_ids = vec![0u32; acc];
        for (id, &(u, v)) in edges.iter().enumerate() {
            neighbors[cursor[u as usize]] = v;
            edge_ids[cursor[u as usize]] = id as u32;
            cursor[u as usize] += 1;
            neighbors[cursor[v as usize]] = u;
            edge_ids[cursor[v as usize]] = id as u32;
            cursor[v as usize] += 1;
        }
        Self {
            offsets,
            neighbors,
            edge_ids,
            node_type,
            edge_count: edges.len(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_type.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn node_type(&self, u: usize) -> NodeType {
        self.node_type[u]
    }

    pub fn node_types(&self) -> &[NodeType] {
        &self.node_type
    }

    pub fn neighbors(&self, u: usize) -> &[u32] {
        &self.neighbors[self.offsets[u]..self.offsets[u + 1]]
    }

    /// Edge ids aligned with [`neighbors`](Self::neighbors); both directions
    /// of an edge see the same id.
    pub fn neighbor_edge_ids(&self, u: usize) -> &[u32] {
        &self.edge_ids[self.offsets[u]..self.offsets[u + 1]]
    }

    /// (n_masked, n_unmasked), summing to n.
    pub fn type_counts(&self) -> (usize, usize) {
        let masked = self
            .node_type
            .iter()
            .filter(|&&t| t == NodeType::Masked)
            .count();
        (masked, self.node_type.len() - masked)
    }

    pub fn realized_mean_degree(&self) -> f64 {
        2.0 * self.edge_count as f64 / self.node_count() as f64
    }

    /// Line-oriented dump: a node-type header followed by one `u v` line per
    /// edge, for reproducibility audits.
    pub fn dump<W: std::io::Write>(&self, mut w: W) -> Result<(), GraphError> {
        writeln!(w, "# masknet network")?;
        writeln!(w, "n {}", self.node_count())?;
        let labels: Vec<String> = self
            .node_type
            .iter()
            .map(|t| t.label().to_string())
            .collect();
        writeln!(w, "types {}", labels.join(" "))?;
        // reconstruct the edge list in id order
        let mut edges = vec![(0u32, 0u32); self.edge_count];
        let mut seen = vec![false; self.edge_count];
        for u in 0..self.node_count() {
            for (&v, &id) in self.neighbors(u).iter().zip(self.neighbor_edge_ids(u)) {
                if !seen[id as usize] {
                    edges[id as usize] = (u as u32, v);
                    seen[id as usize] = true;
                }
            }
        }
        for (u, v) in edges {
            writeln!(w, "{u} {v}")?;
        }
        Ok(())
    }

    pub fn load<R: std::io::BufRead>(r: R) -> Result<Self, GraphError> {
        let mut n: Option<usize> = None;
        let mut types: Vec<NodeType> = Vec::new();
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            let bad = |reason: &str| GraphError::MalformedFile {
                line: lineno + 1,
                reason: reason.to_string(),
            };
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            match fields.next() {
                Some("n") => {
                    n = Some(
                        fields
                            .next()
                            .and_then(|f| f.parse().ok())
                            .ok_or_else(|| bad("bad node count"))?,
                    );
                }
                Some("types") => {
                    for f in fields {
                        let label: u8 = f.parse().map_err(|_| bad("bad type label"))?;
                        types.push(NodeType::from_label(label).ok_or_else(|| bad("type must be 1 or 2"))?);
                    }
                }
                Some(u) => {
                    let u: usize = u.parse().map_err(|_| bad("bad endpoint"))?;
                    let v: usize = fields
                        .next()
                        .and_then(|f| f.parse().ok())
                        .ok_or_else(|| bad("bad endpoint"))?;
                    edges.push((u, v));
                }
                None => unreachable!(),
            }
        }
        let n = n.ok_or(GraphError::MalformedFile {
            line: 0,
            reason: "missing 'n' header".into(),
        })?;
        if types.len() != n {
            return Err(GraphError::MalformedFile {
                line: 0,
                reason: format!("expected {n} type labels, got {}", types.len()),
            });
        }
        Self::from_edges(n, &edges, types)
    }
}
