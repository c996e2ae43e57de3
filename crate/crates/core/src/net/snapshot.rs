use super::NodeId;
use serde::{Deserialize, Serialize};

/// One round's communication graph: an undirected simple graph on `0..n`.
///
/// Edges are stored normalized (`u < v`) and sorted, which makes equality
/// structural and the DGS1 rendering canonical.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NetworkSnapshot {
    n: usize,
    edges: Vec<(NodeId, NodeId)>,
}

impl NetworkSnapshot {
    /// Builds a snapshot, normalizing endpoint order and sorting. Duplicates
    /// and self-loops are kept so that `validate_snapshot` can report them.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Self {
        let mut edges: Vec<_> = edges
            .into_iter()
            .map(|(a, b)| if a <= b { (a, b) } else { (b, a) })
            .collect();
        edges.sort_unstable();
        NetworkSnapshot { n, edges }
    }

    /// Like `new` but drops duplicate edges.
    pub fn from_edge_set(n: usize, edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Self {
        let mut s = Self::new(n, edges);
        s.edges.dedup();
        s
    }

    pub fn path(order: &[NodeId], n: usize) -> Self {
        Self::from_edge_set(n, order.windows(2).map(|w| (w[0], w[1])))
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n as u32).flat_map(|u| (u + 1..n as u32).map(move |v| (NodeId(u), NodeId(v))));
        Self::new(n, edges)
    }

    pub fn cycle(n: usize) -> Self {
        let edges = (0..n as u32).map(|u| (NodeId(u), NodeId((u + 1) % n as u32)));
        Self::from_edge_set(n, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        let key = if a <= b { (a, b) } else { (b, a) };
        self.edges.binary_search(&key).is_ok()
    }

    pub fn adjacency(&self) -> Adjacency {
        Adjacency::new(self)
    }

    pub fn is_subgraph_of(&self, other: &NetworkSnapshot) -> bool {
        self.edges.iter().all(|&(a, b)| other.has_edge(a, b))
    }
}

/// Sorted neighbor lists for a snapshot.
#[derive(Clone, Debug)]
pub struct Adjacency {
    neighbors: Vec<Vec<NodeId>>,
}

impl Adjacency {
    pub fn new(snapshot: &NetworkSnapshot) -> Self {
        let mut neighbors = vec![Vec::new(); snapshot.n];
        for &(a, b) in &snapshot.edges {
            if a != b && a.index() < snapshot.n && b.index() < snapshot.n {
                neighbors[a.index()].push(b);
                neighbors[b.index()].push(a);
            }
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        Adjacency { neighbors }
    }

    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.neighbors[node.index()]
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.neighbors[node.index()].len()
    }

    pub fn n(&self) -> usize {
        self.neighbors.len()
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.neighbors[a.index()].binary_search(&b).is_ok()
    }

    /// BFS distances from a set of sources; unreachable nodes get `None`.
    pub fn distances_from(&self, sources: impl IntoIterator<Item = NodeId>) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        let mut queue = std::collections::VecDeque::new();
        for s in sources {
            if dist[s.index()].is_none() {
                dist[s.index()] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let d = dist[u.index()].unwrap();
            for &v in self.neighbors(u) {
                if dist[v.index()].is_none() {
                    dist[v.index()] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }
}

/// Why a snapshot is not a legal round graph.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SnapshotDefect {
    #[error("snapshot has no nodes")]
    Empty,
    #[error("edge ({0}, {1}) references a node outside 0..{2}")]
    NodeOutOfRange(NodeId, NodeId, usize),
    #[error("self-loop at node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(NodeId, NodeId),
    #[error("graph is disconnected: node {unreached} unreachable from node 0 ({component_size} nodes reached)")]
    Disconnected {
        unreached: NodeId,
        component_size: usize,
    },
}

/// Accepts a snapshot iff it is loop-free, simple and connected; the
/// rejection names the first violated property with a witness.
pub fn validate_snapshot(snapshot: &NetworkSnapshot) -> Result<(), SnapshotDefect> {
    let n = snapshot.n;
    if n == 0 {
        return Err(SnapshotDefect::Empty);
    }
    for &(a, b) in &snapshot.edges {
        if a.index() >= n || b.index() >= n {
            return Err(SnapshotDefect::NodeOutOfRange(a, b, n));
        }
    }
    for &(a, b) in &snapshot.edges {
        if a == b {
            return Err(SnapshotDefect::SelfLoop(a));
        }
    }
    for w in snapshot.edges.windows(2) {
        if w[0] == w[1] {
            return Err(SnapshotDefect::DuplicateEdge(w[0].0, w[0].1));
        }
    }
    // union-find over the edge list
    let mut parent: Vec<u32> = (0..n as u32).collect();
    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            parent[x as usize] = parent[parent[x as usize] as usize];
            x = parent[x as usize];
        }
        x
    }
    let mut components = n;
    for &(a, b) in &snapshot.edges {
        let (ra, rb) = (find(&mut parent, a.0), find(&mut parent, b.0));
        if ra != rb {
            parent[ra as usize] = rb;
            components -= 1;
        }
    }
    if components > 1 {
        let root = find(&mut parent, 0);
        let mut component_size = 0;
        let mut unreached = None;
        for v in 0..n as u32 {
            if find(&mut parent, v) == root {
                component_size += 1;
            } else if unreached.is_none() {
                unreached = Some(NodeId(v));
            }
        }
        return Err(SnapshotDefect::Disconnected {
            unreached: unreached.expect("more than one component"),
            component_size,
        });
    }
    Ok(())
}
